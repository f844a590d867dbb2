#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avrg/graph.hpp"

namespace avrg {

/// Symmetric matrix of edge-mass fractions between attribute classes.
struct MixingMatrix {
  std::vector<std::string> labels;
  std::vector<double> entries; // row-major, labels.size() squared

  std::size_t size() const { return labels.size(); }
  double at(std::size_t i, std::size_t j) const { return entries[i * labels.size() + j]; }
  double &at(std::size_t i, std::size_t j) { return entries[i * labels.size() + j]; }
  std::optional<std::size_t> index_of(const std::string &label) const;
};

/// Pearson correlation of endpoint degrees over both orientations of every
/// edge, multiplicities counted. nullopt when either variance vanishes or
/// the graph has no edges.
std::optional<double> degree_assortativity(const AttributedGraph &g);

/// Newman's categorical assortativity over terminal-terminal edges.
std::optional<double> attribute_assortativity(const AttributedGraph &g);
std::optional<double> attribute_assortativity(const MixingMatrix &m);

/// Mixing matrix over the graph's full alphabet. Only edges joining two
/// terminals contribute. Throws ValidationError when there are none.
MixingMatrix mixing_matrix(const AttributedGraph &g);

} // namespace avrg
