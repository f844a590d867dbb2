#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "avrg/graph.hpp"

namespace avrg {

struct LoadReport {
  std::size_t self_loops_dropped = 0;
};

/// Reads a tab-separated edge list and a node-to-label attribute file.
///
/// The alphabet is the sorted set of labels. Nodes are numbered in the order
/// they first appear in the attribute file; repeated edge lines accumulate
/// into multiplicity and self-loops are dropped (counted in the report).
AttributedGraph load_graph(std::istream &edge_list, std::istream &attributes,
                           LoadReport *report = nullptr);
AttributedGraph load_graph(const std::filesystem::path &edge_list,
                           const std::filesystem::path &attributes, LoadReport *report = nullptr);

/// One line per unit of multiplicity, so reloading reproduces the graph.
void write_edge_list(const AttributedGraph &g, std::ostream &out);
/// Terminal nodes only.
void write_attributes(const AttributedGraph &g, std::ostream &out);
void save_graph(const AttributedGraph &g, const std::filesystem::path &edge_list,
                const std::filesystem::path &attributes);

} // namespace avrg
