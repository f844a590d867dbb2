#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avrg/graph.hpp"

namespace avrg {

/// Euclidean distance between descending Laplacian spectra, the shorter
/// one padded with zeros.
double lambda_distance(std::span<const double> spectrum_a, std::span<const double> spectrum_b);
double lambda_distance(const AttributedGraph &a, const AttributedGraph &b);

struct AssortativityDeltas {
  std::optional<double> degree;
  std::optional<double> attribute;
};

/// Absolute assortativity differences; unavailable when either side is undefined.
AssortativityDeltas assortativity_deltas(const AttributedGraph &original,
                                         const AttributedGraph &generated);

/// Colored graphlet counts keyed by canonical form, e.g. "3:3:blue,blue,pink".
using GraphletCensus = std::map<std::string, std::uint64_t>;

/// Largest alphabet for which the census is attempted (|A|^4 * 11 <= 1e7).
inline constexpr std::size_t kCensusMaxKeys = 10'000'000;

/// Canonical key of the subgraph induced by 2..4 nodes: node count, the
/// smallest adjacency bitmask over all orderings, then the smallest color
/// sequence among orderings achieving it. Multi-edges count as single.
std::string graphlet_key(const AttributedGraph &g, std::span<const NodeId> nodes);

/// Counts connected induced subgraphs on 2, 3 and 4 nodes by colored
/// isomorphism class. nullopt when the alphabet is too large.
std::optional<GraphletCensus> colored_graphlet_census(const AttributedGraph &g);

/// 1 - Pearson correlation over the union of keys (missing keys count 0).
/// nullopt when either vector has zero variance.
std::optional<double> graphlet_inverse_correlation(const GraphletCensus &a, const GraphletCensus &b);

struct EvalReport {
  std::optional<double> lambda_distance;
  std::optional<double> delta_degree;
  std::optional<double> delta_attribute;
  std::optional<double> graphlet_inverse_correlation;
  std::size_t spectrum_original = 0;
  std::size_t spectrum_generated = 0;
  std::size_t graphlet_keys = 0;
  bool generated_has_multi_edges = false;

  bool operator==(const EvalReport &) const = default;
};

EvalReport evaluate(const AttributedGraph &original, const AttributedGraph &generated);

std::string report_to_json(const EvalReport &report);
EvalReport report_from_json(const std::string &text);

inline constexpr const char *kReportCsvHeader = "dataset,model,trial,lambda,d_deg,d_attr,one_minus_r";
std::string report_csv_row(const std::string &dataset, const std::string &model, std::size_t trial,
                           const EvalReport &report);

/// Shortest round-trip decimal form; empty for nullopt.
std::string format_number(std::optional<double> value);

} // namespace avrg
