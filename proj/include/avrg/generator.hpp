#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "avrg/derivation.hpp"
#include "avrg/grammar.hpp"
#include "avrg/graph.hpp"
#include "avrg/random.hpp"
#include "avrg/statistics.hpp"

namespace avrg {

enum class RewiringPolicy { Random, MixingMatrix, Greedy };

std::optional<RewiringPolicy> parse_rewiring_policy(std::string_view name);
std::string_view to_string(RewiringPolicy policy);

struct GenerationConfig {
  RewiringPolicy policy = RewiringPolicy::MixingMatrix;
  /// Greedy weight between degree (1) and attribute (0) assortativity error.
  double beta = 0.5;
  /// Unset: run until no nonterminal is left. Set: keep growing until at
  /// least this many terminals exist, then finish with the shallowest rules.
  std::optional<std::size_t> target_terminal_nodes;
  std::uint64_t seed = 0;
  std::optional<MixingMatrix> mixing;
  std::optional<double> target_degree_assortativity;
  std::optional<double> target_attribute_assortativity;
  /// Greedy enumerates every assignment up to this many, else samples this many.
  std::size_t greedy_candidate_cap = 10000;
  /// When set, each trace record carries the terminal graph's lambda distance to it.
  const AttributedGraph *lambda_reference = nullptr;
  /// Called with the whole graph after every rule application.
  std::function<void(const AttributedGraph &)> on_step;
};

/// Throws ValidationError for policy/statistics mismatches.
void validate_config(const GenerationConfig &config);

struct GrowthRecord {
  std::size_t iteration = 0;
  std::size_t nodes_all = 0;
  std::uint64_t edges_all = 0;
  std::size_t nodes_term = 0;
  std::uint64_t edges_term = 0;
  std::optional<double> attr_assort_term;
  std::optional<double> lambda_term;
};

struct GrowthTrace {
  std::vector<GrowthRecord> records;
};

/// CSV with header iter,nodes_all,edges_all,nodes_term,edges_term,attr_assort_term.
/// Undefined assortativity is written as an empty field.
void write_trace_csv(const GrowthTrace &trace, std::ostream &out);

/// Running assortativity sums over the terminal-only subgraph of a growing
/// graph. Terminal nodes and terminal-terminal edges are only ever added.
class TerminalStats {
public:
  explicit TerminalStats(std::size_t alphabet_size);

  struct Delta {
    NodeId u;
    NodeId v;
    std::uint32_t multiplicity;
  };

  void add_node(NodeId id, std::uint32_t attr);
  /// Records new terminal-terminal edges already inserted into g.
  void commit(const AttributedGraph &g, std::span<const Delta> edges);
  /// (degree, attribute) assortativity as if `edges` were added on top of g.
  std::pair<std::optional<double>, std::optional<double>>
  preview(const AttributedGraph &g, std::span<const Delta> edges) const;

  std::optional<double> degree_assortativity() const;
  std::optional<double> attribute_assortativity() const;
  std::size_t node_count() const { return attr_.size(); }
  std::uint64_t edge_count() const { return edges_; }

private:
  struct Sums {
    long double a = 0, b = 0, c = 0, m = 0; // sum k du dv, sum d^2, sum d^3, sum d
  };
  Sums apply(const AttributedGraph &g, std::span<const Delta> edges,
             std::unordered_map<NodeId, std::uint64_t> *new_degrees) const;
  std::uint64_t degree_of(NodeId id) const;
  static std::optional<double> pearson(const Sums &s);
  std::optional<double> categorical(std::span<const Delta> extra) const;

  std::size_t k_;
  std::unordered_map<NodeId, std::uint32_t> attr_;
  std::unordered_map<NodeId, std::uint64_t> degree_;
  std::vector<std::uint64_t> color_; // k x k counts, both orientations
  std::uint64_t edges_ = 0;
  Sums sums_;
};

/// Graph under construction plus the bookkeeping generation needs.
class GenerationState {
public:
  explicit GenerationState(std::vector<std::string> alphabet);

  const AttributedGraph &graph() const { return graph_; }
  const std::vector<NodeId> &nonterminals() const { return nonterminals_; }
  const TerminalStats &stats() const { return stats_; }

  NodeId add_nonterminal(std::uint32_t size);
  NodeId add_terminal(std::uint32_t attr);
  void add_edge(NodeId u, NodeId v, std::uint32_t multiplicity = 1);

  struct Opening {
    std::vector<NodeId> half_edges; // external endpoints of x's broken edges
    std::vector<NodeId> inserted;   // RHS position -> new node id
    std::vector<std::uint32_t> capacity; // RHS position -> boundary degree
  };

  /// Removes nonterminal x and inserts a fresh copy of rule's RHS with its
  /// internal edges. The broken edges are left dangling until rewire().
  Opening open(NodeId x, const Rule &rule);
  /// Connects half-edge h to RHS position positions[h], after checking that
  /// the positions fill every boundary degree exactly.
  void rewire(const Opening &opening, std::span<const NodeId> positions);

  /// open() + rewire(). Returns position -> new node id.
  std::vector<NodeId> splice(NodeId x, const Rule &rule, std::span<const NodeId> positions);

  /// x's incident edges expanded by multiplicity, ascending by neighbor.
  std::vector<NodeId> half_edges(NodeId x) const;

private:
  void forget_nonterminal(NodeId x);
  void add_edges(std::span<const TerminalStats::Delta> edges);

  AttributedGraph graph_;
  std::vector<NodeId> nonterminals_;
  std::unordered_map<NodeId, std::size_t> slot_;
  TerminalStats stats_;
};

/// Uniform over the current nonterminals.
NodeId select_nonterminal(const GenerationState &state, Rng &rng);

/// Frequency-weighted draw among rules with the given LHS size. With
/// `finishing` set, only rules of minimal derivation height are eligible
/// (heights from derivation_heights). Throws ValidationError on an empty
/// bucket.
std::size_t select_rule(const Grammar &grammar, std::uint32_t omega, Rng &rng,
                        const std::vector<std::uint32_t> *rule_heights = nullptr);

/// Shortest number of rewriting rounds that fully terminalizes each rule.
/// Throws ValidationError when the start symbol cannot terminate.
std::vector<std::uint32_t> derivation_heights(const Grammar &grammar);

/// Chooses RHS positions for x's half-edges under the configured policy
/// and splices the rule in. Panics (InternalError) when x's degree differs
/// from the rule's LHS size.
std::vector<NodeId> apply_rule(GenerationState &state, NodeId x, const Rule &rule,
                               const GenerationConfig &config, Rng &rng);

struct GenerationResult {
  AttributedGraph graph;
  GrowthTrace trace;
};

/// Grows a terminal-only graph from the size-0 start nonterminal. When the
/// nonterminals run out below the target, a fresh start nonterminal seeds
/// another component.
GenerationResult generate(const Grammar &grammar, const GenerationConfig &config);

/// Undoes the logged extraction steps in reverse, rebuilding the input
/// graph (node names included). Throws ValidationError on any mismatch.
AttributedGraph replay(const Grammar &grammar, const DerivationLog &log);

} // namespace avrg
