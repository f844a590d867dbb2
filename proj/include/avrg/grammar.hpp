#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "avrg/graph.hpp"

namespace avrg {

/// Production X -> (R, f): a nonterminal of size `lhs` rewrites to `rhs`.
///
/// RHS node ids are the positions 0..k-1 and every RHS node carries a
/// boundary degree; the boundary degrees sum to `lhs`.
struct Rule {
  std::uint32_t lhs = 0;
  AttributedGraph rhs;
  std::uint64_t frequency = 1;

  std::size_t terminal_count() const;
  std::size_t nonterminal_count() const;

  bool operator==(const Rule &) const = default;
};

/// Throws ValidationError when the rule breaks a structural invariant.
void validate_rule(const Rule &rule);

struct UpsertResult {
  std::size_t index = 0;
  bool merged = false;
  /// candidate RHS node -> stored RHS node.
  std::map<NodeId, NodeId> position_map;
};

/// Multiset of rules over a shared terminal alphabet.
///
/// Isomorphic rules are never stored twice; inserting one bumps the stored
/// rule's frequency instead. Candidates are bucketed by cheap invariants
/// before any isomorphism search.
class Grammar {
public:
  Grammar() = default;
  explicit Grammar(std::vector<std::string> alphabet);

  const std::vector<std::string> &alphabet() const { return alphabet_; }
  const std::vector<Rule> &rules() const { return rules_; }
  const Rule &rule(std::size_t i) const { return rules_.at(i); }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  UpsertResult upsert(Rule candidate);
  /// Stores the rule as-is, without the isomorphism merge. Used when
  /// loading an already-deduplicated grammar.
  void append(Rule rule);

  /// Indices of the rules rewriting a nonterminal of size omega.
  std::vector<std::size_t> rules_with_lhs(std::uint32_t omega) const;
  /// Distinct left-hand sizes, ascending.
  std::vector<std::uint32_t> lhs_sizes() const;
  std::uint64_t total_frequency() const;

  /// Every RHS nonterminal size has a rule, every nonzero LHS size occurs
  /// as some RHS nonterminal, and a size-0 start rule exists.
  void check_closure() const;

  /// Isomorphism-invariant digest of rule i's RHS.
  const std::string &signature(std::size_t i) const { return signatures_.at(i); }

  /// Sorts rules by (lhs, RHS size, signature), keeping insertion order on
  /// ties. Returns old index -> new index.
  std::vector<std::size_t> canonicalize();

  bool operator==(const Grammar &other) const {
    return alphabet_ == other.alphabet_ && rules_ == other.rules_;
  }

private:
  std::string bucket_key(const Rule &rule, const std::string &signature) const;
  void rebuild_buckets();

  std::vector<std::string> alphabet_;
  std::vector<Rule> rules_;
  std::vector<std::string> signatures_;
  std::map<std::string, std::vector<std::size_t>> buckets_;
};

/// Up to k rule indices by descending frequency; ties go to smaller RHS,
/// then signature, then index.
std::vector<std::size_t> top_rules(const Grammar &grammar, std::size_t k);

/// Description length in bits.
///
///   graph body  = log2(|V|+1) + |V| log2(|L|+1) + sum_nonterminals log2(size+1)
///                 + pairs * (2 log2(|V|+1) + log2(kmax+1))
///   graph       = header + graph body
///   rule        = log2(lhs+1) + body(rhs) + |V_rhs| log2(lhs+1) + log2 f
///   grammar     = header + log2(#rules+1) + sum rule
///
/// where L is the terminal alphabet, kmax the largest edge multiplicity and
/// header a fixed kDescriptionHeaderBits.
inline constexpr double kDescriptionHeaderBits = 8.0;
double description_length(const AttributedGraph &g);
double description_length(const Rule &rule);
double description_length(const Grammar &grammar);

/// DL(grammar) / DL(graph); below 1 means the grammar compresses the graph.
double inverse_compression_ratio(const Grammar &grammar, const AttributedGraph &g);

} // namespace avrg
