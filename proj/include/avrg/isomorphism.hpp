#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "avrg/graph.hpp"

namespace avrg {

/// What must agree between matched nodes. Node kind, terminal label (by
/// string) and nonterminal size always do; boundary degrees are optional.
struct MatchOptions {
  bool boundary = true;
};

/// Finds a bijection a -> b preserving node data and edge multiplicities.
///
/// Color refinement prunes candidate pairs, then a VF2-style depth-first
/// search extends a partial mapping one node at a time, checking adjacency
/// (with multiplicity) against every already-mapped neighbor.
std::optional<std::map<NodeId, NodeId>> find_isomorphism(const AttributedGraph &a,
                                                         const AttributedGraph &b,
                                                         MatchOptions options = {});

bool isomorphic(const AttributedGraph &a, const AttributedGraph &b, MatchOptions options = {});

/// Isomorphism-invariant digest from iterated color refinement. Equal for
/// isomorphic graphs; distinct graphs may rarely collide.
std::string invariant_signature(const AttributedGraph &g, MatchOptions options = {});

} // namespace avrg
