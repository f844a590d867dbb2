#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "avrg/derivation.hpp"
#include "avrg/grammar.hpp"
#include "avrg/statistics.hpp"

namespace avrg {

/// Statistics of the extraction input that generation policies target.
struct SourceStats {
  std::size_t nodes = 0;
  std::uint64_t edges = 0;
  std::optional<double> degree_assortativity;
  std::optional<double> attribute_assortativity;
  std::optional<MixingMatrix> mixing; // absent when no terminal edges exist

  bool operator==(const SourceStats &) const;
};

SourceStats source_stats(const AttributedGraph &g);

/// Everything `extract` writes: the grammar, its derivation log and the
/// source statistics.
struct GrammarDocument {
  Grammar grammar;
  DerivationLog log;
  std::optional<SourceStats> source;
};

inline constexpr const char *kGrammarFormat = "avrg/1";

/// Pretty JSON with sorted keys; equal documents serialize to equal bytes.
std::string grammar_to_json(const GrammarDocument &doc);

/// Throws ValidationError naming the offending JSON path, e.g.
/// "rules[2].nodes[0].boundary: missing".
GrammarDocument grammar_from_json(const std::string &text);

void save_grammar(const GrammarDocument &doc, const std::filesystem::path &path);
GrammarDocument load_grammar(const std::filesystem::path &path);

} // namespace avrg
