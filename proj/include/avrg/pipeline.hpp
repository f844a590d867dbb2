#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "avrg/clustering.hpp"
#include "avrg/generator.hpp"
#include "avrg/grammar_io.hpp"
#include "avrg/metrics.hpp"

namespace avrg {

/// Worker count for `tasks` independent jobs: AVRG_THREADS if set (>= 1),
/// else the hardware concurrency, never more than `tasks`.
std::size_t worker_count(std::size_t tasks);

/// Runs job(i) for i in [0, count) on worker_count(count) threads. The
/// first failure by index is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &job);

/// Generation settings for a grammar document: policy statistics come from
/// its source section. Throws ValidationError when they are missing.
GenerationConfig generation_config(const GrammarDocument &doc, RewiringPolicy policy,
                                   double beta, std::optional<std::size_t> target,
                                   std::uint64_t seed);

/// Trial i uses seed base.seed + i.
std::vector<GenerationResult> generate_trials(const Grammar &grammar, const GenerationConfig &base,
                                              std::size_t trials);

std::vector<EvalReport> evaluate_trials(const AttributedGraph &original,
                                        std::span<const AttributedGraph> generated);

/// Field-wise mean over the reports where the field is available.
EvalReport mean_report(std::span<const EvalReport> reports);

struct PipelineOptions {
  ClusteringMethod method = ClusteringMethod::Louvain;
  std::uint32_t mu = 5;
  RewiringPolicy policy = RewiringPolicy::MixingMatrix;
  double beta = 0.5;
  std::optional<std::size_t> target_nodes;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
};

struct PipelineResult {
  std::optional<Dendrogram> dendrogram;
  double ndc = 0.0;
  GrammarDocument document;
  std::vector<GenerationResult> trials;
  std::vector<EvalReport> reports;
};

/// cluster -> extract -> generate -> evaluate, all in memory. Clustering and
/// extraction use options.seed; trial i generates with options.seed + i.
PipelineResult run_pipeline(const AttributedGraph &g, const PipelineOptions &options);

} // namespace avrg
