#include "avrg/pipeline.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "avrg/error.hpp"
#include "avrg/extractor.hpp"

namespace avrg {

std::size_t worker_count(std::size_t tasks) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("AVRG_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1)
        n = static_cast<std::size_t>(v);
    } catch (const std::exception &) {
      throw UsageError("AVRG_THREADS must be a positive integer");
    }
  }
  return std::max<std::size_t>(1, std::min(n, tasks));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)> &job) {
  if (count == 0)
    return;
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = worker_count(count);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n; ++t)
      threads.emplace_back(worker);
    for (auto &t : threads)
      t.join();
  }
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

GenerationConfig generation_config(const GrammarDocument &doc, RewiringPolicy policy, double beta,
                                   std::optional<std::size_t> target, std::uint64_t seed) {
  GenerationConfig config;
  config.policy = policy;
  config.beta = beta;
  config.target_terminal_nodes = target;
  config.seed = seed;
  if (policy == RewiringPolicy::MixingMatrix) {
    if (!doc.source || !doc.source->mixing)
      throw ValidationError("grammar file has no source mixing matrix for the mixing-matrix policy");
    config.mixing = doc.source->mixing;
  }
  if (policy == RewiringPolicy::Greedy) {
    if (!doc.source || !doc.source->degree_assortativity || !doc.source->attribute_assortativity)
      throw ValidationError("grammar file has no source assortativity targets for the greedy policy");
    config.target_degree_assortativity = doc.source->degree_assortativity;
    config.target_attribute_assortativity = doc.source->attribute_assortativity;
  }
  validate_config(config);
  return config;
}

std::vector<GenerationResult> generate_trials(const Grammar &grammar, const GenerationConfig &base,
                                              std::size_t trials) {
  validate_config(base);
  grammar.check_closure();
  std::vector<GenerationResult> out(trials);
  parallel_for(trials, [&](std::size_t i) {
    GenerationConfig config = base;
    config.seed = base.seed + i;
    config.on_step = nullptr;
    out[i] = generate(grammar, config);
  });
  return out;
}

std::vector<EvalReport> evaluate_trials(const AttributedGraph &original,
                                        std::span<const AttributedGraph> generated) {
  std::vector<EvalReport> out(generated.size());
  parallel_for(generated.size(), [&](std::size_t i) { out[i] = evaluate(original, generated[i]); });
  return out;
}

EvalReport mean_report(std::span<const EvalReport> reports) {
  auto mean = [&](auto field) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto &r : reports)
      if (const auto v = r.*field) {
        sum += *v;
        ++n;
      }
    if (n == 0)
      return std::nullopt;
    return sum / static_cast<double>(n);
  };
  EvalReport out;
  out.lambda_distance = mean(&EvalReport::lambda_distance);
  out.delta_degree = mean(&EvalReport::delta_degree);
  out.delta_attribute = mean(&EvalReport::delta_attribute);
  out.graphlet_inverse_correlation = mean(&EvalReport::graphlet_inverse_correlation);
  for (const auto &r : reports) {
    out.spectrum_original = std::max(out.spectrum_original, r.spectrum_original);
    out.spectrum_generated = std::max(out.spectrum_generated, r.spectrum_generated);
    out.graphlet_keys = std::max(out.graphlet_keys, r.graphlet_keys);
    out.generated_has_multi_edges = out.generated_has_multi_edges || r.generated_has_multi_edges;
  }
  return out;
}

PipelineResult run_pipeline(const AttributedGraph &g, const PipelineOptions &options) {
  if (options.trials == 0)
    throw UsageError("trials must be at least 1");
  PipelineResult result;
  result.dendrogram = build_dendrogram(g, options.method, options.seed);
  result.ndc = g.edge_count() > 0 ? ndc(*result.dendrogram, g) : 0.0;
  auto extracted = extract_grammar(g, *result.dendrogram, {options.mu, options.seed});
  result.document = {std::move(extracted.grammar), std::move(extracted.log), source_stats(g)};
  const auto config = generation_config(result.document, options.policy, options.beta,
                                        options.target_nodes, options.seed);
  result.trials = generate_trials(result.document.grammar, config, options.trials);
  std::vector<AttributedGraph> graphs;
  for (const auto &t : result.trials)
    graphs.push_back(t.graph);
  result.reports = evaluate_trials(g, graphs);
  return result;
}

} // namespace avrg
