// avrg: command-line front end for grammar extraction and graph generation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "avrg/clustering.hpp"
#include "avrg/error.hpp"
#include "avrg/extractor.hpp"
#include "avrg/grammar_io.hpp"
#include "avrg/graph_io.hpp"
#include "avrg/pipeline.hpp"
#include "avrg/synthetic.hpp"

namespace fs = std::filesystem;
using namespace avrg;

namespace {

constexpr const char *kVersion = "1.0.0";

const std::vector<std::string> kMethods{"louvain", "conductance", "conductance-bisection", "label-prop",
                                        "label-propagation"};
const std::vector<std::string> kPolicies{"random", "mixing-matrix", "mixing", "greedy"};

void refuse_overwrite(const fs::path &path, bool force) {
  if (!force && fs::exists(path))
    throw UsageError(path.string() + " exists; pass --force to overwrite");
}

std::ofstream open_out(const fs::path &path) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("cannot write " + path.string());
  return out;
}

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

template <typename F> auto stage(const std::string &name, F &&fn) {
  try {
    return fn();
  } catch (const Error &e) {
    throw Error(e.code(), "stage " + name + ": " + e.what());
  } catch (const std::exception &e) {
    throw InternalError("stage " + name + ": " + e.what());
  }
}

std::vector<std::uint32_t> parse_order(const std::string &text) {
  std::vector<std::uint32_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
    } catch (const std::exception &) {
      throw UsageError("--order expects comma-separated tree node labels");
    }
  }
  return out;
}

void save_trial(const GenerationResult &r, const fs::path &dir, std::size_t i) {
  const auto stem = "trial_" + std::to_string(i);
  fs::create_directories(dir);
  save_graph(r.graph, dir / (stem + ".edges"), dir / (stem + ".attrs"));
  auto trace = open_out(dir / (stem + ".trace.csv"));
  write_trace_csv(r.trace, trace);
}

void write_evaluation(const fs::path &dir, const std::string &dataset, const std::string &model,
                      std::span<const std::size_t> trial_ids, std::span<const EvalReport> reports) {
  fs::create_directories(dir);
  auto rows = open_out(dir / "trials.csv");
  rows << kReportCsvHeader << '\n';
  for (std::size_t i = 0; i < reports.size(); ++i)
    rows << report_csv_row(dataset, model, trial_ids[i], reports[i]) << '\n';
  const auto mean = mean_report(reports);
  auto summary = open_out(dir / "summary.csv");
  summary << "dataset,model,trials,lambda,d_deg,d_attr,one_minus_r\n";
  summary << dataset << ',' << model << ',' << reports.size() << ',' << format_number(mean.lambda_distance)
          << ',' << format_number(mean.delta_degree) << ',' << format_number(mean.delta_attribute) << ','
          << format_number(mean.graphlet_inverse_correlation) << '\n';
  auto json_out = open_out(dir / "summary.json");
  json_out << report_to_json(mean) << '\n';
}

void print_summary(std::span<const EvalReport> reports) {
  const auto mean = mean_report(reports);
  std::cout << "trials " << reports.size() << '\n'
            << "lambda " << format_number(mean.lambda_distance) << '\n'
            << "d_deg " << format_number(mean.delta_degree) << '\n'
            << "d_attr " << format_number(mean.delta_attribute) << '\n'
            << "one_minus_r " << format_number(mean.graphlet_inverse_correlation) << '\n';
  if (mean.generated_has_multi_edges)
    std::cout << "note: generated graphs contain multi-edges (counted by multiplicity)\n";
}

void print_extraction(const Grammar &grammar, const AttributedGraph &g) {
  std::cout << "rules " << grammar.size() << '\n'
            << "frequency_total " << grammar.total_frequency() << '\n'
            << "inverse_compression_ratio " << format_number(inverse_compression_ratio(grammar, g)) << '\n';
}

// ---------------------------------------------------------------------------

struct ClusterArgs {
  std::string input, attrs, method = "louvain", out;
  std::uint64_t seed = 0;
  bool force = false;
};

void cmd_cluster(const ClusterArgs &a) {
  refuse_overwrite(a.out, a.force);
  const auto g = load_graph(a.input, a.attrs);
  const auto d = build_dendrogram(g, *parse_clustering_method(a.method), a.seed);
  open_out(a.out) << format_dendrogram(d, g) << '\n';
  std::cout << "ndc " << format_number(ndc(d, g)) << '\n';
}

struct ExtractArgs {
  std::string input, attrs, dendrogram, method = "louvain", out, order;
  std::uint32_t mu = 5;
  std::uint64_t seed = 0;
  bool force = false;
};

void cmd_extract(const ExtractArgs &a) {
  refuse_overwrite(a.out, a.force);
  const auto g = load_graph(a.input, a.attrs);
  std::optional<Dendrogram> d;
  if (!a.dendrogram.empty()) {
    std::ifstream in(a.dendrogram);
    if (!in)
      throw ValidationError("cannot read " + a.dendrogram);
    d = load_dendrogram(in, g);
  } else {
    d = build_dendrogram(g, *parse_clustering_method(a.method), a.seed);
  }
  auto result = a.order.empty() ? extract_grammar(g, *d, {a.mu, a.seed})
                                : extract_grammar_in_order(g, *d, parse_order(a.order));
  GrammarDocument doc{std::move(result.grammar), std::move(result.log), source_stats(g)};
  save_grammar(doc, a.out);
  print_extraction(doc.grammar, g);
}

struct GenerateArgs {
  std::string grammar, policy = "mixing-matrix", out_dir;
  std::optional<double> beta;
  std::optional<std::size_t> target;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  bool force = false;
};

void cmd_generate(const GenerateArgs &a) {
  const auto policy = *parse_rewiring_policy(a.policy);
  if (policy == RewiringPolicy::Greedy && !a.beta)
    throw UsageError("--policy greedy requires --beta");
  if (a.trials == 0)
    throw UsageError("--trials must be at least 1");
  const fs::path dir(a.out_dir);
  for (std::size_t i = 0; i < a.trials; ++i)
    refuse_overwrite(dir / ("trial_" + std::to_string(i) + ".edges"), a.force);
  const auto doc = load_grammar(a.grammar);
  const auto config = generation_config(doc, policy, a.beta.value_or(0.5), a.target, a.seed);
  const auto results = generate_trials(doc.grammar, config, a.trials);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < results.size(); ++i) {
    save_trial(results[i], dir, i);
    std::cout << "trial " << i << " nodes " << results[i].graph.node_count() << " edges "
              << results[i].graph.edge_count() << '\n';
  }
}

struct EvaluateArgs {
  std::string original, original_attrs, generated_dir, out, dataset, model = "avrg";
  bool force = false;
};

void cmd_evaluate(const EvaluateArgs &a) {
  refuse_overwrite(fs::path(a.out) / "trials.csv", a.force);
  const auto original = load_graph(a.original, a.original_attrs);
  std::map<std::size_t, fs::path> found;
  const std::regex pattern(R"(trial_(\d+)\.edges)");
  if (!fs::is_directory(a.generated_dir))
    throw ValidationError("generated directory " + a.generated_dir + " does not exist");
  for (const auto &entry : fs::directory_iterator(a.generated_dir)) {
    std::smatch m;
    const auto name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern))
      found.emplace(std::stoul(m[1]), entry.path());
  }
  if (found.empty())
    throw ValidationError("no trial_<i>.edges files in " + a.generated_dir);
  std::vector<std::size_t> ids;
  std::vector<AttributedGraph> graphs;
  for (const auto &[i, edges] : found) {
    auto attrs = edges;
    attrs.replace_extension(".attrs");
    ids.push_back(i);
    graphs.push_back(load_graph(edges, attrs));
  }
  const auto reports = evaluate_trials(original, graphs);
  const auto dataset = a.dataset.empty() ? fs::path(a.original).stem().string() : a.dataset;
  write_evaluation(a.out, dataset, a.model, ids, reports);
  print_summary(reports);
}

struct PipelineArgs {
  std::string config;
  bool force = false;
};

void cmd_pipeline(const PipelineArgs &a) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(a.config));
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError("manifest " + a.config + ": " + e.what());
  }
  const fs::path base = fs::path(a.config).parent_path();
  auto path_of = [&](const char *key) {
    if (!m.contains(key) || !m[key].is_string())
      throw ValidationError(std::string("manifest: ") + key + " must be a path string");
    const fs::path p(m[key].get<std::string>());
    return p.is_absolute() ? p : base / p;
  };
  auto get = [&](const char *key, auto fallback) {
    using T = decltype(fallback);
    if (!m.contains(key) || m[key].is_null())
      return fallback;
    try {
      return m[key].get<T>();
    } catch (const nlohmann::json::exception &) {
      throw ValidationError(std::string("manifest: ") + key + " has the wrong type");
    }
  };

  PipelineOptions o;
  const auto method = get("method", std::string("louvain"));
  const auto policy = get("policy", std::string("mixing-matrix"));
  if (!parse_clustering_method(method))
    throw UsageError("manifest: unknown method '" + method + "'");
  if (!parse_rewiring_policy(policy))
    throw UsageError("manifest: unknown policy '" + policy + "'");
  o.method = *parse_clustering_method(method);
  o.policy = *parse_rewiring_policy(policy);
  o.mu = get("mu", std::uint32_t{5});
  o.beta = get("beta", 0.5);
  o.trials = get("trials", std::size_t{10});
  o.seed = get("seed", std::uint64_t{0});
  if (m.contains("target_nodes") && !m["target_nodes"].is_null())
    o.target_nodes = get("target_nodes", std::size_t{0});
  if (o.trials == 0)
    throw UsageError("manifest: trials must be at least 1");
  const auto edges = path_of("edges");
  const auto attrs = path_of("attrs");
  const auto out = path_of("out_dir");
  const auto dataset = get("dataset", edges.stem().string());
  if (!a.force && fs::exists(out) && !fs::is_empty(out))
    throw UsageError(out.string() + " is not empty; pass --force to overwrite");

  const auto g = stage("load", [&] { return load_graph(edges, attrs); });
  const auto d = stage("cluster", [&] { return build_dendrogram(g, o.method, o.seed); });
  const double cost = g.edge_count() > 0 ? ndc(d, g) : 0.0;
  fs::create_directories(out);
  open_out(out / "dendrogram.txt") << format_dendrogram(d, g) << '\n';
  auto doc = stage("extract", [&] {
    auto r = extract_grammar(g, d, {o.mu, o.seed});
    return GrammarDocument{std::move(r.grammar), std::move(r.log), source_stats(g)};
  });
  save_grammar(doc, out / "grammar.json");
  const auto results = stage("generate", [&] {
    const auto config = generation_config(doc, o.policy, o.beta, o.target_nodes, o.seed);
    return generate_trials(doc.grammar, config, o.trials);
  });
  std::vector<AttributedGraph> graphs;
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < results.size(); ++i) {
    save_trial(results[i], out / "generated", i);
    graphs.push_back(results[i].graph);
    ids.push_back(i);
  }
  const auto reports = stage("evaluate", [&] { return evaluate_trials(g, graphs); });
  write_evaluation(out / "evaluation", dataset, "avrg", ids, reports);

  nlohmann::json run;
  run["version"] = kVersion;
  run["dataset"] = dataset;
  run["inputs"] = {{"edges", edges.string()}, {"attrs", attrs.string()}};
  run["cluster"] = {{"method", to_string(o.method)}, {"seed", o.seed}, {"ndc", cost}};
  run["extract"] = {{"mu", o.mu}, {"seed", o.seed}, {"rules", doc.grammar.size()},
                    {"inverse_compression_ratio", inverse_compression_ratio(doc.grammar, g)}};
  nlohmann::json seeds = nlohmann::json::array();
  for (std::size_t i = 0; i < o.trials; ++i)
    seeds.push_back(o.seed + i);
  run["generate"] = {{"policy", to_string(o.policy)}, {"beta", o.beta}, {"trial_seeds", seeds},
                     {"target_nodes", o.target_nodes ? nlohmann::json(*o.target_nodes) : nlohmann::json()}};
  run["rng"] = "mt19937_64";
  open_out(out / "run_manifest.json") << run.dump(2) << '\n';

  std::cout << "ndc " << format_number(cost) << '\n';
  print_extraction(doc.grammar, g);
  print_summary(reports);
}

struct RulesArgs {
  std::string grammar;
  std::size_t top = 10;
};

void cmd_rules(const RulesArgs &a) {
  const auto doc = load_grammar(a.grammar);
  const auto &grammar = doc.grammar;
  std::cout << "rules " << grammar.size() << " frequency_total " << grammar.total_frequency() << '\n';
  for (auto i : top_rules(grammar, a.top)) {
    const auto &r = grammar.rule(i);
    std::map<std::string, std::size_t> colors;
    for (const auto &[_, n] : r.rhs.nodes())
      ++colors[n.is_terminal() ? grammar.alphabet()[n.attr] : "nonterminal"];
    std::cout << "rule " << i << " lhs " << r.lhs << " f " << r.frequency << " nodes " << r.rhs.node_count()
              << " edges " << r.rhs.edge_count();
    for (const auto &[c, k] : colors)
      std::cout << ' ' << c << '=' << k;
    if (auto rho = attribute_assortativity(r.rhs))
      std::cout << " rho_attr " << format_number(rho);
    std::cout << '\n';
  }
  if (doc.source && doc.source->mixing) {
    const auto &mix = *doc.source->mixing;
    std::cout << "source mixing matrix\n";
    for (std::size_t i = 0; i < mix.size(); ++i) {
      std::cout << mix.labels[i];
      for (std::size_t j = 0; j < mix.size(); ++j)
        std::cout << ' ' << format_number(mix.at(i, j));
      std::cout << '\n';
    }
  }
}

struct SynthArgs {
  std::string kind = "cabam", out_edges, out_attrs, out_dendrogram;
  CabamConfig cabam;
  bool force = false;
};

void cmd_synth(const SynthArgs &a) {
  refuse_overwrite(a.out_edges, a.force);
  refuse_overwrite(a.out_attrs, a.force);
  if (a.kind == "fixture") {
    const auto f = two_community_fixture();
    save_graph(f.graph, a.out_edges, a.out_attrs);
    if (!a.out_dendrogram.empty()) {
      refuse_overwrite(a.out_dendrogram, a.force);
      open_out(a.out_dendrogram) << format_dendrogram(f.dendrogram, f.graph) << '\n';
    }
  } else {
    save_graph(cabam_generate(a.cabam), a.out_edges, a.out_attrs);
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Attributed vertex replacement grammars: extract, generate, evaluate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  ClusterArgs cluster;
  auto *c = app.add_subcommand("cluster", "Build a dendrogram and print its NDC");
  c->add_option("--input", cluster.input, "Edge list")->required();
  c->add_option("--attrs", cluster.attrs, "Node attribute file")->required();
  c->add_option("--method", cluster.method, "louvain | conductance | label-prop")->check(CLI::IsMember(kMethods));
  c->add_option("--seed", cluster.seed);
  c->add_option("--out", cluster.out, "Dendrogram output")->required();
  c->add_flag("--force", cluster.force);

  ExtractArgs extract;
  auto *e = app.add_subcommand("extract", "Extract a grammar and derivation log");
  e->add_option("--input", extract.input)->required();
  e->add_option("--attrs", extract.attrs)->required();
  e->add_option("--dendrogram", extract.dendrogram, "Use this dendrogram instead of clustering");
  e->add_option("--method", extract.method)->check(CLI::IsMember(kMethods));
  e->add_option("--mu", extract.mu, "Target rule size")->check(CLI::PositiveNumber);
  e->add_option("--seed", extract.seed);
  e->add_option("--order", extract.order, "Comma-separated tree node labels to extract in order");
  e->add_option("--out", extract.out, "Grammar JSON output")->required();
  e->add_flag("--force", extract.force);

  GenerateArgs generate;
  auto *g = app.add_subcommand("generate", "Generate graphs from a grammar");
  g->add_option("--grammar", generate.grammar)->required();
  g->add_option("--policy", generate.policy, "random | mixing-matrix | greedy")->check(CLI::IsMember(kPolicies));
  g->add_option("--beta", generate.beta, "Greedy degree/attribute weight")->check(CLI::Range(0.0, 1.0));
  g->add_option("--target-nodes", generate.target)->check(CLI::PositiveNumber);
  g->add_option("--trials", generate.trials);
  g->add_option("--seed", generate.seed);
  g->add_option("--out-dir", generate.out_dir)->required();
  g->add_flag("--force", generate.force);

  EvaluateArgs evaluate;
  auto *v = app.add_subcommand("evaluate", "Compare generated graphs with the original");
  v->add_option("--original", evaluate.original)->required();
  v->add_option("--original-attrs", evaluate.original_attrs)->required();
  v->add_option("--generated-dir", evaluate.generated_dir)->required();
  v->add_option("--out", evaluate.out, "Output directory")->required();
  v->add_option("--dataset", evaluate.dataset);
  v->add_option("--model", evaluate.model);
  v->add_flag("--force", evaluate.force);

  PipelineArgs pipeline;
  auto *p = app.add_subcommand("pipeline", "cluster, extract, generate and evaluate from a JSON manifest");
  p->add_option("config", pipeline.config)->required();
  p->add_flag("--force", pipeline.force);

  RulesArgs rules;
  auto *r = app.add_subcommand("rules", "Report the most frequent rules");
  r->add_option("--grammar", rules.grammar)->required();
  r->add_option("--top", rules.top);

  SynthArgs synth;
  auto *s = app.add_subcommand("synth", "Write a built-in synthetic graph");
  s->add_option("--kind", synth.kind)->check(CLI::IsMember({"fixture", "cabam"}));
  s->add_option("--n", synth.cabam.n);
  s->add_option("--m", synth.cabam.m);
  s->add_option("--classes", synth.cabam.num_classes);
  s->add_option("--pc", synth.cabam.p_c);
  s->add_option("--seed", synth.cabam.seed);
  s->add_option("--out-edges", synth.out_edges)->required();
  s->add_option("--out-attrs", synth.out_attrs)->required();
  s->add_option("--out-dendrogram", synth.out_dendrogram);
  s->add_flag("--force", synth.force);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::Usage);
  }

  try {
    if (*c)
      cmd_cluster(cluster);
    else if (*e)
      cmd_extract(extract);
    else if (*g)
      cmd_generate(generate);
    else if (*v)
      cmd_evaluate(evaluate);
    else if (*p)
      cmd_pipeline(pipeline);
    else if (*r)
      cmd_rules(rules);
    else if (*s)
      cmd_synth(synth);
  } catch (const Error &err) {
    std::cerr << "error: " << err.what() << '\n';
    if (err.code() == ExitCode::Usage)
      std::cerr << "run with --help for usage\n";
    return static_cast<int>(err.code());
  } catch (const std::exception &err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return static_cast<int>(ExitCode::Internal);
  }
  return 0;
}
