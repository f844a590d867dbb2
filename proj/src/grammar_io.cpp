#include "avrg/grammar_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "avrg/error.hpp"

namespace avrg {

using nlohmann::json;

bool SourceStats::operator==(const SourceStats &o) const {
  auto same_mixing = [](const std::optional<MixingMatrix> &a, const std::optional<MixingMatrix> &b) {
    if (a.has_value() != b.has_value())
      return false;
    return !a || (a->labels == b->labels && a->entries == b->entries);
  };
  return nodes == o.nodes && edges == o.edges && degree_assortativity == o.degree_assortativity &&
         attribute_assortativity == o.attribute_assortativity && same_mixing(mixing, o.mixing);
}

SourceStats source_stats(const AttributedGraph &g) {
  SourceStats s;
  s.nodes = g.node_count();
  s.edges = g.edge_count();
  s.degree_assortativity = degree_assortativity(g);
  s.attribute_assortativity = attribute_assortativity(g);
  bool terminal_edge = false;
  g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t) {
    terminal_edge = terminal_edge || (g.node(u).is_terminal() && g.node(v).is_terminal());
  });
  if (terminal_edge)
    s.mixing = mixing_matrix(g);
  return s;
}

namespace {

json optional_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

json ref_json(const NodeRef &ref) {
  if (const auto *name = std::get_if<std::string>(&ref))
    return {{"name", *name}};
  return {{"step", std::get<std::size_t>(ref)}};
}

json rule_json(const Rule &rule, const std::vector<std::string> &alphabet) {
  json nodes = json::array();
  for (const auto &[id, node] : rule.rhs.nodes()) {
    json n = {{"id", id}, {"boundary", node.boundary.value_or(0)}};
    if (node.is_terminal()) {
      n["kind"] = "terminal";
      n["attr"] = alphabet.at(node.attr);
    } else {
      n["kind"] = "nonterminal";
      n["size"] = node.size;
    }
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  rule.rhs.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) {
    edges.push_back({{"u", u}, {"v", v}, {"multiplicity", k}});
  });
  return {{"lhs", rule.lhs}, {"frequency", rule.frequency}, {"nodes", nodes}, {"edges", edges}};
}

// JSON reader that reports where it failed.
class Reader {
public:
  Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string &what) const {
    throw ValidationError("grammar " + path_ + ": " + what);
  }

  Reader at(const char *key) const {
    if (!j_.is_object())
      fail("expected an object");
    auto it = j_.find(key);
    if (it == j_.end())
      Reader(j_, join(key)).fail("missing");
    return Reader(*it, join(key));
  }
  bool has(const char *key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }

  Reader operator[](std::size_t i) const { return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }
  std::size_t size() const {
    if (!j_.is_array())
      fail("expected an array");
    return j_.size();
  }

  template <typename T> T get() const {
    try {
      if constexpr (std::is_unsigned_v<T>) {
        if (!j_.is_number_unsigned())
          fail("expected a nonnegative integer");
      }
      return j_.get<T>();
    } catch (const json::exception &) {
      fail("wrong type");
    }
  }
  std::optional<double> get_optional_number() const {
    if (j_.is_null())
      return std::nullopt;
    if (!j_.is_number())
      fail("expected a number or null");
    return j_.get<double>();
  }
  const std::string &path() const { return path_; }

private:
  std::string join(const char *key) const { return path_.empty() ? key : path_ + "." + key; }

  const json &j_;
  std::string path_;
};

NodeRef read_ref(const Reader &r) {
  if (r.has("name"))
    return r.at("name").get<std::string>();
  if (r.has("step"))
    return r.at("step").get<std::size_t>();
  r.fail("expected a name or a step");
}

Rule read_rule(const Reader &r, const Grammar &grammar) {
  Rule rule;
  rule.lhs = r.at("lhs").get<std::uint32_t>();
  rule.frequency = r.at("frequency").get<std::uint64_t>();
  rule.rhs = AttributedGraph(grammar.alphabet());
  const auto nodes = r.at("nodes");
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const auto n = nodes[j];
    const auto id = n.at("id").get<NodeId>();
    if (id != j)
      n.at("id").fail("node ids must be 0.." + std::to_string(nodes.size() - 1) + " in order");
    const auto kind = n.at("kind").get<std::string>();
    NodeData data;
    if (kind == "terminal") {
      const auto label = n.at("attr").get<std::string>();
      auto attr = rule.rhs.find_label(label);
      if (!attr)
        n.at("attr").fail("unknown label '" + label + "'");
      data = NodeData::terminal(*attr);
    } else if (kind == "nonterminal") {
      data = NodeData::nonterminal(n.at("size").get<std::uint32_t>());
    } else {
      n.at("kind").fail("expected terminal or nonterminal");
    }
    data.boundary = n.at("boundary").get<std::uint32_t>();
    rule.rhs.add_node(std::move(data));
  }
  const auto edges = r.at("edges");
  for (std::size_t j = 0; j < edges.size(); ++j) {
    const auto e = edges[j];
    const auto u = e.at("u").get<NodeId>();
    const auto v = e.at("v").get<NodeId>();
    const auto k = e.at("multiplicity").get<std::uint32_t>();
    if (u == v || u >= nodes.size() || v >= nodes.size() || k == 0)
      e.fail("invalid edge");
    if (rule.rhs.multiplicity(u, v) > 0)
      e.fail("repeated edge");
    rule.rhs.add_edge(u, v, k);
  }
  try {
    validate_rule(rule);
  } catch (const ValidationError &err) {
    r.fail(err.what());
  }
  return rule;
}

} // namespace

std::string grammar_to_json(const GrammarDocument &doc) {
  const auto &alphabet = doc.grammar.alphabet();
  json rules = json::array();
  for (const auto &rule : doc.grammar.rules())
    rules.push_back(rule_json(rule, alphabet));
  json steps = json::array();
  for (const auto &step : doc.log.steps) {
    json mapping = json::array();
    for (const auto &ref : step.mapping)
      mapping.push_back(ref_json(ref));
    json cut = json::array();
    for (const auto &c : step.cut) {
      json e = ref_json(c.external);
      e["position"] = c.position;
      cut.push_back(std::move(e));
    }
    steps.push_back({{"tree_node", step.tree_node}, {"rule", step.rule}, {"mapping", mapping}, {"cut", cut}});
  }
  json source = nullptr;
  if (doc.source) {
    const auto &s = *doc.source;
    source = {{"nodes", s.nodes},
              {"edges", s.edges},
              {"degree_assortativity", optional_number(s.degree_assortativity)},
              {"attribute_assortativity", optional_number(s.attribute_assortativity)},
              {"mixing", nullptr}};
    if (s.mixing) {
      json rows = json::array();
      for (std::size_t i = 0; i < s.mixing->size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < s.mixing->size(); ++j)
          row.push_back(s.mixing->at(i, j));
        rows.push_back(std::move(row));
      }
      source["mixing"] = {{"labels", s.mixing->labels}, {"entries", rows}};
    }
  }
  json j = {{"format", kGrammarFormat},
            {"alphabet", alphabet},
            {"rules", rules},
            {"derivation", steps},
            {"source", source}};
  return j.dump(1) + "\n";
}

GrammarDocument grammar_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError(std::string("grammar is not valid JSON: ") + e.what());
  }
  const Reader root(j, "");
  const auto format = root.at("format").get<std::string>();
  if (format != kGrammarFormat)
    root.at("format").fail("unsupported format '" + format + "'");

  std::vector<std::string> alphabet;
  const auto alpha = root.at("alphabet");
  for (std::size_t i = 0; i < alpha.size(); ++i)
    alphabet.push_back(alpha[i].get<std::string>());
  if (!std::is_sorted(alphabet.begin(), alphabet.end()) ||
      std::adjacent_find(alphabet.begin(), alphabet.end()) != alphabet.end())
    alpha.fail("labels must be sorted and distinct");

  GrammarDocument doc{Grammar(alphabet), {}, std::nullopt};
  const auto rules = root.at("rules");
  for (std::size_t i = 0; i < rules.size(); ++i)
    doc.grammar.append(read_rule(rules[i], doc.grammar));

  const auto steps = root.at("derivation");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto s = steps[i];
    DerivationStep step;
    step.tree_node = s.at("tree_node").get<std::uint32_t>();
    step.rule = s.at("rule").get<std::size_t>();
    if (step.rule >= doc.grammar.size())
      s.at("rule").fail("no such rule");
    const auto mapping = s.at("mapping");
    for (std::size_t k = 0; k < mapping.size(); ++k)
      step.mapping.push_back(read_ref(mapping[k]));
    const auto cut = s.at("cut");
    for (std::size_t k = 0; k < cut.size(); ++k)
      step.cut.push_back({cut[k].at("position").get<NodeId>(), read_ref(cut[k])});
    doc.log.steps.push_back(std::move(step));
  }

  if (root.has("source")) {
    const auto s = root.at("source");
    SourceStats stats;
    stats.nodes = s.at("nodes").get<std::size_t>();
    stats.edges = s.at("edges").get<std::uint64_t>();
    stats.degree_assortativity = s.at("degree_assortativity").get_optional_number();
    stats.attribute_assortativity = s.at("attribute_assortativity").get_optional_number();
    if (s.has("mixing")) {
      const auto m = s.at("mixing");
      MixingMatrix mix;
      const auto labels = m.at("labels");
      for (std::size_t i = 0; i < labels.size(); ++i)
        mix.labels.push_back(labels[i].get<std::string>());
      const auto rows = m.at("entries");
      if (rows.size() != mix.labels.size())
        rows.fail("expected one row per label");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != mix.labels.size())
          rows[i].fail("expected one entry per label");
        for (std::size_t k = 0; k < rows[i].size(); ++k)
          mix.entries.push_back(rows[i][k].get<double>());
      }
      stats.mixing = std::move(mix);
    }
    doc.source = std::move(stats);
  }
  return doc;
}

void save_grammar(const GrammarDocument &doc, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("cannot write " + path.string());
  out << grammar_to_json(doc);
  if (!out)
    throw ValidationError("failed writing " + path.string());
}

GrammarDocument load_grammar(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return grammar_from_json(text.str());
}

} // namespace avrg
