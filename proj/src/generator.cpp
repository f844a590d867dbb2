#include "avrg/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_set>

#include "avrg/error.hpp"
#include "avrg/metrics.hpp"

namespace avrg {

std::optional<RewiringPolicy> parse_rewiring_policy(std::string_view name) {
  if (name == "random")
    return RewiringPolicy::Random;
  if (name == "mixing-matrix" || name == "mixing")
    return RewiringPolicy::MixingMatrix;
  if (name == "greedy")
    return RewiringPolicy::Greedy;
  return std::nullopt;
}

std::string_view to_string(RewiringPolicy policy) {
  switch (policy) {
  case RewiringPolicy::Random:
    return "random";
  case RewiringPolicy::MixingMatrix:
    return "mixing-matrix";
  case RewiringPolicy::Greedy:
    return "greedy";
  }
  return "?";
}

void validate_config(const GenerationConfig &config) {
  if (!(config.beta >= 0.0 && config.beta <= 1.0))
    throw ValidationError("beta must lie in [0, 1]");
  if (config.target_terminal_nodes && *config.target_terminal_nodes == 0)
    throw ValidationError("target node count must be positive");
  if (config.policy == RewiringPolicy::MixingMatrix && !config.mixing)
    throw ValidationError("the mixing-matrix policy needs a mixing matrix");
  if (config.policy == RewiringPolicy::Greedy &&
      (!config.target_degree_assortativity || !config.target_attribute_assortativity))
    throw ValidationError("the greedy policy needs degree and attribute assortativity targets");
  if (config.policy == RewiringPolicy::Greedy && config.greedy_candidate_cap == 0)
    throw ValidationError("greedy candidate cap must be positive");
}

void write_trace_csv(const GrowthTrace &trace, std::ostream &out) {
  const bool lambda = std::any_of(trace.records.begin(), trace.records.end(),
                                  [](const GrowthRecord &r) { return r.lambda_term.has_value(); });
  out << "iter,nodes_all,edges_all,nodes_term,edges_term,attr_assort_term";
  if (lambda)
    out << ",lambda_term";
  out << '\n';
  for (const auto &r : trace.records) {
    out << r.iteration << ',' << r.nodes_all << ',' << r.edges_all << ',' << r.nodes_term << ','
        << r.edges_term << ',' << format_number(r.attr_assort_term);
    if (lambda)
      out << ',' << format_number(r.lambda_term);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// TerminalStats

TerminalStats::TerminalStats(std::size_t alphabet_size)
    : k_(alphabet_size), color_(alphabet_size * alphabet_size, 0) {}

void TerminalStats::add_node(NodeId id, std::uint32_t attr) {
  if (attr >= k_)
    throw InternalError("terminal attribute outside the alphabet");
  attr_.emplace(id, attr);
  degree_.emplace(id, 0);
}

std::uint64_t TerminalStats::degree_of(NodeId id) const {
  auto it = degree_.find(id);
  return it == degree_.end() ? 0 : it->second;
}

TerminalStats::Sums TerminalStats::apply(const AttributedGraph &g, std::span<const Delta> edges,
                                         std::unordered_map<NodeId, std::uint64_t> *new_degrees) const {
  std::unordered_map<NodeId, std::uint64_t> fresh;
  for (const auto &e : edges) {
    fresh.try_emplace(e.u, degree_of(e.u)).first->second += e.multiplicity;
    fresh.try_emplace(e.v, degree_of(e.v)).first->second += e.multiplicity;
  }
  auto after = [&](NodeId id) -> long double {
    auto it = fresh.find(id);
    return static_cast<long double>(it == fresh.end() ? degree_of(id) : it->second);
  };

  Sums s = sums_;
  for (const auto &[id, d1] : fresh) {
    const long double d0 = static_cast<long double>(degree_of(id));
    const long double d = static_cast<long double>(d1);
    s.m += d - d0;
    s.b += d * d - d0 * d0;
    s.c += d * d * d - d0 * d0 * d0;
  }
  // Existing terminal edges at a touched node change their degree product.
  for (const auto &[u, _] : fresh)
    for (const auto &[v, k] : g.neighbors(u)) {
      if (!attr_.contains(v))
        continue;
      if (fresh.contains(v) && v < u)
        continue;
      const long double du0 = static_cast<long double>(degree_of(u));
      const long double dv0 = static_cast<long double>(degree_of(v));
      s.a += k * (after(u) * after(v) - du0 * dv0);
    }
  for (const auto &e : edges)
    s.a += e.multiplicity * after(e.u) * after(e.v);
  if (new_degrees)
    *new_degrees = std::move(fresh);
  return s;
}

std::optional<double> TerminalStats::pearson(const Sums &s) {
  if (s.m <= 0)
    return std::nullopt;
  const long double var = s.c - s.b * s.b / s.m;
  const long double cov = 2 * s.a - s.b * s.b / s.m;
  if (var <= 1e-12L * s.m)
    return std::nullopt;
  return static_cast<double>(cov / var);
}

std::optional<double> TerminalStats::categorical(std::span<const Delta> extra) const {
  std::vector<long double> row(k_, 0);
  long double trace = 0, total = 0;
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j)
      row[i] += static_cast<long double>(color_[i * k_ + j]);
    trace += static_cast<long double>(color_[i * k_ + i]);
    total += row[i];
  }
  for (const auto &e : extra) {
    const auto a = attr_.at(e.u), b = attr_.at(e.v);
    row[a] += e.multiplicity;
    row[b] += e.multiplicity;
    if (a == b)
      trace += 2.0L * e.multiplicity;
    total += 2.0L * e.multiplicity;
  }
  if (total <= 0)
    return std::nullopt;
  long double ab = 0;
  for (auto r : row)
    ab += (r / total) * (r / total);
  const long double denom = 1 - ab;
  if (std::abs(static_cast<double>(denom)) < 1e-12)
    return std::nullopt;
  return static_cast<double>((trace / total - ab) / denom);
}

void TerminalStats::commit(const AttributedGraph &g, std::span<const Delta> edges) {
  std::unordered_map<NodeId, std::uint64_t> fresh;
  sums_ = apply(g, edges, &fresh);
  for (const auto &[id, d] : fresh)
    degree_.at(id) = d;
  for (const auto &e : edges) {
    const auto a = attr_.at(e.u), b = attr_.at(e.v);
    color_[a * k_ + b] += e.multiplicity;
    color_[b * k_ + a] += e.multiplicity;
    edges_ += e.multiplicity;
  }
}

std::pair<std::optional<double>, std::optional<double>>
TerminalStats::preview(const AttributedGraph &g, std::span<const Delta> edges) const {
  return {pearson(apply(g, edges, nullptr)), categorical(edges)};
}

std::optional<double> TerminalStats::degree_assortativity() const { return pearson(sums_); }

std::optional<double> TerminalStats::attribute_assortativity() const { return categorical({}); }

// ---------------------------------------------------------------------------
// GenerationState

GenerationState::GenerationState(std::vector<std::string> alphabet)
    : graph_(std::move(alphabet)), stats_(graph_.alphabet().size()) {}

NodeId GenerationState::add_nonterminal(std::uint32_t size) {
  const NodeId id = graph_.add_node(NodeData::nonterminal(size));
  slot_.emplace(id, nonterminals_.size());
  nonterminals_.push_back(id);
  return id;
}

NodeId GenerationState::add_terminal(std::uint32_t attr) {
  const NodeId id = graph_.add_node(NodeData::terminal(attr));
  stats_.add_node(id, attr);
  return id;
}

void GenerationState::add_edge(NodeId u, NodeId v, std::uint32_t multiplicity) {
  const TerminalStats::Delta e{u, v, multiplicity};
  add_edges({&e, 1});
}

void GenerationState::add_edges(std::span<const TerminalStats::Delta> edges) {
  std::vector<TerminalStats::Delta> terminal;
  for (const auto &e : edges)
    if (graph_.node(e.u).is_terminal() && graph_.node(e.v).is_terminal())
      terminal.push_back(e);
  stats_.commit(graph_, terminal);
  for (const auto &e : edges)
    graph_.add_edge(e.u, e.v, e.multiplicity);
}

void GenerationState::forget_nonterminal(NodeId x) {
  auto it = slot_.find(x);
  if (it == slot_.end())
    throw InternalError("node " + std::to_string(x) + " is not a live nonterminal");
  const std::size_t i = it->second;
  const NodeId last = nonterminals_.back();
  nonterminals_[i] = last;
  slot_[last] = i;
  nonterminals_.pop_back();
  slot_.erase(x);
}

std::vector<NodeId> GenerationState::half_edges(NodeId x) const {
  std::vector<NodeId> out;
  for (const auto &[v, k] : graph_.neighbors(x))
    out.insert(out.end(), k, v);
  return out;
}

GenerationState::Opening GenerationState::open(NodeId x, const Rule &rule) {
  const auto &data = graph_.node(x);
  if (data.is_terminal())
    throw InternalError("cannot rewrite a terminal node");
  Opening opening;
  opening.half_edges = half_edges(x);
  if (opening.half_edges.size() != data.size || data.size != rule.lhs)
    throw InternalError("nonterminal of size " + std::to_string(data.size) + " has degree " +
                        std::to_string(opening.half_edges.size()) + ", rule expects " +
                        std::to_string(rule.lhs));
  forget_nonterminal(x);
  graph_.remove_node(x);

  for (const auto &[pos, node] : rule.rhs.nodes()) {
    if (pos != opening.inserted.size())
      throw InternalError("rule positions are not compact");
    opening.inserted.push_back(node.is_terminal() ? add_terminal(node.attr) : add_nonterminal(node.size));
    opening.capacity.push_back(node.boundary.value_or(0));
  }
  std::vector<TerminalStats::Delta> internal;
  rule.rhs.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) {
    internal.push_back({opening.inserted[u], opening.inserted[v], k});
  });
  add_edges(internal);
  return opening;
}

namespace {

// Slot list: position p repeated b_p times.
std::vector<NodeId> expand_slots(const Rule &rule) {
  std::vector<NodeId> slots;
  for (const auto &[pos, node] : rule.rhs.nodes())
    slots.insert(slots.end(), node.boundary.value_or(0), pos);
  return slots;
}

} // namespace

void GenerationState::rewire(const Opening &opening, std::span<const NodeId> positions) {
  if (positions.size() != opening.half_edges.size())
    throw InternalError("rewiring covers " + std::to_string(positions.size()) + " of " +
                        std::to_string(opening.half_edges.size()) + " half-edges");
  std::vector<std::uint32_t> filled(opening.inserted.size(), 0);
  for (NodeId p : positions) {
    if (p >= filled.size())
      throw InternalError("rewiring names an unknown position");
    ++filled[p];
  }
  if (filled != opening.capacity)
    throw InternalError("rewiring does not match the boundary degrees");
  std::vector<TerminalStats::Delta> edges;
  for (std::size_t h = 0; h < positions.size(); ++h)
    edges.push_back({opening.half_edges[h], opening.inserted[positions[h]], 1});
  add_edges(edges);
}

std::vector<NodeId> GenerationState::splice(NodeId x, const Rule &rule, std::span<const NodeId> positions) {
  auto opening = open(x, rule);
  rewire(opening, positions);
  return opening.inserted;
}

// ---------------------------------------------------------------------------
// Selection

NodeId select_nonterminal(const GenerationState &state, Rng &rng) {
  const auto &pool = state.nonterminals();
  if (pool.empty())
    throw InternalError("no nonterminal to select");
  return pool[rng.uniform_index(pool.size())];
}

namespace {
constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();
}

std::size_t select_rule(const Grammar &grammar, std::uint32_t omega, Rng &rng,
                        const std::vector<std::uint32_t> *rule_heights) {
  auto bucket = grammar.rules_with_lhs(omega);
  if (bucket.empty())
    throw ValidationError("grammar is not closed: no rule for a nonterminal of size " +
                          std::to_string(omega));
  if (rule_heights) {
    std::uint32_t best = kUnreachable;
    for (auto i : bucket)
      best = std::min(best, rule_heights->at(i));
    if (best == kUnreachable)
      throw ValidationError("no terminating rule for a nonterminal of size " + std::to_string(omega));
    std::erase_if(bucket, [&](std::size_t i) { return rule_heights->at(i) != best; });
  }
  std::vector<double> weights;
  for (auto i : bucket)
    weights.push_back(static_cast<double>(grammar.rule(i).frequency));
  const auto pick = rng.weighted_index(weights);
  if (pick == weights.size())
    throw ValidationError("rule bucket of size " + std::to_string(omega) + " has zero total frequency");
  return bucket[pick];
}

std::vector<std::uint32_t> derivation_heights(const Grammar &grammar) {
  std::vector<std::uint32_t> height(grammar.size(), kUnreachable);
  std::map<std::uint32_t, std::uint32_t> best; // lhs -> min height
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < grammar.size(); ++i) {
      const auto &rule = grammar.rule(i);
      std::uint32_t h = 1;
      for (const auto &[_, node] : rule.rhs.nodes()) {
        if (node.is_terminal())
          continue;
        auto it = best.find(node.size);
        if (it == best.end()) {
          h = kUnreachable;
          break;
        }
        h = std::max(h, it->second + 1);
      }
      if (h < height[i]) {
        height[i] = h;
        auto [it, fresh] = best.try_emplace(rule.lhs, h);
        if (!fresh)
          it->second = std::min(it->second, h);
        changed = true;
      }
    }
  }
  if (!best.contains(0))
    throw ValidationError("the start symbol has no terminating derivation");
  return height;
}

// ---------------------------------------------------------------------------
// Rewiring policies

namespace {

std::vector<NodeId> random_assignment(std::vector<NodeId> slots, Rng &rng) {
  rng.shuffle(slots);
  return slots;
}

std::vector<NodeId> mixing_assignment(const GenerationState &state,
                                      const GenerationState::Opening &opening, const Rule &rule,
                                      const MixingMatrix &mixing, Rng &rng) {
  const auto &g = state.graph();
  const std::size_t omega = opening.half_edges.size();
  std::vector<std::size_t> to_mixing(g.alphabet().size(), SIZE_MAX);
  for (std::size_t a = 0; a < to_mixing.size(); ++a)
    if (auto i = mixing.index_of(g.alphabet()[a]))
      to_mixing[a] = *i;

  std::vector<std::uint32_t> cap(opening.inserted.size(), 0);
  std::vector<NodeId> nonterminal_slots;
  for (const auto &[pos, node] : rule.rhs.nodes()) {
    const auto b = node.boundary.value_or(0);
    if (node.is_terminal()) {
      cap[pos] = b;
    } else {
      nonterminal_slots.insert(nonterminal_slots.end(), b, pos);
    }
  }

  // A uniform subset of the half-edges goes to nonterminal slots.
  std::vector<std::size_t> order(omega);
  for (std::size_t h = 0; h < omega; ++h)
    order[h] = h;
  rng.shuffle(order);
  std::vector<NodeId> positions(omega);
  rng.shuffle(nonterminal_slots);
  for (std::size_t i = 0; i < nonterminal_slots.size(); ++i)
    positions[order[i]] = nonterminal_slots[i];

  std::vector<std::size_t> with_terminal, with_nonterminal;
  for (std::size_t i = nonterminal_slots.size(); i < omega; ++i) {
    const std::size_t h = order[i];
    (g.node(opening.half_edges[h]).is_terminal() ? with_terminal : with_nonterminal).push_back(h);
  }

  std::vector<double> weights(cap.size());
  auto place = [&](std::size_t h, std::optional<std::size_t> color) {
    bool any = false;
    for (std::size_t p = 0; p < cap.size(); ++p) {
      weights[p] = 0.0;
      if (cap[p] == 0 || !color)
        continue;
      const auto slot_color = to_mixing[g.node(opening.inserted[p]).attr];
      if (slot_color == SIZE_MAX)
        continue;
      weights[p] = mixing.at(*color, slot_color) * cap[p];
      any = any || weights[p] > 0.0;
    }
    if (!any)
      for (std::size_t p = 0; p < cap.size(); ++p)
        weights[p] = static_cast<double>(cap[p]);
    const auto p = rng.weighted_index(weights);
    if (p == weights.size())
      throw InternalError("mixing-matrix rewiring ran out of capacity");
    positions[h] = static_cast<NodeId>(p);
    --cap[p];
  };
  for (std::size_t h : with_terminal) {
    const auto c = to_mixing[g.node(opening.half_edges[h]).attr];
    place(h, c == SIZE_MAX ? std::nullopt : std::optional<std::size_t>(c));
  }
  for (std::size_t h : with_nonterminal)
    place(h, std::nullopt);
  return positions;
}

// Distinct capacity-respecting assignments, saturating at cap + 1.
std::size_t assignment_count(const Rule &rule, std::size_t cap) {
  long double count = 1;
  std::uint64_t remaining = rule.lhs;
  for (const auto &[_, node] : rule.rhs.nodes()) {
    const auto b = node.boundary.value_or(0);
    for (std::uint32_t i = 1; i <= b; ++i) {
      count = count * static_cast<long double>(remaining) / i;
      --remaining;
    }
    if (count > static_cast<long double>(cap))
      return cap + 1;
  }
  return static_cast<std::size_t>(std::llround(static_cast<double>(count)));
}

std::vector<NodeId> greedy_assignment(const GenerationState &state,
                                      const GenerationState::Opening &opening, const Rule &rule,
                                      const GenerationConfig &config, Rng &rng) {
  const auto &g = state.graph();
  auto slots = expand_slots(rule);
  if (slots.empty())
    return slots;
  const double beta = config.beta;
  const double target_deg = *config.target_degree_assortativity;
  const double target_attr = *config.target_attribute_assortativity;

  std::vector<TerminalStats::Delta> deltas;
  auto error_of = [&](const std::vector<NodeId> &positions) {
    deltas.clear();
    for (std::size_t h = 0; h < positions.size(); ++h) {
      const NodeId ext = opening.half_edges[h];
      const NodeId in = opening.inserted[positions[h]];
      if (g.node(ext).is_terminal() && g.node(in).is_terminal())
        deltas.push_back({ext, in, 1});
    }
    const auto [deg, attr] = state.stats().preview(g, deltas);
    double e = 0.0;
    if (beta > 0.0 && deg)
      e += beta * std::abs(*deg - target_deg);
    if (beta < 1.0 && attr)
      e += (1.0 - beta) * std::abs(*attr - target_attr);
    return e;
  };

  std::vector<NodeId> best;
  double best_error = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<NodeId> &candidate) {
    const double e = error_of(candidate);
    if (e < best_error) {
      best_error = e;
      best = candidate;
    }
  };

  const std::size_t cap = config.greedy_candidate_cap;
  if (assignment_count(rule, cap) <= cap) {
    std::sort(slots.begin(), slots.end());
    do
      consider(slots);
    while (std::next_permutation(slots.begin(), slots.end()));
  } else {
    for (std::size_t i = 0; i < cap; ++i) {
      rng.shuffle(slots);
      consider(slots);
    }
  }
  return best;
}

} // namespace

std::vector<NodeId> apply_rule(GenerationState &state, NodeId x, const Rule &rule,
                               const GenerationConfig &config, Rng &rng) {
  auto opening = state.open(x, rule);
  std::vector<NodeId> positions;
  switch (config.policy) {
  case RewiringPolicy::Random:
    positions = random_assignment(expand_slots(rule), rng);
    break;
  case RewiringPolicy::MixingMatrix:
    if (!config.mixing)
      throw ValidationError("the mixing-matrix policy needs a mixing matrix");
    positions = mixing_assignment(state, opening, rule, *config.mixing, rng);
    break;
  case RewiringPolicy::Greedy:
    positions = greedy_assignment(state, opening, rule, config, rng);
    break;
  }
  state.rewire(opening, positions);
  for (NodeId id : opening.inserted) {
    const auto &node = state.graph().node(id);
    if (!node.is_terminal() && state.graph().degree(id) != node.size)
      throw InternalError("nonterminal of size " + std::to_string(node.size) + " got degree " +
                          std::to_string(state.graph().degree(id)));
  }
  return opening.inserted;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

GrowthRecord snapshot(const GenerationState &state, std::size_t iteration,
                      const AttributedGraph *reference) {
  GrowthRecord r;
  r.iteration = iteration;
  r.nodes_all = state.graph().node_count();
  r.edges_all = state.graph().edge_count();
  r.nodes_term = state.stats().node_count();
  r.edges_term = state.stats().edge_count();
  r.attr_assort_term = state.stats().attribute_assortativity();
  if (reference && r.nodes_term > 0)
    r.lambda_term = lambda_distance(terminal_subgraph(state.graph()), *reference);
  return r;
}

} // namespace

GenerationResult generate(const Grammar &grammar, const GenerationConfig &config) {
  validate_config(config);
  grammar.check_closure();
  const auto heights = derivation_heights(grammar);

  GenerationState state(grammar.alphabet());
  Rng rng(config.seed);
  GenerationResult result;
  state.add_nonterminal(0);
  result.trace.records.push_back(snapshot(state, 0, config.lambda_reference));

  const std::size_t target = config.target_terminal_nodes.value_or(0);
  std::size_t iteration = 0;
  while (true) {
    if (state.nonterminals().empty()) {
      if (state.stats().node_count() >= target)
        break;
      state.add_nonterminal(0);
    }
    const NodeId x = select_nonterminal(state, rng);
    const auto omega = state.graph().node(x).size;
    const bool finishing = config.target_terminal_nodes && state.stats().node_count() >= target;
    const auto r = select_rule(grammar, omega, rng, finishing ? &heights : nullptr);
    apply_rule(state, x, grammar.rule(r), config, rng);
    ++iteration;
    result.trace.records.push_back(snapshot(state, iteration, config.lambda_reference));
    if (config.on_step)
      config.on_step(state.graph());
  }
  result.graph = state.graph();
  return result;
}

// ---------------------------------------------------------------------------
// Replay

AttributedGraph replay(const Grammar &grammar, const DerivationLog &log) {
  if (log.steps.empty())
    throw ValidationError("derivation log is empty");
  AttributedGraph g(grammar.alphabet());
  std::unordered_map<std::size_t, NodeId> step_node;
  std::unordered_map<std::string, NodeId> named;

  auto rule_of = [&](std::size_t s) -> const Rule & {
    const auto r = log.steps[s].rule;
    if (r >= grammar.size())
      throw ValidationError("step " + std::to_string(s) + " names rule " + std::to_string(r) +
                            " but the grammar has " + std::to_string(grammar.size()));
    return grammar.rule(r);
  };
  auto resolve = [&](const NodeRef &ref, std::size_t s) -> NodeId {
    if (const auto *name = std::get_if<std::string>(&ref)) {
      auto it = named.find(*name);
      if (it == named.end())
        throw ValidationError("step " + std::to_string(s) + ": node '" + *name + "' is not present");
      return it->second;
    }
    const auto t = std::get<std::size_t>(ref);
    auto it = step_node.find(t);
    if (it == step_node.end() || t >= s)
      throw ValidationError("step " + std::to_string(s) + ": nonterminal of step " +
                            std::to_string(t) + " is not present");
    return it->second;
  };

  const std::size_t last = log.steps.size() - 1;
  if (rule_of(last).lhs != 0)
    throw ValidationError("the last step does not produce the start symbol");
  step_node.emplace(last, g.add_node(NodeData::nonterminal(0)));

  for (std::size_t s = log.steps.size(); s-- > 0;) {
    const auto &step = log.steps[s];
    const Rule &rule = rule_of(s);
    auto xit = step_node.find(s);
    if (xit == step_node.end())
      throw ValidationError("step " + std::to_string(s) + " is never referenced by a later step");
    const NodeId x = xit->second;
    const auto &xdata = g.node(x);
    if (xdata.size != rule.lhs || g.degree(x) != rule.lhs)
      throw ValidationError("step " + std::to_string(s) + ": nonterminal degree does not match rule");
    if (step.mapping.size() != rule.rhs.node_count() || step.cut.size() != rule.lhs)
      throw ValidationError("step " + std::to_string(s) + ": mapping does not fit the rule");

    std::vector<std::pair<NodeId, NodeId>> cut; // (position, external)
    std::map<NodeId, std::uint32_t> expected;
    for (const auto &c : step.cut) {
      if (c.position >= rule.rhs.node_count())
        throw ValidationError("step " + std::to_string(s) + ": cut edge names an unknown position");
      const NodeId ext = resolve(c.external, s);
      cut.emplace_back(c.position, ext);
      ++expected[ext];
    }
    const std::map<NodeId, std::uint32_t> actual(g.neighbors(x).begin(), g.neighbors(x).end());
    if (actual != expected)
      throw ValidationError("step " + std::to_string(s) + ": boundary does not match the graph");
    std::vector<std::uint32_t> filled(rule.rhs.node_count(), 0);
    for (const auto &[p, _] : cut)
      ++filled[p];
    for (const auto &[p, node] : rule.rhs.nodes())
      if (filled[p] != node.boundary.value_or(0))
        throw ValidationError("step " + std::to_string(s) + ": cut does not match boundary degrees");

    g.remove_node(x);
    step_node.erase(s);
    std::vector<NodeId> inserted;
    for (const auto &[p, node] : rule.rhs.nodes()) {
      const auto &ref = step.mapping[p];
      NodeData data = node;
      data.boundary.reset();
      if (const auto *name = std::get_if<std::string>(&ref)) {
        if (!node.is_terminal())
          throw ValidationError("step " + std::to_string(s) + ": named node maps to a nonterminal");
        if (named.contains(*name))
          throw ValidationError("step " + std::to_string(s) + ": node '" + *name + "' appears twice");
        data.name = *name;
        const NodeId id = g.add_node(std::move(data));
        named.emplace(*name, id);
        inserted.push_back(id);
      } else {
        const auto t = std::get<std::size_t>(ref);
        if (node.is_terminal() || t >= s || step_node.contains(t))
          throw ValidationError("step " + std::to_string(s) + ": bad nonterminal reference");
        if (rule_of(t).lhs != node.size)
          throw ValidationError("step " + std::to_string(s) + ": nonterminal size mismatch");
        const NodeId id = g.add_node(std::move(data));
        step_node.emplace(t, id);
        inserted.push_back(id);
      }
    }
    rule.rhs.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) { g.add_edge(inserted[u], inserted[v], k); });
    for (const auto &[p, ext] : cut)
      g.add_edge(inserted[p], ext, 1);
  }
  if (!step_node.empty())
    throw ValidationError("derivation log leaves nonterminals behind");
  return g;
}

} // namespace avrg
