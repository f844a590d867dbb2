#include "avrg/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "avrg/error.hpp"
#include "avrg/isomorphism.hpp"

namespace avrg {

std::size_t Rule::terminal_count() const {
  return static_cast<std::size_t>(std::count_if(rhs.nodes().begin(), rhs.nodes().end(),
                                                [](const auto &kv) { return kv.second.is_terminal(); }));
}

std::size_t Rule::nonterminal_count() const { return rhs.node_count() - terminal_count(); }

void validate_rule(const Rule &rule) {
  if (rule.rhs.node_count() == 0)
    throw ValidationError("rule has an empty right-hand side");
  if (rule.frequency < 1)
    throw ValidationError("rule frequency must be positive");
  std::uint64_t sum = 0;
  NodeId expected = 0;
  for (const auto &[id, data] : rule.rhs.nodes()) {
    if (id != expected++)
      throw ValidationError("rule node ids must be the positions 0..k-1");
    if (!data.boundary)
      throw ValidationError("rule node " + std::to_string(id) + " has no boundary degree");
    sum += *data.boundary;
  }
  if (sum != rule.lhs)
    throw ValidationError("rule boundary degrees sum to " + std::to_string(sum) +
                          " but the left-hand side has size " + std::to_string(rule.lhs));
}

Grammar::Grammar(std::vector<std::string> alphabet) : alphabet_(std::move(alphabet)) {}

std::string Grammar::bucket_key(const Rule &rule, const std::string &signature) const {
  std::vector<std::string> labels;
  std::vector<std::uint32_t> boundaries;
  for (const auto &[_, d] : rule.rhs.nodes()) {
    labels.push_back(d.is_terminal() ? "t" + std::to_string(d.attr) : "n" + std::to_string(d.size));
    boundaries.push_back(d.boundary.value_or(0));
  }
  std::sort(labels.begin(), labels.end());
  std::sort(boundaries.begin(), boundaries.end());
  std::ostringstream key;
  key << rule.lhs << '|' << rule.rhs.node_count() << '|' << rule.rhs.edge_count() << '|';
  for (const auto &l : labels)
    key << l << ',';
  key << '|';
  for (auto b : boundaries)
    key << b << ',';
  key << '|' << signature;
  return key.str();
}

UpsertResult Grammar::upsert(Rule candidate) {
  validate_rule(candidate);
  if (candidate.rhs.alphabet() != alphabet_)
    throw ValidationError("rule alphabet differs from grammar alphabet");

  std::string signature = invariant_signature(candidate.rhs);
  const std::string key = bucket_key(candidate, signature);
  auto &bucket = buckets_[key];
  for (std::size_t idx : bucket) {
    auto iso = find_isomorphism(candidate.rhs, rules_[idx].rhs);
    if (!iso)
      continue;
    rules_[idx].frequency += candidate.frequency;
    return UpsertResult{idx, true, std::move(*iso)};
  }

  UpsertResult result;
  result.index = rules_.size();
  for (const auto &[id, _] : candidate.rhs.nodes())
    result.position_map.emplace(id, id);
  bucket.push_back(rules_.size());
  rules_.push_back(std::move(candidate));
  signatures_.push_back(std::move(signature));
  return result;
}

void Grammar::append(Rule rule) {
  validate_rule(rule);
  if (rule.rhs.alphabet() != alphabet_)
    throw ValidationError("rule alphabet differs from grammar alphabet");
  std::string signature = invariant_signature(rule.rhs);
  buckets_[bucket_key(rule, signature)].push_back(rules_.size());
  rules_.push_back(std::move(rule));
  signatures_.push_back(std::move(signature));
}

std::vector<std::size_t> Grammar::rules_with_lhs(std::uint32_t omega) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (rules_[i].lhs == omega)
      out.push_back(i);
  return out;
}

std::vector<std::uint32_t> Grammar::lhs_sizes() const {
  std::set<std::uint32_t> sizes;
  for (const auto &r : rules_)
    sizes.insert(r.lhs);
  return {sizes.begin(), sizes.end()};
}

std::uint64_t Grammar::total_frequency() const {
  std::uint64_t total = 0;
  for (const auto &r : rules_)
    total += r.frequency;
  return total;
}

void Grammar::check_closure() const {
  std::set<std::uint32_t> lhs, used;
  for (const auto &r : rules_) {
    lhs.insert(r.lhs);
    for (const auto &[_, d] : r.rhs.nodes())
      if (!d.is_terminal())
        used.insert(d.size);
  }
  if (!lhs.contains(0))
    throw ValidationError("grammar has no size-0 start rule");
  for (auto s : used)
    if (!lhs.contains(s))
      throw ValidationError("no rule rewrites nonterminals of size " + std::to_string(s));
  for (auto s : lhs)
    if (s != 0 && !used.contains(s))
      throw ValidationError("rules of size " + std::to_string(s) + " are unreachable");
}

std::vector<std::size_t> Grammar::canonicalize() {
  std::vector<std::size_t> order(rules_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto &ra = rules_[a];
    const auto &rb = rules_[b];
    if (ra.lhs != rb.lhs)
      return ra.lhs < rb.lhs;
    if (ra.rhs.node_count() != rb.rhs.node_count())
      return ra.rhs.node_count() < rb.rhs.node_count();
    return signatures_[a] < signatures_[b];
  });
  std::vector<Rule> rules;
  std::vector<std::string> sigs;
  std::vector<std::size_t> old_to_new(rules_.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    old_to_new[order[k]] = k;
    rules.push_back(std::move(rules_[order[k]]));
    sigs.push_back(std::move(signatures_[order[k]]));
  }
  rules_ = std::move(rules);
  signatures_ = std::move(sigs);
  rebuild_buckets();
  return old_to_new;
}

void Grammar::rebuild_buckets() {
  buckets_.clear();
  for (std::size_t i = 0; i < rules_.size(); ++i)
    buckets_[bucket_key(rules_[i], signatures_[i])].push_back(i);
}

std::vector<std::size_t> top_rules(const Grammar &grammar, std::size_t k) {
  std::vector<std::size_t> idx(grammar.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto &ra = grammar.rule(a);
    const auto &rb = grammar.rule(b);
    if (ra.frequency != rb.frequency)
      return ra.frequency > rb.frequency;
    if (ra.rhs.node_count() != rb.rhs.node_count())
      return ra.rhs.node_count() < rb.rhs.node_count();
    return grammar.signature(a) < grammar.signature(b);
  });
  if (idx.size() > k)
    idx.resize(k);
  return idx;
}

namespace {

double graph_body_bits(const AttributedGraph &g) {
  const double v = static_cast<double>(g.node_count());
  const double id_bits = std::log2(v + 1.0);
  double bits = id_bits + v * std::log2(static_cast<double>(g.alphabet().size()) + 1.0);
  for (const auto &[_, d] : g.nodes())
    if (!d.is_terminal())
      bits += std::log2(static_cast<double>(d.size) + 1.0);
  std::uint32_t kmax = 0;
  g.for_each_edge([&](NodeId, NodeId, std::uint32_t k) { kmax = std::max(kmax, k); });
  bits += static_cast<double>(g.edge_pair_count()) *
          (2.0 * id_bits + std::log2(static_cast<double>(kmax) + 1.0));
  return bits;
}

} // namespace

double description_length(const AttributedGraph &g) {
  return kDescriptionHeaderBits + graph_body_bits(g);
}

double description_length(const Rule &rule) {
  const double size_bits = std::log2(static_cast<double>(rule.lhs) + 1.0);
  return size_bits + graph_body_bits(rule.rhs) +
         static_cast<double>(rule.rhs.node_count()) * size_bits +
         std::log2(static_cast<double>(rule.frequency));
}

double description_length(const Grammar &grammar) {
  double bits = kDescriptionHeaderBits + std::log2(static_cast<double>(grammar.size()) + 1.0);
  for (const auto &r : grammar.rules())
    bits += description_length(r);
  return bits;
}

double inverse_compression_ratio(const Grammar &grammar, const AttributedGraph &g) {
  return description_length(grammar) / description_length(g);
}

} // namespace avrg
