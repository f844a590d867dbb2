#include "avrg/statistics.hpp"

#include <cmath>

#include "avrg/error.hpp"

namespace avrg {

std::optional<std::size_t> MixingMatrix::index_of(const std::string &label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label)
      return i;
  return std::nullopt;
}

std::optional<double> degree_assortativity(const AttributedGraph &g) {
  if (g.edge_count() == 0)
    return std::nullopt;
  // Both orientations carry the same degree multiset, so the two marginals
  // share mean and variance.
  double mass = 0.0, sum = 0.0;
  g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) {
    const double du = static_cast<double>(g.degree(u));
    const double dv = static_cast<double>(g.degree(v));
    mass += 2.0 * k;
    sum += k * (du + dv);
  });
  const double mean = sum / mass;
  double cov = 0.0, var = 0.0;
  g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) {
    const double du = static_cast<double>(g.degree(u)) - mean;
    const double dv = static_cast<double>(g.degree(v)) - mean;
    cov += 2.0 * k * du * dv;
    var += k * (du * du + dv * dv);
  });
  if (var <= 1e-12 * mass)
    return std::nullopt;
  return cov / var;
}

MixingMatrix mixing_matrix(const AttributedGraph &g) {
  MixingMatrix m;
  m.labels = g.alphabet();
  m.entries.assign(m.labels.size() * m.labels.size(), 0.0);
  double mass = 0.0;
  g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) {
    const auto &a = g.node(u);
    const auto &b = g.node(v);
    if (!a.is_terminal() || !b.is_terminal())
      return;
    m.at(a.attr, b.attr) += 0.5 * k;
    m.at(b.attr, a.attr) += 0.5 * k;
    mass += k;
  });
  if (mass == 0.0)
    throw ValidationError("mixing matrix of a graph without terminal edges");
  for (double &x : m.entries)
    x /= mass;
  return m;
}

std::optional<double> attribute_assortativity(const MixingMatrix &m) {
  const std::size_t n = m.size();
  double trace = 0.0, ab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    trace += m.at(i, i);
    double a = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      a += m.at(i, j);
    ab += a * a;
  }
  const double denom = 1.0 - ab;
  if (std::abs(denom) < 1e-12)
    return std::nullopt;
  return (trace - ab) / denom;
}

std::optional<double> attribute_assortativity(const AttributedGraph &g) {
  bool any = false;
  g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t) {
    any = any || (g.node(u).is_terminal() && g.node(v).is_terminal());
  });
  if (!any)
    return std::nullopt;
  return attribute_assortativity(mixing_matrix(g));
}

} // namespace avrg
