#include "avrg/graph_io.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "avrg/error.hpp"

namespace avrg {
namespace {

struct Line {
  std::size_t number;
  std::string first;
  std::string second;
};

std::vector<Line> read_pairs(std::istream &in, const char *what) {
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r')
      raw.pop_back();
    const auto first = raw.find_first_not_of(" \t");
    if (first == std::string::npos || raw[first] == '#')
      continue;
    std::istringstream fields(raw);
    Line line{number, {}, {}};
    std::string extra;
    if (!(fields >> line.first >> line.second) || (fields >> extra))
      throw ValidationError(std::string(what) + " line " + std::to_string(number) +
                            ": expected two tab-separated fields");
    lines.push_back(std::move(line));
  }
  return lines;
}

std::ofstream open_for_write(const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("cannot write " + path.string());
  return out;
}

} // namespace

AttributedGraph load_graph(std::istream &edge_list, std::istream &attributes, LoadReport *report) {
  const auto attr_lines = read_pairs(attributes, "attribute file");
  const auto edge_lines = read_pairs(edge_list, "edge list");

  std::set<std::string> labels;
  for (const auto &l : attr_lines)
    labels.insert(l.second);
  AttributedGraph g(std::vector<std::string>(labels.begin(), labels.end()));

  std::unordered_map<std::string, NodeId> ids;
  for (const auto &l : attr_lines) {
    if (ids.contains(l.first))
      throw ValidationError("attribute file line " + std::to_string(l.number) +
                            ": duplicate node '" + l.first + "'");
    ids.emplace(l.first, g.add_node(NodeData::terminal(*g.find_label(l.second), l.first)));
  }

  LoadReport local;
  for (const auto &l : edge_lines) {
    auto u = ids.find(l.first);
    auto v = ids.find(l.second);
    if (u == ids.end() || v == ids.end())
      throw ValidationError("missing attribute for node '" +
                            (u == ids.end() ? l.first : l.second) + "' (edge list line " +
                            std::to_string(l.number) + ")");
    if (u->second == v->second) {
      ++local.self_loops_dropped;
      continue;
    }
    g.add_edge(u->second, v->second);
  }
  if (local.self_loops_dropped > 0)
    std::cerr << "warning: dropped " << local.self_loops_dropped << " self-loop line(s)\n";
  if (report)
    *report = local;
  return g;
}

AttributedGraph load_graph(const std::filesystem::path &edge_list,
                           const std::filesystem::path &attributes, LoadReport *report) {
  std::ifstream edges(edge_list);
  if (!edges)
    throw ValidationError("cannot open edge list " + edge_list.string());
  std::ifstream attrs(attributes);
  if (!attrs)
    throw ValidationError("cannot open attribute file " + attributes.string());
  return load_graph(edges, attrs, report);
}

void write_edge_list(const AttributedGraph &g, std::ostream &out) {
  g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) {
    const auto a = g.display_name(u);
    const auto b = g.display_name(v);
    for (std::uint32_t i = 0; i < k; ++i)
      out << a << '\t' << b << '\n';
  });
}

void write_attributes(const AttributedGraph &g, std::ostream &out) {
  for (const auto &[id, data] : g.nodes())
    if (data.is_terminal())
      out << g.display_name(id) << '\t' << g.label(data.attr) << '\n';
}

void save_graph(const AttributedGraph &g, const std::filesystem::path &edge_list,
                const std::filesystem::path &attributes) {
  auto edges = open_for_write(edge_list);
  write_edge_list(g, edges);
  auto attrs = open_for_write(attributes);
  write_attributes(g, attrs);
}

} // namespace avrg
