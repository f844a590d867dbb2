#include "avrg/dendrogram.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <set>
#include <sstream>

#include "avrg/error.hpp"

namespace avrg {

Dendrogram::Dendrogram(const ClusterTree &tree) {
  root_ = add(tree, npos);
  std::uint32_t next = 1;
  // Preorder numbering; the explicit stack keeps children in left-to-right order.
  std::vector<Index> stack{root_};
  while (!stack.empty()) {
    const Index i = stack.back();
    stack.pop_back();
    if (is_leaf(i))
      continue;
    nodes_[i].label = next++;
    for (auto it = nodes_[i].children.rbegin(); it != nodes_[i].children.rend(); ++it)
      stack.push_back(*it);
  }
}

Dendrogram::Index Dendrogram::add(const ClusterTree &tree, Index parent) {
  if (!tree.leaf && tree.children.size() == 1)
    return add(tree.children.front(), parent);
  if (!tree.leaf && tree.children.empty())
    throw ValidationError("dendrogram has an empty internal node");
  const Index self = nodes_.size();
  nodes_.push_back(TreeNode{});
  nodes_[self].parent = parent;
  if (tree.leaf) {
    if (!leaf_of_.emplace(*tree.leaf, self).second)
      throw ValidationError("dendrogram repeats leaf " + std::to_string(*tree.leaf));
    nodes_[self].leaf = tree.leaf;
    nodes_[self].leaf_count = 1;
    return self;
  }
  std::size_t count = 0;
  std::vector<Index> kids;
  for (const auto &child : tree.children) {
    const Index c = add(child, self);
    kids.push_back(c);
    count += nodes_[c].leaf_count;
  }
  nodes_[self].children = std::move(kids);
  nodes_[self].leaf_count = count;
  return self;
}

std::optional<Dendrogram::Index> Dendrogram::find_internal(std::uint32_t label) const {
  for (Index i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].alive && !is_leaf(i) && nodes_[i].label == label)
      return i;
  return std::nullopt;
}

std::optional<Dendrogram::Index> Dendrogram::find_leaf(NodeId id) const {
  auto it = leaf_of_.find(id);
  if (it == leaf_of_.end())
    return std::nullopt;
  return it->second;
}

std::vector<Dendrogram::Index> Dendrogram::internal_nodes() const {
  std::vector<Index> out;
  for (Index i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].alive && !is_leaf(i))
      out.push_back(i);
  std::sort(out.begin(), out.end(),
            [&](Index a, Index b) { return nodes_[a].label < nodes_[b].label; });
  return out;
}

std::size_t Dendrogram::internal_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode &n) {
    return n.alive && !n.leaf.has_value();
  }));
}

std::vector<NodeId> Dendrogram::leaves(Index i) const {
  std::vector<NodeId> out;
  std::vector<Index> stack{i};
  while (!stack.empty()) {
    const Index j = stack.back();
    stack.pop_back();
    if (is_leaf(j))
      out.push_back(leaf_node(j));
    else
      stack.insert(stack.end(), nodes_[j].children.begin(), nodes_[j].children.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Dendrogram::depth(Index i) const {
  std::size_t d = 0;
  while (nodes_[i].parent != npos) {
    i = nodes_[i].parent;
    ++d;
  }
  return d;
}

void Dendrogram::contract(Index i, NodeId replacement) {
  if (i >= nodes_.size() || !nodes_[i].alive)
    throw InternalError("contract: dead or unknown tree node");
  if (leaf_of_.contains(replacement) && leaf_of_.at(replacement) != i)
    throw InternalError("contract: replacement leaf already present");
  std::vector<Index> stack{i};
  while (!stack.empty()) {
    const Index j = stack.back();
    stack.pop_back();
    if (is_leaf(j))
      leaf_of_.erase(leaf_node(j));
    for (Index c : nodes_[j].children) {
      nodes_[c].alive = false;
      stack.push_back(c);
    }
  }
  const std::size_t removed = nodes_[i].leaf_count - 1;
  nodes_[i].children.clear();
  nodes_[i].leaf = replacement;
  nodes_[i].leaf_count = 1;
  leaf_of_[replacement] = i;
  for (Index p = nodes_[i].parent; p != npos; p = nodes_[p].parent)
    nodes_[p].leaf_count -= removed;
}

ClusterTree Dendrogram::export_subtree(Index i) const {
  if (is_leaf(i))
    return ClusterTree::make_leaf(leaf_node(i));
  std::vector<ClusterTree> kids;
  for (Index c : nodes_[i].children)
    kids.push_back(export_subtree(c));
  return ClusterTree::join(std::move(kids));
}

ClusterTree Dendrogram::to_cluster_tree() const { return export_subtree(root_); }

bool Dendrogram::operator==(const Dendrogram &other) const {
  // Structural equality: same shape, same leaves in the same child order.
  std::vector<std::pair<Index, Index>> stack{{root_, other.root_}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    if (is_leaf(a) != other.is_leaf(b))
      return false;
    if (is_leaf(a)) {
      if (leaf_node(a) != other.leaf_node(b))
        return false;
      continue;
    }
    const auto &ca = nodes_[a].children;
    const auto &cb = other.nodes_[b].children;
    if (ca.size() != cb.size())
      return false;
    for (std::size_t k = 0; k < ca.size(); ++k)
      stack.emplace_back(ca[k], cb[k]);
  }
  return true;
}

void check_leaf_cover(const Dendrogram &d, const AttributedGraph &g) {
  std::vector<std::string> missing, foreign;
  for (const auto &[id, _] : g.nodes())
    if (!d.find_leaf(id))
      missing.push_back(g.display_name(id));
  for (NodeId id : d.leaves(d.root()))
    if (!g.has_node(id))
      foreign.push_back(std::to_string(id));
  if (missing.empty() && foreign.empty())
    return;
  std::ostringstream msg;
  msg << "dendrogram does not cover the graph";
  auto list = [&](const char *what, const std::vector<std::string> &names) {
    if (names.empty())
      return;
    msg << "; " << what << ":";
    for (const auto &n : names)
      msg << ' ' << n;
  };
  list("missing leaves", missing);
  list("unknown leaves", foreign);
  throw ValidationError(msg.str());
}

double ndc(const Dendrogram &d, const AttributedGraph &g) {
  if (g.edge_count() == 0)
    throw ValidationError("ndc of an edgeless graph");
  check_leaf_cover(d, g);
  double cost = 0.0;
  g.for_each_edge([&](NodeId u, NodeId v, std::uint32_t k) {
    auto a = *d.find_leaf(u);
    auto b = *d.find_leaf(v);
    auto da = d.depth(a);
    auto db = d.depth(b);
    while (da > db) {
      a = d.parent(a);
      --da;
    }
    while (db > da) {
      b = d.parent(b);
      --db;
    }
    while (a != b) {
      a = d.parent(a);
      b = d.parent(b);
    }
    cost += static_cast<double>(k) * static_cast<double>(d.leaf_count(a));
  });
  return cost / (static_cast<double>(g.node_count()) * static_cast<double>(g.edge_count()));
}

namespace {

class TreeParser {
public:
  TreeParser(const std::string &text, const std::unordered_map<std::string, NodeId> &names)
      : text_(text), names_(names) {}

  ClusterTree parse() {
    ClusterTree tree = parse_node();
    skip_space();
    if (pos_ != text_.size())
      fail("trailing characters");
    return tree;
  }

  std::vector<std::string> unknown;
  std::vector<std::string> duplicated;
  std::set<std::string> seen;

private:
  ClusterTree parse_node() {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      std::vector<ClusterTree> kids;
      kids.push_back(parse_node());
      skip_space();
      while (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        kids.push_back(parse_node());
        skip_space();
      }
      if (pos_ >= text_.size() || text_[pos_] != ')')
        fail("expected ')'");
      ++pos_;
      return ClusterTree::join(std::move(kids));
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           text_[pos_] != ',' && !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start)
      fail("expected a node name");
    std::string name = text_.substr(start, pos_ - start);
    if (!seen.insert(name).second) {
      duplicated.push_back(name);
      return ClusterTree::join({});
    }
    auto it = names_.find(name);
    if (it == names_.end()) {
      unknown.push_back(name);
      return ClusterTree::join({});
    }
    return ClusterTree::make_leaf(it->second);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string &what) const {
    throw ValidationError("dendrogram parse error at offset " + std::to_string(pos_) + ": " +
                          what);
  }

  const std::string &text_;
  const std::unordered_map<std::string, NodeId> &names_;
  std::size_t pos_ = 0;
};

// Placeholders for rejected leaves are empty internal nodes; drop them so
// the error report below can list every offender at once.
ClusterTree prune_placeholders(ClusterTree tree) {
  if (tree.leaf)
    return tree;
  std::vector<ClusterTree> kept;
  for (auto &c : tree.children) {
    auto p = prune_placeholders(std::move(c));
    if (p.leaf || !p.children.empty())
      kept.push_back(std::move(p));
  }
  tree.children = std::move(kept);
  return tree;
}

} // namespace

Dendrogram parse_dendrogram(const std::string &text, const AttributedGraph &g) {
  const auto names = g.name_index();
  TreeParser parser(text, names);
  ClusterTree tree = prune_placeholders(parser.parse());

  std::vector<std::string> missing;
  for (const auto &[id, _] : g.nodes())
    if (!parser.seen.contains(g.display_name(id)))
      missing.push_back(g.display_name(id));
  if (!missing.empty() || !parser.unknown.empty() || !parser.duplicated.empty()) {
    std::ostringstream msg;
    msg << "invalid dendrogram";
    auto list = [&](const char *what, const std::vector<std::string> &items) {
      if (items.empty())
        return;
      msg << "; " << what << ":";
      for (const auto &s : items)
        msg << ' ' << s;
    };
    list("missing leaves", missing);
    list("duplicated leaves", parser.duplicated);
    list("unknown leaves", parser.unknown);
    throw ValidationError(msg.str());
  }
  return Dendrogram(tree);
}

Dendrogram load_dendrogram(std::istream &in, const AttributedGraph &g) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_dendrogram(text, g);
}

std::string format_dendrogram(const Dendrogram &d, const AttributedGraph &g) {
  std::string out;
  auto emit = [&](auto &&self, Dendrogram::Index i) -> void {
    if (d.is_leaf(i)) {
      out += g.display_name(d.leaf_node(i));
      return;
    }
    out += '(';
    bool first = true;
    for (auto c : d.children(i)) {
      if (!first)
        out += ',';
      first = false;
      self(self, c);
    }
    out += ')';
  };
  emit(emit, d.root());
  return out;
}

} // namespace avrg
