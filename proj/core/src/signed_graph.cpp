#include "stqaoa/signed_graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "stqaoa/rng.hpp"

namespace stqaoa {

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  bool merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

// Adjacency lists with edge signs, neighbors sorted ascending.
std::vector<std::vector<std::pair<int, int>>> sorted_adjacency(
    int n, const std::vector<SignedEdge>& edges) {
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].emplace_back(e.v, e.sign);
    adj[e.v].emplace_back(e.u, e.sign);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

// BFS spanning tree over the given adjacency, children in ascending order.
// The adjacency must be connected over all n vertices.
DirectedSpanningTree bfs_tree(int n, int root,
                              const std::vector<std::vector<std::pair<int, int>>>& adj) {
  DirectedSpanningTree t;
  t.root = root;
  t.parent.assign(n, -1);
  t.parent_sign.assign(n, 0);
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  seen[root] = 1;
  frontier.push(root);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (const auto& [v, sign] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      t.parent[v] = u;
      t.parent_sign[v] = sign;
      t.edge_order.push_back({u, v, sign});
      frontier.push(v);
    }
  }
  if (static_cast<int>(t.edge_order.size()) != n - 1)
    throw std::invalid_argument("bfs_tree: adjacency is not connected");
  return t;
}

}  // namespace

void validate_graph(const SignedGraph& g) {
  if (g.n_vertices < 1) throw std::invalid_argument("graph needs at least one vertex");
  std::set<std::pair<int, int>> seen;
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.u >= g.n_vertices || e.v < 0 || e.v >= g.n_vertices)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("self-loop");
    if (e.sign != 1 && e.sign != -1) throw std::invalid_argument("edge sign must be +1 or -1");
    const auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second) throw std::invalid_argument("duplicate edge");
  }
}

SignedGraph make_signed_graph(int n_vertices, std::vector<SignedEdge> edges) {
  SignedGraph g{n_vertices, std::move(edges)};
  validate_graph(g);
  return g;
}

void validate_tree(const SignedGraph& g, const DirectedSpanningTree& t) {
  const int n = g.n_vertices;
  if (static_cast<int>(t.parent.size()) != n || static_cast<int>(t.parent_sign.size()) != n)
    throw std::invalid_argument("tree parent arrays must cover every vertex");
  if (t.root < 0 || t.root >= n || t.parent[t.root] != -1)
    throw std::invalid_argument("tree root invalid");
  if (static_cast<int>(t.edge_order.size()) != n - 1)
    throw std::invalid_argument("tree must have exactly n-1 edges");

  std::map<std::pair<int, int>, int> graph_sign;
  for (const auto& e : g.edges) graph_sign[std::minmax(e.u, e.v)] = e.sign;

  std::vector<char> placed(n, 0);
  placed[t.root] = 1;
  for (const auto& e : t.edge_order) {
    if (e.child < 0 || e.child >= n || e.parent < 0 || e.parent >= n)
      throw std::invalid_argument("tree edge endpoint out of range");
    if (!placed[e.parent]) throw std::invalid_argument("edge_order lists a child before its parent");
    if (placed[e.child]) throw std::invalid_argument("vertex has two tree parents");
    placed[e.child] = 1;
    if (t.parent[e.child] != e.parent || t.parent_sign[e.child] != e.sign)
      throw std::invalid_argument("edge_order disagrees with parent arrays");
    const auto it = graph_sign.find(std::minmax(e.parent, e.child));
    if (it == graph_sign.end()) throw std::invalid_argument("tree edge not present in graph");
    if (it->second != e.sign) throw std::invalid_argument("tree edge sign differs from graph");
  }
}

int cut_value(const SignedGraph& g, const std::vector<std::uint8_t>& z) {
  if (static_cast<int>(z.size()) != g.n_vertices)
    throw std::invalid_argument("assignment length must equal n_vertices");
  int value = 0;
  for (const auto& e : g.edges) {
    const bool same = z[e.u] == z[e.v];
    if ((e.sign == 1) == same) ++value;
  }
  return value;
}

Cut make_cut(const SignedGraph& g, std::vector<std::uint8_t> z) {
  Cut c;
  c.value = cut_value(g, z);
  c.assignment = std::move(z);
  return c;
}

std::optional<Cut> is_balanced(const SignedGraph& g) {
  validate_graph(g);
  const int n = g.n_vertices;
  const auto adj = sorted_adjacency(n, g.edges);
  std::vector<std::uint8_t> z(n, 0);
  std::vector<char> seen(n, 0);
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    seen[start] = 1;
    z[start] = 0;
    std::queue<int> frontier;
    frontier.push(start);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (const auto& [v, sign] : adj[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        z[v] = sign == 1 ? z[u] : static_cast<std::uint8_t>(1 - z[u]);
        frontier.push(v);
      }
    }
  }
  const int value = cut_value(g, z);
  if (value != static_cast<int>(g.edges.size())) return std::nullopt;
  return Cut{std::move(z), value};
}

Cut balanced_cut_from_tree(const SignedGraph& g, const DirectedSpanningTree& t) {
  validate_tree(g, t);
  std::vector<std::uint8_t> z(g.n_vertices, 0);
  z[t.root] = 0;
  for (const auto& e : t.edge_order)
    z[e.child] = e.sign == 1 ? z[e.parent] : static_cast<std::uint8_t>(1 - z[e.parent]);
  return make_cut(g, std::move(z));
}

std::pair<Cut, DirectedSpanningTree> tree_from_cut(const SignedGraph& g, const Cut& z) {
  if (!is_connected(g)) throw std::invalid_argument("tree_from_cut requires a connected graph");
  if (static_cast<int>(z.assignment.size()) != g.n_vertices)
    throw std::invalid_argument("assignment length must equal n_vertices");

  const int n = g.n_vertices;
  std::vector<std::uint8_t> bits = z.assignment;
  int value = cut_value(g, bits);

  for (;;) {
    std::vector<SignedEdge> satisfied;
    for (const auto& e : g.edges) {
      const bool same = bits[e.u] == bits[e.v];
      if ((e.sign == 1) == same) satisfied.push_back(e);
    }
    UnionFind uf(n);
    for (const auto& e : satisfied) uf.merge(e.u, e.v);

    int flip_rep = -1;
    const int root_rep = uf.find(0);
    for (int v = 1; v < n; ++v) {
      if (uf.find(v) != root_rep) {
        flip_rep = uf.find(v);
        break;
      }
    }
    if (flip_rep < 0) {
      const auto adj = sorted_adjacency(n, satisfied);
      auto tree = bfs_tree(n, 0, adj);
      return {Cut{std::move(bits), value}, std::move(tree)};
    }

    for (int v = 0; v < n; ++v)
      if (uf.find(v) == flip_rep) bits[v] = static_cast<std::uint8_t>(1 - bits[v]);
    const int new_value = cut_value(g, bits);
    if (new_value <= value)
      throw std::logic_error("component flip failed to increase the cut value");
    value = new_value;
  }
}

DirectedSpanningTree random_spanning_tree(const SignedGraph& g, std::uint64_t seed) {
  if (!is_connected(g)) throw std::invalid_argument("random_spanning_tree requires a connected graph");
  rng::Rng r(seed);

  std::vector<int> order(g.edges.size());
  std::iota(order.begin(), order.end(), 0);
  r.shuffle(order);

  UnionFind uf(g.n_vertices);
  std::vector<SignedEdge> tree_edges;
  for (const int idx : order) {
    const auto& e = g.edges[idx];
    if (uf.merge(e.u, e.v)) tree_edges.push_back(e);
  }

  const int root = static_cast<int>(r.below(static_cast<std::uint64_t>(g.n_vertices)));
  const auto adj = sorted_adjacency(g.n_vertices, tree_edges);
  return bfs_tree(g.n_vertices, root, adj);
}

SignedGraph random_regular_graph(int n, int d, int sign, std::uint64_t seed) {
  if (n < 1 || d < 1 || d >= n) throw std::invalid_argument("need 1 <= d < n");
  if ((static_cast<long long>(n) * d) % 2 != 0)
    throw std::invalid_argument("n*d must be even for a d-regular graph");
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");

  rng::Rng r(seed);
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * d);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < d; ++i) stubs.push_back(v);

  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    r.shuffle(stubs);
    std::set<std::pair<int, int>> seen;
    std::vector<SignedEdge> edges;
    edges.reserve(stubs.size() / 2);
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
      const int u = std::min(stubs[i], stubs[i + 1]);
      const int v = std::max(stubs[i], stubs[i + 1]);
      if (u == v || !seen.insert({u, v}).second) {
        ok = false;
        break;
      }
      edges.push_back({u, v, sign});
    }
    if (ok) return SignedGraph{n, std::move(edges)};
  }
  throw std::runtime_error("configuration model failed to produce a simple graph");
}

bool is_connected(const SignedGraph& g) {
  validate_graph(g);
  if (g.n_vertices == 1) return true;
  UnionFind uf(g.n_vertices);
  int components = g.n_vertices;
  for (const auto& e : g.edges)
    if (uf.merge(e.u, e.v)) --components;
  return components == 1;
}

std::string write_graph(const SignedGraph& g) {
  validate_graph(g);
  std::ostringstream out;
  out << g.n_vertices << ' ' << g.edges.size() << '\n';
  for (const auto& e : g.edges)
    out << e.u << ' ' << e.v << ' ' << (e.sign > 0 ? "+1" : "-1") << '\n';
  return out.str();
}

SignedGraph read_graph(const std::string& text) {
  std::istringstream in(text);
  int n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw std::runtime_error("graph text: missing 'n m' header");
  SignedGraph g;
  g.n_vertices = n;
  g.edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    SignedEdge e;
    if (!(in >> e.u >> e.v >> e.sign))
      throw std::runtime_error("graph text: truncated edge list");
    g.edges.push_back(e);
  }
  validate_graph(g);
  return g;
}

void write_graph_file(const SignedGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << write_graph(g);
  if (!out) throw std::runtime_error("write failed: " + path);
}

SignedGraph read_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_graph(buf.str());
}

}  // namespace stqaoa
