#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stqaoa {

// Undirected simple graph with +-1 edge signs. A cut satisfies a -1 edge when
// its endpoints lie on opposite sides and a +1 edge when they lie on the same
// side; the objective is the number of satisfied edges.
struct SignedEdge {
  int u = 0;
  int v = 0;
  int sign = -1;
};

struct SignedGraph {
  int n_vertices = 0;
  std::vector<SignedEdge> edges;
};

// Throws std::invalid_argument on out-of-range vertices, self-loops,
// duplicate undirected edges, or signs outside {+1, -1}.
void validate_graph(const SignedGraph& g);

// Builds and validates a graph in one step.
SignedGraph make_signed_graph(int n_vertices, std::vector<SignedEdge> edges);

// Vertex bipartition, one bit per vertex, with its satisfied-edge count.
// Recomputation via cut_value is the source of truth for `value`.
struct Cut {
  std::vector<std::uint8_t> assignment;
  int value = 0;
};

// Rooted spanning tree with per-edge signs. edge_order lists the directed
// edges with every parent appearing before its children's outgoing edges;
// the tree circuits apply their gates in exactly this order.
struct DirectedTreeEdge {
  int parent = 0;
  int child = 0;
  int sign = -1;
};

struct DirectedSpanningTree {
  int root = 0;
  std::vector<int> parent;       // parent[v]; -1 at the root
  std::vector<int> parent_sign;  // sign of the edge (parent[v], v); 0 at the root
  std::vector<DirectedTreeEdge> edge_order;
};

// Throws std::invalid_argument unless t is a spanning tree of g with signs
// matching g's edges and a parent-before-child edge_order.
void validate_tree(const SignedGraph& g, const DirectedSpanningTree& t);

// Number of edges satisfied by assignment z.
// Throws std::invalid_argument if z's length differs from g.n_vertices.
int cut_value(const SignedGraph& g, const std::vector<std::uint8_t>& z);

// Cut with its value cached.
Cut make_cut(const SignedGraph& g, std::vector<std::uint8_t> z);

// A satisfying cut (value = |edges|) if one exists, std::nullopt otherwise.
// Found by assigning bits along a spanning forest and checking the remaining
// edges; works on disconnected graphs.
std::optional<Cut> is_balanced(const SignedGraph& g);

// Root gets bit 0; each child copies its parent's bit across +1 edges and
// flips it across -1 edges. The result satisfies every tree edge.
Cut balanced_cut_from_tree(const SignedGraph& g, const DirectedSpanningTree& t);

// Spanning tree of the subgraph of edges satisfied by z. If that subgraph is
// disconnected, components other than vertex 0's are bit-flipped until it is
// connected; each flip strictly increases the cut value, so the returned cut
// is never worse than the input. The tree is BFS from vertex 0 with children
// visited in ascending vertex order.
// Throws std::invalid_argument if g is disconnected.
std::pair<Cut, DirectedSpanningTree> tree_from_cut(const SignedGraph& g, const Cut& z);

// Random spanning tree by uniformly shuffled edge insertion with union-find,
// rooted at a uniformly random vertex, edge_order by BFS with children in
// ascending vertex order. Throws std::invalid_argument if g is disconnected.
DirectedSpanningTree random_spanning_tree(const SignedGraph& g, std::uint64_t seed);

// Random simple d-regular graph on n vertices via the configuration model,
// restarting the pairing whenever it produces a self-loop or duplicate edge.
// Every edge gets `sign`. Throws std::invalid_argument unless n*d is even,
// d < n, and sign is +-1. Connectivity is not guaranteed.
SignedGraph random_regular_graph(int n, int d, int sign, std::uint64_t seed);

bool is_connected(const SignedGraph& g);

// Text format: first line "n m", then one line "u v s" per edge with
// s in {+1, -1}. write_graph emits the canonical form, which round-trips
// byte-identically through read_graph.
std::string write_graph(const SignedGraph& g);
SignedGraph read_graph(const std::string& text);
void write_graph_file(const SignedGraph& g, const std::string& path);
SignedGraph read_graph_file(const std::string& path);

}  // namespace stqaoa
