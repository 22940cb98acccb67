#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jch/rational.hpp"

namespace jch {

// Finite simple undirected graph (a coupled-resonator array). Immutable
// after construction; adjacency is symmetric 0/1 with zero diagonal and
// the graph is required to be connected.
class Graph {
 public:
  Graph() = default;

  int sites() const { return L_; }
  bool adjacent(int i, int j) const { return adj_[static_cast<std::size_t>(i) * L_ + j] != 0; }
  int degree(int i) const { return degree_[i]; }
  const std::vector<int>& degrees() const { return degree_; }
  int edge_count() const { return edge_count_; }
  double mean_connectivity() const {
    return L_ > 0 ? 2.0 * edge_count_ / static_cast<double>(L_) : 0.0;
  }

  // Edges as (i, j) with i < j, row-major order.
  std::vector<std::pair<int, int>> edges() const;

  // Copy with nodes relabeled: node i of the result is node perm[i] of *this.
  Graph permuted(const std::vector<int>& perm) const;

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels) { labels_ = std::move(labels); }

  friend Graph build_graph(const std::vector<std::pair<int, int>>& edge_list, int L);

 private:
  int L_ = 0;
  int edge_count_ = 0;
  std::vector<std::uint8_t> adj_;  // row-major L*L
  std::vector<int> degree_;
  std::vector<std::string> labels_;
  std::string name_;
};

// Named set of node indices.
struct Partition {
  std::string name;
  std::vector<int> members;  // sorted, unique
};

struct GraphCatalogEntry {
  Graph graph;
  std::vector<int> connectivity_list;  // k_i per site, in site order
  int edge_count = 0;
};

// Builds a validated graph from an edge list. Duplicate edges are ignored.
// Throws IndexOutOfRange, SelfLoop or Disconnected.
Graph build_graph(const std::vector<std::pair<int, int>>& edge_list, int L);

// One canonical representative per isomorphism class of connected simple
// graphs on L nodes, 2 <= L <= 6. Ordering is deterministic: by edge count,
// then ascending sorted degree sequence, then canonical adjacency bits.
std::vector<GraphCatalogEntry> enumerate_connected_graphs(int L);

// Upper-triangle adjacency bits, minimized over all node permutations.
// Bit order: (0,1), (0,2), ..., (0,L-1), (1,2), ..., (L-2,L-1), with the
// (0,1) bit most significant. Equal keys <=> isomorphic graphs.
std::uint64_t canonical_adjacency_bits(const Graph& g);

// (edges with exactly one endpoint in p) / |p|, exact. Throws EmptyPartition
// or IndexOutOfRange for invalid members.
Rational partition_connectivity(const Graph& g, const Partition& p);

struct GraphFile {
  Graph graph;
  std::vector<Partition> partitions;
};

// Plain-text graph format: first line "L=<int>", one "i j" edge per line,
// optional "partition <name>: i,j,k" lines, '#' comments.
GraphFile read_graph_file(const std::string& path);
GraphFile parse_graph_text(const std::string& text, const std::string& origin);
void write_graph_file(const std::string& path, const Graph& g,
                      const std::vector<Partition>& partitions = {});

}  // namespace jch
