#include "jch/graphs.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "jch/errors.hpp"

namespace jch {

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edge_count_);
  for (int i = 0; i < L_; ++i)
    for (int j = i + 1; j < L_; ++j)
      if (adjacent(i, j)) out.emplace_back(i, j);
  return out;
}

Graph Graph::permuted(const std::vector<int>& perm) const {
  std::vector<std::pair<int, int>> mapped;
  std::vector<int> inverse(L_);
  for (int i = 0; i < L_; ++i) inverse[perm[i]] = i;
  for (auto [a, b] : edges()) mapped.emplace_back(inverse[a], inverse[b]);
  Graph g = build_graph(mapped, L_);
  g.set_name(name_);
  return g;
}

Graph build_graph(const std::vector<std::pair<int, int>>& edge_list, int L) {
  if (L < 1) throw IndexOutOfRange("build_graph: L must be >= 1");
  Graph g;
  g.L_ = L;
  g.adj_.assign(static_cast<std::size_t>(L) * L, 0);
  g.degree_.assign(L, 0);
  for (auto [i, j] : edge_list) {
    if (i < 0 || j < 0 || i >= L || j >= L)
      throw IndexOutOfRange("build_graph: edge (" + std::to_string(i) + "," +
                            std::to_string(j) + ") out of range for L=" + std::to_string(L));
    if (i == j) throw SelfLoop("build_graph: self-loop at node " + std::to_string(i));
    if (g.adj_[static_cast<std::size_t>(i) * L + j]) continue;  // duplicate
    g.adj_[static_cast<std::size_t>(i) * L + j] = 1;
    g.adj_[static_cast<std::size_t>(j) * L + i] = 1;
    ++g.degree_[i];
    ++g.degree_[j];
    ++g.edge_count_;
  }
  // BFS connectivity check.
  std::vector<char> seen(L, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w = 0; w < L; ++w) {
      if (g.adjacent(v, w) && !seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != L) throw Disconnected("build_graph: graph is not connected");
  return g;
}

namespace {

std::uint64_t upper_bits(const Graph& g, const std::vector<int>& perm) {
  const int L = g.sites();
  std::uint64_t bits = 0;
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j) {
      bits <<= 1;
      if (g.adjacent(perm[i], perm[j])) bits |= 1;
    }
  return bits;
}

}  // namespace

std::uint64_t canonical_adjacency_bits(const Graph& g) {
  const int L = g.sites();
  std::vector<int> perm(L);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = upper_bits(g, perm);
  while (std::next_permutation(perm.begin(), perm.end()))
    best = std::min(best, upper_bits(g, perm));
  return best;
}

std::vector<GraphCatalogEntry> enumerate_connected_graphs(int L) {
  if (L < 2) throw IndexOutOfRange("enumerate_connected_graphs: L must be >= 2");
  if (L > 6) throw LTooLarge("enumerate_connected_graphs: L=" + std::to_string(L) + " exceeds 6");

  std::vector<std::pair<int, int>> all_pairs;
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j) all_pairs.emplace_back(i, j);
  const int P = static_cast<int>(all_pairs.size());

  struct Keyed {
    std::uint64_t key;
    GraphCatalogEntry entry;
  };
  std::vector<Keyed> found;

  for (std::uint32_t mask = 0; mask < (1u << P); ++mask) {
    std::vector<std::pair<int, int>> edges;
    for (int b = 0; b < P; ++b)
      if (mask & (1u << b)) edges.push_back(all_pairs[b]);
    if (static_cast<int>(edges.size()) < L - 1) continue;  // cannot be connected
    Graph g;
    try {
      g = build_graph(edges, L);
    } catch (const Disconnected&) {
      continue;
    }
    const std::uint64_t key = canonical_adjacency_bits(g);
    if (std::any_of(found.begin(), found.end(),
                    [key](const Keyed& k) { return k.key == key; }))
      continue;
    // Rebuild the representative from its canonical bit pattern so the
    // stored labeling is itself canonical.
    std::vector<std::pair<int, int>> canon_edges;
    int bit = P - 1;
    for (int i = 0; i < L; ++i)
      for (int j = i + 1; j < L; ++j, --bit)
        if (key & (std::uint64_t{1} << bit)) canon_edges.emplace_back(i, j);
    GraphCatalogEntry e;
    e.graph = build_graph(canon_edges, L);
    e.connectivity_list = e.graph.degrees();
    e.edge_count = e.graph.edge_count();
    found.push_back({key, std::move(e)});
  }

  std::sort(found.begin(), found.end(), [](const Keyed& a, const Keyed& b) {
    if (a.entry.edge_count != b.entry.edge_count) return a.entry.edge_count < b.entry.edge_count;
    std::vector<int> da = a.entry.connectivity_list, db = b.entry.connectivity_list;
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    if (da != db) return da < db;
    return a.key < b.key;
  });

  std::vector<GraphCatalogEntry> out;
  out.reserve(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) {
    found[i].entry.graph.set_name("L" + std::to_string(L) + "_g" + std::to_string(i));
    out.push_back(std::move(found[i].entry));
  }
  return out;
}

Rational partition_connectivity(const Graph& g, const Partition& p) {
  if (p.members.empty()) throw EmptyPartition("partition_connectivity: empty partition");
  std::vector<char> in(g.sites(), 0);
  for (int m : p.members) {
    if (m < 0 || m >= g.sites())
      throw IndexOutOfRange("partition_connectivity: member " + std::to_string(m) +
                            " out of range");
    in[m] = 1;
  }
  int cut = 0;
  for (auto [i, j] : g.edges())
    if (in[i] != in[j]) ++cut;
  return Rational(cut, static_cast<std::int64_t>(p.members.size()));
}

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

GraphFile parse_graph_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int L = -1;
  std::vector<std::pair<int, int>> edges;
  std::vector<Partition> partitions;

  auto fail = [&](const std::string& msg) -> void {
    throw IoError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;

    if (line.rfind("L=", 0) == 0) {
      if (L != -1) fail("duplicate L= line");
      try {
        L = std::stoi(line.substr(2));
      } catch (...) {
        fail("cannot parse node count in '" + line + "'");
      }
      if (L < 1) fail("L must be >= 1");
      continue;
    }
    if (line.rfind("partition", 0) == 0) {
      auto colon = line.find(':');
      if (colon == std::string::npos) fail("partition line missing ':'");
      Partition p;
      p.name = strip(line.substr(9, colon - 9));
      if (p.name.empty()) fail("partition missing name");
      std::string rest = line.substr(colon + 1);
      std::replace(rest.begin(), rest.end(), ',', ' ');
      std::istringstream ms(rest);
      int m;
      while (ms >> m) p.members.push_back(m);
      if (p.members.empty()) fail("partition '" + p.name + "' has no members");
      std::sort(p.members.begin(), p.members.end());
      p.members.erase(std::unique(p.members.begin(), p.members.end()), p.members.end());
      partitions.push_back(std::move(p));
      continue;
    }
    std::istringstream es(line);
    int i, j;
    if (!(es >> i >> j)) fail("cannot parse edge '" + line + "'");
    if (L == -1) fail("edge before L= line");
    edges.emplace_back(i, j);
  }
  if (L == -1) throw IoError(origin + ": missing L= line");

  GraphFile gf;
  try {
    gf.graph = build_graph(edges, L);
  } catch (const Error& e) {
    throw IoError(origin + ": " + e.what());
  }
  for (const auto& p : partitions)
    for (int m : p.members)
      if (m < 0 || m >= L)
        throw IoError(origin + ": partition '" + p.name + "' member " + std::to_string(m) +
                      " out of range");
  gf.partitions = std::move(partitions);
  return gf;
}

GraphFile read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  GraphFile gf = parse_graph_text(ss.str(), path);
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  if (dot != std::string::npos) base = base.substr(0, dot);
  gf.graph.set_name(base);
  return gf;
}

void write_graph_file(const std::string& path, const Graph& g,
                      const std::vector<Partition>& partitions) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "L=" << g.sites() << "\n";
  for (auto [i, j] : g.edges()) out << i << " " << j << "\n";
  for (const auto& p : partitions) {
    out << "partition " << p.name << ": ";
    for (std::size_t k = 0; k < p.members.size(); ++k)
      out << (k ? "," : "") << p.members[k];
    out << "\n";
  }
}

}  // namespace jch
