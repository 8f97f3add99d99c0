#include "ccdyn/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ccdyn {

void Graph::check_vertex(VertexId v) const {
  if (v < 0 || v >= n()) throw std::out_of_range("vertex id out of range");
}

bool Graph::has_edge(VertexId u, VertexId v) const {
  check_vertex(u);
  check_vertex(v);
  if (u == v) return false;
  const auto& a = adj_[static_cast<size_t>(degree(u) <= degree(v) ? u : v)];
  VertexId w = degree(u) <= degree(v) ? v : u;
  return std::binary_search(a.begin(), a.end(), w);
}

bool Graph::add_edge(VertexId u, VertexId v) {
  check_vertex(u);
  check_vertex(v);
  if (u == v) throw std::invalid_argument("self-loops are not allowed");
  auto& au = adj_[static_cast<size_t>(u)];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it != au.end() && *it == v) return false;
  au.insert(it, v);
  auto& av = adj_[static_cast<size_t>(v)];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
  ++m_;
  return true;
}

bool Graph::remove_edge(VertexId u, VertexId v) {
  check_vertex(u);
  check_vertex(v);
  auto& au = adj_[static_cast<size_t>(u)];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it == au.end() || *it != v) return false;
  au.erase(it);
  auto& av = adj_[static_cast<size_t>(v)];
  av.erase(std::lower_bound(av.begin(), av.end(), u));
  --m_;
  return true;
}

bool Graph::flip_edge(VertexId u, VertexId v) {
  if (add_edge(u, v)) return true;
  remove_edge(u, v);
  return false;
}

std::vector<Pair> Graph::edges() const {
  std::vector<Pair> out;
  out.reserve(static_cast<size_t>(m_));
  for (VertexId u = 0; u < n(); ++u)
    for (VertexId v : adj_[static_cast<size_t>(u)])
      if (u < v) out.emplace_back(u, v);
  return out;
}

std::string Graph::canonical_key() const {
  std::ostringstream os;
  os << n() << ';';
  for (VertexId u = 0; u < n(); ++u) {
    for (VertexId v : adj_[static_cast<size_t>(u)])
      if (u < v) os << u << ',' << v << ';';
  }
  return os.str();
}

Graph Graph::gnp(int32_t n, double p, RngStream& rng) {
  Graph g(n);
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) g.add_edge(u, v);
  return g;
}

Graph Graph::two_paths(int32_t n) {
  if (n % 3 != 0) throw std::invalid_argument("two_paths requires n divisible by 3");
  Graph g(n);
  for (VertexId i = 0; i + 2 < n; i += 3) {
    g.add_edge(i, i + 1);
    g.add_edge(i + 1, i + 2);
  }
  return g;
}

Graph Graph::complete(int32_t n) {
  Graph g(n);
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

namespace {

// Strips '#" comments and returns the next non-empty line.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) throw std::runtime_error("edge list: missing header");
  std::istringstream header(line);
  int64_t n = 0, m = 0;
  if (!(header >> n >> m) || n < 0 || m < 0) throw std::runtime_error("edge list: bad header");
  Graph g(static_cast<int32_t>(n));
  int64_t read = 0;
  while (read < m) {
    if (!next_data_line(in, line)) throw std::runtime_error("edge list: truncated");
    std::istringstream row(line);
    int64_t u, v;
    while (row >> u >> v) {
      if (!g.add_edge(static_cast<VertexId>(u), static_cast<VertexId>(v)))
        throw std::runtime_error("edge list: duplicate edge");
      ++read;
    }
  }
  return g;
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << g.n() << ' ' << g.m() << '\n';
  for (const Pair& e : g.edges()) out << e.a << ' ' << e.b << '\n';
}

}  // namespace ccdyn
