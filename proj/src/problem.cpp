// Copyright 2026 The rydfalqon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rydfalqon/problem.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace rydfalqon {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) throw ConfigError("graph must have at least one vertex");
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_) {
      throw ConfigError("edge vertex index out of range");
    }
    if (e.u == e.v) throw ConfigError("self-loops are not allowed");
    if (!std::isfinite(e.weight)) throw ConfigError("edge weight must be finite");
    if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second) {
      throw ConfigError("duplicate edge");
    }
  }
}

double Graph::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.weight;
  return s;
}

Graph graph_preset(std::string_view name) {
  if (name == "edge") return Graph(2, {{0, 1}});
  if (name == "path3") return Graph(3, {{0, 1}, {1, 2}});
  if (name == "type-1") return Graph(4, {{0, 1}, {1, 2}, {2, 3}});
  if (name == "type-2") return Graph(4, {{0, 1}, {0, 2}, {0, 3}});
  if (name == "type-3") return Graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  throw ConfigError("unknown graph preset: " + std::string(name));
}

Graph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = -1;
  std::vector<Edge> edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "n") {
      if (n >= 0) throw ConfigError("edge list: repeated header");
      if (!(ls >> n)) throw ConfigError("edge list: bad header on line " + std::to_string(lineno));
      continue;
    }
    if (n < 0) throw ConfigError("edge list: missing 'n <count>' header");
    Edge e;
    try {
      e.u = std::stoi(first);
    } catch (const std::exception&) {
      throw ConfigError("edge list: bad vertex on line " + std::to_string(lineno));
    }
    if (!(ls >> e.v)) throw ConfigError("edge list: bad edge on line " + std::to_string(lineno));
    if (!(ls >> e.weight)) e.weight = 1.0;
    edges.push_back(e);
  }
  if (n < 0) throw ConfigError("edge list: missing 'n <count>' header");
  return Graph(n, std::move(edges));
}

std::string format_edge_list(const Graph& g) {
  std::ostringstream out;
  out.precision(17);
  out << "n " << g.vertex_count() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << ' ' << e.weight << '\n';
  return out.str();
}

IsingHamiltonian maxcut_hamiltonian(const Graph& g) {
  IsingHamiltonian h(g.vertex_count());
  for (const auto& e : g.edges()) {
    h.couplings.push_back({std::min(e.u, e.v), std::max(e.u, e.v), 0.5 * e.weight});
  }
  h.offset = -0.5 * g.total_weight();
  return h;
}

RVector diagonal(const IsingHamiltonian& h) {
  if (h.n < 1 || h.n > 30) throw ConfigError("Ising Hamiltonian qubit count out of range");
  const std::uint64_t dim = std::uint64_t{1} << h.n;
  auto spin = [n = h.n](std::uint64_t idx, int q) {
    return ((idx >> (n - 1 - q)) & 1U) ? -1.0 : 1.0;
  };
  RVector d(static_cast<Eigen::Index>(dim));
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    double e = h.offset;
    for (const auto& c : h.couplings) e += c.value * spin(idx, c.i) * spin(idx, c.j);
    for (int q = 0; q < h.n; ++q) e += h.fields(q) * spin(idx, q);
    d(static_cast<Eigen::Index>(idx)) = e;
  }
  return d;
}

CMatrix to_matrix(const IsingHamiltonian& h) {
  return diagonal(h).cast<Complex>().asDiagonal();
}

GroundSet ground_set(const IsingHamiltonian& h, double tol) {
  if (h.n > 20) throw ConfigError("ground_set: enumeration limited to n <= 20");
  const RVector d = diagonal(h);
  GroundSet g;
  g.energy = d.minCoeff();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) <= g.energy + tol) g.states.push_back(static_cast<std::uint64_t>(i));
  }
  return g;
}

CMatrix driver_hamiltonian(int n) {
  if (n < 1) throw ConfigError("driver_hamiltonian: n must be positive");
  const auto dim = Eigen::Index{1} << n;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int q = 0; q < n; ++q) h += embed(pauli::x(), {q}, n);
  return -0.5 * h;
}

CMatrix feedback_observable(const IsingHamiltonian& hp) {
  const CMatrix hd = driver_hamiltonian(hp.n);
  const CMatrix p = to_matrix(hp);
  return Complex(0, 1) * (hd * p - p * hd);
}

double max_cut_value(const Graph& g) {
  const int n = g.vertex_count();
  if (n > 24) throw ConfigError("max_cut_value: brute force limited to n <= 24");
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double cut = 0.0;
    for (const auto& e : g.edges()) {
      if (((mask >> e.u) & 1U) != ((mask >> e.v) & 1U)) cut += e.weight;
    }
    best = std::max(best, cut);
  }
  return best;
}

}  // namespace rydfalqon
