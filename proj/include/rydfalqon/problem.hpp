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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rydfalqon/linops.hpp"

namespace rydfalqon {

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

/// Undirected graph without self-loops or duplicate edges. Edge order is
/// preserved; it fixes the gate order inside a circuit layer.
class Graph {
 public:
  Graph() = default;
  Graph(int n, std::vector<Edge> edges);

  int vertex_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double total_weight() const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

/// Named graphs: "edge" (n=2), "path3" (n=3 path), and the 4-vertex
/// "type-1" (path), "type-2" (star), "type-3" (cycle).
Graph graph_preset(std::string_view name);

/// Parses "n <count>" followed by "u v [w]" lines; '#' starts a comment.
Graph parse_edge_list(std::string_view text);
std::string format_edge_list(const Graph& g);

struct Coupling {
  int i = 0;
  int j = 0;  // i < j
  double value = 0.0;
};

/// H = sum_{i<j} J_ij Z_i Z_j + sum_i h_i Z_i + offset.
struct IsingHamiltonian {
  int n = 0;
  std::vector<Coupling> couplings;
  RVector fields;
  double offset = 0.0;

  IsingHamiltonian() = default;
  explicit IsingHamiltonian(int qubits) : n(qubits), fields(RVector::Zero(qubits)) {}
};

IsingHamiltonian maxcut_hamiltonian(const Graph& g);

/// Energy of every computational basis state; bit 0 <-> Z = +1.
RVector diagonal(const IsingHamiltonian& h);
CMatrix to_matrix(const IsingHamiltonian& h);

struct GroundSet {
  double energy = 0.0;
  std::vector<std::uint64_t> states;  // basis indices, ascending
};

GroundSet ground_set(const IsingHamiltonian& h, double tol = 1e-9);

/// -1/2 sum_i X_i.
CMatrix driver_hamiltonian(int n);

/// i[H_d, H_p] as an explicit dense commutator.
CMatrix feedback_observable(const IsingHamiltonian& hp);

/// Brute-force maximum cut value (sum of cut edge weights).
double max_cut_value(const Graph& g);

}  // namespace rydfalqon
