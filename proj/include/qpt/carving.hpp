// Copyright 2026 The qpt authors
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

#ifndef QPT_CARVING_HPP_
#define QPT_CARVING_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace qpt {

// Abstract circuit of extended rectangles. Gadget internals are reduced to
// per-region fault counts: the classification and placement rules consume
// counts, never Pauli details. Every shared detection gadget is an edge
// between the rectangle it trails and the rectangle it leads.
struct ExRecDag {
  struct Ed {
    int pred = -1;  // node whose trailing ED this is (-1: circuit input)
    int succ = -1;  // node whose leading ED this is (-1: circuit output)
    int faults = 0;
    int size = 0;  // number of elementary locations, for cluster sizes
  };
  struct Node {
    int arity = 1;  // m <= 2
    bool is_measurement = false;
    int ga_faults = 0;
    int ga_size = 0;
    std::vector<int> in_eds;   // leading EDs (size == arity, except preps)
    std::vector<int> out_eds;  // trailing EDs (size == arity, except meas)
  };
  std::vector<Node> nodes;
  std::vector<Ed> eds;

  int add_node(int arity, bool is_measurement = false, int ga_faults = 0,
               int ga_size = 4);
  int add_ed(int pred, int succ, int faults = 0, int size = 28);

  int node_fault_total(int node) const;
  bool pre_bad(int node) const { return node_fault_total(node) >= 2; }

  // Reverse-topological node order (rear of the circuit first).
  std::vector<int> reverse_topological() const;
};

enum class CarveLabel {
  kGood,
  kGoodPrime,
  kGoodDoublePrime,
  kGoodTriplePrime,  // optional rear-violation refinement, see below
  kBad,
};
const char* carve_label_name(CarveLabel label);
inline bool is_good_star(CarveLabel label) { return label != CarveLabel::kBad; }

// Classification of pre-bad rectangles, computed rear-to-front:
//   1. bad        if every follower is good*,
//   2. good'      if every follower is bad,
//   3. otherwise  good'' when the truncated fault count (faults shared with
//      following bad rectangles excluded) is <= 1, else bad.
// Measurement rectangles (no followers) are always declared bad when pre-bad.
// Rectangles of arity > 2 are rejected.
std::vector<CarveLabel> classify(const ExRecDag& dag);

// Optional refinement pass, off unless invoked: a rectangle behind a bad
// rectangle never needs A-correctness (the decoder-encoder pair sits after
// its leading ED), so a bad label earned only through an A-mode violation
// may be relaxed. The caller supplies the per-node "violates A-correctness
// only" verdicts, which require Pauli-level analysis beyond fault counts.
void refine_rear_violations(const ExRecDag& dag,
                            std::vector<CarveLabel>& labels,
                            const std::vector<uint8_t>& violates_only_a);

// Non-overlapping carved segments induced by the decoder-encoder placement
// rules: an ED shared by a bad rectangle and a following good* rectangle is
// cut after the ED (it stays with the bad segment); every other shared ED is
// cut before it.
struct CarvedSegment {
  int node = -1;
  CarveLabel label = CarveLabel::kGood;
  std::vector<int> eds;  // EDs assigned to this segment
  int fault_count = 0;   // ga faults + assigned ED faults
};
std::vector<CarvedSegment> carve(const ExRecDag& dag,
                                 const std::vector<CarveLabel>& labels);

// Smallest cluster containing the marked rectangles whose boundary consists
// of fault-free EDs. The marked rectangles' own EDs are pessimistically
// treated as interior, so the smallest possible cluster is a rectangle plus
// all of its neighbours.
struct SealedCluster {
  std::vector<int> nodes;
  std::vector<int> leading_eds;
  std::vector<int> trailing_eds;
  int interior_locations = 0;  // |K|
};
SealedCluster minimal_sealed_cluster(const ExRecDag& dag,
                                     const std::vector<int>& marked);

// Exact count of connected s-node subgraphs of `adjacency` containing
// `root`. Enumeration is exponential; sizes beyond `max_size` are refused.
int64_t count_connected_clusters(const std::vector<std::vector<int>>& adjacency,
                                 int root, int size, int max_size = 12);

// Connected s-node subgraphs containing every marked node (t <= 2 used).
int64_t count_connected_clusters_multi(
    const std::vector<std::vector<int>>& adjacency,
    const std::vector<int>& marked, int size, int max_size = 12);

std::string dag_to_dot(const ExRecDag& dag,
                       const std::vector<CarveLabel>& labels);
std::string cluster_to_json(const ExRecDag& dag, const SealedCluster& cluster,
                            int indent = 2);

}  // namespace qpt

#endif  // QPT_CARVING_HPP_
