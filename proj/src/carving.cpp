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

#include "qpt/carving.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace qpt {

int ExRecDag::add_node(int arity, bool is_measurement, int ga_faults,
                       int ga_size) {
  if (arity < 1 || arity > 2) {
    throw std::invalid_argument("rectangle arity must be 1 or 2");
  }
  Node node;
  node.arity = arity;
  node.is_measurement = is_measurement;
  node.ga_faults = ga_faults;
  node.ga_size = ga_size;
  nodes.push_back(std::move(node));
  return static_cast<int>(nodes.size()) - 1;
}

int ExRecDag::add_ed(int pred, int succ, int faults, int size) {
  Ed ed;
  ed.pred = pred;
  ed.succ = succ;
  ed.faults = faults;
  ed.size = size;
  const int id = static_cast<int>(eds.size());
  eds.push_back(ed);
  if (pred >= 0) nodes[pred].out_eds.push_back(id);
  if (succ >= 0) nodes[succ].in_eds.push_back(id);
  return id;
}

int ExRecDag::node_fault_total(int node) const {
  const Node& nd = nodes[node];
  int total = nd.ga_faults;
  for (int e : nd.in_eds) total += eds[e].faults;
  for (int e : nd.out_eds) total += eds[e].faults;
  return total;
}

std::vector<int> ExRecDag::reverse_topological() const {
  const int n = static_cast<int>(nodes.size());
  std::vector<int> out_degree(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int e : nodes[i].out_eds) {
      if (eds[e].succ >= 0) ++out_degree[i];
    }
  }
  std::vector<int> order;
  std::queue<int> ready;
  for (int i = 0; i < n; ++i) {
    if (out_degree[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    const int v = ready.front();
    ready.pop();
    order.push_back(v);
    for (int e : nodes[v].in_eds) {
      const int p = eds[e].pred;
      if (p >= 0 && --out_degree[p] == 0) ready.push(p);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw std::invalid_argument("rectangle graph has a cycle");
  }
  return order;
}

const char* carve_label_name(CarveLabel label) {
  switch (label) {
    case CarveLabel::kGood: return "good";
    case CarveLabel::kGoodPrime: return "good_p";
    case CarveLabel::kGoodDoublePrime: return "good_pp";
    case CarveLabel::kGoodTriplePrime: return "good_ppp";
    case CarveLabel::kBad: return "bad";
  }
  return "?";
}

void refine_rear_violations(const ExRecDag& dag,
                            std::vector<CarveLabel>& labels,
                            const std::vector<uint8_t>& violates_only_a) {
  if (labels.size() != dag.nodes.size() ||
      violates_only_a.size() != dag.nodes.size()) {
    throw std::invalid_argument("refinement inputs do not match the graph");
  }
  // Sweep front-to-rear so newly relaxed rectangles do not unlock others.
  auto order = dag.reverse_topological();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    if (labels[v] != CarveLabel::kBad || !violates_only_a[v]) continue;
    bool behind_bad = false;
    for (int e : dag.nodes[v].in_eds) {
      const int pred = dag.eds[e].pred;
      if (pred >= 0 && labels[pred] == CarveLabel::kBad) behind_bad = true;
    }
    if (behind_bad) labels[v] = CarveLabel::kGoodTriplePrime;
  }
}

std::vector<CarveLabel> classify(const ExRecDag& dag) {
  std::vector<CarveLabel> labels(dag.nodes.size(), CarveLabel::kGood);

  for (int v : dag.reverse_topological()) {
    const ExRecDag::Node& node = dag.nodes[v];
    if (!dag.pre_bad(v)) {
      labels[v] = CarveLabel::kGood;
      continue;
    }
    bool all_good_star = true;
    bool all_bad = true;
    bool any_follower = false;
    for (int e : node.out_eds) {
      const int succ = dag.eds[e].succ;
      // Open trailing edges count as good* followers: there is nothing
      // downstream to absorb this rectangle's failure.
      const bool follower_bad =
          succ >= 0 && labels[succ] == CarveLabel::kBad;
      if (succ >= 0) any_follower = true;
      if (follower_bad) {
        all_good_star = false;
      } else {
        all_bad = false;
      }
    }
    if (node.is_measurement || !any_follower || all_good_star) {
      labels[v] = CarveLabel::kBad;
      continue;
    }
    if (all_bad) {
      labels[v] = CarveLabel::kGoodPrime;
      continue;
    }
    int truncated = dag.node_fault_total(v);
    for (int e : node.out_eds) {
      const int succ = dag.eds[e].succ;
      if (succ >= 0 && labels[succ] == CarveLabel::kBad) {
        truncated -= dag.eds[e].faults;
      }
    }
    labels[v] =
        truncated <= 1 ? CarveLabel::kGoodDoublePrime : CarveLabel::kBad;
  }
  return labels;
}

std::vector<CarvedSegment> carve(const ExRecDag& dag,
                                 const std::vector<CarveLabel>& labels) {
  if (labels.size() != dag.nodes.size()) {
    throw std::invalid_argument("labels do not match the graph");
  }
  // Each ED goes to exactly one side. "After the shared ED" (bad -> good*)
  // keeps the ED inside the bad predecessor's segment; every other cut is
  // before the ED, handing it to the successor.
  std::vector<int> owner(dag.eds.size(), -1);
  for (size_t e = 0; e < dag.eds.size(); ++e) {
    const int pred = dag.eds[e].pred;
    const int succ = dag.eds[e].succ;
    const bool pred_bad = pred >= 0 && labels[pred] == CarveLabel::kBad;
    const bool succ_good_star = succ < 0 || is_good_star(labels[succ]);
    if (pred_bad && succ_good_star) {
      owner[e] = pred;
    } else if (succ >= 0) {
      owner[e] = succ;
    } else if (pred >= 0) {
      owner[e] = pred;  // open trailing edge of a good* rectangle
    }
  }
  std::vector<CarvedSegment> segments(dag.nodes.size());
  for (size_t v = 0; v < dag.nodes.size(); ++v) {
    segments[v].node = static_cast<int>(v);
    segments[v].label = labels[v];
    segments[v].fault_count = dag.nodes[v].ga_faults;
  }
  for (size_t e = 0; e < dag.eds.size(); ++e) {
    if (owner[e] < 0) continue;
    segments[owner[e]].eds.push_back(static_cast<int>(e));
    segments[owner[e]].fault_count += dag.eds[e].faults;
  }
  return segments;
}

SealedCluster minimal_sealed_cluster(const ExRecDag& dag,
                                     const std::vector<int>& marked) {
  if (marked.empty()) {
    throw std::invalid_argument("need at least one marked rectangle");
  }
  std::vector<uint8_t> in_cluster(dag.nodes.size(), 0);
  std::vector<uint8_t> is_marked(dag.nodes.size(), 0);
  std::queue<int> frontier;
  for (int v : marked) {
    if (!in_cluster[v]) {
      in_cluster[v] = 1;
      is_marked[v] = 1;
      frontier.push(v);
    }
  }
  auto crossable = [&](int ed, int from) {
    // The marked rectangles' own EDs are assumed interior; beyond them only
    // an ED containing a fault lets the cluster grow.
    return is_marked[from] || dag.eds[ed].faults > 0;
  };
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int pass = 0; pass < 2; ++pass) {
      const auto& eds = pass == 0 ? dag.nodes[v].in_eds : dag.nodes[v].out_eds;
      for (int e : eds) {
        if (!crossable(e, v)) continue;
        const int other = pass == 0 ? dag.eds[e].pred : dag.eds[e].succ;
        if (other >= 0 && !in_cluster[other]) {
          in_cluster[other] = 1;
          frontier.push(other);
        }
      }
    }
  }

  SealedCluster cluster;
  std::vector<uint8_t> ed_interior(dag.eds.size(), 0);
  for (size_t v = 0; v < dag.nodes.size(); ++v) {
    if (!in_cluster[v]) continue;
    cluster.nodes.push_back(static_cast<int>(v));
    cluster.interior_locations += dag.nodes[v].ga_size;
  }
  for (size_t e = 0; e < dag.eds.size(); ++e) {
    const int pred = dag.eds[e].pred;
    const int succ = dag.eds[e].succ;
    const bool p_in = pred >= 0 && in_cluster[pred];
    const bool s_in = succ >= 0 && in_cluster[succ];
    if (p_in && s_in) {
      ed_interior[e] = 1;
      cluster.interior_locations += dag.eds[e].size;
    } else if (s_in) {
      cluster.leading_eds.push_back(static_cast<int>(e));
    } else if (p_in) {
      cluster.trailing_eds.push_back(static_cast<int>(e));
    }
  }
  return cluster;
}

namespace {

int64_t count_recursive(const std::vector<std::vector<int>>& adjacency,
                        std::vector<uint8_t>& in_set,
                        std::vector<uint8_t>& banned,
                        std::vector<int>& extension, int chosen, int target) {
  if (chosen == target) return 1;
  int64_t total = 0;
  // Standard connected-subgraph enumeration: each extension vertex is either
  // taken (and its new neighbours join the extension list) or banned for the
  // rest of this branch, so every subset is produced exactly once.
  std::vector<int> local_banned;
  for (size_t i = 0; i < extension.size(); ++i) {
    const int v = extension[i];
    if (banned[v] || in_set[v]) continue;
    in_set[v] = 1;
    std::vector<int> next_extension(extension.begin() + i + 1,
                                    extension.end());
    for (int w : adjacency[v]) {
      if (!in_set[w] && !banned[w]) next_extension.push_back(w);
    }
    total += count_recursive(adjacency, in_set, banned, next_extension,
                             chosen + 1, target);
    in_set[v] = 0;
    banned[v] = 1;
    local_banned.push_back(v);
  }
  for (int v : local_banned) banned[v] = 0;
  return total;
}

}  // namespace

int64_t count_connected_clusters(const std::vector<std::vector<int>>& adjacency,
                                 int root, int size, int max_size) {
  if (size < 1) throw std::invalid_argument("cluster size must be >= 1");
  if (size > max_size) {
    throw std::invalid_argument(
        "cluster size " + std::to_string(size) +
        " beyond the brute-force cap of " + std::to_string(max_size));
  }
  if (root < 0 || root >= static_cast<int>(adjacency.size())) {
    throw std::out_of_range("root out of range");
  }
  std::vector<uint8_t> in_set(adjacency.size(), 0);
  std::vector<uint8_t> banned(adjacency.size(), 0);
  in_set[root] = 1;
  std::vector<int> extension = adjacency[root];
  return count_recursive(adjacency, in_set, banned, extension, 1, size);
}

int64_t count_connected_clusters_multi(
    const std::vector<std::vector<int>>& adjacency,
    const std::vector<int>& marked, int size, int max_size) {
  if (marked.empty()) throw std::invalid_argument("no marked nodes");
  if (size > max_size) {
    throw std::invalid_argument("cluster size beyond the brute-force cap");
  }
  // Enumerate connected sets containing marked[0], keep those containing all
  // marked nodes. Adequate for the small sizes this is used with.
  struct Counter {
    const std::vector<std::vector<int>>& adj;
    const std::vector<int>& marked;
    int target;
    std::vector<uint8_t> in_set, banned;
    int64_t hits = 0;

    void run(std::vector<int> extension, int chosen) {
      if (chosen == target) {
        for (int m : marked) {
          if (!in_set[m]) return;
        }
        ++hits;
        return;
      }
      std::vector<int> local_banned;
      for (size_t i = 0; i < extension.size(); ++i) {
        const int v = extension[i];
        if (banned[v] || in_set[v]) continue;
        in_set[v] = 1;
        std::vector<int> next(extension.begin() + i + 1, extension.end());
        for (int w : adj[v]) {
          if (!in_set[w] && !banned[w]) next.push_back(w);
        }
        run(std::move(next), chosen + 1);
        in_set[v] = 0;
        banned[v] = 1;
        local_banned.push_back(v);
      }
      for (int v : local_banned) banned[v] = 0;
    }
  };
  Counter counter{adjacency, marked, size,
                  std::vector<uint8_t>(adjacency.size(), 0),
                  std::vector<uint8_t>(adjacency.size(), 0)};
  counter.in_set[marked[0]] = 1;
  counter.run(adjacency[marked[0]], 1);
  return counter.hits;
}

std::string dag_to_dot(const ExRecDag& dag,
                       const std::vector<CarveLabel>& labels) {
  std::string out = "digraph exrecs {\n  rankdir=LR;\n";
  for (size_t v = 0; v < dag.nodes.size(); ++v) {
    const char* color = "white";
    if (v < labels.size()) {
      switch (labels[v]) {
        case CarveLabel::kBad: color = "tomato"; break;
        case CarveLabel::kGoodPrime: color = "gold"; break;
        case CarveLabel::kGoodDoublePrime: color = "khaki"; break;
        case CarveLabel::kGoodTriplePrime: color = "wheat"; break;
        case CarveLabel::kGood: color = "palegreen"; break;
      }
    }
    out += "  n" + std::to_string(v) + " [style=filled,fillcolor=" + color +
           ",label=\"#" + std::to_string(v) + " ga:" +
           std::to_string(dag.nodes[v].ga_faults) + (v < labels.size()
               ? std::string(" ") + carve_label_name(labels[v])
               : std::string()) +
           "\"];\n";
  }
  for (size_t e = 0; e < dag.eds.size(); ++e) {
    if (dag.eds[e].pred < 0 || dag.eds[e].succ < 0) continue;
    out += "  n" + std::to_string(dag.eds[e].pred) + " -> n" +
           std::to_string(dag.eds[e].succ) + " [label=\"" +
           std::to_string(dag.eds[e].faults) + "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string cluster_to_json(const ExRecDag& dag, const SealedCluster& cluster,
                            int indent) {
  nlohmann::json j;
  j["schema"] = "qpt.cluster/1";
  j["nodes"] = cluster.nodes;
  j["leading_eds"] = cluster.leading_eds;
  j["trailing_eds"] = cluster.trailing_eds;
  j["interior_locations"] = cluster.interior_locations;
  j["n_nodes_total"] = dag.nodes.size();
  return j.dump(indent);
}

}  // namespace qpt
