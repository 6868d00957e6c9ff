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

#include <cmath>
#include <random>

#include "gtest/gtest.h"

namespace qpt {
namespace {

// Single wire of rectangles: ed0 - n0 - ed1 - n1 - ed2 - ...
struct Chain {
  ExRecDag dag;
  std::vector<int> nodes;
  std::vector<int> eds;
};

Chain make_chain(int length) {
  Chain c;
  for (int i = 0; i < length; ++i) c.nodes.push_back(c.dag.add_node(1));
  c.eds.push_back(c.dag.add_ed(-1, c.nodes[0]));
  for (int i = 0; i + 1 < length; ++i) {
    c.eds.push_back(c.dag.add_ed(c.nodes[i], c.nodes[i + 1]));
  }
  c.eds.push_back(c.dag.add_ed(c.nodes[length - 1], -1));
  return c;
}

TEST(Carving, IsolatedPreBadIsBad) {
  Chain c = make_chain(3);
  c.dag.nodes[1].ga_faults = 2;  // followers are good
  const auto labels = classify(c.dag);
  EXPECT_EQ(labels[1], CarveLabel::kBad);
  EXPECT_EQ(labels[0], CarveLabel::kGood);
  EXPECT_EQ(labels[2], CarveLabel::kGood);
}

TEST(Carving, AllBadFollowersMakeGoodPrime) {
  Chain c = make_chain(3);
  c.dag.nodes[1].ga_faults = 2;
  c.dag.nodes[2].ga_faults = 2;
  const auto labels = classify(c.dag);
  EXPECT_EQ(labels[2], CarveLabel::kBad);
  EXPECT_EQ(labels[1], CarveLabel::kGoodPrime);
}

TEST(Carving, TruncatedCountMakesGoodDoublePrime) {
  // Two-qubit rectangle with both faults in the ED shared with a bad
  // successor; the other successor is good. Truncated count 0 -> good''.
  ExRecDag dag;
  const int a = dag.add_node(2);
  const int bad_succ = dag.add_node(1);
  const int good_succ = dag.add_node(1);
  dag.add_ed(-1, a);
  dag.add_ed(-1, a);
  const int shared_bad = dag.add_ed(a, bad_succ, 2);
  dag.add_ed(a, good_succ, 0);
  dag.add_ed(bad_succ, -1, 1);  // second fault for the successor
  dag.add_ed(good_succ, -1);
  const auto labels = classify(dag);
  EXPECT_EQ(labels[bad_succ], CarveLabel::kBad);
  EXPECT_EQ(labels[good_succ], CarveLabel::kGood);
  EXPECT_EQ(labels[a], CarveLabel::kGoodDoublePrime);
  (void)shared_bad;
}

TEST(Carving, MeasurementRectanglesAlwaysBad) {
  ExRecDag dag;
  const int m = dag.add_node(1, /*is_measurement=*/true);
  dag.add_ed(-1, m, 2);
  const auto labels = classify(dag);
  EXPECT_EQ(labels[m], CarveLabel::kBad);
}

TEST(Carving, FaultFreeHasNoBadSegments) {
  Chain c = make_chain(5);
  const auto labels = classify(c.dag);
  for (const CarvedSegment& seg : carve(c.dag, labels)) {
    EXPECT_NE(seg.label, CarveLabel::kBad);
  }
}

TEST(Carving, OverlappingPreBadPairCarvesOneBadSegment) {
  // Three faults, one in the shared ED: both rectangles are pre-bad but the
  // carving charges only the later one.
  Chain c = make_chain(2);
  c.dag.nodes[0].ga_faults = 1;
  c.dag.eds[1].faults = 1;  // shared between nodes 0 and 1
  c.dag.eds[2].faults = 1;  // trailing ED of node 1
  ASSERT_TRUE(c.dag.pre_bad(0));
  ASSERT_TRUE(c.dag.pre_bad(1));
  const auto labels = classify(c.dag);
  const auto segments = carve(c.dag, labels);
  int bad = 0;
  for (const CarvedSegment& seg : segments) {
    if (seg.label == CarveLabel::kBad) {
      ++bad;
      EXPECT_GE(seg.fault_count, 2);
    }
  }
  EXPECT_EQ(bad, 1);
  EXPECT_EQ(labels[0], CarveLabel::kGoodPrime);
  EXPECT_EQ(labels[1], CarveLabel::kBad);
}

ExRecDag random_dag(std::mt19937_64& rng, int wires, int layers) {
  // Brickwork of alternating two-qubit rectangles ending in measurements.
  ExRecDag dag;
  std::vector<int> open_ed(wires);
  for (int w = 0; w < wires; ++w) {
    open_ed[w] = dag.add_ed(-1, -1, static_cast<int>(rng() % 4) == 0);
  }
  auto rand_faults = [&](int hi) { return static_cast<int>(rng() % hi); };
  for (int layer = 0; layer < layers; ++layer) {
    const int offset = layer % 2;
    for (int w = offset; w + 1 < wires; w += 2) {
      const int node = dag.add_node(2, false, rand_faults(3) == 0 ? rand_faults(3) : 0);
      for (int leg : {w, w + 1}) {
        dag.eds[open_ed[leg]].succ = node;
        dag.nodes[node].in_eds.push_back(open_ed[leg]);
      }
      for (int leg : {w, w + 1}) {
        open_ed[leg] = dag.add_ed(node, -1, rand_faults(4) == 0 ? 1 : 0);
      }
    }
  }
  for (int w = 0; w < wires; ++w) {
    const int m = dag.add_node(1, true, rand_faults(5) == 0 ? 1 : 0);
    dag.eds[open_ed[w]].succ = m;
    dag.nodes[m].in_eds.push_back(open_ed[w]);
  }
  return dag;
}

TEST(Carving, RandomDagInvariants) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 2000; ++trial) {
    ExRecDag dag = random_dag(rng, 4 + static_cast<int>(rng() % 3),
                              3 + static_cast<int>(rng() % 4));
    const auto labels = classify(dag);
    const auto labels2 = classify(dag);
    EXPECT_EQ(labels, labels2);  // pure function of the fault counts
    const auto segments = carve(dag, labels);
    std::vector<int> owner(dag.eds.size(), -1);
    for (const CarvedSegment& seg : segments) {
      for (int e : seg.eds) {
        EXPECT_EQ(owner[e], -1);  // no ED shared between segments
        owner[e] = seg.node;
      }
      if (seg.label == CarveLabel::kBad) {
        EXPECT_GE(seg.fault_count, 2);
      }
      if (seg.label == CarveLabel::kGoodDoublePrime) {
        // Truncated count after excluding EDs shared with bad successors.
        int truncated = dag.nodes[seg.node].ga_faults;
        for (int e : dag.nodes[seg.node].in_eds) truncated += dag.eds[e].faults;
        for (int e : dag.nodes[seg.node].out_eds) {
          const int succ = dag.eds[e].succ;
          if (!(succ >= 0 && labels[succ] == CarveLabel::kBad)) {
            truncated += dag.eds[e].faults;
          }
        }
        EXPECT_LE(truncated, 1);
      }
    }
    for (size_t e = 0; e < dag.eds.size(); ++e) {
      EXPECT_NE(owner[e], -1);  // every ED assigned exactly once
    }
  }
}

TEST(Carving, SealedClusterSmallest) {
  // A marked rectangle with fault-free surroundings seals at its neighbours.
  Chain c = make_chain(5);
  const SealedCluster cluster = minimal_sealed_cluster(c.dag, {2});
  EXPECT_EQ(cluster.nodes.size(), 3u);  // node + both neighbours, r(d+1)=3
  EXPECT_EQ(cluster.leading_eds.size(), 1u);
  EXPECT_EQ(cluster.trailing_eds.size(), 1u);
}

TEST(Carving, SealedClusterGrowsThroughFaultyEds) {
  // ED - Ga - ED(x) - Ga - ED(x) - Ga(x) - ED: the sealed cluster spans all
  // three rectangles, bounded by the outer fault-free EDs.
  Chain c = make_chain(3);
  c.dag.eds[1].faults = 1;
  c.dag.eds[2].faults = 1;
  c.dag.nodes[2].ga_faults = 1;
  const SealedCluster cluster = minimal_sealed_cluster(c.dag, {1});
  EXPECT_EQ(cluster.nodes.size(), 3u);
  EXPECT_EQ(cluster.leading_eds, (std::vector<int>{0}));
  EXPECT_EQ(cluster.trailing_eds, (std::vector<int>{3}));
  // |K| = 3 gates + 2 interior EDs
  EXPECT_EQ(cluster.interior_locations, 3 * 4 + 2 * 28);
}

TEST(Carving, SealedClusterInteriorCount) {
  Chain c = make_chain(3);
  const SealedCluster cluster = minimal_sealed_cluster(c.dag, {1});
  // Marked rectangle plus neighbours; the two EDs next to the marked node
  // are interior by the pessimistic convention.
  EXPECT_EQ(cluster.interior_locations, 3 * 4 + 2 * 28);
}

std::vector<std::vector<int>> regular_tree(int degree, int depth) {
  std::vector<std::vector<int>> adj(1);
  std::vector<int> frontier = {0};
  for (int d = 0; d < depth; ++d) {
    std::vector<int> next;
    for (int v : frontier) {
      const int want = degree - (v == 0 ? 0 : 1);
      for (int c = 0; c < want; ++c) {
        const int u = static_cast<int>(adj.size());
        adj.emplace_back();
        adj[v].push_back(u);
        adj[u].push_back(v);
        next.push_back(u);
      }
    }
    frontier = std::move(next);
  }
  return adj;
}

TEST(Carving, ClusterCountsOnRegularTree) {
  const auto tree = regular_tree(4, 4);
  EXPECT_EQ(count_connected_clusters(tree, 0, 1), 1);
  EXPECT_EQ(count_connected_clusters(tree, 0, 2), 4);        // M_4(2) = d
  EXPECT_EQ(count_connected_clusters(tree, 0, 3), 18);       // C(4,2)+4*3
  // Lemma bound at s=3, d=4: (e d)^2
  EXPECT_LE(static_cast<double>(count_connected_clusters(tree, 0, 3)),
            std::pow(2.718281828 * 4, 2));
}

std::vector<std::vector<int>> random_graph(std::mt19937_64& rng, int n,
                                           int max_degree) {
  std::vector<std::vector<int>> adj(n);
  for (int tries = 0; tries < 4 * n; ++tries) {
    const int a = static_cast<int>(rng() % n);
    const int b = static_cast<int>(rng() % n);
    if (a == b) continue;
    if (static_cast<int>(adj[a].size()) >= max_degree) continue;
    if (static_cast<int>(adj[b].size()) >= max_degree) continue;
    if (std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end()) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

TEST(Carving, ClusterCountBoundOnRandomGraphs) {
  std::mt19937_64 rng(4422);
  for (int trial = 0; trial < 40; ++trial) {
    const auto adj = random_graph(rng, 24, 4);
    int degree = 1;
    for (const auto& nbrs : adj) degree = std::max<int>(degree, nbrs.size());
    for (int s = 1; s <= 8; ++s) {
      const int root = static_cast<int>(rng() % adj.size());
      const int64_t count = count_connected_clusters(adj, root, s);
      EXPECT_LE(static_cast<double>(count),
                std::pow(2.718281828459045 * degree, s - 1) + 1e-9);
      // t = 2: any second marked node
      const int other = static_cast<int>(rng() % adj.size());
      if (other == root || s < 2) continue;
      const int64_t count2 =
          count_connected_clusters_multi(adj, {root, other}, s);
      EXPECT_LE(static_cast<double>(count2),
                2.718281828459045 *
                        std::pow(2.718281828459045 * degree, s - 2) +
                    1e-9);
    }
  }
}

TEST(Carving, ClusterCountRefusesHugeSizes) {
  const auto tree = regular_tree(3, 3);
  EXPECT_THROW(count_connected_clusters(tree, 0, 13), std::invalid_argument);
}

TEST(Carving, RearViolationRefinement) {
  // A bad rectangle directly behind another bad rectangle may be relaxed
  // when its only failure mode is an A-mode violation.
  Chain c = make_chain(3);
  c.dag.nodes[0].ga_faults = 2;
  c.dag.nodes[1].ga_faults = 2;
  auto labels = classify(c.dag);
  ASSERT_EQ(labels[0], CarveLabel::kGoodPrime);
  ASSERT_EQ(labels[1], CarveLabel::kBad);
  // Without a bad predecessor nothing changes.
  std::vector<uint8_t> flags(c.dag.nodes.size(), 1);
  auto relaxed = labels;
  refine_rear_violations(c.dag, relaxed, flags);
  EXPECT_EQ(relaxed[1], CarveLabel::kBad);  // predecessor is good', not bad

  Chain d = make_chain(3);
  d.dag.nodes[0].ga_faults = 2;
  d.dag.nodes[1].ga_faults = 2;
  d.dag.nodes[2].ga_faults = 2;
  auto labels2 = classify(d.dag);
  ASSERT_EQ(labels2[2], CarveLabel::kBad);
  ASSERT_EQ(labels2[1], CarveLabel::kGoodPrime);
  ASSERT_EQ(labels2[0], CarveLabel::kBad);  // its follower is good*
  // A genuine bad->bad chain needs mixed followers on the earlier node so
  // rule 3.ii keeps it bad after truncation.
  ExRecDag e;
  const int n1 = e.add_node(2), n2 = e.add_node(1), n3 = e.add_node(1);
  e.add_ed(-1, n1, 2);  // own faults, not shared with the bad successor
  e.add_ed(-1, n1);
  e.add_ed(n1, n2, 2);  // bad follower
  e.add_ed(n1, n3);     // good follower
  e.add_ed(n2, -1);
  e.add_ed(n3, -1);
  auto labels3 = classify(e);
  ASSERT_EQ(labels3[n2], CarveLabel::kBad);
  ASSERT_EQ(labels3[n3], CarveLabel::kGood);
  ASSERT_EQ(labels3[n1], CarveLabel::kBad);  // truncated count 2 (rule 3.ii)
  std::vector<uint8_t> flags3 = {0, 1, 0};
  refine_rear_violations(e, labels3, flags3);
  EXPECT_EQ(labels3[n2], CarveLabel::kGoodTriplePrime);
  EXPECT_EQ(labels3[n1], CarveLabel::kBad);
  // good''' counts as good* for the placement rules: the shared ED stays
  // with the bad predecessor's segment.
  const auto segments = carve(e, labels3);
  EXPECT_GE(segments[n1].fault_count, 4);
}

TEST(Carving, ArityAboveTwoRejected) {
  ExRecDag dag;
  EXPECT_THROW(dag.add_node(3), std::invalid_argument);
}

TEST(Carving, DotAndJsonDumps) {
  Chain c = make_chain(3);
  c.dag.nodes[1].ga_faults = 2;
  const auto labels = classify(c.dag);
  const std::string dot = dag_to_dot(c.dag, labels);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("bad"), std::string::npos);
  const SealedCluster cluster = minimal_sealed_cluster(c.dag, {1});
  const std::string json = cluster_to_json(c.dag, cluster);
  EXPECT_NE(json.find("interior_locations"), std::string::npos);
}

}  // namespace
}  // namespace qpt
