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
//
// Acceptance suite: one line per criterion, every tolerance pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "qpt/carving.hpp"
#include "qpt/gadgets.hpp"
#include "qpt/malignancy.hpp"
#include "qpt/threshold.hpp"

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

using namespace qpt;

// ---------------------------------------------------------------------------
// 1. Malignant-pair counts against the published combinatorial analysis.
//    Exact equality is the target; the convention-ambiguity fallback is
//    counts within 10% plus the threshold band of criterion 3.
bool criterion1(bool threshold_band_ok) {
  const auto t0 = std::chrono::steady_clock::now();
  MalignancyOptions opt;
  const MalignancyReport full =
      ExRecAnalysis(build_gadget("cnot-exrec"), opt.b_model)
          .count_malignant_pairs(opt);
  const MalignancyReport con =
      ExRecAnalysis(build_gadget("cnot-conexrec"), opt.b_model)
          .count_malignant_pairs(opt);
  const int64_t got[4] = {full.malignant_any, full.malignant_strict,
                          con.malignant_any, con.malignant_strict};
  const int64_t want[4] = {1306, 722, 550, 336};
  bool exact = true, within = true;
  for (int i = 0; i < 4; ++i) {
    exact = exact && got[i] == want[i];
    within = within &&
             std::llabs(got[i] - want[i]) <=
                 static_cast<int64_t>(0.10 * static_cast<double>(want[i]));
  }
  const bool pass = exact || (within && threshold_band_ok);
  char detail[256];
  std::snprintf(detail, sizeof detail,
                "pairs %lld/%lld contracted %lld/%lld vs reference "
                "1306/722/550/336 (%s, %.1fs)",
                static_cast<long long>(got[0]), static_cast<long long>(got[1]),
                static_cast<long long>(got[2]), static_cast<long long>(got[3]),
                exact ? "exact" : "within 10% + threshold band",
                seconds_since(t0));
  report(1, pass, detail);
  return pass;
}

// 2. No single fault is malignant, both gauge orderings, plain and
//    contracted enumerations.
bool criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  int64_t total = 0;
  for (const char* name : {"cnot-exrec", "cnot-exrec-pfirst", "cnot-conexrec",
                           "cnot-conexrec-pfirst"}) {
    ExRecAnalysis analysis(build_gadget(name),
                           BInjectionModel::kDecoderSyndromes);
    total += analysis.count_malignant_singles();
  }
  const bool pass = total == 0;
  report(2, pass,
         "malignant singletons across orderings and contractions: " +
             std::to_string(total) + " (" + fmt(seconds_since(t0)) + "s)");
  return pass;
}

// 3. Threshold scan in [0.95e-3, 1.15e-3]; at eps = 1.04e-3 the level
//    sequence decreases strictly with eps^(8) <= 5e-7.
bool criterion3(bool* band_ok_out) {
  const ThresholdScan scan = threshold_scan();
  const bool band = scan.threshold >= 0.95e-3 && scan.threshold <= 1.15e-3;
  *band_ok_out = band;
  const auto states = iterate_levels(1.04e-3, 8);
  bool monotone = states.size() == 9 && !states.back().diverged;
  if (monotone) {
    for (int k = 1; k < 8; ++k) {
      if (!(states[k].eps > states[k + 1].eps)) monotone = false;
    }
  }
  const double eps8 = states.size() == 9 ? states[8].eps : 1.0;
  const bool tail = eps8 <= 5e-7;
  report(3, band && monotone && tail,
         "scan " + fmt(scan.threshold) + " in [0.95e-3, 1.15e-3]; eps^(8) = " +
             fmt(eps8) + " <= 5e-7; strictly decreasing: " +
             (monotone ? "yes" : "no"));
  return band && monotone && tail;
}

// 4. Decoding-error bound and its analytic tail at the operating point.
bool criterion4() {
  const DecodingError de = decoding_error(1.04e-3, 7);
  const bool pass = de.partial <= 3.3e-2 && de.tail_valid &&
                    de.total <= 0.034 && de.gamma_cap <= 560.0;
  report(4, pass,
         "eps_dec^(7) = " + fmt(de.partial) + " <= 3.3e-2; total " +
             fmt(de.total) + " <= 0.034; Gamma = " + fmt(de.gamma_cap) +
             " <= 560");
  return pass;
}

// 5. All-pairs fixed point in [1.2e-4, 1.5e-4], gap to the reference value
//    printed (known-ambiguous, documented rather than tuned).
bool criterion5() {
  const FixedPointResult fp = solve_eps0_allpairs(GadgetMetrics::cnot_uncontracted());
  const bool pass = fp.converged && fp.value >= 1.2e-4 && fp.value <= 1.5e-4;
  report(5, pass,
         "eps0 = " + fmt(fp.value) + " in [1.2e-4, 1.5e-4]; seed 1/A = " +
             fmt(fp.seed) + "; gap to reference 1.410e-4 = " +
             fmt(1.410e-4 - fp.value));
  return pass;
}

// 6. Distillation maps and fixed points.
bool criterion6() {
  const DistillFixedPoints fp = distill_fixed_points();
  const bool h_ok = std::fabs(fp.h - 0.0630) <= 0.0005;
  const bool plus_ok = fp.plus_i == 0.5;
  const bool map1 = std::fabs(distill_plus_i(0.1) - 1.0 / 82.0) <= 1e-12;
  const double x = 0.05;
  const double hx = (35 * x * x * x + 945 * x * x * x * x) / std::pow(1 - x, 15);
  const bool map2 = std::fabs(distill_h(0.05) - hx) <= 1e-12;
  const bool pass = h_ok && plus_ok && map1 && map2;
  report(6, pass,
         "|H> fixed point " + fmt(fp.h) + " = 0.0630 +- 0.0005; |+i> = 1/2; "
         "one-round maps match to 1e-12");
  return pass;
}

// 7. Error-budget chain at eps = 1.04e-3 down to the outer code.
bool criterion7() {
  const Budgets b = anc_and_bell_budgets(1.04e-3, 12);
  const double chain_ref = c2_two_qubit_failure(0.072, 5);
  const double chain_own = c2_two_qubit_failure(b.eps_bell, 5);
  const bool pass = b.eps_anc < 0.038 && b.eps_bell < 0.072 &&
                    chain_ref <= 5.6e-6 &&
                    chain_ref < NoiseParams::kErrorCorrectionThreshold &&
                    chain_own <= 5.6e-6;
  report(7, pass,
         "eps_anc = " + fmt(b.eps_anc) + " < .038; eps' = " + fmt(b.eps_bell) +
             " < .072; two-qubit outer failure " + fmt(chain_ref) +
             " <= 5.6e-6 < 1.9e-4");
  return pass;
}

// 8. Monte Carlo consistency with the adversarial pair/triple bound and the
//    quadratic leading order.
bool criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const Gadget ex = build_gadget("cnot-exrec");
  ExRecAnalysis analysis(ex, BInjectionModel::kDecoderSyndromes);
  const uint64_t samples = 10'000'000;
  const MonteCarloResult at1 =
      analysis.monte_carlo_conditional_failure(1e-3, samples, 20260809);
  const MonteCarloResult at2 =
      analysis.monte_carlo_conditional_failure(2e-3, samples, 20260810);
  const double eps = 1e-3;
  const double bound = (1306 * eps * eps + 225740 * eps * eps * eps) /
                       std::pow(1 - eps, 116);
  const bool ci_ok = !at1.no_acceptance && at1.ci_high <= bound;
  const double ratio = at2.estimate / at1.estimate;
  const bool ratio_ok = ratio >= 3.0 && ratio <= 5.0;
  const bool pass = ci_ok && ratio_ok;
  char detail[256];
  std::snprintf(detail, sizeof detail,
                "upper CI %.4g <= adversarial bound %.4g; estimate(2e)/estimate(e) "
                "= %.2f in [3,5] (%.0fM samples x2, %.1fs)",
                at1.ci_high, bound, ratio, samples / 1e6, seconds_since(t0));
  report(8, pass, detail);
  return pass;
}

// 9. Property suites: propagation linearity, conjugation commutation
//    preservation, carving invariants, cluster-count bounds, adversarial
//    half-point inequality.
bool criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string fail_note;

  {  // 9a. F2-linearity over 1e4 random disjoint fault pairs.
    const Gadget ex = build_gadget("cnot-exrec");
    const Circuit& c = ex.circuit;
    const auto& units = c.fault_units(false);
    std::mt19937_64 rng(20260809);
    for (int trial = 0; trial < 10000; ++trial) {
      const FaultUnit& u1 = units[rng() % units.size()];
      const FaultUnit& u2 = units[rng() % units.size()];
      if (u1.id == u2.id) continue;
      auto random_supported = [&](const FaultUnit& u) {
        PauliOperator p(40);
        while (p.is_identity()) {
          for (int q = 0; q < 40; ++q) {
            if ((u.support >> q) & 1) p.set_pauli(q, "IXYZ"[rng() & 3]);
          }
        }
        return p;
      };
      const PauliOperator p1 = random_supported(u1);
      const PauliOperator p2 = random_supported(u2);
      FaultAssignment both;
      both.add(u1.id, p1);
      both.add(u2.id, p2);
      const PropagationResult joint = c.simulate(both, PauliOperator(40));
      PropagationResult composed = c.propagate_single(u1.id, p1);
      const PropagationResult second = c.propagate_single(u2.id, p2);
      for (size_t i = 0; i < composed.detection_bits.size(); ++i) {
        composed.detection_bits[i] ^= second.detection_bits[i];
      }
      for (size_t i = 0; i < composed.logical_flips.size(); ++i) {
        composed.logical_flips[i] ^= second.logical_flips[i];
      }
      composed.residual *= second.residual;
      if (joint.detection_bits != composed.detection_bits ||
          joint.logical_flips != composed.logical_flips ||
          !(joint.residual == composed.residual)) {
        pass = false;
        fail_note = "linearity";
        break;
      }
    }
  }

  if (pass) {  // 9b. Conjugation preserves commutation.
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10000 && pass; ++trial) {
      PauliOperator p(6), q(6);
      for (int i = 0; i < 6; ++i) {
        p.set_pauli(i, "IXYZ"[rng() & 3]);
        q.set_pauli(i, "IXYZ"[rng() & 3]);
      }
      Gate g;
      if (rng() & 1) {
        g = Gate::hadamard(static_cast<int>(rng() % 6));
      } else {
        int a = static_cast<int>(rng() % 6);
        int b = static_cast<int>(rng() % 6);
        if (a == b) b = (b + 1) % 6;
        g = Gate::cnot(a, b);
      }
      if (p.commutes_with(q) != conjugate_through(p, g).commutes_with(
                                    conjugate_through(q, g))) {
        pass = false;
        fail_note = "conjugation";
      }
    }
  }

  if (pass) {  // 9c. Carving invariants over 1e4 random fault-count graphs.
    std::mt19937_64 rng(20262);
    for (int trial = 0; trial < 10000 && pass; ++trial) {
      ExRecDag dag;
      const int wires = 4 + static_cast<int>(rng() % 3);
      const int layers = 3 + static_cast<int>(rng() % 3);
      std::vector<int> open_ed(wires);
      for (int w = 0; w < wires; ++w) {
        open_ed[w] = dag.add_ed(-1, -1, rng() % 5 == 0 ? 1 : 0);
      }
      for (int layer = 0; layer < layers; ++layer) {
        for (int w = layer % 2; w + 1 < wires; w += 2) {
          const int node = dag.add_node(
              2, false, rng() % 4 == 0 ? static_cast<int>(rng() % 3) : 0);
          for (int leg : {w, w + 1}) {
            dag.eds[open_ed[leg]].succ = node;
            dag.nodes[node].in_eds.push_back(open_ed[leg]);
          }
          for (int leg : {w, w + 1}) {
            open_ed[leg] = dag.add_ed(node, -1, rng() % 5 == 0 ? 1 : 0);
          }
        }
      }
      for (int w = 0; w < wires; ++w) {
        const int m =
            dag.add_node(1, true, rng() % 6 == 0 ? 1 : 0);
        dag.eds[open_ed[w]].succ = m;
        dag.nodes[m].in_eds.push_back(open_ed[w]);
      }
      const auto labels = classify(dag);
      const auto segments = carve(dag, labels);
      std::vector<int> owner(dag.eds.size(), -1);
      for (const CarvedSegment& seg : segments) {
        for (int e : seg.eds) {
          if (owner[e] != -1) {
            pass = false;
            fail_note = "carving overlap";
          }
          owner[e] = seg.node;
        }
        if (seg.label == CarveLabel::kBad && seg.fault_count < 2) {
          pass = false;
          fail_note = "bad segment with <2 faults";
        }
      }
      for (size_t e = 0; e < dag.eds.size() && pass; ++e) {
        if (owner[e] == -1) {
          pass = false;
          fail_note = "orphan detection gadget";
        }
      }
    }
  }

  if (pass) {  // 9d. Cluster-count bound on random degree-<=4 graphs.
    std::mt19937_64 rng(4422);
    for (int trial = 0; trial < 25 && pass; ++trial) {
      const int n = 20;
      std::vector<std::vector<int>> adj(n);
      for (int tries = 0; tries < 5 * n; ++tries) {
        const int a = static_cast<int>(rng() % n);
        const int b = static_cast<int>(rng() % n);
        if (a == b || adj[a].size() >= 4 || adj[b].size() >= 4) continue;
        if (std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end()) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
      int degree = 1;
      for (const auto& nb : adj) degree = std::max<int>(degree, nb.size());
      for (int s = 1; s <= 8 && pass; ++s) {
        const int root = static_cast<int>(rng() % n);
        const double bound = std::pow(2.718281828459045 * degree, s - 1);
        if (static_cast<double>(count_connected_clusters(adj, root, s)) >
            bound + 1e-9) {
          pass = false;
          fail_note = "cluster bound t=1";
        }
        if (s >= 2) {
          const int other = static_cast<int>(rng() % n);
          if (other != root) {
            const double bound2 =
                2.718281828459045 *
                std::pow(2.718281828459045 * degree, s - 2);
            if (static_cast<double>(count_connected_clusters_multi(
                    adj, {root, other}, s)) > bound2 + 1e-9) {
              pass = false;
              fail_note = "cluster bound t=2";
            }
          }
        }
      }
    }
  }

  if (pass) {  // 9e. Adversarial half-point inequality on a 20x4 grid.
    for (int i = 0; i < 20 && pass; ++i) {
      const double eps = 0.001 + i * (0.15 - 0.001) / 19;
      for (int k = 0; k < 4; ++k) {
        const double l0 = std::ldexp(1.0, k) / eps * std::log(1.0 / eps);
        if (adversarial_pfail(eps, l0, k) < 0.5) {
          pass = false;
          fail_note = "half-point inequality";
        }
      }
    }
  }

  report(9, pass,
         pass ? "linearity, conjugation, carving, cluster bounds, half-point "
                "inequality all green (" +
                    fmt(seconds_since(t0)) + "s)"
              : "failed: " + fail_note);
  return pass;
}

}  // namespace

int main() {
  bool band_ok = false;
  criterion3(&band_ok);
  criterion1(band_ok);
  criterion2();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
