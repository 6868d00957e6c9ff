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

#include "qpt/malignancy.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"

namespace qpt {
namespace {

// Reference pair counts from the published combinatorial analysis. The
// convention-pinned counts this implementation produces sit within a few
// percent; the analysis notes in the README discuss the gap.
constexpr int64_t kReferenceAnyPairs = 1306;
constexpr int64_t kReferenceStrictPairs = 722;
constexpr int64_t kReferenceAnyPairsContracted = 550;
constexpr int64_t kReferenceStrictPairsContracted = 336;

// Regression pins for the default configuration (decoder-syndrome B inputs,
// qubit-0 syndrome convention, gate/trailing absorption on).
constexpr int64_t kPinnedAny = 1307;
constexpr int64_t kPinnedStrict = 670;
constexpr int64_t kPinnedAnyContracted = 548;
constexpr int64_t kPinnedStrictContracted = 312;

MalignancyReport count(const Gadget& g, bool absorb = true) {
  ExRecAnalysis analysis(g, BInjectionModel::kDecoderSyndromes);
  MalignancyOptions opt;
  opt.absorb_gate_trailing_pairs = absorb;
  return analysis.count_malignant_pairs(opt);
}

TEST(Malignancy, PairCountsPinned) {
  const MalignancyReport full = count(build_gadget("cnot-exrec"));
  EXPECT_EQ(full.malignant_any, kPinnedAny);
  EXPECT_EQ(full.malignant_strict, kPinnedStrict);
  EXPECT_EQ(full.pair_total, 6670);

  const MalignancyReport con = count(build_gadget("cnot-conexrec"));
  EXPECT_EQ(con.malignant_any, kPinnedAnyContracted);
  EXPECT_EQ(con.malignant_strict, kPinnedStrictContracted);
  EXPECT_EQ(con.pair_total, 52 * 51 / 2);
}

TEST(Malignancy, PairCountsNearReference) {
  auto within = [](int64_t got, int64_t want) {
    return std::llabs(got - want) <= static_cast<int64_t>(0.10 * want);
  };
  const MalignancyReport full = count(build_gadget("cnot-exrec"));
  EXPECT_TRUE(within(full.malignant_any, kReferenceAnyPairs));
  EXPECT_TRUE(within(full.malignant_strict, kReferenceStrictPairs));
  const MalignancyReport con = count(build_gadget("cnot-conexrec"));
  EXPECT_TRUE(within(con.malignant_any, kReferenceAnyPairsContracted));
  EXPECT_TRUE(within(con.malignant_strict, kReferenceStrictPairsContracted));
}

TEST(Malignancy, GaugeOrderingSymmetry) {
  const MalignancyReport a = count(build_gadget("cnot-exrec"));
  const MalignancyReport b = count(build_gadget("cnot-exrec-pfirst"));
  EXPECT_EQ(a.malignant_any, b.malignant_any);
  EXPECT_EQ(a.malignant_strict, b.malignant_strict);
  const MalignancyReport ca = count(build_gadget("cnot-conexrec"));
  const MalignancyReport cb = count(build_gadget("cnot-conexrec-pfirst"));
  EXPECT_EQ(ca.malignant_any, cb.malignant_any);
  EXPECT_EQ(ca.malignant_strict, cb.malignant_strict);
}

TEST(Malignancy, ContractedCountsAreSmaller) {
  const MalignancyReport full = count(build_gadget("cnot-exrec"));
  const MalignancyReport con = count(build_gadget("cnot-conexrec"));
  EXPECT_LE(con.malignant_any, full.malignant_any);
  EXPECT_LE(con.malignant_strict, full.malignant_strict);
  EXPECT_LE(full.malignant_strict, full.malignant_any);
}

TEST(Malignancy, NoMalignantSingles) {
  for (const char* name :
       {"cnot-exrec", "cnot-exrec-pfirst", "cnot-conexrec",
        "cnot-conexrec-pfirst"}) {
    ExRecAnalysis analysis(build_gadget(name),
                           BInjectionModel::kDecoderSyndromes);
    EXPECT_EQ(analysis.count_malignant_singles(), 0) << name;
  }
}

TEST(Malignancy, EmptyAndSingleFaultsAreCorrect) {
  const Gadget ex = build_gadget("cnot-exrec");
  ExRecAnalysis analysis(ex, BInjectionModel::kDecoderSyndromes);
  for (const CorrectnessCriterion& crit : analysis.criteria()) {
    EXPECT_FALSE(analysis.is_incorrect({}, crit));
  }
  // Sampled single faults under every criterion.
  std::mt19937_64 rng(5);
  const auto& units = ex.circuit.fault_units(false);
  for (int trial = 0; trial < 30; ++trial) {
    const FaultUnit& u = units[rng() % units.size()];
    PauliOperator p(40);
    while (p.is_identity()) {
      for (int q = 0; q < 40; ++q) {
        if ((u.support >> q) & 1) p.set_pauli(q, "IXYZ"[rng() & 3]);
      }
    }
    FaultAssignment fa;
    fa.add(u.id, p);
    for (const CorrectnessCriterion& crit : analysis.criteria()) {
      EXPECT_FALSE(analysis.is_incorrect(fa, crit));
    }
  }
}

TEST(Malignancy, KnownWitnessPair) {
  // One fault on a gate-kernel CNOT plus one fault in the Bell measurement
  // of the trailing ED at a different position masks the detection and
  // leaves an undetected logical error.
  const Gadget ex = build_gadget("cnot-exrec");
  ExRecAnalysis analysis(ex, BInjectionModel::kDecoderSyndromes);
  const auto& units = ex.circuit.fault_units(false);
  int ga0 = -1, trail_bm1 = -1;
  for (const FaultUnit& u : units) {
    if (u.region.kind == RegionKind::kGate && ga0 < 0) ga0 = u.id;
    if (u.region.kind == RegionKind::kTrailingEd && u.region.index == 0) {
      const Location& loc = ex.circuit.locations()[u.member_locations[0]];
      if (loc.gate.type == GateType::kCnot && loc.gate.qubits[0] == 13) {
        trail_bm1 = u.id;
      }
    }
  }
  ASSERT_GE(ga0, 0);
  ASSERT_GE(trail_bm1, 0);
  FaultAssignment fa;
  fa.add(ga0, PauliOperator::single(40, 12, 'X'));
  fa.add(trail_bm1, PauliOperator::single(40, 25, 'X'));
  bool incorrect = false;
  for (const CorrectnessCriterion& crit : analysis.criteria()) {
    if (analysis.is_incorrect(fa, crit)) incorrect = true;
  }
  EXPECT_TRUE(incorrect);
}

TEST(Malignancy, KernelMatchesReferencePath) {
  // The packed-table verdicts must agree with the slow path that runs the
  // full simulation per assignment.
  const Gadget ex = build_gadget("cnot-exrec");
  ExRecAnalysis analysis(ex, BInjectionModel::kDecoderSyndromes);
  const auto& units = ex.circuit.fault_units(false);
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int ia = static_cast<int>(rng() % units.size());
    const int ib = static_cast<int>(rng() % units.size());
    if (ia == ib) continue;
    const int pa = 1 + static_cast<int>(rng() % analysis.pauli_count(ia));
    const int pb = 1 + static_cast<int>(rng() % analysis.pauli_count(ib));
    auto pauli_of = [&](int unit_index, int k) {
      const FaultUnit& u = units[unit_index];
      PauliOperator p(40);
      int slot = 0;
      for (int q = 0; q < 40; ++q) {
        if ((u.support >> q) & 1) {
          p.set_pauli(q, "IXZY"[(k >> (2 * slot)) & 3]);
          ++slot;
        }
      }
      return p;
    };
    FaultAssignment fa;
    fa.add(units[ia].id, pauli_of(ia, pa));
    fa.add(units[ib].id, pauli_of(ib, pb));
    for (const CorrectnessCriterion& crit : analysis.criteria()) {
      const bool slow = analysis.is_incorrect(fa, crit);
      const bool fast =
          analysis.pair_malignant(ia, pa, ib, pb, crit);
      EXPECT_EQ(slow, fast) << crit.name;
      ++checked;
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(Malignancy, ConsecutivePairsAccountedFor) {
  // Raw-flagged consecutive pairs are either gate/trailing pairs (absorbed
  // into an augmented rectangle) or become benign under a relocated
  // syndrome representative.
  const Gadget ex = build_gadget("cnot-exrec");
  ExRecAnalysis analysis(ex, BInjectionModel::kDecoderSyndromes);
  const auto& units = ex.circuit.fault_units(false);
  const int n = static_cast<int>(units.size());
  for (int i = 0; i < n - 1; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!analysis.consecutive_pair(i, j)) continue;
      bool flagged = false;
      for (const CorrectnessCriterion& crit : analysis.criteria()) {
        for (int p1 = 1; p1 <= analysis.pauli_count(i) && !flagged; ++p1) {
          for (int p2 = 1; p2 <= analysis.pauli_count(j) && !flagged; ++p2) {
            if (analysis.pair_malignant(i, p1, j, p2, crit)) flagged = true;
          }
        }
        if (flagged) break;
      }
      if (!flagged) continue;
      const bool gate_trailing =
          (units[i].region.kind == RegionKind::kGate &&
           units[j].region.kind == RegionKind::kTrailingEd) ||
          (units[j].region.kind == RegionKind::kGate &&
           units[i].region.kind == RegionKind::kTrailingEd);
      EXPECT_TRUE(gate_trailing || analysis.benign_under_some_convention(i, j))
          << units[i].id << "," << units[j].id;
    }
  }
}

TEST(Malignancy, CountIndependentOfPartitioning) {
  const Gadget ex = build_gadget("cnot-conexrec");
  ExRecAnalysis analysis(ex, BInjectionModel::kDecoderSyndromes);
  MalignancyOptions one, many;
  one.threads = 1;
  many.threads = 8;
  const MalignancyReport a = analysis.count_malignant_pairs(one);
  const MalignancyReport b = analysis.count_malignant_pairs(many);
  EXPECT_EQ(a.malignant_any, b.malignant_any);
  EXPECT_EQ(a.malignant_strict, b.malignant_strict);
  EXPECT_EQ(a.per_criterion, b.per_criterion);
}

TEST(Malignancy, CountTriples) {
  EXPECT_EQ(count_triples(116, 2, 28), 225740);
  EXPECT_EQ(count_triples(52, 2, 12), 20076);
  EXPECT_EQ(count_triples(3, 2, 0), 1);
}

TEST(Malignancy, MonteCarloZeroRate) {
  const Gadget ex = build_gadget("cnot-exrec");
  ExRecAnalysis analysis(ex, BInjectionModel::kDecoderSyndromes);
  const MonteCarloResult r =
      analysis.monte_carlo_conditional_failure(0.0, 1000, 1);
  EXPECT_EQ(r.estimate, 0.0);
  EXPECT_EQ(r.acceptance_rate, 1.0);
}

TEST(Malignancy, MonteCarloDeterministicAcrossThreads) {
  const Gadget ex = build_gadget("cnot-exrec");
  ExRecAnalysis analysis(ex, BInjectionModel::kDecoderSyndromes);
  const MonteCarloResult a =
      analysis.monte_carlo_conditional_failure(5e-3, 200000, 42, 1);
  const MonteCarloResult b =
      analysis.monte_carlo_conditional_failure(5e-3, 200000, 42, 7);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.failures, b.failures);
  EXPECT_EQ(a.estimate, b.estimate);
  // And a different seed gives a different draw.
  const MonteCarloResult c =
      analysis.monte_carlo_conditional_failure(5e-3, 200000, 43, 7);
  EXPECT_NE(a.failures, c.failures);
}

TEST(Malignancy, MonteCarloMatchesBruteSamplingSmall) {
  // Cross-check the skip-sampled estimator against direct per-location
  // Bernoulli sampling through the full simulator.
  const Gadget zed = build_gadget("zed");
  ExRecAnalysis analysis(zed, BInjectionModel::kDecoderSyndromes);
  const double eps = 0.02;
  const MonteCarloResult fast =
      analysis.monte_carlo_conditional_failure(eps, 200000, 7);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const auto& units = zed.circuit.fault_units(false);
  uint64_t accepted = 0;
  for (int s = 0; s < 200000; ++s) {
    FaultAssignment fa;
    for (const FaultUnit& u : units) {
      if (coin(rng) >= eps) continue;
      PauliOperator p(12);
      while (p.is_identity()) {
        for (int q = 0; q < 12; ++q) {
          if ((u.support >> q) & 1) p.set_pauli(q, "IXYZ"[rng() & 3]);
        }
      }
      fa.add(u.id, p);
    }
    if (zed.circuit.simulate(fa, PauliOperator(12)).accepted()) ++accepted;
  }
  const double brute_rate = static_cast<double>(accepted) / 200000;
  EXPECT_NEAR(fast.acceptance_rate, brute_rate, 0.01);
}

TEST(Malignancy, EdAuditThroughRegistry) {
  EXPECT_EQ(ed_single_fault_audit(build_gadget("zed")), 0);
  EXPECT_EQ(ed_single_fault_audit(build_gadget("ped")), 0);
}

TEST(Malignancy, ReportSerialization) {
  const MalignancyReport r = count(build_gadget("cnot-conexrec"));
  const std::string j = r.to_json();
  EXPECT_NE(j.find("malignant_any"), std::string::npos);
  EXPECT_EQ(j.find("runtime"), std::string::npos);  // deterministic by default
  const std::string csv = r.csv_row();
  EXPECT_NE(csv.find("cnot-conexrec"), std::string::npos);
}

}  // namespace
}  // namespace qpt
