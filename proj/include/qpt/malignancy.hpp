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

#ifndef QPT_MALIGNANCY_HPP_
#define QPT_MALIGNANCY_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qpt/gadgets.hpp"

namespace qpt {

enum class InputMode { kA, kB };

// One notion of correctness for the extended rectangle. A-mode inputs are
// clean codewords in front of the leading ED; B-mode inputs additionally
// allow an adversarial deviation injected right after the leading ED. Weak
// criteria drop one trailing ED from scope (it is shared with a following
// bad gadget) and judge only the other output block.
struct CorrectnessCriterion {
  std::string name;
  std::array<InputMode, 2> modes = {InputMode::kA, InputMode::kA};
  bool weak = false;
  int truncated_output = -1;
};

// Family of deviations a bad predecessor may hand to a B-mode input.
//   kWeightOneCosets:      the 13 weight-<=1 Paulis (the 1-deviated states a
//                          good ED can emit), inserted right after the ED.
//   kDecoderSyndromes:     arbitrary input states in front of the leading ED,
//                          enumerated as the ideal *decoder's deviation
//                          alphabet (qubit-0 Pauli times optional gauge flip).
//   kDecoderSyndromesPost: the same alphabet materialized at the decode cut
//                          behind the leading ED.
//   kUnion:                all of the above.
enum class BInjectionModel {
  kWeightOneCosets,
  kDecoderSyndromes,
  kDecoderSyndromesPost,
  kUnion,
};

struct MalignancyOptions {
  BInjectionModel b_model = BInjectionModel::kDecoderSyndromes;
  // Declare pairs of a gate-region location followed immediately by a
  // trailing-ED location on the same qubit benign (the noisy trailing ED is
  // absorbed into the gate and a fresh perfect ED appended behind it).
  bool absorb_gate_trailing_pairs = true;
  int witness_cap = 16;
  int threads = 0;  // 0: QPT_THREADS env var or hardware concurrency
};

struct PairWitness {
  int unit_a = -1;
  int unit_b = -1;
  std::string pauli_a;
  std::string pauli_b;
  std::string criterion;
};

struct MalignancyReport {
  std::string gadget;
  bool contracted = false;
  int unit_count = 0;
  int64_t pair_total = 0;
  int64_t malignant_any = 0;     // any criterion, weak included
  int64_t malignant_strict = 0;  // strict criteria only
  int64_t benign = 0;
  std::map<std::string, int64_t> per_criterion;
  std::vector<PairWitness> witnesses;
  // Pairs on consecutive intersecting locations that the raw criteria flag;
  // those between the gate and a trailing ED may be absorbed (see options).
  int64_t consecutive_flagged = 0;
  int64_t absorbed_pairs = 0;
  double runtime_seconds = 0.0;

  std::string to_json(int indent = 2, bool include_runtime = false) const;
  std::string csv_row() const;
  static std::string csv_header();
};

struct MonteCarloResult {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;  // one-sided 99% Wilson bounds
  double acceptance_rate = 0.0;
  uint64_t samples = 0;
  uint64_t accepted = 0;
  uint64_t failures = 0;
  bool no_acceptance = false;
};

// Precomputed linear fault->effect tables for one gadget. Effects pack the
// detection bits (low 12) and the logical discrepancy bits (from bit 16).
//
// Two reference-side cancellations shape the discrepancy:
//  - faults inside trailing EDs damage the reference rectangle identically,
//    so their logical contribution is dropped (detection flips remain);
//  - under a B-mode input the decode point of the correctness statement sits
//    right after that leading ED, so whatever conventional logical content a
//    leading-ED fault (or the injected deviation itself) carries there is
//    processed by the ideal gate too. Each fault therefore carries per-block
//    correction words, applied exactly in the criteria that use B mode.
class ExRecAnalysis {
 public:
  // `absorb_fault_content`: divide each leading-ED fault's conventional
  // logical content at the decode cut out of its B-mode discrepancy (the
  // reference rectangle decodes the same faulty ED output).
  ExRecAnalysis(const Gadget& gadget, BInjectionModel model,
                bool absorb_fault_content = true);

  const Gadget& gadget() const { return *gadget_; }
  bool contracted() const { return gadget_->contracted; }
  int unit_count() const { return static_cast<int>(units_->size()); }
  int pauli_count(int unit_index) const;
  uint32_t effect(int unit_index, int pauli_index) const;
  uint32_t effect_correction(int unit_index, int pauli_index, int block) const;
  std::string pauli_name(int unit_index, int pauli_index) const;
  const std::vector<CorrectnessCriterion>& criteria() const { return criteria_; }

  // Reference-path evaluator: enumerates the B-mode deviations explicitly
  // through Circuit::simulate / propagate_deviation.
  bool is_incorrect(const FaultAssignment& faults,
                    const CorrectnessCriterion& criterion) const;

  MalignancyReport count_malignant_pairs(const MalignancyOptions& options) const;
  int64_t count_malignant_singles() const;

  MonteCarloResult monte_carlo_conditional_failure(double eps,
                                                   uint64_t samples,
                                                   uint64_t seed,
                                                   int threads = 0) const;

  // Fast single-pair verdicts (used for cross-checks and tests).
  bool pair_malignant(int unit_a, int pauli_a, int unit_b, int pauli_b,
                      const CorrectnessCriterion& criterion) const;

  // True when the two units act on a shared qubit in immediately consecutive
  // steps (no other location on that qubit in between).
  bool consecutive_pair(int unit_a, int unit_b) const;

  // Whether some relocation of the syndrome-representative qubit (one choice
  // per input block) renders the pair benign under every criterion. Encoded
  // bookkeeping is free to place the representative on the qubit a
  // consecutive fault damages, which is how consecutive pairs across the
  // gate boundary are argued benign.
  bool benign_under_some_convention(int unit_a, int unit_b) const;

 private:
  struct Effect {
    uint32_t base = 0;
    uint32_t corr[2] = {0, 0};  // per-block B-mode reference corrections
  };
  struct CriterionTables {
    uint32_t det_mask = 0;
    uint32_t log_mask = 0;
    uint32_t b_set = 0;  // bit i set when input block i is in B mode
    std::vector<uint8_t> unit_allowed;
    std::vector<uint16_t> achievable;  // det pattern -> set of log values
    bool strict = false;
  };

  const Gadget* gadget_;
  const std::vector<FaultUnit>* units_;
  BInjectionModel model_;
  int n_checks_ = 0;
  int n_logs_ = 0;
  std::vector<std::vector<Effect>> effects_;
  std::vector<uint32_t> rep_logical_words_;  // X_L/Z_L forwarding per block
  std::vector<std::vector<uint32_t>> injection_words_;  // per input block
  struct InjectionSource {
    PauliOperator pauli;   // deviation as inserted
    bool pre_ed = false;   // in front of the leading ED vs right after it
  };
  std::vector<std::vector<InjectionSource>> injection_sources_;
  std::vector<CorrectnessCriterion> criteria_;
  std::vector<CriterionTables> tables_;
  std::vector<std::vector<std::pair<int, int>>> qubit_timeline_;

  uint32_t pack(const PropagationResult& r, bool zero_log) const;
  uint32_t logical_reference_word(const PauliOperator& mid_deviation) const;
  void build_criteria();
  void build_tables();
};

// ED-level audit: a single internal fault must never pass all checks while
// leaving the output more than 1-deviated from the code space.
int64_t ed_single_fault_audit(const Gadget& ed);

// Number of 3-subsets of locations excluding those entirely inside the
// trailing EDs: C(exrec,3) - C(m*ed,3).
int64_t count_triples(int exrec_locations, int block_arity, int ed_locations);

}  // namespace qpt

#endif  // QPT_MALIGNANCY_HPP_
