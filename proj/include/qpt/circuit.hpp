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

#ifndef QPT_CIRCUIT_HPP_
#define QPT_CIRCUIT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpt/pauli.hpp"

namespace qpt {

// Where a location sits inside a gadget. Used for region-scoped accounting
// (leading vs trailing error detection, gate kernel, decoders, ...).
enum class RegionKind {
  kInput,       // physical-input preparation (teleport circuits)
  kLeadingEd,   // leading error-detection gadget, index = input block
  kGate,        // the encoded gate being protected
  kTrailingEd,  // trailing error-detection gadget, index = output block
  kDecoder,     // decoding circuit gates
  kDecodeMeas,  // readout of decoded syndrome/gauge qubits
  kBellMeas,    // physical Bell measurement
  kPrep,        // encoded state preparation
  kOther,
};

struct RegionTag {
  RegionKind kind = RegionKind::kOther;
  int index = 0;

  bool operator==(const RegionTag&) const = default;
};

const char* region_kind_name(RegionKind kind);

/// One faultable (or wiring) operation at a definite timestep.
struct Location {
  int id = -1;
  int timestep = 0;
  Gate gate;
  bool faultable = true;
  // Locations sharing a nonnegative group id form one contracted location
  // (Bell preparation or Bell measurement bundles).
  int contracted_group = -1;
  RegionTag region;
  // Index of this measurement's outcome bit, -1 for non-measurements.
  int outcome_bit = -1;
};

enum class CheckRole { kStabilizer, kGaugeMatch, kDecode };

/// A deterministic parity of measurement outcomes. The check is specified by
/// the measured operator at a reference timestep; the outcome-bit subset is
/// derived by conjugating that operator forward to the measurements.
struct ParityCheck {
  int id = -1;
  std::string name;
  PauliOperator detector;    // at `defined_after_timestep` time
  int defined_after_timestep = -1;
  CheckRole role = CheckRole::kStabilizer;
  RegionTag region;
  std::vector<int> outcome_bits;  // derived in Circuit::finalize()
};

/// Teleportation frame bookkeeping: when the designated outcome parity flips
/// relative to the fault-free reference, the tracked Pauli correction changes
/// by `inject`. Propagation applies `inject` to the running deviation at
/// `fire_after_timestep`, which is exactly how a classically tracked frame
/// transforms through the rest of the circuit.
struct FrameRule {
  int id = -1;
  std::string name;
  PauliOperator frame_operator;  // measured operator, at definition time
  int defined_after_timestep = -1;
  PauliOperator inject;
  int fire_after_timestep = 0;
  RegionTag region;
  std::vector<int> outcome_bits;  // derived
};

struct LogicalTracker {
  std::string name;
  PauliOperator op;  // on the final register; flip = residual anticommutes
};

struct FaultAssignment {
  // (fault unit id, Pauli supported on that unit's qubits)
  std::vector<std::pair<int, PauliOperator>> entries;

  void add(int unit, PauliOperator p) { entries.emplace_back(unit, std::move(p)); }
  bool empty() const { return entries.empty(); }
};

struct PropagationResult {
  std::vector<uint8_t> detection_bits;  // one per parity check
  std::vector<uint8_t> logical_flips;   // one per tracker
  PauliOperator residual;               // surviving deviation on live qubits
  std::vector<uint8_t> outcome_flips;   // raw per-measurement flips

  bool accepted() const {
    for (uint8_t b : detection_bits)
      if (b) return false;
    return true;
  }
};

/// A faultable unit: either a single location or a contracted group. The
/// adversary's Pauli acts on `support` at `insert_slot` in the compiled
/// operation stream (after gates and preparations, before measurements; for
/// contracted groups after/before the whole bundle).
struct FaultUnit {
  int id = -1;
  uint64_t support = 0;
  int insert_slot = 0;
  RegionTag region;
  std::vector<int> member_locations;
  bool contracted = false;
};

/// Time-ordered Clifford circuit over <= 64 qubits with parity checks,
/// teleportation frames and logical trackers. Immutable once finalized;
/// propagation is a pure function, safe to fan out across threads.
class Circuit {
 public:
  // --- construction (used by the gadget builders) ---
  explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {}

  int add_location(int timestep, Gate gate, RegionTag region,
                   bool faultable = true, int contracted_group = -1);
  int add_check(std::string name, PauliOperator detector, int after_timestep,
                CheckRole role, RegionTag region);
  int add_frame(std::string name, PauliOperator frame_operator,
                int defined_after_timestep, PauliOperator inject,
                int fire_after_timestep, RegionTag region);
  void add_tracker(std::string name, PauliOperator op);
  void add_output_block(std::vector<int> qubits);
  // Stabilizer of the circuit's (codeword) input state, assumed when deriving
  // the ideal output stabilizer group.
  void add_input_stabilizer(PauliOperator op);
  void set_name(std::string name) { name_ = std::move(name); }

  // Compiles the operation stream, derives check/frame outcome-bit subsets
  // and freezes the circuit. Throws if a check is not a deterministic parity
  // of the measured operators.
  void finalize();

  // --- queries ---
  const std::string& name() const { return name_; }
  int n_qubits() const { return n_qubits_; }
  int n_outcomes() const { return n_outcomes_; }
  int max_timestep() const { return max_timestep_; }
  const std::vector<Location>& locations() const { return locations_; }
  const std::vector<ParityCheck>& checks() const { return checks_; }
  const std::vector<FrameRule>& frames() const { return frames_; }
  const std::vector<LogicalTracker>& trackers() const { return trackers_; }
  const std::vector<std::vector<int>>& output_blocks() const {
    return output_blocks_;
  }

  // Faultable locations; with contracted=true every contracted group counts
  // as one location.
  int location_count(bool contracted) const;
  const std::vector<FaultUnit>& fault_units(bool contracted) const;

  // --- propagation ---
  PropagationResult propagate_single(int unit_id, const PauliOperator& fault,
                                     bool contracted = false) const;
  // Deviation inserted after all gates and frames of `after_timestep`
  // (after_timestep = -1 inserts before everything).
  PropagationResult propagate_deviation(int after_timestep,
                                        const PauliOperator& dev) const;
  PropagationResult simulate(const FaultAssignment& faults,
                             const PauliOperator& input_deviation,
                             bool contracted = false) const;

  // Accumulated deviation right after a given timestep (frames included),
  // for faults inserted at their usual slots plus an optional initial
  // deviation. Used to evaluate gadget contracts at interior cut points.
  PauliOperator deviation_after(const FaultAssignment& faults,
                                const PauliOperator& input_deviation,
                                int after_timestep,
                                bool contracted = false) const;

  // Stream slot after the gates and frame rules of a timestep.
  int slot_after_timestep(int timestep) const;

  // Conjugates `p` (defined after `after_timestep`) through the remaining
  // unitary part of the circuit. Measurement qubits must end up carrying
  // either identity or the measured letter; measured letters are divided out
  // and their outcome bits reported. Used for check derivation and for
  // stabilizer-consistency tests.
  struct PushedOperator {
    PauliOperator remainder;        // support on never-measured qubits
    std::vector<int> outcome_bits;  // measurements that read the operator
  };
  PushedOperator push_to_end(const PauliOperator& p, int after_timestep) const;

  // Stabilizer generators of the fault-free state at the end of the circuit
  // (preparations conjugated forward; measured qubits dropped).
  std::vector<PauliOperator> ideal_output_stabilizers() const;

  std::string to_json(int indent = 2) const;

 private:
  struct Step {
    enum Kind { kGate, kFrame } kind;
    int index;      // location or frame index
    int timestep;
  };

  std::string name_;
  int n_qubits_ = 0;
  int n_outcomes_ = 0;
  int max_timestep_ = 0;
  bool finalized_ = false;
  std::vector<Location> locations_;
  std::vector<ParityCheck> checks_;
  std::vector<FrameRule> frames_;
  std::vector<LogicalTracker> trackers_;
  std::vector<std::vector<int>> output_blocks_;
  std::vector<PauliOperator> input_stabilizers_;

  std::vector<Step> steps_;
  std::vector<FaultUnit> units_plain_;
  std::vector<FaultUnit> units_contracted_;
  std::vector<int> slot_of_location_;  // stream slot *before* each location

  PropagationResult run(
      const std::vector<std::pair<int, PauliOperator>>& faults_by_slot,
      int stop_slot = -1) const;
  std::vector<std::pair<int, PauliOperator>> slot_faults(
      const FaultAssignment& faults, const PauliOperator& input_deviation,
      bool contracted) const;
  void require_finalized() const;
};

}  // namespace qpt

#endif  // QPT_CIRCUIT_HPP_
