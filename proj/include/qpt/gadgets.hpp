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

#ifndef QPT_GADGETS_HPP_
#define QPT_GADGETS_HPP_

#include <array>
#include <string>
#include <vector>

#include "qpt/circuit.hpp"

namespace qpt {

// Which state the gauge (spectator) qubit of a block is kept in. Error
// detection alternates: a zero-flavor ED consumes a |0>-gauge block and
// emits a |+>-gauge block, and vice versa.
enum class GaugeFlavor { kZeroGauge, kPlusGauge };

GaugeFlavor other_flavor(GaugeFlavor f);
const char* gauge_flavor_name(GaugeFlavor f);
// ZZII for a |0>-gauge block, XIXI for a |+>-gauge block: the operator whose
// eigenvalue the matching ED can additionally check.
const PauliOperator& gauge_state_operator(GaugeFlavor f);
// The operator that flips the gauge state (X-type for |0>, Z-type for |+>).
const PauliOperator& gauge_flip_operator(GaugeFlavor f);

enum class PrepState {
  kZeroPlus,  // |0>_L |+>_T : Bell pairs (0,2)(1,3)
  kPlusZero,  // |+>_L |0>_T : Bell pairs (0,1)(2,3)
  kZeroZero,  // |0>_L |0>_T : 4-qubit GHZ
  kPlusPlus,  // |+>_L |+>_T : Hadamard dual of the GHZ circuit
};

struct ExRecSpec {
  GaugeFlavor leading = GaugeFlavor::kZeroGauge;
  bool contracted = false;
  std::array<bool, 2> truncate_trailing = {false, false};
};

// Insertion point for adversarial input deviations arriving from a bad
// predecessor: immediately after the leading ED on that input.
struct BInjectPoint {
  int block_base = 0;
  int after_timestep = 0;
  GaugeFlavor gauge = GaugeFlavor::kPlusGauge;
};

struct Gadget {
  std::string name;
  Circuit circuit;
  std::vector<int> input_block_bases;
  std::vector<int> output_block_bases;
  std::vector<BInjectPoint> b_points;
  GaugeFlavor leading_flavor = GaugeFlavor::kZeroGauge;
  GaugeFlavor output_flavor = GaugeFlavor::kPlusGauge;
  bool is_exrec = false;
  bool contracted = false;
  // For preparation gadgets: the logical operator stabilizing the prepared
  // state (Z_L for |0>_L, X_L for |+>_L). Deviations with only this logical
  // content leave the prepared state untouched.
  bool has_prepared_logical = false;
  PauliOperator prepared_logical;

  Gadget() : circuit(0) {}
};

// 28-location teleportation-based error detection gadget (12 qubits: data
// block, measured ancilla block, output ancilla block).
Gadget build_ed(GaugeFlavor flavor);

// Encoded-state preparation circuits.
Gadget build_prep(PrepState state);

// Preparation followed by a fault-free-compatible ED of the given flavor,
// used to exercise the detection of encoder faults.
Gadget build_prep_then_ed(PrepState state, GaugeFlavor ed_flavor);

// The transversal-CNOT extended rectangle: two leading EDs, four CNOTs, two
// trailing EDs (116 locations; 52 contracted; truncation removes 28 each).
Gadget build_cnot_exrec(const ExRecSpec& spec);

// Three-gate decoding circuit for a block whose gauge qubit is in the given
// state. Maps the logical qubit to wire 0.
Gadget build_decoder(GaugeFlavor flavor);

// Teleportation of a physical qubit into a code block: logical Bell pair,
// decoder on the measured half, physical Bell measurement.
Gadget build_teleport_into_block();

// Named registry used by the CLI ("zed", "ped", "cnot-exrec", ...).
std::vector<std::string> gadget_names();
Gadget build_gadget(const std::string& name);

}  // namespace qpt

#endif  // QPT_GADGETS_HPP_
