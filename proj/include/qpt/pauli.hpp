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

#ifndef QPT_PAULI_HPP_
#define QPT_PAULI_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qpt {

/// Phase-free n-qubit Pauli operator in the binary symplectic representation.
///
/// Only the X/Z support bits are stored; global phases are discarded since
/// every parity check and logical frame in the gadgets depends solely on
/// commutation relations. Values are immutable in spirit: all mutating
/// members return the modified value and the type is cheap to copy.
class PauliOperator {
 public:
  PauliOperator() = default;
  explicit PauliOperator(int num_qubits);

  // Parses "IXYZ" left-to-right as qubits 0..n-1. '|' block separators and
  // '_' (identity, as some tableau tools print it) are accepted and ignored.
  static PauliOperator from_string(std::string_view text);
  // Single-qubit Pauli ('I', 'X', 'Y' or 'Z') embedded in an n-qubit register.
  static PauliOperator single(int num_qubits, int qubit, char pauli);

  int num_qubits() const { return n_; }
  bool is_identity() const { return x_ == 0 && z_ == 0; }
  int weight() const;

  bool x_bit(int qubit) const { return (x_ >> qubit) & 1u; }
  bool z_bit(int qubit) const { return (z_ >> qubit) & 1u; }
  char pauli_at(int qubit) const;
  void set_pauli(int qubit, char pauli);

  uint64_t x_mask() const { return x_; }
  uint64_t z_mask() const { return z_; }
  uint64_t support_mask() const { return x_ | z_; }

  // Group product with phases discarded: componentwise XOR.
  PauliOperator& operator*=(const PauliOperator& rhs);
  friend PauliOperator operator*(PauliOperator lhs, const PauliOperator& rhs) {
    lhs *= rhs;
    return lhs;
  }

  // True iff the symplectic form <a,b> = sum_i a.x[i] b.z[i] + a.z[i] b.x[i]
  // vanishes mod 2.
  bool commutes_with(const PauliOperator& rhs) const;

  bool operator==(const PauliOperator& rhs) const = default;

  // Keep only the components on qubits selected by `mask`.
  PauliOperator restricted(uint64_t mask) const;
  // Re-embed into a register of `num_qubits` with supports shifted by `offset`.
  PauliOperator embedded(int num_qubits, int offset) const;

  // "IXYZ..." rendering; a '|' is inserted every `block_size` qubits when
  // block_size > 0.
  std::string str(int block_size = 0) const;

 private:
  int n_ = 0;
  uint64_t x_ = 0;
  uint64_t z_ = 0;

  void check_same_size(const PauliOperator& rhs) const;
};

// ---------------------------------------------------------------------------
// Clifford gates used by the gadgets, acting on Paulis by conjugation.

enum class GateType {
  kPrepZ,
  kPrepX,
  kHadamard,
  kCnot,
  kMeasX,
  kMeasZ,
  kWait,
  kSwapWiring,
};

struct Gate {
  GateType type = GateType::kWait;
  // kCnot: {control, target}. kSwapWiring: image of every wire (a full
  // permutation; never a faultable location). Otherwise a single qubit.
  std::vector<int> qubits;

  static Gate prep_z(int q) { return {GateType::kPrepZ, {q}}; }
  static Gate prep_x(int q) { return {GateType::kPrepX, {q}}; }
  static Gate hadamard(int q) { return {GateType::kHadamard, {q}}; }
  static Gate cnot(int control, int target);
  static Gate meas_x(int q) { return {GateType::kMeasX, {q}}; }
  static Gate meas_z(int q) { return {GateType::kMeasZ, {q}}; }
  static Gate wait(int q) { return {GateType::kWait, {q}}; }
  static Gate swap_wiring(std::vector<int> permutation);

  bool is_measurement() const {
    return type == GateType::kMeasX || type == GateType::kMeasZ;
  }
  bool is_preparation() const {
    return type == GateType::kPrepZ || type == GateType::kPrepX;
  }
};

const char* gate_type_name(GateType type);

// Heisenberg propagation of `p` through one gate: H swaps X and Z on its
// qubit, CNOT copies X control->target and Z target->control, wiring swaps
// permute, waits do nothing. Preparations and measurements leave the operator
// untouched here (the circuit simulator gives them their own semantics).
PauliOperator conjugate_through(const PauliOperator& p, const Gate& gate);

// ---------------------------------------------------------------------------
// The [[4,2,2]] code: stabilizers XXXX/ZZZZ, first logical qubit used for
// data, second kept as a gauge qubit in a known state.

struct Code422 {
  static constexpr int kBlockSize = 4;

  static const PauliOperator& stab_x();   // XXXX
  static const PauliOperator& stab_z();   // ZZZZ
  static const PauliOperator& logical_x();  // XXII
  static const PauliOperator& logical_z();  // ZIZI
  static const PauliOperator& gauge_x();    // XIXI
  static const PauliOperator& gauge_z();    // ZZII

  // 4-bit class of a block Pauli modulo <stabilizers, gauge operators>:
  // bit0: anticommutes with XXXX, bit1: with ZZZZ,
  // bit2: with Z_L (logical X content), bit3: with X_L (logical Z content).
  static int coset_class(const PauliOperator& block_pauli);

  // Classes reachable by weight <= 1 block Paulis (the 1-deviated states).
  static const std::vector<int>& one_deviated_classes();
};

}  // namespace qpt

#endif  // QPT_PAULI_HPP_
