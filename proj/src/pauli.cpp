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

#include "qpt/pauli.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace qpt {

PauliOperator::PauliOperator(int num_qubits) : n_(num_qubits) {
  if (num_qubits < 0 || num_qubits > 64) {
    throw std::invalid_argument("PauliOperator supports 0..64 qubits, got " +
                                std::to_string(num_qubits));
  }
}

PauliOperator PauliOperator::from_string(std::string_view text) {
  std::string letters;
  letters.reserve(text.size());
  for (char c : text) {
    if (c == '|' || c == ' ') continue;
    letters.push_back(c == '_' ? 'I' : c);
  }
  PauliOperator p(static_cast<int>(letters.size()));
  for (size_t i = 0; i < letters.size(); ++i) {
    p.set_pauli(static_cast<int>(i), letters[i]);
  }
  return p;
}

PauliOperator PauliOperator::single(int num_qubits, int qubit, char pauli) {
  PauliOperator p(num_qubits);
  p.set_pauli(qubit, pauli);
  return p;
}

int PauliOperator::weight() const { return std::popcount(x_ | z_); }

char PauliOperator::pauli_at(int qubit) const {
  const int code = (x_bit(qubit) ? 1 : 0) | (z_bit(qubit) ? 2 : 0);
  return "IXZY"[code];
}

void PauliOperator::set_pauli(int qubit, char pauli) {
  if (qubit < 0 || qubit >= n_) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) +
                            " out of range for " + std::to_string(n_) +
                            " qubits");
  }
  const uint64_t bit = 1ull << qubit;
  x_ &= ~bit;
  z_ &= ~bit;
  switch (pauli) {
    case 'I':
      break;
    case 'X':
      x_ |= bit;
      break;
    case 'Y':
      x_ |= bit;
      z_ |= bit;
      break;
    case 'Z':
      z_ |= bit;
      break;
    default:
      throw std::invalid_argument(std::string("unknown Pauli letter '") +
                                  pauli + "'");
  }
}

void PauliOperator::check_same_size(const PauliOperator& rhs) const {
  if (n_ != rhs.n_) {
    throw std::invalid_argument("Pauli dimension mismatch: " +
                                std::to_string(n_) + " vs " +
                                std::to_string(rhs.n_));
  }
}

PauliOperator& PauliOperator::operator*=(const PauliOperator& rhs) {
  check_same_size(rhs);
  x_ ^= rhs.x_;
  z_ ^= rhs.z_;
  return *this;
}

bool PauliOperator::commutes_with(const PauliOperator& rhs) const {
  check_same_size(rhs);
  const int anti = std::popcount(x_ & rhs.z_) + std::popcount(z_ & rhs.x_);
  return (anti & 1) == 0;
}

PauliOperator PauliOperator::restricted(uint64_t mask) const {
  PauliOperator p(n_);
  p.x_ = x_ & mask;
  p.z_ = z_ & mask;
  return p;
}

PauliOperator PauliOperator::embedded(int num_qubits, int offset) const {
  if (offset < 0 || offset + n_ > num_qubits) {
    throw std::out_of_range("embedded: block does not fit register");
  }
  PauliOperator p(num_qubits);
  p.x_ = x_ << offset;
  p.z_ = z_ << offset;
  return p;
}

std::string PauliOperator::str(int block_size) const {
  std::string out;
  for (int q = 0; q < n_; ++q) {
    if (block_size > 0 && q > 0 && q % block_size == 0) out.push_back('|');
    out.push_back(pauli_at(q));
  }
  return out;
}

Gate Gate::cnot(int control, int target) {
  if (control == target) {
    throw std::invalid_argument("CNOT control and target must differ");
  }
  return {GateType::kCnot, {control, target}};
}

Gate Gate::swap_wiring(std::vector<int> permutation) {
  std::vector<int> sorted = permutation;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != static_cast<int>(i)) {
      throw std::invalid_argument("swap_wiring needs a permutation of 0..n-1");
    }
  }
  return {GateType::kSwapWiring, std::move(permutation)};
}

const char* gate_type_name(GateType type) {
  switch (type) {
    case GateType::kPrepZ: return "prep_z";
    case GateType::kPrepX: return "prep_x";
    case GateType::kHadamard: return "h";
    case GateType::kCnot: return "cnot";
    case GateType::kMeasX: return "meas_x";
    case GateType::kMeasZ: return "meas_z";
    case GateType::kWait: return "wait";
    case GateType::kSwapWiring: return "swap_wiring";
  }
  return "?";
}

PauliOperator conjugate_through(const PauliOperator& p, const Gate& gate) {
  for (int q : gate.qubits) {
    if (q < 0 || q >= p.num_qubits()) {
      throw std::out_of_range("gate qubit out of range");
    }
  }
  PauliOperator out = p;
  switch (gate.type) {
    case GateType::kHadamard: {
      const int q = gate.qubits[0];
      const bool x = out.x_bit(q), z = out.z_bit(q);
      out.set_pauli(q, "IXZY"[(z ? 1 : 0) | (x ? 2 : 0)]);
      break;
    }
    case GateType::kCnot: {
      const int c = gate.qubits[0], t = gate.qubits[1];
      if (out.x_bit(c)) out.set_pauli(t, "IXZY"[(out.x_bit(t) ? 0 : 1) |
                                               (out.z_bit(t) ? 2 : 0)]);
      if (out.z_bit(t)) out.set_pauli(c, "IXZY"[(out.x_bit(c) ? 1 : 0) |
                                               (out.z_bit(c) ? 0 : 2)]);
      break;
    }
    case GateType::kSwapWiring: {
      PauliOperator permuted(p.num_qubits());
      for (int q = 0; q < p.num_qubits(); ++q) {
        permuted.set_pauli(gate.qubits[q], p.pauli_at(q));
      }
      out = permuted;
      break;
    }
    case GateType::kPrepZ:
    case GateType::kPrepX:
    case GateType::kMeasX:
    case GateType::kMeasZ:
    case GateType::kWait:
      break;
  }
  return out;
}

const PauliOperator& Code422::stab_x() {
  static const PauliOperator p = PauliOperator::from_string("XXXX");
  return p;
}
const PauliOperator& Code422::stab_z() {
  static const PauliOperator p = PauliOperator::from_string("ZZZZ");
  return p;
}
const PauliOperator& Code422::logical_x() {
  static const PauliOperator p = PauliOperator::from_string("XXII");
  return p;
}
const PauliOperator& Code422::logical_z() {
  static const PauliOperator p = PauliOperator::from_string("ZIZI");
  return p;
}
const PauliOperator& Code422::gauge_x() {
  static const PauliOperator p = PauliOperator::from_string("XIXI");
  return p;
}
const PauliOperator& Code422::gauge_z() {
  static const PauliOperator p = PauliOperator::from_string("ZZII");
  return p;
}

int Code422::coset_class(const PauliOperator& block_pauli) {
  int cls = 0;
  if (!block_pauli.commutes_with(stab_x())) cls |= 1;
  if (!block_pauli.commutes_with(stab_z())) cls |= 2;
  if (!block_pauli.commutes_with(logical_z())) cls |= 4;
  if (!block_pauli.commutes_with(logical_x())) cls |= 8;
  return cls;
}

const std::vector<int>& Code422::one_deviated_classes() {
  static const std::vector<int>* classes = [] {
    auto* v = new std::vector<int>();
    v->push_back(0);
    for (int q = 0; q < 4; ++q) {
      for (char p : {'X', 'Y', 'Z'}) {
        int cls = coset_class(PauliOperator::single(4, q, p));
        if (std::find(v->begin(), v->end(), cls) == v->end()) v->push_back(cls);
      }
    }
    std::sort(v->begin(), v->end());
    return v;
  }();
  return *classes;
}

}  // namespace qpt
