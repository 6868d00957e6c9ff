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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "json.hpp"

namespace qpt {

namespace {

int env_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QPT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<int> mask_qubits(uint64_t mask) {
  std::vector<int> qs;
  for (int q = 0; q < 64; ++q) {
    if ((mask >> q) & 1) qs.push_back(q);
  }
  return qs;
}

PauliOperator unit_pauli(int n_qubits, const std::vector<int>& qs, int index) {
  PauliOperator p(n_qubits);
  for (size_t i = 0; i < qs.size(); ++i) {
    p.set_pauli(qs[i], "IXZY"[(index >> (2 * i)) & 3]);
  }
  return p;
}

PauliOperator block_restrict(const PauliOperator& p, int base) {
  PauliOperator out(Code422::kBlockSize);
  for (int i = 0; i < Code422::kBlockSize; ++i) {
    out.set_pauli(i, p.pauli_at(base + i));
  }
  return out;
}

// Logical content a block deviation decodes to once the syndrome
// representative (a Pauli on `rep_qubit`) is divided out. F2-linear for any
// fixed representative choice, which is what lets per-fault contributions
// compose.
std::pair<int, int> conventional_logical(const PauliOperator& block,
                                         int rep_qubit = 0) {
  PauliOperator rep(Code422::kBlockSize);
  if (!block.commutes_with(Code422::stab_z())) {
    rep *= PauliOperator::single(Code422::kBlockSize, rep_qubit, 'X');
  }
  if (!block.commutes_with(Code422::stab_x())) {
    rep *= PauliOperator::single(Code422::kBlockSize, rep_qubit, 'Z');
  }
  const PauliOperator normalized = block * rep;
  const int a = normalized.commutes_with(Code422::logical_z()) ? 0 : 1;
  const int b = normalized.commutes_with(Code422::logical_x()) ? 0 : 1;
  return {a, b};
}

// The 13 weight-<=1 block deviations a good ED can hand over.
std::vector<PauliOperator> weight_one_set() {
  std::vector<PauliOperator> out;
  out.emplace_back(Code422::kBlockSize);
  for (int q = 0; q < Code422::kBlockSize; ++q) {
    for (char letter : {'X', 'Y', 'Z'}) {
      out.push_back(PauliOperator::single(Code422::kBlockSize, q, letter));
    }
  }
  return out;
}

// The ideal *decoder's deviation alphabet for an arbitrary input state:
// a qubit-0 Pauli times an optional gauge flip.
std::vector<PauliOperator> decoder_syndrome_set(GaugeFlavor gauge) {
  std::vector<PauliOperator> out;
  const PauliOperator& flip = gauge_flip_operator(gauge);
  for (int s = 0; s < 2; ++s) {
    for (char letter : {'I', 'X', 'Z', 'Y'}) {
      PauliOperator p =
          letter == 'I'
              ? PauliOperator(Code422::kBlockSize)
              : PauliOperator::single(Code422::kBlockSize, 0, letter);
      if (s) p *= flip;
      out.push_back(p);
    }
  }
  return out;
}

uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr double kWilsonZ = 2.3263478740408408;  // one-sided 99%

}  // namespace

uint32_t ExRecAnalysis::pack(const PropagationResult& r, bool zero_log) const {
  uint32_t w = 0;
  for (size_t i = 0; i < r.detection_bits.size(); ++i) {
    if (r.detection_bits[i]) w |= 1u << i;
  }
  if (!zero_log) {
    for (size_t i = 0; i < r.logical_flips.size(); ++i) {
      if (r.logical_flips[i]) w |= 1u << (16 + i);
    }
  }
  return w;
}

uint32_t ExRecAnalysis::logical_reference_word(
    const PauliOperator& mid_deviation) const {
  uint32_t word = 0;
  for (size_t i = 0; i < gadget_->b_points.size(); ++i) {
    const PauliOperator block =
        block_restrict(mid_deviation, gadget_->b_points[i].block_base);
    const auto [a, b] = conventional_logical(block);
    if (a) word ^= rep_logical_words_[2 * i];
    if (b) word ^= rep_logical_words_[2 * i + 1];
  }
  return word;
}

ExRecAnalysis::ExRecAnalysis(const Gadget& gadget, BInjectionModel model,
                             bool absorb_fault_content)
    : gadget_(&gadget),
      units_(&gadget.circuit.fault_units(gadget.contracted)),
      model_(model) {
  const Circuit& c = gadget.circuit;
  n_checks_ = static_cast<int>(c.checks().size());
  n_logs_ = static_cast<int>(c.trackers().size());
  if (n_checks_ > 12 || n_logs_ > 8) {
    throw std::logic_error("gadget too large for packed analysis");
  }

  // Ideal forwarding of a logical X/Z sitting at each decode point. These
  // are pure-logical words; any detection flip would indicate a miswired
  // gadget.
  rep_logical_words_.assign(2 * gadget.b_points.size(), 0);
  for (size_t i = 0; i < gadget.b_points.size(); ++i) {
    const BInjectPoint& point = gadget.b_points[i];
    const PauliOperator xl =
        Code422::logical_x().embedded(c.n_qubits(), point.block_base);
    const PauliOperator zl =
        Code422::logical_z().embedded(c.n_qubits(), point.block_base);
    rep_logical_words_[2 * i] =
        pack(c.propagate_deviation(point.after_timestep, xl), false);
    rep_logical_words_[2 * i + 1] =
        pack(c.propagate_deviation(point.after_timestep, zl), false);
    if ((rep_logical_words_[2 * i] & 0xFFFFu) ||
        (rep_logical_words_[2 * i + 1] & 0xFFFFu)) {
      throw std::logic_error("logical operator trips a detection check");
    }
  }

  const int cut_timestep =
      gadget.b_points.empty() ? -1 : gadget.b_points[0].after_timestep;

  effects_.resize(units_->size());
  for (size_t u = 0; u < units_->size(); ++u) {
    const FaultUnit& unit = (*units_)[u];
    const std::vector<int> qs = mask_qubits(unit.support);
    const int np = (1 << (2 * qs.size())) - 1;
    const bool zero_log = unit.region.kind == RegionKind::kTrailingEd;
    const bool pre_cut = unit.region.kind == RegionKind::kLeadingEd ||
                         unit.region.kind == RegionKind::kInput ||
                         unit.region.kind == RegionKind::kPrep;
    effects_[u].resize(np + 1);
    for (int k = 1; k <= np; ++k) {
      const PauliOperator fault = unit_pauli(c.n_qubits(), qs, k);
      Effect e;
      e.base = pack(c.propagate_single(unit.id, fault, gadget.contracted),
                    zero_log);
      if (gadget.is_exrec && pre_cut && cut_timestep >= 0 &&
          absorb_fault_content) {
        FaultAssignment fa;
        fa.add(unit.id, fault);
        const PauliOperator mid = c.deviation_after(
            fa, PauliOperator(c.n_qubits()), cut_timestep, gadget.contracted);
        for (size_t bi = 0; bi < gadget.b_points.size(); ++bi) {
          const PauliOperator block =
              block_restrict(mid, gadget.b_points[bi].block_base);
          const auto [a, b] = conventional_logical(block);
          uint32_t corr = 0;
          if (a) corr ^= rep_logical_words_[2 * bi];
          if (b) corr ^= rep_logical_words_[2 * bi + 1];
          e.corr[bi] = corr;
        }
      }
      effects_[u][k] = e;
    }
  }

  // Adversarial input deviations per block, folded with their reference-side
  // logical content so that an injection only contributes discrepancy when
  // the circuit mishandles it.
  injection_sources_.resize(gadget.b_points.size());
  injection_words_.resize(gadget.b_points.size());
  for (size_t b = 0; b < gadget.b_points.size(); ++b) {
    const BInjectPoint& point = gadget.b_points[b];
    std::vector<InjectionSource> sources;
    if (model_ == BInjectionModel::kWeightOneCosets ||
        model_ == BInjectionModel::kUnion) {
      for (const PauliOperator& p : weight_one_set()) {
        sources.push_back({p.embedded(c.n_qubits(), point.block_base), false});
      }
    }
    if (model_ == BInjectionModel::kDecoderSyndromes ||
        model_ == BInjectionModel::kUnion) {
      if (b < gadget.input_block_bases.size()) {
        for (const PauliOperator& p :
             decoder_syndrome_set(gadget.leading_flavor)) {
          sources.push_back(
              {p.embedded(c.n_qubits(), gadget.input_block_bases[b]), true});
        }
      }
    }
    if (model_ == BInjectionModel::kDecoderSyndromesPost ||
        model_ == BInjectionModel::kUnion) {
      for (const PauliOperator& p : decoder_syndrome_set(point.gauge)) {
        sources.push_back({p.embedded(c.n_qubits(), point.block_base), false});
      }
    }
    std::unordered_set<uint32_t> seen;
    for (const InjectionSource& src : sources) {
      uint32_t w;
      PauliOperator mid(c.n_qubits());
      if (src.pre_ed) {
        w = pack(c.propagate_deviation(-1, src.pauli), false);
        mid = c.deviation_after(FaultAssignment{}, src.pauli, cut_timestep,
                                gadget.contracted);
      } else {
        w = pack(c.propagate_deviation(point.after_timestep, src.pauli), false);
        mid = src.pauli;
      }
      w ^= logical_reference_word(mid);
      if (seen.insert(w).second) {
        injection_words_[b].push_back(w);
        injection_sources_[b].push_back(src);
      }
    }
  }

  build_criteria();
  build_tables();

  // Time-adjacency of units per qubit (for the consecutive-pair audit).
  qubit_timeline_.resize(c.n_qubits());
  std::vector<int> unit_of_location(c.locations().size(), -1);
  for (size_t u = 0; u < units_->size(); ++u) {
    for (int m : (*units_)[u].member_locations) {
      unit_of_location[m] = static_cast<int>(u);
    }
  }
  for (const Location& loc : c.locations()) {
    if (unit_of_location[loc.id] < 0) continue;
    for (int q : loc.gate.qubits) {
      qubit_timeline_[q].emplace_back(loc.timestep, unit_of_location[loc.id]);
    }
  }
  for (auto& line : qubit_timeline_) {
    std::sort(line.begin(), line.end());
  }
}

int ExRecAnalysis::pauli_count(int unit_index) const {
  return static_cast<int>(effects_[unit_index].size()) - 1;
}

uint32_t ExRecAnalysis::effect(int unit_index, int pauli_index) const {
  return effects_[unit_index][pauli_index].base;
}

uint32_t ExRecAnalysis::effect_correction(int unit_index, int pauli_index,
                                          int block) const {
  return effects_[unit_index][pauli_index].corr[block];
}

std::string ExRecAnalysis::pauli_name(int unit_index, int pauli_index) const {
  const FaultUnit& unit = (*units_)[unit_index];
  const std::vector<int> qs = mask_qubits(unit.support);
  std::string out;
  for (size_t i = 0; i < qs.size(); ++i) {
    if (i) out.push_back(',');
    out.push_back("IXZY"[(pauli_index >> (2 * i)) & 3]);
    out += "@q" + std::to_string(qs[i]);
  }
  return out;
}

void ExRecAnalysis::build_criteria() {
  criteria_.clear();
  const int n_inputs = static_cast<int>(gadget_->b_points.size());
  const int n_outputs = static_cast<int>(gadget_->output_block_bases.size());
  if (!gadget_->is_exrec || n_inputs == 0) {
    criteria_.push_back({"A", {InputMode::kA, InputMode::kA}, false, -1});
    return;
  }
  const int mode_combos = 1 << n_inputs;
  for (int m = 0; m < mode_combos; ++m) {
    CorrectnessCriterion crit;
    std::string name;
    for (int i = 0; i < n_inputs; ++i) {
      const bool b = (m >> i) & 1;
      crit.modes[i] = b ? InputMode::kB : InputMode::kA;
      name.push_back(b ? 'B' : 'A');
    }
    crit.name = name;
    criteria_.push_back(crit);
  }
  if (n_outputs == 2) {
    for (int t = 0; t < 2; ++t) {
      for (int m = 0; m < mode_combos; ++m) {
        CorrectnessCriterion crit;
        std::string name = "w";
        for (int i = 0; i < n_inputs; ++i) {
          const bool b = (m >> i) & 1;
          crit.modes[i] = b ? InputMode::kB : InputMode::kA;
          name.push_back(b ? 'B' : 'A');
        }
        crit.weak = true;
        crit.truncated_output = t;
        crit.name = name + "-t" + std::to_string(t);
        criteria_.push_back(crit);
      }
    }
  }
}

void ExRecAnalysis::build_tables() {
  const Circuit& c = gadget_->circuit;
  tables_.clear();
  tables_.resize(criteria_.size());
  for (size_t ci = 0; ci < criteria_.size(); ++ci) {
    const CorrectnessCriterion& crit = criteria_[ci];
    CriterionTables& t = tables_[ci];
    t.strict = !crit.weak;
    for (size_t b = 0; b < gadget_->b_points.size(); ++b) {
      if (crit.modes[b] == InputMode::kB) t.b_set |= 1u << b;
    }
    for (int k = 0; k < n_checks_; ++k) {
      const ParityCheck& check = c.checks()[k];
      if (crit.weak && check.region.kind == RegionKind::kTrailingEd &&
          check.region.index == crit.truncated_output) {
        continue;
      }
      t.det_mask |= 1u << k;
    }
    if (crit.weak) {
      const int keep = 1 - crit.truncated_output;
      t.log_mask = 3u << (2 * keep);
    } else {
      t.log_mask = (1u << n_logs_) - 1;
    }
    t.unit_allowed.assign(units_->size(), 1);
    if (crit.weak) {
      for (size_t u = 0; u < units_->size(); ++u) {
        const RegionTag& r = (*units_)[u].region;
        if (r.kind == RegionKind::kTrailingEd &&
            r.index == crit.truncated_output) {
          t.unit_allowed[u] = 0;
        }
      }
    }
    std::vector<uint32_t> combos = {0};
    for (size_t b = 0; b < injection_words_.size(); ++b) {
      if (crit.modes[b] != InputMode::kB) continue;
      std::vector<uint32_t> next;
      next.reserve(combos.size() * injection_words_[b].size());
      for (uint32_t base : combos) {
        for (uint32_t w : injection_words_[b]) next.push_back(base ^ w);
      }
      combos = std::move(next);
    }
    t.achievable.assign(size_t{1} << n_checks_, 0);
    for (uint32_t u : combos) {
      const uint32_t d = u & t.det_mask;
      const uint32_t l = (u >> 16) & t.log_mask;
      t.achievable[d] |= static_cast<uint16_t>(1u << l);
    }
  }
}

bool ExRecAnalysis::pair_malignant(int unit_a, int pauli_a, int unit_b,
                                   int pauli_b,
                                   const CorrectnessCriterion& criterion) const {
  size_t ci = 0;
  for (; ci < criteria_.size(); ++ci) {
    if (criteria_[ci].name == criterion.name) break;
  }
  if (ci == criteria_.size()) throw std::invalid_argument("unknown criterion");
  const CriterionTables& t = tables_[ci];
  if (!t.unit_allowed[unit_a] || !t.unit_allowed[unit_b]) return false;
  const Effect& ea = effects_[unit_a][pauli_a];
  const Effect& eb = effects_[unit_b][pauli_b];
  uint32_t w = ea.base ^ eb.base;
  if (t.b_set & 1u) w ^= ea.corr[0] ^ eb.corr[0];
  if (t.b_set & 2u) w ^= ea.corr[1] ^ eb.corr[1];
  const uint32_t d = w & t.det_mask;
  const uint32_t l = (w >> 16) & t.log_mask;
  return (t.achievable[d] & ~(1u << l)) != 0;
}

bool ExRecAnalysis::consecutive_pair(int unit_a, int unit_b) const {
  for (const auto& line : qubit_timeline_) {
    for (size_t i = 0; i + 1 < line.size(); ++i) {
      const int ua = line[i].second, ub = line[i + 1].second;
      if ((ua == unit_a && ub == unit_b) || (ua == unit_b && ub == unit_a)) {
        return true;
      }
    }
  }
  return false;
}

bool ExRecAnalysis::benign_under_some_convention(int unit_a, int unit_b) const {
  const Circuit& c = gadget_->circuit;
  const int n_blocks = static_cast<int>(gadget_->b_points.size());
  if (n_blocks == 0) return false;
  const int cut = gadget_->b_points[0].after_timestep;

  auto reference_word = [&](const PauliOperator& mid,
                            const std::array<int, 2>& reps) {
    uint32_t word = 0;
    for (int i = 0; i < n_blocks; ++i) {
      const PauliOperator block =
          block_restrict(mid, gadget_->b_points[i].block_base);
      const auto [a, b] = conventional_logical(block, reps[i]);
      if (a) word ^= rep_logical_words_[2 * i];
      if (b) word ^= rep_logical_words_[2 * i + 1];
    }
    return word;
  };

  // Per-convention effect triples (base word plus per-block reference
  // corrections) for the two units.
  auto effects_for = [&](int u, const std::array<int, 2>& reps) {
    std::vector<Effect> out(pauli_count(u) + 1);
    const FaultUnit& unit = (*units_)[u];
    const std::vector<int> qs = mask_qubits(unit.support);
    const bool zero_log = unit.region.kind == RegionKind::kTrailingEd;
    const bool pre_cut = unit.region.kind == RegionKind::kLeadingEd ||
                         unit.region.kind == RegionKind::kInput ||
                         unit.region.kind == RegionKind::kPrep;
    for (int k = 1; k <= pauli_count(u); ++k) {
      const PauliOperator fault = unit_pauli(c.n_qubits(), qs, k);
      Effect e;
      e.base = pack(c.propagate_single(unit.id, fault, gadget_->contracted),
                    zero_log);
      if (!zero_log && pre_cut) {
        FaultAssignment fa;
        fa.add(unit.id, fault);
        const PauliOperator mid = c.deviation_after(
            fa, PauliOperator(c.n_qubits()), cut, gadget_->contracted);
        for (int bi = 0; bi < n_blocks; ++bi) {
          const PauliOperator block =
              block_restrict(mid, gadget_->b_points[bi].block_base);
          const auto [a, b] = conventional_logical(block, reps[bi]);
          uint32_t corr = 0;
          if (a) corr ^= rep_logical_words_[2 * bi];
          if (b) corr ^= rep_logical_words_[2 * bi + 1];
          e.corr[bi] = corr;
        }
      }
      out[k] = e;
    }
    return out;
  };

  for (int r0 = 0; r0 < Code422::kBlockSize; ++r0) {
    for (int r1 = 0; r1 < Code422::kBlockSize; ++r1) {
      const std::array<int, 2> reps = {r0, r1};
      const std::vector<Effect> eff_a = effects_for(unit_a, reps);
      const std::vector<Effect> eff_b = effects_for(unit_b, reps);
      // Injection words for this representative placement.
      std::vector<std::vector<uint32_t>> inj(n_blocks);
      for (int b = 0; b < n_blocks; ++b) {
        for (char letter : {'I', 'X', 'Z', 'Y'}) {
          for (int s = 0; s < 2; ++s) {
            PauliOperator p =
                letter == 'I'
                    ? PauliOperator(Code422::kBlockSize)
                    : PauliOperator::single(Code422::kBlockSize, reps[b],
                                            letter);
            if (s) p *= gauge_flip_operator(gadget_->leading_flavor);
            const PauliOperator embedded =
                p.embedded(c.n_qubits(), gadget_->input_block_bases[b]);
            uint32_t w = pack(c.propagate_deviation(-1, embedded), false);
            const PauliOperator mid = c.deviation_after(
                FaultAssignment{}, embedded, cut, gadget_->contracted);
            w ^= reference_word(mid, reps);
            inj[b].push_back(w);
          }
        }
      }
      bool any_malignant = false;
      for (size_t ci = 0; ci < criteria_.size() && !any_malignant; ++ci) {
        const CriterionTables& t = tables_[ci];
        if (!t.unit_allowed[unit_a] || !t.unit_allowed[unit_b]) continue;
        std::vector<uint32_t> combos = {0};
        for (int b = 0; b < n_blocks; ++b) {
          if (!(t.b_set & (1u << b))) continue;
          std::vector<uint32_t> next;
          for (uint32_t base : combos) {
            for (uint32_t w : inj[b]) next.push_back(base ^ w);
          }
          combos = std::move(next);
        }
        std::vector<uint16_t> achievable(size_t{1} << n_checks_, 0);
        for (uint32_t u : combos) {
          achievable[u & t.det_mask] |=
              static_cast<uint16_t>(1u << ((u >> 16) & t.log_mask));
        }
        for (int p1 = 1; p1 <= pauli_count(unit_a) && !any_malignant; ++p1) {
          for (int p2 = 1; p2 <= pauli_count(unit_b) && !any_malignant; ++p2) {
            const Effect& ea = eff_a[p1];
            const Effect& eb = eff_b[p2];
            uint32_t w = ea.base ^ eb.base;
            if (t.b_set & 1u) w ^= ea.corr[0] ^ eb.corr[0];
            if (t.b_set & 2u) w ^= ea.corr[1] ^ eb.corr[1];
            const uint32_t d = w & t.det_mask;
            const uint32_t l = (w >> 16) & t.log_mask;
            if (achievable[d] & ~(1u << l)) any_malignant = true;
          }
        }
      }
      if (!any_malignant) return true;
    }
  }
  return false;
}

bool ExRecAnalysis::is_incorrect(const FaultAssignment& faults,
                                 const CorrectnessCriterion& criterion) const {
  size_t ci = 0;
  for (; ci < criteria_.size(); ++ci) {
    if (criteria_[ci].name == criterion.name) break;
  }
  if (ci == criteria_.size()) throw std::invalid_argument("unknown criterion");
  const CriterionTables& t = tables_[ci];
  const Circuit& c = gadget_->circuit;

  for (const auto& [unit_id, pauli] : faults.entries) {
    for (size_t u = 0; u < units_->size(); ++u) {
      if ((*units_)[u].id == unit_id && !t.unit_allowed[u]) return false;
    }
  }

  const PauliOperator nothing(c.n_qubits());
  const PropagationResult all = c.simulate(faults, nothing, gadget_->contracted);
  FaultAssignment upstream;
  for (const auto& [unit_id, pauli] : faults.entries) {
    bool trailing = false;
    for (const FaultUnit& fu : *units_) {
      if (fu.id == unit_id) {
        trailing = fu.region.kind == RegionKind::kTrailingEd;
      }
    }
    if (!trailing) upstream.add(unit_id, pauli);
  }
  const PropagationResult up = c.simulate(upstream, nothing, gadget_->contracted);
  uint32_t w = (pack(all, true) & 0xFFFFu) | (pack(up, false) & 0xFFFF0000u);

  if (t.b_set && !gadget_->b_points.empty()) {
    const int cut = gadget_->b_points[0].after_timestep;
    const PauliOperator mid =
        c.deviation_after(upstream, nothing, cut, gadget_->contracted);
    for (size_t bi = 0; bi < gadget_->b_points.size(); ++bi) {
      if (!(t.b_set & (1u << bi))) continue;
      const PauliOperator block =
          block_restrict(mid, gadget_->b_points[bi].block_base);
      const auto [a, b] = conventional_logical(block);
      if (a) w ^= rep_logical_words_[2 * bi];
      if (b) w ^= rep_logical_words_[2 * bi + 1];
    }
  }

  std::vector<uint32_t> combos = {0};
  for (size_t b = 0; b < injection_words_.size(); ++b) {
    if (criterion.modes[b] != InputMode::kB) continue;
    std::vector<uint32_t> next;
    for (uint32_t base : combos) {
      for (uint32_t iw : injection_words_[b]) next.push_back(base ^ iw);
    }
    combos = std::move(next);
  }
  for (uint32_t u : combos) {
    const uint32_t total = w ^ u;
    if ((total & t.det_mask) != 0) continue;
    if (((total >> 16) & t.log_mask) != 0) return true;
  }
  return false;
}

MalignancyReport ExRecAnalysis::count_malignant_pairs(
    const MalignancyOptions& options) const {
  const auto t_start = std::chrono::steady_clock::now();
  const int n = unit_count();
  const int64_t n_pairs = static_cast<int64_t>(n) * (n - 1) / 2;
  const size_t n_crit = criteria_.size();
  uint32_t strict_mask = 0;
  for (size_t ci = 0; ci < n_crit; ++ci) {
    if (tables_[ci].strict) strict_mask |= 1u << ci;
  }

  std::vector<uint32_t> pair_hits(n_pairs, 0);
  std::vector<std::pair<int64_t, PairWitness>> witnesses_raw;
  std::mutex witness_mutex;

  auto pair_index = [n](int i, int j) {
    return static_cast<int64_t>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
  };

  const int threads = env_threads(options.threads);
  std::vector<std::thread> pool;
  std::atomic<int> next_row{0};
  auto worker = [&]() {
    std::vector<std::pair<int64_t, PairWitness>> local_witnesses;
    for (;;) {
      const int i = next_row.fetch_add(1);
      if (i >= n - 1) break;
      const int np1 = pauli_count(i);
      for (int j = i + 1; j < n; ++j) {
        const int np2 = pauli_count(j);
        uint32_t hits = 0;
        uint32_t candidate = 0;
        for (size_t ci = 0; ci < n_crit; ++ci) {
          if (tables_[ci].unit_allowed[i] && tables_[ci].unit_allowed[j]) {
            candidate |= 1u << ci;
          }
        }
        PairWitness witness;
        for (int p1 = 1; p1 <= np1 && hits != candidate; ++p1) {
          const Effect& ea = effects_[i][p1];
          for (int p2 = 1; p2 <= np2 && hits != candidate; ++p2) {
            const Effect& eb = effects_[j][p2];
            const uint32_t base = ea.base ^ eb.base;
            const uint32_t c0 = ea.corr[0] ^ eb.corr[0];
            const uint32_t c1 = ea.corr[1] ^ eb.corr[1];
            const uint32_t variants[4] = {base, base ^ c0, base ^ c1,
                                          base ^ c0 ^ c1};
            for (size_t ci = 0; ci < n_crit; ++ci) {
              const uint32_t bit = 1u << ci;
              if ((hits & bit) || !(candidate & bit)) continue;
              const CriterionTables& t = tables_[ci];
              const uint32_t w = variants[t.b_set];
              const uint32_t d = w & t.det_mask;
              const uint32_t l = (w >> 16) & t.log_mask;
              if (t.achievable[d] & ~(1u << l)) {
                if (hits == 0) {
                  witness = {i, j, pauli_name(i, p1), pauli_name(j, p2),
                             criteria_[ci].name};
                }
                hits |= bit;
              }
            }
          }
        }
        if (hits) {
          pair_hits[pair_index(i, j)] = hits;
          local_witnesses.emplace_back(pair_index(i, j), witness);
        }
      }
    }
    if (!local_witnesses.empty()) {
      std::lock_guard<std::mutex> lock(witness_mutex);
      for (auto& w : local_witnesses) witnesses_raw.push_back(std::move(w));
    }
  };
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  MalignancyReport report;
  report.gadget = gadget_->name;
  report.contracted = gadget_->contracted;
  report.unit_count = n;
  report.pair_total = n_pairs;

  for (int i = 0; i < n - 1; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int64_t pi = pair_index(i, j);
      if (!pair_hits[pi]) continue;
      if (!consecutive_pair(i, j)) continue;
      ++report.consecutive_flagged;
      const RegionKind ra = (*units_)[i].region.kind;
      const RegionKind rb = (*units_)[j].region.kind;
      const bool gate_trailing =
          (ra == RegionKind::kGate && rb == RegionKind::kTrailingEd) ||
          (rb == RegionKind::kGate && ra == RegionKind::kTrailingEd);
      if (options.absorb_gate_trailing_pairs && gate_trailing) {
        pair_hits[pi] = 0;
        ++report.absorbed_pairs;
      }
    }
  }

  for (size_t ci = 0; ci < n_crit; ++ci) {
    report.per_criterion[criteria_[ci].name] = 0;
  }
  for (int64_t p = 0; p < n_pairs; ++p) {
    const uint32_t hits = pair_hits[p];
    if (!hits) continue;
    ++report.malignant_any;
    if (hits & strict_mask) ++report.malignant_strict;
    for (size_t ci = 0; ci < n_crit; ++ci) {
      if (hits & (1u << ci)) ++report.per_criterion[criteria_[ci].name];
    }
  }
  report.benign = report.pair_total - report.malignant_any;

  std::sort(witnesses_raw.begin(), witnesses_raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [pi, w] : witnesses_raw) {
    if (static_cast<int>(report.witnesses.size()) >= options.witness_cap) break;
    if (pair_hits[pi]) report.witnesses.push_back(w);
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

int64_t ExRecAnalysis::count_malignant_singles() const {
  int64_t bad = 0;
  for (int u = 0; u < unit_count(); ++u) {
    bool flagged = false;
    for (int p = 1; p <= pauli_count(u) && !flagged; ++p) {
      const Effect& e = effects_[u][p];
      const uint32_t variants[4] = {e.base, e.base ^ e.corr[0],
                                    e.base ^ e.corr[1],
                                    e.base ^ e.corr[0] ^ e.corr[1]};
      for (size_t ci = 0; ci < criteria_.size() && !flagged; ++ci) {
        const CriterionTables& t = tables_[ci];
        if (!t.unit_allowed[u]) continue;
        const uint32_t w = variants[t.b_set];
        const uint32_t d = w & t.det_mask;
        const uint32_t l = (w >> 16) & t.log_mask;
        if (t.achievable[d] & ~(1u << l)) flagged = true;
      }
    }
    if (flagged) ++bad;
  }
  return bad;
}

MonteCarloResult ExRecAnalysis::monte_carlo_conditional_failure(
    double eps, uint64_t samples, uint64_t seed, int threads) const {
  if (eps < 0.0 || eps > 0.2) {
    throw std::invalid_argument("monte carlo fault rate must be in [0, 0.2]");
  }
  if (samples == 0) {
    throw std::invalid_argument("monte carlo needs at least one sample");
  }
  MonteCarloResult result;
  result.samples = samples;

  const uint32_t det_mask = (1u << n_checks_) - 1;
  const uint32_t log_mask = (1u << n_logs_) - 1;
  const int n_units = unit_count();

  if (eps == 0.0) {
    result.accepted = samples;
    result.estimate = 0.0;
    result.acceptance_rate = 1.0;
    const double z = kWilsonZ, nn = static_cast<double>(samples);
    const double den = nn + z * z;
    result.ci_low = 0.0;
    result.ci_high = (z * z / 2 + z * std::sqrt(z * z / 4)) / den;
    return result;
  }

  constexpr uint64_t kShards = 512;
  const int n_threads = env_threads(threads);
  std::vector<uint64_t> acc(kShards, 0), fail(kShards, 0);
  const double log1m = std::log1p(-eps);

  std::atomic<uint64_t> next_shard{0};
  auto worker = [&]() {
    for (;;) {
      const uint64_t shard = next_shard.fetch_add(1);
      if (shard >= kShards) break;
      const uint64_t lo = samples * shard / kShards;
      const uint64_t hi = samples * (shard + 1) / kShards;
      const uint64_t n_local = hi - lo;
      if (n_local == 0) continue;
      uint64_t state = seed ^ (0x5851F42D4C957F2Dull * (shard + 1));
      splitmix64(state);

      const double total_positions =
          static_cast<double>(n_local) * static_cast<double>(n_units);
      double pos = -1.0;
      uint64_t accepted = 0, failures = 0, touched = 0;
      int64_t cur_sample = -1;
      uint32_t w = 0;
      auto finish_sample = [&]() {
        if (cur_sample < 0) return;
        ++touched;
        if ((w & det_mask) == 0) {
          ++accepted;
          if ((w >> 16) & log_mask) ++failures;
        }
      };
      for (;;) {
        const double u01 =
            (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1.0p-53;
        pos += 1.0 + std::floor(std::log(u01) / log1m);
        if (pos >= total_positions) break;
        const uint64_t ipos = static_cast<uint64_t>(pos);
        const int64_t sample = static_cast<int64_t>(ipos / n_units);
        const int unit = static_cast<int>(ipos % n_units);
        if (sample != cur_sample) {
          finish_sample();
          cur_sample = sample;
          w = 0;
        }
        const int np = pauli_count(unit);
        const int idx = 1 + static_cast<int>(splitmix64(state) % np);
        w ^= effects_[unit][idx].base;
      }
      finish_sample();
      accepted += n_local - touched;  // untouched samples pass trivially
      acc[shard] = accepted;
      fail[shard] = failures;
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  for (uint64_t s = 0; s < kShards; ++s) {
    result.accepted += acc[s];
    result.failures += fail[s];
  }
  result.acceptance_rate =
      static_cast<double>(result.accepted) / static_cast<double>(samples);
  if (result.accepted == 0) {
    result.no_acceptance = true;
    return result;
  }
  const double nn = static_cast<double>(result.accepted);
  const double k = static_cast<double>(result.failures);
  result.estimate = k / nn;
  const double z = kWilsonZ;
  const double den = nn + z * z;
  const double center = (k + z * z / 2) / den;
  const double half = z * std::sqrt(k * (nn - k) / nn + z * z / 4) / den;
  result.ci_low = std::max(0.0, center - half);
  result.ci_high = std::min(1.0, center + half);
  return result;
}

int64_t ed_single_fault_audit(const Gadget& ed) {
  const Circuit& c = ed.circuit;
  if (ed.output_block_bases.size() != 1) {
    throw std::invalid_argument("ed_single_fault_audit expects one output block");
  }
  const int base = ed.output_block_bases[0];
  // A preparation gadget's own logical stabilizer is free: deviations that
  // differ only by it leave the prepared state untouched.
  std::vector<int> good_classes = Code422::one_deviated_classes();
  if (ed.has_prepared_logical) {
    const int shift = Code422::coset_class(ed.prepared_logical);
    const size_t n0 = good_classes.size();
    for (size_t i = 0; i < n0; ++i) {
      const int cls = good_classes[i] ^ shift;
      if (std::find(good_classes.begin(), good_classes.end(), cls) ==
          good_classes.end()) {
        good_classes.push_back(cls);
      }
    }
  }
  int64_t bad = 0;
  for (const FaultUnit& unit : c.fault_units(false)) {
    const std::vector<int> qs = mask_qubits(unit.support);
    const int np = (1 << (2 * qs.size())) - 1;
    for (int k = 1; k <= np; ++k) {
      const PropagationResult r =
          c.propagate_single(unit.id, unit_pauli(c.n_qubits(), qs, k), false);
      if (!r.accepted()) continue;
      const int cls = Code422::coset_class(block_restrict(r.residual, base));
      if (std::find(good_classes.begin(), good_classes.end(), cls) ==
          good_classes.end()) {
        ++bad;
      }
    }
  }
  return bad;
}

int64_t count_triples(int exrec_locations, int block_arity, int ed_locations) {
  auto choose3 = [](int64_t v) {
    return v < 3 ? int64_t{0} : v * (v - 1) * (v - 2) / 6;
  };
  return choose3(exrec_locations) -
         choose3(static_cast<int64_t>(block_arity) * ed_locations);
}

std::string MalignancyReport::to_json(int indent, bool include_runtime) const {
  nlohmann::json j;
  j["schema"] = "qpt.malignancy/1";
  j["gadget"] = gadget;
  j["contracted"] = contracted;
  j["unit_count"] = unit_count;
  j["pair_total"] = pair_total;
  j["malignant_any"] = malignant_any;
  j["malignant_strict"] = malignant_strict;
  j["benign"] = benign;
  j["consecutive_flagged"] = consecutive_flagged;
  j["absorbed_pairs"] = absorbed_pairs;
  nlohmann::json pc;
  for (const auto& [k, v] : per_criterion) pc[k] = v;
  j["per_criterion"] = std::move(pc);
  nlohmann::json ws = nlohmann::json::array();
  for (const PairWitness& w : witnesses) {
    ws.push_back({{"unit_a", w.unit_a},
                  {"unit_b", w.unit_b},
                  {"pauli_a", w.pauli_a},
                  {"pauli_b", w.pauli_b},
                  {"criterion", w.criterion}});
  }
  j["witnesses"] = std::move(ws);
  if (include_runtime) j["runtime_seconds"] = runtime_seconds;
  return j.dump(indent);
}

std::string MalignancyReport::csv_header() {
  return "gadget,contracted,unit_count,pair_total,malignant_any,"
         "malignant_strict,benign,consecutive_flagged,absorbed_pairs";
}

std::string MalignancyReport::csv_row() const {
  return gadget + "," + (contracted ? "1" : "0") + "," +
         std::to_string(unit_count) + "," + std::to_string(pair_total) + "," +
         std::to_string(malignant_any) + "," +
         std::to_string(malignant_strict) + "," + std::to_string(benign) +
         "," + std::to_string(consecutive_flagged) + "," +
         std::to_string(absorbed_pairs);
}

}  // namespace qpt
