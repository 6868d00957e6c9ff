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

#include "qpt/circuit.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace qpt {

const char* region_kind_name(RegionKind kind) {
  switch (kind) {
    case RegionKind::kInput: return "input";
    case RegionKind::kLeadingEd: return "leading_ed";
    case RegionKind::kGate: return "gate";
    case RegionKind::kTrailingEd: return "trailing_ed";
    case RegionKind::kDecoder: return "decoder";
    case RegionKind::kDecodeMeas: return "decode_meas";
    case RegionKind::kBellMeas: return "bell_meas";
    case RegionKind::kPrep: return "prep";
    case RegionKind::kOther: return "other";
  }
  return "?";
}

int Circuit::add_location(int timestep, Gate gate, RegionTag region,
                          bool faultable, int contracted_group) {
  if (finalized_) throw std::logic_error("circuit already finalized");
  for (int q : gate.qubits) {
    if (q < 0 || q >= n_qubits_) {
      throw std::out_of_range("location qubit out of range");
    }
  }
  if (gate.type == GateType::kSwapWiring && faultable) {
    throw std::invalid_argument("wiring permutations are not faultable");
  }
  Location loc;
  loc.id = static_cast<int>(locations_.size());
  loc.timestep = timestep;
  loc.gate = std::move(gate);
  loc.faultable = faultable;
  loc.contracted_group = contracted_group;
  loc.region = region;
  locations_.push_back(std::move(loc));
  max_timestep_ = std::max(max_timestep_, timestep);
  return locations_.back().id;
}

int Circuit::add_check(std::string name, PauliOperator detector,
                       int after_timestep, CheckRole role, RegionTag region) {
  ParityCheck c;
  c.id = static_cast<int>(checks_.size());
  c.name = std::move(name);
  c.detector = std::move(detector);
  c.defined_after_timestep = after_timestep;
  c.role = role;
  c.region = region;
  checks_.push_back(std::move(c));
  return checks_.back().id;
}

int Circuit::add_frame(std::string name, PauliOperator frame_operator,
                       int defined_after_timestep, PauliOperator inject,
                       int fire_after_timestep, RegionTag region) {
  FrameRule f;
  f.id = static_cast<int>(frames_.size());
  f.name = std::move(name);
  f.frame_operator = std::move(frame_operator);
  f.defined_after_timestep = defined_after_timestep;
  f.inject = std::move(inject);
  f.fire_after_timestep = fire_after_timestep;
  f.region = region;
  frames_.push_back(std::move(f));
  return frames_.back().id;
}

void Circuit::add_tracker(std::string name, PauliOperator op) {
  trackers_.push_back({std::move(name), std::move(op)});
}

void Circuit::add_output_block(std::vector<int> qubits) {
  output_blocks_.push_back(std::move(qubits));
}

void Circuit::add_input_stabilizer(PauliOperator op) {
  input_stabilizers_.push_back(std::move(op));
}

void Circuit::require_finalized() const {
  if (!finalized_) throw std::logic_error("circuit not finalized");
}

void Circuit::finalize() {
  if (finalized_) return;

  // Stable order: gates by (timestep, id), then the frames firing after that
  // timestep.
  std::vector<int> order(locations_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return locations_[a].timestep < locations_[b].timestep;
  });

  // Same-timestep locations must act on disjoint qubits.
  std::map<int, uint64_t> used;
  for (const Location& loc : locations_) {
    if (loc.gate.type == GateType::kSwapWiring) continue;
    uint64_t mask = 0;
    for (int q : loc.gate.qubits) mask |= 1ull << q;
    uint64_t& slot = used[loc.timestep];
    if (slot & mask) {
      throw std::logic_error("overlapping locations in timestep " +
                             std::to_string(loc.timestep));
    }
    slot |= mask;
  }

  steps_.clear();
  slot_of_location_.assign(locations_.size(), -1);
  n_outcomes_ = 0;
  size_t gate_cursor = 0;
  std::vector<int> frame_order(frames_.size());
  for (size_t i = 0; i < frame_order.size(); ++i)
    frame_order[i] = static_cast<int>(i);
  std::stable_sort(frame_order.begin(), frame_order.end(), [&](int a, int b) {
    return frames_[a].fire_after_timestep < frames_[b].fire_after_timestep;
  });
  size_t frame_cursor = 0;

  for (int t = 0; t <= max_timestep_; ++t) {
    while (gate_cursor < order.size() &&
           locations_[order[gate_cursor]].timestep == t) {
      const int loc_id = order[gate_cursor];
      slot_of_location_[loc_id] = static_cast<int>(steps_.size());
      if (locations_[loc_id].gate.is_measurement()) {
        locations_[loc_id].outcome_bit = n_outcomes_++;
      }
      steps_.push_back({Step::kGate, loc_id, t});
      ++gate_cursor;
    }
    while (frame_cursor < frame_order.size() &&
           frames_[frame_order[frame_cursor]].fire_after_timestep == t) {
      steps_.push_back({Step::kFrame, frame_order[frame_cursor], t});
      ++frame_cursor;
    }
  }
  if (gate_cursor != order.size() || frame_cursor != frame_order.size()) {
    throw std::logic_error("negative timestep in circuit");
  }
  finalized_ = true;

  // Derive outcome-bit subsets for checks and frames from their operators.
  for (ParityCheck& c : checks_) {
    PushedOperator pushed = push_to_end(c.detector, c.defined_after_timestep);
    if (!pushed.remainder.is_identity()) {
      throw std::logic_error("check '" + c.name +
                             "' is not fully read out by measurements");
    }
    c.outcome_bits = std::move(pushed.outcome_bits);
  }
  for (FrameRule& f : frames_) {
    PushedOperator pushed =
        push_to_end(f.frame_operator, f.defined_after_timestep);
    if (!pushed.remainder.is_identity()) {
      throw std::logic_error("frame '" + f.name +
                             "' is not fully read out by measurements");
    }
    f.outcome_bits = std::move(pushed.outcome_bits);
  }

  // Fault units: plain (unit id == location id) and contracted.
  units_plain_.clear();
  units_contracted_.clear();
  std::map<int, FaultUnit> groups;
  for (const Location& loc : locations_) {
    if (!loc.faultable) continue;
    uint64_t support = 0;
    for (int q : loc.gate.qubits) support |= 1ull << q;
    FaultUnit u;
    u.id = loc.id;
    u.support = support;
    u.insert_slot = loc.gate.is_measurement() ? slot_of_location_[loc.id]
                                              : slot_of_location_[loc.id] + 1;
    u.region = loc.region;
    u.member_locations = {loc.id};
    units_plain_.push_back(u);

    if (loc.contracted_group >= 0) {
      FaultUnit& g = groups[loc.contracted_group];
      g.support |= support;
      g.region = loc.region;
      g.contracted = true;
      g.member_locations.push_back(loc.id);
    } else {
      FaultUnit c = u;
      units_contracted_.push_back(c);
    }
  }
  // A bundle containing measurements faults before its first member, a
  // preparation bundle after its last member.
  for (auto& [gid, g] : groups) {
    bool has_meas = false;
    int first_slot = static_cast<int>(steps_.size());
    int last_slot = -1;
    for (int m : g.member_locations) {
      if (locations_[m].gate.is_measurement()) has_meas = true;
      first_slot = std::min(first_slot, slot_of_location_[m]);
      last_slot = std::max(last_slot, slot_of_location_[m]);
    }
    g.insert_slot = has_meas ? first_slot : last_slot + 1;
    units_contracted_.push_back(g);
  }
  std::stable_sort(units_contracted_.begin(), units_contracted_.end(),
                   [](const FaultUnit& a, const FaultUnit& b) {
                     return a.member_locations.front() <
                            b.member_locations.front();
                   });
  for (size_t i = 0; i < units_contracted_.size(); ++i) {
    units_contracted_[i].id = static_cast<int>(i);
  }
}

int Circuit::location_count(bool contracted) const {
  require_finalized();
  return static_cast<int>(fault_units(contracted).size());
}

const std::vector<FaultUnit>& Circuit::fault_units(bool contracted) const {
  require_finalized();
  return contracted ? units_contracted_ : units_plain_;
}

int Circuit::slot_after_timestep(int timestep) const {
  require_finalized();
  int slot = 0;
  while (slot < static_cast<int>(steps_.size()) &&
         steps_[slot].timestep <= timestep) {
    ++slot;
  }
  return slot;
}

PropagationResult Circuit::run(
    const std::vector<std::pair<int, PauliOperator>>& faults_by_slot,
    int stop_slot) const {
  require_finalized();
  uint64_t x = 0, z = 0;
  PropagationResult result;
  result.outcome_flips.assign(n_outcomes_, 0);

  size_t cursor = 0;
  const int n_steps =
      stop_slot < 0 ? static_cast<int>(steps_.size())
                    : std::min(stop_slot, static_cast<int>(steps_.size()));
  for (int slot = 0; slot <= n_steps; ++slot) {
    while (cursor < faults_by_slot.size() &&
           faults_by_slot[cursor].first == slot) {
      x ^= faults_by_slot[cursor].second.x_mask();
      z ^= faults_by_slot[cursor].second.z_mask();
      ++cursor;
    }
    if (slot == n_steps) break;
    const Step& step = steps_[slot];
    if (step.kind == Step::kFrame) {
      const FrameRule& f = frames_[step.index];
      uint8_t parity = 0;
      for (int b : f.outcome_bits) parity ^= result.outcome_flips[b];
      if (parity) {
        x ^= f.inject.x_mask();
        z ^= f.inject.z_mask();
      }
      continue;
    }
    const Location& loc = locations_[step.index];
    switch (loc.gate.type) {
      case GateType::kPrepZ:
      case GateType::kPrepX: {
        const uint64_t bit = 1ull << loc.gate.qubits[0];
        x &= ~bit;
        z &= ~bit;
        break;
      }
      case GateType::kHadamard: {
        const uint64_t bit = 1ull << loc.gate.qubits[0];
        const uint64_t xv = x & bit, zv = z & bit;
        x = (x & ~bit) | zv;
        z = (z & ~bit) | xv;
        break;
      }
      case GateType::kCnot: {
        const uint64_t cb = 1ull << loc.gate.qubits[0];
        const uint64_t tb = 1ull << loc.gate.qubits[1];
        if (x & cb) x ^= tb;
        if (z & tb) z ^= cb;
        break;
      }
      case GateType::kMeasX: {
        const uint64_t bit = 1ull << loc.gate.qubits[0];
        if (z & bit) result.outcome_flips[loc.outcome_bit] ^= 1;
        x &= ~bit;
        z &= ~bit;
        break;
      }
      case GateType::kMeasZ: {
        const uint64_t bit = 1ull << loc.gate.qubits[0];
        if (x & bit) result.outcome_flips[loc.outcome_bit] ^= 1;
        x &= ~bit;
        z &= ~bit;
        break;
      }
      case GateType::kWait:
        break;
      case GateType::kSwapWiring: {
        uint64_t nx = 0, nz = 0;
        for (int q = 0; q < n_qubits_; ++q) {
          const int to = loc.gate.qubits[q];
          nx |= ((x >> q) & 1ull) << to;
          nz |= ((z >> q) & 1ull) << to;
        }
        x = nx;
        z = nz;
        break;
      }
    }
  }

  result.residual = PauliOperator(n_qubits_);
  for (int q = 0; q < n_qubits_; ++q) {
    const int code = static_cast<int>((x >> q) & 1) |
                     (static_cast<int>((z >> q) & 1) << 1);
    result.residual.set_pauli(q, "IXZY"[code]);
  }
  result.detection_bits.assign(checks_.size(), 0);
  for (size_t c = 0; c < checks_.size(); ++c) {
    uint8_t parity = 0;
    for (int b : checks_[c].outcome_bits) parity ^= result.outcome_flips[b];
    result.detection_bits[c] = parity;
  }
  result.logical_flips.assign(trackers_.size(), 0);
  for (size_t t = 0; t < trackers_.size(); ++t) {
    result.logical_flips[t] =
        result.residual.commutes_with(trackers_[t].op) ? 0 : 1;
  }
  return result;
}

PropagationResult Circuit::propagate_single(int unit_id,
                                            const PauliOperator& fault,
                                            bool contracted) const {
  const std::vector<FaultUnit>& units = fault_units(contracted);
  const FaultUnit* unit = nullptr;
  if (contracted) {
    if (unit_id >= 0 && unit_id < static_cast<int>(units.size())) {
      unit = &units[unit_id];
    }
  } else {
    for (const FaultUnit& u : units) {
      if (u.id == unit_id) {
        unit = &u;
        break;
      }
    }
    if (unit == nullptr && unit_id >= 0 &&
        unit_id < static_cast<int>(locations_.size())) {
      throw std::invalid_argument("location " + std::to_string(unit_id) +
                                  " is not faultable");
    }
  }
  if (unit == nullptr) {
    throw std::invalid_argument("unknown fault unit " + std::to_string(unit_id));
  }
  if (fault.support_mask() & ~unit->support) {
    throw std::invalid_argument("fault not supported on the location's qubits");
  }
  return run({{unit->insert_slot, fault}});
}

PropagationResult Circuit::propagate_deviation(int after_timestep,
                                               const PauliOperator& dev) const {
  const int slot = after_timestep < 0 ? 0 : slot_after_timestep(after_timestep);
  return run({{slot, dev}});
}

std::vector<std::pair<int, PauliOperator>> Circuit::slot_faults(
    const FaultAssignment& faults, const PauliOperator& input_deviation,
    bool contracted) const {
  const std::vector<FaultUnit>& units = fault_units(contracted);
  std::vector<std::pair<int, PauliOperator>> by_slot;
  if (!input_deviation.is_identity()) {
    by_slot.emplace_back(0, input_deviation);
  }
  for (const auto& [unit_id, pauli] : faults.entries) {
    const FaultUnit* unit = nullptr;
    if (contracted) {
      if (unit_id >= 0 && unit_id < static_cast<int>(units.size())) {
        unit = &units[unit_id];
      }
    } else {
      for (const FaultUnit& u : units) {
        if (u.id == unit_id) {
          unit = &u;
          break;
        }
      }
    }
    if (unit == nullptr) {
      throw std::invalid_argument("unknown fault unit " +
                                  std::to_string(unit_id));
    }
    if (pauli.is_identity()) {
      throw std::invalid_argument("assigned fault must be nontrivial");
    }
    if (pauli.support_mask() & ~unit->support) {
      throw std::invalid_argument(
          "fault not supported on the location's qubits");
    }
    by_slot.emplace_back(unit->insert_slot, pauli);
  }
  std::stable_sort(by_slot.begin(), by_slot.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return by_slot;
}

PropagationResult Circuit::simulate(const FaultAssignment& faults,
                                    const PauliOperator& input_deviation,
                                    bool contracted) const {
  return run(slot_faults(faults, input_deviation, contracted));
}

PauliOperator Circuit::deviation_after(const FaultAssignment& faults,
                                       const PauliOperator& input_deviation,
                                       int after_timestep,
                                       bool contracted) const {
  const int stop = after_timestep < 0 ? 0 : slot_after_timestep(after_timestep);
  return run(slot_faults(faults, input_deviation, contracted), stop).residual;
}

Circuit::PushedOperator Circuit::push_to_end(const PauliOperator& p,
                                             int after_timestep) const {
  require_finalized();
  PushedOperator out;
  PauliOperator cur = p;
  const int start = after_timestep < 0 ? 0 : slot_after_timestep(after_timestep);
  for (int s = start; s < static_cast<int>(steps_.size()); ++s) {
    if (steps_[s].kind == Step::kFrame) continue;
    const Location& loc = locations_[steps_[s].index];
    switch (loc.gate.type) {
      case GateType::kPrepZ:
      case GateType::kPrepX: {
        const int q = loc.gate.qubits[0];
        if (cur.x_bit(q) || cur.z_bit(q)) {
          throw std::logic_error(
              "operator has support on a re-prepared qubit");
        }
        break;
      }
      case GateType::kMeasX:
      case GateType::kMeasZ: {
        const int q = loc.gate.qubits[0];
        const char want = loc.gate.type == GateType::kMeasX ? 'X' : 'Z';
        const char have = cur.pauli_at(q);
        if (have == want) {
          out.outcome_bits.push_back(loc.outcome_bit);
          cur.set_pauli(q, 'I');
        } else if (have != 'I') {
          throw std::logic_error(
              "operator anticommutes with a measurement; not a parity");
        }
        break;
      }
      default:
        cur = conjugate_through(cur, loc.gate);
        break;
    }
  }
  out.remainder = cur;
  return out;
}

std::vector<PauliOperator> Circuit::ideal_output_stabilizers() const {
  require_finalized();
  // Preparation and input stabilizers conjugated through the unitary part.
  std::vector<PauliOperator> gens;
  uint64_t measured = 0;
  for (const PauliOperator& in : input_stabilizers_) {
    PauliOperator g = in;
    for (int s2 = 0; s2 < static_cast<int>(steps_.size()); ++s2) {
      if (steps_[s2].kind == Step::kFrame) continue;
      const Location& loc2 = locations_[steps_[s2].index];
      if (loc2.gate.is_preparation() || loc2.gate.is_measurement()) continue;
      g = conjugate_through(g, loc2.gate);
    }
    gens.push_back(g);
  }
  for (int s = 0; s < static_cast<int>(steps_.size()); ++s) {
    if (steps_[s].kind == Step::kFrame) continue;
    const Location& loc = locations_[steps_[s].index];
    if (!loc.gate.is_preparation()) continue;
    const int q = loc.gate.qubits[0];
    PauliOperator g = PauliOperator::single(
        n_qubits_, q, loc.gate.type == GateType::kPrepZ ? 'Z' : 'X');
    for (int s2 = s + 1; s2 < static_cast<int>(steps_.size()); ++s2) {
      if (steps_[s2].kind == Step::kFrame) continue;
      const Location& loc2 = locations_[steps_[s2].index];
      if (loc2.gate.is_preparation() || loc2.gate.is_measurement()) continue;
      g = conjugate_through(g, loc2.gate);
    }
    gens.push_back(g);
  }
  for (const Location& loc : locations_) {
    if (!loc.gate.is_measurement()) continue;
    const int q = loc.gate.qubits[0];
    measured |= 1ull << q;
    gens.push_back(PauliOperator::single(
        n_qubits_, q, loc.gate.type == GateType::kMeasX ? 'X' : 'Z'));
  }

  // Gaussian elimination over F2 to eliminate measured-qubit support; the
  // combinations with none left stabilize the surviving register.
  struct Row {
    uint64_t x, z;
  };
  std::vector<Row> rows;
  rows.reserve(gens.size());
  for (const PauliOperator& g : gens) rows.push_back({g.x_mask(), g.z_mask()});
  size_t pivot_row = 0;
  for (int q = 0; q < n_qubits_; ++q) {
    if (!((measured >> q) & 1)) continue;
    for (int part = 0; part < 2; ++part) {
      const uint64_t bit = 1ull << q;
      size_t found = pivot_row;
      while (found < rows.size() &&
             !(((part == 0 ? rows[found].x : rows[found].z) & bit))) {
        ++found;
      }
      if (found == rows.size()) continue;
      std::swap(rows[pivot_row], rows[found]);
      for (size_t r = 0; r < rows.size(); ++r) {
        if (r == pivot_row) continue;
        if ((part == 0 ? rows[r].x : rows[r].z) & bit) {
          rows[r].x ^= rows[pivot_row].x;
          rows[r].z ^= rows[pivot_row].z;
        }
      }
      ++pivot_row;
    }
  }
  std::vector<PauliOperator> out;
  for (size_t r = pivot_row; r < rows.size(); ++r) {
    if ((rows[r].x | rows[r].z) == 0) continue;
    if ((rows[r].x | rows[r].z) & measured) continue;
    PauliOperator g(n_qubits_);
    for (int q = 0; q < n_qubits_; ++q) {
      const int code = static_cast<int>((rows[r].x >> q) & 1) |
                       (static_cast<int>((rows[r].z >> q) & 1) << 1);
      g.set_pauli(q, "IXZY"[code]);
    }
    out.push_back(g);
  }
  return out;
}

std::string Circuit::to_json(int indent) const {
  require_finalized();
  nlohmann::json j;
  j["schema"] = "qpt.circuit/1";
  j["name"] = name_;
  j["n_qubits"] = n_qubits_;
  j["location_count"] = location_count(false);
  j["location_count_contracted"] = location_count(true);
  nlohmann::json locs = nlohmann::json::array();
  for (const Location& loc : locations_) {
    nlohmann::json l;
    l["id"] = loc.id;
    l["t"] = loc.timestep;
    l["gate"] = gate_type_name(loc.gate.type);
    l["qubits"] = loc.gate.qubits;
    l["faultable"] = loc.faultable;
    if (loc.contracted_group >= 0) l["group"] = loc.contracted_group;
    l["region"] = std::string(region_kind_name(loc.region.kind)) + ":" +
                  std::to_string(loc.region.index);
    if (loc.outcome_bit >= 0) l["outcome_bit"] = loc.outcome_bit;
    locs.push_back(std::move(l));
  }
  j["locations"] = std::move(locs);
  nlohmann::json checks = nlohmann::json::array();
  for (const ParityCheck& c : checks_) {
    nlohmann::json jc;
    jc["id"] = c.id;
    jc["name"] = c.name;
    jc["operator"] = c.detector.str(Code422::kBlockSize);
    jc["role"] = c.role == CheckRole::kStabilizer  ? "stabilizer"
                 : c.role == CheckRole::kGaugeMatch ? "gauge_match"
                                                    : "decode";
    jc["outcome_bits"] = c.outcome_bits;
    checks.push_back(std::move(jc));
  }
  j["checks"] = std::move(checks);
  nlohmann::json frames = nlohmann::json::array();
  for (const FrameRule& f : frames_) {
    nlohmann::json jf;
    jf["name"] = f.name;
    jf["operator"] = f.frame_operator.str(Code422::kBlockSize);
    jf["outcome_bits"] = f.outcome_bits;
    jf["inject"] = f.inject.str(Code422::kBlockSize);
    frames.push_back(std::move(jf));
  }
  j["frames"] = std::move(frames);
  nlohmann::json trackers = nlohmann::json::array();
  for (const LogicalTracker& t : trackers_) {
    trackers.push_back({{"name", t.name},
                        {"operator", t.op.str(Code422::kBlockSize)}});
  }
  j["trackers"] = std::move(trackers);
  j["output_blocks"] = output_blocks_;
  return j.dump(indent);
}

}  // namespace qpt
