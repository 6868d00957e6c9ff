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

#include "qpt/gadgets.hpp"

#include <stdexcept>

namespace qpt {

GaugeFlavor other_flavor(GaugeFlavor f) {
  return f == GaugeFlavor::kZeroGauge ? GaugeFlavor::kPlusGauge
                                      : GaugeFlavor::kZeroGauge;
}

const char* gauge_flavor_name(GaugeFlavor f) {
  return f == GaugeFlavor::kZeroGauge ? "zero" : "plus";
}

const PauliOperator& gauge_state_operator(GaugeFlavor f) {
  return f == GaugeFlavor::kZeroGauge ? Code422::gauge_z() : Code422::gauge_x();
}

const PauliOperator& gauge_flip_operator(GaugeFlavor f) {
  return f == GaugeFlavor::kZeroGauge ? Code422::gauge_x() : Code422::gauge_z();
}

namespace {

PauliOperator on_block(const PauliOperator& block_op, int n, int base) {
  return block_op.embedded(n, base);
}

// Appends the two-Bell-pair preparation of an encoded block. Pairs and the
// |+> (control) ends follow the state:
//   |0>_L|+>_T = Bell(0,2) Bell(1,3),  |+>_L|0>_T = Bell(0,1) Bell(2,3).
// Each pair is one contracted Bell-preparation bundle.
void append_pair_prep(Circuit& c, PrepState state, int base, int t_prep,
                      RegionTag region, int& next_group) {
  struct Pair {
    int plus, zero;
  };
  std::array<Pair, 2> pairs{};
  if (state == PrepState::kZeroPlus) {
    pairs = {Pair{0, 2}, Pair{1, 3}};
  } else if (state == PrepState::kPlusZero) {
    pairs = {Pair{0, 1}, Pair{2, 3}};
  } else {
    throw std::invalid_argument("append_pair_prep needs a Bell-pair state");
  }
  for (const Pair& p : pairs) {
    const int g = next_group++;
    c.add_location(t_prep, Gate::prep_x(base + p.plus), region, true, g);
    c.add_location(t_prep, Gate::prep_z(base + p.zero), region, true, g);
    c.add_location(t_prep + 1, Gate::cnot(base + p.plus, base + p.zero),
                   region, true, g);
  }
}

// GHZ-style matched-gauge encoders. The CNOT order puts the (1->3), (1->2)
// gates last so that a single late fault produces at worst a logical error
// accompanied by a gauge flip, which the following matching ED detects.
void append_ghz_prep(Circuit& c, PrepState state, int base, int t_prep,
                     RegionTag region) {
  const bool zero = state == PrepState::kZeroZero;
  // kZeroZero: |+> on qubit 1, |0> elsewhere, CNOTs 1->0, 1->3, 1->2.
  // kPlusPlus: Hadamard dual, CNOT directions reversed.
  if (zero) {
    c.add_location(t_prep, Gate::prep_z(base + 0), region);
    c.add_location(t_prep, Gate::prep_x(base + 1), region);
    c.add_location(t_prep, Gate::prep_z(base + 2), region);
    c.add_location(t_prep, Gate::prep_z(base + 3), region);
    c.add_location(t_prep + 1, Gate::cnot(base + 1, base + 0), region);
    c.add_location(t_prep + 2, Gate::cnot(base + 1, base + 3), region);
    c.add_location(t_prep + 3, Gate::cnot(base + 1, base + 2), region);
  } else {
    c.add_location(t_prep, Gate::prep_x(base + 0), region);
    c.add_location(t_prep, Gate::prep_z(base + 1), region);
    c.add_location(t_prep, Gate::prep_x(base + 2), region);
    c.add_location(t_prep, Gate::prep_x(base + 3), region);
    c.add_location(t_prep + 1, Gate::cnot(base + 0, base + 1), region);
    c.add_location(t_prep + 2, Gate::cnot(base + 3, base + 1), region);
    c.add_location(t_prep + 3, Gate::cnot(base + 2, base + 1), region);
  }
}

struct EdHandles {
  int anc1_base = 0;
  int anc2_base = 0;
  int end_timestep = 0;
};

// Appends one error-detection gadget: logical Bell preparation on two fresh
// ancilla blocks, transversal Bell measurement of (data, first ancilla).
// Measurement outcomes feed two stabilizer checks, the matching gauge check
// and the two teleportation frame rules (whose Pauli corrections are injected
// onto the output block so they keep propagating).
EdHandles append_ed(Circuit& c, GaugeFlavor flavor, int data_base,
                    int anc1_base, int anc2_base, int t0, RegionTag region,
                    int& next_group) {
  const int n = c.n_qubits();
  EdHandles h;
  h.anc1_base = anc1_base;
  h.anc2_base = anc2_base;

  if (flavor == GaugeFlavor::kZeroGauge) {
    // zED: measured ancilla block carries |+>_L|0>_T, output block
    // |0>_L|+>_T; the logical Bell pair is created by CNOT anc1 -> anc2.
    append_pair_prep(c, PrepState::kPlusZero, anc1_base, t0, region,
                     next_group);
    append_pair_prep(c, PrepState::kZeroPlus, anc2_base, t0, region,
                     next_group);
    for (int i = 0; i < 4; ++i) {
      c.add_location(t0 + 2, Gate::cnot(anc1_base + i, anc2_base + i), region);
    }
  } else {
    // pED: measured block |0>_L|+>_T, output block |+>_L|0>_T, CNOT
    // anc2 -> anc1.
    append_pair_prep(c, PrepState::kZeroPlus, anc1_base, t0, region,
                     next_group);
    append_pair_prep(c, PrepState::kPlusZero, anc2_base, t0, region,
                     next_group);
    for (int i = 0; i < 4; ++i) {
      c.add_location(t0 + 2, Gate::cnot(anc2_base + i, anc1_base + i), region);
    }
  }

  // Transversal Bell measurement: CNOT data->anc1, then X readout of the
  // data block and Z readout of the first ancilla block.
  for (int i = 0; i < 4; ++i) {
    const int g = next_group++;
    c.add_location(t0 + 3, Gate::cnot(data_base + i, anc1_base + i), region,
                   true, g);
    c.add_location(t0 + 4, Gate::meas_x(data_base + i), region, true, g);
    c.add_location(t0 + 4, Gate::meas_z(anc1_base + i), region, true, g);
  }
  h.end_timestep = t0 + 4;

  const std::string tag =
      std::string(region_kind_name(region.kind)) + std::to_string(region.index);
  auto pre_bm = [&](const PauliOperator& on_data, const PauliOperator& on_anc1) {
    return on_block(on_data, n, data_base) * on_block(on_anc1, n, anc1_base);
  };
  c.add_check("sx_" + tag, pre_bm(Code422::stab_x(), Code422::stab_x()),
              t0 + 2, CheckRole::kStabilizer, region);
  c.add_check("sz_" + tag, pre_bm(Code422::stab_z(), Code422::stab_z()),
              t0 + 2, CheckRole::kStabilizer, region);
  const PauliOperator& gauge_op = gauge_state_operator(flavor);
  c.add_check("gauge_" + tag, pre_bm(gauge_op, gauge_op), t0 + 2,
              CheckRole::kGaugeMatch, region);

  c.add_frame("mx_" + tag, pre_bm(Code422::logical_x(), Code422::logical_x()),
              t0 + 2, on_block(Code422::logical_z(), n, anc2_base),
              h.end_timestep, region);
  c.add_frame("mz_" + tag, pre_bm(Code422::logical_z(), Code422::logical_z()),
              t0 + 2, on_block(Code422::logical_x(), n, anc2_base),
              h.end_timestep, region);
  return h;
}

void add_block_trackers(Gadget& g, int base, const std::string& suffix) {
  const int n = g.circuit.n_qubits();
  g.circuit.add_tracker("xflip_" + suffix,
                        on_block(Code422::logical_z(), n, base));
  g.circuit.add_tracker("zflip_" + suffix,
                        on_block(Code422::logical_x(), n, base));
}

void add_codeword_input(Gadget& g, int base, GaugeFlavor gauge) {
  const int n = g.circuit.n_qubits();
  g.circuit.add_input_stabilizer(on_block(Code422::stab_x(), n, base));
  g.circuit.add_input_stabilizer(on_block(Code422::stab_z(), n, base));
  g.circuit.add_input_stabilizer(on_block(gauge_state_operator(gauge), n, base));
}

}  // namespace

Gadget build_ed(GaugeFlavor flavor) {
  Gadget g;
  g.name = flavor == GaugeFlavor::kZeroGauge ? "zed" : "ped";
  g.leading_flavor = flavor;
  g.output_flavor = other_flavor(flavor);
  g.circuit = Circuit(12);
  g.circuit.set_name(g.name);
  int next_group = 0;
  RegionTag region{RegionKind::kLeadingEd, 0};
  append_ed(g.circuit, flavor, 0, 4, 8, 0, region, next_group);
  g.input_block_bases = {0};
  g.output_block_bases = {8};
  g.b_points = {{8, 4, g.output_flavor}};
  add_codeword_input(g, 0, flavor);
  g.circuit.add_output_block({8, 9, 10, 11});
  add_block_trackers(g, 8, "out0");
  g.circuit.finalize();
  return g;
}

Gadget build_prep(PrepState state) {
  Gadget g;
  switch (state) {
    case PrepState::kZeroPlus: g.name = "prep-0p"; break;
    case PrepState::kPlusZero: g.name = "prep-p0"; break;
    case PrepState::kZeroZero: g.name = "prep-00"; break;
    case PrepState::kPlusPlus: g.name = "prep-pp"; break;
  }
  g.output_flavor = (state == PrepState::kZeroPlus || state == PrepState::kPlusPlus)
                        ? GaugeFlavor::kPlusGauge
                        : GaugeFlavor::kZeroGauge;
  g.has_prepared_logical = true;
  g.prepared_logical =
      (state == PrepState::kZeroPlus || state == PrepState::kZeroZero)
          ? Code422::logical_z()
          : Code422::logical_x();
  g.circuit = Circuit(4);
  g.circuit.set_name(g.name);
  int next_group = 0;
  RegionTag region{RegionKind::kPrep, 0};
  if (state == PrepState::kZeroPlus || state == PrepState::kPlusZero) {
    append_pair_prep(g.circuit, state, 0, 0, region, next_group);
  } else {
    append_ghz_prep(g.circuit, state, 0, 0, region);
  }
  g.output_block_bases = {0};
  g.circuit.add_output_block({0, 1, 2, 3});
  add_block_trackers(g, 0, "out0");
  g.circuit.finalize();
  return g;
}

Gadget build_prep_then_ed(PrepState state, GaugeFlavor ed_flavor) {
  Gadget g;
  g.name = "prep+ed";
  g.leading_flavor = ed_flavor;
  g.output_flavor = other_flavor(ed_flavor);
  g.has_prepared_logical = true;
  g.prepared_logical =
      (state == PrepState::kZeroPlus || state == PrepState::kZeroZero)
          ? Code422::logical_z()
          : Code422::logical_x();
  g.circuit = Circuit(12);
  g.circuit.set_name(g.name);
  int next_group = 0;
  RegionTag prep_region{RegionKind::kPrep, 0};
  if (state == PrepState::kZeroPlus || state == PrepState::kPlusZero) {
    append_pair_prep(g.circuit, state, 0, 0, prep_region, next_group);
  } else {
    append_ghz_prep(g.circuit, state, 0, 0, prep_region);
  }
  RegionTag ed_region{RegionKind::kTrailingEd, 0};
  append_ed(g.circuit, ed_flavor, 0, 4, 8, 4, ed_region, next_group);
  g.output_block_bases = {8};
  g.b_points = {{8, 8, g.output_flavor}};
  g.circuit.add_output_block({8, 9, 10, 11});
  add_block_trackers(g, 8, "out0");
  g.circuit.finalize();
  return g;
}

Gadget build_cnot_exrec(const ExRecSpec& spec) {
  Gadget g;
  g.name = spec.leading == GaugeFlavor::kZeroGauge ? "cnot-exrec"
                                                   : "cnot-exrec-pfirst";
  if (spec.contracted) {
    g.name = spec.leading == GaugeFlavor::kZeroGauge ? "cnot-conexrec"
                                                     : "cnot-conexrec-pfirst";
  }
  g.is_exrec = true;
  g.contracted = spec.contracted;
  g.leading_flavor = spec.leading;
  const GaugeFlavor mid = other_flavor(spec.leading);
  g.output_flavor = spec.leading;

  g.circuit = Circuit(40);
  g.circuit.set_name(g.name);
  int next_group = 0;

  const int din[2] = {0, 4};
  const int lead_anc1[2] = {8, 16};
  const int lead_anc2[2] = {12, 20};  // gate input blocks
  const int trail_anc1[2] = {24, 32};
  const int trail_anc2[2] = {28, 36};

  for (int i = 0; i < 2; ++i) {
    append_ed(g.circuit, spec.leading, din[i], lead_anc1[i], lead_anc2[i], 0,
              {RegionKind::kLeadingEd, i}, next_group);
    add_codeword_input(g, din[i], spec.leading);
    g.input_block_bases.push_back(din[i]);
    g.b_points.push_back({lead_anc2[i], 4, mid});
  }
  for (int i = 0; i < 4; ++i) {
    g.circuit.add_location(5, Gate::cnot(lead_anc2[0] + i, lead_anc2[1] + i),
                           {RegionKind::kGate, 0});
  }
  for (int j = 0; j < 2; ++j) {
    if (spec.truncate_trailing[j]) {
      g.output_block_bases.push_back(lead_anc2[j]);
      g.circuit.add_output_block({lead_anc2[j], lead_anc2[j] + 1,
                                  lead_anc2[j] + 2, lead_anc2[j] + 3});
      add_block_trackers(g, lead_anc2[j], "out" + std::to_string(j));
      continue;
    }
    append_ed(g.circuit, mid, lead_anc2[j], trail_anc1[j], trail_anc2[j], 6,
              {RegionKind::kTrailingEd, j}, next_group);
    g.output_block_bases.push_back(trail_anc2[j]);
    g.circuit.add_output_block({trail_anc2[j], trail_anc2[j] + 1,
                                trail_anc2[j] + 2, trail_anc2[j] + 3});
    add_block_trackers(g, trail_anc2[j], "out" + std::to_string(j));
  }
  g.circuit.finalize();
  return g;
}

Gadget build_decoder(GaugeFlavor flavor) {
  Gadget g;
  g.name = flavor == GaugeFlavor::kPlusGauge ? "decoder-plus" : "decoder-zero";
  g.leading_flavor = flavor;
  g.circuit = Circuit(4);
  g.circuit.set_name(g.name);
  RegionTag region{RegionKind::kDecoder, 0};
  if (flavor == GaugeFlavor::kPlusGauge) {
    g.circuit.add_location(0, Gate::cnot(2, 0), region);
    g.circuit.add_location(1, Gate::cnot(3, 1), region);
    g.circuit.add_location(2, Gate::cnot(0, 1), region);
  } else {
    g.circuit.add_location(0, Gate::cnot(0, 1), region);
    g.circuit.add_location(1, Gate::cnot(2, 0), region);
    g.circuit.add_location(2, Gate::cnot(2, 3), region);
  }
  g.input_block_bases = {0};
  g.output_block_bases = {0};
  g.circuit.add_output_block({0});
  g.circuit.finalize();
  return g;
}

Gadget build_teleport_into_block() {
  Gadget g;
  g.name = "teleport";
  g.output_flavor = GaugeFlavor::kPlusGauge;  // output block is |0>_L|+>_T side
  g.circuit = Circuit(9);
  g.circuit.set_name(g.name);
  const int n = 9;
  const int input = 0, anc1 = 1, anc2 = 5;
  int next_group = 0;

  // Logical Bell pair: |+>_L|0>_T on the block to be decoded, |0>_L|+>_T on
  // the block that will carry the teleported state.
  append_pair_prep(g.circuit, PrepState::kPlusZero, anc1, 0,
                   {RegionKind::kPrep, 0}, next_group);
  append_pair_prep(g.circuit, PrepState::kZeroPlus, anc2, 0,
                   {RegionKind::kPrep, 1}, next_group);
  for (int i = 0; i < 4; ++i) {
    g.circuit.add_location(2, Gate::cnot(anc1 + i, anc2 + i),
                           {RegionKind::kGate, 0});
  }

  // Zero-gauge decoder on the first ancilla block.
  RegionTag dec{RegionKind::kDecoder, 0};
  g.circuit.add_location(3, Gate::cnot(anc1 + 0, anc1 + 1), dec);
  g.circuit.add_location(4, Gate::cnot(anc1 + 2, anc1 + 0), dec);
  g.circuit.add_location(5, Gate::cnot(anc1 + 2, anc1 + 3), dec);

  // Syndrome/gauge readout of the decoded block.
  RegionTag dm{RegionKind::kDecodeMeas, 0};
  g.circuit.add_location(6, Gate::meas_z(anc1 + 1), dm);
  g.circuit.add_location(6, Gate::meas_x(anc1 + 2), dm);
  g.circuit.add_location(6, Gate::meas_z(anc1 + 3), dm);
  g.circuit.add_check("dec_gauge",
                      on_block(Code422::gauge_z(), n, anc1), 2,
                      CheckRole::kDecode, dm);
  g.circuit.add_check("dec_sx", on_block(Code422::stab_x(), n, anc1), 2,
                      CheckRole::kDecode, dm);
  g.circuit.add_check("dec_szg",
                      on_block(Code422::gauge_z() * Code422::stab_z(), n, anc1),
                      2, CheckRole::kDecode, dm);

  // Input qubit and the physical Bell measurement.
  g.circuit.add_location(0, Gate::prep_z(input), {RegionKind::kInput, 0});
  RegionTag bm{RegionKind::kBellMeas, 0};
  g.circuit.add_location(7, Gate::cnot(input, anc1 + 0), bm);
  g.circuit.add_location(8, Gate::meas_x(input), bm);
  g.circuit.add_location(8, Gate::meas_z(anc1 + 0), bm);

  PauliOperator mx = PauliOperator::single(n, input, 'X');
  mx.set_pauli(anc1 + 0, 'X');
  PauliOperator mz = PauliOperator::single(n, input, 'Z');
  mz.set_pauli(anc1 + 0, 'Z');
  g.circuit.add_frame("mx_bm", mx, 6, on_block(Code422::logical_z(), n, anc2),
                      8, bm);
  g.circuit.add_frame("mz_bm", mz, 6, on_block(Code422::logical_x(), n, anc2),
                      8, bm);

  g.output_block_bases = {anc2};
  g.circuit.add_output_block({anc2, anc2 + 1, anc2 + 2, anc2 + 3});
  add_block_trackers(g, anc2, "out0");
  g.circuit.finalize();
  return g;
}

std::vector<std::string> gadget_names() {
  return {"zed",          "ped",
          "prep-0p",      "prep-p0",
          "prep-00",      "prep-pp",
          "cnot-exrec",   "cnot-exrec-pfirst",
          "cnot-conexrec", "cnot-conexrec-pfirst",
          "decoder-plus", "decoder-zero",
          "teleport"};
}

Gadget build_gadget(const std::string& name) {
  if (name == "zed") return build_ed(GaugeFlavor::kZeroGauge);
  if (name == "ped") return build_ed(GaugeFlavor::kPlusGauge);
  if (name == "prep-0p") return build_prep(PrepState::kZeroPlus);
  if (name == "prep-p0") return build_prep(PrepState::kPlusZero);
  if (name == "prep-00") return build_prep(PrepState::kZeroZero);
  if (name == "prep-pp") return build_prep(PrepState::kPlusPlus);
  if (name == "cnot-exrec") return build_cnot_exrec({});
  if (name == "cnot-exrec-pfirst") {
    return build_cnot_exrec({GaugeFlavor::kPlusGauge, false, {false, false}});
  }
  if (name == "cnot-conexrec") {
    return build_cnot_exrec({GaugeFlavor::kZeroGauge, true, {false, false}});
  }
  if (name == "cnot-conexrec-pfirst") {
    return build_cnot_exrec({GaugeFlavor::kPlusGauge, true, {false, false}});
  }
  if (name == "decoder-plus") return build_decoder(GaugeFlavor::kPlusGauge);
  if (name == "decoder-zero") return build_decoder(GaugeFlavor::kZeroGauge);
  if (name == "teleport") return build_teleport_into_block();
  throw std::invalid_argument("unknown gadget '" + name + "'");
}

}  // namespace qpt
