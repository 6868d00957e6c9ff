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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpt/carving.hpp"
#include "qpt/gadgets.hpp"
#include "qpt/malignancy.hpp"
#include "qpt/threshold.hpp"

namespace {

using nlohmann::json;

// All emitted numbers carry 12 significant digits; CSV uses '.' decimals.
double sig12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
  if (!content.empty() && content.back() != '\n') out << '\n';
}

// Reference values the --check mode regresses against (v1).
struct GoldenEntry {
  int64_t any;
  int64_t strict;
  double tolerance;  // relative; 0 means exact
};
const std::map<std::string, GoldenEntry>& golden_pairs() {
  static const std::map<std::string, GoldenEntry> table = {
      {"cnot-exrec", {1306, 722, 0.10}},
      {"cnot-exrec-pfirst", {1306, 722, 0.10}},
      {"cnot-conexrec", {550, 336, 0.10}},
      {"cnot-conexrec-pfirst", {550, 336, 0.10}},
  };
  return table;
}

qpt::BInjectionModel parse_model(const std::string& name) {
  if (name == "decoder") return qpt::BInjectionModel::kDecoderSyndromes;
  if (name == "decoder-post") return qpt::BInjectionModel::kDecoderSyndromesPost;
  if (name == "weight1") return qpt::BInjectionModel::kWeightOneCosets;
  if (name == "union") return qpt::BInjectionModel::kUnion;
  throw CLI::ValidationError("unknown B-deviation model '" + name + "'");
}

qpt::RecursionOptions recursion_options(const std::string& level1_mode) {
  qpt::RecursionOptions opts;
  if (level1_mode == "contracted-geometry") {
    opts.level1_mode = qpt::Level1Mode::kContractedGeometry;
  } else if (level1_mode == "uncontracted-geometry") {
    opts.level1_mode = qpt::Level1Mode::kUncontractedGeometry;
  } else if (level1_mode == "plain-counts") {
    opts.level1_mode = qpt::Level1Mode::kPlainCounts;
  } else {
    throw CLI::ValidationError("unknown level-1 mode '" + level1_mode + "'");
  }
  return opts;
}

int cmd_count_malignant(const std::string& gadget_name, bool check,
                        const std::string& model_name, bool no_absorb,
                        int witnesses, bool timing, const std::string& out,
                        const std::string& format) {
  qpt::Gadget gadget = qpt::build_gadget(gadget_name);
  qpt::MalignancyOptions opt;
  opt.b_model = parse_model(model_name);
  opt.absorb_gate_trailing_pairs = !no_absorb;
  opt.witness_cap = witnesses;
  qpt::ExRecAnalysis analysis(gadget, opt.b_model);

  if (!gadget.is_exrec) {
    // Single-gadget audit: a lone fault may never pass all checks while
    // leaving the output more than 1-deviated.
    const int64_t bad = qpt::ed_single_fault_audit(gadget);
    json j;
    j["schema"] = "qpt.audit/1";
    j["gadget"] = gadget_name;
    j["malignant_single_faults"] = bad;
    j["location_count"] = gadget.circuit.location_count(false);
    write_output(out, j.dump(2));
    if (check && bad != 0) {
      std::fprintf(stderr, "check FAILED: %lld malignant single faults\n",
                   static_cast<long long>(bad));
      return 2;
    }
    return 0;
  }

  qpt::MalignancyReport report = analysis.count_malignant_pairs(opt);
  if (format == "csv") {
    write_output(out, qpt::MalignancyReport::csv_header() + "\n" +
                          report.csv_row());
  } else {
    write_output(out, report.to_json(2, timing));
  }

  if (check) {
    const auto it = golden_pairs().find(gadget_name);
    if (it == golden_pairs().end()) {
      const int64_t singles = analysis.count_malignant_singles();
      if (singles != 0) {
        std::fprintf(stderr, "check FAILED: %lld malignant singles\n",
                     static_cast<long long>(singles));
        return 2;
      }
      return 0;
    }
    const GoldenEntry& golden = it->second;
    auto within = [&](int64_t got, int64_t want) {
      if (got == want) return true;
      return std::fabs(static_cast<double>(got - want)) <=
             golden.tolerance * static_cast<double>(want);
    };
    std::fprintf(stderr,
                 "golden check: any=%lld (reference %lld, gap %+lld), "
                 "strict=%lld (reference %lld, gap %+lld)\n",
                 static_cast<long long>(report.malignant_any),
                 static_cast<long long>(golden.any),
                 static_cast<long long>(report.malignant_any - golden.any),
                 static_cast<long long>(report.malignant_strict),
                 static_cast<long long>(golden.strict),
                 static_cast<long long>(report.malignant_strict - golden.strict));
    if (!within(report.malignant_any, golden.any) ||
        !within(report.malignant_strict, golden.strict)) {
      std::fprintf(stderr, "check FAILED: counts outside tolerance\n");
      return 2;
    }
  }
  return 0;
}

int cmd_threshold(std::vector<double> eps_list, int k_max, bool all_pairs,
                  bool scan_only, const std::string& level1_mode,
                  const std::string& out, const std::string& format) {
  const qpt::RecursionOptions opts = recursion_options(level1_mode);
  if (all_pairs) {
    const qpt::FixedPointResult fp =
        qpt::solve_eps0_allpairs(qpt::GadgetMetrics::cnot_uncontracted());
    json j;
    j["schema"] = "qpt.allpairs/1";
    j["seed_one_over_a"] = sig12(fp.seed);
    j["fixed_point"] = sig12(fp.value);
    j["iterations"] = fp.iterations;
    j["reference_value"] = 1.410e-4;
    j["gap_to_reference"] = sig12(1.410e-4 - fp.value);
    write_output(out, j.dump(2));
    return 0;
  }

  const qpt::ThresholdScan scan = qpt::threshold_scan(opts);
  if (eps_list.empty()) {
    eps_list = {2e-4, 4e-4, 6e-4, 8e-4, 1.04e-3};
  }
  if (format == "csv") {
    std::string csv = "eps,k,eps_k,eps_tilde_k,eps_dec_k,diverged\n";
    if (!scan_only) {
      for (double eps : eps_list) {
        const auto states = qpt::iterate_levels(eps, k_max, opts);
        for (const auto& s : states) {
          csv += fmt12(eps) + "," + std::to_string(s.level) + "," +
                 fmt12(s.eps) + "," + fmt12(s.eps_tilde) + "," +
                 fmt12(s.eps_dec) + "," + (s.diverged ? "1" : "0") + "\n";
        }
      }
    }
    csv += "# scanned_threshold," + fmt12(scan.threshold) + "\n";
    write_output(out, csv);
  } else {
    json j;
    j["schema"] = "qpt.threshold/1";
    j["scanned_threshold"] = sig12(scan.threshold);
    j["scan_bracket"] = {sig12(scan.lo), sig12(scan.hi)};
    json runs = json::array();
    if (!scan_only) {
      for (double eps : eps_list) {
        json run;
        run["eps"] = sig12(eps);
        json levels = json::array();
        for (const auto& s : qpt::iterate_levels(eps, k_max, opts)) {
          levels.push_back({{"k", s.level},
                            {"eps", sig12(s.eps)},
                            {"eps_tilde", sig12(s.eps_tilde)},
                            {"eps_dec", sig12(s.eps_dec)},
                            {"diverged", s.diverged}});
        }
        run["levels"] = std::move(levels);
        runs.push_back(std::move(run));
      }
    }
    j["runs"] = std::move(runs);
    write_output(out, j.dump(2));
  }
  return 0;
}

int cmd_montecarlo(const std::string& gadget_name, double eps,
                   uint64_t samples, uint64_t seed, bool contracted,
                   const std::string& model_name, const std::string& out) {
  std::string name = gadget_name;
  if (contracted && name == "cnot-exrec") name = "cnot-conexrec";
  qpt::Gadget gadget = qpt::build_gadget(name);
  qpt::ExRecAnalysis analysis(gadget, parse_model(model_name));
  const qpt::MonteCarloResult r =
      analysis.monte_carlo_conditional_failure(eps, samples, seed);
  json j;
  j["schema"] = "qpt.montecarlo/1";
  j["gadget"] = name;
  j["eps"] = sig12(eps);
  j["samples"] = r.samples;
  j["seed"] = seed;
  j["accepted"] = r.accepted;
  j["failures"] = r.failures;
  j["acceptance_rate"] = sig12(r.acceptance_rate);
  if (r.no_acceptance) {
    j["no_acceptance"] = true;
  } else {
    j["estimate"] = sig12(r.estimate);
    j["ci99_low"] = sig12(r.ci_low);
    j["ci99_high"] = sig12(r.ci_high);
  }
  write_output(out, j.dump(2));
  return 0;
}

int cmd_distill(const std::string& state, bool solve_threshold, double eps,
                int rounds, const std::string& out) {
  json j;
  j["schema"] = "qpt.distill/1";
  j["state"] = state;
  if (solve_threshold) {
    const qpt::DistillFixedPoints fp = qpt::distill_fixed_points();
    j["threshold"] = state == "h" ? sig12(fp.h) : sig12(fp.plus_i);
  } else {
    double x = eps;
    json seq = json::array();
    seq.push_back(sig12(x));
    for (int r = 0; r < rounds; ++r) {
      x = state == "h" ? qpt::distill_h(x) : qpt::distill_plus_i(x);
      seq.push_back(sig12(x));
    }
    j["rounds"] = rounds;
    j["sequence"] = std::move(seq);
  }
  write_output(out, j.dump(2));
  return 0;
}

int cmd_adversary(double eps, double l0, int k, bool halfpoint,
                  const std::string& out) {
  json j;
  j["schema"] = "qpt.adversary/1";
  j["eps"] = sig12(eps);
  j["k"] = k;
  if (halfpoint) {
    j["halfpoint_L0"] = qpt::adversarial_halfpoint(eps, k);
  } else {
    j["L0"] = sig12(l0);
    j["p_fail"] = sig12(qpt::adversarial_pfail(eps, l0, k));
  }
  write_output(out, j.dump(2));
  return 0;
}

int cmd_overhead(double eps, double eps0, double l2, const std::string& out) {
  const qpt::OverheadEstimate est = qpt::overhead(eps, eps0, l2);
  json j;
  j["schema"] = "qpt.overhead/1";
  j["eps"] = sig12(eps);
  j["eps0"] = sig12(eps0);
  j["L2"] = sig12(l2);
  j["k"] = est.k;
  j["ratio"] = sig12(est.ratio);
  j["L"] = sig12(est.L);
  j["log10_NL"] = sig12(est.log10_NL);
  if (std::isfinite(est.NL)) j["NL"] = sig12(est.NL);
  write_output(out, j.dump(2));
  return 0;
}

int cmd_decode_error(double eps, int k_max, const std::string& level1_mode,
                     const std::string& out, const std::string& format) {
  const qpt::RecursionOptions opts = recursion_options(level1_mode);
  const auto states = qpt::iterate_levels(eps, k_max, opts);
  const qpt::DecodingError final = qpt::decoding_error(eps, k_max, opts);
  if (format == "csv") {
    std::string csv = "k,eps_dec_k\n";
    for (const auto& s : states) {
      if (s.level == 0 || s.diverged) continue;
      csv += std::to_string(s.level) + "," + fmt12(s.eps_dec) + "\n";
    }
    csv += "# tail_bound," + fmt12(final.tail) + "\n";
    csv += "# gamma," + fmt12(final.gamma_cap) + "\n";
    csv += "# eps_dec_total," + fmt12(final.total) + "\n";
    write_output(out, csv);
  } else {
    json j;
    j["schema"] = "qpt.decode/1";
    j["eps"] = sig12(eps);
    json rows = json::array();
    for (const auto& s : states) {
      if (s.level == 0 || s.diverged) continue;
      rows.push_back({{"k", s.level}, {"eps_dec", sig12(s.eps_dec)}});
    }
    j["levels"] = std::move(rows);
    j["gamma"] = sig12(final.gamma_cap);
    j["tail_bound"] = sig12(final.tail);
    j["eps_dec_total"] = sig12(final.total);
    write_output(out, j.dump(2));
  }
  return 0;
}

int cmd_dump_gadget(const std::string& name, const std::string& out) {
  qpt::Gadget gadget = qpt::build_gadget(name);
  write_output(out, gadget.circuit.to_json(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qpt: fault-location combinatorics and threshold analytics for "
      "postselected [[4,2,2]] fault tolerance"};
  app.require_subcommand(1);

  std::string gadget = "cnot-exrec", out, format = "json";
  std::string model = "decoder", level1_mode = "contracted-geometry";
  std::string state = "h";
  bool check = false, no_absorb = false, timing = false, all_pairs = false;
  bool scan_only = false, contracted = false, solve_threshold = false;
  bool halfpoint = false;
  int witnesses = 16, k_max = 12, k = 1, rounds = 1;
  uint64_t samples = 1000000, seed = 20260809;
  double eps = 1.04e-3, l0 = 1000, eps0 = 1.04e-3, l2 = 1000;
  std::vector<double> eps_list;

  auto* cm = app.add_subcommand("count-malignant",
                                "count malignant fault-location pairs");
  cm->add_option("--gadget", gadget, "gadget name (see dump-gadget)");
  cm->add_flag("--check", check, "compare against the golden table");
  cm->add_option("--b-model", model,
                 "B-input deviation family: decoder|decoder-post|weight1|union");
  cm->add_flag("--no-absorb", no_absorb,
               "keep gate/trailing-ED consecutive pairs in the count");
  cm->add_option("--witnesses", witnesses, "max witnesses in the report");
  cm->add_flag("--timing", timing, "include runtime in the report");
  cm->add_option("--out", out, "output path (default stdout)");
  cm->add_option("--format", format, "json|csv");

  auto* th = app.add_subcommand("threshold", "levelwise failure recursion");
  th->add_option("--eps", eps_list, "physical fault rates");
  th->add_option("--kmax", k_max, "levels to iterate");
  th->add_flag("--all-pairs", all_pairs, "all-pairs fixed point instead");
  th->add_flag("--scan-only", scan_only, "emit only the scanned threshold");
  th->add_option("--level1-mode", level1_mode,
                 "contracted-geometry|uncontracted-geometry|plain-counts");
  th->add_option("--out", out, "output path");
  th->add_option("--format", format, "json|csv");

  auto* mc = app.add_subcommand("montecarlo",
                                "conditioned failure-rate estimation");
  mc->add_option("--gadget", gadget, "gadget name");
  mc->add_option("--eps", eps, "fault rate");
  mc->add_option("--samples", samples, "sample count");
  mc->add_option("--seed", seed, "RNG seed");
  mc->add_flag("--contracted", contracted, "use the contracted rectangle");
  mc->add_option("--b-model", model, "deviation family");
  mc->add_option("--out", out, "output path");

  auto* di = app.add_subcommand("distill", "magic-state distillation maps");
  di->add_option("--state", state, "plusi|h");
  di->add_flag("--solve-threshold", solve_threshold, "report the fixed point");
  di->add_option("--eps", eps, "input error rate");
  di->add_option("--rounds", rounds, "distillation rounds");
  di->add_option("--out", out, "output path");

  auto* ad = app.add_subcommand("adversary",
                                "conditional failure under plain local noise");
  ad->add_option("--eps", eps, "fault rate");
  ad->add_option("--L0", l0, "circuit size");
  ad->add_option("--k", k, "concatenation level");
  ad->add_flag("--halfpoint", halfpoint, "smallest L0 with P >= 1/2");
  ad->add_option("--out", out, "output path");

  auto* ov = app.add_subcommand("overhead", "ancilla-factory size estimates");
  ov->add_option("--eps", eps, "fault rate");
  ov->add_option("--eps0", eps0, "threshold");
  ov->add_option("--L2", l2, "outer preparation circuit size");
  ov->add_option("--out", out, "output path");

  auto* de = app.add_subcommand("decode-error", "decoding-error bound");
  de->add_option("--eps", eps, "fault rate");
  de->add_option("--kmax", k_max, "levels");
  de->add_option("--level1-mode", level1_mode, "recursion variant");
  de->add_option("--out", out, "output path");
  de->add_option("--format", format, "json|csv");

  auto* dg = app.add_subcommand("dump-gadget", "serialize a gadget circuit");
  dg->add_option("--gadget", gadget, "gadget name");
  dg->add_option("--out", out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (cm->parsed()) {
      return cmd_count_malignant(gadget, check, model, no_absorb, witnesses,
                                 timing, out, format);
    }
    if (th->parsed()) {
      return cmd_threshold(eps_list, k_max, all_pairs, scan_only, level1_mode,
                           out, format);
    }
    if (mc->parsed()) {
      return cmd_montecarlo(gadget, eps, samples, seed, contracted, model,
                            out);
    }
    if (di->parsed()) return cmd_distill(state, solve_threshold, eps, rounds, out);
    if (ad->parsed()) return cmd_adversary(eps, l0, k, halfpoint, out);
    if (ov->parsed()) return cmd_overhead(eps, eps0, l2, out);
    if (de->parsed()) return cmd_decode_error(eps, k_max, level1_mode, out, format);
    if (dg->parsed()) return cmd_dump_gadget(gadget, out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
