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

#include "qpt/threshold.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qpt/malignancy.hpp"

namespace qpt {

namespace {
constexpr double kE = 2.718281828459045235;
}

int64_t GadgetMetrics::tilde_b() const {
  return count_triples(exrec_size, gate_arity, ed_size);
}

int64_t GadgetMetrics::pair_count() const {
  return static_cast<int64_t>(exrec_size) * (exrec_size - 1) / 2;
}

GadgetMetrics GadgetMetrics::cnot_uncontracted() {
  return GadgetMetrics{116, 28, 2, 1306, 722, 3, 60};
}

GadgetMetrics GadgetMetrics::cnot_contracted() {
  return GadgetMetrics{52, 12, 2, 550, 336, 3, 60};
}

double clamp01(double value, const char* context) {
  if (value < 0.0) {
    std::fprintf(stderr, "[qpt] clamped %s: %.6g -> 0\n", context, value);
    return 0.0;
  }
  if (value > 1.0) {
    std::fprintf(stderr, "[qpt] clamped %s: %.6g -> 1\n", context, value);
    return 1.0;
  }
  return value;
}

double omega(double eps, const GadgetMetrics& m) {
  if (eps < 0.0 || eps >= 1.0) {
    throw std::invalid_argument("fault rate must lie in [0, 1)");
  }
  const int d = m.degree();
  const int exponent = m.exrec_size - (d - 1) * m.ed_size;
  return kE * d * eps * m.ed_size / std::pow(1.0 - eps, exponent);
}

double gamma_basic(double eps, const GadgetMetrics& m) {
  const double w = omega(eps, m);
  if (w >= 1.0) {
    throw std::domain_error("cluster sum diverges: omega >= 1");
  }
  return 1.0 / (1.0 - w);
}

double gamma_improved(double eps, const GadgetMetrics& m) {
  const double w = omega(eps, m);
  if (w >= 1.0) {
    throw std::domain_error("cluster sum diverges: omega >= 1");
  }
  const int d = m.degree();
  const double c2 = 1.0 - 1.0 / kE;
  const double c3 = 1.0 - 3.0 * (d - 1) / (2.0 * kE * kE * d);
  return 1.0 / (1.0 - w) - c2 * w - c3 * w * w;
}

double big_c(double eps, const GadgetMetrics& m) {
  const int exponent = 3 * m.exrec_size - 10 * m.ed_size;
  return std::pow(1.0 - eps, exponent);
}

double big_d(double eps, const GadgetMetrics& m) {
  const int d = m.degree();
  const int exponent = (d + 1) * m.exrec_size - d * d * m.ed_size;
  return std::pow(1.0 - eps, exponent);
}

FixedPointResult solve_eps0_allpairs(const GadgetMetrics& m) {
  FixedPointResult result;
  const double a = static_cast<double>(m.pair_count());
  result.seed = 1.0 / a;
  double x = result.seed;
  const int d = m.degree();
  for (int it = 1; it <= 500; ++it) {
    const double w = omega(x, m);
    const double fx = big_d(x, m) * std::pow(1.0 - w, d) / a;
    const double next = 0.5 * (x + fx);  // damped Picard step
    result.iterations = it;
    if (std::fabs(next - x) < 1e-10 * std::max(next, 1e-300)) {
      result.value = next;
      result.converged = true;
      return result;
    }
    x = next;
  }
  result.value = x;
  throw std::runtime_error("all-pairs fixed point failed to converge");
}

namespace {

struct LevelFactors {
  double gamma2 = 1.0;  // gamma^2 / C
  double gamma4 = 1.0;  // gamma^d / D
};

LevelFactors factors_at(double eps, const GadgetMetrics& geometry,
                        bool improved) {
  LevelFactors f;
  const double g =
      improved ? gamma_improved(eps, geometry) : gamma_basic(eps, geometry);
  f.gamma2 = g * g / big_c(eps, geometry);
  f.gamma4 = std::pow(g, geometry.degree()) / big_d(eps, geometry);
  return f;
}

}  // namespace

std::vector<RecursionState> iterate_levels(double eps, int k_max,
                                           const RecursionOptions& opts) {
  if (eps < 0.0 || eps >= 1.0) {
    throw std::invalid_argument("fault rate must lie in [0, 1)");
  }
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");

  std::vector<RecursionState> states;
  states.push_back({0, eps, eps, 0.0, false});

  auto push_diverged = [&](int level) {
    states.push_back({level, 1.0, 1.0, 0.0, true});
  };

  for (int k = 1; k <= k_max; ++k) {
    const RecursionState& prev = states.back();
    const GadgetMetrics& counts = k == 1 ? opts.level1 : opts.higher;
    double e_next = 0.0, t_next = 0.0;
    if (k == 1 && opts.level1_mode == Level1Mode::kPlainCounts) {
      const double b = static_cast<double>(counts.tilde_b());
      e_next = counts.tilde_a * eps * eps + b * eps * eps * eps;
      t_next = counts.hat_a * eps * eps + b * eps * eps * eps;
    } else {
      const GadgetMetrics& geometry =
          (k == 1 && opts.level1_mode == Level1Mode::kUncontractedGeometry)
              ? opts.level1
              : opts.higher;
      if (prev.eps >= 0.5 || omega(prev.eps, geometry) >= 1.0) {
        push_diverged(k);
        break;
      }
      const LevelFactors f =
          factors_at(prev.eps, geometry, opts.improved_gamma);
      const double b = static_cast<double>(counts.tilde_b());
      const double sq = prev.eps_tilde * prev.eps_tilde;
      const double cube = prev.eps * prev.eps * prev.eps;
      e_next = counts.tilde_a * f.gamma2 * sq + b * f.gamma4 * cube;
      t_next = counts.hat_a * f.gamma2 * sq + b * f.gamma4 * cube;
    }
    if (!(e_next < 1.0)) {
      push_diverged(k);
      break;
    }
    states.push_back({k, e_next, t_next, 0.0, false});
  }

  // Decoding-error partial sums, accumulated smallest terms first to limit
  // rounding across the 1e-7..1e-2 span.
  for (size_t k = 1; k < states.size(); ++k) {
    if (states[k].diverged) break;
    double sum = 0.0;
    for (size_t j = k; j-- > 0;) sum += states[j].eps;
    states[k].eps_dec = clamp01(3.0 * sum, "eps_dec");
  }
  return states;
}

DecodingError decoding_error(double eps, int k, const RecursionOptions& opts) {
  if (k < 1) throw std::invalid_argument("decoding error needs k >= 1");
  DecodingError out;
  const std::vector<RecursionState> states = iterate_levels(eps, k, opts);
  if (states.back().diverged || static_cast<int>(states.size()) <= k) {
    throw std::domain_error("recursion diverged before level k");
  }
  out.partial = states[k].eps_dec;
  const double ek = states[k].eps;
  const GadgetMetrics& m = opts.higher;
  const double g = opts.improved_gamma ? gamma_improved(ek, m)
                                       : gamma_basic(ek, m);
  out.gamma_cap = (m.tilde_a * g * g +
                   m.tilde_b() * std::pow(g, m.degree()) * ek) /
                  big_d(ek, m);
  out.tail_valid = out.gamma_cap * ek < 1.0;
  if (!out.tail_valid) {
    throw std::domain_error("tail bound invalid: Gamma * eps^(k) >= 1");
  }
  out.tail = m.dec_locations * ek / (1.0 - out.gamma_cap * ek);
  out.total = clamp01(out.partial + out.tail, "eps_dec_total");
  return out;
}

Budgets anc_and_bell_budgets(double eps, int k, const RecursionOptions& opts) {
  const std::vector<RecursionState> states = iterate_levels(eps, k, opts);
  if (states.back().diverged || static_cast<int>(states.size()) <= k) {
    throw std::domain_error("recursion diverged before level k");
  }
  Budgets b;
  b.eps_anc =
      clamp01(3.0 * states[k].eps + states[k].eps_dec + 4.0 * eps, "eps_anc");
  b.eps_bell = clamp01(2.0 * states[k].eps_dec + 5.0 * eps, "eps_bell");
  return b;
}

double c2_failure(double eps_prime, int levels) {
  if (eps_prime < 0.0 || eps_prime >= 1.0) {
    throw std::invalid_argument("eps' must lie in [0, 1)");
  }
  double x = eps_prime;
  for (int i = 0; i < levels; ++i) x = 10.0 * x * x;
  return clamp01(x, "c2_failure");
}

double c2_two_qubit_failure(double eps_prime, int levels) {
  // Two Bell measurements per teleported two-qubit gate, either may fail.
  return clamp01(2.0 * c2_failure(eps_prime, levels), "c2_two_qubit");
}

double distill_plus_i(double eps) {
  if (eps < 0.0 || eps >= 0.5) {
    throw std::invalid_argument("distillation input must lie in [0, 0.5)");
  }
  return eps * eps / (eps * eps + (1.0 - eps) * (1.0 - eps));
}

double distill_h(double eps) {
  if (eps < 0.0 || eps >= 0.5) {
    throw std::invalid_argument("distillation input must lie in [0, 0.5)");
  }
  const double e3 = eps * eps * eps;
  return clamp01((35.0 * e3 + 945.0 * e3 * eps) / std::pow(1.0 - eps, 15),
                 "distill_h");
}

DistillFixedPoints distill_fixed_points() {
  DistillFixedPoints fp;
  fp.plus_i = 0.5;  // x^2/(x^2+(1-x)^2) = x exactly at 1/2
  double lo = 0.01, hi = 0.2;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (distill_h(mid) < mid) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  fp.h = 0.5 * (lo + hi);
  return fp;
}

double adversarial_pfail(double eps, double l0, int k) {
  if (eps <= 0.0 || eps >= 1.0) {
    throw std::invalid_argument("fault rate must lie in (0, 1)");
  }
  if (l0 < 0.0 || k < 0) throw std::invalid_argument("need l0, k >= 0");
  // P = eps^(2^k) / (eps^(2^k) + (1-eps)^l0), evaluated in log space.
  const double la = std::ldexp(1.0, k) * std::log(eps);
  const double lb = l0 * std::log1p(-eps);
  return 1.0 / (1.0 + std::exp(lb - la));
}

int64_t adversarial_halfpoint(double eps, int k) {
  if (eps <= 0.0 || eps >= 1.0) {
    throw std::invalid_argument("fault rate must lie in (0, 1)");
  }
  const double bound = std::ldexp(1.0, k) * std::log(eps) / std::log1p(-eps);
  int64_t l0 = static_cast<int64_t>(std::ceil(bound));
  while (l0 > 0 && adversarial_pfail(eps, static_cast<double>(l0 - 1), k) >= 0.5) {
    --l0;
  }
  while (adversarial_pfail(eps, static_cast<double>(l0), k) < 0.5) ++l0;
  return l0;
}

OverheadEstimate overhead(double eps, double eps0, double l2) {
  if (!(eps < eps0)) {
    throw std::domain_error("above threshold: eps >= eps0");
  }
  if (l2 < 1.0) throw std::invalid_argument("need L2 >= 1");
  OverheadEstimate out;
  const double num = std::log(1e4 * eps0 * l2);
  if (num <= 0.0) {
    throw std::domain_error("target circuit too small for the estimate");
  }
  out.ratio = num / std::log(eps0 / eps);
  out.k = out.ratio <= 1.0
              ? 0
              : static_cast<int>(std::ceil(std::log2(out.ratio)));
  const double log2_ell = std::log2(60.0);
  out.L = l2 * std::pow(out.ratio, log2_ell);
  out.log10_NL = std::log10(9.2 * out.L) + eps * out.L * std::log10(kE);
  out.NL = 9.2 * out.L * std::exp(eps * out.L);
  return out;
}

ThresholdScan threshold_scan(const RecursionOptions& opts, double resolution) {
  ThresholdScan scan;
  auto converges = [&](double eps) {
    const std::vector<RecursionState> states =
        iterate_levels(eps, scan.k_max, opts);
    return !states.back().diverged &&
           static_cast<int>(states.size()) == scan.k_max + 1 &&
           states.back().eps < 1e-12;
  };
  double lo = 1e-5, hi = 5e-3;
  if (!converges(lo)) {
    throw std::runtime_error("scan bracket too high: no convergent point");
  }
  while (converges(hi)) hi *= 2.0;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (converges(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  scan.lo = lo;
  scan.hi = hi;
  scan.threshold = lo;
  return scan;
}

}  // namespace qpt
