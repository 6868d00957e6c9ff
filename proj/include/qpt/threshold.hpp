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

#ifndef QPT_THRESHOLD_HPP_
#define QPT_THRESHOLD_HPP_

#include <cstdint>
#include <vector>

namespace qpt {

// Location counts and malignant-set sizes of one extended-rectangle family.
struct GadgetMetrics {
  int exrec_size = 116;
  int ed_size = 28;
  int gate_arity = 2;
  int64_t tilde_a = 1306;  // malignant pairs, weak correctness included
  int64_t hat_a = 722;     // malignant pairs, untruncated rectangles
  int dec_locations = 3;
  int max_rec_size = 60;  // largest 1-Rec, drives the overhead exponent

  int degree() const { return 2 * gate_arity; }
  int64_t tilde_b() const;     // 3-subsets minus all-trailing 3-subsets
  int64_t pair_count() const;  // C(exrec_size, 2)

  static GadgetMetrics cnot_uncontracted();
  static GadgetMetrics cnot_contracted();
};

struct NoiseParams {
  double eps = 0.0;
  // Threshold achievable with concatenated error-correcting codes; the
  // postselected construction must land below it. External constant.
  static constexpr double kErrorCorrectionThreshold = 1.9e-4;
};

// Clamp a probability-valued quantity into [0,1]; clamping is reported on
// stderr, never silent.
double clamp01(double value, const char* context);

// Cluster-counting factors of the global-acceptance bound.
double omega(double eps, const GadgetMetrics& m);
double gamma_basic(double eps, const GadgetMetrics& m);    // 1/(1-omega)
double gamma_improved(double eps, const GadgetMetrics& m); // exact small-s terms
double big_c(double eps, const GadgetMetrics& m);
double big_d(double eps, const GadgetMetrics& m);

struct FixedPointResult {
  double value = 0.0;
  double seed = 0.0;
  int iterations = 0;
  bool converged = false;
};

// All-pairs threshold equation eps0 = D(eps0) (1-omega(eps0))^d / A with
// A = C(116,2), solved by damped iteration from the 1/A seed.
FixedPointResult solve_eps0_allpairs(const GadgetMetrics& m);

// How the level-1 step applies the cluster-counting factors. The contracted
// enumeration of elementary operations (Bell preparations and measurements
// as single units) is the default; see the threshold notes in the README.
enum class Level1Mode {
  kContractedGeometry,
  kUncontractedGeometry,
  kPlainCounts,
};

struct RecursionOptions {
  GadgetMetrics level1 = GadgetMetrics::cnot_uncontracted();
  GadgetMetrics higher = GadgetMetrics::cnot_contracted();
  Level1Mode level1_mode = Level1Mode::kContractedGeometry;
  bool improved_gamma = true;
};

struct RecursionState {
  int level = 0;
  double eps = 0.0;        // failure rate, truncation allowed
  double eps_tilde = 0.0;  // failure rate, untruncated rectangles
  double eps_dec = 0.0;    // accumulated decoding error bound
  bool diverged = false;
};

// Levelwise failure-rate recursion. The returned vector holds levels
// 0..k_max; if the iteration leaves the contraction regime the last entry is
// flagged diverged and iteration stops there.
std::vector<RecursionState> iterate_levels(double eps, int k_max,
                                           const RecursionOptions& opts = {});

struct DecodingError {
  double partial = 0.0;     // eps_dec^(k)
  double tail = 0.0;        // bound on eps_dec^(inf) - eps_dec^(k)
  double gamma_cap = 0.0;   // the Gamma constant of the tail bound
  bool tail_valid = false;  // Gamma * eps^(k) < 1
  double total = 0.0;       // partial + tail when valid
};
DecodingError decoding_error(double eps, int k,
                             const RecursionOptions& opts = {});

struct Budgets {
  double eps_anc = 0.0;   // 3 eps^(k) + eps_dec^(k) + 4 eps
  double eps_bell = 0.0;  // 2 eps_dec^(k) + 5 eps
};
Budgets anc_and_bell_budgets(double eps, int k,
                             const RecursionOptions& opts = {});

// Concatenated five-qubit outer code: per-level map x -> 10 x^2.
double c2_failure(double eps_prime, int levels);
double c2_two_qubit_failure(double eps_prime, int levels);

// Magic-state distillation maps (one round each).
double distill_plus_i(double eps);
double distill_h(double eps);
struct DistillFixedPoints {
  double plus_i = 0.5;  // analytic
  double h = 0.0;       // bisection to 1e-6
};
DistillFixedPoints distill_fixed_points();

// Conditional failure probability achievable by an adversary against a
// postselected circuit under plain local stochastic noise, and the circuit
// size at which it reaches 1/2.
double adversarial_pfail(double eps, double l0, int k);
int64_t adversarial_halfpoint(double eps, int k);

struct OverheadEstimate {
  int k = 0;          // concatenation level
  double ratio = 0.0; // log(1e4 eps0 L2) / log(eps0/eps)
  double L = 0.0;     // size of one ancilla preparation circuit
  double NL = 0.0;    // total gates across retries (may overflow to inf)
  double log10_NL = 0.0;
};
OverheadEstimate overhead(double eps, double eps0, double l2);

struct ThresholdScan {
  double threshold = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int k_max = 40;
};
// Bisection on "eps^(40) < 1e-12" at the given absolute resolution.
ThresholdScan threshold_scan(const RecursionOptions& opts = {},
                             double resolution = 1e-6);

}  // namespace qpt

#endif  // QPT_THRESHOLD_HPP_
