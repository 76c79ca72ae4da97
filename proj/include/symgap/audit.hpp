#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "symgap/instances.hpp"
#include "symgap/mechanisms.hpp"
#include "symgap/valuation.hpp"

namespace symgap {

// ---- truthfulness -----------------------------------------------------------

struct TruthEntry {
  Json deviation;
  double truthful_utility = 0.0;
  double deviation_utility = 0.0;
  // truthful - (1 - ε) · deviation, averaged over paired trials.
  double gap = 0.0;
  double std_error = 0.0;
  bool violation = false;
};

struct TruthReport {
  std::string mechanism;
  std::size_t player = 0;
  double epsilon = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool payments_missing = false;
  std::vector<TruthEntry> entries;
  std::size_t violations = 0;

  bool pass() const { return violations == 0; }
  Json to_json() const;
};

// Significance gate: a deviation is flagged when gap < -max(4 stderr, 1e-9).
inline constexpr double kSignificanceSigmas = 4.0;
inline constexpr double kGapFloor = 1e-9;

// Utilities are always measured with the player's true valuation. Trial t of
// the truthful run and of every deviation share the seed derive_seed(seed, t).
TruthReport audit_truthfulness(const Mechanism& mech, const std::vector<ValuationOracle>& truth,
                               const Constraint& constraint, std::size_t player,
                               const std::vector<ValuationOracle>& deviations, std::size_t trials,
                               double epsilon, std::uint64_t seed, std::size_t workers = 1);

// ---- symmetry gap -----------------------------------------------------------

struct GapConfig {
  CppLevelParams params = CppLevelParams::standard(1);
  std::size_t level = 0;  // j < ell; the hidden pair is (A(j), B(j))
  Phi phi = Phi::alpha(1.0);
  double beta = 0.1;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct GapTrial {
  std::uint64_t seed = 0;
  std::uint64_t queries = 0;
  std::uint64_t unbalanced = 0;
  double x = 0.0;        // |R ∩ A(j)| / |A(j)|
  double x_top = 0.0;    // |R| / m
  double value = 0.0;    // f̃(R)
  double ceiling = 0.0;  // 1 - (1 - φ(x))^2
  double planted = 0.0;  // f̃(A(j))
};

struct GapReport {
  std::string mechanism;
  GapConfig config;
  std::vector<GapTrial> trials;
  std::uint64_t queries = 0;
  std::uint64_t unbalanced = 0;
  // Per-query bound on Pr[|x - y| > β] for a query fixed independently of
  // the hidden bisection of m' = |A ∪ B| items: 4 exp(-β² m' / 8).
  double predicted_rate = 0.0;
  // 4 exp(-β² m' / 2), the bound quoted with β applied to the count gap.
  double predicted_rate_count_gap = 0.0;
  double mean_value = 0.0;
  double mean_ceiling = 0.0;
  double error_term = 0.0;  // e^{-n/8}
  std::uint64_t ceiling_exceedances = 0;  // trials with value > ceiling + error_term
  double planted_min = 0.0;
  double planted_bound = 0.0;  // φ(1 - β)
  double mean_x_top = 0.0;
  bool unbalanced_ok = false;
  bool ceiling_ok = false;
  bool planted_ok = false;
  bool feasibility_ok = false;

  bool pass() const { return unbalanced_ok && ceiling_ok && planted_ok && feasibility_ok; }
  Json to_json() const;
};

// One player with f̃ over the hidden pair. Each trial draws a fresh bisection
// of a fixed A(j+1); every query the mechanism issues is classified as
// balanced or not against the hidden pair.
GapReport symmetry_gap_experiment(const Mechanism& mech, const GapConfig& cfg);

// ---- menus and separation ---------------------------------------------------

struct MenuEntry {
  double x = 0.0;  // |R ∩ A(j)| / |A(j)|
  double p = 0.0;
  double weight = 0.0;
  std::size_t source = 0;  // index into provenance
};

struct MenuSample {
  std::size_t level = 0;
  std::vector<MenuEntry> samples;
  std::vector<Json> provenance;  // declared valuation per source

  Json to_json() const;
};

// For each declared valuation in `family`, the special player declares it
// against fixed `others`; records X and the special player's payment over
// `trials` runs. Weights are uniform and sum to 1.
MenuSample extract_menu(const Mechanism& mech, const std::vector<ValuationOracle>& others,
                        std::size_t player, const ItemSet& block, std::size_t level,
                        const std::vector<ValuationOracle>& family, std::size_t trials,
                        std::uint64_t seed);

// λ a + (1 - λ) b; sources of b are renumbered after those of a.
MenuSample mix_menus(const MenuSample& a, const MenuSample& b, double lambda);

enum class MenuRole { level_j, level_j_plus_1 };

struct MenuPoint {
  double q = 0.0;
  double p = 0.0;
};

// Image of the whole sample viewed as one distribution.
MenuPoint menu_image(const MenuSample& menu, const Phi& phi, double epsilon, std::size_t ell,
                     MenuRole role);
// One point per source.
std::vector<MenuPoint> map_menu_to_qp(const MenuSample& menu, const Phi& phi, double epsilon,
                                      std::size_t ell, MenuRole role);

struct SeparationWitness {
  MenuPoint point;
  std::vector<double> weights;  // over the input points
};

struct SeparationLine {
  double lambda_q = 0.0;  // λ'
  double lambda_p = 0.0;  // λ''
  double margin = 0.0;    // min over points of (λ'q0 - λ''p0) - (λ'q - λ''p) > 0
};

using SeparationResult = std::variant<SeparationWitness, SeparationLine>;

// Either a point of hull(points) in {q >= q0, p <= p0} or a line strictly
// separating the hull from that quadrant.
SeparationResult separate_quadrant(std::span<const MenuPoint> points, MenuPoint target);

// Indices of the convex hull in counter-clockwise order, collinear points
// dropped; coordinates closer than 1e-12 are identified.
std::vector<std::size_t> convex_hull(std::span<const MenuPoint> points);

// ---- gap amplification ------------------------------------------------------

struct AmplificationState {
  std::size_t level = 0;
  double alpha = 1.0;
  double xi = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;

  Json to_json() const;
};

struct AmplificationCertificate {
  int case_id = 0;             // 1 or 2
  double tail = 0.0;           // Pr[X / α_j > √δ]
  double hypothesis_lhs = 0.0; // E[1 - (1 - φ_{α_j}(X))^2]
  bool hypothesis = false;     // hypothesis_lhs >= (1 - 2ε) ξ_j
  double lhs = 0.0;            // α_{j+1} ξ_{j+1}^{1+δ}
  double rhs = 0.0;            // ((1+δ²)/2) α_j ξ_j^{1+δ}
  bool holds = false;
  bool vacuous() const { return !hypothesis; }

  Json to_json() const;
};

struct AmplificationResult {
  AmplificationState next;
  AmplificationCertificate certificate;
};

// Default constants: δ = e^{-10}, ε = δ^4.
double default_delta();
AmplificationState initial_amplification_state(double c, double delta);

// `samples` is an empirical distribution of X_{j+1} in [0, 1] (uniform weights).
AmplificationResult amplification_step(std::span<const double> samples,
                                       const AmplificationState& state);

struct TelescopeReport {
  std::size_t ell = 0;
  double c = 0.0;
  double delta = 0.0;
  std::vector<AmplificationState> states;
  std::vector<AmplificationCertificate> certificates;
  double final_lhs = 0.0;  // α_ℓ ξ_ℓ^{1+δ}
  double final_rhs = 0.0;  // ((1+δ²)/2)^ℓ c^{1+δ}
  double mean_x_last = 0.0;
  bool chain_ok = false;     // final_lhs >= final_rhs (1 - 1e-9)
  bool mean_ok = false;      // E[X_ℓ] >= α_ℓ ξ_ℓ

  Json to_json() const;
};

struct AmplificationSweep {
  double delta = 0.0;
  std::size_t distributions = 0;
  std::uint64_t seed = 0;
  std::size_t case1 = 0;
  std::size_t case2 = 0;
  std::size_t failures = 0;
  double worst_ratio = 0.0;  // min lhs / rhs
  Json worst;                // state and sample summary at the worst ratio

  bool pass() const { return failures == 0; }
  Json to_json() const;
};

// Random empirical distributions with random (α_j, ξ_j) chosen so that the
// step hypothesis holds; counts certificate failures.
AmplificationSweep amplification_sweep(double delta, std::size_t distributions,
                                       std::size_t max_support, std::uint64_t seed);

// Runs ℓ steps from (α_0 = 1, ξ_0 = c). Each step draws random empirical
// distributions of X_{j+1} until one satisfies the step hypothesis.
TelescopeReport telescope_amplification(std::size_t ell, double c, double delta,
                                        std::size_t samples_per_level, std::uint64_t seed);

// ---- scalar inequalities ----------------------------------------------------

struct InequalityResult {
  std::string name;
  std::size_t points = 0;
  std::size_t violations = 0;
  double min_slack = 0.0;
  double argmin_delta = 0.0;
  double argmin_x = 0.0;

  Json to_json() const;
};

struct InequalityReport {
  std::vector<InequalityResult> results;
  double tolerance = 1e-12;

  bool pass() const;
  Json to_json() const;
};

// Grids for the inequalities used in the amplification proof. Each grid must
// lie inside the domain on which its inequality is claimed.
struct InequalityGrids {
  std::vector<double> power_delta;   // (1+δ)^δ <= 1+δ², δ in [0,1]
  std::vector<double> case2_delta;   // (1-4δ+2δ^{3/2})^{1+δ} >= 1-4δ, δ in [0,1/4]
  std::vector<double> case1_delta;   // (1+2δ²-2δ⁴)^{1+δ} >= 1+2δ²+δ⁴, δ in [0,1/2]
  // min{2u, 1+δ} >= 1-(1-min{u,1})² + δ with u = x/α = √δ + t (2 - √δ):
  // δ in [0,1], t in [0,1].
  std::vector<double> ordering_delta;
  std::vector<double> ordering_t;

  // `points` per one-dimensional grid; the two-dimensional grid has about
  // `points` nodes and always contains δ = e^{-10} and δ = 0.05.
  static InequalityGrids dense(std::size_t points);
};

InequalityReport scalar_inequality_suite(const InequalityGrids& grids, double tolerance = 1e-12);

// n evenly spaced points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

// ---- Chernoff, counting, scaling -----------------------------------------

struct ChernoffReport {
  std::size_t m_prime = 0;
  double beta = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t exceed = 0;
  double empirical = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool pass = false;

  Json to_json() const;
};

// S = first m'/2 items; event ||S∩A| - |S∩B|| > β m' for a uniform bisection.
ChernoffReport chernoff_bisection_test(std::size_t m_prime, double beta, std::size_t trials,
                                       std::uint64_t seed, std::size_t workers = 1);

struct CountingReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double empirical = 0.0;
  double std_error = 0.0;
  double analytic = 0.0;
  bool within = false;
  bool above_half = false;

  bool pass() const { return within && above_half; }
  Json to_json() const;
};

CountingReport basic_instance_counting(std::size_t n, std::size_t m, std::size_t trials,
                                       std::uint64_t seed, std::size_t workers = 1);

struct ScalingPoint {
  double alpha = 0.0;
  double value = 0.0;  // E[v(A(α v))]
  double std_error = 0.0;
  double envelope = 0.0;  // max_w (1-ε) v(A(w)) - [w(A(w)) - (1-ε) w(A(αv))] / α
  bool within = true;
};

struct WeakMonotonicityCheck {
  std::size_t u = 0;
  std::size_t v = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double std_error = 0.0;
  bool violation = false;
};

struct ScalingReport {
  std::string mechanism;
  double epsilon = 0.0;
  std::vector<ScalingPoint> trace;
  double sup_estimate = 0.0;  // max over probes w of v(A(w))
  std::vector<WeakMonotonicityCheck> pairs;
  std::size_t envelope_violations = 0;
  std::size_t monotonicity_violations = 0;
  bool trace_constant = false;

  Json to_json() const;
};

// Single-player CPP. Declarations are α v for α in the schedule plus the
// supplied probe valuations w; all pairs among them are checked against the
// approximate weak-monotonicity inequality.
ScalingReport scaling_probe(const Mechanism& mech, const ValuationOracle& v, std::size_t k,
                            std::span<const double> alpha_schedule,
                            const std::vector<ValuationOracle>& probes, std::size_t trials,
                            double epsilon, std::uint64_t seed);

}  // namespace symgap
