#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "symgap/extensions.hpp"
#include "symgap/item_set.hpp"
#include "symgap/rng.hpp"
#include "symgap/valuation.hpp"

namespace symgap {

enum class Setting { cpp, auction };

std::string to_string(Setting setting);

struct Constraint {
  Setting setting = Setting::cpp;
  std::size_t m = 0;
  std::size_t k = 0;  // CPP cardinality bound; ignored for auctions
  std::size_t players = 1;

  Json to_json() const;
};

// CPP outcomes carry a single shared set in allocation[0]; auction outcomes
// carry one bundle per player. An empty payment vector means "no payments".
struct Outcome {
  std::vector<ItemSet> allocation;
  std::vector<double> payments;
};

// Mechanisms see the players only through QueryHandle.
class Mechanism {
 public:
  virtual ~Mechanism() = default;
  virtual std::string name() const = 0;
  virtual Setting setting() const = 0;
  // Range distributions respect the cardinality bound only in expectation.
  virtual bool feasible_in_expectation() const { return false; }
  virtual Outcome allocate(std::span<const QueryHandle> players, const Constraint& constraint,
                           Rng& rng) const = 0;
};

struct CppSolution {
  ItemSet set;
  double value = 0.0;
};

struct AuctionSolution {
  std::vector<ItemSet> allocation;
  double welfare = 0.0;
};

// Sum of the players' values.
double social_value(std::span<const QueryHandle> players, const ItemSet& s);

// k steps of marginal-gain greedy on Σ v_i, lowest index on ties, stopping
// once no item has positive marginal. v_i(∅) = 0 is not queried.
ItemSet greedy_cpp(std::span<const QueryHandle> players, std::size_t k);

// First maximizer in ascending bitmask order over |S| <= k. m <= 24.
CppSolution exhaustive_opt_cpp(std::span<const QueryHandle> players, std::size_t k);

// Largest n · 3^m accepted by the auction subset DP.
inline constexpr double kMaxAuctionWork = 5e8;

// Welfare-maximizing allocation (items may stay unallocated) by dynamic
// programming over subsets. Among optimal allocations the first one found in
// submask order wins.
AuctionSolution exhaustive_opt_auction(std::span<const QueryHandle> players);

// Welfare-maximizing allocation with Clarke pivot payments.
Outcome vcg_auction_exhaustive(std::span<const QueryHandle> players);

struct PoissonMidrConfig {
  double initial_step = 0.5;
  double min_step = 1e-12;
  double tolerance = 1e-9;       // stop when one accepted step gains less
  double fd_step = 1e-6;         // finite-difference width
  std::size_t max_iterations = 100000;
  bool force = false;            // run outside the concave class (heuristic)
};

// Independent rounding: item j enters with probability 1 - e^{-x_j}.
struct PoissonDistribution {
  FractionalPoint x;
  FractionalPoint probabilities;
  double value = 0.0;  // F^exp(x)
  bool heuristic = false;
  std::size_t iterations = 0;

  ItemSet sample(Rng& rng) const;
  Json to_json() const;
};

// Kinds whose F^exp is concave: additive, polar, coverage, the α = 1
// two-block functions, and non-negative scalings of these.
bool has_concave_f_exp(const ValuationOracle& f);

// Projected ascent of F^exp over {x in [0,1]^m : Σ x_j <= k}. The evaluator
// is exact: blockwise when f is block-symmetric, otherwise 2^m enumeration.
PoissonDistribution poisson_midr_cpp(const ValuationOracle& f, std::size_t k,
                                     const PoissonMidrConfig& cfg = {});

// Same ascent for an arbitrary evaluator of F^exp on [0,1]^m.
PoissonDistribution maximize_f_exp(const std::function<double(const FractionalPoint&)>& f_exp_value,
                                   std::size_t m, std::size_t k, const PoissonMidrConfig& cfg);

// Euclidean projection onto {x in [0,1]^m : Σ x_j <= k}.
std::vector<double> project_capped_box(std::vector<double> y, double k);

std::unique_ptr<Mechanism> make_greedy_mechanism();
std::unique_ptr<Mechanism> make_exhaustive_cpp_mechanism();
std::unique_ptr<Mechanism> make_vcg_mechanism();
// Welfare-maximizing allocation; each winner pays the declared value of the bundle.
std::unique_ptr<Mechanism> make_pay_your_bid_mechanism();
// Queries `queries` uniform random k-subsets and returns the best one seen.
std::unique_ptr<Mechanism> make_random_query_mechanism(std::size_t queries);
// Scans items in random order and keeps an item when its marginal is at
// least `threshold` times the best single-item value, up to k items.
std::unique_ptr<Mechanism> make_balanced_threshold_mechanism(double threshold);
// Poisson-rounding MIDR over Σ v_i evaluated by 2^m enumeration (m <= 24).
std::unique_ptr<Mechanism> make_poisson_midr_mechanism(PoissonMidrConfig cfg = {});
// Ignores declarations.
std::unique_ptr<Mechanism> make_constant_mechanism(Setting setting, std::vector<ItemSet> allocation,
                                                   std::vector<double> payments);

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> allocation;  // hex
  double welfare = 0.0;
  std::vector<double> payments;
  std::vector<std::uint64_t> queries;   // per player
  bool feasible = true;
  std::string diagnostic;
};

struct EmpiricalReport {
  std::string mechanism;
  Constraint constraint;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> records;
  double mean_welfare = 0.0;
  double welfare_stderr = 0.0;
  std::vector<double> mean_payments;
  std::vector<double> payment_stderr;
  double mean_cardinality = 0.0;
  bool all_feasible = true;

  Json to_json() const;
  // trial,welfare,payments,queries (payments and queries ';'-joined).
  std::string to_csv() const;
};

// Runs `trials` independent trials. Trial t uses seed derive_seed(seed, t)
// and fresh query counters; the report does not depend on `workers`.
// Welfare is measured with the true functions and is not counted as queries.
EmpiricalReport run_mechanism(const Mechanism& mech, const std::vector<ValuationOracle>& players,
                              const Constraint& constraint, std::size_t trials, std::uint64_t seed,
                              std::size_t workers = 1);

// Empty string when feasible, otherwise a description of the violation.
std::string check_feasibility(const Mechanism& mech, const Outcome& outcome,
                              const Constraint& constraint);

}  // namespace symgap
