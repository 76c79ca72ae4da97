#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symgap/rng.hpp"
#include "symgap/valuation.hpp"

namespace symgap {

// Point of [0,1]^m.
class FractionalPoint {
 public:
  FractionalPoint() = default;
  explicit FractionalPoint(std::vector<double> x);
  static FractionalPoint constant(std::size_t m, double value);
  static FractionalPoint indicator(const ItemSet& s);

  std::size_t size() const { return x_.size(); }
  double operator[](std::size_t j) const { return x_[j]; }
  std::span<const double> values() const { return x_; }
  FractionalPoint midpoint(const FractionalPoint& other) const;

 private:
  std::vector<double> x_;
};

enum class EstimatorMode { monte_carlo, exact_enum, exact_blockwise };

std::string to_string(EstimatorMode mode);

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::monte_carlo;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  // Monte-Carlo only: each worker draws from its own stream derived from the
  // seed, so the result depends on (seed, workers).
  std::size_t workers = 1;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  EstimatorMode mode = EstimatorMode::exact_enum;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  Json to_json() const;
};

// F(x) = E[f(R)] where R contains item j independently with probability x_j.
Estimate multilinear_F(const ValuationOracle& f, const FractionalPoint& x,
                       const EstimatorConfig& cfg);

// F^exp(x) = F(1 - e^{-x_1}, ..., 1 - e^{-x_m}).
Estimate f_exp(const ValuationOracle& f, const FractionalPoint& x, const EstimatorConfig& cfg);

// (1 - e^{-x_j})_j.
FractionalPoint poisson_transform(const FractionalPoint& x);

// Exact F at the point that is xA on block A, xB on block B and 0 elsewhere:
// sum_{a,b} Bin(|A|,xA)(a) Bin(|B|,xB)(b) profile(a, b).
double exact_F_blockwise(const BlockProfile& blocks, double x_a, double x_b);

// Exact F for a block-symmetric function at an arbitrary point; per-block
// counts follow Poisson-binomial laws.
double exact_F_block_point(const BlockProfile& blocks, const FractionalPoint& x);

// Binomial(n, p) probabilities computed in log space.
std::vector<double> binomial_pmf(std::size_t n, double p);
// Law of the number of successes among independent Bernoulli(p_i).
std::vector<double> poisson_binomial_pmf(std::span<const double> probs);

struct ConcavityViolation {
  FractionalPoint x;
  FractionalPoint y;
  double lhs = 0.0;    // g((x+y)/2)
  double rhs = 0.0;    // (g(x)+g(y))/2
  double slack = 0.0;  // lhs - rhs
};

using PointPair = std::pair<FractionalPoint, FractionalPoint>;
// Produces pairs until exhausted (nullopt).
using PairSource = std::function<std::optional<PointPair>()>;

// Uniform random pairs in [0,1]^m.
PairSource random_pair_source(std::size_t m, std::uint64_t seed);
// Uniform random block-constant pairs: values constant on [0, m/2) and [m/2, m).
PairSource random_block_pair_source(std::size_t m, std::uint64_t seed);
// Deterministic grid search: for every grid point x (step h) and every
// direction d in {-1,0,1}^m \ {0}, the pair (x, x + 2h d) when it stays in [0,1]^m.
PairSource grid_pair_source(std::size_t m, double step);
PairSource explicit_pair_source(std::vector<PointPair> pairs);
// Alternates draws from `first` and `second`.
PairSource interleave(PairSource first, PairSource second);

// Midpoint concavity probe: reports every sampled pair with
// g((x+y)/2) < (g(x)+g(y))/2 - tol. Stops after `trials` pairs or when the
// source is exhausted.
std::vector<ConcavityViolation> concavity_probe(
    const std::function<double(const FractionalPoint&)>& g, const PairSource& sampler,
    std::size_t trials, double tol);

}  // namespace symgap
