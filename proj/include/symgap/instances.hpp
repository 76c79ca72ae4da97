#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "symgap/item_set.hpp"
#include "symgap/rng.hpp"
#include "symgap/valuation.hpp"

namespace symgap {

// Non-decreasing concave test function φ: [0,1] -> [0,1]. Either the
// family φ_α(t) = min(t/α, 1) or a table of values on a uniform grid over
// [0,1] with linear interpolation (concavity is validated on construction).
class Phi {
 public:
  static Phi alpha(double alpha);
  static Phi tabulated(std::vector<double> values);

  double operator()(double t) const;
  // φ(max(t, 0)); the bounds below evaluate φ at x - β which may be negative.
  double clamped(double t) const;

  bool is_alpha_family() const { return table_.empty(); }
  double alpha_value() const { return alpha_; }
  Json to_json() const;
  static Phi from_json(const Json& j);

 private:
  Phi() = default;
  double alpha_ = 1.0;
  std::vector<double> table_;
};

// φ_α(t) = min(t/α, 1) for t in [0, 1], α in (0, 1].
double phi_alpha(double alpha, double t);

// ψ(x, y) = 1 - (1 - φ(x))(1 - φ(y)).
double psi(const Phi& phi, double x, double y);

// ψ with a band of half-width β around the diagonal on which the value
// depends only on x + y; outside the band the arguments are pulled toward the
// diagonal by β/2.
double psi_tilde(const Phi& phi, double beta, double x, double y);

// f̃(S) = ψ̃(|S∩A|/|A|, |S∩B|/|B|). A, B disjoint, non-empty, equal size.
ValuationOracle make_symgap_valuation(const ItemSet& a, const ItemSet& b, const Phi& phi,
                                      double beta);
// λ · f̃.
ValuationOracle make_scaled_symgap_valuation(const ItemSet& a, const ItemSet& b,
                                             const Phi& phi, double beta, double lambda);

// Unperturbed ψ(|S∩A|/|A|, |S∩B|/|B|). With φ = φ_α this equals the product
// composition of the two budget-additive functions min(|S∩A|/(α|A|), 1).
ValuationOracle make_block_product(const ItemSet& a, const ItemSet& b, const Phi& phi);

// Two blocks of `block_size` items (items [0, n) and [n, 2n)) with φ_α.
ValuationOracle make_gap_instance(std::size_t block_size, double alpha);

struct BisectionLevel {
  ItemSet a;
  ItemSet b;
};

// levels[j] = (A(j), B(j)) for j = 0..ell; levels[ell] = (M, M).
struct BisectionSequence {
  std::size_t ell = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::vector<BisectionLevel> levels;

  // A(j+1) = A(j) ∪ B(j); A(ell) = M.
  ItemSet parent(std::size_t j) const;
  Json to_json() const;
};

BisectionSequence sample_bisection_sequence(std::size_t ell, std::size_t m, std::uint64_t seed);

// Uniform partition of `parent` into two halves of equal size.
BisectionLevel random_bisection(const ItemSet& parent, Rng& rng);

// Uniform random subset of `parent` with `size` elements.
ItemSet random_subset(const ItemSet& parent, std::size_t size, Rng& rng);

// Standard instance parameters m = 400^ell, k = 200^ell, n = 2^ell,
// β = n m^{-1/2} = 10^{-ell}.
struct CppLevelParams {
  std::size_t ell = 1;
  std::size_t m = 400;
  std::size_t k = 200;
  std::size_t n = 2;
  double beta = 0.1;

  static CppLevelParams standard(std::size_t ell);
  Json to_json() const;
};

struct BasicAuctionInstance {
  std::size_t n = 0;
  std::size_t m = 0;
  double omega = 0.0;
  std::uint64_t seed = 0;
  std::vector<ItemSet> desired_sets;

  std::vector<ValuationOracle> valuations() const;
  Json to_json() const;
};

// Each player's desired set is a uniform random (m/n)-subset, independently.
BasicAuctionInstance make_basic_auction(std::size_t n, std::size_t m, double omega,
                                        std::uint64_t seed);

struct Balancedness {
  double x = 0.0;
  double y = 0.0;
  double gap = 0.0;
  bool balanced = true;
};

Balancedness balancedness(const ItemSet& s, const ItemSet& a, const ItemSet& b, double beta);

}  // namespace symgap
