#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "symgap/item_set.hpp"
#include "symgap/valuation.hpp"

namespace symgap {

// Largest ground set for exhaustive (2^m) enumeration.
inline constexpr std::size_t kMaxExhaustiveItems = 24;

using Weights = std::vector<double>;

// f(S) = sum_{j in S} w_j.
ValuationOracle make_additive(const Weights& weights);

// f(S) = min(sum_{j in S} w_j, budget).
ValuationOracle make_budget_additive(const Weights& weights, double budget);

// f(S) = total weight of the universe elements covered by the items of S.
// cover_map[j] lists the universe elements covered by item j.
ValuationOracle make_coverage(const Weights& universe_weights,
                              const std::vector<std::vector<std::size_t>>& cover_map);

// f(S) = 1 - (1 - f1(S)) (1 - f2(S)). Both components must take values in
// [0, 1]; each evaluation queries f1 and f2 exactly once.
ValuationOracle compose_product(const ValuationOracle& f1, const ValuationOracle& f2);

// Polar valuation: |A ∩ S| + omega |S \ A|, omega in (0, 1).
ValuationOracle make_polar(const ItemSet& desired, double omega);

// value if bundle ⊆ S, else 0.
ValuationOracle make_single_minded(const ItemSet& bundle, double value);

// f(S) = scale * inner(S). Keeps block structure; each evaluation queries
// `inner` once.
ValuationOracle make_scaled(const ValuationOracle& inner, double scale);

// Arbitrary function, for experiments and tests. Not reconstructible from
// its descriptor.
ValuationOracle make_custom(std::size_t m, std::string name,
                            std::function<double(const ItemSet&)> fn);

enum class ViolationKind { normalization, monotonicity, submodularity };

struct StructureViolation {
  ViolationKind kind;
  ItemSet set;
  // Items involved; j is unused (npos) for monotonicity violations.
  std::size_t i = 0;
  std::size_t j = static_cast<std::size_t>(-1);
  // Submodularity: lhs = f(S+i) - f(S), rhs = f(S+i+j) - f(S+j).
  // Monotonicity: lhs = f(S+i), rhs = f(S).
  double lhs = 0.0;
  double rhs = 0.0;
};

struct VerifyOptions {
  bool sampled = false;           // required when m > kMaxExhaustiveItems
  std::size_t samples = 100000;   // sampled (S, i, j) triples
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  std::size_t max_reported = 1 << 16;
  std::size_t workers = 1;
};

struct StructureReport {
  bool exhaustive = true;
  std::size_t ground_size = 0;
  std::uint64_t checked = 0;          // inequalities checked
  std::uint64_t violation_count = 0;  // exact, even when the list is truncated
  std::vector<StructureViolation> violations;  // lexicographic subset order

  bool pass() const { return violation_count == 0; }
  Json to_json() const;
};

StructureReport check_monotone_submodular(const ValuationOracle& f,
                                          const VerifyOptions& options = {});

inline std::uint64_t query_count(const ValuationOracle& f) { return f.query_count(); }

std::string to_string(ViolationKind kind);

}  // namespace symgap
