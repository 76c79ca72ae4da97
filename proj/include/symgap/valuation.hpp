#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "symgap/item_set.hpp"

namespace symgap {

using Json = nlohmann::json;

// A set function that depends on S only through (|S ∩ A|, |S ∩ B|) for two
// disjoint blocks A, B. Exact multilinear evaluation exploits this.
class BlockProfile {
 public:
  virtual ~BlockProfile() = default;
  virtual const ItemSet& block_a() const = 0;
  virtual const ItemSet& block_b() const = 0;
  // Value of any set with `a` items from A and `b` items from B.
  virtual double profile(std::size_t a, std::size_t b) const = 0;
};

// Immutable set function. Implementations must be safe to evaluate concurrently.
class SetFunction {
 public:
  virtual ~SetFunction() = default;
  virtual std::size_t ground_size() const = 0;
  virtual double value(const ItemSet& s) const = 0;
  // {"kind": ..., "params": {...}}; enough to rebuild the function bit-exactly.
  virtual Json descriptor() const = 0;
  virtual const BlockProfile* block_profile() const { return nullptr; }
};

// Query-counted handle to a set function. Copies share the counter.
class ValuationOracle {
 public:
  ValuationOracle() = default;
  explicit ValuationOracle(std::shared_ptr<const SetFunction> fn,
                           std::optional<std::uint64_t> seed = std::nullopt);

  double eval(const ItemSet& s) const;
  std::uint64_t query_count() const { return queries_->load(std::memory_order_relaxed); }
  std::size_t ground_size() const { return fn_->ground_size(); }

  // {"kind", "params", "seed"}.
  Json descriptor() const;
  const BlockProfile* block_profile() const { return fn_->block_profile(); }
  const SetFunction& function() const { return *fn_; }
  std::shared_ptr<const SetFunction> function_ptr() const { return fn_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  // Same function, independent counter starting at zero.
  ValuationOracle with_fresh_counter() const;
  ValuationOracle with_seed(std::uint64_t seed) const;

  explicit operator bool() const { return static_cast<bool>(fn_); }

 private:
  std::shared_ptr<const SetFunction> fn_;
  std::shared_ptr<std::atomic<std::uint64_t>> queries_ =
      std::make_shared<std::atomic<std::uint64_t>>(0);
  std::optional<std::uint64_t> seed_;
};

// The only view of a valuation a mechanism receives: value queries and the
// ground size. Descriptors and block structure are not reachable from here.
class QueryHandle {
 public:
  explicit QueryHandle(ValuationOracle oracle) : oracle_(std::move(oracle)) {}

  double operator()(const ItemSet& s) const { return oracle_.eval(s); }
  double eval(const ItemSet& s) const { return oracle_.eval(s); }
  std::size_t ground_size() const { return oracle_.ground_size(); }
  std::uint64_t query_count() const { return oracle_.query_count(); }

 private:
  ValuationOracle oracle_;
};

std::vector<QueryHandle> make_handles(const std::vector<ValuationOracle>& oracles);

// Wraps `inner` so every query is reported to `observer` before evaluation.
// The wrapper has its own counter; queries are forwarded to (and counted by) `inner`.
using QueryObserver = std::function<void(const ItemSet&)>;
ValuationOracle observe_queries(const ValuationOracle& inner, QueryObserver observer);

// Rebuilds an oracle from descriptor(). Throws UsageError for kinds that are
// not reconstructible (custom, observed).
ValuationOracle oracle_from_descriptor(const Json& descriptor);

}  // namespace symgap
