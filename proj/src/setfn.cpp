#include "symgap/setfn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "symgap/error.hpp"
#include "symgap/parallel.hpp"
#include "symgap/rng.hpp"

namespace symgap {
namespace {

void validate_weights(const Weights& w, const char* what) {
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ConstructionError(std::string(what) + ": weights must be finite and non-negative");
    }
  }
}

double weighted_sum(const Weights& w, const ItemSet& s) {
  double total = 0.0;
  for (std::size_t j : s.items()) total += w[j];
  return total;
}

class AdditiveFunction final : public SetFunction {
 public:
  explicit AdditiveFunction(Weights w) : w_(std::move(w)) {}
  std::size_t ground_size() const override { return w_.size(); }
  double value(const ItemSet& s) const override { return weighted_sum(w_, s); }
  Json descriptor() const override {
    return {{"kind", "additive"}, {"params", {{"weights", w_}}}};
  }

 private:
  Weights w_;
};

class BudgetAdditiveFunction final : public SetFunction {
 public:
  BudgetAdditiveFunction(Weights w, double budget) : w_(std::move(w)), budget_(budget) {}
  std::size_t ground_size() const override { return w_.size(); }
  double value(const ItemSet& s) const override {
    return std::min(weighted_sum(w_, s), budget_);
  }
  Json descriptor() const override {
    return {{"kind", "budget_additive"}, {"params", {{"weights", w_}, {"budget", budget_}}}};
  }

 private:
  Weights w_;
  double budget_;
};

class CoverageFunction final : public SetFunction {
 public:
  CoverageFunction(Weights universe, std::vector<std::vector<std::size_t>> cover)
      : universe_(std::move(universe)), cover_(std::move(cover)) {
    masks_.reserve(cover_.size());
    for (const auto& c : cover_) masks_.push_back(ItemSet::from_items(universe_.size(), c));
  }
  std::size_t ground_size() const override { return cover_.size(); }
  double value(const ItemSet& s) const override {
    ItemSet covered(universe_.size());
    for (std::size_t j : s.items()) covered = covered | masks_[j];
    return weighted_sum(universe_, covered);
  }
  Json descriptor() const override {
    return {{"kind", "coverage"},
            {"params", {{"universe_weights", universe_}, {"cover_map", cover_}}}};
  }

 private:
  Weights universe_;
  std::vector<std::vector<std::size_t>> cover_;
  std::vector<ItemSet> masks_;
};

class ProductFunction final : public SetFunction {
 public:
  ProductFunction(ValuationOracle f1, ValuationOracle f2)
      : f1_(std::move(f1)), f2_(std::move(f2)) {}
  std::size_t ground_size() const override { return f1_.ground_size(); }
  double value(const ItemSet& s) const override {
    double a = f1_.eval(s);
    double b = f2_.eval(s);
    constexpr double kSlack = 1e-12;
    if (!(a >= -kSlack && a <= 1.0 + kSlack) || !(b >= -kSlack && b <= 1.0 + kSlack)) {
      throw RangeError("compose_product: component value outside [0, 1]");
    }
    return 1.0 - (1.0 - a) * (1.0 - b);
  }
  Json descriptor() const override {
    return {{"kind", "product"},
            {"params", {{"f1", f1_.descriptor()}, {"f2", f2_.descriptor()}}}};
  }

 private:
  ValuationOracle f1_;
  ValuationOracle f2_;
};

class PolarFunction final : public SetFunction {
 public:
  PolarFunction(ItemSet desired, double omega) : desired_(std::move(desired)), omega_(omega) {}
  std::size_t ground_size() const override { return desired_.ground_size(); }
  double value(const ItemSet& s) const override {
    std::size_t in = s.intersection_count(desired_);
    std::size_t out = s.count() - in;
    return static_cast<double>(in) + omega_ * static_cast<double>(out);
  }
  Json descriptor() const override {
    return {{"kind", "polar"},
            {"params", {{"m", desired_.ground_size()}, {"desired", desired_.to_hex()},
                        {"omega", omega_}}}};
  }

 private:
  ItemSet desired_;
  double omega_;
};

class SingleMindedFunction final : public SetFunction {
 public:
  SingleMindedFunction(ItemSet bundle, double v) : bundle_(std::move(bundle)), value_(v) {}
  std::size_t ground_size() const override { return bundle_.ground_size(); }
  double value(const ItemSet& s) const override {
    return bundle_.is_subset_of(s) ? value_ : 0.0;
  }
  Json descriptor() const override {
    return {{"kind", "single_minded"},
            {"params", {{"m", bundle_.ground_size()}, {"bundle", bundle_.to_hex()},
                        {"value", value_}}}};
  }

 private:
  ItemSet bundle_;
  double value_;
};

class ScaledFunction final : public SetFunction, public BlockProfile {
 public:
  ScaledFunction(ValuationOracle inner, double scale)
      : inner_(std::move(inner)), scale_(scale), blocks_(inner_.block_profile()) {}
  std::size_t ground_size() const override { return inner_.ground_size(); }
  double value(const ItemSet& s) const override { return scale_ * inner_.eval(s); }
  Json descriptor() const override {
    return {{"kind", "scaled"}, {"params", {{"inner", inner_.descriptor()}, {"scale", scale_}}}};
  }
  const BlockProfile* block_profile() const override { return blocks_ ? this : nullptr; }

  const ItemSet& block_a() const override { return blocks_->block_a(); }
  const ItemSet& block_b() const override { return blocks_->block_b(); }
  double profile(std::size_t a, std::size_t b) const override {
    return scale_ * blocks_->profile(a, b);
  }

 private:
  ValuationOracle inner_;
  double scale_;
  const BlockProfile* blocks_;
};

class CustomFunction final : public SetFunction {
 public:
  CustomFunction(std::size_t m, std::string name, std::function<double(const ItemSet&)> fn)
      : m_(m), name_(std::move(name)), fn_(std::move(fn)) {}
  std::size_t ground_size() const override { return m_; }
  double value(const ItemSet& s) const override { return fn_(s); }
  Json descriptor() const override {
    return {{"kind", "custom"}, {"params", {{"m", m_}, {"name", name_}}}};
  }

 private:
  std::size_t m_;
  std::string name_;
  std::function<double(const ItemSet&)> fn_;
};

}  // namespace

ValuationOracle make_additive(const Weights& weights) {
  validate_weights(weights, "make_additive");
  return ValuationOracle(std::make_shared<AdditiveFunction>(weights));
}

ValuationOracle make_budget_additive(const Weights& weights, double budget) {
  validate_weights(weights, "make_budget_additive");
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw ConstructionError("make_budget_additive: budget must be finite and non-negative");
  }
  return ValuationOracle(std::make_shared<BudgetAdditiveFunction>(weights, budget));
}

ValuationOracle make_coverage(const Weights& universe_weights,
                              const std::vector<std::vector<std::size_t>>& cover_map) {
  validate_weights(universe_weights, "make_coverage");
  if (cover_map.empty()) throw ConstructionError("make_coverage: no items");
  for (const auto& c : cover_map) {
    for (std::size_t u : c) {
      if (u >= universe_weights.size()) {
        throw ConstructionError("make_coverage: item covers an element outside the universe");
      }
    }
  }
  return ValuationOracle(std::make_shared<CoverageFunction>(universe_weights, cover_map));
}

ValuationOracle compose_product(const ValuationOracle& f1, const ValuationOracle& f2) {
  if (f1.ground_size() != f2.ground_size()) {
    throw ConstructionError("compose_product: ground sizes differ");
  }
  return ValuationOracle(std::make_shared<ProductFunction>(f1, f2));
}

ValuationOracle make_polar(const ItemSet& desired, double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw ConstructionError("make_polar: omega must lie in (0, 1)");
  return ValuationOracle(std::make_shared<PolarFunction>(desired, omega));
}

ValuationOracle make_single_minded(const ItemSet& bundle, double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ConstructionError("make_single_minded: value must be finite and non-negative");
  }
  return ValuationOracle(std::make_shared<SingleMindedFunction>(bundle, value));
}

ValuationOracle make_scaled(const ValuationOracle& inner, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw ConstructionError("make_scaled: scale must be finite and non-negative");
  }
  return ValuationOracle(std::make_shared<ScaledFunction>(inner, scale), inner.seed());
}

ValuationOracle make_custom(std::size_t m, std::string name,
                            std::function<double(const ItemSet&)> fn) {
  return ValuationOracle(std::make_shared<CustomFunction>(m, std::move(name), std::move(fn)));
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::normalization: return "normalization";
    case ViolationKind::monotonicity: return "monotonicity";
    case ViolationKind::submodularity: return "submodularity";
  }
  return "unknown";
}

Json StructureReport::to_json() const {
  Json list = Json::array();
  for (const auto& v : violations) {
    Json e = {{"kind", to_string(v.kind)}, {"set", v.set.items()}, {"i", v.i},
              {"lhs", v.lhs}, {"rhs", v.rhs}};
    if (v.kind == ViolationKind::submodularity) e["j"] = v.j;
    list.push_back(std::move(e));
  }
  return {{"exhaustive", exhaustive}, {"ground_size", ground_size}, {"checked", checked},
          {"violation_count", violation_count}, {"pass", pass()}, {"violations", list}};
}

namespace {

struct ChunkResult {
  std::uint64_t checked = 0;
  std::uint64_t count = 0;
  std::vector<StructureViolation> found;
};

void record(ChunkResult& r, std::size_t cap, StructureViolation v) {
  ++r.count;
  if (r.found.size() < cap) r.found.push_back(std::move(v));
}

StructureReport check_exhaustive(const ValuationOracle& f, const VerifyOptions& opt) {
  const std::size_t m = f.ground_size();
  const std::uint64_t total = 1ULL << m;
  std::vector<double> table(total);
  parallel_chunks(total, opt.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t mask = begin; mask < end; ++mask) {
      table[mask] = f.eval(ItemSet::from_mask(m, mask));
    }
  });

  const double tol = opt.tolerance;
  std::vector<ChunkResult> chunks(std::max<std::size_t>(1, opt.workers));
  parallel_chunks(total, opt.workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    ChunkResult& r = chunks[c];
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      const double fs = table[mask];
      if (mask == 0) {
        ++r.checked;
        if (std::abs(fs) > tol) {
          record(r, opt.max_reported,
                 {ViolationKind::normalization, ItemSet(m), 0, static_cast<std::size_t>(-1), fs, 0.0});
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t bi = 1ULL << i;
        if (mask & bi) continue;
        const double fsi = table[mask | bi];
        ++r.checked;
        if (fsi < fs - tol) {
          record(r, opt.max_reported,
                 {ViolationKind::monotonicity, ItemSet::from_mask(m, mask), i,
                  static_cast<std::size_t>(-1), fsi, fs});
        }
        for (std::size_t j = i + 1; j < m; ++j) {
          const std::uint64_t bj = 1ULL << j;
          if (mask & bj) continue;
          const double lhs = fsi - fs;
          const double rhs = table[mask | bi | bj] - table[mask | bj];
          ++r.checked;
          if (lhs < rhs - tol) {
            record(r, opt.max_reported,
                   {ViolationKind::submodularity, ItemSet::from_mask(m, mask), i, j, lhs, rhs});
          }
        }
      }
    }
  });

  StructureReport report;
  report.exhaustive = true;
  report.ground_size = m;
  for (auto& c : chunks) {
    report.checked += c.checked;
    report.violation_count += c.count;
    for (auto& v : c.found) {
      if (report.violations.size() < opt.max_reported) report.violations.push_back(std::move(v));
    }
  }
  return report;
}

StructureReport check_sampled(const ValuationOracle& f, const VerifyOptions& opt) {
  const std::size_t m = f.ground_size();
  if (m < 2) throw UsageError("sampled verification needs at least two items");
  std::vector<ChunkResult> chunks(std::max<std::size_t>(1, opt.workers));
  parallel_chunks(opt.samples, opt.workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    ChunkResult& r = chunks[c];
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(derive_seed(opt.seed, t));
      ItemSet s(m);
      const double density = rng.uniform();
      for (std::size_t x = 0; x < m; ++x) {
        if (rng.bernoulli(density)) s.insert(x);
      }
      std::size_t i = rng.below(m);
      std::size_t j = rng.below(m - 1);
      if (j >= i) ++j;
      s.erase(i);
      s.erase(j);
      if (i > j) std::swap(i, j);
      const double fs = f.eval(s);
      const double fsi = f.eval(s.with(i));
      const double fsj = f.eval(s.with(j));
      const double fsij = f.eval(s.with(i).with(j));
      r.checked += 2;
      if (fsi < fs - opt.tolerance) {
        record(r, opt.max_reported,
               {ViolationKind::monotonicity, s, i, static_cast<std::size_t>(-1), fsi, fs});
      }
      if (fsi - fs < fsij - fsj - opt.tolerance) {
        record(r, opt.max_reported,
               {ViolationKind::submodularity, s, i, j, fsi - fs, fsij - fsj});
      }
    }
  });
  StructureReport report;
  report.exhaustive = false;
  report.ground_size = m;
  for (auto& c : chunks) {
    report.checked += c.checked;
    report.violation_count += c.count;
    for (auto& v : c.found) {
      if (report.violations.size() < opt.max_reported) report.violations.push_back(std::move(v));
    }
  }
  return report;
}

}  // namespace

StructureReport check_monotone_submodular(const ValuationOracle& f, const VerifyOptions& options) {
  const std::size_t m = f.ground_size();
  if (options.sampled) return check_sampled(f, options);
  if (m > kMaxExhaustiveItems) {
    throw UsageError("check_monotone_submodular: m > 24 requires sampled mode");
  }
  return check_exhaustive(f, options);
}

}  // namespace symgap
