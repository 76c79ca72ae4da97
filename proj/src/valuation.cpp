#include "symgap/valuation.hpp"

#include "symgap/error.hpp"

namespace symgap {

ValuationOracle::ValuationOracle(std::shared_ptr<const SetFunction> fn,
                                 std::optional<std::uint64_t> seed)
    : fn_(std::move(fn)), seed_(seed) {
  if (!fn_) throw ConstructionError("ValuationOracle requires a set function");
}

double ValuationOracle::eval(const ItemSet& s) const {
  if (s.ground_size() != fn_->ground_size()) {
    throw UsageError("query set has the wrong ground size");
  }
  queries_->fetch_add(1, std::memory_order_relaxed);
  return fn_->value(s);
}

Json ValuationOracle::descriptor() const {
  Json d = fn_->descriptor();
  d["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
  return d;
}

ValuationOracle ValuationOracle::with_fresh_counter() const {
  return ValuationOracle(fn_, seed_);
}

ValuationOracle ValuationOracle::with_seed(std::uint64_t seed) const {
  ValuationOracle o = *this;
  o.seed_ = seed;
  return o;
}

std::vector<QueryHandle> make_handles(const std::vector<ValuationOracle>& oracles) {
  std::vector<QueryHandle> out;
  out.reserve(oracles.size());
  for (const auto& o : oracles) out.emplace_back(o);
  return out;
}

namespace {

class ObservedFunction final : public SetFunction {
 public:
  ObservedFunction(ValuationOracle inner, QueryObserver observer)
      : inner_(std::move(inner)), observer_(std::move(observer)) {}

  std::size_t ground_size() const override { return inner_.ground_size(); }
  double value(const ItemSet& s) const override {
    observer_(s);
    return inner_.eval(s);
  }
  Json descriptor() const override {
    return {{"kind", "observed"}, {"params", {{"inner", inner_.descriptor()}}}};
  }

 private:
  ValuationOracle inner_;
  QueryObserver observer_;
};

}  // namespace

ValuationOracle observe_queries(const ValuationOracle& inner, QueryObserver observer) {
  return ValuationOracle(std::make_shared<ObservedFunction>(inner, std::move(observer)),
                         inner.seed());
}

}  // namespace symgap
