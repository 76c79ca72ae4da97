#include <string>

#include "symgap/error.hpp"
#include "symgap/instances.hpp"
#include "symgap/setfn.hpp"
#include "symgap/valuation.hpp"

namespace symgap {
namespace {

ItemSet set_param(const Json& params, const char* key) {
  const auto m = params.at("m").get<std::size_t>();
  return ItemSet::from_hex(m, params.at(key).get<std::string>());
}

ValuationOracle build(const Json& d) {
  const std::string kind = d.at("kind").get<std::string>();
  const Json& p = d.at("params");
  if (kind == "additive") return make_additive(p.at("weights").get<Weights>());
  if (kind == "budget_additive") {
    return make_budget_additive(p.at("weights").get<Weights>(), p.at("budget").get<double>());
  }
  if (kind == "coverage") {
    return make_coverage(p.at("universe_weights").get<Weights>(),
                         p.at("cover_map").get<std::vector<std::vector<std::size_t>>>());
  }
  if (kind == "product") return compose_product(build(p.at("f1")), build(p.at("f2")));
  if (kind == "polar") return make_polar(set_param(p, "desired"), p.at("omega").get<double>());
  if (kind == "single_minded") {
    return make_single_minded(set_param(p, "bundle"), p.at("value").get<double>());
  }
  if (kind == "scaled") return make_scaled(build(p.at("inner")), p.at("scale").get<double>());
  if (kind == "symgap") {
    return make_symgap_valuation(set_param(p, "a"), set_param(p, "b"),
                                 Phi::from_json(p.at("phi")), p.at("beta").get<double>());
  }
  if (kind == "block_product") {
    return make_block_product(set_param(p, "a"), set_param(p, "b"), Phi::from_json(p.at("phi")));
  }
  throw UsageError("descriptor kind '" + kind + "' cannot be reconstructed");
}

}  // namespace

ValuationOracle oracle_from_descriptor(const Json& descriptor) {
  ValuationOracle o = build(descriptor);
  if (descriptor.contains("seed") && !descriptor.at("seed").is_null()) {
    return o.with_seed(descriptor.at("seed").get<std::uint64_t>());
  }
  return o;
}

}  // namespace symgap
