#include "symgap/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "symgap/audit.hpp"
#include "symgap/error.hpp"
#include "symgap/extensions.hpp"
#include "symgap/instances.hpp"
#include "symgap/mechanisms.hpp"
#include "symgap/setfn.hpp"

namespace symgap {

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Params {
 public:
  explicit Params(Json resolved) : j_(std::move(resolved)) {}
  long long i(const std::string& k) const { return j_.at(k).get<long long>(); }
  std::size_t u(const std::string& k) const {
    const long long v = i(k);
    if (v < 0) throw UsageError("parameter '" + k + "' must be non-negative");
    return static_cast<std::size_t>(v);
  }
  double r(const std::string& k) const { return j_.at(k).get<double>(); }
  std::string s(const std::string& k) const { return j_.at(k).get<std::string>(); }
  bool b(const std::string& k) const { return j_.at(k).get<bool>(); }

 private:
  Json j_;
};

struct Ctx {
  Params p;
  std::uint64_t seed;
  std::size_t workers;
  Report& rep;

  void check(const std::string& name, bool ok, const std::string& detail = {}) {
    rep.assertions.push_back({name, ok, detail});
  }
};

ItemSet range_set(std::size_t m, std::size_t lo, std::size_t hi) {
  ItemSet s(m);
  for (std::size_t j = lo; j < hi; ++j) s.insert(j);
  return s;
}

// ---- gap955 -----------------------------------------------------------------

void run_gap955(Ctx& c) {
  const std::size_t blocks = c.p.u("blocks");
  const double alpha = c.p.r("alpha");
  const ValuationOracle f = make_gap_instance(blocks, alpha);
  const BlockProfile& bp = *f.block_profile();
  const double one = -std::expm1(-1.0);
  const double half = -std::expm1(-0.5);
  const double indicator = exact_F_blockwise(bp, one, 0.0);
  const double midpoint = exact_F_blockwise(bp, half, half);
  const Phi phi = Phi::alpha(alpha);
  const double indicator_limit = phi(one);
  const double midpoint_limit = psi(phi, half, half);
  const double closed = 4.0 * std::exp(-0.5) - 4.0 * std::exp(-1.0);
  c.rep.metrics = {{"f_exp_indicator_m1", indicator},
                   {"f_exp_indicator_m1_limit", indicator_limit},
                   {"f_exp_half", midpoint},
                   {"f_exp_half_limit", midpoint_limit},
                   {"closed_form_4e^-1/2-4e^-1", closed},
                   {"midpoint_slack", midpoint - indicator},
                   {"evaluator", "exact_blockwise"}};
  c.check("indicator_value_is_1_up_to_finite_size", std::abs(indicator - 1.0) <= 1e-5,
          "|F^exp(1_M1) - 1| = " + num(std::abs(indicator - 1.0)) + " <= 1e-5");
  c.check("indicator_limit_is_1", indicator_limit == 1.0, "phi(1 - 1/e) = " + num(indicator_limit));
  c.check("midpoint_within_0.01_of_closed_form", std::abs(midpoint - closed) <= 0.01,
          "|" + num(midpoint) + " - " + num(closed) + "| <= 0.01");
  c.check("midpoint_within_0.01_of_limit", std::abs(midpoint - midpoint_limit) <= 0.01,
          "|" + num(midpoint) + " - " + num(midpoint_limit) + "| <= 0.01");
}

// ---- concavity --------------------------------------------------------------

void run_concavity(Ctx& c) {
  const std::size_t blocks = c.p.u("blocks");
  const std::size_t probes = c.p.u("probes");
  const double step = c.p.r("grid_step");
  const std::size_t m = 2 * blocks;

  const ValuationOracle f1 = make_gap_instance(blocks, 1.0);
  const BlockProfile* b1 = f1.block_profile();
  auto g1 = [b1](const FractionalPoint& x) { return exact_F_block_point(*b1, poisson_transform(x)); };
  const PairSource sampler = interleave(random_block_pair_source(m, derive_seed(c.seed, 1)),
                                        random_pair_source(m, derive_seed(c.seed, 2)));
  const auto v1 = concavity_probe(g1, sampler, probes, 1e-9);

  const ValuationOracle fh = make_gap_instance(blocks, 0.5);
  const BlockProfile* bh = fh.block_profile();
  auto gh = [bh](const FractionalPoint& x) { return exact_F_block_point(*bh, poisson_transform(x)); };
  const ItemSet m1 = range_set(m, 0, blocks);
  const ItemSet m2 = range_set(m, blocks, m);
  const auto vh = concavity_probe(
      gh, explicit_pair_source({{FractionalPoint::indicator(m1), FractionalPoint::indicator(m2)}}), 1,
      1e-9);

  const ValuationOracle budget = make_budget_additive({1, 1, 1, 2}, 2);
  std::map<std::vector<long>, double> cache;
  auto gb = [&](const FractionalPoint& x) {
    std::vector<long> key;
    for (double v : x.values()) key.push_back(std::lround(v / step));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = f_exp(budget, x, {EstimatorMode::exact_enum}).value;
    cache.emplace(std::move(key), v);
    return v;
  };
  const auto vb = concavity_probe(gb, grid_pair_source(4, step), static_cast<std::size_t>(-1), 1e-9);

  auto worst = [](const std::vector<ConcavityViolation>& vs) -> Json {
    if (vs.empty()) return nullptr;
    const auto& w = *std::min_element(vs.begin(), vs.end(), [](const auto& a, const auto& b) {
      return a.slack < b.slack;
    });
    auto vec = [](const FractionalPoint& p) {
      return std::vector<double>(p.values().begin(), p.values().end());
    };
    Json j = {{"lhs", w.lhs}, {"rhs", w.rhs}, {"slack", w.slack}};
    if (w.x.size() <= 8) {
      j["x"] = vec(w.x);
      j["y"] = vec(w.y);
    }
    return j;
  };
  const double half_slack = vh.empty() ? 0.0 : vh.front().slack;
  c.rep.metrics = {{"alpha1", {{"probes", probes}, {"violations", v1.size()}, {"worst", worst(v1)}}},
                   {"alpha_half_pair", {{"violations", vh.size()}, {"slack", half_slack}}},
                   {"budget_additive_grid",
                    {{"step", step},
                     {"violations", vb.size()},
                     {"evaluations", cache.size()},
                     {"worst", worst(vb)}}}};
  c.check("alpha1_concave_on_probes", v1.empty(), std::to_string(v1.size()) + " violations");
  c.check("alpha_half_pair_violates_by_0.04", !vh.empty() && half_slack <= -0.04,
          "slack " + num(half_slack));
  c.check("budget_additive_grid_finds_violation", !vb.empty(),
          std::to_string(vb.size()) + " violations");
}

// ---- structure checks -------------------------------------------------------

ValuationOracle random_coverage(std::size_t m, Rng& rng, bool normalized) {
  const std::size_t universe = 2 * m;
  Weights w(universe);
  double total = 0.0;
  for (double& x : w) total += (x = rng.uniform());
  if (normalized) {
    for (double& x : w) x /= total;
  }
  std::vector<std::vector<std::size_t>> cover(m);
  for (auto& cv : cover) {
    for (std::size_t u = 0; u < universe; ++u) {
      if (rng.bernoulli(0.25)) cv.push_back(u);
    }
  }
  return make_coverage(w, cover);
}

ValuationOracle random_budget_additive(std::size_t m, Rng& rng, double budget) {
  Weights w(m);
  for (double& x : w) x = rng.uniform(0.0, 0.5);
  return make_budget_additive(w, budget);
}

ValuationOracle random_symgap(std::size_t m, Rng& rng) {
  const std::size_t s = 1 + rng.below(m / 2);
  std::vector<std::size_t> items(m);
  std::iota(items.begin(), items.end(), 0);
  rng.shuffle(items);
  ItemSet a(m), b(m);
  for (std::size_t j = 0; j < s; ++j) {
    a.insert(items[j]);
    b.insert(items[s + j]);
  }
  const double alphas[] = {0.3, 0.5, 1.0};
  const double betas[] = {0.05, 0.1, 0.25};
  return make_symgap_valuation(a, b, Phi::alpha(alphas[rng.below(3)]), betas[rng.below(3)]);
}

void run_submod_check(Ctx& c) {
  const std::string kind = c.p.s("kind");
  const std::size_t m = c.p.u("m");
  Rng rng(c.seed);
  ValuationOracle f;
  bool expect_pass = true;
  if (kind == "small-budget") {
    f = make_budget_additive({1, 1, 1, 2}, 2);
  } else if (kind == "additive") {
    Weights w(m);
    for (double& x : w) x = rng.uniform();
    f = make_additive(w);
  } else if (kind == "budget-additive") {
    f = random_budget_additive(m, rng, rng.uniform(0.5, 2.0));
  } else if (kind == "coverage") {
    f = random_coverage(m, rng, false);
  } else if (kind == "polar") {
    f = make_polar(random_subset(ItemSet::full(m), m / 2, rng), 0.1);
  } else if (kind == "symgap") {
    f = random_symgap(m, rng);
  } else if (kind == "square") {
    f = make_custom(m, "square", [](const ItemSet& s) {
      const double k = static_cast<double>(s.count());
      return k * k;
    });
    expect_pass = false;
  } else {
    throw UsageError("submod-check: unknown kind '" + kind + "'");
  }
  VerifyOptions opt;
  opt.sampled = c.p.b("sampled") || f.ground_size() > kMaxExhaustiveItems;
  opt.samples = c.p.u("samples");
  opt.seed = c.seed;
  opt.workers = c.workers;
  opt.max_reported = 100;
  const StructureReport r = check_monotone_submodular(f, opt);
  c.rep.metrics = {{"function", f.descriptor()}, {"report", r.to_json()}};
  c.check(expect_pass ? "passes" : "violation_found", r.pass() == expect_pass,
          std::to_string(r.violation_count) + " violations over " + std::to_string(r.checked) +
              " checks");
}

void run_product_compose(Ctx& c) {
  const std::size_t pairs = c.p.u("pairs");
  const std::size_t m = c.p.u("m");
  if (m > kMaxExhaustiveItems) throw UsageError("product-compose: m must be at most 24");
  auto component = [&](Rng& rng) -> ValuationOracle {
    switch (rng.below(4)) {
      case 0: return random_coverage(m, rng, true);
      case 1: return random_budget_additive(m, rng, rng.uniform(0.2, 1.0));
      case 2: {
        const ValuationOracle s = random_symgap(m, rng);
        return s;
      }
      default: {
        const std::size_t size = 1 + rng.below(m);
        const double omega = rng.uniform(0.01, 0.99);
        const double top = static_cast<double>(size) + omega * static_cast<double>(m - size);
        return make_scaled(make_polar(random_subset(ItemSet::full(m), size, rng), omega), 1.0 / top);
      }
    }
  };
  std::uint64_t violations = 0;
  std::uint64_t checked = 0;
  Json failures = Json::array();
  bool contract = true;
  std::ostringstream csv;
  csv << "pair,kind1,kind2,checked,violations\n";
  for (std::size_t i = 0; i < pairs; ++i) {
    Rng rng(derive_seed(c.seed, i));
    const ValuationOracle f1 = component(rng);
    const ValuationOracle f2 = component(rng);
    const ValuationOracle g = compose_product(f1, f2);
    const std::uint64_t q1 = f1.query_count();
    const std::uint64_t q2 = f2.query_count();
    g.eval(ItemSet::full(m));
    contract = contract && f1.query_count() == q1 + 1 && f2.query_count() == q2 + 1;
    VerifyOptions opt;
    opt.workers = c.workers;
    opt.max_reported = 4;
    const StructureReport r = check_monotone_submodular(g, opt);
    violations += r.violation_count;
    checked += r.checked;
    const std::string k1 = f1.descriptor().at("kind");
    const std::string k2 = f2.descriptor().at("kind");
    csv << i << ',' << k1 << ',' << k2 << ',' << r.checked << ',' << r.violation_count << '\n';
    if (!r.pass()) failures.push_back({{"pair", i}, {"f1", f1.descriptor()}, {"f2", f2.descriptor()}});
  }
  c.rep.csv = csv.str();
  c.rep.metrics = {{"pairs", pairs}, {"m", m}, {"checked", checked},
                   {"violations", violations}, {"failures", failures}};
  c.check("all_products_monotone_submodular", violations == 0,
          std::to_string(violations) + " violations over " + std::to_string(checked) + " checks");
  c.check("one_query_per_component", contract);
}

void run_psi_tilde_check(Ctx& c) {
  const std::size_t lo = c.p.u("min_block");
  const std::size_t hi = c.p.u("max_block");
  const std::size_t grid = c.p.u("grid");
  if (lo < 1 || hi < lo || 2 * hi > kMaxExhaustiveItems) {
    throw UsageError("psi-tilde-check: need 1 <= min_block <= max_block <= 12");
  }
  const double alphas[] = {0.3, 0.5, 1.0};
  const double betas[] = {0.05, 0.1, 0.25};
  std::uint64_t structure_violations = 0;
  std::uint64_t bound_violations = 0;
  std::uint64_t sets_checked = 0;
  std::uint64_t grid_failures = 0;
  Json cases = Json::array();
  for (std::size_t s = lo; s <= hi; ++s) {
    const std::size_t m = 2 * s;
    const ItemSet a = range_set(m, 0, s);
    const ItemSet b = range_set(m, s, m);
    for (double alpha : alphas) {
      const Phi phi = Phi::alpha(alpha);
      for (double beta : betas) {
        const ValuationOracle f = make_symgap_valuation(a, b, phi, beta);
        VerifyOptions opt;
        opt.workers = c.workers;
        opt.max_reported = 4;
        const StructureReport r = check_monotone_submodular(f, opt);
        structure_violations += r.violation_count;
        std::uint64_t bound_bad = 0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
          const ItemSet set = ItemSet::from_mask(m, mask);
          const double x = static_cast<double>(set.intersection_count(a)) / static_cast<double>(s);
          if (f.function().value(set) < phi.clamped(x - beta) - 1e-12) ++bound_bad;
          ++sets_checked;
        }
        bound_violations += bound_bad;
        cases.push_back({{"block", s}, {"alpha", alpha}, {"beta", beta},
                         {"structure_violations", r.violation_count}, {"bound_violations", bound_bad}});
      }
    }
  }
  // Grid properties of ψ̃ itself.
  Json grid_cases = Json::array();
  const double h = 1.0 / static_cast<double>(grid);
  for (double alpha : alphas) {
    const Phi phi = Phi::alpha(alpha);
    for (double beta : betas) {
      std::uint64_t mono = 0, sym = 0, lip = 0, concave = 0, band = 0;
      auto at = [&](std::size_t i, std::size_t j) {
        return psi_tilde(phi, beta, static_cast<double>(i) * h, static_cast<double>(j) * h);
      };
      for (std::size_t i = 0; i <= grid; ++i) {
        for (std::size_t j = 0; j <= grid; ++j) {
          const double v = at(i, j);
          if (v != at(j, i)) ++sym;
          const double x = static_cast<double>(i) * h;
          const double y = static_cast<double>(j) * h;
          if (std::abs(x - y) <= beta && v != psi(phi, 0.5 * (x + y), 0.5 * (x + y))) ++band;
          if (i < grid) {
            const double d = at(i + 1, j) - v;
            if (d < -1e-12) ++mono;
            if (std::abs(d) > h / alpha + 1e-12) ++lip;
            if (i + 1 < grid && at(i + 2, j) - at(i + 1, j) > d + 1e-12) ++concave;
          }
        }
      }
      const std::uint64_t total = mono + sym + lip + concave + band;
      grid_failures += total;
      grid_cases.push_back({{"alpha", alpha}, {"beta", beta}, {"monotonicity", mono},
                            {"symmetry", sym}, {"lipschitz", lip},
                            {"marginal_concavity", concave}, {"band_diagonal_only", band}});
    }
  }
  c.rep.metrics = {{"cases", cases},
                   {"sets_checked", sets_checked},
                   {"structure_violations", structure_violations},
                   {"bound_violations", bound_violations},
                   {"grid", grid},
                   {"grid_cases", grid_cases}};
  c.check("symgap_monotone_submodular", structure_violations == 0,
          std::to_string(structure_violations) + " violations");
  c.check("pointwise_lower_bound", bound_violations == 0,
          std::to_string(bound_violations) + " of " + std::to_string(sets_checked) + " sets");
  c.check("psi_tilde_grid_properties", grid_failures == 0, std::to_string(grid_failures) + " failures");
}

// ---- probability checks -----------------------------------------------------

void run_chernoff(Ctx& c) {
  const std::size_t m = c.p.u("m");
  const double beta = c.p.r("beta");
  const std::size_t trials = c.p.u("trials");
  std::vector<std::pair<std::size_t, double>> cases;
  if (m == 0) cases = {{100, 0.2}, {400, 0.1}, {400, 0.2}};
  else cases = {{m, beta}};
  Json rs = Json::array();
  std::ostringstream csv;
  csv << "m_prime,beta,trials,empirical,stderr,bound\n";
  for (auto [mp, b] : cases) {
    const ChernoffReport r = chernoff_bisection_test(mp, b, trials, c.seed, c.workers);
    rs.push_back(r.to_json());
    csv << mp << ',' << num(b) << ',' << trials << ',' << num(r.empirical) << ','
        << num(r.std_error) << ',' << num(r.bound) << '\n';
    c.check("tail_below_bound_m" + std::to_string(mp) + "_beta" + num(b), r.pass,
            num(r.empirical) + " <= " + num(r.bound) + " + 3 * " + num(r.std_error));
  }
  c.rep.csv = csv.str();
  c.rep.metrics = {{"cases", rs}};
}

void run_bisect_uniformity(Ctx& c) {
  const std::size_t ell = c.p.u("ell");
  const std::size_t m = c.p.u("m");
  const std::size_t trials = c.p.u("trials");
  std::vector<double> single(m, 0.0);
  std::vector<std::vector<double>> pair(m, std::vector<double>(m, 0.0));
  std::uint64_t invariant_failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const BisectionSequence seq = sample_bisection_sequence(ell, m, derive_seed(c.seed, t));
    for (std::size_t j = 0; j < ell; ++j) {
      const auto& lv = seq.levels[j];
      const std::size_t size = m >> (ell - j);
      if (!lv.a.disjoint_from(lv.b) || (lv.a | lv.b) != seq.parent(j) || lv.a.count() != size ||
          lv.b.count() != size) {
        ++invariant_failures;
      }
    }
    if (seq.levels[ell].a != ItemSet::full(m) || seq.levels[ell].b != ItemSet::full(m)) {
      ++invariant_failures;
    }
    const std::vector<std::size_t> items = seq.levels[0].a.items();
    for (std::size_t i : items) {
      single[i] += 1.0;
      for (std::size_t k : items) {
        if (k > i) pair[i][k] += 1.0;
      }
    }
  }
  const double n = static_cast<double>(trials);
  const double s0 = static_cast<double>(m >> ell);
  const double p1 = s0 / static_cast<double>(m);
  const double p2 = s0 * (s0 - 1.0) / (static_cast<double>(m) * static_cast<double>(m - 1));
  double worst1 = 0.0, worst2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    worst1 = std::max(worst1, std::abs(single[i] / n - p1) / std::sqrt(p1 * (1 - p1) / n));
    for (std::size_t k = i + 1; k < m; ++k) {
      if (p2 > 0.0 && p2 < 1.0) {
        worst2 = std::max(worst2, std::abs(pair[i][k] / n - p2) / std::sqrt(p2 * (1 - p2) / n));
      }
    }
  }
  const double item0 = single[0] / n;
  const double z0 = std::abs(item0 - p1) / std::sqrt(p1 * (1 - p1) / n);
  std::ostringstream csv;
  csv << "item,frequency\n";
  for (std::size_t i = 0; i < m; ++i) csv << i << ',' << num(single[i] / n) << '\n';
  c.rep.csv = csv.str();
  c.rep.metrics = {{"p_item", p1},          {"p_pair", p2},
                   {"item0_frequency", item0}, {"item0_z", z0},
                   {"max_item_z", worst1},  {"max_pair_z", worst2},
                   {"invariant_failures", invariant_failures}};
  c.check("nesting_invariants", invariant_failures == 0);
  c.check("item0_within_3_sigma", z0 <= 3.0, "z = " + num(z0));
  c.check("all_items_within_4_sigma", worst1 <= 4.0, "max z = " + num(worst1));
  c.check("all_pairs_within_4_sigma", worst2 <= 4.0, "max z = " + num(worst2));
}

void run_basic_count(Ctx& c) {
  const std::size_t n = c.p.u("n");
  const std::size_t m = c.p.u("m");
  const std::size_t trials = c.p.u("trials");
  std::vector<std::pair<std::size_t, std::size_t>> cases;
  if (n == 0) cases = {{2, 4}, {4, 16}, {16, 160}};
  else cases = {{n, m}};
  Json rs = Json::array();
  for (auto [nn, mm] : cases) {
    const CountingReport r = basic_instance_counting(nn, mm, trials, c.seed, c.workers);
    rs.push_back(r.to_json());
    const std::string tag = "_n" + std::to_string(nn) + "_m" + std::to_string(mm);
    c.check("within_3_sigma" + tag, r.within,
            num(r.empirical) + " vs " + num(r.analytic) + " (stderr " + num(r.std_error) + ")");
    c.check("above_half" + tag, r.above_half);
  }
  c.rep.metrics = {{"cases", rs}};
}

// ---- mechanisms -------------------------------------------------------------

void run_greedy_ratio(Ctx& c) {
  const std::size_t instances = c.p.u("instances");
  const std::size_t max_m = c.p.u("max_m");
  const std::size_t max_k = c.p.u("max_k");
  if (max_m < 4 || max_m > 20 || max_k < 1) throw UsageError("greedy-ratio: need 4 <= max_m <= 20, max_k >= 1");
  const double bound = 1.0 - std::exp(-1.0);
  double worst = std::numeric_limits<double>::infinity();
  std::size_t failures = 0;
  std::ostringstream csv;
  csv << "instance,m,k,players,kinds,greedy,opt,ratio\n";
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(derive_seed(c.seed, i));
    const std::size_t m = max_m - 2 * rng.below(std::min<std::size_t>(4, max_m / 2 - 1));
    const std::size_t k = 1 + rng.below(std::min(max_k, m));
    const std::size_t players = 1 + rng.below(3);
    std::vector<ValuationOracle> vs;
    std::string kinds;
    for (std::size_t p = 0; p < players; ++p) {
      switch (rng.below(3)) {
        case 0: vs.push_back(random_coverage(m, rng, false)); break;
        case 1: vs.push_back(random_budget_additive(m, rng, rng.uniform(0.3, 2.0))); break;
        default: vs.push_back(random_symgap(m, rng)); break;
      }
      kinds += (p ? ";" : "") + vs.back().descriptor().at("kind").get<std::string>();
    }
    const std::vector<QueryHandle> hs = make_handles(vs);
    const ItemSet g = greedy_cpp(hs, k);
    const double gv = social_value(hs, g);
    const CppSolution opt = exhaustive_opt_cpp(hs, k);
    const double ratio = opt.value > 0.0 ? gv / opt.value : 1.0;
    worst = std::min(worst, ratio);
    if (gv < bound * opt.value - 1e-12) ++failures;
    csv << i << ',' << m << ',' << k << ',' << players << ',' << kinds << ',' << num(gv) << ','
        << num(opt.value) << ',' << num(ratio) << '\n';
  }
  c.rep.csv = csv.str();
  c.rep.metrics = {{"instances", instances}, {"worst_ratio", worst}, {"bound", bound},
                   {"failures", failures}};
  c.check("greedy_at_least_1-1/e_of_opt", failures == 0,
          "worst ratio " + num(worst) + ", " + std::to_string(failures) + " failures");
}

void run_poisson_midr(Ctx& c) {
  const std::size_t samples = c.p.u("samples");
  struct Case {
    std::string name;
    ValuationOracle f;
    std::size_t k;
    double closed;
  };
  auto single_universe = [](std::size_t m) {
    return make_coverage({1.0}, std::vector<std::vector<std::size_t>>(m, {0}));
  };
  const std::vector<Case> cases{
      {"additive_w10_k1", make_additive({1.0, 0.0}), 1, 1.0 - std::exp(-1.0)},
      {"additive_unit_m4_k2", make_additive({1, 1, 1, 1}), 2, 4.0 * (1.0 - std::exp(-0.5))},
      {"coverage_single_m4_k1", single_universe(4), 1, 1.0 - std::exp(-1.0)},
      {"coverage_single_m5_k2", single_universe(5), 2, 1.0 - std::exp(-2.0)},
  };
  Json rs = Json::array();
  std::ostringstream csv;
  csv << "case,sample,value\n";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& cs = cases[i];
    const PoissonDistribution d = poisson_midr_cpp(cs.f, cs.k);
    Rng rng(derive_seed(c.seed, i));
    std::vector<double> vals(samples);
    double sum = 0.0;
    for (std::size_t t = 0; t < samples; ++t) {
      vals[t] = cs.f.function().value(d.sample(rng));
      sum += vals[t];
    }
    const double mean = sum / static_cast<double>(samples);
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / static_cast<double>(samples - 1) / static_cast<double>(samples));
    rs.push_back({{"case", cs.name}, {"k", cs.k}, {"distribution", d.to_json()},
                  {"closed_form", cs.closed}, {"sample_mean", mean}, {"sample_stderr", se}});
    c.check(cs.name + "_matches_closed_form", std::abs(d.value - cs.closed) <= 1e-6,
            "|" + num(d.value) + " - " + num(cs.closed) + "| <= 1e-6");
    c.check(cs.name + "_sampling_within_3_sigma", std::abs(mean - d.value) <= 3.0 * se,
            "|" + num(mean) + " - " + num(d.value) + "| <= 3 * " + num(se));
    for (std::size_t t = 0; t < std::min<std::size_t>(samples, 1000); ++t) {
      csv << cs.name << ',' << t << ',' << num(vals[t]) << '\n';
    }
  }
  bool refused = false;
  try {
    poisson_midr_cpp(make_budget_additive({1, 1, 1, 2}, 2), 2);
  } catch (const UsageError&) {
    refused = true;
  }
  PoissonMidrConfig forced;
  forced.force = true;
  const PoissonDistribution h = poisson_midr_cpp(make_budget_additive({1, 1, 1, 2}, 2), 2, forced);
  c.rep.csv = csv.str();
  c.rep.metrics = {{"cases", rs}, {"samples", samples}, {"forced_budget_additive", h.to_json()}};
  c.check("refuses_non_concave_class", refused);
  c.check("forced_run_labeled_heuristic", h.heuristic);
}

std::vector<ValuationOracle> random_deviations(const std::vector<ValuationOracle>& truth,
                                               std::size_t player, std::size_t count, std::size_t m,
                                               Rng& rng) {
  std::vector<ValuationOracle> out;
  for (std::size_t d = 0; d < count; ++d) {
    switch (d % 5) {
      case 0:
        out.push_back(make_scaled(truth[player], rng.uniform(0.1, 3.0)));
        break;
      case 1:
        out.push_back(make_polar(random_subset(ItemSet::full(m), 1 + rng.below(m), rng),
                                 rng.uniform(0.01, 0.9)));
        break;
      case 2: {
        Weights w(m);
        for (double& x : w) x = rng.uniform(0.0, 2.0);
        out.push_back(make_additive(w));
        break;
      }
      case 3:
        out.push_back(random_budget_additive(m, rng, rng.uniform(0.5, 3.0)));
        break;
      default:
        out.push_back(make_single_minded(random_subset(ItemSet::full(m), 1 + rng.below(m), rng),
                                         rng.uniform(0.5, 8.0)));
        break;
    }
  }
  return out;
}

void run_vcg_audit(Ctx& c) {
  const std::size_t instances = c.p.u("instances");
  const std::size_t ndev = c.p.u("deviations");
  const std::size_t trials = c.p.u("trials");
  const std::size_t n = c.p.u("n");
  const std::size_t m = c.p.u("m");
  const double epsilon = c.p.r("epsilon");
  const auto vcg = make_vcg_mechanism();
  const auto pyb = make_pay_your_bid_mechanism();
  std::size_t vcg_violations = 0;
  std::size_t pyb_violations = 0;
  std::size_t ir_failures = 0;
  Json per = Json::array();
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint64_t s = derive_seed(c.seed, i);
    const BasicAuctionInstance inst = make_basic_auction(n, m, 0.1, s);
    const std::vector<ValuationOracle> truth = inst.valuations();
    const Constraint con{Setting::auction, m, m, n};
    Rng rng(derive_seed(s, 1));
    const std::size_t player = static_cast<std::size_t>(rng.below(n));
    const auto devs = random_deviations(truth, player, ndev, m, rng);
    const TruthReport rv = audit_truthfulness(*vcg, truth, con, player, devs, trials, epsilon,
                                              derive_seed(s, 2), c.workers);
    const TruthReport rp = audit_truthfulness(*pyb, truth, con, player, devs, trials, epsilon,
                                              derive_seed(s, 3), c.workers);
    vcg_violations += rv.violations;
    pyb_violations += rp.violations;
    const Outcome out = vcg_auction_exhaustive(make_handles(truth));
    for (std::size_t p = 0; p < n; ++p) {
      if (truth[p].function().value(out.allocation[p]) - out.payments[p] < -1e-9) ++ir_failures;
    }
    per.push_back({{"instance", inst.to_json()}, {"player", player},
                   {"vcg", rv.to_json()}, {"pay_your_bid_violations", rp.violations}});
  }
  c.rep.metrics = {{"instances", per},
                   {"vcg_violations", vcg_violations},
                   {"pay_your_bid_violations", pyb_violations},
                   {"vcg_ir_failures", ir_failures}};
  c.check("vcg_no_significant_violation", vcg_violations == 0, std::to_string(vcg_violations));
  c.check("vcg_individually_rational", ir_failures == 0);
  c.check("pay_your_bid_flagged", pyb_violations > 0, std::to_string(pyb_violations) + " violations");
}

void run_symgap(Ctx& c) {
  const std::size_t ell = c.p.u("ell");
  if (ell < 1 || ell > 2) {
    throw UsageError("symgap: standard parameters m = 400^ell are supported for ell in {1, 2} only");
  }
  GapConfig cfg;
  cfg.params = CppLevelParams::standard(ell);
  const long long level = c.p.i("level");
  cfg.level = level < 0 ? ell - 1 : static_cast<std::size_t>(level);
  cfg.phi = Phi::alpha(c.p.r("alpha"));
  const double beta = c.p.r("beta");
  cfg.beta = beta > 0.0 ? beta : cfg.params.beta;
  cfg.trials = c.p.u("trials");
  cfg.seed = c.seed;
  cfg.workers = c.workers;
  const std::string which = c.p.s("mechanism");
  std::vector<std::unique_ptr<Mechanism>> mechs;
  if (which == "all" || which == "random") mechs.push_back(make_random_query_mechanism(c.p.u("queries")));
  if (which == "all" || which == "greedy") mechs.push_back(make_greedy_mechanism());
  if (which == "all" || which == "balanced-threshold") {
    mechs.push_back(make_balanced_threshold_mechanism(c.p.r("threshold")));
  }
  if (mechs.empty()) throw UsageError("symgap: unknown mechanism '" + which + "'");
  Json rs = Json::array();
  std::ostringstream csv;
  csv << "mechanism,trial,queries,unbalanced,x,value,ceiling\n";
  for (const auto& mech : mechs) {
    const GapReport r = symmetry_gap_experiment(*mech, cfg);
    rs.push_back(r.to_json());
    for (std::size_t t = 0; t < r.trials.size(); ++t) {
      const GapTrial& g = r.trials[t];
      csv << mech->name() << ',' << t << ',' << g.queries << ',' << g.unbalanced << ','
          << num(g.x) << ',' << num(g.value) << ',' << num(g.ceiling) << '\n';
    }
    const std::string n = mech->name();
    c.check(n + "_unbalanced_rate", r.unbalanced_ok,
            std::to_string(r.unbalanced) + " of " + std::to_string(r.queries) + " queries; bound " +
                num(r.predicted_rate_count_gap) + " per query");
    c.check(n + "_below_symmetric_ceiling", r.ceiling_ok,
            "mean " + num(r.mean_value) + " <= " + num(r.mean_ceiling) + " + " + num(r.error_term) +
                "; " + std::to_string(r.ceiling_exceedances) + " trials above their ceiling");
    c.check(n + "_planted_attains_phi(1-beta)", r.planted_ok,
            num(r.planted_min) + " >= " + num(r.planted_bound));
    c.check(n + "_feasible_in_expectation", r.feasibility_ok, "E[X_top] = " + num(r.mean_x_top));
  }
  c.rep.csv = csv.str();
  c.rep.metrics = {{"mechanisms", rs}};
}

// ---- menus and separation ---------------------------------------------------

// Largest min(q - q0, p0 - p) over two-point mixtures on a grid of step 1e-3.
double mixture_grid_depth(const std::vector<MenuPoint>& pts, MenuPoint target) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i; j < pts.size(); ++j) {
      for (int s = 0; s <= 1000; ++s) {
        const double t = s / 1000.0;
        const double q = (1 - t) * pts[i].q + t * pts[j].q;
        const double p = (1 - t) * pts[i].p + t * pts[j].p;
        best = std::max(best, std::min(q - target.q, target.p - p));
      }
      if (i == j) continue;
    }
  }
  return best;
}

void run_menu_separation(Ctx& c) {
  const std::size_t configs = c.p.u("configs");
  const std::size_t max_points = c.p.u("points");
  std::size_t agree = 0, witnesses = 0, lines = 0, invalid = 0, resampled = 0;
  std::ostringstream csv;
  csv << "config,points,q0,p0,branch,oracle_depth\n";
  for (std::size_t i = 0; i < configs; ++i) {
    Rng rng(derive_seed(c.seed, i));
    std::vector<MenuPoint> pts;
    MenuPoint target;
    double depth = 0.0;
    for (;;) {
      const std::size_t k = 1 + rng.below(max_points);
      const double cq = rng.uniform(), cp = rng.uniform(), rad = rng.uniform(0.02, 0.3);
      pts.clear();
      for (std::size_t j = 0; j < k; ++j) {
        pts.push_back({cq + rad * rng.uniform(-1.0, 1.0), cp + rad * rng.uniform(-1.0, 1.0)});
      }
      target = {rng.uniform(), rng.uniform()};
      depth = mixture_grid_depth(pts, target);
      // The grid can miss a crossing by well under 0.005; such draws are redrawn.
      if (depth < 0.0 && depth >= -0.005) {
        ++resampled;
        continue;
      }
      break;
    }
    const SeparationResult r = separate_quadrant(pts, target);
    const bool oracle_witness = depth >= 0.0;
    bool ok = true;
    std::string branch;
    if (const auto* w = std::get_if<SeparationWitness>(&r)) {
      branch = "witness";
      ++witnesses;
      double sw = 0.0, q = 0.0, p = 0.0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (w->weights[j] < 0.0) ok = false;
        sw += w->weights[j];
        q += w->weights[j] * pts[j].q;
        p += w->weights[j] * pts[j].p;
      }
      ok = ok && std::abs(sw - 1.0) <= 1e-9 && std::abs(q - w->point.q) <= 1e-9 &&
           std::abs(p - w->point.p) <= 1e-9 && w->point.q >= target.q - 1e-9 &&
           w->point.p <= target.p + 1e-9;
    } else {
      const auto& l = std::get<SeparationLine>(r);
      branch = "line";
      ++lines;
      ok = l.lambda_q >= 0.0 && l.lambda_p >= 0.0 && (l.lambda_q > 0.0 || l.lambda_p > 0.0);
      for (const MenuPoint& z : pts) {
        ok = ok && l.lambda_q * z.q - l.lambda_p * z.p < l.lambda_q * target.q - l.lambda_p * target.p;
      }
    }
    if (!ok) ++invalid;
    if ((branch == "witness") == oracle_witness) ++agree;
    csv << i << ',' << pts.size() << ',' << num(target.q) << ',' << num(target.p) << ',' << branch
        << ',' << num(depth) << '\n';
  }

  // A real menu: VCG, one polar opponent, the special player declaring λ f̃.
  const std::size_t m = 8;
  const BasicAuctionInstance inst = make_basic_auction(2, m, 0.1, derive_seed(c.seed, 1u << 20));
  const std::vector<ValuationOracle> others{inst.valuations()[1]};
  Rng rng(derive_seed(c.seed, (1u << 20) + 1));
  const BisectionLevel lv = random_bisection(ItemSet::full(m), rng);
  const Phi phi = Phi::alpha(1.0);
  std::vector<ValuationOracle> family;
  const double lambdas[] = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  for (double lam : lambdas) family.push_back(make_scaled_symgap_valuation(lv.a, lv.b, phi, 0.25, lam));
  const auto vcg = make_vcg_mechanism();
  const MenuSample menu = extract_menu(*vcg, others, 0, lv.a, 0, family, 4, c.seed);
  const auto image = map_menu_to_qp(menu, phi, 0.0, 1, MenuRole::level_j_plus_1);
  std::vector<double> xs;
  for (std::size_t s = 0; s < family.size(); ++s) {
    double x = 0.0, w = 0.0;
    for (const MenuEntry& e : menu.samples) {
      if (e.source == s) {
        x += e.weight * e.x;
        w += e.weight;
      }
    }
    xs.push_back(x / w);
  }
  const bool monotone = std::is_sorted(xs.begin(), xs.end());
  const std::vector<ValuationOracle> lo(family.begin(), family.begin() + 3);
  const std::vector<ValuationOracle> hi(family.begin() + 3, family.end());
  const MenuSample ma = extract_menu(*vcg, others, 0, lv.a, 0, lo, 4, c.seed);
  const MenuSample mb = extract_menu(*vcg, others, 0, lv.a, 0, hi, 4, c.seed + 1);
  double linearity = 0.0;
  for (MenuRole role : {MenuRole::level_j, MenuRole::level_j_plus_1}) {
    const MenuPoint pa = menu_image(ma, phi, 0.0, 1, role);
    const MenuPoint pb = menu_image(mb, phi, 0.0, 1, role);
    const MenuPoint pm = menu_image(mix_menus(ma, mb, 0.5), phi, 0.0, 1, role);
    linearity = std::max({linearity, std::abs(pm.q - 0.5 * (pa.q + pb.q)),
                          std::abs(pm.p - 0.5 * (pa.p + pb.p))});
  }
  Json img = Json::array();
  for (const auto& z : image) img.push_back({{"q", z.q}, {"p", z.p}});

  c.rep.csv = csv.str();
  c.rep.metrics = {{"configs", configs},
                   {"agree", agree},
                   {"witness_branch", witnesses},
                   {"line_branch", lines},
                   {"invalid", invalid},
                   {"resampled_near_boundary", resampled},
                   {"vcg_menu", {{"lambdas", lambdas}, {"mean_x", xs}, {"image", img},
                                 {"menu", menu.to_json()}}},
                   {"mixture_linearity_error", linearity}};
  c.check("branch_agrees_with_mixture_grid", agree == configs,
          std::to_string(agree) + " of " + std::to_string(configs));
  c.check("witnesses_and_lines_valid", invalid == 0, std::to_string(invalid) + " invalid");
  c.check("vcg_menu_monotone_in_lambda", monotone);
  c.check("menu_map_linear", linearity <= 1e-12, "error " + num(linearity));
}

// ---- amplification and inequalities ----------------------------------------

void run_amplify(Ctx& c) {
  const std::size_t count = c.p.u("distributions");
  const std::size_t support = c.p.u("max_support");
  const std::size_t ell = c.p.u("ell");
  const double cc = c.p.r("c");
  if (cc < std::pow(2.0, -static_cast<double>(ell))) throw UsageError("amplify: need c >= 2^-ell");
  Json profiles = Json::array();
  for (const auto& [label, delta] : std::vector<std::pair<std::string, double>>{
           {"default", default_delta()}, {"non-default delta 0.05 (visible effects)", 0.05}}) {
    const AmplificationSweep sw = amplification_sweep(delta, count, support, c.seed);
    const TelescopeReport tel = telescope_amplification(ell, cc, delta, support, c.seed);
    profiles.push_back({{"profile", label}, {"sweep", sw.to_json()}, {"telescope", tel.to_json()}});
    const std::string tag = delta == default_delta() ? "default_delta" : "delta_0.05_non_default";
    c.check(tag + "_certificates_hold", sw.pass(),
            std::to_string(sw.failures) + " failures; worst ratio " + num(sw.worst_ratio));
    c.check(tag + "_telescoping", tel.chain_ok,
            num(tel.final_lhs) + " >= " + num(tel.final_rhs));
    c.check(tag + "_mean_dominates", tel.mean_ok);
  }
  c.rep.metrics = {{"profiles", profiles}};
}

void run_inequalities(Ctx& c) {
  const InequalityReport r = scalar_inequality_suite(InequalityGrids::dense(c.p.u("points")));
  c.rep.metrics = r.to_json();
  for (const auto& res : r.results) {
    c.check(res.name, res.violations == 0,
            std::to_string(res.violations) + " of " + std::to_string(res.points) +
                "; min slack " + num(res.min_slack));
  }
}

// ---- scaling ----------------------------------------------------------------

// Picks the declared optimum with probability s / (1 + s), s the largest
// single-item value, and a uniform k-set otherwise.
class ScaleRoundingMechanism : public Mechanism {
 public:
  std::string name() const override { return "scale-rounding"; }
  Setting setting() const override { return Setting::cpp; }
  Outcome allocate(std::span<const QueryHandle> players, const Constraint& c,
                   Rng& rng) const override {
    const std::size_t m = players.front().ground_size();
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s = std::max(s, social_value(players, ItemSet::from_items(m, {j})));
    ItemSet out = rng.bernoulli(s / (1.0 + s)) ? exhaustive_opt_cpp(players, c.k).set
                                                : random_subset(ItemSet::full(m), c.k, rng);
    return {{out}, std::vector<double>(players.size(), 0.0)};
  }
};

void run_scaling_probe(Ctx& c) {
  const std::size_t m = c.p.u("m");
  const std::size_t k = c.p.u("k");
  const std::size_t trials = c.p.u("trials");
  const std::size_t steps = c.p.u("steps");
  const double epsilon = c.p.r("epsilon");
  if (m > 16 || k > m || steps == 0) throw UsageError("scaling-probe: need m <= 16, k <= m, steps >= 1");
  Rng rng(c.seed);
  const ValuationOracle v = random_coverage(m, rng, false);
  std::vector<ValuationOracle> probes;
  for (int i = 0; i < 4; ++i) probes.push_back(random_coverage(m, rng, false));
  std::vector<double> schedule;
  for (std::size_t i = 0; i < steps; ++i) schedule.push_back(std::ldexp(1.0, static_cast<int>(i)));
  std::vector<std::unique_ptr<Mechanism>> mechs;
  mechs.push_back(make_exhaustive_cpp_mechanism());
  mechs.push_back(make_greedy_mechanism());
  mechs.push_back(std::make_unique<ScaleRoundingMechanism>());
  Json rs = Json::array();
  std::ostringstream csv;
  csv << "mechanism,alpha,value,stderr,envelope\n";
  for (const auto& mech : mechs) {
    const ScalingReport r = scaling_probe(*mech, v, k, schedule, probes, trials, epsilon, c.seed);
    rs.push_back(r.to_json());
    for (const auto& p : r.trace) {
      csv << mech->name() << ',' << num(p.alpha) << ',' << num(p.value) << ',' << num(p.std_error)
          << ',' << num(p.envelope) << '\n';
    }
    if (mech->name() == "exhaustive") {
      c.check("exhaustive_trace_constant", r.trace_constant);
      c.check("exhaustive_weak_monotonicity", r.monotonicity_violations == 0 && r.envelope_violations == 0,
              std::to_string(r.monotonicity_violations) + " pair / " +
                  std::to_string(r.envelope_violations) + " envelope violations");
    } else if (mech->name() == "greedy") {
      c.check("greedy_trace_constant", r.trace_constant);
    }
  }
  c.rep.csv = csv.str();
  c.rep.metrics = {{"valuation", v.descriptor()}, {"mechanisms", rs}};
}

// ---- plot data --------------------------------------------------------------

void run_plot_data(Ctx& c) {
  const std::string series = c.p.s("series");
  const std::size_t grid = c.p.u("grid");
  const double alpha = c.p.r("alpha");
  const double beta = c.p.r("beta");
  const double delta = c.p.r("delta");
  if (grid < 2) throw UsageError("plot-data: grid must be at least 2");
  std::ostringstream csv;
  std::size_t rows = 0;
  if (series == "psi" || series == "psi_tilde") {
    const Phi phi = Phi::alpha(alpha);
    csv << kPlotHeader << '\n';
    for (std::size_t i = 0; i < grid; ++i) {
      for (std::size_t j = 0; j < grid; ++j) {
        const double x = static_cast<double>(i) / static_cast<double>(grid - 1);
        const double y = static_cast<double>(j) / static_cast<double>(grid - 1);
        const double v = series == "psi" ? psi(phi, x, y) : psi_tilde(phi, beta, x, y);
        csv << series << ',' << num(x) << ',' << num(y) << ',' << num(v) << '\n';
        ++rows;
      }
    }
    c.check("row_count", rows == grid * grid, std::to_string(rows));
  } else if (series == "triple") {
    // α_j = 1: f1 = min(2x, 1+δ), f2 = 1-(1-min(x,1))², f3 = min(x, 1).
    csv << "x,f1,f2,f3\n";
    std::size_t bad = 0;
    for (std::size_t i = 0; i < grid; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(grid - 1);
      const double u = std::min(x, 1.0);
      const double f1 = std::min(2.0 * x, 1.0 + delta);
      const double f2 = 1.0 - (1.0 - u) * (1.0 - u);
      const double f3 = u;
      if (x >= std::sqrt(delta) && !(f1 >= f2 + delta - 1e-12 && f2 >= f3 - 1e-12)) ++bad;
      csv << num(x) << ',' << num(f1) << ',' << num(f2) << ',' << num(f3) << '\n';
      ++rows;
    }
    c.check("orderings_hold_above_sqrt_delta", bad == 0, std::to_string(bad) + " rows out of order");
  } else {
    throw UsageError("plot-data: series must be psi, psi_tilde or triple");
  }
  c.rep.csv = csv.str();
  c.rep.metrics = {{"series", series}, {"rows", rows}};
}

void run_suite(Ctx& c);

using Runner = void (*)(Ctx&);

struct Entry {
  ExperimentInfo info;
  Runner run;
  bool in_suite;
};

ParamSpec I(std::string n, long long d, std::string h) { return {std::move(n), ParamType::integer, d, std::move(h)}; }
ParamSpec R(std::string n, double d, std::string h) { return {std::move(n), ParamType::real, d, std::move(h)}; }
ParamSpec T(std::string n, std::string d, std::string h) { return {std::move(n), ParamType::text, d, std::move(h)}; }
ParamSpec B(std::string n, bool d, std::string h) { return {std::move(n), ParamType::flag, d, std::move(h)}; }

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {{"gap955", "F^exp at the block indicator and at the midpoint (exact)",
        {I("blocks", 200, "items per block"), R("alpha", 0.5, "phi_alpha parameter")}},
       run_gap955, true},
      {{"concavity", "midpoint concavity probes of F^exp",
        {I("blocks", 200, "items per block"), I("probes", 10000, "random pairs for alpha = 1"),
         R("grid_step", 0.1, "grid step for the budget-additive search")}},
       run_concavity, true},
      {{"submod-check", "exhaustive or sampled monotone-submodularity check",
        {T("kind", "small-budget",
           "small-budget|additive|budget-additive|coverage|polar|symgap|square"),
         I("m", 10, "ground size (ignored for small-budget)"), B("sampled", false, "sample triples"),
         I("samples", 100000, "sampled triples")}},
       run_submod_check, true},
      {{"product-compose", "product composition of random [0,1]-valued pairs",
        {I("pairs", 100, "random pairs"), I("m", 10, "ground size")}},
       run_product_compose, true},
      {{"psi-tilde-check", "symmetry-gap valuation structure and pointwise bound",
        {I("min_block", 2, "smallest block"), I("max_block", 6, "largest block"),
         I("grid", 200, "grid resolution for psi-tilde properties")}},
       run_psi_tilde_check, true},
      {{"chernoff", "bisection tail versus the Chernoff bound",
        {I("m", 0, "m' (0 runs the three standard cases)"), R("beta", 0.1, "deviation fraction"),
         I("trials", 100000, "bisections per case")}},
       run_chernoff, true},
      {{"bisect-uniformity", "membership frequencies of random bisection sequences",
        {I("ell", 2, "depth"), I("m", 16, "ground size"), I("trials", 100000, "sequences")}},
       run_bisect_uniformity, true},
      {{"greedy-ratio", "greedy versus exhaustive optimum on random CPP instances",
        {I("instances", 50, "random instances"), I("max_m", 16, "largest ground size"),
         I("max_k", 4, "largest cardinality bound")}},
       run_greedy_ratio, true},
      {{"poisson-midr", "Poisson-rounding MIDR against closed-form optima",
        {I("samples", 10000, "rounding samples per case")}},
       run_poisson_midr, true},
      {{"vcg-audit", "truthfulness audit of VCG and pay-your-bid",
        {I("instances", 3, "random polar instances"), I("deviations", 20, "deviations per instance"),
         I("trials", 1000, "trials per declaration"), I("n", 2, "players"), I("m", 8, "items"),
         R("epsilon", 0.0, "approximation slack")}},
       run_vcg_audit, true},
      {{"symgap", "query balance and value of mechanisms on hidden bisections",
        {I("ell", 1, "level count (1 or 2)"), I("level", -1, "hidden level j (default ell-1)"),
         R("alpha", 1.0, "phi_alpha parameter"), R("beta", 0.0, "band half-width (0: standard value)"),
         I("trials", 100, "random partitions"), I("queries", 10000, "queries of the random mechanism"),
         R("threshold", 0.5, "balanced-threshold ratio"),
         T("mechanism", "all", "all|random|greedy|balanced-threshold")}},
       run_symgap, true},
      {{"menu-separation", "quadrant separation against a mixture-grid oracle",
        {I("configs", 200, "random configurations"), I("points", 50, "largest point count")}},
       run_menu_separation, true},
      {{"amplify", "gap-amplification certificates and telescoping",
        {I("distributions", 10000, "random distributions per profile"),
         I("max_support", 50, "largest support size"), I("ell", 4, "telescoping depth"),
         R("c", 0.5, "starting value c")}},
       run_amplify, true},
      {{"inequalities", "scalar inequalities of the amplification proof",
        {I("points", 100000, "points per grid")}},
       run_inequalities, true},
      {{"basic-count", "union size of random desired sets",
        {I("n", 0, "players (0 runs the three standard cases)"), I("m", 16, "items"),
         I("trials", 100000, "instances")}},
       run_basic_count, true},
      {{"scaling-probe", "allocation under growing declarations and weak monotonicity",
        {I("m", 8, "items"), I("k", 3, "cardinality bound"), I("trials", 100, "trials per declaration"),
         I("steps", 11, "scales 1, 2, ..., 2^(steps-1)"), R("epsilon", 0.0, "approximation slack")}},
       run_scaling_probe, true},
      {{"plot-data", "plot-ready CSV for psi, psi-tilde and the f1, f2, f3 comparison triple",
        {T("series", "psi_tilde", "psi|psi_tilde|triple"), I("grid", 101, "points per axis"),
         R("alpha", 0.5, "phi_alpha parameter"), R("beta", 0.1, "band half-width"),
         R("delta", 0.05, "delta for the triple")}},
       run_plot_data, false},
      {{"suite", "every acceptance experiment with default parameters",
        {B("all", true, "run every experiment")}},
       run_suite, false},
  };
  return entries;
}

const Entry& find_entry(const std::string& name) {
  for (const Entry& e : registry()) {
    if (e.info.name == name) return e;
  }
  throw UsageError("unknown experiment '" + name + "'");
}

Json resolve_params(const ExperimentInfo& info, const Json& given) {
  if (!given.is_object()) throw UsageError("parameters must be a JSON object");
  Json out = Json::object();
  for (const ParamSpec& s : info.params) out[s.name] = s.fallback;
  for (const auto& [key, value] : given.items()) {
    auto it = std::find_if(info.params.begin(), info.params.end(),
                           [&](const ParamSpec& s) { return s.name == key; });
    if (it == info.params.end()) {
      throw UsageError("experiment '" + info.name + "' has no parameter '" + key + "'");
    }
    bool ok = false;
    switch (it->type) {
      case ParamType::integer: ok = value.is_number_integer(); break;
      case ParamType::real: ok = value.is_number(); break;
      case ParamType::text: ok = value.is_string(); break;
      case ParamType::flag: ok = value.is_boolean(); break;
    }
    if (!ok) throw UsageError("parameter '" + key + "' has the wrong type");
    out[key] = it->type == ParamType::real ? Json(value.get<double>()) : value;
  }
  return out;
}

void run_suite(Ctx& c) {
  if (!c.p.b("all")) throw UsageError("suite: pass --all");
  Json subs = Json::object();
  for (const Entry& e : registry()) {
    if (!e.in_suite) continue;
    ExperimentConfig cfg;
    cfg.experiment = e.info.name;
    cfg.seed = c.seed;
    cfg.workers = c.workers;
    const Report r = run_experiment(cfg);
    subs[e.info.name] = r.to_json();
    c.check(e.info.name, r.pass());
  }
  c.rep.metrics = {{"experiments", subs}};
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const Entry& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ExperimentInfo& experiment_info(const std::string& name) { return find_entry(name).info; }

bool Report::pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

Json Report::to_json() const {
  Json as = Json::array();
  for (const Assertion& a : assertions) {
    Json j = {{"name", a.name}, {"pass", a.pass}};
    if (!a.detail.empty()) j["detail"] = a.detail;
    as.push_back(std::move(j));
  }
  return {{"experiment", experiment}, {"params", params},   {"seed", seed},
          {"workers", workers},       {"metrics", metrics}, {"assertions", as},
          {"pass", pass()}};
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

Report run_experiment(const ExperimentConfig& config) {
  const Entry& e = find_entry(config.experiment);
  if (config.workers == 0) throw UsageError("workers must be positive");
  Report rep;
  rep.experiment = e.info.name;
  rep.params = resolve_params(e.info, config.params);
  rep.seed = config.seed;
  rep.workers = config.workers;
  Ctx ctx{Params(rep.params), config.seed, config.workers, rep};
  e.run(ctx);
  return rep;
}

std::string emit_plot_data(const Report& report) {
  if (report.csv.empty()) return std::string(kPlotHeader) + "\n";
  return report.csv;
}

}  // namespace symgap
