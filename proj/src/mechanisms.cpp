#include "symgap/mechanisms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "symgap/error.hpp"
#include "symgap/instances.hpp"
#include "symgap/parallel.hpp"
#include "symgap/setfn.hpp"

namespace symgap {

std::string to_string(Setting setting) {
  return setting == Setting::cpp ? "cpp" : "auction";
}

Json Constraint::to_json() const {
  return {{"setting", to_string(setting)}, {"m", m}, {"k", k}, {"players", players}};
}

double social_value(std::span<const QueryHandle> players, const ItemSet& s) {
  double total = 0.0;
  for (const QueryHandle& v : players) total += v(s);
  return total;
}

ItemSet greedy_cpp(std::span<const QueryHandle> players, std::size_t k) {
  if (players.empty()) throw UsageError("greedy_cpp: no players");
  const std::size_t m = players.front().ground_size();
  if (k > m) throw UsageError("greedy_cpp: k exceeds m");
  ItemSet s(m);
  double current = 0.0;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best_item = m;
    double best_value = current;
    for (std::size_t j = 0; j < m; ++j) {
      if (s.contains(j)) continue;
      const double v = social_value(players, s.with(j));
      if (v > best_value) {
        best_value = v;
        best_item = j;
      }
    }
    if (best_item == m) break;
    s.insert(best_item);
    current = best_value;
  }
  return s;
}

CppSolution exhaustive_opt_cpp(std::span<const QueryHandle> players, std::size_t k) {
  if (players.empty()) throw UsageError("exhaustive_opt_cpp: no players");
  const std::size_t m = players.front().ground_size();
  if (m > kMaxExhaustiveItems) throw UsageError("exhaustive_opt_cpp requires m <= 24");
  CppSolution best{ItemSet(m), 0.0};
  bool found = false;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > k) continue;
    const ItemSet s = ItemSet::from_mask(m, mask);
    const double v = social_value(players, s);
    if (!found || v > best.value) {
      best = {s, v};
      found = true;
    }
  }
  return best;
}

namespace {

using ValueTables = std::vector<std::vector<double>>;

ValueTables auction_tables(std::span<const QueryHandle> players) {
  if (players.empty()) throw UsageError("auction: no players");
  const std::size_t m = players.front().ground_size();
  const double work = static_cast<double>(players.size()) * std::pow(3.0, static_cast<double>(m));
  if (m > 20 || work > kMaxAuctionWork) {
    throw UsageError("exhaustive auction too large: n * 3^m must be at most 5e8");
  }
  ValueTables tables(players.size(), std::vector<double>(std::size_t{1} << m));
  for (std::size_t i = 0; i < players.size(); ++i) {
    if (players[i].ground_size() != m) throw UsageError("auction: ground sizes differ");
    for (std::uint64_t mask = 0; mask < tables[i].size(); ++mask) {
      tables[i][mask] = players[i](ItemSet::from_mask(m, mask));
    }
  }
  return tables;
}

// Optimal allocation among the players listed in `who`, returned as one mask
// per entry of `who`.
std::pair<double, std::vector<std::uint32_t>> auction_dp(const ValueTables& tables,
                                                         const std::vector<std::size_t>& who,
                                                         std::size_t m) {
  const std::uint32_t full = static_cast<std::uint32_t>((std::uint64_t{1} << m) - 1);
  const std::size_t size = std::size_t{1} << m;
  std::vector<double> best(size, 0.0);
  std::vector<std::vector<std::uint32_t>> choice(who.size(), std::vector<std::uint32_t>(size, 0));
  for (std::size_t r = 0; r < who.size(); ++r) {
    const auto& val = tables[who[r]];
    std::vector<double> next(size);
    for (std::uint32_t t = 0; t < size; ++t) {
      double top = best[t];
      std::uint32_t pick = 0;
      for (std::uint32_t u = t; u != 0; u = (u - 1) & t) {
        const double cand = best[t ^ u] + val[u];
        if (cand > top) {
          top = cand;
          pick = u;
        }
      }
      next[t] = top;
      choice[r][t] = pick;
    }
    best = std::move(next);
  }
  std::vector<std::uint32_t> bundles(who.size(), 0);
  std::uint32_t rest = full;
  for (std::size_t r = who.size(); r-- > 0;) {
    bundles[r] = choice[r][rest];
    rest ^= bundles[r];
  }
  return {best[full], bundles};
}

AuctionSolution solve_auction(const ValueTables& tables, std::size_t m) {
  std::vector<std::size_t> all(tables.size());
  std::iota(all.begin(), all.end(), 0);
  auto [welfare, bundles] = auction_dp(tables, all, m);
  AuctionSolution sol;
  sol.welfare = welfare;
  for (std::uint32_t b : bundles) sol.allocation.push_back(ItemSet::from_mask(m, b));
  return sol;
}

}  // namespace

AuctionSolution exhaustive_opt_auction(std::span<const QueryHandle> players) {
  const ValueTables tables = auction_tables(players);
  return solve_auction(tables, players.front().ground_size());
}

Outcome vcg_auction_exhaustive(std::span<const QueryHandle> players) {
  const ValueTables tables = auction_tables(players);
  const std::size_t m = players.front().ground_size();
  const std::size_t n = players.size();
  AuctionSolution sol = solve_auction(tables, m);
  Outcome out;
  out.allocation = sol.allocation;
  out.payments.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> others;
    double others_welfare = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      others.push_back(j);
      others_welfare += tables[j][sol.allocation[j].to_mask()];
    }
    const double without_i = others.empty() ? 0.0 : auction_dp(tables, others, m).first;
    out.payments[i] = without_i - others_welfare;
  }
  return out;
}

ItemSet PoissonDistribution::sample(Rng& rng) const {
  ItemSet s(probabilities.size());
  for (std::size_t j = 0; j < probabilities.size(); ++j) {
    if (rng.bernoulli(probabilities[j])) s.insert(j);
  }
  return s;
}

Json PoissonDistribution::to_json() const {
  const auto xs = x.values();
  return {{"x", std::vector<double>(xs.begin(), xs.end())},
          {"value", value},
          {"heuristic", heuristic},
          {"iterations", iterations},
          {"rounding", "independent, Pr[j in S] = 1 - exp(-x_j)"}};
}

bool has_concave_f_exp(const ValuationOracle& f) {
  std::function<bool(const Json&)> check = [&](const Json& d) {
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "additive" || kind == "polar" || kind == "coverage") return true;
    if (kind == "symgap" || kind == "block_product") {
      const Json& phi = d.at("params").at("phi");
      return phi.value("family", "") == "alpha" && phi.at("alpha").get<double>() == 1.0;
    }
    if (kind == "scaled") {
      return d.at("params").at("scale").get<double>() >= 0.0 && check(d.at("params").at("inner"));
    }
    return false;
  };
  return check(f.descriptor());
}

std::vector<double> project_capped_box(std::vector<double> y, double k) {
  auto clamped_sum = [&](double tau) {
    double s = 0.0;
    for (double v : y) s += std::clamp(v - tau, 0.0, 1.0);
    return s;
  };
  double tau = 0.0;
  if (clamped_sum(0.0) > k) {
    double lo = 0.0;
    double hi = *std::max_element(y.begin(), y.end());
    for (int it = 0; it < 200 && hi > lo; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (clamped_sum(mid) > k ? lo : hi) = mid;
    }
    tau = hi;
  }
  for (double& v : y) v = std::clamp(v - tau, 0.0, 1.0);
  return y;
}

PoissonDistribution maximize_f_exp(const std::function<double(const FractionalPoint&)>& g,
                                   std::size_t m, std::size_t k, const PoissonMidrConfig& cfg) {
  if (m == 0) throw UsageError("maximize_f_exp: empty ground set");
  const double cap = static_cast<double>(std::min(k, m));
  std::vector<double> x(m, cap / static_cast<double>(m));
  double fx = g(FractionalPoint(x));
  double step = cfg.initial_step;
  const double h = cfg.fd_step;
  std::size_t iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    std::vector<double> grad(m);
    double norm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double lo = std::max(0.0, x[j] - h);
      const double hi = std::min(1.0, x[j] + h);
      std::vector<double> a = x;
      std::vector<double> b = x;
      a[j] = lo;
      b[j] = hi;
      grad[j] = (g(FractionalPoint(b)) - g(FractionalPoint(a))) / (hi - lo);
      norm += grad[j] * grad[j];
    }
    if (norm == 0.0) break;
    bool accepted = false;
    double gain = 0.0;
    while (step >= cfg.min_step) {
      std::vector<double> y = x;
      for (std::size_t j = 0; j < m; ++j) y[j] += step * grad[j];
      y = project_capped_box(std::move(y), cap);
      const double fy = g(FractionalPoint(y));
      if (fy > fx) {
        gain = fy - fx;
        x = std::move(y);
        fx = fy;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    step = std::min(step * 2.0, 64.0);
    if (gain < cfg.tolerance) {
      ++iter;
      break;
    }
  }
  PoissonDistribution d;
  d.x = FractionalPoint(x);
  d.probabilities = poisson_transform(d.x);
  d.value = fx;
  d.iterations = iter;
  return d;
}

PoissonDistribution poisson_midr_cpp(const ValuationOracle& f, std::size_t k,
                                     const PoissonMidrConfig& cfg) {
  const bool concave = has_concave_f_exp(f);
  if (!concave && !cfg.force) {
    throw UsageError("poisson_midr_cpp: F^exp is not known to be concave for kind '" +
                     f.descriptor().at("kind").get<std::string>() + "' (use force)");
  }
  const std::size_t m = f.ground_size();
  std::function<double(const FractionalPoint&)> g;
  if (const BlockProfile* blocks = f.block_profile()) {
    g = [blocks](const FractionalPoint& x) {
      return exact_F_block_point(*blocks, poisson_transform(x));
    };
  } else if (m <= kMaxExhaustiveItems) {
    g = [f](const FractionalPoint& x) {
      return f_exp(f, x, {EstimatorMode::exact_enum}).value;
    };
  } else {
    throw UsageError("poisson_midr_cpp: no exact evaluator for m > 24");
  }
  PoissonDistribution d = maximize_f_exp(g, m, k, cfg);
  d.heuristic = !concave;
  return d;
}

namespace {

Outcome cpp_outcome(ItemSet s, std::size_t players) {
  return {{std::move(s)}, std::vector<double>(players, 0.0)};
}

class GreedyMechanism : public Mechanism {
 public:
  std::string name() const override { return "greedy"; }
  Setting setting() const override { return Setting::cpp; }
  Outcome allocate(std::span<const QueryHandle> players, const Constraint& c, Rng&) const override {
    return cpp_outcome(greedy_cpp(players, c.k), players.size());
  }
};

class ExhaustiveCppMechanism : public Mechanism {
 public:
  std::string name() const override { return "exhaustive"; }
  Setting setting() const override { return Setting::cpp; }
  Outcome allocate(std::span<const QueryHandle> players, const Constraint& c, Rng&) const override {
    return cpp_outcome(exhaustive_opt_cpp(players, c.k).set, players.size());
  }
};

class VcgMechanism : public Mechanism {
 public:
  std::string name() const override { return "vcg"; }
  Setting setting() const override { return Setting::auction; }
  Outcome allocate(std::span<const QueryHandle> players, const Constraint&, Rng&) const override {
    return vcg_auction_exhaustive(players);
  }
};

class PayYourBidMechanism : public Mechanism {
 public:
  std::string name() const override { return "pay-your-bid"; }
  Setting setting() const override { return Setting::auction; }
  Outcome allocate(std::span<const QueryHandle> players, const Constraint&, Rng&) const override {
    AuctionSolution sol = exhaustive_opt_auction(players);
    Outcome out{sol.allocation, {}};
    for (std::size_t i = 0; i < players.size(); ++i) out.payments.push_back(players[i](sol.allocation[i]));
    return out;
  }
};

class RandomQueryMechanism : public Mechanism {
 public:
  explicit RandomQueryMechanism(std::size_t queries) : queries_(queries) {}
  std::string name() const override { return "random"; }
  Setting setting() const override { return Setting::cpp; }
  Outcome allocate(std::span<const QueryHandle> players, const Constraint& c,
                   Rng& rng) const override {
    const std::size_t m = players.front().ground_size();
    const ItemSet ground = ItemSet::full(m);
    ItemSet best(m);
    double best_value = 0.0;
    for (std::size_t q = 0; q < queries_; ++q) {
      ItemSet s = random_subset(ground, std::min(c.k, m), rng);
      const double v = social_value(players, s);
      if (v > best_value) {
        best_value = v;
        best = std::move(s);
      }
    }
    return cpp_outcome(std::move(best), players.size());
  }

 private:
  std::size_t queries_;
};

class BalancedThresholdMechanism : public Mechanism {
 public:
  explicit BalancedThresholdMechanism(double threshold) : threshold_(threshold) {}
  std::string name() const override { return "balanced-threshold"; }
  Setting setting() const override { return Setting::cpp; }
  Outcome allocate(std::span<const QueryHandle> players, const Constraint& c,
                   Rng& rng) const override {
    const std::size_t m = players.front().ground_size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    double top_single = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      top_single = std::max(top_single, social_value(players, ItemSet::from_items(m, {j})));
    }
    ItemSet s(m);
    double current = 0.0;
    for (std::size_t j : order) {
      if (s.count() >= c.k) break;
      const ItemSet t = s.with(j);
      const double v = social_value(players, t);
      if (v - current >= threshold_ * top_single && v > current) {
        s = t;
        current = v;
      }
    }
    return cpp_outcome(std::move(s), players.size());
  }

 private:
  double threshold_;
};

class PoissonMidrMechanism : public Mechanism {
 public:
  explicit PoissonMidrMechanism(PoissonMidrConfig cfg) : cfg_(cfg) {}
  std::string name() const override { return "poisson-midr"; }
  Setting setting() const override { return Setting::cpp; }
  bool feasible_in_expectation() const override { return true; }
  Outcome allocate(std::span<const QueryHandle> players, const Constraint& c,
                   Rng& rng) const override {
    const std::size_t m = players.front().ground_size();
    if (m > kMaxExhaustiveItems) throw UsageError("poisson-midr mechanism requires m <= 24");
    std::vector<QueryHandle> copy(players.begin(), players.end());
    ValuationOracle total = make_custom(m, "social", [copy](const ItemSet& s) {
      return social_value(copy, s);
    });
    PoissonDistribution d = maximize_f_exp(
        [&](const FractionalPoint& x) {
          return f_exp(total, x, {EstimatorMode::exact_enum}).value;
        },
        m, c.k, cfg_);
    return cpp_outcome(d.sample(rng), players.size());
  }

 private:
  PoissonMidrConfig cfg_;
};

class ConstantMechanism : public Mechanism {
 public:
  ConstantMechanism(Setting setting, std::vector<ItemSet> allocation, std::vector<double> payments)
      : setting_(setting), allocation_(std::move(allocation)), payments_(std::move(payments)) {}
  std::string name() const override { return "constant"; }
  Setting setting() const override { return setting_; }
  Outcome allocate(std::span<const QueryHandle>, const Constraint&, Rng&) const override {
    return {allocation_, payments_};
  }

 private:
  Setting setting_;
  std::vector<ItemSet> allocation_;
  std::vector<double> payments_;
};

}  // namespace

std::unique_ptr<Mechanism> make_greedy_mechanism() { return std::make_unique<GreedyMechanism>(); }
std::unique_ptr<Mechanism> make_exhaustive_cpp_mechanism() {
  return std::make_unique<ExhaustiveCppMechanism>();
}
std::unique_ptr<Mechanism> make_vcg_mechanism() { return std::make_unique<VcgMechanism>(); }
std::unique_ptr<Mechanism> make_pay_your_bid_mechanism() {
  return std::make_unique<PayYourBidMechanism>();
}
std::unique_ptr<Mechanism> make_random_query_mechanism(std::size_t queries) {
  return std::make_unique<RandomQueryMechanism>(queries);
}
std::unique_ptr<Mechanism> make_balanced_threshold_mechanism(double threshold) {
  if (!(threshold >= 0.0)) throw UsageError("balanced-threshold: threshold must be >= 0");
  return std::make_unique<BalancedThresholdMechanism>(threshold);
}
std::unique_ptr<Mechanism> make_poisson_midr_mechanism(PoissonMidrConfig cfg) {
  return std::make_unique<PoissonMidrMechanism>(cfg);
}
std::unique_ptr<Mechanism> make_constant_mechanism(Setting setting, std::vector<ItemSet> allocation,
                                                   std::vector<double> payments) {
  return std::make_unique<ConstantMechanism>(setting, std::move(allocation), std::move(payments));
}

std::string check_feasibility(const Mechanism& mech, const Outcome& outcome,
                              const Constraint& c) {
  if (c.setting == Setting::cpp) {
    if (outcome.allocation.size() != 1) return "CPP outcome must hold exactly one set";
    const ItemSet& s = outcome.allocation.front();
    if (s.ground_size() != c.m) return "CPP set has the wrong ground size";
    if (s.count() > c.k && !mech.feasible_in_expectation()) {
      return "CPP set of size " + std::to_string(s.count()) + " exceeds k = " + std::to_string(c.k);
    }
  } else {
    if (outcome.allocation.size() != c.players) return "auction outcome needs one bundle per player";
    ItemSet used(c.m);
    for (std::size_t i = 0; i < outcome.allocation.size(); ++i) {
      const ItemSet& b = outcome.allocation[i];
      if (b.ground_size() != c.m) return "bundle has the wrong ground size";
      if (!b.disjoint_from(used)) return "bundles overlap at player " + std::to_string(i);
      used = used | b;
    }
  }
  if (!outcome.payments.empty() && outcome.payments.size() != c.players) {
    return "payment vector length differs from the number of players";
  }
  return {};
}

namespace {

std::pair<double, double> mean_stderr(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double n = static_cast<double>(v.size());
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

EmpiricalReport run_mechanism(const Mechanism& mech, const std::vector<ValuationOracle>& players,
                              const Constraint& constraint, std::size_t trials,
                              std::uint64_t seed, std::size_t workers) {
  if (trials == 0) throw UsageError("run_mechanism: trials must be positive");
  if (players.size() != constraint.players) {
    throw UsageError("run_mechanism: player count differs from the constraint");
  }
  if (mech.setting() != constraint.setting) {
    throw UsageError("run_mechanism: mechanism setting differs from the constraint");
  }
  EmpiricalReport rep;
  rep.mechanism = mech.name();
  rep.constraint = constraint;
  rep.trials = trials;
  rep.seed = seed;
  rep.records.resize(trials);
  parallel_chunks(trials, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      TrialRecord& r = rep.records[t];
      r.trial = t;
      r.seed = derive_seed(seed, t);
      std::vector<ValuationOracle> fresh;
      for (const auto& p : players) fresh.push_back(p.with_fresh_counter());
      const std::vector<QueryHandle> handles = make_handles(fresh);
      Rng rng(r.seed);
      const Outcome out = mech.allocate(handles, constraint, rng);
      for (const auto& q : fresh) r.queries.push_back(q.query_count());
      r.diagnostic = check_feasibility(mech, out, constraint);
      r.feasible = r.diagnostic.empty();
      for (const ItemSet& s : out.allocation) r.allocation.push_back(s.to_hex());
      r.payments = out.payments.empty() ? std::vector<double>(players.size(), 0.0) : out.payments;
      if (!r.feasible) continue;
      for (std::size_t i = 0; i < players.size(); ++i) {
        const ItemSet& s = constraint.setting == Setting::cpp ? out.allocation.front()
                                                              : out.allocation[i];
        r.welfare += players[i].function().value(s);
      }
    }
  });
  std::vector<double> welfare;
  std::vector<double> sizes;
  std::vector<std::vector<double>> pay(players.size());
  for (const TrialRecord& r : rep.records) {
    rep.all_feasible = rep.all_feasible && r.feasible;
    welfare.push_back(r.welfare);
    if (constraint.setting == Setting::cpp && r.feasible) {
      sizes.push_back(static_cast<double>(ItemSet::from_hex(constraint.m, r.allocation.front()).count()));
    }
    for (std::size_t i = 0; i < players.size(); ++i) pay[i].push_back(r.payments[i]);
  }
  std::tie(rep.mean_welfare, rep.welfare_stderr) = mean_stderr(welfare);
  rep.mean_cardinality = mean_stderr(sizes).first;
  for (const auto& p : pay) {
    auto [mean, se] = mean_stderr(p);
    rep.mean_payments.push_back(mean);
    rep.payment_stderr.push_back(se);
  }
  return rep;
}

Json EmpiricalReport::to_json() const {
  Json recs = Json::array();
  for (const TrialRecord& r : records) {
    Json j = {{"trial", r.trial},       {"seed", r.seed},         {"allocation", r.allocation},
              {"welfare", r.welfare},   {"payments", r.payments}, {"queries", r.queries},
              {"feasible", r.feasible}};
    if (!r.feasible) j["diagnostic"] = r.diagnostic;
    recs.push_back(std::move(j));
  }
  return {{"mechanism", mechanism},
          {"constraint", constraint.to_json()},
          {"trials", trials},
          {"seed", seed},
          {"mean_welfare", mean_welfare},
          {"welfare_stderr", welfare_stderr},
          {"mean_payments", mean_payments},
          {"payment_stderr", payment_stderr},
          {"mean_cardinality", mean_cardinality},
          {"all_feasible", all_feasible},
          {"records", recs}};
}

std::string EmpiricalReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "trial,welfare,payments,queries\n";
  for (const TrialRecord& r : records) {
    os << r.trial << ',' << r.welfare << ',';
    for (std::size_t i = 0; i < r.payments.size(); ++i) os << (i ? ";" : "") << r.payments[i];
    os << ',';
    for (std::size_t i = 0; i < r.queries.size(); ++i) os << (i ? ";" : "") << r.queries[i];
    os << '\n';
  }
  return os.str();
}

}  // namespace symgap
