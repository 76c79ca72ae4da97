#include "symgap/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "symgap/error.hpp"
#include "symgap/parallel.hpp"
#include "symgap/setfn.hpp"

namespace symgap {

namespace {

struct Moments {
  double mean = 0.0;
  double std_error = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments out;
  if (v.empty()) return out;
  double sum = 0.0;
  for (double x : v) sum += x;
  const double n = static_cast<double>(v.size());
  out.mean = sum / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

const ItemSet& bundle_of(const Outcome& out, Setting setting, std::size_t player) {
  return setting == Setting::cpp ? out.allocation.at(0) : out.allocation.at(player);
}

Outcome run_declared(const Mechanism& mech, const std::vector<ValuationOracle>& declared,
                     const Constraint& c, std::uint64_t seed) {
  std::vector<ValuationOracle> fresh;
  fresh.reserve(declared.size());
  for (const auto& d : declared) fresh.push_back(d.with_fresh_counter());
  const std::vector<QueryHandle> handles = make_handles(fresh);
  Rng rng(seed);
  Outcome out = mech.allocate(handles, c, rng);
  const std::string bad = check_feasibility(mech, out, c);
  if (!bad.empty()) throw std::runtime_error(mech.name() + " produced an infeasible outcome: " + bad);
  return out;
}

}  // namespace

// ---- truthfulness -----------------------------------------------------------

Json TruthReport::to_json() const {
  Json es = Json::array();
  for (const TruthEntry& e : entries) {
    es.push_back({{"deviation", e.deviation},
                  {"truthful_utility", e.truthful_utility},
                  {"deviation_utility", e.deviation_utility},
                  {"gap", e.gap},
                  {"stderr", e.std_error},
                  {"violation", e.violation}});
  }
  Json j = {{"mechanism", mechanism}, {"player", player},   {"epsilon", epsilon},
            {"trials", trials},       {"seed", seed},       {"violations", violations},
            {"entries", es},          {"pass", pass()}};
  if (payments_missing) j["warning"] = "mechanism reported no payments; treated as 0";
  return j;
}

TruthReport audit_truthfulness(const Mechanism& mech, const std::vector<ValuationOracle>& truth,
                               const Constraint& constraint, std::size_t player,
                               const std::vector<ValuationOracle>& deviations, std::size_t trials,
                               double epsilon, std::uint64_t seed, std::size_t workers) {
  if (trials < 100) throw UsageError("audit_truthfulness needs at least 100 trials");
  if (player >= truth.size()) throw UsageError("audit_truthfulness: player index out of range");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw UsageError("audit_truthfulness: epsilon outside [0, 1]");
  TruthReport rep;
  rep.mechanism = mech.name();
  rep.player = player;
  rep.epsilon = epsilon;
  rep.trials = trials;
  rep.seed = seed;
  const SetFunction& v = truth[player].function();

  std::vector<char> missing(trials, 0);
  auto utilities = [&](const std::vector<ValuationOracle>& declared) {
    std::vector<double> u(trials);
    parallel_chunks(trials, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t t = begin; t < end; ++t) {
        const Outcome out = run_declared(mech, declared, constraint, derive_seed(seed, t));
        double pay = 0.0;
        if (out.payments.empty()) missing[t] = 1;
        else pay = out.payments[player];
        u[t] = v.value(bundle_of(out, constraint.setting, player)) - pay;
      }
    });
    return u;
  };

  const std::vector<double> honest = utilities(truth);
  for (const ValuationOracle& dev : deviations) {
    std::vector<ValuationOracle> declared = truth;
    declared[player] = dev;
    const std::vector<double> lie = utilities(declared);
    std::vector<double> diff(trials);
    for (std::size_t t = 0; t < trials; ++t) diff[t] = honest[t] - (1.0 - epsilon) * lie[t];
    const Moments d = moments(diff);
    TruthEntry e;
    e.deviation = dev.descriptor();
    e.truthful_utility = moments(honest).mean;
    e.deviation_utility = moments(lie).mean;
    e.gap = d.mean;
    e.std_error = d.std_error;
    e.violation = d.mean < -std::max(kSignificanceSigmas * d.std_error, kGapFloor);
    rep.violations += e.violation ? 1 : 0;
    rep.entries.push_back(std::move(e));
  }
  rep.payments_missing = std::any_of(missing.begin(), missing.end(), [](char c) { return c; });
  return rep;
}

// ---- symmetry gap -----------------------------------------------------------

Json GapReport::to_json() const {
  Json ts = Json::array();
  for (const GapTrial& t : trials) {
    ts.push_back({{"seed", t.seed},   {"queries", t.queries}, {"unbalanced", t.unbalanced},
                  {"x", t.x},         {"x_top", t.x_top},     {"value", t.value},
                  {"ceiling", t.ceiling}, {"planted", t.planted}});
  }
  return {{"mechanism", mechanism},
          {"params", config.params.to_json()},
          {"level", config.level},
          {"phi", config.phi.to_json()},
          {"beta", config.beta},
          {"trials", config.trials},
          {"seed", config.seed},
          {"queries", queries},
          {"unbalanced", unbalanced},
          {"unbalanced_rate", queries ? static_cast<double>(unbalanced) / queries : 0.0},
          {"predicted_rate", predicted_rate},
          {"predicted_rate_count_gap", predicted_rate_count_gap},
          {"mean_value", mean_value},
          {"mean_ceiling", mean_ceiling},
          {"error_term", error_term},
          {"error_term_rule", "exp(-n/8)"},
          {"ceiling_exceedances", ceiling_exceedances},
          {"planted_min", planted_min},
          {"planted_bound", planted_bound},
          {"mean_x_top", mean_x_top},
          {"checks",
           {{"unbalanced", unbalanced_ok},
            {"ceiling", ceiling_ok},
            {"planted", planted_ok},
            {"feasible_in_expectation", feasibility_ok}}},
          {"pass", pass()},
          {"per_trial", ts}};
}

GapReport symmetry_gap_experiment(const Mechanism& mech, const GapConfig& cfg) {
  const CppLevelParams& pp = cfg.params;
  if (cfg.level >= pp.ell) throw UsageError("symmetry_gap_experiment: level must be below ell");
  if (cfg.trials == 0) throw UsageError("symmetry_gap_experiment: trials must be positive");
  if (!(cfg.beta > 0.0)) throw UsageError("symmetry_gap_experiment: beta must be positive");
  if (mech.setting() != Setting::cpp) throw UsageError("symmetry_gap_experiment needs a CPP mechanism");

  const BisectionSequence base = sample_bisection_sequence(pp.ell, pp.m, cfg.seed);
  const ItemSet parent = base.parent(cfg.level);
  const Constraint constraint{Setting::cpp, pp.m, pp.k, 1};

  GapReport rep;
  rep.mechanism = mech.name();
  rep.config = cfg;
  rep.trials.resize(cfg.trials);
  parallel_chunks(cfg.trials, cfg.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      GapTrial& tr = rep.trials[t];
      tr.seed = derive_seed(cfg.seed, t);
      Rng rng(tr.seed);
      const BisectionLevel hidden = random_bisection(parent, rng);
      const ValuationOracle f = make_symgap_valuation(hidden.a, hidden.b, cfg.phi, cfg.beta);
      std::uint64_t queries = 0;
      std::uint64_t unbalanced = 0;
      const ValuationOracle watched = observe_queries(f, [&](const ItemSet& s) {
        ++queries;
        if (!balancedness(s, hidden.a, hidden.b, cfg.beta).balanced) ++unbalanced;
      });
      const std::vector<QueryHandle> handles{QueryHandle(watched)};
      const Outcome out = mech.allocate(handles, constraint, rng);
      const std::string bad = check_feasibility(mech, out, constraint);
      if (!bad.empty()) throw std::runtime_error(mech.name() + ": " + bad);
      const ItemSet& r = out.allocation.front();
      tr.queries = queries;
      tr.unbalanced = unbalanced;
      tr.x = static_cast<double>(r.intersection_count(hidden.a)) / hidden.a.count();
      tr.x_top = static_cast<double>(r.count()) / static_cast<double>(pp.m);
      tr.value = f.function().value(r);
      const double px = cfg.phi(tr.x);
      tr.ceiling = 1.0 - (1.0 - px) * (1.0 - px);
      tr.planted = f.function().value(hidden.a);
    }
  });

  const double m_prime = static_cast<double>(parent.count());
  const double b2 = cfg.beta * cfg.beta;
  rep.predicted_rate = std::min(1.0, 4.0 * std::exp(-b2 * m_prime / 8.0));
  rep.predicted_rate_count_gap = std::min(1.0, 4.0 * std::exp(-b2 * m_prime / 2.0));
  rep.error_term = std::exp(-static_cast<double>(pp.n) / 8.0);
  rep.planted_bound = cfg.phi.clamped(1.0 - cfg.beta);
  rep.planted_min = std::numeric_limits<double>::infinity();
  std::vector<double> values, ceilings, tops;
  for (const GapTrial& t : rep.trials) {
    rep.queries += t.queries;
    rep.unbalanced += t.unbalanced;
    values.push_back(t.value);
    ceilings.push_back(t.ceiling);
    tops.push_back(t.x_top);
    rep.planted_min = std::min(rep.planted_min, t.planted);
  }
  rep.mean_value = moments(values).mean;
  rep.mean_ceiling = moments(ceilings).mean;
  rep.mean_x_top = moments(tops).mean;
  const double q = static_cast<double>(rep.queries);
  rep.unbalanced_ok = static_cast<double>(rep.unbalanced) <= rep.predicted_rate * q &&
                      static_cast<double>(rep.unbalanced) <= rep.predicted_rate_count_gap * q;
  for (const GapTrial& t : rep.trials) {
    if (t.value > t.ceiling + rep.error_term) ++rep.ceiling_exceedances;
  }
  rep.ceiling_ok = rep.ceiling_exceedances == 0 && rep.mean_value <= rep.mean_ceiling + rep.error_term;
  rep.planted_ok = rep.planted_min >= rep.planted_bound - 1e-12;
  rep.feasibility_ok = rep.mean_x_top <= 1.0 / static_cast<double>(pp.n) + 1e-12;
  return rep;
}

// ---- menus -----------------------------------------------------------------

Json MenuSample::to_json() const {
  Json ss = Json::array();
  for (const MenuEntry& e : samples) {
    ss.push_back({{"x", e.x}, {"p", e.p}, {"weight", e.weight}, {"source", e.source}});
  }
  return {{"level", level}, {"samples", ss}, {"provenance", provenance}};
}

MenuSample extract_menu(const Mechanism& mech, const std::vector<ValuationOracle>& others,
                        std::size_t player, const ItemSet& block, std::size_t level,
                        const std::vector<ValuationOracle>& family, std::size_t trials,
                        std::uint64_t seed) {
  if (player > others.size()) throw UsageError("extract_menu: player index out of range");
  if (block.empty()) throw UsageError("extract_menu: empty block");
  MenuSample menu;
  menu.level = level;
  if (family.empty()) return menu;
  if (trials == 0) throw UsageError("extract_menu: trials must be positive");
  const std::size_t n = others.size() + 1;
  const Constraint c{mech.setting(), block.ground_size(), block.ground_size(), n};
  const double w = 1.0 / static_cast<double>(family.size() * trials);
  for (std::size_t s = 0; s < family.size(); ++s) {
    std::vector<ValuationOracle> declared = others;
    declared.insert(declared.begin() + static_cast<std::ptrdiff_t>(player), family[s]);
    menu.provenance.push_back(family[s].descriptor());
    const std::uint64_t source_seed = derive_seed(seed, s);
    for (std::size_t t = 0; t < trials; ++t) {
      const Outcome out = run_declared(mech, declared, c, derive_seed(source_seed, t));
      MenuEntry e;
      e.x = static_cast<double>(bundle_of(out, c.setting, player).intersection_count(block)) /
            static_cast<double>(block.count());
      e.p = out.payments.empty() ? 0.0 : out.payments[player];
      e.weight = w;
      e.source = s;
      menu.samples.push_back(e);
    }
  }
  return menu;
}

MenuSample mix_menus(const MenuSample& a, const MenuSample& b, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("mix_menus: lambda outside [0, 1]");
  MenuSample out;
  out.level = a.level;
  out.provenance = a.provenance;
  out.provenance.insert(out.provenance.end(), b.provenance.begin(), b.provenance.end());
  for (MenuEntry e : a.samples) {
    e.weight *= lambda;
    out.samples.push_back(e);
  }
  for (MenuEntry e : b.samples) {
    e.weight *= 1.0 - lambda;
    e.source += a.provenance.size();
    out.samples.push_back(e);
  }
  return out;
}

namespace {

double menu_q(double x, const Phi& phi, double epsilon, std::size_t ell, MenuRole role) {
  if (role == MenuRole::level_j_plus_1) {
    const double v = phi(x);
    return 1.0 - (1.0 - v) * (1.0 - v);
  }
  const double err = std::pow(10.0, -static_cast<double>(ell));
  return (1.0 - epsilon) * phi.clamped(x - err) - err;
}

MenuPoint image_of(const MenuSample& menu, const Phi& phi, double epsilon, std::size_t ell,
                   MenuRole role, std::optional<std::size_t> source) {
  double wsum = 0.0;
  double q = 0.0;
  double p = 0.0;
  for (const MenuEntry& e : menu.samples) {
    if (source && e.source != *source) continue;
    wsum += e.weight;
    q += e.weight * menu_q(e.x, phi, epsilon, ell, role);
    p += e.weight * e.p;
  }
  if (wsum <= 0.0) throw UsageError("menu image of an empty distribution");
  return {q / wsum, p / wsum};
}

}  // namespace

MenuPoint menu_image(const MenuSample& menu, const Phi& phi, double epsilon, std::size_t ell,
                     MenuRole role) {
  return image_of(menu, phi, epsilon, ell, role, std::nullopt);
}

std::vector<MenuPoint> map_menu_to_qp(const MenuSample& menu, const Phi& phi, double epsilon,
                                      std::size_t ell, MenuRole role) {
  if (menu.samples.empty()) throw UsageError("map_menu_to_qp: empty menu");
  std::vector<MenuPoint> out;
  for (std::size_t s = 0; s < menu.provenance.size(); ++s) {
    out.push_back(image_of(menu, phi, epsilon, ell, role, s));
  }
  return out;
}

// ---- separation -------------------------------------------------------------

std::vector<std::size_t> convex_hull(std::span<const MenuPoint> pts) {
  constexpr double snap = 1e-12;
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (std::abs(pts[a].q - pts[b].q) > snap) return pts[a].q < pts[b].q;
    if (std::abs(pts[a].p - pts[b].p) > snap) return pts[a].p < pts[b].p;
    return a < b;
  });
  std::vector<std::size_t> uniq;
  for (std::size_t i : idx) {
    if (!uniq.empty() && std::abs(pts[uniq.back()].q - pts[i].q) <= snap &&
        std::abs(pts[uniq.back()].p - pts[i].p) <= snap) {
      continue;
    }
    uniq.push_back(i);
  }
  if (uniq.size() <= 2) return uniq;
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (pts[a].q - pts[o].q) * (pts[b].p - pts[o].p) -
           (pts[a].p - pts[o].p) * (pts[b].q - pts[o].q);
  };
  std::vector<std::size_t> hull(2 * uniq.size());
  std::size_t h = 0;
  for (std::size_t i : uniq) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], i) <= snap) --h;
    hull[h++] = i;
  }
  for (std::size_t r = uniq.size() - 1, lower = h + 1; r-- > 0;) {
    const std::size_t i = uniq[r];
    while (h >= lower && cross(hull[h - 2], hull[h - 1], i) <= snap) --h;
    hull[h++] = i;
  }
  hull.resize(h - 1);
  return hull;
}

namespace {

std::optional<SeparationWitness> find_witness(std::span<const MenuPoint> pts,
                                              const std::vector<std::size_t>& hull,
                                              MenuPoint target, double tol) {
  auto inside = [&](const MenuPoint& z) {
    return z.q >= target.q - tol && z.p <= target.p + tol;
  };
  for (std::size_t i : hull) {
    if (inside(pts[i])) {
      SeparationWitness w{pts[i], std::vector<double>(pts.size(), 0.0)};
      w.weights[i] = 1.0;
      return w;
    }
  }
  const std::size_t edges = hull.size() < 2 ? 0 : (hull.size() == 2 ? 1 : hull.size());
  for (std::size_t e = 0; e < edges; ++e) {
    const std::size_t ia = hull[e];
    const std::size_t ib = hull[(e + 1) % hull.size()];
    const MenuPoint a = pts[ia];
    const MenuPoint b = pts[ib];
    double lo = 0.0;
    double hi = 1.0;
    // a + t (b - a) must satisfy q >= q0 - tol and p <= p0 + tol.
    auto restrict = [&](double base, double slope) {  // base + t slope >= 0
      if (slope > 0.0) lo = std::max(lo, -base / slope);
      else if (slope < 0.0) hi = std::min(hi, -base / slope);
      else if (base < 0.0) hi = -1.0;
    };
    restrict(a.q - (target.q - tol), b.q - a.q);
    restrict((target.p + tol) - a.p, -(b.p - a.p));
    if (lo > hi) continue;
    const double t = 0.5 * (lo + hi);
    MenuPoint z{a.q + t * (b.q - a.q), a.p + t * (b.p - a.p)};
    if (!inside(z)) continue;
    SeparationWitness w{z, std::vector<double>(pts.size(), 0.0)};
    w.weights[ia] = 1.0 - t;
    w.weights[ib] += t;
    return w;
  }
  return std::nullopt;
}

}  // namespace

SeparationResult separate_quadrant(std::span<const MenuPoint> points, MenuPoint target) {
  if (points.empty()) throw UsageError("separate_quadrant: no points");
  const std::vector<std::size_t> hull = convex_hull(points);
  if (auto w = find_witness(points, hull, target, 1e-12)) return *w;

  // max_i cos θ (q_i - q0) - sin θ (p_i - p0) over θ in [0, π/2]; its minimum
  // sits at an endpoint, a crossing of two terms or a stationary point of one.
  std::vector<double> a, b;
  for (std::size_t i : hull) {
    a.push_back(points[i].q - target.q);
    b.push_back(points[i].p - target.p);
  }
  constexpr double half_pi = std::numbers::pi / 2.0;
  std::vector<double> candidates{0.0, half_pi};
  auto add_angle = [&](double theta) {
    while (theta < 0.0) theta += std::numbers::pi;
    while (theta > std::numbers::pi) theta -= std::numbers::pi;
    if (theta <= half_pi) candidates.push_back(theta);
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    add_angle(std::atan2(-b[i], a[i]) + half_pi);
    for (std::size_t j = i + 1; j < a.size(); ++j) add_angle(std::atan2(a[i] - a[j], b[i] - b[j]));
  }
  double best_theta = 0.0;
  double best_max = std::numeric_limits<double>::infinity();
  for (double theta : candidates) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, c * a[i] - s * b[i]);
    if (worst < best_max) {
      best_max = worst;
      best_theta = theta;
    }
  }
  if (best_max < 0.0) {
    SeparationLine line;
    line.lambda_q = std::cos(best_theta);
    line.lambda_p = std::sin(best_theta);
    if (best_theta == half_pi) line.lambda_q = 0.0;
    if (best_theta == 0.0) line.lambda_p = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    for (const MenuPoint& z : points) {
      margin = std::min(margin, (line.lambda_q * target.q - line.lambda_p * target.p) -
                                    (line.lambda_q * z.q - line.lambda_p * z.p));
    }
    line.margin = margin;
    if (margin > 0.0) return line;
  }
  if (auto w = find_witness(points, hull, target, 1e-9)) return *w;
  throw std::runtime_error("separate_quadrant: configuration is degenerate at 1e-9");
}

// ---- amplification ----------------------------------------------------------

double default_delta() { return std::exp(-10.0); }

Json AmplificationState::to_json() const {
  return {{"level", level}, {"alpha", alpha}, {"xi", xi}, {"delta", delta}, {"epsilon", epsilon}};
}

Json AmplificationCertificate::to_json() const {
  return {{"case", case_id},     {"tail", tail}, {"hypothesis_lhs", hypothesis_lhs},
          {"hypothesis", hypothesis}, {"lhs", lhs}, {"rhs", rhs},
          {"holds", holds},      {"vacuous", vacuous()}};
}

AmplificationState initial_amplification_state(double c, double delta) {
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("amplification: c outside (0, 1]");
  if (!(delta > 0.0 && delta <= 0.25)) throw DomainError("amplification: delta outside (0, 1/4]");
  return {0, 1.0, c, delta, std::pow(delta, 4.0)};
}

AmplificationResult amplification_step(std::span<const double> samples,
                                       const AmplificationState& s) {
  if (samples.empty()) throw UsageError("amplification_step: empty distribution");
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw DomainError("amplification_step: alpha outside (0, 1]");
  if (!(s.xi >= 0.0 && s.xi <= 1.0)) throw DomainError("amplification_step: xi outside [0, 1]");
  if (!(s.delta > 0.0 && s.delta <= 0.25)) throw DomainError("amplification_step: delta outside (0, 1/4]");
  const double n = static_cast<double>(samples.size());
  const double root = std::sqrt(s.delta);
  double hyp = 0.0;
  double tail = 0.0;
  for (double x : samples) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("amplification_step: sample outside [0, 1]");
    const double v = std::min(x / s.alpha, 1.0);
    hyp += 1.0 - (1.0 - v) * (1.0 - v);
    if (x / s.alpha > root) tail += 1.0;
  }
  hyp /= n;
  tail /= n;

  AmplificationResult r;
  AmplificationCertificate& c = r.certificate;
  c.hypothesis_lhs = hyp;
  c.hypothesis = hyp >= (1.0 - 2.0 * s.epsilon) * s.xi;
  c.tail = tail;
  c.case_id = tail > 2.0 * s.delta * s.xi ? 1 : 2;
  const double next_alpha = c.case_id == 1 ? 0.5 * (1.0 + s.delta) * s.alpha : root * s.alpha;
  double next_xi = 0.0;
  for (double x : samples) next_xi += std::min(x / next_alpha, 1.0);
  next_xi /= n;
  c.lhs = next_alpha * std::pow(next_xi, 1.0 + s.delta);
  c.rhs = 0.5 * (1.0 + s.delta * s.delta) * s.alpha * std::pow(s.xi, 1.0 + s.delta);
  // Relative slack for rounding in the sums above.
  c.holds = c.lhs >= c.rhs * (1.0 - 1e-12);
  r.next = {s.level + 1, next_alpha, next_xi, s.delta, s.epsilon};
  return r;
}

namespace {

// One random empirical law on [0, 1], shaped relative to the scale α.
std::vector<double> random_law(Rng& rng, double alpha, double delta, std::size_t max_support) {
  const std::size_t k = 1 + static_cast<std::size_t>(rng.below(max_support));
  std::vector<double> xs(k);
  const double root = std::sqrt(delta);
  switch (rng.below(4)) {
    case 0: {
      const double at = std::min(1.0, alpha * rng.uniform(0.0, 1.5));
      std::fill(xs.begin(), xs.end(), at);
      break;
    }
    case 1: {
      const double s = rng.uniform(0.0, 2.0);
      for (double& x : xs) x = std::min(1.0, alpha * s * rng.uniform());
      break;
    }
    case 2: {
      const double p_small = rng.uniform();
      for (double& x : xs) {
        x = rng.bernoulli(p_small) ? alpha * root * rng.uniform()
                                   : std::min(1.0, alpha * rng.uniform(root, 1.5));
      }
      break;
    }
    default: {
      const double s = rng.uniform(0.0, 3.0);
      const double gamma = rng.uniform(0.2, 5.0);
      for (double& x : xs) x = std::min(1.0, alpha * s * std::pow(rng.uniform(), gamma));
      break;
    }
  }
  return xs;
}

double hypothesis_value(std::span<const double> xs, double alpha) {
  double h = 0.0;
  for (double x : xs) {
    const double v = std::min(x / alpha, 1.0);
    h += 1.0 - (1.0 - v) * (1.0 - v);
  }
  return h / static_cast<double>(xs.size());
}

}  // namespace

Json AmplificationSweep::to_json() const {
  return {{"delta", delta},     {"default_constants", delta == default_delta()},
          {"distributions", distributions}, {"seed", seed},
          {"case1", case1},     {"case2", case2},
          {"failures", failures}, {"worst_ratio", worst_ratio},
          {"worst", worst},     {"pass", pass()}};
}

AmplificationSweep amplification_sweep(double delta, std::size_t distributions,
                                       std::size_t max_support, std::uint64_t seed) {
  if (max_support == 0) throw UsageError("amplification_sweep: max_support must be positive");
  AmplificationSweep sw;
  sw.delta = delta;
  sw.distributions = distributions;
  sw.seed = seed;
  sw.worst_ratio = std::numeric_limits<double>::infinity();
  const double eps = std::pow(delta, 4.0);
  for (std::size_t i = 0; i < distributions; ++i) {
    Rng rng(derive_seed(seed, i));
    double alpha = 0.0;
    std::vector<double> xs;
    double h = 0.0;
    do {
      alpha = 1.0 - rng.uniform();  // (0, 1]
      xs = random_law(rng, alpha, delta, max_support);
      h = hypothesis_value(xs, alpha);
    } while (h <= 0.0);
    const double xi = (1.0 - rng.uniform()) * std::min(1.0, h / (1.0 - 2.0 * eps));
    const AmplificationState state{0, alpha, xi, delta, eps};
    const AmplificationResult r = amplification_step(xs, state);
    if (!r.certificate.hypothesis) continue;  // rounding at the boundary; not counted
    (r.certificate.case_id == 1 ? sw.case1 : sw.case2) += 1;
    const double ratio = r.certificate.lhs / r.certificate.rhs;
    if (!r.certificate.holds) ++sw.failures;
    if (ratio < sw.worst_ratio) {
      sw.worst_ratio = ratio;
      sw.worst = {{"state", state.to_json()},
                  {"certificate", r.certificate.to_json()},
                  {"support", xs.size()},
                  {"index", i}};
    }
  }
  return sw;
}

Json TelescopeReport::to_json() const {
  Json ss = Json::array();
  for (const auto& s : states) ss.push_back(s.to_json());
  Json cs = Json::array();
  for (const auto& c : certificates) cs.push_back(c.to_json());
  return {{"ell", ell},         {"c", c},
          {"delta", delta},     {"states", ss},
          {"certificates", cs}, {"final_lhs", final_lhs},
          {"final_rhs", final_rhs}, {"mean_x_last", mean_x_last},
          {"chain_ok", chain_ok}, {"mean_ok", mean_ok}};
}

TelescopeReport telescope_amplification(std::size_t ell, double c, double delta,
                                        std::size_t samples_per_level, std::uint64_t seed) {
  if (ell == 0) throw UsageError("telescope_amplification: ell must be positive");
  if (samples_per_level == 0) throw UsageError("telescope_amplification: empty levels");
  TelescopeReport rep;
  rep.ell = ell;
  rep.c = c;
  rep.delta = delta;
  AmplificationState state = initial_amplification_state(c, delta);
  rep.states.push_back(state);
  std::vector<double> last;
  for (std::size_t j = 0; j < ell; ++j) {
    Rng rng(derive_seed(seed, j));
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt == 100000) throw std::runtime_error("telescope: no hypothesis-satisfying law found");
      std::vector<double> xs = random_law(rng, state.alpha, delta, samples_per_level);
      const AmplificationResult r = amplification_step(xs, state);
      if (!r.certificate.hypothesis) continue;
      rep.certificates.push_back(r.certificate);
      state = r.next;
      rep.states.push_back(state);
      last = std::move(xs);
      break;
    }
  }
  rep.final_lhs = state.alpha * std::pow(state.xi, 1.0 + delta);
  rep.final_rhs = std::pow(0.5 * (1.0 + delta * delta), static_cast<double>(ell)) *
                  std::pow(c, 1.0 + delta);
  double mean = 0.0;
  for (double x : last) mean += x;
  rep.mean_x_last = mean / static_cast<double>(last.size());
  rep.chain_ok = rep.final_lhs >= rep.final_rhs * (1.0 - 1e-9);
  rep.mean_ok = rep.mean_x_last >= state.alpha * state.xi * (1.0 - 1e-12);
  return rep;
}

// ---- scalar inequalities ----------------------------------------------------

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  v.back() = hi;
  return v;
}

InequalityGrids InequalityGrids::dense(std::size_t points) {
  InequalityGrids g;
  g.power_delta = linspace(0.0, 1.0, points);
  g.case2_delta = linspace(0.0, 0.25, points);
  g.case1_delta = linspace(0.0, 0.5, points);
  const std::size_t side = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(points)));
  g.ordering_delta = linspace(0.0, 1.0, side);
  g.ordering_delta.push_back(default_delta());
  g.ordering_delta.push_back(0.05);
  g.ordering_t = linspace(0.0, 1.0, side);
  return g;
}

Json InequalityResult::to_json() const {
  return {{"name", name},           {"points", points},
          {"violations", violations}, {"min_slack", min_slack},
          {"argmin_delta", argmin_delta}, {"argmin_x", argmin_x}};
}

bool InequalityReport::pass() const {
  return std::all_of(results.begin(), results.end(),
                     [](const InequalityResult& r) { return r.violations == 0; });
}

Json InequalityReport::to_json() const {
  Json rs = Json::array();
  for (const auto& r : results) rs.push_back(r.to_json());
  return {{"tolerance", tolerance}, {"results", rs}, {"pass", pass()}};
}

InequalityReport scalar_inequality_suite(const InequalityGrids& g, double tol) {
  auto check_domain = [](const std::vector<double>& grid, double hi, const char* what) {
    for (double d : grid) {
      if (!(d >= 0.0 && d <= hi)) throw DomainError(std::string(what) + ": grid point outside domain");
    }
  };
  check_domain(g.power_delta, 1.0, "(1+d)^d <= 1+d^2");
  check_domain(g.case2_delta, 0.25, "(1-4d+2d^1.5)^(1+d) >= 1-4d");
  check_domain(g.case1_delta, 0.5, "(1+2d^2-2d^4)^(1+d) >= 1+2d^2+d^4");
  check_domain(g.ordering_delta, 1.0, "ordering inequality delta");
  check_domain(g.ordering_t, 1.0, "ordering inequality t");

  InequalityReport rep;
  rep.tolerance = tol;
  auto one_dim = [&](const char* name, const std::vector<double>& grid, auto slack_fn) {
    InequalityResult r;
    r.name = name;
    r.min_slack = std::numeric_limits<double>::infinity();
    for (double d : grid) {
      const double s = slack_fn(d);
      ++r.points;
      if (s < -tol) ++r.violations;
      if (s < r.min_slack) {
        r.min_slack = s;
        r.argmin_delta = d;
      }
    }
    rep.results.push_back(r);
  };
  one_dim("(1+d)^d <= 1+d^2", g.power_delta,
          [](double d) { return 1.0 + d * d - std::pow(1.0 + d, d); });
  one_dim("(1-4d+2d^1.5)^(1+d) >= 1-4d", g.case2_delta, [](double d) {
    return std::pow(1.0 - 4.0 * d + 2.0 * std::pow(d, 1.5), 1.0 + d) - (1.0 - 4.0 * d);
  });
  one_dim("(1+2d^2-2d^4)^(1+d) >= 1+2d^2+d^4", g.case1_delta, [](double d) {
    const double d2 = d * d;
    return std::pow(1.0 + 2.0 * d2 - 2.0 * d2 * d2, 1.0 + d) - (1.0 + 2.0 * d2 + d2 * d2);
  });

  InequalityResult fig;
  fig.name = "min(2u,1+d) >= 1-(1-min(u,1))^2+d for u >= sqrt(d)";
  fig.min_slack = std::numeric_limits<double>::infinity();
  for (double d : g.ordering_delta) {
    const double root = std::sqrt(d);
    for (double t : g.ordering_t) {
      const double u = root + t * (2.0 - root);
      const double v = std::min(u, 1.0);
      const double s = std::min(2.0 * u, 1.0 + d) - (1.0 - (1.0 - v) * (1.0 - v) + d);
      ++fig.points;
      if (s < -tol) ++fig.violations;
      if (s < fig.min_slack) {
        fig.min_slack = s;
        fig.argmin_delta = d;
        fig.argmin_x = u;
      }
    }
  }
  rep.results.push_back(fig);
  return rep;
}

// ---- Chernoff ---------------------------------------------------------------

Json ChernoffReport::to_json() const {
  return {{"m_prime", m_prime}, {"beta", beta},   {"trials", trials},
          {"seed", seed},       {"exceed", exceed}, {"empirical", empirical},
          {"stderr", std_error}, {"bound", bound}, {"pass", pass}};
}

ChernoffReport chernoff_bisection_test(std::size_t m_prime, double beta, std::size_t trials,
                                       std::uint64_t seed, std::size_t workers) {
  if (m_prime == 0 || m_prime % 2 != 0) throw UsageError("chernoff: m' must be even and positive");
  if (trials == 0) throw UsageError("chernoff: trials must be positive");
  if (!(beta >= 0.0)) throw UsageError("chernoff: beta must be non-negative");
  ChernoffReport rep;
  rep.m_prime = m_prime;
  rep.beta = beta;
  rep.trials = trials;
  rep.seed = seed;
  const std::size_t half = m_prime / 2;
  const double threshold = beta * static_cast<double>(m_prime);
  std::vector<std::uint64_t> counts(std::max<std::size_t>(1, workers), 0);
  parallel_chunks(trials, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<std::size_t> perm(m_prime);
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(derive_seed(seed, t));
      for (std::size_t i = 0; i < m_prime; ++i) perm[i] = i;
      // A = first half of a uniform permutation; only the first half is needed.
      for (std::size_t i = 0; i < half; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(m_prime - i));
        std::swap(perm[i], perm[j]);
      }
      std::size_t s_in_a = 0;
      for (std::size_t i = 0; i < half; ++i) s_in_a += perm[i] < half ? 1 : 0;
      const double diff = std::abs(2.0 * static_cast<double>(s_in_a) - static_cast<double>(half));
      if (diff > threshold) ++counts[c];
    }
  });
  for (std::uint64_t c : counts) rep.exceed += c;
  const double n = static_cast<double>(trials);
  rep.empirical = static_cast<double>(rep.exceed) / n;
  rep.std_error = std::sqrt(rep.empirical * (1.0 - rep.empirical) / n);
  rep.bound = 4.0 * std::exp(-beta * beta * static_cast<double>(m_prime) / 2.0);
  rep.pass = rep.empirical <= rep.bound + 3.0 * rep.std_error;
  return rep;
}

// ---- basic instance ---------------------------------------------------------

Json CountingReport::to_json() const {
  return {{"n", n},
          {"m", m},
          {"trials", trials},
          {"seed", seed},
          {"empirical", empirical},
          {"stderr", std_error},
          {"analytic", analytic},
          {"within_3_stderr", within},
          {"above_half", above_half},
          {"pass", pass()}};
}

CountingReport basic_instance_counting(std::size_t n, std::size_t m, std::size_t trials,
                                       std::uint64_t seed, std::size_t workers) {
  if (n == 0 || m % n != 0) throw UsageError("basic_instance_counting: n must divide m");
  if (trials == 0) throw UsageError("basic_instance_counting: trials must be positive");
  CountingReport rep;
  rep.n = n;
  rep.m = m;
  rep.trials = trials;
  rep.seed = seed;
  std::vector<double> sizes(trials);
  parallel_chunks(trials, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const BasicAuctionInstance inst = make_basic_auction(n, m, 0.5, derive_seed(seed, t));
      ItemSet u(m);
      for (const ItemSet& a : inst.desired_sets) u = u | a;
      sizes[t] = static_cast<double>(u.count());
    }
  });
  const Moments mo = moments(sizes);
  rep.empirical = mo.mean;
  rep.std_error = mo.std_error;
  const double nn = static_cast<double>(n);
  rep.analytic = static_cast<double>(m) * (1.0 - std::pow(1.0 - 1.0 / nn, nn));
  rep.within = std::abs(rep.empirical - rep.analytic) <= 3.0 * rep.std_error + 1e-12;
  const double half = 0.5 * static_cast<double>(m);
  rep.above_half = rep.empirical > half && rep.analytic > half;
  return rep;
}

// ---- scaling probe ----------------------------------------------------------

Json ScalingReport::to_json() const {
  Json tr = Json::array();
  for (const ScalingPoint& p : trace) {
    tr.push_back({{"alpha", p.alpha},
                  {"value", p.value},
                  {"stderr", p.std_error},
                  {"envelope", p.envelope},
                  {"within", p.within}});
  }
  Json ps = Json::array();
  for (const auto& c : pairs) {
    ps.push_back({{"u", c.u}, {"v", c.v}, {"lhs", c.lhs}, {"rhs", c.rhs},
                  {"stderr", c.std_error}, {"violation", c.violation}});
  }
  return {{"mechanism", mechanism},
          {"epsilon", epsilon},
          {"trace", tr},
          {"sup_estimate", sup_estimate},
          {"trace_constant", trace_constant},
          {"envelope_violations", envelope_violations},
          {"monotonicity_violations", monotonicity_violations},
          {"pairs", ps}};
}

ScalingReport scaling_probe(const Mechanism& mech, const ValuationOracle& v, std::size_t k,
                            std::span<const double> alpha_schedule,
                            const std::vector<ValuationOracle>& probes, std::size_t trials,
                            double epsilon, std::uint64_t seed) {
  if (trials == 0) throw UsageError("scaling_probe: trials must be positive");
  if (alpha_schedule.empty()) throw UsageError("scaling_probe: empty schedule");
  for (std::size_t i = 0; i < alpha_schedule.size(); ++i) {
    if (!(alpha_schedule[i] > 0.0) || (i && alpha_schedule[i] <= alpha_schedule[i - 1])) {
      throw UsageError("scaling_probe: schedule must be positive and increasing");
    }
  }
  if (mech.setting() != Setting::cpp) throw UsageError("scaling_probe needs a CPP mechanism");
  const std::size_t m = v.ground_size();
  const Constraint c{Setting::cpp, m, k, 1};

  std::vector<ValuationOracle> decl;
  for (double a : alpha_schedule) decl.push_back(make_scaled(v, a));
  for (const auto& w : probes) decl.push_back(w);
  const std::size_t d = decl.size();

  // sets[i][t]: outcome of declaration i in trial t.
  std::vector<std::vector<ItemSet>> sets(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t t = 0; t < trials; ++t) {
      sets[i].push_back(run_declared(mech, {decl[i]}, c, derive_seed(seed, t)).allocation.front());
    }
  }
  // val[a][i][t] = decl[a](A_t(decl[i])); v itself is decl-independent.
  auto value_on = [&](const SetFunction& f, std::size_t i) {
    std::vector<double> out(trials);
    for (std::size_t t = 0; t < trials; ++t) out[t] = f.value(sets[i][t]);
    return out;
  };
  std::vector<std::vector<double>> v_on(d);
  for (std::size_t i = 0; i < d; ++i) v_on[i] = value_on(v.function(), i);
  std::vector<std::vector<std::vector<double>>> w_on(d, std::vector<std::vector<double>>(d));
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t i = 0; i < d; ++i) w_on[a][i] = value_on(decl[a].function(), i);
  }

  ScalingReport rep;
  rep.mechanism = mech.name();
  rep.epsilon = epsilon;
  rep.sup_estimate = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d; ++i) rep.sup_estimate = std::max(rep.sup_estimate, moments(v_on[i]).mean);

  const double keep = 1.0 - epsilon;
  for (std::size_t s = 0; s < alpha_schedule.size(); ++s) {
    ScalingPoint p;
    p.alpha = alpha_schedule[s];
    const Moments val = moments(v_on[s]);
    p.value = val.mean;
    p.std_error = val.std_error;
    p.envelope = -std::numeric_limits<double>::infinity();
    std::vector<double> best_diff;
    for (std::size_t w = 0; w < d; ++w) {
      std::vector<double> env(trials), diff(trials);
      for (std::size_t t = 0; t < trials; ++t) {
        env[t] = keep * v_on[w][t] - (w_on[w][w][t] - keep * w_on[w][s][t]) / p.alpha;
        diff[t] = v_on[s][t] - env[t];
      }
      const double e = moments(env).mean;
      if (e > p.envelope) {
        p.envelope = e;
        best_diff = diff;
      }
    }
    const Moments gap = moments(best_diff);
    p.within = gap.mean >= -std::max(kSignificanceSigmas * gap.std_error, kGapFloor);
    rep.envelope_violations += p.within ? 0 : 1;
    rep.trace.push_back(p);
  }
  rep.trace_constant = std::all_of(rep.trace.begin(), rep.trace.end(), [&](const ScalingPoint& p) {
    return p.value == rep.trace.front().value;
  });

  // v^T A(v) - (1-ε) u^T A(v) >= (1-ε) v^T A(u) - u^T A(u) for declarations u, v.
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      if (a == b) continue;
      WeakMonotonicityCheck chk;
      chk.v = a;
      chk.u = b;
      std::vector<double> diff(trials);
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const double l = w_on[a][a][t] - keep * w_on[b][a][t];
        const double r = keep * w_on[a][b][t] - w_on[b][b][t];
        lhs += l;
        rhs += r;
        diff[t] = l - r;
      }
      chk.lhs = lhs / static_cast<double>(trials);
      chk.rhs = rhs / static_cast<double>(trials);
      const Moments mo = moments(diff);
      chk.std_error = mo.std_error;
      chk.violation = mo.mean < -std::max(kSignificanceSigmas * mo.std_error, kGapFloor);
      rep.monotonicity_violations += chk.violation ? 1 : 0;
      rep.pairs.push_back(chk);
    }
  }
  return rep;
}

}  // namespace symgap
