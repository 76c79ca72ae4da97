#include "symgap/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symgap/error.hpp"
#include "symgap/parallel.hpp"
#include "symgap/setfn.hpp"

namespace symgap {

FractionalPoint::FractionalPoint(std::vector<double> x) : x_(std::move(x)) {
  for (double v : x_) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("fractional point coordinate outside [0, 1]");
  }
}

FractionalPoint FractionalPoint::constant(std::size_t m, double value) {
  return FractionalPoint(std::vector<double>(m, value));
}

FractionalPoint FractionalPoint::indicator(const ItemSet& s) {
  std::vector<double> x(s.ground_size(), 0.0);
  for (std::size_t j : s.items()) x[j] = 1.0;
  return FractionalPoint(std::move(x));
}

FractionalPoint FractionalPoint::midpoint(const FractionalPoint& other) const {
  if (other.size() != size()) throw UsageError("midpoint: dimension mismatch");
  std::vector<double> mid(size());
  for (std::size_t j = 0; j < size(); ++j) mid[j] = 0.5 * (x_[j] + other.x_[j]);
  return FractionalPoint(std::move(mid));
}

std::string to_string(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::monte_carlo: return "monte_carlo";
    case EstimatorMode::exact_enum: return "exact_enum";
    case EstimatorMode::exact_blockwise: return "exact_blockwise";
  }
  return "unknown";
}

Json Estimate::to_json() const {
  return {{"value", value}, {"stderr", std_error}, {"mode", to_string(mode)},
          {"samples", samples}, {"seed", seed}, {"workers", workers}};
}

std::vector<double> binomial_pmf(std::size_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial_pmf: p outside [0, 1]");
  std::vector<double> pmf(n + 1, 0.0);
  if (p == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf[n] = 1.0;
    return pmf;
  }
  const double nn = static_cast<double>(n);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_n_fact = std::lgamma(nn + 1.0);
  std::vector<double> logs(n + 1);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a <= n; ++a) {
    const double k = static_cast<double>(a);
    logs[a] = log_n_fact - std::lgamma(k + 1.0) - std::lgamma(nn - k + 1.0) + k * log_p +
              (nn - k) * log_q;
    peak = std::max(peak, logs[a]);
  }
  // Terms more than e^60 below the mode are dropped; they are far below
  // double rounding of the sums that consume this table.
  for (std::size_t a = 0; a <= n; ++a) {
    if (logs[a] >= peak - 60.0) pmf[a] = std::exp(logs[a]);
  }
  return pmf;
}

std::vector<double> poisson_binomial_pmf(std::span<const double> probs) {
  std::vector<double> pmf(probs.size() + 1, 0.0);
  pmf[0] = 1.0;
  std::size_t filled = 0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("poisson_binomial_pmf: p outside [0, 1]");
    ++filled;
    for (std::size_t a = filled; a > 0; --a) pmf[a] = pmf[a] * (1.0 - p) + pmf[a - 1] * p;
    pmf[0] *= 1.0 - p;
  }
  return pmf;
}

namespace {

std::vector<double> block_count_pmf(const ItemSet& block, const FractionalPoint& x) {
  std::vector<double> probs;
  probs.reserve(block.count());
  for (std::size_t j : block.items()) probs.push_back(x[j]);
  const bool uniform = std::all_of(probs.begin(), probs.end(),
                                   [&](double p) { return p == probs.front(); });
  if (uniform && !probs.empty()) return binomial_pmf(probs.size(), probs.front());
  return poisson_binomial_pmf(probs);
}

double combine_block_pmfs(const BlockProfile& blocks, const std::vector<double>& pa,
                          const std::vector<double>& pb) {
  auto support = [](const std::vector<double>& p) {
    std::size_t lo = 0;
    std::size_t hi = p.size();
    while (lo < hi && p[lo] == 0.0) ++lo;
    while (hi > lo && p[hi - 1] == 0.0) --hi;
    return std::pair{lo, hi};
  };
  const auto [a_lo, a_hi] = support(pa);
  const auto [b_lo, b_hi] = support(pb);
  double total = 0.0;
  for (std::size_t a = a_lo; a < a_hi; ++a) {
    double row = 0.0;
    for (std::size_t b = b_lo; b < b_hi; ++b) row += pb[b] * blocks.profile(a, b);
    total += pa[a] * row;
  }
  return total;
}

Estimate exact_enum(const ValuationOracle& f, const FractionalPoint& x) {
  const std::size_t m = f.ground_size();
  if (m > kMaxExhaustiveItems) throw UsageError("exact_enum requires m <= 24");
  std::vector<double> prob{1.0};
  prob.reserve(std::size_t{1} << m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t half = prob.size();
    prob.resize(2 * half);
    for (std::size_t s = 0; s < half; ++s) {
      prob[half + s] = prob[s] * x[j];
      prob[s] *= 1.0 - x[j];
    }
  }
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < prob.size(); ++mask) {
    if (prob[mask] == 0.0) continue;
    total += prob[mask] * f.eval(ItemSet::from_mask(m, mask));
  }
  Estimate e;
  e.value = total;
  e.mode = EstimatorMode::exact_enum;
  return e;
}

Estimate monte_carlo(const ValuationOracle& f, const FractionalPoint& x, const EstimatorConfig& cfg) {
  if (cfg.samples < 2) throw UsageError("monte_carlo needs at least two samples");
  const std::size_t m = f.ground_size();
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, cfg.samples));
  struct Partial {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::vector<Partial> parts(workers);
  parallel_chunks(cfg.samples, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    Rng rng(derive_seed(cfg.seed, c));
    Partial& p = parts[c];
    ItemSet s(m);
    for (std::size_t t = begin; t < end; ++t) {
      s = ItemSet(m);
      for (std::size_t j = 0; j < m; ++j) {
        if (rng.bernoulli(x[j])) s.insert(j);
      }
      const double v = f.eval(s);
      p.n += 1.0;
      const double d = v - p.mean;
      p.mean += d / p.n;
      p.m2 += d * (v - p.mean);
    }
  });
  Partial all;
  for (const Partial& p : parts) {
    if (p.n == 0.0) continue;
    const double n = all.n + p.n;
    const double d = p.mean - all.mean;
    all.mean += d * p.n / n;
    all.m2 += p.m2 + d * d * all.n * p.n / n;
    all.n = n;
  }
  Estimate e;
  e.value = all.mean;
  e.std_error = std::sqrt(all.m2 / (all.n - 1.0) / all.n);
  e.mode = EstimatorMode::monte_carlo;
  e.samples = cfg.samples;
  e.seed = cfg.seed;
  e.workers = workers;
  return e;
}

}  // namespace

Estimate multilinear_F(const ValuationOracle& f, const FractionalPoint& x,
                       const EstimatorConfig& cfg) {
  if (x.size() != f.ground_size()) throw UsageError("multilinear_F: dimension mismatch");
  switch (cfg.mode) {
    case EstimatorMode::exact_enum:
      return exact_enum(f, x);
    case EstimatorMode::exact_blockwise: {
      const BlockProfile* blocks = f.block_profile();
      if (!blocks) throw UsageError("exact_blockwise requires a block-symmetric valuation");
      Estimate e;
      e.value = exact_F_block_point(*blocks, x);
      e.mode = EstimatorMode::exact_blockwise;
      return e;
    }
    case EstimatorMode::monte_carlo:
      return monte_carlo(f, x, cfg);
  }
  throw UsageError("unknown estimator mode");
}

FractionalPoint poisson_transform(const FractionalPoint& x) {
  std::vector<double> p(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) p[j] = -std::expm1(-x[j]);
  return FractionalPoint(std::move(p));
}

Estimate f_exp(const ValuationOracle& f, const FractionalPoint& x, const EstimatorConfig& cfg) {
  return multilinear_F(f, poisson_transform(x), cfg);
}

double exact_F_blockwise(const BlockProfile& blocks, double x_a, double x_b) {
  if (!(x_a >= 0.0 && x_a <= 1.0 && x_b >= 0.0 && x_b <= 1.0)) {
    throw DomainError("exact_F_blockwise: block values outside [0, 1]");
  }
  return combine_block_pmfs(blocks, binomial_pmf(blocks.block_a().count(), x_a),
                            binomial_pmf(blocks.block_b().count(), x_b));
}

double exact_F_block_point(const BlockProfile& blocks, const FractionalPoint& x) {
  if (x.size() != blocks.block_a().ground_size()) {
    throw UsageError("exact_F_block_point: dimension mismatch");
  }
  return combine_block_pmfs(blocks, block_count_pmf(blocks.block_a(), x),
                            block_count_pmf(blocks.block_b(), x));
}

PairSource random_pair_source(std::size_t m, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [m, rng]() -> std::optional<PointPair> {
    std::vector<double> x(m);
    std::vector<double> y(m);
    for (auto& v : x) v = rng->uniform();
    for (auto& v : y) v = rng->uniform();
    return PointPair{FractionalPoint(std::move(x)), FractionalPoint(std::move(y))};
  };
}

PairSource random_block_pair_source(std::size_t m, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [m, rng]() -> std::optional<PointPair> {
    auto draw = [&] {
      const double a = rng->uniform();
      const double b = rng->uniform();
      std::vector<double> x(m);
      for (std::size_t j = 0; j < m; ++j) x[j] = j < m / 2 ? a : b;
      return FractionalPoint(std::move(x));
    };
    FractionalPoint x = draw();
    FractionalPoint y = draw();
    return PointPair{std::move(x), std::move(y)};
  };
}

PairSource grid_pair_source(std::size_t m, double step) {
  if (!(step > 0.0 && step <= 0.5)) throw UsageError("grid_pair_source: step must lie in (0, 0.5]");
  const auto ticks = static_cast<long>(std::llround(1.0 / step));
  if (std::abs(static_cast<double>(ticks) * step - 1.0) > 1e-9) {
    throw UsageError("grid_pair_source: 1/step must be an integer");
  }
  // Directions with first non-zero coordinate positive; (x, x+2hd) and
  // (x+2hd, x) are the same probe.
  std::vector<std::vector<int>> dirs;
  std::vector<int> d(m, -1);
  while (true) {
    auto first = std::find_if(d.begin(), d.end(), [](int v) { return v != 0; });
    if (first != d.end() && *first > 0) dirs.push_back(d);
    std::size_t k = 0;
    while (k < m && d[k] == 1) d[k++] = -1;
    if (k == m) break;
    ++d[k];
  }
  struct State {
    std::vector<long> point;
    std::size_t dir = 0;
    bool done = false;
  };
  auto state = std::make_shared<State>();
  state->point.assign(m, 0);
  return [=]() -> std::optional<PointPair> {
    while (!state->done) {
      const auto& dir = dirs[state->dir];
      bool inside = true;
      std::vector<double> x(m);
      std::vector<double> y(m);
      for (std::size_t j = 0; j < m; ++j) {
        const long end = state->point[j] + 2 * dir[j];
        if (end < 0 || end > ticks) inside = false;
        x[j] = static_cast<double>(state->point[j]) / static_cast<double>(ticks);
        y[j] = static_cast<double>(end) / static_cast<double>(ticks);
      }
      if (++state->dir == dirs.size()) {
        state->dir = 0;
        std::size_t k = 0;
        while (k < m && state->point[k] == ticks) state->point[k++] = 0;
        if (k == m) state->done = true;
        else ++state->point[k];
      }
      if (inside) return PointPair{FractionalPoint(std::move(x)), FractionalPoint(std::move(y))};
    }
    return std::nullopt;
  };
}

PairSource explicit_pair_source(std::vector<PointPair> pairs) {
  auto data = std::make_shared<std::vector<PointPair>>(std::move(pairs));
  auto next = std::make_shared<std::size_t>(0);
  return [data, next]() -> std::optional<PointPair> {
    if (*next >= data->size()) return std::nullopt;
    return (*data)[(*next)++];
  };
}

PairSource interleave(PairSource first, PairSource second) {
  auto turn = std::make_shared<bool>(false);
  return [=]() -> std::optional<PointPair> {
    *turn = !*turn;
    auto p = *turn ? first() : second();
    if (!p) p = *turn ? second() : first();
    return p;
  };
}

std::vector<ConcavityViolation> concavity_probe(
    const std::function<double(const FractionalPoint&)>& g, const PairSource& sampler,
    std::size_t trials, double tol) {
  if (trials == 0) throw UsageError("concavity_probe: trials must be positive");
  std::vector<ConcavityViolation> out;
  for (std::size_t t = 0; t < trials; ++t) {
    auto pair = sampler();
    if (!pair) break;
    auto& [x, y] = *pair;
    const FractionalPoint mid = x.midpoint(y);
    const double lhs = g(mid);
    const double rhs = 0.5 * (g(x) + g(y));
    if (lhs < rhs - tol) out.push_back({x, y, lhs, rhs, lhs - rhs});
  }
  return out;
}

}  // namespace symgap
