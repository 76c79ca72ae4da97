#include "symgap/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "symgap/error.hpp"
#include "symgap/setfn.hpp"

namespace symgap {

Phi Phi::alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConstructionError("phi_alpha: alpha must lie in (0, 1]");
  Phi p;
  p.alpha_ = alpha;
  return p;
}

Phi Phi::tabulated(std::vector<double> values) {
  if (values.size() < 2) throw ConstructionError("tabulated phi needs at least two knots");
  constexpr double kTol = 1e-12;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
      throw ConstructionError("tabulated phi values must lie in [0, 1]");
    }
    if (i > 0 && values[i] < values[i - 1] - kTol) {
      throw ConstructionError("tabulated phi must be non-decreasing");
    }
    if (i > 1 && values[i] - values[i - 1] > values[i - 1] - values[i - 2] + kTol) {
      throw ConstructionError("tabulated phi must be concave");
    }
  }
  Phi p;
  p.table_ = std::move(values);
  return p;
}

double Phi::operator()(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("phi: argument outside [0, 1]");
  if (table_.empty()) return std::min(t / alpha_, 1.0);
  const double pos = t * static_cast<double>(table_.size() - 1);
  const auto lo = std::min(static_cast<std::size_t>(pos), table_.size() - 2);
  const double frac = pos - static_cast<double>(lo);
  return table_[lo] + frac * (table_[lo + 1] - table_[lo]);
}

double Phi::clamped(double t) const { return (*this)(std::clamp(t, 0.0, 1.0)); }

Json Phi::to_json() const {
  if (table_.empty()) return {{"family", "alpha"}, {"alpha", alpha_}};
  return {{"family", "table"}, {"values", table_}};
}

Phi Phi::from_json(const Json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "alpha") return alpha(j.at("alpha").get<double>());
  if (family == "table") return tabulated(j.at("values").get<std::vector<double>>());
  throw UsageError("unknown phi family: " + family);
}

double phi_alpha(double alpha, double t) { return Phi::alpha(alpha)(t); }

double psi(const Phi& phi, double x, double y) {
  return 1.0 - (1.0 - phi(x)) * (1.0 - phi(y));
}

double psi_tilde(const Phi& phi, double beta, double x, double y) {
  if (!(beta > 0.0)) throw DomainError("psi_tilde: beta must be positive");
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw DomainError("psi_tilde: arguments outside [0, 1]^2");
  }
  const double half = 0.5 * beta;
  if (std::abs(x - y) <= beta) {
    const double mid = 0.5 * (x + y);
    return psi(phi, mid, mid);
  }
  if (x - y > beta) return psi(phi, x - half, y + half);
  return psi(phi, x + half, y - half);
}

namespace {

void validate_blocks(const ItemSet& a, const ItemSet& b, const char* what) {
  if (a.ground_size() != b.ground_size()) {
    throw ConstructionError(std::string(what) + ": blocks have different ground sizes");
  }
  if (a.empty() || b.empty()) throw ConstructionError(std::string(what) + ": empty block");
  if (a.count() != b.count()) throw ConstructionError(std::string(what) + ": |A| != |B|");
  if (!a.disjoint_from(b)) throw ConstructionError(std::string(what) + ": blocks overlap");
}

// Value depends on (|S∩A|/|A|, |S∩B|/|B|) through ψ̃ (perturbed) or ψ.
class TwoBlockFunction final : public SetFunction, public BlockProfile {
 public:
  TwoBlockFunction(ItemSet a, ItemSet b, Phi phi, std::optional<double> beta)
      : a_(std::move(a)), b_(std::move(b)), phi_(std::move(phi)), beta_(beta),
        size_a_(static_cast<double>(a_.count())), size_b_(static_cast<double>(b_.count())) {}

  std::size_t ground_size() const override { return a_.ground_size(); }
  double value(const ItemSet& s) const override {
    return profile(s.intersection_count(a_), s.intersection_count(b_));
  }
  Json descriptor() const override {
    Json params = {{"m", a_.ground_size()}, {"a", a_.to_hex()}, {"b", b_.to_hex()},
                   {"phi", phi_.to_json()}};
    if (beta_) {
      params["beta"] = *beta_;
      return {{"kind", "symgap"}, {"params", params}};
    }
    return {{"kind", "block_product"}, {"params", params}};
  }
  const BlockProfile* block_profile() const override { return this; }

  const ItemSet& block_a() const override { return a_; }
  const ItemSet& block_b() const override { return b_; }
  double profile(std::size_t a, std::size_t b) const override {
    const double x = static_cast<double>(a) / size_a_;
    const double y = static_cast<double>(b) / size_b_;
    if (!beta_) return psi(phi_, x, y);
    // Blocks have equal size; inside the band the value is computed from a + b
    // alone so sets with equal totals get bit-identical values.
    const double gap = (static_cast<double>(a) - static_cast<double>(b)) / size_a_;
    if (std::abs(gap) <= *beta_) {
      const double mid = static_cast<double>(a + b) / (2.0 * size_a_);
      return psi(phi_, mid, mid);
    }
    return psi_tilde(phi_, *beta_, x, y);
  }

 private:
  ItemSet a_;
  ItemSet b_;
  Phi phi_;
  std::optional<double> beta_;
  double size_a_;
  double size_b_;
};

}  // namespace

ValuationOracle make_symgap_valuation(const ItemSet& a, const ItemSet& b, const Phi& phi,
                                      double beta) {
  validate_blocks(a, b, "make_symgap_valuation");
  if (!(beta > 0.0)) throw ConstructionError("make_symgap_valuation: beta must be positive");
  return ValuationOracle(std::make_shared<TwoBlockFunction>(a, b, phi, beta));
}

ValuationOracle make_scaled_symgap_valuation(const ItemSet& a, const ItemSet& b,
                                             const Phi& phi, double beta, double lambda) {
  if (!(lambda >= 0.0)) throw ConstructionError("make_scaled_symgap_valuation: lambda must be >= 0");
  return make_scaled(make_symgap_valuation(a, b, phi, beta), lambda);
}

ValuationOracle make_block_product(const ItemSet& a, const ItemSet& b, const Phi& phi) {
  validate_blocks(a, b, "make_block_product");
  return ValuationOracle(std::make_shared<TwoBlockFunction>(a, b, phi, std::nullopt));
}

ValuationOracle make_gap_instance(std::size_t block_size, double alpha) {
  if (block_size == 0) throw ConstructionError("make_gap_instance: empty blocks");
  const std::size_t m = 2 * block_size;
  ItemSet a(m);
  ItemSet b(m);
  for (std::size_t j = 0; j < block_size; ++j) {
    a.insert(j);
    b.insert(block_size + j);
  }
  return make_block_product(a, b, Phi::alpha(alpha));
}

ItemSet BisectionSequence::parent(std::size_t j) const {
  if (j + 1 > ell) return ItemSet::full(m);
  return levels[j + 1].a;
}

Json BisectionSequence::to_json() const {
  Json lv = Json::array();
  for (const auto& l : levels) lv.push_back({{"a", l.a.to_hex()}, {"b", l.b.to_hex()}});
  return {{"kind", "bisection_sequence"}, {"m", m}, {"ell", ell}, {"seed", seed}, {"levels", lv}};
}

BisectionSequence sample_bisection_sequence(std::size_t ell, std::size_t m, std::uint64_t seed) {
  if (ell >= 63 || m == 0 || m % (std::size_t{1} << ell) != 0) {
    throw UsageError("sample_bisection_sequence: 2^ell must divide m");
  }
  Rng rng(seed);
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm);

  BisectionSequence seq;
  seq.ell = ell;
  seq.m = m;
  seq.seed = seed;
  seq.levels.resize(ell + 1);
  for (std::size_t j = 0; j < ell; ++j) {
    const std::size_t size = m >> (ell - j);
    seq.levels[j].a = ItemSet::from_items(m, std::span(perm.data(), size));
    seq.levels[j].b = ItemSet::from_items(m, std::span(perm.data() + size, size));
  }
  seq.levels[ell] = {ItemSet::full(m), ItemSet::full(m)};
  return seq;
}

BisectionLevel random_bisection(const ItemSet& parent, Rng& rng) {
  std::vector<std::size_t> items = parent.items();
  if (items.empty() || items.size() % 2 != 0) {
    throw UsageError("random_bisection: parent must have a positive even size");
  }
  rng.shuffle(items);
  const std::size_t half = items.size() / 2;
  const std::size_t m = parent.ground_size();
  return {ItemSet::from_items(m, std::span(items.data(), half)),
          ItemSet::from_items(m, std::span(items.data() + half, half))};
}

ItemSet random_subset(const ItemSet& parent, std::size_t size, Rng& rng) {
  std::vector<std::size_t> items = parent.items();
  if (size > items.size()) throw UsageError("random_subset: size exceeds parent");
  // Partial Fisher-Yates: first `size` positions are a uniform sample.
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(items.size() - i));
    std::swap(items[i], items[j]);
  }
  return ItemSet::from_items(parent.ground_size(), std::span(items.data(), size));
}

CppLevelParams CppLevelParams::standard(std::size_t ell) {
  if (ell < 1 || ell > 2) {
    throw UsageError("standard parameters m = 400^ell are supported for ell in {1, 2} only; "
                     "ell = 3 already needs m = 64,000,000 items");
  }
  CppLevelParams p;
  p.ell = ell;
  p.m = ell == 1 ? 400 : 160000;
  p.k = ell == 1 ? 200 : 40000;
  p.n = std::size_t{1} << ell;
  p.beta = static_cast<double>(p.n) / std::sqrt(static_cast<double>(p.m));
  return p;
}

Json CppLevelParams::to_json() const {
  return {{"ell", ell}, {"m", m}, {"k", k}, {"n", n}, {"beta", beta}};
}

std::vector<ValuationOracle> BasicAuctionInstance::valuations() const {
  std::vector<ValuationOracle> out;
  out.reserve(desired_sets.size());
  for (const auto& a : desired_sets) out.push_back(make_polar(a, omega).with_seed(seed));
  return out;
}

Json BasicAuctionInstance::to_json() const {
  Json sets = Json::array();
  for (const auto& a : desired_sets) sets.push_back(a.to_hex());
  return {{"kind", "basic_auction"}, {"m", m}, {"n", n}, {"omega", omega},
          {"seed", seed}, {"desired_sets", sets}};
}

BasicAuctionInstance make_basic_auction(std::size_t n, std::size_t m, double omega,
                                        std::uint64_t seed) {
  if (n == 0 || m == 0 || m % n != 0) throw UsageError("make_basic_auction: n must divide m");
  if (!(omega > 0.0 && omega < 1.0)) throw ConstructionError("make_basic_auction: omega must lie in (0, 1)");
  BasicAuctionInstance inst;
  inst.n = n;
  inst.m = m;
  inst.omega = omega;
  inst.seed = seed;
  Rng rng(seed);
  const ItemSet ground = ItemSet::full(m);
  for (std::size_t i = 0; i < n; ++i) inst.desired_sets.push_back(random_subset(ground, m / n, rng));
  return inst;
}

Balancedness balancedness(const ItemSet& s, const ItemSet& a, const ItemSet& b, double beta) {
  if (a.empty() || b.empty()) throw UsageError("balancedness: empty block");
  if (a.count() != b.count()) throw UsageError("balancedness: |A| != |B|");
  Balancedness r;
  r.x = static_cast<double>(s.intersection_count(a)) / static_cast<double>(a.count());
  r.y = static_cast<double>(s.intersection_count(b)) / static_cast<double>(b.count());
  r.gap = std::abs(r.x - r.y);
  r.balanced = r.gap <= beta;
  return r;
}

}  // namespace symgap
