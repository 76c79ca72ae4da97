// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fail.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "symgap/experiments.hpp"

using namespace symgap;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Report run(const std::string& name, Json params = Json::object(), std::uint64_t seed = 1) {
  ExperimentConfig c;
  c.experiment = name;
  c.params = std::move(params);
  c.seed = seed;
  return run_experiment(c);
}

std::string failed_assertions(const Report& r) {
  std::string out;
  for (const auto& a : r.assertions) {
    if (!a.pass) out += (out.empty() ? "" : "; ") + a.name + " " + a.detail;
  }
  return out;
}

// Runs an experiment and requires every assertion to pass within a time limit.
Outcome timed(const std::string& name, double limit_s, Json params = Json::object()) {
  const auto t0 = std::chrono::steady_clock::now();
  const Report r = run(name, std::move(params));
  const double dt = seconds_since(t0);
  std::string detail = std::to_string(r.assertions.size()) + " assertions";
  if (limit_s > 0) detail += ", " + std::to_string(dt) + " s (limit " + std::to_string(limit_s) + " s)";
  if (!r.pass()) detail += "; failed: " + failed_assertions(r);
  return {r.pass() && (limit_s <= 0 || dt < limit_s), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 gap instance midpoint and indicator (exact blockwise)",
       [] {
         const auto t0 = std::chrono::steady_clock::now();
         const Report r = run("gap955", {{"blocks", 200}, {"alpha", 0.5}});
         const double dt = seconds_since(t0);
         const double ind = r.metrics.at("f_exp_indicator_m1");
         const double mid = r.metrics.at("f_exp_half");
         char buf[160];
         std::snprintf(buf, sizeof buf, "F^exp(1_M1)=%.10f F^exp(1/2)=%.10f %.3f s", ind, mid, dt);
         return Outcome{r.pass() && dt < 5.0, buf};
       }},
      {"2 concavity probes and violations", [] { return timed("concavity", 0); }},
      {"3 product composition", [] { return timed("product-compose", 60.0, {{"pairs", 100}, {"m", 10}}); }},
      {"4 perturbed valuation structure and pointwise bound", [] { return timed("psi-tilde-check", 0); }},
      {"5 bisection Chernoff tails", [] { return timed("chernoff", 0, {{"trials", 100000}}); }},
      {"6 symmetry-gap experiment at ell = 1", [] { return timed("symgap", 300.0); }},
      {"7 inequalities, amplification certificates, telescoping",
       [] {
         const Outcome a = timed("inequalities", 0, {{"points", 100000}});
         const Outcome b = timed("amplify", 0, {{"distributions", 10000}});
         return Outcome{a.pass && b.pass, "inequalities: " + a.detail + "; amplify: " + b.detail};
       }},
      {"8 basic instance counting", [] { return timed("basic-count", 0); }},
      {"9 greedy versus optimum", [] { return timed("greedy-ratio", 0, {{"instances", 50}}); }},
      {"10 Poisson MIDR closed forms and sampling", [] { return timed("poisson-midr", 0); }},
      {"11 truthfulness audit", [] {
         return timed("vcg-audit", 0, {{"deviations", 20}, {"trials", 1000}, {"n", 2}, {"m", 8}});
       }},
      {"12 quadrant separation", [] { return timed("menu-separation", 0, {{"configs", 200}}); }},
      {"13 byte-identical reruns",
       [] {
         std::size_t same = 0, total = 0;
         const std::vector<std::pair<std::string, Json>> cmds{
             {"gap955", Json::object()},
             {"chernoff", {{"m", 400}, {"beta", 0.1}, {"trials", 100000}}},
             {"greedy-ratio", Json::object()},
             {"menu-separation", {{"configs", 40}}},
             {"amplify", {{"distributions", 2000}}},
             {"symgap", {{"trials", 10}, {"mechanism", "greedy"}}},
         };
         for (const auto& [name, params] : cmds) {
           ++total;
           if (run(name, params, 7).dump() == run(name, params, 7).dump()) ++same;
         }
         return Outcome{same == total, std::to_string(same) + "/" + std::to_string(total) + " identical"};
       }},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << "  [" << o.detail << "]"
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
