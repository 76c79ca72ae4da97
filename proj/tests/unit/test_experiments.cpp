#include <gtest/gtest.h>

#include <sstream>

#include "symgap/error.hpp"
#include "symgap/experiments.hpp"

using namespace symgap;

TEST(Experiments, RegistryCoversSubcommands) {
  for (const char* name : {"gap955", "concavity", "submod-check", "product-compose", "psi-tilde-check",
                           "chernoff", "bisect-uniformity", "greedy-ratio", "poisson-midr", "vcg-audit",
                           "symgap", "menu-separation", "amplify", "inequalities", "basic-count",
                           "scaling-probe", "suite", "plot-data"}) {
    EXPECT_NO_THROW(experiment_info(name)) << name;
  }
  EXPECT_THROW(experiment_info("nope"), UsageError);
}

TEST(Experiments, UnknownOrMistypedParamIsUsageError) {
  ExperimentConfig c;
  c.experiment = "gap955";
  c.params = {{"blockz", 3}};
  EXPECT_THROW(run_experiment(c), UsageError);
  c.params = {{"blocks", "many"}};
  EXPECT_THROW(run_experiment(c), UsageError);
  c.experiment = "symgap";
  c.params = {{"ell", 3}};
  EXPECT_THROW(run_experiment(c), UsageError);
}

TEST(Experiments, Gap955Report) {
  ExperimentConfig c;
  c.experiment = "gap955";
  const Report r = run_experiment(c);
  EXPECT_TRUE(r.pass());
  EXPECT_NEAR(r.metrics.at("f_exp_half").get<double>(), 0.955, 0.001);
  EXPECT_EQ(r.params.at("blocks"), 200);
}

TEST(Experiments, DumpIsByteStable) {
  ExperimentConfig c;
  c.experiment = "chernoff";
  c.seed = 7;
  c.params = {{"m", 100}, {"beta", 0.2}, {"trials", 3000}};
  EXPECT_EQ(run_experiment(c).dump(), run_experiment(c).dump());
  ExperimentConfig d = c;
  d.workers = 3;
  EXPECT_EQ(run_experiment(c).to_json().at("metrics"), run_experiment(d).to_json().at("metrics"));
}

TEST(PlotData, PsiTildeGridRows) {
  ExperimentConfig c;
  c.experiment = "plot-data";
  const Report r = run_experiment(c);
  const std::string csv = emit_plot_data(r);
  std::size_t lines = 0;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kPlotHeader);
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 10201u);
}

TEST(PlotData, TripleOrderingAndEmptyReport) {
  ExperimentConfig c;
  c.experiment = "plot-data";
  c.params = {{"series", "triple"}, {"delta", 0.05}};
  EXPECT_TRUE(run_experiment(c).pass());
  EXPECT_EQ(emit_plot_data(Report{}), std::string(kPlotHeader) + "\n");
}
