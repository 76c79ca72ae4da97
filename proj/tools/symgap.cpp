// Command-line runner: one subcommand per experiment.
#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include "symgap/error.hpp"
#include "symgap/experiments.hpp"

namespace {

std::string flag_name(std::string s) {
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

symgap::Json parse_value(const symgap::ParamSpec& spec, const std::string& text) {
  std::size_t used = 0;
  try {
    switch (spec.type) {
      case symgap::ParamType::integer: {
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
        break;
      }
      case symgap::ParamType::real: {
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
        break;
      }
      default:
        return text;
    }
  } catch (const std::exception&) {
  }
  throw symgap::UsageError("--" + flag_name(spec.name) + ": cannot parse '" + text + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry-gap lower-bound experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  std::size_t workers = 1;
  long long trials = -1;
  std::string out;
  std::string format = "json";
  std::string config_path;
  app.add_option("--seed", seed, "random seed");
  app.add_option("--workers", workers, "worker threads (recorded in the report)");
  app.add_option("--trials", trials, "trial count for experiments with a 'trials' parameter");
  app.add_option("--out", out, "write the report here instead of stdout");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--config", config_path, "JSON file with seed, workers, trials, params; flags win");

  struct Bound {
    CLI::App* cmd;
    const symgap::ExperimentInfo* info;
    std::map<std::string, std::string> text;
    std::map<std::string, CLI::Option*> opts;
    std::map<std::string, bool> flags;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (const auto& info : symgap::experiments()) {
    auto b = std::make_unique<Bound>();
    b->info = &info;
    b->cmd = app.add_subcommand(info.name, info.summary);
    for (const auto& spec : info.params) {
      if (spec.name == "trials") continue;  // global --trials
      const std::string help = spec.help + " (default " + spec.fallback.dump() + ")";
      if (spec.type == symgap::ParamType::flag) {
        b->flags[spec.name] = false;
        b->opts[spec.name] = b->cmd->add_flag("--" + flag_name(spec.name), b->flags[spec.name], help);
      } else {
        b->opts[spec.name] = b->cmd->add_option("--" + flag_name(spec.name), b->text[spec.name], help);
      }
    }
    bound.push_back(std::move(b));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const Bound* chosen = nullptr;
    for (const auto& b : bound) {
      if (b->cmd->parsed()) chosen = b.get();
    }
    symgap::ExperimentConfig cfg;
    cfg.experiment = chosen->info->name;
    symgap::Json params = symgap::Json::object();

    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw symgap::UsageError("cannot read config file " + config_path);
      symgap::Json file;
      try {
        file = symgap::Json::parse(in);
      } catch (const symgap::Json::exception& e) {
        throw symgap::UsageError("config file: " + std::string(e.what()));
      }
      if (!file.is_object()) throw symgap::UsageError("config file must hold a JSON object");
      for (const auto& [key, value] : file.items()) {
        if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "workers") cfg.workers = value.get<std::size_t>();
        else if (key == "trials") params["trials"] = value;
        else if (key == "format") format = value.get<std::string>();
        else if (key == "out") out = value.get<std::string>();
        else if (key == "params") params.update(value);
        else throw symgap::UsageError("config file: unknown key '" + key + "'");
      }
    }
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--workers")) cfg.workers = workers;
    if (app.count("--trials")) {
      if (trials < 0) throw symgap::UsageError("--trials must be non-negative");
      params["trials"] = trials;
    }
    for (const auto& spec : chosen->info->params) {
      auto it = chosen->opts.find(spec.name);
      if (it == chosen->opts.end() || it->second->count() == 0) continue;
      if (spec.type == symgap::ParamType::flag) params[spec.name] = chosen->flags.at(spec.name);
      else params[spec.name] = parse_value(spec, chosen->text.at(spec.name));
    }
    cfg.params = params;

    const symgap::Report report = symgap::run_experiment(cfg);
    const std::string body = format == "csv" ? symgap::emit_plot_data(report) : report.dump();
    if (out.empty()) {
      std::cout << body;
    } else {
      std::ofstream f(out, std::ios::binary);
      if (!f) throw symgap::UsageError("cannot write " + out);
      f << body;
    }
    for (const auto& a : report.assertions) {
      std::cerr << (a.pass ? "PASS " : "FAIL ") << a.name;
      if (!a.detail.empty()) std::cerr << "  (" << a.detail << ")";
      std::cerr << '\n';
    }
    return report.pass() ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
