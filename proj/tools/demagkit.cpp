// Batch runner for the convergence and validation experiments.
//
//   demagkit <experiment> [--config file.json] [--out dir] [--jobs n] [key=value ...]
//
// Exit status: 0 success, 2 invalid input, 1 solver failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "demagkit/config.hpp"
#include "demagkit/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string out = "demagkit-out";
  int jobs = 1;
  std::vector<std::string> overrides;
};

const char* describe(const std::string& name) {
  if (name == "periodic") return "exponential R-convergence on the periodic test";
  if (name == "highfreq") return "R-convergence for a source with a spectral gap";
  if (name == "truncation") return "plain truncation against the regularized solve";
  if (name == "qualitative") return "regularized potential against the volume integral";
  if (name == "agreement") return "full hybrid potential against the integral representation";
  if (name == "disk") return "uniformly magnetized disk against the analytic field";
  return "";
}

int run(const std::string& name, const Options& opt) {
  nlohmann::json params = nlohmann::json::object();
  if (!opt.config.empty()) {
    std::ifstream in(opt.config);
    if (!in) throw std::invalid_argument("cannot open config file " + opt.config);
    params = nlohmann::json::parse(in);
    if (!params.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  }
  params.update(demagkit::parse_overrides(opt.overrides));
  if (opt.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
  const demagkit::Report report = demagkit::run_experiment(name, params, opt.jobs);
  demagkit::write_report(report, opt.out);
  std::cout << report.summary.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"demagnetization potential by heat-regularized truncation and a boundary single layer"};
  app.require_subcommand(1);
  Options opt;
  for (const std::string& name : demagkit::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", opt.config, "JSON file with experiment parameters");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--jobs", opt.jobs, "concurrent R values")->capture_default_str();
    sub->add_option("overrides", opt.overrides, "parameter overrides key=value");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return run(name, opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "demagkit: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "demagkit: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "demagkit: " << e.what() << '\n';
    return 1;
  }
}
