#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "demagkit/grid.hpp"
#include "demagkit/spectral.hpp"

namespace demagkit {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

/// Header row, then 17-significant-digit values.
void write_csv(std::ostream& out, const Table& t);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line y = slope * x + intercept with coefficient of determination.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct Report {
  std::string name;
  nlohmann::json params;
  nlohmann::json summary;
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::pair<std::string, ScalarField>> fields;
  std::vector<std::pair<std::string, Spectrum>> spectra;

  const Table& table(const std::string& file) const;
};

/// Names accepted by default_params and run_experiment.
std::vector<std::string> experiment_names();

/// Default parameters; every accepted key is present.
nlohmann::json default_params(const std::string& experiment);

/// Runs an experiment with `params` merged over its defaults. Independent R
/// values run on up to `jobs` threads; results are ordered by R regardless.
Report run_experiment(const std::string& experiment, const nlohmann::json& params, int jobs = 1);

Report run_periodic_convergence(const nlohmann::json& params, int jobs = 1);
Report run_highfreq_convergence(const nlohmann::json& params, int jobs = 1);
Report run_truncation_decay(const nlohmann::json& params, int jobs = 1);
Report run_qualitative_compare(const nlohmann::json& params, int jobs = 1);
Report run_oracle_agreement(const nlohmann::json& params, int jobs = 1);
Report run_uniform_disk(const nlohmann::json& params, int jobs = 1);

/// Writes tables (CSV), fields, spectra, params.json and summary.json into dir.
void write_report(const Report& report, const std::filesystem::path& dir);

/// The bump exp(1/(|x| - 1)) on the unit ball, and F = d1 eta + d2 eta.
double bump(const Point& x);
double bump_derivative_sum(const Point& x);

}  // namespace demagkit
