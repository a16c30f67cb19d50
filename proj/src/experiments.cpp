#include "demagkit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "demagkit/config.hpp"
#include "demagkit/field_io.hpp"
#include "demagkit/hybrid.hpp"
#include "demagkit/oracle.hpp"

namespace demagkit {

namespace {

using nlohmann::json;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class T>
T param(const json& p, const std::string& key) {
  if (!p.contains(key)) throw std::invalid_argument("missing parameter '" + key + "'");
  try {
    return p.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("bad value for parameter '" + key + "': " + p.at(key).dump());
  }
}

std::optional<double> optional_param(const json& p, const std::string& key) {
  if (!p.contains(key) || p.at(key).is_null()) return std::nullopt;
  return param<double>(p, key);
}

json merged(const std::string& name, const json& params) {
  json p = default_params(name);
  merge_params(p, params);
  return p;
}

std::vector<double> r_list(const json& p, const std::string& key = "R_list") {
  auto rs = param<std::vector<double>>(p, key);
  if (rs.empty()) throw std::invalid_argument(key + " must not be empty");
  std::sort(rs.begin(), rs.end());
  if (std::adjacent_find(rs.begin(), rs.end()) != rs.end()) {
    throw std::invalid_argument(key + " contains duplicates");
  }
  return rs;
}

// Evaluates fn(i) for i < n on up to `jobs` threads, results in index order.
template <class Fn>
auto parallel_map(std::size_t n, int jobs, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
  std::vector<T> out;
  out.reserve(n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
  }
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(jobs)) {
    std::vector<std::future<T>> batch;
    const std::size_t stop = std::min(n, start + static_cast<std::size_t>(jobs));
    for (std::size_t i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, fn, i));
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

SolverConfig base_config(const json& p, int dim, double R) {
  SolverConfig cfg;
  cfg.dim = dim;
  cfg.R = R;
  cfg.n_per_unit = param<int>(p, "n_per_unit");
  cfg.k = param<int>(p, "k");
  cfg.cg_tol = param<double>(p, "cg_tol");
  cfg.krylov_mode = parse_krylov_mode(param<std::string>(p, "krylov_mode"));
  return cfg;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::vector<double> logs(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) out.push_back(std::log(x));
  return out;
}

double relative_discrepancy(const ScalarField& a, const ScalarField& ref, const Subdomain& s) {
  const ScalarField da = remove_mean(a, s);
  const ScalarField dr = remove_mean(ref, s);
  return l2_norm(da - dr, s) / l2_norm(dr, s);
}

double error_on(const ScalarField& v, const ScalarField& exact, const Subdomain& s, bool demean) {
  const ScalarField diff = restrict_to(v, s) - restrict_to(exact, s);
  return l2_norm(demean ? remove_mean(diff, s) : diff, s);
}

// Periodic test: u = cos 2pi x1 + sin 2pi x2, F = (2pi)^2 u. Each Fourier mode
// is an eigenvector of the second difference with symbol (4/h^2) sin^2(pi h),
// so the grid-level whole-space solution is a rescaled u.
struct PeriodicFields {
  ScalarField F;
  ScalarField u;
  ScalarField u_h;
};

PeriodicFields periodic_fields(double R, int n) {
  const Grid g(2, R, n);
  auto u = [](const Point& x) { return std::cos(kTwoPi * x[0]) + std::sin(kTwoPi * x[1]); };
  const double h = g.spacing();
  const double mu = 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h), 2);
  const double lam = kTwoPi * kTwoPi;
  return {ScalarField::sample(g, [&](const Point& x) { return lam * u(x); }),
          ScalarField::sample(g, u),
          ScalarField::sample(g, [&](const Point& x) { return lam / mu * u(x); })};
}

double periodic_T(const json& p, double R) {
  const std::string rule = param<std::string>(p, "T_rule");
  if (rule == "explicit") return param<double>(p, "T_factor") * R;
  if (rule == "periodic-optimal") return (R - 1.0) / (2.0 * std::sqrt(param<double>(p, "lambda1")));
  throw std::invalid_argument("T_rule must be explicit (T = T_factor R) or periodic-optimal");
}

}  // namespace

std::vector<double> Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column '" + name + "'");
  const std::size_t c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  char buf[32];
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line: need at least two paired samples");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

const Table& Report::table(const std::string& file) const {
  for (const auto& [name, t] : tables) {
    if (name == file) return t;
  }
  throw std::out_of_range("report has no table '" + file + "'");
}

double bump(const Point& x) {
  const double r = std::hypot(x[0], x[1]);
  return r < 1.0 ? std::exp(1.0 / (r - 1.0)) : 0.0;
}

double bump_derivative_sum(const Point& x) {
  const double r = std::hypot(x[0], x[1]);
  if (r >= 1.0 || r == 0.0) return 0.0;
  const double radial = -std::exp(1.0 / (r - 1.0)) / ((r - 1.0) * (r - 1.0));
  return radial * (x[0] + x[1]) / r;
}

std::vector<std::string> experiment_names() {
  return {"periodic", "highfreq", "truncation", "qualitative", "agreement", "disk"};
}

json default_params(const std::string& experiment) {
  const json solver = {{"k", 700}, {"cg_tol", 1e-10}, {"krylov_mode", "automatic"}};
  json p;
  if (experiment == "periodic") {
    p = {{"R_list", {2, 3, 4, 5, 6, 7, 8}}, {"T_rule", "explicit"}, {"T_factor", 0.18},
         {"lambda1", kTwoPi * kTwoPi}, {"n_per_unit", 25}};
  } else if (experiment == "highfreq") {
    p = {{"R_list", {2, 3, 4, 5, 6}}, {"R_max", 8},       {"n_per_unit", 10},
         {"omega0", nullptr},         {"T_rule", "R-over-omega0"}, {"c_d", 0.25},
         {"gap_threshold", 0.1},      {"freq_extent", 4.0}, {"freq_resolution", 0.02}};
  } else if (experiment == "truncation") {
    p = {{"dim", 3}, {"R_list", {3, 4, 5, 6}}, {"n_per_unit", nullptr}, {"T_factor", 0.18},
         {"remove_mean", nullptr}};
  } else if (experiment == "qualitative") {
    p = {{"omega_half_width", 1.0}, {"R", 10.0}, {"T_factor", 0.18}, {"T", nullptr},
         {"n_per_unit", 25}};
  } else if (experiment == "agreement") {
    p = {{"omega_half_width", 1.0}, {"R", 10.0},          {"n_per_unit", 25},
         {"T_rule", "highfreq-optimal"}, {"T", nullptr},  {"c_d", 0.25},
         {"omega0", nullptr},       {"gap_threshold", 0.1}, {"freq_extent", 4.0},
         {"freq_resolution", 0.02}};
  } else if (experiment == "disk") {
    p = {{"radius", 0.5}, {"M", {1.0, 0.0}}, {"n_list", {10, 20, 40}}, {"R", 2.0},
         {"T_factor", 0.18}};
  } else {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  p.update(solver);
  return p;
}

Report run_experiment(const std::string& experiment, const json& params, int jobs) {
  if (experiment == "periodic") return run_periodic_convergence(params, jobs);
  if (experiment == "highfreq") return run_highfreq_convergence(params, jobs);
  if (experiment == "truncation") return run_truncation_decay(params, jobs);
  if (experiment == "qualitative") return run_qualitative_compare(params, jobs);
  if (experiment == "agreement") return run_oracle_agreement(params, jobs);
  if (experiment == "disk") return run_uniform_disk(params, jobs);
  throw std::invalid_argument("unknown experiment '" + experiment + "'");
}

Report run_periodic_convergence(const json& params, int jobs) {
  Report rep;
  rep.name = "periodic";
  rep.params = merged(rep.name, params);
  const json& p = rep.params;
  const std::vector<double> rs = r_list(p);
  const int n = param<int>(p, "n_per_unit");
  const Subdomain K{0.5};

  auto rows = parallel_map(rs.size(), jobs, [&](std::size_t i) {
    const double R = rs[i];
    SolverConfig cfg = base_config(p, 2, R);
    cfg.T = periodic_T(p, R);
    const PeriodicFields pf = periodic_fields(R, n);
    const ScalarField v = solve_regularized(pf.F, cfg);
    return std::vector<double>{R, cfg.T, error_on(v, pf.u_h, K, true), error_on(v, pf.u, K, true)};
  });
  Table t{{"R", "T", "error_L2_K", "error_L2_K_continuous"}, rows};
  const std::vector<double> err = t.column("error_L2_K");
  const LineFit fit = fit_line(rs, logs(err));
  rep.summary = {{"semilog_slope", fit.slope},
                 {"semilog_r2", fit.r2},
                 {"strictly_decreasing", strictly_decreasing(err)}};
  rep.tables.push_back({"periodic.csv", std::move(t)});
  return rep;
}

Report run_highfreq_convergence(const json& params, int jobs) {
  Report rep;
  rep.name = "highfreq";
  rep.params = merged(rep.name, params);
  const json& p = rep.params;
  const std::vector<double> rs = r_list(p);
  const double R_max = param<double>(p, "R_max");
  if (!(R_max > rs.back())) throw std::invalid_argument("R_max must exceed every R in R_list");
  const int n = param<int>(p, "n_per_unit");
  const Grid omega(2, 1.0, n);
  const ScalarField F = ScalarField::sample(omega, bump_derivative_sum);

  Spectrum spec = dft_magnitude(F, param<double>(p, "freq_extent"), param<double>(p, "freq_resolution"));
  const double estimated = estimate_gap(spec, param<double>(p, "gap_threshold"));
  const double omega0 = optional_param(p, "omega0").value_or(estimated);
  if (!(omega0 > 0.0)) throw std::runtime_error("no spectral gap found; pass omega0 explicitly");

  const std::string rule = param<std::string>(p, "T_rule");
  const double c_d = param<double>(p, "c_d");
  auto T_of = [&](double R) {
    if (rule == "R-over-omega0") return R / omega0;
    if (rule == "highfreq-optimal") return std::abs(R - 1.0) * std::sqrt(c_d) / omega0;
    throw std::invalid_argument("T_rule must be R-over-omega0 or highfreq-optimal");
  };
  auto solve = [&](double R) {
    SolverConfig cfg = base_config(p, 2, R);
    cfg.T = T_of(R);
    cfg.omega_half_width = 1.0;
    return solve_regularized(F, cfg);
  };

  std::vector<double> all = rs;
  all.push_back(R_max);
  const Subdomain K{0.5};
  auto solutions = parallel_map(all.size(), jobs, [&](std::size_t i) {
    return restrict_to(solve(all[i]), Subdomain{1.0});
  });
  const ScalarField& ref = solutions.back();
  Table t{{"R", "T", "error_L2_K"}, {}};
  for (std::size_t i = 0; i < rs.size(); ++i) {
    t.rows.push_back({rs[i], T_of(rs[i]), error_on(solutions[i], ref, K, true)});
  }
  const std::vector<double> err = t.column("error_L2_K");
  const LineFit fit = fit_line(rs, logs(err));
  rep.summary = {{"omega0", omega0},
                 {"omega0_estimated", estimated},
                 {"semilog_slope", fit.slope},
                 {"semilog_r2", fit.r2},
                 {"strictly_decreasing", strictly_decreasing(err)}};
  rep.tables.push_back({"highfreq.csv", std::move(t)});
  rep.spectra.push_back({"spectrum.csv", std::move(spec)});
  return rep;
}

Report run_truncation_decay(const json& params, int jobs) {
  Report rep;
  rep.name = "truncation";
  rep.params = merged(rep.name, params);
  json& p = rep.params;
  const int dim = param<int>(p, "dim");
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (p["n_per_unit"].is_null()) p["n_per_unit"] = dim == 3 ? 8 : 25;
  if (p["remove_mean"].is_null()) p["remove_mean"] = dim == 2;
  const bool demean = param<bool>(p, "remove_mean");
  const std::vector<double> rs = r_list(p);
  const int n = param<int>(p, "n_per_unit");
  const double T_factor = param<double>(p, "T_factor");
  const Subdomain K{0.5};

  Table t{{"R", "T", "truncated_error", "regularized_error"}, {}};
  if (dim == 3) {
    // Compactly supported source on K against the direct volume integral.
    const Grid kg(3, 0.5, n);
    const ScalarField F = ScalarField::sample(kg, [](const Point& x) {
      double v = 1.0;
      for (int a = 0; a < 3; ++a) v *= std::pow(std::cos(std::numbers::pi * x[a]), 2);
      return v;
    });
    std::vector<double> w(kg.node_count());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = volume_integral_potential(F, kg.position(i));
    const ScalarField oracle(kg, std::move(w));
    t.rows = parallel_map(rs.size(), jobs, [&](std::size_t i) {
      SolverConfig cfg = base_config(p, 3, rs[i]);
      cfg.T = T_factor * rs[i];
      const ScalarField wr = restrict_to(truncated_dirichlet_solve(F, rs[i], cfg.cg_tol), K);
      const ScalarField vr = restrict_to(solve_regularized(F, cfg), K);
      return std::vector<double>{rs[i], cfg.T, error_on(wr, oracle, K, demean),
                                 error_on(vr, oracle, K, demean)};
    });
  } else {
    // Periodic source against its exact whole-space grid solution.
    t.rows = parallel_map(rs.size(), jobs, [&](std::size_t i) {
      SolverConfig cfg = base_config(p, 2, rs[i]);
      cfg.T = T_factor * rs[i];
      const PeriodicFields pf = periodic_fields(rs[i], n);
      const ScalarField wr = truncated_dirichlet_solve(pf.F, rs[i], cfg.cg_tol);
      const ScalarField vr = solve_regularized(pf.F, cfg);
      return std::vector<double>{rs[i], cfg.T, error_on(wr, pf.u_h, K, demean),
                                 error_on(vr, pf.u_h, K, demean)};
    });
  }
  const std::vector<double> trunc = t.column("truncated_error");
  const std::vector<double> reg = t.column("regularized_error");
  bool regularized_better = true;
  for (std::size_t i = 0; i < rs.size(); ++i) regularized_better = regularized_better && reg[i] < trunc[i];
  rep.summary = {{"regularized_below_truncated", regularized_better}};
  if (rs.size() >= 2) {
    const LineFit fit = fit_line(logs(rs), logs(trunc));
    rep.summary["truncated_loglog_slope"] = fit.slope;
    rep.summary["truncated_loglog_r2"] = fit.r2;
  }
  rep.tables.push_back({"truncation.csv", std::move(t)});
  return rep;
}

namespace {

VectorField section_field(const Grid& g) {
  return VectorField::sample(g, [](const Point& x) {
    return Point{std::sin(kTwoPi * x[0]) / kTwoPi, -std::cos(kTwoPi * x[1]) / kTwoPi, 0.0};
  });
}

}  // namespace

Report run_qualitative_compare(const json& params, int jobs) {
  Report rep;
  rep.name = "qualitative";
  rep.params = merged(rep.name, params);
  const json& p = rep.params;
  const double w = param<double>(p, "omega_half_width");
  SolverConfig cfg = base_config(p, 2, param<double>(p, "R"));
  cfg.omega_half_width = w;
  cfg.T = optional_param(p, "T").value_or(param<double>(p, "T_factor") * cfg.R);
  const Grid g = cfg.omega_grid();
  const ScalarField F = divergence(section_field(g));

  const ScalarField v = restrict_to(solve_regularized(F, cfg), Subdomain{w});
  (void)jobs;
  std::vector<double> vals(g.node_count());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = volume_integral_potential(F, g.position(i));
  const ScalarField oracle(g, std::move(vals));
  const double disc = relative_discrepancy(v, oracle, Subdomain{w});
  rep.summary = {{"relative_L2_discrepancy", disc}, {"T", cfg.T}};
  rep.tables.push_back({"qualitative.csv", Table{{"R", "T", "n_per_unit", "relative_L2_discrepancy"},
                                                 {{cfg.R, cfg.T, static_cast<double>(cfg.n_per_unit), disc}}}});
  rep.fields.push_back({"v_TR.field", v});
  rep.fields.push_back({"volume_integral.field", oracle});
  return rep;
}

Report run_oracle_agreement(const json& params, int jobs) {
  (void)jobs;
  Report rep;
  rep.name = "agreement";
  rep.params = merged(rep.name, params);
  const json& p = rep.params;
  SolverConfig cfg = base_config(p, 2, param<double>(p, "R"));
  cfg.omega_half_width = param<double>(p, "omega_half_width");
  cfg.c_d = param<double>(p, "c_d");
  const Grid g = cfg.omega_grid();
  const VectorField M = section_field(g);
  const ScalarField F = divergence(M);

  const Spectrum spec = dft_magnitude(F, param<double>(p, "freq_extent"), param<double>(p, "freq_resolution"));
  const double estimated = estimate_gap(spec, param<double>(p, "gap_threshold"));
  cfg.T_rule = parse_t_rule(param<std::string>(p, "T_rule"));
  if (cfg.T_rule == TRule::highfreq_optimal) {
    cfg.omega0 = optional_param(p, "omega0").value_or(estimated);
    if (!(*cfg.omega0 > 0.0)) throw std::runtime_error("no spectral gap found; pass omega0 explicitly");
  } else if (cfg.T_rule == TRule::explicit_T) {
    const auto T = optional_param(p, "T");
    if (!T) throw std::invalid_argument("explicit T_rule needs T");
    cfg.T = *T;
  }

  const ScalarField u = demag_potential(M, cfg);
  const BoundaryMesh mesh = box_boundary_mesh(M, Subdomain{cfg.omega_half_width});
  const QuadratureRule rule = cfg.quadrature();
  std::vector<double> vals(g.node_count());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = integral_representation_potential(F, mesh, g.position(i), rule);
  }
  const ScalarField oracle(g, std::move(vals));
  const double disc = relative_discrepancy(u, oracle, Subdomain{cfg.omega_half_width});
  const double T = cfg.effective_T();
  rep.summary = {{"relative_L2_discrepancy", disc}, {"T", T}, {"omega0_estimated", estimated}};
  rep.tables.push_back({"agreement.csv", Table{{"R", "T", "n_per_unit", "relative_L2_discrepancy"},
                                               {{cfg.R, T, static_cast<double>(cfg.n_per_unit), disc}}}});
  rep.fields.push_back({"u_hybrid.field", u});
  rep.fields.push_back({"u_integral.field", oracle});
  return rep;
}

Report run_uniform_disk(const json& params, int jobs) {
  Report rep;
  rep.name = "disk";
  rep.params = merged(rep.name, params);
  const json& p = rep.params;
  const double radius = param<double>(p, "radius");
  const auto m = param<std::vector<double>>(p, "M");
  if (m.size() != 2) throw std::invalid_argument("M must have two components");
  auto ns = param<std::vector<int>>(p, "n_list");
  if (ns.empty()) throw std::invalid_argument("n_list must not be empty");
  const Point M0{m[0], m[1], 0.0};
  const double m_norm = std::hypot(m[0], m[1]);
  if (!(m_norm > 0.0)) throw std::invalid_argument("M must be nonzero");

  auto rows = parallel_map(ns.size(), jobs, [&](std::size_t i) {
    json q = p;
    q["n_per_unit"] = ns[i];
    SolverConfig cfg = base_config(q, 2, param<double>(p, "R"));
    cfg.T = param<double>(p, "T_factor") * cfg.R;
    const DiskSolution s = solve_disk(radius, [&](const Point&) { return M0; }, cfg);
    const VectorField H = -1.0 * gradient(s.potential);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < s.inside.size(); ++j) {
      if (!s.stencil_inside[j]) continue;
      const Point h = H.at(j);
      num += std::pow(h[0] + 0.5 * M0[0], 2) + std::pow(h[1] + 0.5 * M0[1], 2);
      den += 0.25 * m_norm * m_norm;
    }
    return std::vector<double>{static_cast<double>(ns[i]), static_cast<double>(s.mesh.size()),
                               std::sqrt(num / den)};
  });
  Table t{{"n_per_unit", "panels", "field_error_L2"}, rows};
  rep.summary = {{"field_error_L2_finest", t.rows.back()[2]}};
  rep.tables.push_back({"disk.csv", std::move(t)});
  return rep;
}

void write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };
  for (const auto& [name, t] : report.tables) {
    auto out = open(name);
    write_csv(out, t);
  }
  for (const auto& [name, f] : report.fields) {
    auto out = open(name);
    write_field(out, f);
  }
  for (const auto& [name, s] : report.spectra) {
    auto out = open(name);
    write_spectrum_csv(out, s);
  }
  open("params.json") << report.params.dump(2) << '\n';
  open("summary.json") << report.summary.dump(2) << '\n';
}

}  // namespace demagkit
