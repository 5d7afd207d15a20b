#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "spinsq/cavity.hpp"
#include "spinsq/cli/runner.hpp"
#include "spinsq/closure.hpp"
#include "spinsq/dicke.hpp"
#include "spinsq/error.hpp"
#include "spinsq/ramsey.hpp"
#include "spinsq/twist.hpp"
#include "spinsq/wigner.hpp"

namespace spinsq::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
  return grid;
}

std::vector<double> logspace(double lo, double hi, int points) {
  std::vector<double> grid = linspace(std::log(lo), std::log(hi), points);
  for (double& x : grid) x = std::exp(x);
  return grid;
}

json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int positive_int(const Config& c, const std::string& key, std::optional<int> fallback) {
  const int v = c.integer(key, fallback);
  if (v < 1) c.fail(key, "must be >= 1");
  return v;
}

int even_atoms(const Config& c) {
  const int n = positive_int(c, "N", std::nullopt);
  if (n % 2 != 0 || n < 2) c.fail("N", "must be even and >= 2");
  return n;
}

double nonneg(const Config& c, const std::string& key, std::optional<double> fallback) {
  const double v = c.number(key, fallback);
  if (!std::isfinite(v) || v < 0.0) c.fail(key, "must be finite and >= 0");
  return v;
}

double positive(const Config& c, const std::string& key, std::optional<double> fallback) {
  const double v = c.number(key, fallback);
  if (!std::isfinite(v) || v <= 0.0) c.fail(key, "must be finite and > 0");
  return v;
}

dicke::DickeState state_from(const Config& c, int atoms) {
  const std::string kind = c.text("state", "bloch");
  if (kind == "bloch") return dicke::bloch_ground_state(atoms);
  if (kind == "psi_a") {
    if (atoms % 2 != 0) c.fail("N", "psi_a needs an even atom count");
    return dicke::psi_a_state(atoms, c.number("a", -1.0));
  }
  c.fail("state", "expected bloch or psi_a, got '" + kind + "'");
}

std::vector<Column> moment_columns() {
  return {{"t", "1/gamma"},   {"tau", "1"},      {"l0", "atoms"},   {"lz", "hbar"},
          {"dxx", "hbar^2"},  {"dyy", "hbar^2"}, {"lx", "hbar"},    {"ly", "hbar"},
          {"casimir", "hbar^2"}, {"delta_xx", "1"}};
}

void add_moment_rows(Table& table, const twist::MomentTrajectory& traj, double atoms,
                     double chi) {
  for (const auto& r : traj.rows) {
    table.add_row({r.t, r.t * atoms * chi, r.l0, r.lz, r.dxx, r.dyy, r.lx, r.ly, r.casimir,
                   r.dxx / atoms});
  }
}

json minimum_json(const twist::MomentTrajectory& traj, double atoms, double chi) {
  try {
    const auto m = twist::find_min_variance(traj);
    return {{"t_star", m.t_star}, {"tau_star", m.t_star * atoms * chi},
            {"delta_xx_min", m.delta_xx_min}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoInteriorMinimum) throw;
    return {{"note", e.what()}};
  }
}

cavity::CavityParams cavity_params(const Config& c) {
  cavity::CavityParams p;
  p.gamma = positive(c, "gamma", 1.0);
  p.atoms = positive(c, "N", std::nullopt);
  if (c.has("g")) {
    p.g1 = p.g2 = nonneg(c, "g", std::nullopt);
  } else {
    p.g1 = nonneg(c, "g1", std::nullopt);
    p.g2 = positive(c, "g2", std::nullopt);
  }
  p.kappa_cav = positive(c, "kappa", std::nullopt);
  p.omega1 = nonneg(c, "omega1", std::nullopt);
  p.omega2 = positive(c, "omega2", std::nullopt);
  p.delta1 = c.number("delta1", 0.0);
  p.delta2 = c.number("delta2", 0.0);
  p.gamma0 = nonneg(c, "gamma0", 0.0);
  p.gamma_br1 = nonneg(c, "gamma_br1", p.gamma);
  p.gamma_br2 = nonneg(c, "gamma_br2", p.gamma);
  const std::string delta = c.text("delta", "opt");
  if (delta == "opt") {
    p.delta = cavity::optimal_detuning(p);
  } else {
    p.delta = c.number("delta");
  }
  if (!(p.delta >= 10.0 * p.gamma)) c.fail("delta", "must be >= 10 gamma");
  if (std::abs(p.gamma_br1 + p.gamma_br2 - 2.0 * p.gamma) > 1e-9 * std::max(1.0, p.gamma)) {
    c.fail("gamma_br1", "gamma_br1 + gamma_br2 must equal 2 gamma");
  }
  return p;
}

json rates_json(const cavity::DerivedRates& r) {
  return {{"xi", r.xi}, {"eta", r.eta}, {"gamma_L", r.gamma_L}, {"delta_L", r.delta_L},
          {"chi_raman", r.chi_raman}};
}

}  // namespace

Table CommandContext::table(std::vector<Column> columns) const {
  Table t;
  t.subcommand = config.section();
  t.config_hash = config.sha256();
  t.columns = std::move(columns);
  return t;
}

void CommandContext::emit(const std::string& stem, const Table& table) {
  outputs.push_back(write_table(out, stem, table, json));
}

void CommandContext::emit_json(const std::string& stem, const nlohmann::json& value) {
  outputs.push_back(write_json(out, stem, value));
}

void ramsey_sweep(CommandContext& ctx) {
  const Config& c = ctx.config;
  const int atoms = positive_int(c, "N", std::nullopt);
  const dicke::DickeState state = state_from(c, atoms);
  const int points = positive_int(c, "points", 401);
  const double lo = c.number("phi_min", 0.0);
  const double hi = c.number("phi_max", 2.0 * std::numbers::pi);
  c.reject_unknown();

  const std::vector<double> grid = linspace(lo, hi, points);
  const auto rows = ramsey::ramsey_sweep(state, grid);
  Table table = ctx.table({{"phi", "rad"}, {"excited_fraction", "1"}, {"signal", "hbar"},
                           {"deviation", "hbar"}, {"delta_phi", "rad"}, {"flagged", "bool"}});
  table.notes.push_back("delta_phi is nan where the sensitivity vanishes (flagged = 1)");
  double best = std::numeric_limits<double>::infinity();
  int flagged = 0;
  for (const auto& r : rows) {
    table.add_row({r.phi, r.excited_fraction, r.signal, r.deviation, r.delta_phi,
                   r.flagged ? 1.0 : 0.0});
    if (r.flagged) {
      ++flagged;
    } else {
      best = std::min(best, r.delta_phi);
    }
  }
  ctx.emit("ramsey_sweep", table);
  ctx.summary = {{"rows", rows.size()}, {"flagged", flagged}, {"min_delta_phi", nan_to_null(best)}};
}

void twist_evolve(CommandContext& ctx) {
  const Config& c = ctx.config;
  const int atoms = even_atoms(c);
  const double chi = positive(c, "chi", 1.0);
  const double tau_max = positive(c, "tau_max", 3.0);
  const int points = positive_int(c, "points", 301);
  c.reject_unknown();

  std::vector<double> times = linspace(0.0, tau_max / (atoms * chi), points);
  const auto traj = twist::evolve_unitary(atoms, chi, times);
  Table table = ctx.table(moment_columns());
  add_moment_rows(table, traj, atoms, chi);
  ctx.emit("twist_evolve", table);
  ctx.summary = {{"minimum", minimum_json(traj, atoms, chi)}};
}

void master_evolve(CommandContext& ctx) {
  const Config& c = ctx.config;
  twist::TwistParams p;
  p.atoms = positive_int(c, "N", std::nullopt);
  p.chi = positive(c, "chi", 1.0);
  if (c.has("kappa")) {
    p.gamma1 = p.gamma2 = nonneg(c, "kappa", std::nullopt) * p.atoms * p.chi;
  } else {
    p.gamma1 = nonneg(c, "gamma1", 0.0);
    p.gamma2 = nonneg(c, "gamma2", 0.0);
  }
  if (p.atoms > twist::kMaxMasterAtoms) {
    c.fail("N", "master equation supports N <= " + std::to_string(twist::kMaxMasterAtoms));
  }
  const double tau_max = positive(c, "tau_max", 3.0);
  const int points = positive_int(c, "points", 301);
  c.reject_unknown();

  std::vector<double> times = linspace(0.0, tau_max / (p.atoms * p.chi), points);
  const auto run = twist::evolve_master(p, times);
  Table table = ctx.table(moment_columns());
  add_moment_rows(table, run.trajectory, p.atoms, p.chi);
  ctx.emit("master_evolve", table);
  const auto& d = run.diagnostics;
  ctx.summary = {{"minimum", minimum_json(run.trajectory, p.atoms, p.chi)},
                 {"diagnostics",
                  {{"max_trace_drift", d.max_trace_drift},
                   {"max_hermiticity_error", d.max_hermiticity_error},
                   {"min_population", d.min_population},
                   {"min_eigenvalue", d.min_eigenvalue},
                   {"accepted_steps", d.stats.accepted},
                   {"rejected_steps", d.stats.rejected}}}};
  ctx.emit_json("master_evolve_summary", ctx.summary);
}

void moment_evolve(CommandContext& ctx) {
  const Config& c = ctx.config;
  closure::ClosureConfig cfg;
  if (c.has("N")) {
    cfg.epsilon = 1.0 / positive_int(c, "N", std::nullopt);
  } else {
    cfg.epsilon = c.number("epsilon");
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) c.fail("epsilon", "must lie in [0, 1]");
  }
  cfg.kappa = nonneg(c, "kappa", 0.0);
  const std::string rep = c.text("representation", "h");
  if (rep == "h") {
    cfg.representation = closure::Representation::H;
  } else if (rep == "L") {
    cfg.representation = closure::Representation::L;
    if (cfg.epsilon == 0.0) c.fail("representation", "L form needs epsilon > 0");
  } else {
    c.fail("representation", "expected h or L, got '" + rep + "'");
  }
  const double tau_max = positive(c, "tau_max", 4.0);
  const int points = positive_int(c, "points", 401);
  const bool scalings = c.has("s");
  const double target = scalings ? positive(c, "s", std::nullopt) : 0.0;
  c.reject_unknown();

  const std::vector<double> taus = linspace(0.0, tau_max, points);
  const auto traj = closure::integrate_closure(cfg, taus);
  Table table = ctx.table({{"tau", "1"}, {"h0", "1"}, {"hz", "atoms"}, {"dxx", "1"},
                           {"dyy", "1"}, {"analytic_dxx", "1"}});
  for (const auto& r : traj.rows) {
    table.add_row({r.tau, r.state.h0, r.state.hz, r.state.dxx, r.state.dyy,
                   closure::analytic_variance(cfg, r.tau).value});
  }
  ctx.emit("moment_evolve", table);

  json report = {{"epsilon", cfg.epsilon}, {"kappa", cfg.kappa}};
  try {
    const auto m = closure::find_closure_minimum(cfg, tau_max);
    report["minimum"] = {{"tau_star", m.tau_star}, {"dxx_min", m.dxx_min},
                         {"tau_estimate", nan_to_null(m.tau_estimate)}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoInteriorMinimum) throw;
    report["minimum"] = {{"note", e.what()}};
  }
  if (scalings) {
    if (cfg.epsilon == 0.0) c.fail("s", "scalings need a finite N (epsilon > 0)");
    const double atoms = 1.0 / cfg.epsilon;
    if (target > atoms) c.fail("s", "must not exceed N");
    const auto s = closure::squeezing_scalings(target, atoms, 1.0, cfg.kappa * atoms);
    report["feasibility"] = {{"s", target},
                             {"feasible", s.feasible},
                             {"time", s.time},
                             {"atom_loss", s.atom_loss},
                             {"target_dxx", s.target_dxx},
                             {"order_of_magnitude", s.order_of_magnitude}};
  }
  ctx.summary = report;
  ctx.emit_json("moment_evolve_summary", report);
}

void compare_oracle(CommandContext& ctx) {
  const Config& c = ctx.config;
  const int atoms = even_atoms(c);
  const double kappa = nonneg(c, "kappa", 0.0);
  const double tau_max = positive(c, "tau_max", 4.0);
  const int points = positive_int(c, "points", 401);
  const double tolerance = positive(c, "tolerance", 0.10);
  if (kappa > 0.0 && atoms > twist::kMaxMasterAtoms) {
    c.fail("N", "lossy oracle supports N <= " + std::to_string(twist::kMaxMasterAtoms));
  }
  c.reject_unknown();

  const double chi = 1.0;
  const std::vector<double> taus = linspace(0.0, tau_max, points);
  std::vector<double> times(taus);
  for (double& t : times) t /= atoms * chi;

  closure::ClosureConfig cfg{1.0 / atoms, kappa, closure::Representation::H};
  const auto approx = closure::integrate_closure(cfg, taus);

  twist::MomentTrajectory exact;
  json diagnostics = json::object();
  if (kappa == 0.0) {
    exact = twist::evolve_unitary(atoms, chi, times);
  } else {
    const twist::TwistParams p{atoms, chi, kappa * atoms * chi, kappa * atoms * chi};
    const auto run = twist::evolve_master(p, times);
    exact = run.trajectory;
    diagnostics = {{"max_trace_drift", run.diagnostics.max_trace_drift},
                   {"min_eigenvalue", run.diagnostics.min_eigenvalue}};
  }

  const std::vector<double> closure_dxx = approx.dxx();
  // Errors count up to the exact minimum, or over the whole grid without one.
  std::size_t star = taus.size() - 1;
  json exact_minimum;
  try {
    const auto m = twist::find_min_variance(exact);
    star = m.index;
    exact_minimum = {{"tau_star", m.t_star * atoms * chi}, {"delta_xx_min", m.delta_xx_min}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoInteriorMinimum) throw;
    exact_minimum = {{"note", e.what()}};
  }
  Table table = ctx.table({{"tau", "1"}, {"closure_dxx", "1"}, {"exact_dxx", "1"},
                           {"relative_error", "1"}});
  double worst = 0.0;
  double worst_tau = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double e = exact.rows[i].dxx / atoms;
    const double rel = std::abs(closure_dxx[i] - e) / e;
    table.add_row({taus[i], closure_dxx[i], e, rel});
    if (i <= star && rel > worst) {
      worst = rel;
      worst_tau = taus[i];
    }
  }
  ctx.emit("compare_oracle", table);

  json report = {{"N", atoms},
                 {"kappa", kappa},
                 {"exact_minimum", exact_minimum},
                 {"compared_up_to_tau", taus[star]},
                 {"max_relative_error", worst},
                 {"max_relative_error_tau", worst_tau},
                 {"tolerance", tolerance},
                 {"within_tolerance", worst < tolerance}};
  try {
    const auto m = closure::find_closure_minimum(cfg, tau_max);
    report["closure_minimum"] = {{"tau_star", m.tau_star}, {"dxx_min", m.dxx_min}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoInteriorMinimum) throw;
    report["closure_minimum"] = {{"note", e.what()}};
  }
  if (!diagnostics.empty()) report["oracle_diagnostics"] = diagnostics;
  ctx.summary = report;
  ctx.emit_json("compare_oracle", report);
}

void cavity_squeeze(CommandContext& ctx) {
  const Config& c = ctx.config;
  const cavity::CavityParams p = cavity_params(c);
  const int points = positive_int(c, "points", 2001);
  const double t_max = c.has("t_max") ? positive(c, "t_max", std::nullopt)
                                      : cavity::default_horizon(p);
  c.reject_unknown();

  const auto warnings = p.validate();
  const auto rates = cavity::derive_rates(p);
  const std::vector<double> times = linspace(0.0, t_max, points);
  const auto run = cavity::squeeze_trajectory(p, times);
  Table table = ctx.table({{"t", "1/gamma"}, {"varYplus", "1"}, {"varXminus", "1"},
                           {"varYminus", "1"}, {"varXplus", "1"},
                           {"total_excitations", "1"}, {"analytic_varYplus", "1"}});
  for (const auto& r : run.rows) {
    const double analytic =
        rates.xi > 0.0 ? cavity::analytic_quadrature(rates, p, r.t).value : kNaN;
    table.add_row({r.t, r.stats.var_yplus, r.stats.var_xminus, r.stats.var_yminus,
                   r.stats.var_xplus, r.stats.total_excitations, analytic});
  }
  ctx.emit("cavity_squeeze", table);

  const auto minimum = cavity::squeezing_minimum(p);
  const auto regime = cavity::regime_classifier(p);
  json report = {{"delta", p.delta},
                 {"rates", rates_json(rates)},
                 {"varYplus_min", minimum.var_yplus},
                 {"t_star_numeric", minimum.t_star},
                 {"t_star_closed_form", nan_to_null(cavity::closed_form_t_star(rates, p))},
                 {"varYplus_closed_form",
                  rates.xi > 0.0 ? json((5.0 * rates.gamma_L + 3.0 * p.kappa_cav / rates.eta) /
                                        (4.0 * rates.xi))
                                 : json(nullptr)},
                 {"cooperativity", regime.cooperativity},
                 {"regime", cavity::to_string(regime.regime)},
                 {"min_symplectic_eigenvalue",
                  std::min(run.min_symplectic_eigenvalue, minimum.min_symplectic_eigenvalue)},
                 {"warnings", warnings}};
  if (std::abs(p.g1 - p.g2) <= 1e-12 * std::max(p.g1, p.g2)) {
    report["delta_opt"] = cavity::optimal_detuning(p);
    report["varYplus_opt_formula"] = std::sqrt(15.0 / 4.0) / std::sqrt(regime.cooperativity);
  }
  ctx.summary = report;
  ctx.emit_json("cavity_squeeze", report);
}

void cavity_scan(CommandContext& ctx) {
  const Config& c = ctx.config;
  const cavity::CavityParams base = cavity_params(c);
  const std::string mode = c.text("mode", "delta");
  const int points = positive_int(c, "points", 41);
  std::vector<double> grid;
  std::string axis;
  if (mode == "delta") {
    const double lo = positive(c, "delta_min", std::max(10.0 * base.gamma, base.delta / 4.0));
    const double hi = positive(c, "delta_max", 4.0 * base.delta);
    if (lo < 10.0 * base.gamma) c.fail("delta_min", "must be >= 10 gamma");
    if (hi < lo) c.fail("delta_max", "must be >= delta_min");
    const std::string spacing = c.text("spacing", "log");
    if (spacing == "log") {
      grid = logspace(lo, hi, points);
    } else if (spacing == "linear") {
      grid = linspace(lo, hi, points);
    } else {
      c.fail("spacing", "expected log or linear, got '" + spacing + "'");
    }
    axis = "delta";
  } else if (mode == "two_photon") {
    const double xi = cavity::derive_rates(base).xi;
    const double lo = c.number("dbar_min", -2.0 * xi);
    const double hi = c.number("dbar_max", 2.0 * xi);
    if (hi < lo) c.fail("dbar_max", "must be >= dbar_min");
    grid = linspace(lo, hi, points);
    axis = "delta_bar";
  } else {
    c.fail("mode", "expected delta or two_photon, got '" + mode + "'");
  }
  c.reject_unknown();

  std::vector<cavity::SqueezingMinimum> results(grid.size());
  parallel_for(grid.size(), ctx.jobs, [&](std::size_t i) {
    cavity::CavityParams p = base;
    if (mode == "delta") {
      p.delta = grid[i];
    } else {
      // delta1 - delta2 = delta_bar, symmetric about the base detunings.
      p.delta1 = base.delta1 + 0.5 * grid[i];
      p.delta2 = base.delta2 - 0.5 * grid[i];
    }
    results[i] = cavity::squeezing_minimum(p);
  });

  Table table = ctx.table({{axis, "gamma"}, {"varYplus_min", "1"}, {"t_star", "1/gamma"}});
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    table.add_row({grid[i], results[i].var_yplus, results[i].t_star});
    if (results[i].var_yplus < results[best].var_yplus) best = i;
  }
  ctx.emit("cavity_scan", table);
  ctx.summary = {{"mode", mode}, {"best_" + axis, grid[best]},
                 {"best_varYplus_min", results[best].var_yplus}};
}

void wigner_map(CommandContext& ctx) {
  const Config& c = ctx.config;
  const int atoms = positive_int(c, "N", std::nullopt);
  const std::string kind = c.text("state", "bloch");
  Eigen::MatrixXcd rho;
  if (kind == "mixed") {
    rho = Eigen::MatrixXcd::Identity(atoms + 1, atoms + 1) / static_cast<double>(atoms + 1);
  } else {
    const dicke::DickeState s = state_from(c, atoms);
    rho = s.amplitudes() * s.amplitudes().adjoint();
  }
  const int n_theta = positive_int(c, "n_theta", 64);
  const int n_phi = positive_int(c, "n_phi", 128);
  const bool dump = c.flag("coefficients", false);
  c.reject_unknown();

  const auto decomposition = wigner::multipole_coeffs(rho);
  const std::vector<double> thetas = linspace(0.0, std::numbers::pi, n_theta);
  std::vector<double> phis(static_cast<std::size_t>(n_phi));
  for (int j = 0; j < n_phi; ++j) phis[j] = 2.0 * std::numbers::pi * j / n_phi;
  const auto grid = wigner::wigner_map(decomposition, thetas, phis, ctx.jobs);

  Table table = ctx.table({{"theta", "rad"}, {"phi", "rad"}, {"W", "1"}});
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    for (std::size_t j = 0; j < phis.size(); ++j) {
      table.add_row({thetas[i], phis[j],
                     grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
    }
  }
  ctx.emit("wigner_map", table);

  if (dump) {
    Table coeffs = ctx.table({{"k", "1"}, {"q", "1"}, {"re", "1"}, {"im", "1"}});
    for (int k = 0; k <= decomposition.max_rank(); ++k) {
      for (int q = -k; q <= k; ++q) {
        const auto v = decomposition.at(k, q);
        coeffs.add_row({double(k), double(q), v.real(), v.imag()});
      }
    }
    ctx.emit("wigner_coefficients", coeffs);
  }

  const int quad = std::max(64, atoms + 2);
  ctx.summary = {{"sphere_integral", wigner::sphere_integral(decomposition, quad, 2 * quad)},
                 {"expected_integral", std::sqrt(4.0 * std::numbers::pi / (atoms + 1))},
                 {"max_imaginary", grid.max_imaginary}};
}

void regime_report(CommandContext& ctx) {
  const Config& c = ctx.config;
  cavity::CavityParams p;
  p.gamma = positive(c, "gamma", 1.0);
  p.atoms = positive(c, "N", std::nullopt);
  p.g1 = nonneg(c, "g", std::nullopt);
  p.kappa_cav = positive(c, "kappa", std::nullopt);
  c.reject_unknown();

  const auto r = cavity::regime_classifier(p);
  json report = {{"regime", cavity::to_string(r.regime)},
                 {"cooperativity", r.cooperativity},
                 {"single_atom_cooperativity", r.single_atom},
                 {"predicted_varYplus", r.predicted_var_yplus},
                 {"order_of_magnitude", true},
                 {"inequalities", r.inequalities}};
  ctx.summary = report;
  ctx.emit_json("regime_report", report);
}

}  // namespace spinsq::cli
