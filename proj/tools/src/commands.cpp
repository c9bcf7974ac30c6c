#include "chs/cli/commands.hpp"

#include <cmath>
#include <sstream>

#include "chs/cli/report.hpp"
#include "chs/energy.hpp"
#include "chs/radial.hpp"
#include "chs/singular_quadrature.hpp"

namespace chs::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path out_file(const RunConfig& cfg, const char* name) { return fs::path(cfg.output.dir) / name; }

std::shared_ptr<const KernelMatrix> make_kernel(const RunConfig& cfg) {
  const auto& p = cfg.problem;
  auto grid = RadialGrid::make(p.radius, cfg.grid.points, cfg.grid.grading, p.N);
  if (cfg.grid.cache_dir && !cfg.grid.cache_dir->empty()) {
    return cached_riesz_matrix(*cfg.grid.cache_dir, grid, p.alpha);
  }
  return assemble_riesz_matrix(grid, p.alpha);
}

json base_report(const RunConfig& cfg) {
  json j;
  j["config"] = to_json(cfg);
  return j;
}

std::string ps_trace_csv(const std::vector<IterationRecord>& trace, const PsReport& ps) {
  std::ostringstream os;
  os << "iteration,level,gradient_norm,step,max_index";
  for (int j = 1; j <= kConcentrationBalls; ++j) os << ",concentration_" << j;
  os << '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    os << r.iteration << ',' << format_double(r.level) << ',' << format_double(r.gradient_norm) << ','
       << format_double(r.step) << ',' << r.max_index;
    for (int j = 1; j <= kConcentrationBalls; ++j) os << ',' << format_double(ps.rows[i].concentration[j]);
    os << '\n';
  }
  return os.str();
}

}  // namespace

int cmd_constants(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& p = cfg.problem;
  json j = base_report(cfg);
  try {
    const SharpConstants consts = compute_sharp_constants(p.N, p.alpha, p.s);
    j["exponents"] = to_json(derive_exponents(p));
    j["constants"] = to_json(consts);
    j["thresholds"] = to_json(ps_thresholds(p, consts));
    j["regime"] = to_json(classify_regime(p));
  } catch (const QuadratureError& e) {
    err << "constants: " << e.what() << '\n';
    return kExitNumerical;
  }
  if (cfg.output.wants("json")) write_atomic(out_file(cfg, "constants.json"), dump(j));
  out << dump(j);
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& p = cfg.problem;
  const RegimeCase regime = classify_regime(p);
  if (regime.case_id == CaseId::Uncovered) {
    err << "solve: parameters fall outside every covered regime (case_id uncovered)";
    if (p.s == 2.0 && p.mu >= derive_exponents(p).hardy_best) err << "; s = 2 needs mu below (N-2)^2/4";
    err << '\n';
    return kExitRegime;
  }

  const SharpConstants consts = compute_sharp_constants(p.N, p.alpha, p.s);
  const ThresholdReport thr = ps_thresholds(p, consts);
  const auto kernel = make_kernel(cfg);

  json j = base_report(cfg);
  j["regime"] = to_json(regime);
  j["thresholds"] = to_json(thr);
  MountainPassResult res;
  try {
    res = mountain_pass_solve(p, cfg.solver, kernel, std::nullopt, thr);
  } catch (const GeometryError& e) {
    j["error"] = e.what();
    if (cfg.output.wants("json")) write_atomic(out_file(cfg, "result.json"), dump(j));
    err << "solve: " << e.what() << '\n';
    return kExitNumerical;
  }

  j["result"] = to_json(res);
  if (!res.trace.empty()) {
    const PsReport ps = ps_diagnostics(res.trace, kernel->grid());
    j["concentration_suspected"] = ps.concentration_suspected;
    if (cfg.output.wants("csv")) write_atomic(out_file(cfg, "trace.csv"), ps_trace_csv(res.trace, ps));
  }
  if (cfg.output.wants("csv") && res.solution) write_atomic(out_file(cfg, "solution.csv"), solution_csv(*res.solution));
  if (cfg.output.wants("json")) write_atomic(out_file(cfg, "result.json"), dump(j));

  out << "status " << to_string(res.status) << "  level " << format_double(res.level) << "  gradient_norm "
      << format_double(res.gradient_norm) << "  iterations " << res.iterations << '\n';
  if (res.status != SolveStatus::Converged) {
    err << "solve: " << to_string(res.status) << (res.message.empty() ? "" : ": " + res.message) << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_rates(const RunConfig& cfg, bool synthetic, std::ostream& out, std::ostream& err) {
  json j = base_report(cfg);
  std::vector<RateFit> fits;
  if (synthetic) {
    std::vector<double> eps;
    std::vector<double> y;
    for (int k = 1; k <= 8; ++k) {
      eps.push_back(std::ldexp(1.0, -k));
      y.push_back(3.0 * std::pow(eps.back(), 1.7));
    }
    RatePrediction pred;
    pred.exponent = 1.7;
    fits.push_back(fit_rate(eps, y, SweepColumn::HardyTerm, pred));
    j["synthetic"] = {{"model", "3 eps^1.7"}, {"epsilon", eps}};
  } else {
    const auto& p = cfg.problem;
    const SweepTable table = epsilon_sweep(p, cfg.sweep);
    if (cfg.output.wants("csv")) write_atomic(out_file(cfg, "sweep.csv"), sweep_csv(table));
    json rows = json::array();
    for (const auto& r : table.rows) rows.push_back(to_json(r));
    j["rows"] = rows;
    for (const auto& cp : predicted_rates(p, cfg.sweep)) fits.push_back(fit_rate(table, cp.column, cp.prediction));
    if (cfg.sweep.family == BubbleFamily::AubinTalenti &&
        bubble_hardy_rate_case(p.N, p.s, p.q) == RateCase::BelowSplit) {
      j["notes"] = {"hardy_term uses the branch q < (N-s)/(N-2) with exponent (N-2)q/2"};
    }
  }

  json arr = json::array();
  bool inconclusive = false;
  for (const auto& f : fits) {
    arr.push_back(to_json(f));
    out << to_string(f.column) << ": fitted " << format_double(f.slope) << " expected "
        << format_double(f.expected.exponent) << " verdict " << to_string(f.verdict)
        << (f.log_factor_detected ? " (log factor)" : "") << '\n';
    if (f.verdict == FitVerdict::Inconclusive) inconclusive = true;
  }
  j["rates"] = arr;
  if (cfg.output.wants("json")) write_atomic(out_file(cfg, "rates.json"), dump(j));
  if (inconclusive) {
    err << "rates: at least one fit is inconclusive (R^2 below " << kMinRSquared << ")\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_threshold(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& p = cfg.problem;
  const RegimeCase regime = classify_regime(p);
  if (!is_critical_case(regime.case_id)) {
    err << "threshold: regime " << to_string(regime.case_id)
        << " has no critical threshold to verify; cases 3 and 4 only\n";
    return kExitRegime;
  }
  const SharpConstants consts = compute_sharp_constants(p.N, p.alpha, p.s);
  const LevelBoundReport rep = verify_level_bound(p, cfg.sweep, ps_thresholds(p, consts));

  if (cfg.output.wants("csv")) {
    std::ostringstream os;
    os << "epsilon,margin,h_star,t_star,lambda,mu\n";
    for (const auto& r : rep.table.rows) {
      os << format_double(r.epsilon) << ',' << format_double(r.margin) << ',' << format_double(r.h_star) << ','
         << format_double(r.t_star) << ',' << format_double(r.lambda) << ',' << format_double(r.mu) << '\n';
    }
    write_atomic(out_file(cfg, "margins.csv"), os.str());
  }
  json j = base_report(cfg);
  j["report"] = to_json(rep);
  if (cfg.output.wants("json")) write_atomic(out_file(cfg, "verdict.json"), dump(j));

  for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
  out << "case " << to_string(rep.case_id) << "  verdict " << to_string(rep.verdict) << '\n';
  return rep.verdict == LevelVerdict::Verified ? kExitOk : kExitNumerical;
}

int cmd_selftest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  json checks = json::array();
  bool all = true;
  auto check = [&](const char* name, bool ok, double value) {
    checks.push_back({{"name", name}, {"pass", ok}, {"value", value}});
    out << (ok ? "PASS " : "FAIL ") << name << "  " << format_double(value) << '\n';
    all = all && ok;
  };

  const DerivedExponents ex = derive_exponents(3, 1.0, 0.0);
  check("upper_critical_exponent", ex.upper_critical == 5.0, ex.upper_critical);
  const double c32 = hls_sharp_constant(3, 2.0);
  check("hls_constant_3_2", std::abs(c32 - 7.3038721194) < 1e-8, c32);
  const double S = sobolev_constant(3);
  const double S_closed = 3.0 * std::pow(std::acos(-1.0) / 2.0, 4.0 / 3.0);
  check("sobolev_constant_3", std::abs(S - S_closed) < 1e-10 * S_closed, S);

  std::vector<double> eps;
  std::vector<double> y;
  for (int k = 1; k <= 8; ++k) {
    eps.push_back(std::ldexp(1.0, -k));
    y.push_back(3.0 * std::pow(eps.back(), 1.7));
  }
  RatePrediction pred;
  pred.exponent = 1.7;
  const RateFit f = fit_rate(eps, y, SweepColumn::HardyTerm, pred);
  check("fit_rate_synthetic", std::abs(f.slope - 1.7) < 1e-6, f.slope);

  auto grid = RadialGrid::make(1.0, 64, 2.0, 3);
  const auto u = RadialFunction::sample(grid, [](double r) { return (1.0 - r) * std::exp(-r); });
  const double hardy = hardy_weighted_integral(u, 2.0, 2.0, 3);
  const double dir = dirichlet_norm_sq(u, 3);
  check("hardy_inequality", hardy <= 4.0 * dir, hardy / (4.0 * dir));

  json j = base_report(cfg);
  j["checks"] = checks;
  if (cfg.output.wants("json")) write_atomic(out_file(cfg, "selftest.json"), dump(j));
  if (!all) err << "selftest: failures\n";
  return all ? kExitOk : kExitNumerical;
}

}  // namespace chs::cli
