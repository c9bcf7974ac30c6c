#include "chs/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace chs::cli {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); }

// NaN and infinities have no JSON spelling.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string_view provenance(Provenance p) { return p == Provenance::ClosedForm ? "closed_form" : "quadrature"; }

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atomic(const std::filesystem::path& file, const std::string& contents) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json to_json(const ProblemParams& p) {
  return {{"N", p.N}, {"alpha", p.alpha}, {"s", p.s},   {"p", p.p},
          {"q", p.q}, {"lambda", p.lambda}, {"mu", p.mu}, {"radius", p.radius}};
}

json to_json(const DerivedExponents& e) {
  return {{"upper_critical", e.upper_critical},
          {"lower_critical", e.lower_critical},
          {"hardy_sobolev", e.hardy_sobolev},
          {"sobolev", e.sobolev},
          {"hardy_best", e.hardy_best}};
}

json to_json(const RegimeCase& r) {
  return {{"case_id", std::string(to_string(r.case_id))},
          {"requires_large_parameter",
           r.requires_large_parameter ? json(std::string(to_string(*r.requires_large_parameter))) : json(nullptr)},
          {"theta_lower_bound", opt(r.theta_lower_bound)}};
}

json to_json(const SharpConstants& c) {
  json j = {{"N", c.N},
            {"alpha", c.alpha},
            {"s", c.s},
            {"hls_constant", {{"value", c.hls_constant}, {"provenance", provenance(c.hls_constant_provenance)}}},
            {"sobolev_constant",
             {{"value", c.sobolev_constant}, {"provenance", provenance(c.sobolev_constant_provenance)}}}};
  j["hardy_sobolev_constant"] =
      c.hardy_sobolev_constant
          ? json{{"value", *c.hardy_sobolev_constant}, {"provenance", provenance(c.hardy_sobolev_constant_provenance)}}
          : json(nullptr);
  if (c.hls_best_ratio) {
    j["hls_best_ratio"] = {{"value", *c.hls_best_ratio}, {"provenance", provenance(c.hls_best_ratio_provenance)}};
  }
  return j;
}

json to_json(const ThresholdReport& t) {
  return {{"hardy_sobolev_threshold", opt(t.hardy_sobolev_threshold)},
          {"hls_threshold", t.hls_threshold},
          {"hardy_sobolev_applies", t.hardy_sobolev_applies},
          {"hls_applies", t.hls_applies},
          {"applicable", opt(t.applicable())}};
}

json to_json(const MountainPassGeometry& g) {
  return {{"rho", g.rho},
          {"beta", g.beta},
          {"probe_beta", g.probe_beta},
          {"e_scale", g.e_scale},
          {"ball_constant_nonlocal", num(g.ball_constant_nonlocal)},
          {"ball_constant_hardy", num(g.ball_constant_hardy)}};
}

json to_json(const MountainPassResult& r) {
  return {{"status", std::string(to_string(r.status))},
          {"message", r.message},
          {"level", num(r.level)},
          {"gradient_norm", num(r.gradient_norm)},
          {"iterations", r.iterations},
          {"threshold", opt(r.threshold)},
          {"below_threshold", opt(r.below_threshold)},
          {"concentration_index", num(r.concentration_index)},
          {"nehari_residual", num(r.nehari_residual)},
          {"solution_norm_sq", num(r.solution_norm_sq)},
          {"segment_max", num(r.segment_max)},
          {"geometry", to_json(r.geometry)}};
}

json to_json(const RateFit& f) {
  return {{"column", std::string(to_string(f.column))},
          {"fitted", num(f.slope)},
          {"power_slope", num(f.power_slope)},
          {"log_slope", num(f.log_slope)},
          {"expected", f.expected.exponent},
          {"tolerance", f.expected.tolerance},
          {"one_sided", f.expected.one_sided},
          {"expect_log", opt(f.expected.expect_log)},
          {"log_factor_detected", f.log_factor_detected},
          {"r_squared", num(f.r_squared)},
          {"residual_power", num(f.residual_power)},
          {"residual_log", num(f.residual_log)},
          {"points", f.points},
          {"verdict", std::string(to_string(f.verdict))}};
}

json to_json(const SweepRow& r) {
  return {{"epsilon", r.epsilon},       {"lambda", r.lambda},
          {"mu", r.mu},                 {"kinetic", num(r.kinetic)},
          {"hardy_term", num(r.hardy_term)}, {"nonlocal_term", num(r.nonlocal_term)},
          {"t_star", num(r.t_star)},    {"h_star", num(r.h_star)},
          {"margin", num(r.margin)},    {"kinetic_deviation", num(r.kinetic_deviation)},
          {"hardy_deviation", num(r.hardy_deviation)}};
}

json to_json(const LevelBoundReport& r) {
  json rows = json::array();
  for (const auto& row : r.table.rows) rows.push_back({{"epsilon", row.epsilon}, {"margin", num(row.margin)}});
  return {{"case_id", std::string(to_string(r.case_id))},
          {"threshold_kind", r.threshold_kind},
          {"threshold", r.threshold},
          {"verdict", std::string(to_string(r.verdict))},
          {"tail_positive", r.tail_positive},
          {"tail_increasing", r.tail_increasing},
          {"theta", opt(r.theta)},
          {"theta_lower_bound", opt(r.theta_lower_bound)},
          {"margin_slope", opt(r.margin_slope)},
          {"warnings", r.warnings},
          {"margins", rows}};
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream os;
  os << "epsilon,kinetic,hardy_term,nonlocal_term,t_star,h_star,margin,lambda,mu,kinetic_deviation,hardy_deviation\n";
  for (const auto& r : table.rows) {
    os << format_double(r.epsilon) << ',' << format_double(r.kinetic) << ',' << format_double(r.hardy_term) << ','
       << format_double(r.nonlocal_term) << ',' << format_double(r.t_star) << ',' << format_double(r.h_star) << ','
       << format_double(r.margin) << ',' << format_double(r.lambda) << ',' << format_double(r.mu) << ','
       << format_double(r.kinetic_deviation) << ',' << format_double(r.hardy_deviation) << '\n';
  }
  return os.str();
}

std::string trace_csv(const std::vector<IterationRecord>& trace) {
  std::ostringstream os;
  os << "iteration,level,gradient_norm,step,max_index\n";
  for (const auto& r : trace) {
    os << r.iteration << ',' << format_double(r.level) << ',' << format_double(r.gradient_norm) << ','
       << format_double(r.step) << ',' << r.max_index << '\n';
  }
  return os.str();
}

std::string solution_csv(const RadialFunction& u) {
  std::ostringstream os;
  u.write_csv(os);
  return os.str();
}

}  // namespace chs::cli
