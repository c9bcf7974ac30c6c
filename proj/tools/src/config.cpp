#include "chs/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace chs::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; });
    if (!known) throw ConfigError(path + "." + it.key() + ": unknown key");
  }
}

const json* section(const json& root, const char* name) {
  auto it = root.find(name);
  if (it == root.end()) return nullptr;
  if (!it->is_object()) throw ConfigError(std::string(name) + ": expected an object");
  return &*it;
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(path + "." + key + ": expected a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + "." + key + ": must be finite");
  return v;
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
  return it->get<int>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(path + "." + key + ": expected true or false");
  return it->get<bool>();
}

std::optional<double> get_optional_number(const json& obj, const std::string& path, const char* key,
                                          std::optional<double> fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (it->is_null()) return std::nullopt;
  return get_number(obj, path, key, 0.0);
}

std::string family_name(BubbleFamily f) {
  return f == BubbleFamily::HardySobolev ? "hardy_sobolev" : "aubin_talenti";
}

// Wraps core validation so the message carries the section prefix.
template <class F>
void checked(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.rfind(prefix, 0) == 0 ? msg : prefix + msg);
  }
}

void cross_check(const RunConfig& c) {
  checked("problem.", [&] { c.problem.validate_relaxed(); });
  if (!(c.problem.radius > 0.0)) throw ConfigError("problem.radius: must be > 0");
  checked("", [&] { c.solver.validate(); });
  if (c.grid.points < 16) throw ConfigError("grid.points: must be >= 16");
  if (!(c.grid.grading >= 1.0)) throw ConfigError("grid.grading: must be >= 1");
  if (c.sweep.grid_points < 16) throw ConfigError("sweep.grid_points: must be >= 16");
  if (!(c.sweep.grading >= 1.0)) throw ConfigError("sweep.grading: must be >= 1");
  if (!(c.sweep.k > 0.0)) throw ConfigError("sweep.k: must be > 0");
  const auto& lad = c.sweep.ladder;
  for (std::size_t i = 0; i < lad.size(); ++i) {
    if (!(lad[i] > 0.0)) throw ConfigError("sweep.ladder[" + std::to_string(i) + "]: must be > 0");
    if (i > 0 && !(lad[i] < lad[i - 1])) {
      throw ConfigError("sweep.ladder[" + std::to_string(i) + "]: ladder must be strictly decreasing");
    }
  }
  if (c.sweep.cutoff_inner) {
    const double rho = *c.sweep.cutoff_inner;
    if (!(rho > 0.0) || 2.0 * rho > c.problem.radius * (1.0 + 1e-12)) {
      throw ConfigError("sweep.cutoff_inner: need 0 < 2 cutoff_inner <= radius");
    }
  }
  if (c.output.dir.empty()) throw ConfigError("output.dir: must not be empty");
}

}  // namespace

bool OutputSpec::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>: expected an object");
  reject_unknown(j, "", {"problem", "grid", "solver", "sweep", "output"});
  RunConfig c;

  if (const json* p = section(j, "problem")) {
    reject_unknown(*p, "problem", {"N", "alpha", "s", "p", "q", "lambda", "mu", "radius"});
    auto& pr = c.problem;
    pr.N = get_int(*p, "problem", "N", pr.N);
    pr.alpha = get_number(*p, "problem", "alpha", pr.alpha);
    pr.s = get_number(*p, "problem", "s", pr.s);
    pr.p = get_number(*p, "problem", "p", pr.p);
    pr.q = get_number(*p, "problem", "q", pr.q);
    pr.lambda = get_number(*p, "problem", "lambda", pr.lambda);
    pr.mu = get_number(*p, "problem", "mu", pr.mu);
    pr.radius = get_number(*p, "problem", "radius", pr.radius);
  }

  if (const json* g = section(j, "grid")) {
    reject_unknown(*g, "grid", {"points", "grading", "cache_dir"});
    c.grid.points = get_int(*g, "grid", "points", c.grid.points);
    c.grid.grading = get_number(*g, "grid", "grading", c.grid.grading);
    if (auto it = g->find("cache_dir"); it != g->end() && !it->is_null()) {
      if (!it->is_string()) throw ConfigError("grid.cache_dir: expected a string or null");
      c.grid.cache_dir = it->get<std::string>();
    }
  }

  if (const json* s = section(j, "solver")) {
    reject_unknown(*s, "solver", {"tol", "max_iters", "path_points", "backtracking", "armijo", "record_iterates"});
    auto& sc = c.solver;
    sc.tol = get_number(*s, "solver", "tol", sc.tol);
    sc.max_iters = get_int(*s, "solver", "max_iters", sc.max_iters);
    sc.path_points = get_int(*s, "solver", "path_points", sc.path_points);
    sc.backtracking = get_number(*s, "solver", "backtracking", sc.backtracking);
    sc.armijo = get_number(*s, "solver", "armijo", sc.armijo);
    sc.record_iterates = get_bool(*s, "solver", "record_iterates", sc.record_iterates);
  }

  if (const json* w = section(j, "sweep")) {
    reject_unknown(*w, "sweep",
                   {"ladder", "theta", "family", "k", "cutoff_inner", "mode", "grid_points", "grading"});
    auto& sw = c.sweep;
    if (auto it = w->find("ladder"); it != w->end() && !it->is_null()) {
      if (!it->is_array()) throw ConfigError("sweep.ladder: expected an array of numbers");
      for (std::size_t i = 0; i < it->size(); ++i) {
        if (!(*it)[i].is_number()) throw ConfigError("sweep.ladder[" + std::to_string(i) + "]: expected a number");
        sw.ladder.push_back((*it)[i].get<double>());
      }
    }
    sw.theta = get_optional_number(*w, "sweep", "theta", std::nullopt);
    if (auto it = w->find("family"); it != w->end()) {
      const std::string f = it->is_string() ? it->get<std::string>() : "";
      if (f == "hardy_sobolev") {
        sw.family = BubbleFamily::HardySobolev;
      } else if (f == "aubin_talenti") {
        sw.family = BubbleFamily::AubinTalenti;
      } else {
        throw ConfigError("sweep.family: expected \"hardy_sobolev\" or \"aubin_talenti\"");
      }
    }
    sw.k = get_number(*w, "sweep", "k", sw.k);
    sw.cutoff_inner = get_optional_number(*w, "sweep", "cutoff_inner", std::nullopt);
    if (auto it = w->find("mode"); it != w->end()) {
      const std::string m = it->is_string() ? it->get<std::string>() : "";
      if (m == "profile") {
        sw.mode = SweepMode::Profile;
      } else if (m == "grid") {
        sw.mode = SweepMode::Grid;
      } else {
        throw ConfigError("sweep.mode: expected \"profile\" or \"grid\"");
      }
    }
    sw.grid_points = get_int(*w, "sweep", "grid_points", sw.grid_points);
    sw.grading = get_number(*w, "sweep", "grading", sw.grading);
  }

  if (const json* o = section(j, "output")) {
    reject_unknown(*o, "output", {"dir", "formats"});
    if (auto it = o->find("dir"); it != o->end()) {
      if (!it->is_string()) throw ConfigError("output.dir: expected a string");
      c.output.dir = it->get<std::string>();
    }
    if (auto it = o->find("formats"); it != o->end()) {
      if (!it->is_array()) throw ConfigError("output.formats: expected an array");
      c.output.formats.clear();
      for (std::size_t i = 0; i < it->size(); ++i) {
        const json& f = (*it)[i];
        if (!f.is_string() || (f != "csv" && f != "json")) {
          throw ConfigError("output.formats[" + std::to_string(i) + "]: expected \"csv\" or \"json\"");
        }
        c.output.formats.push_back(f.get<std::string>());
      }
    }
  }

  cross_check(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("<file>: cannot open " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<file>: malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

void apply_overrides(RunConfig& cfg, const ProblemOverrides& o) {
  auto& p = cfg.problem;
  if (o.N) p.N = *o.N;
  if (o.alpha) p.alpha = *o.alpha;
  if (o.s) p.s = *o.s;
  if (o.p) p.p = *o.p;
  if (o.q) p.q = *o.q;
  if (o.lambda) p.lambda = *o.lambda;
  if (o.mu) p.mu = *o.mu;
  if (o.radius) p.radius = *o.radius;
  cross_check(cfg);
}

json to_json(const RunConfig& c) {
  json j;
  const auto& p = c.problem;
  j["problem"] = {{"N", p.N},   {"alpha", p.alpha},   {"s", p.s},   {"p", p.p},
                  {"q", p.q},   {"lambda", p.lambda}, {"mu", p.mu}, {"radius", p.radius}};
  j["grid"] = {{"points", c.grid.points}, {"grading", c.grid.grading},
               {"cache_dir", c.grid.cache_dir ? json(*c.grid.cache_dir) : json(nullptr)}};
  const auto& s = c.solver;
  j["solver"] = {{"tol", s.tol},
                 {"max_iters", s.max_iters},
                 {"path_points", s.path_points},
                 {"backtracking", s.backtracking},
                 {"armijo", s.armijo},
                 {"record_iterates", s.record_iterates}};
  const auto& w = c.sweep;
  j["sweep"] = {{"ladder", w.resolved_ladder(p.radius)},
                {"theta", w.theta ? json(*w.theta) : json(nullptr)},
                {"family", family_name(w.family)},
                {"k", w.k},
                {"cutoff_inner", w.cutoff_inner.value_or(0.5 * p.radius)},
                {"mode", w.mode == SweepMode::Profile ? "profile" : "grid"},
                {"grid_points", w.grid_points},
                {"grading", w.grading}};
  j["output"] = {{"dir", c.output.dir}, {"formats", c.output.formats}};
  return j;
}

}  // namespace chs::cli
