#include "chs/mountain_pass.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/minima.hpp>

namespace chs {
namespace {

using Vec = std::vector<double>;

// The maximal point starts climbing once its gradient has dropped by this
// factor.
constexpr double kClimbFraction = 1e-4;

void axpy(double a, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

Vec lerp(const Vec& a, const Vec& b, double t) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

class PathSolver {
 public:
  PathSolver(const EnergyFunctional& F, const SolverConfig& cfg) : F_(F), cfg_(cfg) {}

  double energy(const Vec& u) const { return F_.energy(u).total; }

  double h1_distance(const Vec& a, const Vec& b) const {
    Vec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i];
    return std::sqrt(std::max(F_.inner(d, d), 0.0));
  }

  // Maximizes I on the segment a + τ(b - a), τ ∈ [0, 1].
  std::pair<double, double> segment_max(const Vec& a, const Vec& b) const {
    std::uintmax_t iters = 60;
    auto neg = [&](double t) { return -energy(lerp(a, b, t)); };
    const auto [t, v] = boost::math::tools::brent_find_minima(neg, 0.0, 1.0, 30, iters);
    return {t, -v};
  }

  // Re-spaces the path uniformly in H¹ arc length on either side of the
  // pinned node m. Returns the new index of the pinned node.
  int reparametrize(std::vector<Vec>& path, int m) const {
    const int K = static_cast<int>(path.size());
    std::vector<double> arc(K, 0.0);
    for (int k = 1; k < K; ++k) arc[k] = arc[k - 1] + h1_distance(path[k - 1], path[k]);
    const double total = arc[K - 1];
    if (!(total > 0.0)) return m;
    const double left = arc[m];
    int mp = static_cast<int>(std::lround((K - 1) * left / total));
    mp = std::clamp(mp, 1, K - 2);
    auto at = [&](double s) {
      auto it = std::upper_bound(arc.begin(), arc.end(), s);
      int k = static_cast<int>(it - arc.begin()) - 1;
      k = std::clamp(k, 0, K - 2);
      const double span = arc[k + 1] - arc[k];
      const double t = span > 0.0 ? std::clamp((s - arc[k]) / span, 0.0, 1.0) : 0.0;
      return lerp(path[k], path[k + 1], t);
    };
    std::vector<Vec> out(K);
    out[0] = path[0];
    out[K - 1] = path[K - 1];
    out[mp] = path[m];
    for (int k = 1; k < mp; ++k) out[k] = at(left * k / mp);
    for (int k = mp + 1; k < K - 1; ++k) out[k] = at(left + (total - left) * (k - mp) / (K - 1 - mp));
    path = std::move(out);
    return mp;
  }

 private:
  const EnergyFunctional& F_;
  const SolverConfig& cfg_;
};

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("solver.tol: must be > 0");
  if (max_iters < 1) throw std::invalid_argument("solver.max_iters: must be >= 1");
  if (path_points < 8) throw std::invalid_argument("solver.path_points: must be >= 8");
  if (!(backtracking > 0.0 && backtracking < 1.0)) throw std::invalid_argument("solver.backtracking: must lie in (0, 1)");
  if (!(armijo > 0.0 && armijo < 1.0)) throw std::invalid_argument("solver.armijo: must lie in (0, 1)");
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NonConvergence: return "non_convergence";
    case SolveStatus::DegeneratePath: return "degenerate_path";
    case SolveStatus::TrivialSolution: return "trivial_solution";
  }
  return "non_convergence";
}

RadialFunction default_probe(std::shared_ptr<const RadialGrid> grid) {
  const double R = grid->radius();
  return RadialFunction::sample(std::move(grid), [R](double r) {
    const double x = 1.0 - (r / R) * (r / R);
    return x * x;
  });
}

MountainPassResult mountain_pass_solve(const ProblemParams& params, const SolverConfig& config,
                                       std::shared_ptr<const KernelMatrix> kernel,
                                       const std::optional<RadialFunction>& probe,
                                       const std::optional<ThresholdReport>& thresholds) {
  config.validate();
  const EnergyFunctional F(params, kernel);
  const PathSolver solver(F, config);
  const RadialFunction dir = probe ? *probe : default_probe(kernel->grid_ptr());

  MountainPassResult res;
  res.geometry = mp_geometry_check(params, dir, kernel);
  {
    const auto& v = dir.values();
    const FiberProfile fp = fiber_max(F.kinetic_integral(v), F.nonlocal_integral(v), F.hardy_integral(v),
                                      params.lambda, params.mu, params.p, params.q);
    res.segment_max = fp.h_star;
  }

  const int K = config.path_points;
  const std::size_t M = F.size();
  Vec e(dir.values());
  for (double& x : e) x *= res.geometry.e_scale;
  std::vector<Vec> path(K);
  std::vector<double> E(K);
  for (int k = 0; k < K; ++k) {
    path[k] = e;
    for (double& x : path[k]) x *= static_cast<double>(k) / (K - 1);
    E[k] = solver.energy(path[k]);
  }

  Vec grad(M);
  double last_step = 0.0;
  double step = 1.0;
  double g_start = 0.0;
  bool climbed = true;
  for (int it = 0;; ++it) {
    int m = static_cast<int>(std::max_element(E.begin(), E.end()) - E.begin());
    if (m == 0 || m == K - 1) {
      res.status = SolveStatus::DegeneratePath;
      res.message = "path maximum collapsed to an endpoint";
      break;
    }
    // Re-maximize on the adjacent segments so the maximal point sits on the
    // polygon's true maximum. Once climbing, the line search is too coarse
    // for the flat top and would undo the climb.
    const bool climbing = it > 0 && climbed && res.gradient_norm < kClimbFraction * g_start;
    for (int side : {-1, 1}) {
      if (climbing) break;
      const auto [t, val] = solver.segment_max(path[m], path[m + side]);
      if (val > E[m]) {
        path[m] = lerp(path[m], path[m + side], t);
        E[m] = val;
      }
    }
    if (m >= K - 3) {
      // The maximum crowds the far end: stretch the endpoint along its ray,
      // where the energy only decreases, and respace.
      for (double& x : path[K - 1]) x *= 2.0;
      m = solver.reparametrize(path, m);
      for (int k = 0; k < K; ++k) E[k] = solver.energy(path[k]);
    }
    const Vec& v = path[m];
    E[m] = F.energy_and_gradient(v, grad).total;
    const double gnorm = F.dual_norm(grad);

    IterationRecord rec;
    rec.iteration = it;
    rec.level = E[m];
    rec.gradient_norm = gnorm;
    rec.step = last_step;
    rec.max_index = m;
    if (config.record_iterates) rec.iterate = v;
    res.trace.push_back(std::move(rec));
    res.level = E[m];
    res.gradient_norm = gnorm;
    res.iterations = it;
    res.solution = RadialFunction(kernel->grid_ptr(), v);

    if (gnorm <= config.tol) {
      res.status = SolveStatus::Converged;
      break;
    }
    if (it >= config.max_iters) {
      res.status = SolveStatus::NonConvergence;
      res.message = "iteration budget exhausted";
      break;
    }

    if (it == 0) g_start = gnorm;
    Vec d = F.riesz_map(grad);
    Vec trial(M);
    double sigma = step;
    bool accepted = false;
    if (climbing || gnorm < kClimbFraction * g_start) {
      // Close to the saddle: climb along the path tangent and descend across
      // it, accepting steps that shrink the gradient.
      Vec tau(M);
      for (std::size_t i = 0; i < M; ++i) tau[i] = path[m + 1][i] - path[m - 1][i];
      const double tn = F.inner(tau, tau);
      Vec dc(d);
      if (tn > 0.0) axpy(-2.0 * F.inner(d, tau) / tn, tau, dc);
      Vec gt(M);
      for (int bt = 0; bt < 30; ++bt) {
        for (std::size_t i = 0; i < M; ++i) trial[i] = v[i] - sigma * dc[i];
        const double et = F.energy_and_gradient(trial, gt).total;
        if (F.dual_norm(gt) < gnorm) {
          accepted = true;
          E[m] = et;
          break;
        }
        sigma *= config.backtracking;
      }
      climbed = accepted;
    }
    // Descent on the maximal point: H¹ gradient with Armijo backtracking.
    const double slope = -gnorm * gnorm;
    if (!accepted) sigma = step;
    for (int bt = 0; bt < 60 && !accepted; ++bt) {
      for (std::size_t i = 0; i < M; ++i) trial[i] = v[i] - sigma * d[i];
      const double et = solver.energy(trial);
      if (et <= E[m] + config.armijo * sigma * slope) {
        accepted = true;
        E[m] = et;
        break;
      }
      sigma *= config.backtracking;
    }
    if (!accepted) {
      res.status = SolveStatus::NonConvergence;
      res.message = "line search failed at the path maximum";
      break;
    }
    last_step = sigma;
    step = std::min(1.0, 2.0 * sigma);
    Vec accepted_point = trial;

    // The rest of the path relaxes across itself so the ridge lowers as a
    // whole; nodes already below the base level stay put.
    std::vector<Vec> moved(path);
    for (int k = 1; k < K - 1; ++k) {
      if (k == m || E[k] <= 0.0) continue;
      const Vec& u = path[k];
      Vec g(M);
      E[k] = F.energy_and_gradient(u, g).total;
      Vec dk = F.riesz_map(g);
      Vec tau(M);
      for (std::size_t i = 0; i < M; ++i) tau[i] = path[k + 1][i] - path[k - 1][i];
      const double tn = F.inner(tau, tau);
      if (tn > 0.0) axpy(-F.inner(dk, tau) / tn, tau, dk);
      const double dn = std::sqrt(std::max(F.inner(dk, dk), 0.0));
      if (!(dn > 0.0)) continue;
      const double reach = 0.5 * std::min(solver.h1_distance(path[k - 1], u), solver.h1_distance(u, path[k + 1]));
      double sk = std::min(1.0, reach / dn);
      double gd = 0.0;
      for (std::size_t i = 0; i < M; ++i) gd += g[i] * dk[i];
      for (int bt = 0; bt < 40 && gd > 0.0; ++bt) {
        for (std::size_t i = 0; i < M; ++i) trial[i] = u[i] - sk * dk[i];
        if (solver.energy(trial) <= E[k] - config.armijo * sk * gd) {
          moved[k] = trial;
          break;
        }
        sk *= config.backtracking;
      }
    }
    moved[m] = std::move(accepted_point);
    path = std::move(moved);
    // Re-interpolate the path through the moved point.
    solver.reparametrize(path, m);
    for (int k = 0; k < K; ++k) E[k] = solver.energy(path[k]);
  }

  if (res.solution) {
    const auto& u = res.solution->values();
    F.energy_and_gradient(u, grad);
    double pairing = 0.0;
    for (std::size_t i = 0; i < M; ++i) pairing += grad[i] * u[i];
    res.nehari_residual = pairing;
    res.solution_norm_sq = F.kinetic_integral(u);
    res.concentration_index = dirichlet_fraction(F.grid(), u, F.grid().radius() / 10.0);
    if (res.status == SolveStatus::Converged && std::sqrt(res.solution_norm_sq) < 1e-4) {
      res.status = SolveStatus::TrivialSolution;
      res.message = "converged to a near-zero critical point";
    }
  }
  if (thresholds) {
    res.threshold = thresholds->applicable();
    if (res.threshold) res.below_threshold = res.level < *res.threshold;
  }
  return res;
}

PsReport ps_diagnostics(const std::vector<IterationRecord>& trace, const RadialGrid& grid) {
  if (trace.empty()) throw std::invalid_argument("ps_diagnostics: empty trace");
  PsReport rep;
  const double R = grid.radius();
  for (const auto& rec : trace) {
    PsIteration row;
    row.iteration = rec.iteration;
    row.level = rec.level;
    row.gradient_norm = rec.gradient_norm;
    row.concentration[0] = 1.0;
    for (int j = 1; j <= kConcentrationBalls; ++j) {
      row.concentration[j] = rec.iterate.empty()
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : dirichlet_fraction(grid, rec.iterate, R * std::ldexp(1.0, -j));
    }
    rep.rows.push_back(row);
  }
  const std::size_t n = rep.rows.size();
  if (n >= 3) {
    const std::size_t w = std::min<std::size_t>(20, n);
    const std::size_t first = n - w;
    bool monotone = true;
    for (std::size_t i = first + 1; i < n; ++i) {
      const double prev = rep.rows[i - 1].concentration[kConcentrationBalls];
      const double cur = rep.rows[i].concentration[kConcentrationBalls];
      if (!(cur >= prev - 1e-12)) monotone = false;
    }
    const double c0 = rep.rows[first].concentration[kConcentrationBalls];
    const double c1 = rep.rows[n - 1].concentration[kConcentrationBalls];
    const bool rising = monotone && c1 > c0 + 1e-3 && c1 >= 0.5;
    const bool stalled = rep.rows[n - 1].gradient_norm >= 0.1 * rep.rows[first].gradient_norm;
    rep.concentration_suspected = rising && stalled;
  }
  return rep;
}

WitnessReport find_large_parameter_witness(const ProblemParams& params, const SolverConfig& config,
                                           std::shared_ptr<const KernelMatrix> kernel,
                                           const SharpConstants& consts, LargeParameter which,
                                           int max_steps) {
  WitnessReport rep;
  rep.parameter = which;
  ProblemParams pr = params;
  for (int step = 0; step <= max_steps; ++step) {
    const ThresholdReport thr = ps_thresholds(pr, consts);
    const MountainPassResult r = mountain_pass_solve(pr, config, kernel, std::nullopt, thr);
    WitnessStep ws;
    ws.value = which == LargeParameter::Lambda ? pr.lambda : pr.mu;
    ws.level = r.level;
    ws.threshold = r.threshold;
    ws.status = r.status;
    ws.below = r.status == SolveStatus::Converged && r.below_threshold.value_or(false);
    rep.steps.push_back(ws);
    if (ws.below) {
      rep.witness = ws.value;
      break;
    }
    if (which == LargeParameter::Lambda) {
      pr.lambda *= 10.0;
    } else {
      pr.mu *= 10.0;
    }
  }
  return rep;
}

}  // namespace chs
