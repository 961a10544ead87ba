#include "swstab/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "random_util.hpp"
#include "swstab/errors.hpp"
#include "swstab/lp.hpp"

namespace swstab {

void SynthesisConfig::validate(Eigen::Index n) const {
  if (directions % 2 != 0) throw ValidationError("config.directions: must be even");
  if (directions < 2 * n) throw ValidationError("config.directions: must be at least 2n");
  if (!(tol > 0.0)) throw ValidationError("config.tol: must be positive");
  if (!(v_max > 1.0)) throw ValidationError("config.v_max: must exceed 1");
  if (max_iters < 1) throw ValidationError("config.max_iters: must be at least 1");
}

const char* to_string(SynthesisStatus status) {
  switch (status) {
    case SynthesisStatus::Converged:
      return "Converged";
    case SynthesisStatus::Diverged:
      return "Diverged";
    case SynthesisStatus::MaxItersReached:
      return "MaxItersReached";
  }
  return "?";
}

SynthesisStatus synthesis_status_from_string(const std::string& s) {
  if (s == "Converged") return SynthesisStatus::Converged;
  if (s == "Diverged") return SynthesisStatus::Diverged;
  if (s == "MaxItersReached") return SynthesisStatus::MaxItersReached;
  throw ValidationError("status: unknown value '" + s + "'");
}

double Certificate::gamma_bound() const {
  if (!c2) throw InvariantError("certificate: c2 is only defined for converged certificates");
  return 1.0 - 1.0 / *c2;
}

namespace {

// x = scale * unit with unit canonical on its ray.
struct CanonicalRay {
  Eigen::VectorXd unit;
  double scale = 0.0;
};

CanonicalRay canonical_ray(const Eigen::VectorXd& x) {
  CanonicalRay r;
  const double len = x.norm();
  if (len == 0.0) return r;
  r.unit = x / len;
  r.scale = len;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (r.unit[i] != 0.0) {
      if (r.unit[i] < 0.0) {
        r.unit = -r.unit;
        r.scale = -len;
      }
      break;
    }
  }
  return r;
}

void check_dims(const BalancedPolytopeNorm& norm, const SwitchedSystem& system, const Eigen::VectorXd& x) {
  if (norm.dim() != system.n()) throw ValidationError("bellman: norm dimension does not match system");
  if (x.size() != system.n()) throw ValidationError("bellman: state has wrong dimension");
}

// minimize t over (u+, u-, t, lambda) subject to, for each mode i in `modes`,
//   B_i (u+ - u-) - P (lambda_i+ - lambda_i-) = -A_i x,
//   sum(lambda_i+ + lambda_i-) <= t.
// Returns (t*, u*) at the given (already canonical) x.
std::pair<double, Eigen::VectorXd> solve_minmax(const BalancedPolytopeNorm& norm, const SwitchedSystem& system,
                                                std::span<const std::size_t> modes, const Eigen::VectorXd& x,
                                                InputSelection selection) {
  const Eigen::Index n = system.n();
  const Eigen::Index m = system.m();
  const Eigen::Index k = static_cast<Eigen::Index>(norm.size());
  const Eigen::Index s = static_cast<Eigen::Index>(modes.size());
  const Eigen::Index t_col = 2 * m;
  const Eigen::Index nv = 2 * m + 1 + 2 * k * s;
  // Work with P / sigma so the LP data stays O(1) when the ball is very small
  // or very large; the variables become sigma * lambda and sigma * t.
  const double sigma = norm.vertex_matrix().cwiseAbs().maxCoeff();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw NumericalError("bellman: degenerate vertex matrix");
  const Eigen::MatrixXd P = norm.vertex_matrix() / sigma;

  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(nv);
  lp.c[t_col] = 1.0;
  lp.E = Eigen::MatrixXd::Zero(n * s, nv);
  lp.f.resize(n * s);
  lp.G = Eigen::MatrixXd::Zero(s, nv);
  lp.h = Eigen::VectorXd::Zero(s);
  lp.nonnegative.assign(static_cast<std::size_t>(nv), true);

  for (Eigen::Index b = 0; b < s; ++b) {
    const std::size_t i = modes[static_cast<std::size_t>(b)];
    const Eigen::Index row = b * n;
    const Eigen::Index lam = 2 * m + 1 + 2 * k * b;
    if (m > 0) {
      lp.E.block(row, 0, n, m) = system.B(i);
      lp.E.block(row, m, n, m) = -system.B(i);
    }
    lp.E.block(row, lam, n, k) = -P;
    lp.E.block(row, lam + k, n, k) = P;
    lp.f.segment(row, n) = -(system.A(i) * x);
    lp.G.block(b, lam, 1, 2 * k).setOnes();
    lp.G(b, t_col) = -1.0;
  }

  LpResult r;
  if (selection == InputSelection::MinNorm && m > 0) {
    Eigen::VectorXd l1 = Eigen::VectorXd::Zero(nv);
    l1.head(2 * m).setOnes();
    const Eigen::VectorXd tie[] = {l1};
    r = solve_lp_lexicographic(lp, tie);
  } else {
    r = solve_lp(lp);
  }
  if (r.status == LpStatus::Unbounded) throw NumericalError("bellman: inner minimization unbounded");
  if (r.status != LpStatus::Optimal) {
    throw InvariantError(std::string("bellman: LP ") + to_string(r.status));
  }
  Eigen::VectorXd u = r.z.head(m) - r.z.segment(m, m);
  return {std::max(r.value / sigma, 0.0), std::move(u)};
}

}  // namespace

BellmanResult bellman_mode(const BalancedPolytopeNorm& norm, const SwitchedSystem& system, std::size_t mode,
                           const Eigen::VectorXd& x, InputSelection selection) {
  check_dims(norm, system, x);
  if (mode >= system.num_modes()) throw ValidationError("bellman: mode index out of range");
  const CanonicalRay ray = canonical_ray(x);
  if (ray.scale == 0.0) return {0.0, Eigen::VectorXd::Zero(system.m())};
  const std::size_t modes[] = {mode};
  auto [t, u] = solve_minmax(norm, system, modes, ray.unit, selection);
  return {std::abs(ray.scale) * t, ray.scale * u};
}

BellmanResult bellman_independent(const BalancedPolytopeNorm& norm, const SwitchedSystem& system,
                                  const Eigen::VectorXd& x, InputSelection selection) {
  check_dims(norm, system, x);
  const CanonicalRay ray = canonical_ray(x);
  if (ray.scale == 0.0) return {0.0, Eigen::VectorXd::Zero(system.m())};
  std::vector<std::size_t> modes(system.num_modes());
  for (std::size_t i = 0; i < modes.size(); ++i) modes[i] = i;
  auto [t, u] = solve_minmax(norm, system, modes, ray.unit, selection);
  const double len = std::abs(ray.scale);
  return {len + len * t, ray.scale * u};
}

BellmanDependentResult bellman_dependent(const BalancedPolytopeNorm& norm, const SwitchedSystem& system,
                                         const Eigen::VectorXd& x, InputSelection selection) {
  check_dims(norm, system, x);
  BellmanDependentResult out;
  const CanonicalRay ray = canonical_ray(x);
  if (ray.scale == 0.0) {
    out.u_star_per_mode.assign(system.num_modes(), Eigen::VectorXd::Zero(system.m()));
    out.mode_values.assign(system.num_modes(), 0.0);
    return out;
  }
  const double len = std::abs(ray.scale);
  double worst = 0.0;
  for (std::size_t i = 0; i < system.num_modes(); ++i) {
    const std::size_t modes[] = {i};
    auto [t, u] = solve_minmax(norm, system, modes, ray.unit, selection);
    worst = std::max(worst, t);
    out.mode_values.push_back(len * t);
    out.u_star_per_mode.push_back(ray.scale * u);
  }
  out.value = len + len * worst;
  return out;
}

std::vector<Eigen::VectorXd> direction_grid(Eigen::Index n, int count) {
  if (n < 1) throw ValidationError("direction_grid: dimension must be positive");
  if (count < 2 || count % 2 != 0) throw ValidationError("direction_grid: count must be even and >= 2");
  std::vector<Eigen::VectorXd> dirs;
  if (n == 1) {
    dirs.push_back(Eigen::VectorXd::Ones(1));
    return dirs;
  }
  const int half = count / 2;
  dirs.reserve(static_cast<std::size_t>(half));
  if (n == 2) {
    for (int j = 0; j < half; ++j) {
      const double a = 2.0 * std::numbers::pi * j / count;
      Eigen::VectorXd d(2);
      d << std::cos(a), std::sin(a);
      dirs.push_back(std::move(d));
    }
    return dirs;
  }
  for (Eigen::Index i = 0; i < n && static_cast<int>(dirs.size()) < half; ++i) {
    dirs.push_back(Eigen::VectorXd::Unit(n, i));
  }
  std::mt19937_64 rng(0x5eed0f5a3b1e5ULL);
  while (static_cast<int>(dirs.size()) < half) {
    Eigen::VectorXd g = detail::gaussian_vector(rng, n);
    const double len = g.norm();
    if (len == 0.0) continue;
    g /= len;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (g[i] != 0.0) {
        if (g[i] < 0.0) g = -g;
        break;
      }
    }
    dirs.push_back(std::move(g));
  }
  return dirs;
}

double contraction_factor(const BalancedPolytopeNorm& norm, const SwitchedSystem& system, bool mode_dependent,
                          std::span<const Eigen::VectorXd> directions) {
  double rho = 0.0;
  for (const auto& d : directions) {
    const double vd = norm(d);
    double worst = 0.0;
    if (mode_dependent) {
      for (std::size_t i = 0; i < system.num_modes(); ++i) {
        const BellmanResult r = bellman_mode(norm, system, i, d);
        worst = std::max(worst, norm(system.step(i, d, r.u_star)));
      }
    } else {
      const BellmanResult r = bellman_independent(norm, system, d);
      for (std::size_t i = 0; i < system.num_modes(); ++i) {
        worst = std::max(worst, norm(system.step(i, d, r.u_star)));
      }
    }
    rho = std::max(rho, worst / vd);
  }
  return rho;
}

double norm_upper_constant(const BalancedPolytopeNorm& norm, std::span<const Eigen::VectorXd> directions) {
  if (norm.dim() == 1) return norm(Eigen::VectorXd::Ones(1));
  if (norm.dim() == 2 && norm.is_convex_polygon()) {
    double c = 0.0;
    for (const auto& l : norm.facets()) c = std::max(c, l.norm());
    return c;
  }
  double c = 0.0;
  for (const auto& d : directions) c = std::max(c, norm(d) / d.norm());
  return c;
}

Certificate value_iteration(const SwitchedSystem& system, const SynthesisConfig& config,
                            const IterationObserver& observer) {
  config.validate(system.n());
  const Eigen::Index n = system.n();
  const std::vector<Eigen::VectorXd> grid = direction_grid(n, config.directions);

  BalancedPolytopeNorm V = rebuild_norm(grid);
  std::vector<double> values(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) values[j] = V(grid[j]);

  Certificate cert{system_hash(system), config.mode_dependent, V, 0, SynthesisStatus::MaxItersReached,
                   std::nullopt, std::nullopt, config.directions, config.tol, n >= 3};

  std::vector<Eigen::VectorXd> points(grid.size());
  std::vector<double> next(grid.size());
  for (int it = 1; it <= config.max_iters; ++it) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double tv = config.mode_dependent
                            ? bellman_dependent(V, system, grid[j], InputSelection::AnyOptimal).value
                            : bellman_independent(V, system, grid[j], InputSelection::AnyOptimal).value;
      points[j] = grid[j] / tv;
    }
    BalancedPolytopeNorm updated = rebuild_norm(points);
    double step = 0.0;
    bool diverged = false;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      next[j] = updated(grid[j]);
      if (!(next[j] <= config.v_max)) diverged = true;
      step = std::max(step, std::abs(next[j] - values[j]) / values[j]);
    }
    if (observer) observer(it, next);
    V = std::move(updated);
    values.swap(next);
    cert.iterations = it;
    if (diverged) {
      cert.status = SynthesisStatus::Diverged;
      break;
    }
    if (step <= config.tol) {
      cert.status = SynthesisStatus::Converged;
      break;
    }
  }
  cert.norm = V;

  if (cert.converged()) {
    const std::vector<Eigen::VectorXd> test = direction_grid(n, 2 * config.directions);
    cert.rho = contraction_factor(V, system, config.mode_dependent, test);
    cert.c2 = norm_upper_constant(V, test);
  }
  return cert;
}

}  // namespace swstab
