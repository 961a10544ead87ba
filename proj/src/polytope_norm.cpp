#include "swstab/polytope_norm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "swstab/errors.hpp"
#include "swstab/lp.hpp"

namespace swstab {

namespace {

constexpr double kCrossTol = 1e-12;

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

Eigen::Vector2d upper_half(const Eigen::Vector2d& p) {
  if (p.y() < 0.0 || (p.y() == 0.0 && p.x() < 0.0)) return -p;
  return p;
}

// Left-turn test at `cur` with a relative tolerance.
bool strictly_left(const Eigen::Vector2d& prev, const Eigen::Vector2d& cur, const Eigen::Vector2d& next) {
  const Eigen::Vector2d a = cur - prev;
  const Eigen::Vector2d b = next - cur;
  return cross(a, b) > kCrossTol * a.norm() * b.norm();
}

bool same_line(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return std::abs(cross(a, b)) <= kCrossTol * a.norm() * b.norm();
}

std::vector<Eigen::Vector2d> full_cycle(const std::vector<Eigen::Vector2d>& reps) {
  std::vector<Eigen::Vector2d> out(reps);
  for (const auto& p : reps) out.push_back(-p);
  return out;
}

void sort_by_angle(std::vector<Eigen::VectorXd>& pts) {
  std::stable_sort(pts.begin(), pts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return polar_angle(a[0], a[1]) < polar_angle(b[0], b[1]);
  });
}

}  // namespace

double polar_angle(double x, double y) {
  double a = std::atan2(y, x);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

BalancedPolytopeNorm::BalancedPolytopeNorm(Eigen::Index dim, std::vector<Eigen::VectorXd> vertices)
    : dim_(dim), vertices_(std::move(vertices)) {
  if (dim_ < 1) throw ValidationError("norm: dimension must be positive");
  if (vertices_.empty()) throw ValidationError("norm: ball not full-dimensional (no vertices)");
  for (std::size_t j = 0; j < vertices_.size(); ++j) {
    auto& p = vertices_[j];
    const std::string path = "vertices[" + std::to_string(j) + "]";
    if (p.size() != dim_) throw ValidationError(path + ": dimension mismatch");
    if (!p.allFinite()) throw ValidationError(path + ": non-finite entry");
    if (p.isZero(0.0)) throw ValidationError(path + ": zero vertex");
    if (dim_ == 1 && p[0] < 0.0) p = -p;
    if (dim_ == 2) p = upper_half(Eigen::Vector2d(p[0], p[1]));
  }
  if (dim_ == 2) sort_by_angle(vertices_);

  P_.resize(dim_, static_cast<Eigen::Index>(vertices_.size()));
  for (std::size_t j = 0; j < vertices_.size(); ++j) P_.col(static_cast<Eigen::Index>(j)) = vertices_[j];

  if (dim_ == 2) {
    bool spans = false;
    const Eigen::Vector2d p0(vertices_[0][0], vertices_[0][1]);
    for (const auto& v : vertices_) {
      if (!same_line(p0, Eigen::Vector2d(v[0], v[1]))) spans = true;
    }
    if (!spans) throw ValidationError("norm: ball not full-dimensional");

    std::vector<Eigen::Vector2d> reps;
    for (const auto& v : vertices_) reps.emplace_back(v[0], v[1]);
    const auto cyc = full_cycle(reps);
    const std::size_t k = cyc.size();
    convex_polygon_ = true;
    for (std::size_t j = 0; j < k && convex_polygon_; ++j) {
      const auto& prev = cyc[(j + k - 1) % k];
      const auto& next = cyc[(j + 1) % k];
      if (!(cross(cyc[j], next) > 0.0) || !strictly_left(prev, cyc[j], next)) convex_polygon_ = false;
    }
    if (convex_polygon_) facets_ = gauge_facets_2d(*this);
  } else if (dim_ > 2) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(P_);
    if (lu.rank() < dim_) throw ValidationError("norm: ball not full-dimensional");
  }
}

double BalancedPolytopeNorm::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw ValidationError("norm: evaluation point has wrong dimension");
  if (dim_ == 1) {
    double r = 0.0;
    for (const auto& v : vertices_) r = std::max(r, v[0]);
    return std::abs(x[0]) / r;
  }
  if (convex_polygon_) {
    // Facets come in antipodal pairs; the first half suffices with |l . x|.
    const std::size_t half = facets_.size() / 2;
    double best = 0.0;
    for (std::size_t k = 0; k < half; ++k) {
      best = std::max(best, std::abs(facets_[k].x() * x[0] + facets_[k].y() * x[1]));
    }
    return best;
  }
  return gauge_evaluate(*this, x);
}

double gauge_evaluate(const BalancedPolytopeNorm& norm, const Eigen::VectorXd& x) {
  if (x.size() != norm.dim()) throw ValidationError("gauge: evaluation point has wrong dimension");
  if (x.isZero(0.0)) return 0.0;
  const Eigen::Index k = static_cast<Eigen::Index>(norm.size());
  const Eigen::Index n = norm.dim();
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Ones(2 * k);
  lp.G.resize(0, 2 * k);
  lp.h.resize(0);
  lp.E.resize(n, 2 * k);
  lp.E.leftCols(k) = norm.vertex_matrix();
  lp.E.rightCols(k) = -norm.vertex_matrix();
  lp.f = x;
  lp.nonnegative.assign(static_cast<std::size_t>(2 * k), true);
  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::Optimal) {
    throw InvariantError(std::string("gauge: internal invariant violation, LP ") + to_string(r.status));
  }
  return r.value;
}

std::vector<Eigen::Vector2d> polygon_2d(const BalancedPolytopeNorm& norm) {
  if (norm.dim() != 2) throw ValidationError("polygon_2d: norm is not planar");
  std::vector<Eigen::Vector2d> reps;
  for (const auto& v : norm.vertices()) reps.emplace_back(v[0], v[1]);
  return full_cycle(reps);
}

std::vector<Eigen::Vector2d> gauge_facets_2d(const BalancedPolytopeNorm& norm) {
  const auto cyc = polygon_2d(norm);
  const std::size_t k = cyc.size();
  double area2 = 0.0;
  for (std::size_t j = 0; j < k; ++j) area2 += cross(cyc[j], cyc[(j + 1) % k]);
  if (!(area2 > 0.0)) throw ValidationError("gauge_facets_2d: degenerate polygon (zero area)");

  std::vector<Eigen::Vector2d> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Vector2d& a = cyc[j];
    const Eigen::Vector2d& b = cyc[(j + 1) % k];
    const double det = cross(a, b);
    if (!(det > 0.0)) throw ValidationError("gauge_facets_2d: degenerate polygon edge");
    out.emplace_back((b.y() - a.y()) / det, (a.x() - b.x()) / det);
  }
  return out;
}

BalancedPolytopeNorm rebuild_norm(std::span<const Eigen::VectorXd> points) {
  if (points.empty()) throw ValidationError("rebuild_norm: ball not full-dimensional (no points)");
  const Eigen::Index dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw ValidationError("rebuild_norm: inconsistent point dimensions");
    if (!p.allFinite()) throw ValidationError("rebuild_norm: non-finite point");
    if (p.isZero(0.0)) throw ValidationError("rebuild_norm: zero point");
  }

  if (dim == 1) {
    double r = 0.0;
    for (const auto& p : points) r = std::max(r, std::abs(p[0]));
    return BalancedPolytopeNorm(1, {Eigen::VectorXd::Constant(1, r)});
  }
  if (dim > 2) {
    return BalancedPolytopeNorm(dim, std::vector<Eigen::VectorXd>(points.begin(), points.end()));
  }

  struct Rep {
    Eigen::Vector2d p;
    double angle;
    double radius;
  };
  std::vector<Rep> reps;
  reps.reserve(points.size());
  for (const auto& q : points) {
    const Eigen::Vector2d p = upper_half(Eigen::Vector2d(q[0], q[1]));
    reps.push_back({p, polar_angle(p.x(), p.y()), p.norm()});
  }
  std::stable_sort(reps.begin(), reps.end(), [](const Rep& a, const Rep& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.radius > b.radius;
  });

  // Antipodal/direction dedup: keep the farthest point on each line.
  std::vector<Eigen::Vector2d> kept;
  for (const auto& r : reps) {
    if (!kept.empty() && same_line(kept.back(), r.p) && kept.back().dot(r.p) > 0.0) {
      if (r.p.norm() > kept.back().norm()) kept.back() = r.p;
      continue;
    }
    kept.push_back(r.p);
  }
  // A direction just below pi is the same line as one at angle 0.
  while (kept.size() > 1 && same_line(kept.back(), kept.front()) && kept.back().dot(kept.front()) < 0.0) {
    if (kept.back().norm() > kept.front().norm()) {
      kept.erase(kept.begin());
    } else {
      kept.pop_back();
    }
  }
  if (kept.size() < 2) throw ValidationError("rebuild_norm: ball not full-dimensional");

  // Reflex-vertex elimination on the symmetric star polygon; removing a
  // representative removes its antipode too, so the result stays balanced.
  auto neighbour = [&](std::size_t j, int dir) -> Eigen::Vector2d {
    const std::size_t k = kept.size();
    if (dir < 0) return j == 0 ? Eigen::Vector2d(-kept[k - 1]) : kept[j - 1];
    return j + 1 == k ? Eigen::Vector2d(-kept[0]) : kept[j + 1];
  };
  bool removed = true;
  while (removed && kept.size() > 2) {
    removed = false;
    for (std::size_t j = 0; j < kept.size() && kept.size() > 2;) {
      if (!strictly_left(neighbour(j, -1), kept[j], neighbour(j, +1))) {
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(j));
        removed = true;
        j = j > 0 ? j - 1 : 0;
      } else {
        ++j;
      }
    }
  }

  std::vector<Eigen::VectorXd> verts;
  verts.reserve(kept.size());
  for (const auto& p : kept) verts.emplace_back(p);
  return BalancedPolytopeNorm(2, std::move(verts));
}

}  // namespace swstab
