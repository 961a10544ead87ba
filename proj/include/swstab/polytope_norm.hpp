#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace swstab {

/// A norm whose unit ball is the centrally symmetric polytope conv{+-p_j}.
///
/// Only one representative of each antipodal pair is stored; the sign
/// expansion happens inside evaluation, which makes absolute homogeneity
/// structural. In the plane the representatives are kept in the upper
/// half-plane, sorted by angle in [0, pi).
///
/// The constructor checks that vertices are nonzero and that the ball is
/// full-dimensional; it does not prune. Use rebuild_norm() to obtain a pruned
/// polygon from arbitrary boundary points.
class BalancedPolytopeNorm {
 public:
  BalancedPolytopeNorm(Eigen::Index dim, std::vector<Eigen::VectorXd> vertices);

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<Eigen::VectorXd>& vertices() const { return vertices_; }

  /// dim x size() matrix with the representatives as columns.
  const Eigen::MatrixXd& vertex_matrix() const { return P_; }

  /// Fast evaluation: the facet maximum when dim == 2 and the stored polygon
  /// is convex, the closed form when dim == 1, gauge_evaluate() otherwise.
  double operator()(const Eigen::VectorXd& x) const;

  /// True when dim == 2 and consecutive representatives (with antipodal
  /// wrap) make strictly left turns.
  bool is_convex_polygon() const { return convex_polygon_; }

  /// Edge functionals l with l . x = 1 on each edge of the full polygon
  /// (dim == 2 and convex only; empty otherwise).
  const std::vector<Eigen::Vector2d>& facets() const { return facets_; }

  friend bool operator==(const BalancedPolytopeNorm& a, const BalancedPolytopeNorm& b) {
    return a.dim_ == b.dim_ && a.vertices_ == b.vertices_;
  }

 private:
  Eigen::Index dim_;
  std::vector<Eigen::VectorXd> vertices_;
  Eigen::MatrixXd P_;
  bool convex_polygon_ = false;
  std::vector<Eigen::Vector2d> facets_;
};

/// Gauge min{t >= 0 : x in t conv{+-p_j}} computed by the linear program
/// minimize sum(l+ + l-) s.t. x = P (l+ - l-), l+- >= 0.
/// Returns exactly 0 for x = 0. Throws ValidationError on a dimension
/// mismatch and InvariantError if the LP is not optimal.
double gauge_evaluate(const BalancedPolytopeNorm& norm, const Eigen::VectorXd& x);

/// Dual description of a planar ball: one functional per polygon edge of
/// conv{+-p_j}, in counter-clockwise order starting from the edge after p_0.
/// Throws ValidationError if dim != 2 or the polygon has zero area.
std::vector<Eigen::Vector2d> gauge_facets_2d(const BalancedPolytopeNorm& norm);

/// Full symmetric polygon p_0..p_{k-1}, -p_0..-p_{k-1} in counter-clockwise
/// order (dim == 2).
std::vector<Eigen::Vector2d> polygon_2d(const BalancedPolytopeNorm& norm);

/// Unit ball reconstruction from boundary points.
///   dim 1: the single farthest point.
///   dim 2: exact convex polygon of the symmetric point set (angular sort,
///          antipodal dedup, reflex-vertex elimination with relative
///          cross-product tolerance 1e-12).
///   dim >= 3: every point kept as a vertex.
/// Throws ValidationError("ball not full-dimensional") for rank-deficient
/// sets and for zero points.
BalancedPolytopeNorm rebuild_norm(std::span<const Eigen::VectorXd> points);

/// Angle of a planar vector mapped to [0, 2 pi).
double polar_angle(double x, double y);

}  // namespace swstab
