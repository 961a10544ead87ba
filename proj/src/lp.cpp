#include "swstab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "swstab/errors.hpp"

namespace swstab {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "Optimal";
    case LpStatus::Unbounded:
      return "Unbounded";
    case LpStatus::Infeasible:
      return "Infeasible";
  }
  return "?";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kRatioTieTol = 1e-12;
constexpr double kDegenerateStep = 1e-12;
constexpr double kMinRcond = 1e-14;
constexpr double kResidualTol = 1e-8;
constexpr double kFaceTol = 1e-12;
constexpr int kRefactorEvery = 50;
constexpr Eigen::Index kPricingSection = 64;

void check_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* name) {
  if (!m.allFinite()) {
    throw ValidationError(std::string("linear program: non-finite entry in ") + name);
  }
}

void validate(const LinearProgram& lp) {
  const Eigen::Index nv = lp.num_variables();
  if (lp.G.rows() > 0 && lp.G.cols() != nv) {
    throw ValidationError("linear program: G has " + std::to_string(lp.G.cols()) +
                          " columns, expected " + std::to_string(nv));
  }
  if (lp.E.rows() > 0 && lp.E.cols() != nv) {
    throw ValidationError("linear program: E has " + std::to_string(lp.E.cols()) +
                          " columns, expected " + std::to_string(nv));
  }
  if (lp.h.size() != lp.G.rows()) {
    throw ValidationError("linear program: h length does not match G rows");
  }
  if (lp.f.size() != lp.E.rows()) {
    throw ValidationError("linear program: f length does not match E rows");
  }
  if (!lp.nonnegative.empty() && static_cast<Eigen::Index>(lp.nonnegative.size()) != nv) {
    throw ValidationError("linear program: nonnegative flags do not match variable count");
  }
  check_finite(lp.c, "c");
  check_finite(lp.G, "G");
  check_finite(lp.h, "h");
  check_finite(lp.E, "E");
  check_finite(lp.f, "f");
}

// Equality-form image of a LinearProgram: A w = b, w >= 0, b >= 0, with the
// columns ordered [structural | slack | artificial].
struct StandardForm {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::Index rows = 0;
  Eigen::Index structural = 0;
  Eigen::Index first_artificial = 0;
  std::vector<Eigen::Index> plus_col;   // per original variable
  std::vector<Eigen::Index> minus_col;  // -1 for nonnegative variables
  std::vector<Eigen::Index> initial_basis;

  Eigen::VectorXd map_cost(const Eigen::VectorXd& c) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(A.cols());
    for (std::size_t j = 0; j < plus_col.size(); ++j) {
      out[plus_col[j]] = c[static_cast<Eigen::Index>(j)];
      if (minus_col[j] >= 0) out[minus_col[j]] = -c[static_cast<Eigen::Index>(j)];
    }
    return out;
  }
};

StandardForm to_standard_form(const LinearProgram& lp) {
  StandardForm sf;
  const Eigen::Index nv = lp.num_variables();
  const Eigen::Index ng = lp.G.rows();
  const Eigen::Index ne = lp.E.rows();
  sf.rows = ng + ne;

  sf.plus_col.resize(static_cast<std::size_t>(nv));
  sf.minus_col.assign(static_cast<std::size_t>(nv), -1);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < nv; ++j) {
    const bool nonneg = !lp.nonnegative.empty() && lp.nonnegative[static_cast<std::size_t>(j)];
    sf.plus_col[static_cast<std::size_t>(j)] = col++;
    if (!nonneg) sf.minus_col[static_cast<std::size_t>(j)] = col++;
  }
  sf.structural = col;

  std::vector<bool> flipped(static_cast<std::size_t>(sf.rows), false);
  Eigen::Index artificials = 0;
  for (Eigen::Index r = 0; r < ng; ++r) {
    if (lp.h[r] < 0.0) {
      flipped[static_cast<std::size_t>(r)] = true;
      ++artificials;
    }
  }
  for (Eigen::Index r = 0; r < ne; ++r) {
    flipped[static_cast<std::size_t>(ng + r)] = lp.f[r] < 0.0;
    ++artificials;
  }

  const Eigen::Index total = sf.structural + ng + artificials;
  sf.first_artificial = sf.structural + ng;
  sf.A = Eigen::MatrixXd::Zero(sf.rows, total);
  sf.b.resize(sf.rows);
  sf.initial_basis.resize(static_cast<std::size_t>(sf.rows));

  // Structural block, copied column by column: rows of G then E, each row
  // negated when flipped.
  Eigen::VectorXd row_sign(sf.rows);
  for (Eigen::Index r = 0; r < sf.rows; ++r) row_sign[r] = flipped[static_cast<std::size_t>(r)] ? -1.0 : 1.0;
  for (Eigen::Index j = 0; j < nv; ++j) {
    auto dst = sf.A.col(sf.plus_col[static_cast<std::size_t>(j)]);
    if (ng > 0) dst.head(ng) = row_sign.head(ng).cwiseProduct(lp.G.col(j));
    if (ne > 0) dst.tail(ne) = row_sign.tail(ne).cwiseProduct(lp.E.col(j));
    const Eigen::Index mc = sf.minus_col[static_cast<std::size_t>(j)];
    if (mc >= 0) sf.A.col(mc) = -dst;
  }

  Eigen::Index next_art = sf.first_artificial;
  for (Eigen::Index r = 0; r < ng; ++r) {
    const bool flip = flipped[static_cast<std::size_t>(r)];
    sf.A(r, sf.structural + r) = flip ? -1.0 : 1.0;
    sf.b[r] = flip ? -lp.h[r] : lp.h[r];
    if (flip) {
      sf.A(r, next_art) = 1.0;
      sf.initial_basis[static_cast<std::size_t>(r)] = next_art++;
    } else {
      sf.initial_basis[static_cast<std::size_t>(r)] = sf.structural + r;
    }
  }
  for (Eigen::Index e = 0; e < ne; ++e) {
    const Eigen::Index r = ng + e;
    sf.b[r] = flipped[static_cast<std::size_t>(r)] ? -lp.f[e] : lp.f[e];
    sf.A(r, next_art) = 1.0;
    sf.initial_basis[static_cast<std::size_t>(r)] = next_art++;
  }
  return sf;
}

enum class StageResult { Optimal, Unbounded };

class RevisedSimplex {
 public:
  explicit RevisedSimplex(const StandardForm& sf)
      : A_(sf.A),
        At_(sf.A.transpose()),
        b_(sf.b),
        rows_(sf.rows),
        cols_(sf.A.cols()),
        basis_(sf.initial_basis),
        position_(static_cast<std::size_t>(cols_), -1),
        barred_(static_cast<std::size_t>(cols_), 0),
        blocked_(Eigen::VectorXd::Zero(cols_)),
        Binv_(Eigen::MatrixXd::Identity(rows_, rows_)),
        xB_(sf.b),
        priced_(cols_) {
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(r)];
      position_[static_cast<std::size_t>(j)] = r;
      blocked_[j] = kBlocked;
    }
  }

  StageResult optimize(const Eigen::VectorXd& cost) {
    const Eigen::Index dantzig_budget = 5 * (rows_ + cols_) + 50;
    const Eigen::Index hard_cap = 50 * (rows_ + cols_) + 1000;
    bool bland = false;
    Eigen::Index degenerate_run = 0;
    Eigen::VectorXd y(rows_);
    Eigen::VectorXd cB(rows_);
    for (Eigen::Index iter = 0;; ++iter) {
      if (iter >= hard_cap) {
        throw NumericalError("linear program: simplex iteration limit reached");
      }
      if (!bland && (iter >= dantzig_budget || degenerate_run > rows_ + 10)) bland = true;

      for (Eigen::Index r = 0; r < rows_; ++r) cB[r] = cost[basis_[static_cast<std::size_t>(r)]];
      y.noalias() = Binv_.transpose() * cB;

      // Basic and barred columns carry +inf in blocked_ and never enter.
      const double* c = cost.data();
      const double* blk = blocked_.data();
      Eigen::Index entering = -1;
      if (bland) {
        priced_.noalias() = At_ * y;
        const double* p = priced_.data();
        for (Eigen::Index j = 0; j < cols_; ++j) {
          if (blk[j] == 0.0 && c[j] - p[j] < -kLpOptimalityTol) {
            entering = j;
            break;
          }
        }
      } else {
        // Partial pricing: scan fixed sections of columns cyclically, starting
        // with the section of the previous entering column, and take the most
        // negative reduced cost of the first section that has one. Optimality
        // is only declared after a full cycle.
        Eigen::Index start = cursor_;
        for (Eigen::Index scanned = 0; scanned < cols_ && entering < 0;) {
          const Eigen::Index len = std::min(kPricingSection, cols_ - start);
          priced_.segment(start, len).noalias() = At_.middleRows(start, len) * y;
          const double* p = priced_.data();
          double best = -kLpOptimalityTol;
          for (Eigen::Index j = start; j < start + len; ++j) {
            const double d = c[j] - p[j] + blk[j];
            if (d < best) {
              best = d;
              entering = j;
            }
          }
          scanned += len;
          start = start + len == cols_ ? 0 : start + len;
        }
        if (entering >= 0) cursor_ = entering - entering % kPricingSection;
      }
      if (entering < 0) return StageResult::Optimal;

      alpha_.noalias() = Binv_ * A_.col(entering);
      double theta_min = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows_; ++r) {
        if (alpha_[r] > kPivotTol) {
          theta_min = std::min(theta_min, std::max(xB_[r], 0.0) / alpha_[r]);
        }
      }
      if (!std::isfinite(theta_min)) return StageResult::Unbounded;

      Eigen::Index leaving = -1;
      for (Eigen::Index r = 0; r < rows_; ++r) {
        if (alpha_[r] <= kPivotTol) continue;
        const double theta = std::max(xB_[r], 0.0) / alpha_[r];
        if (theta > theta_min + kRatioTieTol) continue;
        if (leaving < 0) {
          leaving = r;
        } else if (bland) {
          if (basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leaving)]) leaving = r;
        } else if (alpha_[r] > alpha_[leaving]) {
          leaving = r;
        }
      }
      const double theta = std::max(xB_[leaving], 0.0) / alpha_[leaving];
      degenerate_run = theta <= kDegenerateStep ? degenerate_run + 1 : 0;
      pivot(entering, leaving, theta);
    }
  }

  double objective(const Eigen::VectorXd& cost) const {
    double v = 0.0;
    for (Eigen::Index r = 0; r < rows_; ++r) v += cost[basis_[static_cast<std::size_t>(r)]] * xB_[r];
    return v;
  }

  // Pivot basic artificial columns out where possible; rows where no
  // structural or slack column has a nonzero entry are redundant and keep
  // their artificial at zero.
  void expel_artificials(Eigen::Index first_artificial) {
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < first_artificial) continue;
      const Eigen::RowVectorXd row = Binv_.row(r) * A_;
      Eigen::Index best = -1;
      double best_abs = kPivotTol;
      for (Eigen::Index j = 0; j < first_artificial; ++j) {
        if (position_[static_cast<std::size_t>(j)] >= 0) continue;
        if (std::abs(row[j]) > best_abs) {
          best_abs = std::abs(row[j]);
          best = j;
        }
      }
      if (best < 0) continue;
      alpha_.noalias() = Binv_ * A_.col(best);
      pivot(best, r, xB_[r] / alpha_[r]);
    }
    for (Eigen::Index j = first_artificial; j < cols_; ++j) bar(j);
  }

  // Restrict to the optimal face of `cost`: nonbasic columns with strictly
  // positive reduced cost must stay at zero.
  void restrict_to_optimal_face(const Eigen::VectorXd& cost) {
    Eigen::VectorXd cB(rows_);
    for (Eigen::Index r = 0; r < rows_; ++r) cB[r] = cost[basis_[static_cast<std::size_t>(r)]];
    const Eigen::VectorXd y = Binv_.transpose() * cB;
    const Eigen::VectorXd d = cost - A_.transpose() * y;
    const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < cols_; ++j) {
      if (position_[static_cast<std::size_t>(j)] < 0 && d[j] > kFaceTol * scale) bar(j);
    }
  }

  // Recompute the basic solution from a fresh factorization and return the
  // full standard-form point.
  Eigen::VectorXd final_point() {
    refactor();
    const double scale = 1.0 + (b_.size() > 0 ? b_.cwiseAbs().maxCoeff() : 0.0);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(cols_);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      double v = xB_[r];
      if (v < -kLpFeasibilityTol * scale) {
        throw NumericalError("linear program: basic solution lost feasibility");
      }
      w[basis_[static_cast<std::size_t>(r)]] = std::max(v, 0.0);
    }
    if (rows_ > 0) {
      const double residual = (A_ * w - b_).cwiseAbs().maxCoeff();
      if (!(residual <= kResidualTol * scale)) {
        throw NumericalError("linear program: primal residual " + std::to_string(residual) +
                             " exceeds tolerance");
      }
    }
    return w;
  }

 private:
  static constexpr double kBlocked = std::numeric_limits<double>::infinity();

  void bar(Eigen::Index j) {
    barred_[static_cast<std::size_t>(j)] = 1;
    blocked_[j] = kBlocked;
  }

  void pivot(Eigen::Index entering, Eigen::Index leaving, double theta) {
    const double a = alpha_[leaving];
    xB_ -= theta * alpha_;
    xB_[leaving] = theta;
    const Eigen::RowVectorXd pivot_row = Binv_.row(leaving) / a;
    Binv_.noalias() -= alpha_ * pivot_row;
    Binv_.row(leaving) = pivot_row;

    const Eigen::Index out = basis_[static_cast<std::size_t>(leaving)];
    position_[static_cast<std::size_t>(out)] = -1;
    blocked_[out] = barred_[static_cast<std::size_t>(out)] ? kBlocked : 0.0;
    basis_[static_cast<std::size_t>(leaving)] = entering;
    position_[static_cast<std::size_t>(entering)] = leaving;
    blocked_[entering] = kBlocked;

    if (++pivots_since_refactor_ >= kRefactorEvery) refactor();
  }

  void refactor() {
    pivots_since_refactor_ = 0;
    if (rows_ == 0) return;
    Eigen::MatrixXd B(rows_, rows_);
    for (Eigen::Index r = 0; r < rows_; ++r) B.col(r) = A_.col(basis_[static_cast<std::size_t>(r)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    const double rcond = lu.rcond();
    if (!(rcond >= kMinRcond)) {
      throw NumericalError("linear program: basis condition estimate beyond 1e14 (rcond " +
                           std::to_string(rcond) + ")");
    }
    Binv_ = lu.inverse();
    xB_.noalias() = Binv_ * b_;
  }

  const Eigen::MatrixXd& A_;
  const Eigen::MatrixXd At_;  // A transposed, so pricing is a column-major product
  const Eigen::VectorXd& b_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> position_;
  std::vector<unsigned char> barred_;
  Eigen::VectorXd blocked_;
  Eigen::MatrixXd Binv_;
  Eigen::VectorXd xB_;
  Eigen::VectorXd priced_;  // A^T y
  Eigen::Index cursor_ = 0;  // first column of the current pricing section
  Eigen::VectorXd alpha_;
  int pivots_since_refactor_ = 0;
};

LpResult solve_impl(const LinearProgram& lp, std::span<const Eigen::VectorXd> tie_breakers) {
  validate(lp);
  for (const auto& t : tie_breakers) {
    if (t.size() != lp.num_variables()) {
      throw ValidationError("linear program: tie-break objective has wrong length");
    }
    check_finite(t, "tie-break objective");
  }

  const StandardForm sf = to_standard_form(lp);
  RevisedSimplex simplex(sf);
  const Eigen::Index cols = sf.A.cols();

  if (sf.first_artificial < cols) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
    phase1.tail(cols - sf.first_artificial).setOnes();
    simplex.optimize(phase1);  // bounded below by zero
    const double scale = 1.0 + sf.b.cwiseAbs().maxCoeff();
    if (simplex.objective(phase1) > kLpFeasibilityTol * scale) {
      return LpResult{LpStatus::Infeasible, {}, 0.0};
    }
    simplex.expel_artificials(sf.first_artificial);
  }

  Eigen::VectorXd cost = sf.map_cost(lp.c);
  if (simplex.optimize(cost) == StageResult::Unbounded) {
    return LpResult{LpStatus::Unbounded, {}, 0.0};
  }
  for (const auto& t : tie_breakers) {
    simplex.restrict_to_optimal_face(cost);
    cost = sf.map_cost(t);
    if (simplex.optimize(cost) == StageResult::Unbounded) {
      return LpResult{LpStatus::Unbounded, {}, 0.0};
    }
  }

  const Eigen::VectorXd w = simplex.final_point();
  LpResult result;
  result.status = LpStatus::Optimal;
  result.z.resize(lp.num_variables());
  for (std::size_t j = 0; j < sf.plus_col.size(); ++j) {
    double v = w[sf.plus_col[j]];
    if (sf.minus_col[j] >= 0) v -= w[sf.minus_col[j]];
    result.z[static_cast<Eigen::Index>(j)] = v;
  }
  result.value = lp.c.dot(result.z);
  return result;
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp) { return solve_impl(lp, {}); }

LpResult solve_lp_lexicographic(const LinearProgram& lp,
                                std::span<const Eigen::VectorXd> tie_breakers) {
  return solve_impl(lp, tie_breakers);
}

}  // namespace swstab
