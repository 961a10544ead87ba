#include "swstab/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swstab/errors.hpp"

namespace swstab {

namespace {

void require_converged(const Certificate& cert, bool mode_dependent, const char* who) {
  if (!cert.converged()) throw ValidationError(std::string(who) + ": certificate not converged");
  if (cert.mode_dependent != mode_dependent) {
    throw ValidationError(std::string(who) + (mode_dependent ? ": certificate is mode-independent"
                                                             : ": certificate is mode-dependent"));
  }
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

Eigen::VectorXd extract_feedback(const Certificate& cert, const SwitchedSystem& system, const Eigen::VectorXd& x) {
  require_converged(cert, false, "extract_feedback");
  if (x.size() != system.n()) throw ValidationError("extract_feedback: state has wrong dimension");
  return bellman_independent(cert.norm, system, x).u_star;
}

Eigen::VectorXd extract_feedback_dependent(const Certificate& cert, const SwitchedSystem& system, std::size_t mode,
                                           const Eigen::VectorXd& x) {
  require_converged(cert, true, "extract_feedback_dependent");
  if (x.size() != system.n()) throw ValidationError("extract_feedback_dependent: state has wrong dimension");
  return bellman_mode(cert.norm, system, mode, x).u_star;
}

// --- sector controller -----------------------------------------------------

SectorLinearController2D::SectorLinearController2D(std::vector<Eigen::Vector2d> polygon,
                                                   std::vector<std::vector<Eigen::VectorXd>> gains,
                                                   bool mode_dependent)
    : polygon_(std::move(polygon)), gains_(std::move(gains)), mode_dependent_(mode_dependent) {
  if (polygon_.size() < 4 || polygon_.size() % 2 != 0) {
    throw ValidationError("sector controller: polygon must have an even number (>= 4) of vertices");
  }
  if (gains_.empty()) throw ValidationError("sector controller: no gain tables");
  for (const auto& table : gains_) {
    if (table.size() != polygon_.size()) throw ValidationError("sector controller: gain table size mismatch");
  }
  angles_.reserve(polygon_.size());
  for (const auto& q : polygon_) angles_.push_back(polar_angle(q.x(), q.y()));
  if (!std::is_sorted(angles_.begin(), angles_.end())) {
    throw ValidationError("sector controller: polygon not in angular order");
  }
}

const Eigen::VectorXd& SectorLinearController2D::gain(std::size_t mode, std::size_t j) const {
  return gains_.at(mode_dependent_ ? mode : 0).at(j);
}

std::size_t SectorLinearController2D::locate(const Eigen::Vector2d& x, double& a, double& b) const {
  const std::size_t k = polygon_.size();
  const double ang = polar_angle(x.x(), x.y());
  auto it = std::upper_bound(angles_.begin(), angles_.end(), ang);
  const std::size_t guess = it == angles_.begin() ? k - 1 : static_cast<std::size_t>(it - angles_.begin()) - 1;

  // Angle rounding can put x one sector off near a boundary; neighbours are
  // tried before giving up.
  for (std::size_t offset : {std::size_t{0}, std::size_t{1}, k - 1}) {
    const std::size_t j = (guess + offset) % k;
    const Eigen::Vector2d& q0 = polygon_[j];
    const Eigen::Vector2d& q1 = polygon_[(j + 1) % k];
    const double det = cross(q0, q1);
    const double alpha = cross(x, q1) / det;
    const double beta = cross(q0, x) / det;
    const double slack = 1e-12 * (std::abs(alpha) + std::abs(beta));
    if (alpha >= -slack && beta >= -slack) {
      a = alpha;
      b = beta;
      return j;
    }
  }
  throw InvariantError("sector controller: sector decomposition failed");
}

Eigen::VectorXd SectorLinearController2D::operator()(std::size_t mode, const Eigen::VectorXd& x) const {
  if (x.size() != 2) throw ValidationError("sector controller: state must be planar");
  const Eigen::Index m = gains_.front().front().size();
  if (x.isZero(0.0)) return Eigen::VectorXd::Zero(m);
  double a = 0.0;
  double b = 0.0;
  const std::size_t j = locate(Eigen::Vector2d(x[0], x[1]), a, b);
  return a * gain(mode, j) + b * gain(mode, (j + 1) % polygon_.size());
}

Eigen::VectorXd SectorLinearController2D::operator()(const Eigen::VectorXd& x) const {
  if (mode_dependent_) throw ValidationError("sector controller: mode-dependent controller needs a mode");
  return (*this)(0, x);
}

SectorLinearController2D build_sector_controller_2d(const Certificate& cert, const SwitchedSystem& system) {
  if (!cert.converged()) throw ValidationError("build_sector_controller_2d: certificate not converged");
  if (system.n() != 2 || cert.norm.dim() != 2) throw ValidationError("build_sector_controller_2d: requires n = 2");
  if (!cert.norm.is_convex_polygon()) {
    throw ValidationError("build_sector_controller_2d: certificate ball is not a convex polygon");
  }
  const std::vector<Eigen::Vector2d> poly = polygon_2d(cert.norm);
  const std::size_t half = cert.norm.size();
  const std::size_t tables = cert.mode_dependent ? system.num_modes() : 1;
  std::vector<std::vector<Eigen::VectorXd>> gains(tables, std::vector<Eigen::VectorXd>(poly.size()));
  for (std::size_t t = 0; t < tables; ++t) {
    for (std::size_t j = 0; j < half; ++j) {
      const Eigen::VectorXd& p = cert.norm.vertices()[j];
      Eigen::VectorXd u = cert.mode_dependent ? extract_feedback_dependent(cert, system, t, p)
                                              : extract_feedback(cert, system, p);
      gains[t][j + half] = -u;
      gains[t][j] = std::move(u);
    }
  }
  return SectorLinearController2D(poly, std::move(gains), cert.mode_dependent);
}

// --- static controllers ------------------------------------------------------

MemorylessController::MemorylessController(std::shared_ptr<const Certificate> cert,
                                           std::shared_ptr<const SwitchedSystem> system, FeedbackStrategy strategy)
    : cert_(std::move(cert)), system_(std::move(system)), strategy_(strategy) {
  if (!cert_ || !system_) throw ValidationError("MemorylessController: null certificate or system");
  require_converged(*cert_, false, "MemorylessController");
  if (cert_->norm.dim() != system_->n()) throw ValidationError("MemorylessController: dimension mismatch");
  if (strategy_ == FeedbackStrategy::SectorLinear2D) {
    sector_ = std::make_shared<const SectorLinearController2D>(build_sector_controller_2d(*cert_, *system_));
  }
}

Eigen::VectorXd MemorylessController::operator()(const Eigen::VectorXd& x) const {
  if (sector_) return (*sector_)(x);
  return extract_feedback(*cert_, *system_, x);
}

ModeDependentController::ModeDependentController(std::shared_ptr<const Certificate> cert,
                                                 std::shared_ptr<const SwitchedSystem> system,
                                                 FeedbackStrategy strategy)
    : cert_(std::move(cert)), system_(std::move(system)), strategy_(strategy) {
  if (!cert_ || !system_) throw ValidationError("ModeDependentController: null certificate or system");
  require_converged(*cert_, true, "ModeDependentController");
  if (cert_->norm.dim() != system_->n()) throw ValidationError("ModeDependentController: dimension mismatch");
  if (strategy_ == FeedbackStrategy::SectorLinear2D) {
    sector_ = std::make_shared<const SectorLinearController2D>(build_sector_controller_2d(*cert_, *system_));
  }
}

Eigen::VectorXd ModeDependentController::operator()(std::size_t mode, const Eigen::VectorXd& x) const {
  if (sector_) return (*sector_)(mode, x);
  return extract_feedback_dependent(*cert_, *system_, mode, x);
}

// --- memory controllers ------------------------------------------------------

Eigen::VectorXd MemoryController::evaluate(std::span<const Eigen::VectorXd> states,
                                           std::span<const std::size_t> modes) {
  if (states.empty()) throw ValidationError("memory controller: empty state history");
  const std::size_t expected = kind() == ControllerKind::CurrentModeIndependent ? states.size() - 1 : states.size();
  if (modes.size() != expected) {
    throw ValidationError(std::string("memory controller: ") + to_string(kind()) + " expects " +
                          std::to_string(expected) + " modes for " + std::to_string(states.size()) +
                          " states, got " + std::to_string(modes.size()));
  }
  return evaluate_history(states, modes);
}

namespace {

class FunctionController final : public MemoryController {
 public:
  FunctionController(ControllerKind kind, HistoryFeedback f) : kind_(kind), f_(std::move(f)) {}
  ControllerKind kind() const override { return kind_; }

 protected:
  Eigen::VectorXd evaluate_history(std::span<const Eigen::VectorXd> states,
                                   std::span<const std::size_t> modes) override {
    return f_(states, modes);
  }

 private:
  ControllerKind kind_;
  HistoryFeedback f_;
};

class LiftedMemoryless final : public MemoryController {
 public:
  explicit LiftedMemoryless(MemorylessController c) : c_(std::move(c)) {}
  ControllerKind kind() const override { return ControllerKind::CurrentModeIndependent; }

 protected:
  Eigen::VectorXd evaluate_history(std::span<const Eigen::VectorXd> states,
                                   std::span<const std::size_t>) override {
    return c_(states.back());
  }

 private:
  MemorylessController c_;
};

class LiftedModeDependent final : public MemoryController {
 public:
  explicit LiftedModeDependent(ModeDependentController c) : c_(std::move(c)) {}
  ControllerKind kind() const override { return ControllerKind::CurrentModeDependent; }

 protected:
  Eigen::VectorXd evaluate_history(std::span<const Eigen::VectorXd> states,
                                   std::span<const std::size_t> modes) override {
    return c_(modes.back(), states.back());
  }

 private:
  ModeDependentController c_;
};

class ScaledController final : public MemoryController {
 public:
  ScaledController(MemoryControllerPtr inner, double lambda) : inner_(std::move(inner)), lambda_(lambda) {}
  ControllerKind kind() const override { return inner_->kind(); }

 protected:
  Eigen::VectorXd evaluate_history(std::span<const Eigen::VectorXd> states,
                                   std::span<const std::size_t> modes) override {
    scaled_.resize(states.size());
    for (std::size_t j = 0; j < states.size(); ++j) scaled_[j] = states[j] / lambda_;
    return lambda_ * inner_->evaluate(scaled_, modes);
  }

 private:
  MemoryControllerPtr inner_;
  double lambda_;
  std::vector<Eigen::VectorXd> scaled_;
};

class SumController final : public MemoryController {
 public:
  SumController(MemoryControllerPtr psi1, Eigen::VectorXd z1, MemoryControllerPtr psi2, Eigen::VectorXd z2,
                std::shared_ptr<const SwitchedSystem> system)
      : psi1_(std::move(psi1)), psi2_(std::move(psi2)), system_(std::move(system)) {
    virtual1_.push_back(std::move(z1));
    virtual2_.push_back(std::move(z2));
  }

  ControllerKind kind() const override { return psi1_->kind(); }

 protected:
  Eigen::VectorXd evaluate_history(std::span<const Eigen::VectorXd> states,
                                   std::span<const std::size_t> modes) override {
    const std::size_t k = states.size() - 1;
    if (committed_.size() > k) {
      throw InvariantError("sum controller: queried at step " + std::to_string(k) + " after step " +
                           std::to_string(committed_.size()));
    }
    for (std::size_t j = 0; j < committed_.size(); ++j) {
      if (committed_[j] != modes[j]) {
        throw InvariantError("sum controller: mode history changed at step " + std::to_string(j));
      }
    }
    while (committed_.size() < k) {
      const std::size_t j = committed_.size();
      const std::size_t mode = modes[j];
      const auto inner_modes = modes.first(inner_mode_count(j));
      const Eigen::VectorXd u1 = psi1_->evaluate(std::span(virtual1_).first(j + 1), inner_modes);
      const Eigen::VectorXd u2 = psi2_->evaluate(std::span(virtual2_).first(j + 1), inner_modes);
      virtual1_.push_back(system_->step(mode, virtual1_[j], u1));
      virtual2_.push_back(system_->step(mode, virtual2_[j], u2));
      committed_.push_back(mode);
    }
    const auto inner_modes = modes.first(inner_mode_count(k));
    return psi1_->evaluate(virtual1_, inner_modes) + psi2_->evaluate(virtual2_, inner_modes);
  }

 private:
  std::size_t inner_mode_count(std::size_t step) const {
    return kind() == ControllerKind::CurrentModeIndependent ? step : step + 1;
  }

  MemoryControllerPtr psi1_;
  MemoryControllerPtr psi2_;
  std::shared_ptr<const SwitchedSystem> system_;
  std::vector<Eigen::VectorXd> virtual1_;
  std::vector<Eigen::VectorXd> virtual2_;
  std::vector<std::size_t> committed_;
};

}  // namespace

MemoryControllerPtr make_memory_controller(ControllerKind kind, HistoryFeedback feedback) {
  if (!feedback) throw ValidationError("make_memory_controller: empty feedback");
  return std::make_shared<FunctionController>(kind, std::move(feedback));
}

MemoryControllerPtr lift_memoryless(const MemorylessController& controller) {
  return std::make_shared<LiftedMemoryless>(controller);
}

MemoryControllerPtr lift_memoryless(const ModeDependentController& controller) {
  return std::make_shared<LiftedModeDependent>(controller);
}

MemoryControllerPtr scale_controller(MemoryControllerPtr psi, double lambda) {
  if (!psi) throw ValidationError("scale_controller: null controller");
  if (lambda == 0.0 || !std::isfinite(lambda)) throw ValidationError("scale_controller: lambda must be nonzero");
  return std::make_shared<ScaledController>(std::move(psi), lambda);
}

MemoryControllerPtr sum_controller(MemoryControllerPtr psi1, Eigen::VectorXd z1, MemoryControllerPtr psi2,
                                   Eigen::VectorXd z2, std::shared_ptr<const SwitchedSystem> system) {
  if (!psi1 || !psi2 || !system) throw ValidationError("sum_controller: null argument");
  if (psi1->kind() != psi2->kind()) throw ValidationError("sum_controller: controllers differ in kind");
  if (z1.size() != system->n() || z2.size() != system->n()) {
    throw ValidationError("sum_controller: initial states have wrong dimension");
  }
  return std::make_shared<SumController>(std::move(psi1), std::move(z1), std::move(psi2), std::move(z2),
                                         std::move(system));
}

}  // namespace swstab
