#include "swstab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json_util.hpp"
#include "random_util.hpp"
#include "swstab/errors.hpp"

namespace swstab {

using detail::json;

NormAxiomsReport check_norm_axioms(const BalancedPolytopeNorm& norm, int sample_count, std::uint64_t seed) {
  NormAxiomsReport rep;
  std::mt19937_64 rng(seed);
  const Eigen::Index n = norm.dim();
  const double scales[] = {-2.0, -1.0, 0.5, 3.0};
  rep.min_value = std::numeric_limits<double>::infinity();

  for (int s = 0; s < sample_count; ++s) {
    Eigen::VectorXd x = detail::gaussian_vector(rng, n);
    const Eigen::VectorXd y = detail::gaussian_vector(rng, n);
    if (x.isZero(0.0)) continue;
    x /= x.norm();

    const double vx = gauge_evaluate(norm, x);
    rep.min_value = std::min(rep.min_value, vx);
    if (!(vx > 0.0)) rep.positive_definite = false;

    const double lambda = scales[static_cast<std::size_t>(s) % std::size(scales)];
    const double vlx = gauge_evaluate(norm, lambda * x);
    const double hom = std::abs(vlx - std::abs(lambda) * vx);
    rep.worst_homogeneity = std::max(rep.worst_homogeneity, hom / vx);
    if (hom > 1e-9 * vx) rep.homogeneity = false;

    const double gap = gauge_evaluate(norm, x + y) - vx - gauge_evaluate(norm, y);
    rep.worst_subadditivity = std::max(rep.worst_subadditivity, gap);
    if (gap > 1e-9) rep.subadditivity = false;
  }

  if (n == 2) {
    rep.convexity_checked = true;
    const auto cyc = polygon_2d(norm);
    const std::size_t k = cyc.size();
    for (std::size_t j = 0; j < k; ++j) {
      const Eigen::Vector2d a = cyc[j] - cyc[(j + k - 1) % k];
      const Eigen::Vector2d b = cyc[(j + 1) % k] - cyc[j];
      const double turn = (a.x() * b.y() - a.y() * b.x()) / (a.norm() * b.norm());
      rep.worst_turn = std::min(rep.worst_turn, turn);
      if (turn < -1e-12) rep.convexity = false;
    }
  }
  return rep;
}

double bellman_residual(const Certificate& cert, const SwitchedSystem& system, int test_directions) {
  if (!cert.converged()) throw ValidationError("bellman_residual: certificate not converged");
  double worst = 0.0;
  for (const auto& d : direction_grid(system.n(), test_directions)) {
    const double t = cert.mode_dependent ? bellman_dependent(cert.norm, system, d, InputSelection::AnyOptimal).value
                                         : bellman_independent(cert.norm, system, d, InputSelection::AnyOptimal).value;
    const double v = cert.norm(d);
    worst = std::max(worst, std::abs(t - v) / v);
  }
  return worst;
}

namespace {

void check_sector_inputs(const Certificate& cert, const SectorLinearController2D& controller,
                         const SwitchedSystem& system) {
  if (!cert.converged() || !cert.rho) throw ValidationError("sector certificate: certificate not converged");
  if (!(*cert.rho < 1.0)) throw ValidationError("sector certificate: certificate has rho >= 1");
  if (system.n() != 2 || cert.norm.dim() != 2) throw ValidationError("sector certificate: requires n = 2");
  if (controller.polygon() != polygon_2d(cert.norm)) {
    throw ValidationError("sector certificate: controller and certificate vertex sets differ");
  }
  if (controller.mode_dependent() != cert.mode_dependent) {
    throw ValidationError("sector certificate: controller and certificate differ in mode dependence");
  }
}

}  // namespace

SectorCertificate verify_sector_certificate_2d(const Certificate& cert, const SectorLinearController2D& controller,
                                               const SwitchedSystem& system) {
  check_sector_inputs(cert, controller, system);
  const auto& poly = controller.polygon();
  SectorCertificate out;
  for (std::size_t j = 0; j < poly.size(); ++j) {
    const Eigen::VectorXd q = poly[j];
    const double vq = cert.norm(q);
    for (std::size_t i = 0; i < system.num_modes(); ++i) {
      const double r = cert.norm(system.step(i, q, controller.gain(i, j))) / vq;
      out.worst_sector_ratio = std::max(out.worst_sector_ratio, r);
    }
  }
  out.pass = out.worst_sector_ratio < 1.0;
  return out;
}

double sector_sampled_ratio(const Certificate& cert, const SectorLinearController2D& controller,
                            const SwitchedSystem& system, int samples_per_sector) {
  check_sector_inputs(cert, controller, system);
  const auto& poly = controller.polygon();
  const std::size_t k = poly.size();
  double worst = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    for (int s = 1; s <= samples_per_sector; ++s) {
      const double t = static_cast<double>(s) / (samples_per_sector + 1);
      const Eigen::VectorXd x = (1.0 - t) * poly[j] + t * poly[(j + 1) % k];
      const double vx = cert.norm(x);
      for (std::size_t i = 0; i < system.num_modes(); ++i) {
        const Eigen::VectorXd u = controller.mode_dependent() ? controller(i, x) : controller(x);
        worst = std::max(worst, cert.norm(system.step(i, x, u)) / vx);
      }
    }
  }
  return worst;
}

bool CertReport::pass() const {
  return norm_axioms.pass() && residual_check && gamma_bound_check && rho_consistent && rho_certificate < 1.0 &&
         (!sector_certificate || sector_certificate->pass);
}

CertReport certify(const Certificate& cert, const SwitchedSystem& system, const CertifyOptions& options) {
  if (!cert.converged() || !cert.rho || !cert.c2) throw ValidationError("certify: certificate not converged");
  if (cert.system_hash != system_hash(system)) {
    throw ValidationError("certify: certificate was issued for a different system (hash mismatch)");
  }
  if (cert.norm.dim() != system.n()) throw ValidationError("certify: dimension mismatch");

  CertReport rep;
  rep.sampled = cert.sampled;
  rep.rho_certificate = *cert.rho;
  rep.c2 = *cert.c2;
  rep.norm_axioms = check_norm_axioms(cert.norm, options.axiom_samples, options.seed);

  const int test = options.test_directions > 0 ? options.test_directions : 2 * cert.directions;
  rep.bellman_residual_max = bellman_residual(cert, system, test);
  rep.residual_check = rep.bellman_residual_max <= options.residual_tol;

  const auto grid = direction_grid(system.n(), 2 * cert.directions);
  rep.rho_recomputed = contraction_factor(cert.norm, system, cert.mode_dependent, grid);
  rep.rho_consistent = std::abs(rep.rho_recomputed - *cert.rho) <= 1e-6;
  rep.gamma_bound_check = *cert.rho <= cert.gamma_bound() + 1e-6;

  if (system.n() == 2 && cert.norm.is_convex_polygon() && *cert.rho < 1.0) {
    const SectorLinearController2D sector = build_sector_controller_2d(cert, system);
    rep.sector_certificate = verify_sector_certificate_2d(cert, sector, system);
  }
  return rep;
}

std::string cert_report_to_json(const CertReport& report, const std::string& system_hash,
                                const std::string& certificate_hash) {
  json doc;
  doc["tool_version"] = kToolVersion;
  doc["system_hash"] = system_hash;
  doc["certificate_hash"] = certificate_hash;
  const auto& na = report.norm_axioms;
  doc["norm_axioms"] = {
      {"pass", na.pass()},
      {"positive_definite", na.positive_definite},
      {"homogeneity", na.homogeneity},
      {"subadditivity", na.subadditivity},
      {"convexity", na.convexity_checked ? json(na.convexity) : json(nullptr)},
      {"min_value", na.min_value},
      {"worst_homogeneity", na.worst_homogeneity},
      {"worst_subadditivity", na.worst_subadditivity},
      {"worst_turn", na.worst_turn},
  };
  doc["bellman_residual_max"] = report.bellman_residual_max;
  doc["residual_check"] = report.residual_check;
  doc["rho_recomputed"] = report.rho_recomputed;
  doc["rho"] = report.rho_certificate;
  doc["rho_consistent"] = report.rho_consistent;
  doc["c2"] = report.c2;
  doc["gamma_bound_check"] = report.gamma_bound_check;
  if (report.sector_certificate) {
    doc["sector_certificate"] = {{"pass", report.sector_certificate->pass},
                                 {"worst_sector_ratio", report.sector_certificate->worst_sector_ratio}};
  } else {
    doc["sector_certificate"] = nullptr;
  }
  doc["sampled"] = report.sampled;
  doc["pass"] = report.pass();
  return doc.dump(2) + "\n";
}

}  // namespace swstab
