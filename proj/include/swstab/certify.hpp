#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "swstab/bellman.hpp"
#include "swstab/controllers.hpp"
#include "swstab/polytope_norm.hpp"
#include "swstab/system.hpp"

namespace swstab {

struct NormAxiomsReport {
  bool positive_definite = true;  // V(x) > 0 on every nonzero sample
  bool homogeneity = true;        // |V(l x) - |l| V(x)| <= 1e-9 V(x)
  bool subadditivity = true;      // V(x + y) <= V(x) + V(y) + 1e-9
  bool convexity = true;          // planar only: stored polygon turns left (cross >= -1e-12)
  bool convexity_checked = false;
  double min_value = 0.0;           // smallest V over the unit-length samples
  double worst_homogeneity = 0.0;   // largest relative homogeneity defect
  double worst_subadditivity = 0.0; // largest V(x+y) - V(x) - V(y)
  double worst_turn = 0.0;          // most negative normalized cross product

  bool pass() const { return positive_definite && homogeneity && subadditivity && convexity; }
};

/// Seeded sampled check of the norm axioms on the LP gauge, plus an exact
/// convexity check of the stored polygon when dim == 2.
NormAxiomsReport check_norm_axioms(const BalancedPolytopeNorm& norm, int sample_count, std::uint64_t seed);

/// max over `test_directions` grid directions of |T V^(d) - V^(d)| / V^(d),
/// with T the Bellman operator matching cert.mode_dependent.
double bellman_residual(const Certificate& cert, const SwitchedSystem& system, int test_directions);

struct SectorCertificate {
  bool pass = false;
  double worst_sector_ratio = 0.0;
};

/// Sound planar decrease certificate for a sector controller: for every
/// sector [q_j, q_{j+1}] and mode i the ratio
/// max(V^(A_i q_j + B_i u_j), V^(A_i q_{j+1} + B_i u_{j+1})) bounds
/// V^(x+)/V^(x) on the whole cone because the closed loop is linear there and
/// V^ is linear on the face through q_j, q_{j+1}. Passes iff the worst ratio
/// is below 1.
///
/// Throws ValidationError if the certificate is not converged, has rho >= 1,
/// or its polygon differs from the controller's.
SectorCertificate verify_sector_certificate_2d(const Certificate& cert, const SectorLinearController2D& controller,
                                               const SwitchedSystem& system);

/// Dense cross-check of the sector bound: the largest V^(x+)/V^(x) over
/// `samples_per_sector` points inside every sector and every mode.
double sector_sampled_ratio(const Certificate& cert, const SectorLinearController2D& controller,
                            const SwitchedSystem& system, int samples_per_sector);

struct CertifyOptions {
  int test_directions = 0;  // 0: twice the synthesis grid
  int axiom_samples = 200;
  std::uint64_t seed = 0;
  double residual_tol = 5e-3;
};

struct CertReport {
  NormAxiomsReport norm_axioms;
  double bellman_residual_max = 0.0;
  double rho_recomputed = 0.0;
  double rho_certificate = 0.0;
  double c2 = 0.0;
  std::optional<SectorCertificate> sector_certificate;  // n = 2 only
  bool gamma_bound_check = false;                       // rho <= 1 - 1/c2 + 1e-6
  bool residual_check = false;                          // residual <= residual_tol
  bool rho_consistent = false;                          // |rho_recomputed - rho| <= 1e-6
  bool sampled = false;                                 // n >= 3: sampled checks only, not sound

  bool pass() const;
};

/// Full a-posteriori validation of a converged certificate against its
/// system. Throws ValidationError when the certificate is not converged or
/// was issued for a different system.
CertReport certify(const Certificate& cert, const SwitchedSystem& system, const CertifyOptions& options = {});

/// Report file (JSON) mirroring CertReport, with tool version and input hashes.
std::string cert_report_to_json(const CertReport& report, const std::string& system_hash,
                                const std::string& certificate_hash);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace swstab
