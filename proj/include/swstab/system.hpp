#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace swstab {

/// One letter of the finite switching alphabet.
struct Mode {
  std::string label;
  std::size_t index = 0;
};

struct ModeDynamics {
  std::string name;
  Eigen::MatrixXd A;  // n x n
  Eigen::MatrixXd B;  // n x m
};

/// Discrete-time switched linear plant x+ = A_i x + B_i u over a finite,
/// ordered family of modes. Immutable once constructed.
class SwitchedSystem {
 public:
  /// Validates shapes, finiteness, label uniqueness and a nonempty family.
  /// Throws ValidationError naming the offending field (e.g. "modes[0].A").
  SwitchedSystem(Eigen::Index n, Eigen::Index m, std::vector<ModeDynamics> modes);

  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }
  std::size_t num_modes() const { return modes_.size(); }

  const Eigen::MatrixXd& A(std::size_t i) const { return modes_.at(i).A; }
  const Eigen::MatrixXd& B(std::size_t i) const { return modes_.at(i).B; }
  const std::vector<ModeDynamics>& modes() const { return modes_; }
  Mode mode(std::size_t i) const { return Mode{modes_.at(i).name, i}; }

  /// A_i x + B_i u. The single place closed-loop steps are computed, so
  /// every simulation path rounds identically.
  Eigen::VectorXd step(std::size_t i, const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;

  friend bool operator==(const SwitchedSystem& a, const SwitchedSystem& b);

 private:
  Eigen::Index n_;
  Eigen::Index m_;
  std::vector<ModeDynamics> modes_;
};

SwitchedSystem load_system(std::istream& in);
SwitchedSystem load_system_text(std::string_view text);
SwitchedSystem load_system_file(const std::string& path);

/// Compact JSON in the system file format; doubles round-trip exactly.
std::string save_system(const SwitchedSystem& system);

/// 64-bit FNV-1a digest of a byte string, as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);

/// content_hash(save_system(system)).
std::string system_hash(const SwitchedSystem& system);

}  // namespace swstab
