#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace swstab::detail {

// Distribution code is spelled out so that draws are identical across
// standard library implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = standard_normal(rng);
  return g;
}

// Uniform on the Euclidean ball of the given radius.
inline Eigen::VectorXd uniform_in_ball(std::mt19937_64& rng, Eigen::Index n, double radius) {
  Eigen::VectorXd g = gaussian_vector(rng, n);
  double norm = g.norm();
  while (norm == 0.0) {
    g = gaussian_vector(rng, n);
    norm = g.norm();
  }
  const double r = radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(n));
  return g * (r / norm);
}

}  // namespace swstab::detail
