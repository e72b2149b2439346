#pragma once

#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include "pjinv/linalg.hpp"

namespace pjinv {

// Seed splitting: every consumer derives its stream from the run seed, a
// fixed tag naming the consumer, and an index, through SplitMix64. Streams
// therefore do not depend on call order.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ hash_tag(tag)) + index);
}

inline std::uint64_t hash_vector(const Vector& v) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double d = v(i);
    if (d == 0.0) d = 0.0;  // fold -0
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    h = splitmix64(h ^ bits);
  }
  return h;
}

/// Portable random stream: mt19937_64 bits converted by hand, so sequences
/// are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Vector unit_vector(Eigen::Index n) {
    for (;;) {
      Vector v = normal_vector(n);
      const double norm = v.norm();
      if (norm > 1e-12) return v / norm;
    }
  }

  /// Uniform point in the closed unit ball.
  Vector ball_point(Eigen::Index n) {
    const double r = std::pow(uniform(), 1.0 / static_cast<double>(n));
    return r * unit_vector(n);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seeded direction sets on the unit sphere of R^n. n <= 3 uses
/// low-discrepancy constructions (antipodal pair, rotated uniform angles,
/// randomly rotated Fibonacci lattice); higher n uses normalised Gaussians.
inline std::vector<Vector> sphere_points(Eigen::Index n, int count, std::uint64_t seed) {
  std::vector<Vector> out;
  if (count <= 0) return out;
  out.reserve(static_cast<std::size_t>(count));
  Rng rng(seed);
  if (n == 1) {
    for (int k = 0; k < count; ++k) out.push_back(Vector::Constant(1, k % 2 == 0 ? 1.0 : -1.0));
  } else if (n == 2) {
    const double offset = rng.uniform();
    for (int k = 0; k < count; ++k) {
      const double theta = 2.0 * std::numbers::pi * (k + offset) / count;
      Vector u(2);
      u << std::cos(theta), std::sin(theta);
      out.push_back(u);
    }
  } else if (n == 3) {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    const Eigen::Matrix3d rot = q.toRotationMatrix();
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * k;
      Eigen::Vector3d p(r * std::cos(phi), r * std::sin(phi), z);
      out.push_back(Vector(rot * p));
    }
  } else {
    for (int k = 0; k < count; ++k) out.push_back(rng.unit_vector(n));
  }
  return out;
}

}  // namespace pjinv
