#ifndef RAVEN_CORE_GEOMETRY_HPP
#define RAVEN_CORE_GEOMETRY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace raven {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec3 = Vector3<double>;

/// Integer voxel coordinate. Cell (i, j, k) covers [i, i+1) x [j, j+1) x [k, k+1)
/// in world units, so its center is at (i + 0.5, j + 0.5, k + 0.5).
struct GridIndex {
  int i = 0;
  int j = 0;
  int k = 0;

  friend auto operator<=>(const GridIndex&, const GridIndex&) = default;
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

inline GridIndex operator+(GridIndex a, GridIndex b) { return {a.i + b.i, a.j + b.j, a.k + b.k}; }

inline Vec3 cell_center(GridIndex c) { return {c.i + 0.5, c.j + 0.5, c.k + 0.5}; }

inline GridIndex cell_of(const Vec3& p) {
  return {static_cast<int>(std::floor(p.x())), static_cast<int>(std::floor(p.y())),
          static_cast<int>(std::floor(p.z()))};
}

inline Vec3 to_vec(GridIndex c) { return {double(c.i), double(c.j), double(c.k)}; }

/// Dense index space of a world of nx * ny * nz cells, x fastest.
struct GridBounds {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t size() const { return std::size_t(nx) * std::size_t(ny) * std::size_t(nz); }

  bool contains(GridIndex c) const {
    return c.i >= 0 && c.j >= 0 && c.k >= 0 && c.i < nx && c.j < ny && c.k < nz;
  }

  std::int64_t linear(GridIndex c) const {
    return (std::int64_t(c.k) * ny + c.j) * nx + c.i;
  }

  GridIndex unlinear(std::int64_t idx) const {
    const int i = static_cast<int>(idx % nx);
    const std::int64_t rest = idx / nx;
    return {i, static_cast<int>(rest % ny), static_cast<int>(rest / ny)};
  }

  /// Clamp a continuous point into the interior of the bounds (cell centers of the border cells).
  Vec3 clamp(const Vec3& p) const {
    return {std::clamp(p.x(), 0.5, nx - 0.5), std::clamp(p.y(), 0.5, ny - 0.5),
            std::clamp(p.z(), 0.5, nz - 0.5)};
  }

  friend bool operator==(const GridBounds&, const GridBounds&) = default;
};

inline constexpr std::array<GridIndex, 6> kFaceNeighbors = {
    GridIndex{-1, 0, 0}, GridIndex{1, 0, 0}, GridIndex{0, -1, 0},
    GridIndex{0, 1, 0},  GridIndex{0, 0, -1}, GridIndex{0, 0, 1}};

/// The 26 offsets of the full 3x3x3 neighborhood, in lexicographic (i, j, k) order.
inline constexpr std::array<GridIndex, 26> kAllNeighbors = [] {
  std::array<GridIndex, 26> out{};
  std::size_t n = 0;
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj)
      for (int dk = -1; dk <= 1; ++dk)
        if (di != 0 || dj != 0 || dk != 0) out[n++] = GridIndex{di, dj, dk};
  return out;
}();

/// Robot pose. `heading` is a unit vector; the sensor only uses its yaw.
struct Pose {
  Vec3 position = Vec3::Zero();
  Vec3 heading = Vec3::UnitX();

  static Pose from_yaw(const Vec3& position, double yaw_rad) {
    return {position, Vec3(std::cos(yaw_rad), std::sin(yaw_rad), 0.0)};
  }

  double yaw() const {
    if (std::hypot(heading.x(), heading.y()) < 1e-12) return 0.0;
    return std::atan2(heading.y(), heading.x());
  }
};

inline constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Lexicographic ordering on points, used for deterministic tie-breaking.
template <typename DerivedA, typename DerivedB>
bool lex_less(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  for (Eigen::Index r = 0; r < a.size(); ++r) {
    if (a(r) < b(r)) return true;
    if (b(r) < a(r)) return false;
  }
  return false;
}

/// Cosine of the angle between two nonzero vectors. Throws on zero-norm input.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (!(na > Scalar(0)) || !(nb > Scalar(0)))
    throw std::invalid_argument("cosine_similarity: zero-norm input");
  const Scalar c = a.dot(b) / (na * nb);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

/// Euclidean distance from a point to the closed axis-aligned box [lo, hi].
template <typename Derived>
typename Derived::Scalar distance_to_box(const Eigen::MatrixBase<Derived>& p,
                                         const Vector3<typename Derived::Scalar>& lo,
                                         const Vector3<typename Derived::Scalar>& hi) {
  using Scalar = typename Derived::Scalar;
  const Vector3<Scalar> below = (lo - p).cwiseMax(Scalar(0));
  const Vector3<Scalar> above = (p - hi).cwiseMax(Scalar(0));
  return (below + above).norm();
}

}  // namespace raven

#endif  // RAVEN_CORE_GEOMETRY_HPP
