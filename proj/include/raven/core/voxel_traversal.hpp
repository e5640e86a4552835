#ifndef RAVEN_CORE_VOXEL_TRAVERSAL_HPP
#define RAVEN_CORE_VOXEL_TRAVERSAL_HPP

#include "raven/core/geometry.hpp"

#include <limits>

namespace raven {

/// Amanatides-Woo grid walk. Visits every cell pierced by the ray, in order,
/// starting with the cell containing `origin`. The visitor receives the cell and
/// the ray parameter at which the ray enters it (0 for the first cell) and returns
/// false to stop. Walking stops on its own when the ray leaves `bounds` or passes
/// `max_t`.
template <typename Visitor>
void traverse_voxels(const Vec3& origin, const Vec3& dir, double max_t, const GridBounds& bounds,
                     Visitor&& visit) {
  GridIndex cell = cell_of(origin);
  if (!bounds.contains(cell)) return;

  constexpr double inf = std::numeric_limits<double>::infinity();
  int step[3];
  double t_max[3];
  double t_delta[3];
  int* coord[3] = {&cell.i, &cell.j, &cell.k};
  for (int a = 0; a < 3; ++a) {
    const double d = dir(a);
    const double c = *coord[a];
    if (d > 0) {
      step[a] = 1;
      t_max[a] = (c + 1.0 - origin(a)) / d;
      t_delta[a] = 1.0 / d;
    } else if (d < 0) {
      step[a] = -1;
      t_max[a] = (c - origin(a)) / d;
      t_delta[a] = -1.0 / d;
    } else {
      step[a] = 0;
      t_max[a] = inf;
      t_delta[a] = inf;
    }
  }

  double t_enter = 0.0;
  while (true) {
    if (!visit(cell, t_enter)) return;
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    t_enter = t_max[axis];
    if (t_enter > max_t) return;
    *coord[axis] += step[axis];
    t_max[axis] += t_delta[axis];
    if (!bounds.contains(cell)) return;
  }
}

}  // namespace raven

#endif  // RAVEN_CORE_VOXEL_TRAVERSAL_HPP
