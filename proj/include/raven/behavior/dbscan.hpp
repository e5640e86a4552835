#ifndef RAVEN_BEHAVIOR_DBSCAN_HPP
#define RAVEN_BEHAVIOR_DBSCAN_HPP

#include "raven/core/geometry.hpp"

#include <span>
#include <vector>

namespace raven {

inline constexpr int kNoise = -1;

/// Plain DBSCAN. A point is core when at least `min_samples` points (itself
/// included) lie within `eps`. Clusters are numbered in the order their first core
/// point appears in the input, so the labeling depends only on input order.
std::vector<int> dbscan(std::span<const Vec3> points, double eps, int min_samples);

/// Same labeling as dbscan() over the cell centers, using a dense lookup over
/// `bounds` instead of a spatial hash. Cells must be distinct and inside bounds.
std::vector<int> dbscan_cells(std::span<const GridIndex> cells, const GridBounds& bounds, double eps,
                              int min_samples);

}  // namespace raven

#endif  // RAVEN_BEHAVIOR_DBSCAN_HPP
