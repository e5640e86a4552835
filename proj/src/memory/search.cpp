#include "raven/memory/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace raven {

namespace {

double best_similarity(const Embedding& f, std::span<const Query> queries) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Query& q : queries) best = std::max(best, cosine_similarity(f, q.vector));
  return best;
}

std::int64_t pack(GridIndex c) {
  constexpr std::int64_t kOff = 1 << 20;
  return ((std::int64_t(c.i) + kOff) << 42) | ((std::int64_t(c.j) + kOff) << 21) | (std::int64_t(c.k) + kOff);
}

}  // namespace

std::vector<GridIndex> query_voxels(const SemanticVoxelMap& mem, std::span<const Query> queries, double eps) {
  std::vector<GridIndex> out;
  if (queries.empty()) return out;
  for (const auto& [idx, acc] : mem.features()) {
    const Embedding f = acc.mean();
    for (const Query& q : queries) {
      if (cosine_similarity(f, q.vector) > eps) {
        out.push_back(mem.bounds().unlinear(idx));
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VoxelCluster> cluster_voxels(std::span<const GridIndex> filtered, int tau_min) {
  if (tau_min < 1) throw std::invalid_argument("tau_min must be >= 1");
  std::vector<GridIndex> cells(filtered.begin(), filtered.end());
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  std::unordered_set<std::int64_t> pending;
  pending.reserve(cells.size() * 2);
  for (const GridIndex& c : cells) pending.insert(pack(c));

  std::vector<VoxelCluster> out;
  std::deque<GridIndex> queue;
  for (const GridIndex& seed : cells) {
    if (!pending.erase(pack(seed))) continue;
    VoxelCluster cl;
    queue.push_back(seed);
    while (!queue.empty()) {
      const GridIndex c = queue.front();
      queue.pop_front();
      cl.cells.push_back(c);
      for (const GridIndex& d : kAllNeighbors) {
        const GridIndex n = c + d;
        if (pending.erase(pack(n))) queue.push_back(n);
      }
    }
    if (cl.cells.size() < std::size_t(tau_min)) continue;
    std::sort(cl.cells.begin(), cl.cells.end());
    cl.min_cell = cl.max_cell = cl.cells.front();
    for (const GridIndex& c : cl.cells) {
      cl.min_cell = {std::min(cl.min_cell.i, c.i), std::min(cl.min_cell.j, c.j), std::min(cl.min_cell.k, c.k)};
      cl.max_cell = {std::max(cl.max_cell.i, c.i), std::max(cl.max_cell.j, c.j), std::max(cl.max_cell.k, c.k)};
    }
    out.push_back(std::move(cl));
  }
  std::sort(out.begin(), out.end(), [](const VoxelCluster& a, const VoxelCluster& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.cells.front() < b.cells.front();
  });
  return out;
}

std::vector<SemanticRay> query_rays(const RayStore& store, std::span<const Query> queries, double eps) {
  std::vector<SemanticRay> out;
  if (queries.empty()) return out;
  for (const SemanticRay& r : store.rays())
    if (best_similarity(r.feature, queries) >= eps) out.push_back(r);
  return out;
}

bool ray_forward_valid(const SemanticRay& ray, const Pose& cur) {
  const double dx = ray.direction.x(), dy = ray.direction.y();
  const double ox = ray.origin.x() + dx - cur.position.x();
  const double oy = ray.origin.y() + dy - cur.position.y();
  return dx * ox + dy * oy > 0.0;
}

BinningResult bin_rays(std::span<const SemanticRay> filtered, const Pose& cur, double theta_deg) {
  if (!(theta_deg > 0.0 && theta_deg < 180.0)) throw std::invalid_argument("theta must lie in (0, 180) degrees");
  const double cos_theta = std::cos(deg2rad(theta_deg));
  BinningResult res;
  for (const SemanticRay& r : filtered) {
    if (ray_forward_valid(r, cur)) res.ordered.push_back(r);
    else ++res.dropped_invalid;
  }
  std::stable_sort(res.ordered.begin(), res.ordered.end(), [](const SemanticRay& a, const SemanticRay& b) {
    if (a.birth_step != b.birth_step) return a.birth_step < b.birth_step;
    return lex_less(a.origin, b.origin);
  });

  for (std::size_t idx = 0; idx < res.ordered.size(); ++idx) {
    const SemanticRay& r = res.ordered[idx];
    bool joined = false;
    for (std::size_t b = 0; b < res.bins.size(); ++b) {
      RayBin& bin = res.bins[b];
      const double c = bin.centroid_dir.dot(r.direction);
      if (c < cos_theta) continue;
      res.log.push_back({idx, b, c, false});
      bin.members.push_back(r);
      bin.direction_sum += r.direction;
      if (bin.direction_sum.norm() > 0.0) bin.centroid_dir = bin.direction_sum.normalized();
      joined = true;
      break;
    }
    if (!joined) {
      RayBin bin;
      bin.members.push_back(r);
      bin.direction_sum = r.direction;
      bin.centroid_dir = r.direction.normalized();
      res.log.push_back({idx, res.bins.size(), 1.0, true});
      res.bins.push_back(std::move(bin));
    }
  }
  for (RayBin& bin : res.bins) {
    Vec3 sum = Vec3::Zero();
    for (const SemanticRay& r : bin.members) sum += r.origin;
    bin.representative_origin = sum / double(bin.members.size());
  }
  return res;
}

double bin_score(const RayBin& bin, std::size_t max_size, const Pose& cur, double alpha, double beta) {
  const double dist = (bin.representative_origin - cur.position).norm();
  return alpha / (1.0 + dist) + beta * double(bin.members.size()) / double(max_size);
}

std::size_t best_bin(std::span<const RayBin> bins, const Pose& cur, double alpha, double beta) {
  if (bins.empty()) throw std::invalid_argument("score_bins: no bins");
  std::size_t max_size = 0;
  for (const RayBin& b : bins) max_size = std::max(max_size, b.members.size());
  std::size_t best = 0;
  double best_score = bin_score(bins[0], max_size, cur, alpha, beta);
  for (std::size_t idx = 1; idx < bins.size(); ++idx) {
    const double s = bin_score(bins[idx], max_size, cur, alpha, beta);
    if (s > best_score ||
        (s == best_score && lex_less(bins[idx].representative_origin, bins[best].representative_origin))) {
      best = idx;
      best_score = s;
    }
  }
  return best;
}

const RayBin& score_bins(std::span<const RayBin> bins, const Pose& cur, double alpha, double beta) {
  return bins[best_bin(bins, cur, alpha, beta)];
}

}  // namespace raven
