#include "raven/behavior/dbscan.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace raven {

namespace {

/// Points bucketed into cubes of edge eps; a radius query scans the 27 cubes around.
class BucketIndex {
 public:
  BucketIndex(std::span<const Vec3> pts, double eps) : pts_(pts), eps_(eps), eps2_(eps * eps) {
    keys_.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) keys_[i] = key_of(pts[i]);
    order_.resize(pts.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return keys_[a] < keys_[b]; });
    ranges_.reserve(pts.size());
    for (std::size_t s = 0; s < order_.size();) {
      std::size_t e = s;
      while (e < order_.size() && keys_[order_[e]] == keys_[order_[s]]) ++e;
      ranges_.emplace(keys_[order_[s]], std::pair<int, int>(int(s), int(e)));
      s = e;
    }
  }

  /// Fills `out` with every point within eps of point `idx`, itself included.
  void query(int idx, std::vector<int>& out) const {
    out.clear();
    const Vec3& p = pts_[idx];
    const int x = q(p.x()), y = q(p.y()), z = q(p.z());
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = ranges_.find(pack(x + dx, y + dy, z + dz));
          if (it == ranges_.end()) continue;
          for (int r = it->second.first; r < it->second.second; ++r) {
            const int j = order_[r];
            if ((pts_[j] - p).squaredNorm() <= eps2_) out.push_back(j);
          }
        }
  }

 private:
  static std::int64_t pack(int x, int y, int z) {
    constexpr std::int64_t kOff = 1 << 20;
    return ((std::int64_t(x) + kOff) << 42) | ((std::int64_t(y) + kOff) << 21) | (std::int64_t(z) + kOff);
  }
  int q(double v) const { return static_cast<int>(std::floor(v / eps_)); }
  std::int64_t key_of(const Vec3& p) const { return pack(q(p.x()), q(p.y()), q(p.z())); }

  std::span<const Vec3> pts_;
  double eps_;
  double eps2_;
  std::vector<std::int64_t> keys_;
  std::vector<int> order_;
  std::unordered_map<std::int64_t, std::pair<int, int>> ranges_;
};

/// Dense bitmask over the grid padded by the search radius, so lookups need no
/// bounds checks. The ball is stored as rows along i; each row is one masked read
/// of the bit array.
class CellIndex {
 public:
  CellIndex(std::span<const GridIndex> cells, const GridBounds& bounds, double eps) : cells_(cells) {
    pad_ = static_cast<int>(std::floor(eps));
    px_ = bounds.nx + 2 * pad_;
    py_ = bounds.ny + 2 * pad_;
    const std::size_t pz = std::size_t(bounds.nz + 2 * pad_);
    const std::size_t total = std::size_t(px_) * std::size_t(py_) * pz;
    slot_.resize(total);
    bits_.assign((total + 63) / 64 + 1, 0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!bounds.contains(cells[i])) throw std::invalid_argument("dbscan_cells: cell outside bounds");
      const std::int64_t at = index(cells[i]);
      slot_[std::size_t(at)] = int(i);
      bits_[std::size_t(at) >> 6] |= std::uint64_t(1) << (at & 63);
    }
    for (int dk = -pad_; dk <= pad_; ++dk)
      for (int dj = -pad_; dj <= pad_; ++dj) {
        int r = -1;
        while (r < pad_ && double((r + 1) * (r + 1) + dj * dj + dk * dk) <= eps * eps) ++r;
        const std::int64_t first = (std::int64_t(dk) * py_ + dj) * px_ - r;
        for (int done = 0; done < 2 * r + 1; done += 63) rows_.push_back({first + done, std::min(63, 2 * r + 1 - done)});
      }
    open_ = bits_;
  }

  /// Counts neighbors of `idx` (itself included), stopping once `enough` are found.
  int count_at_least(int idx, int enough) const {
    const std::int64_t base = index(cells_[idx]);
    int n = 0;
    for (const Row& row : rows_) {
      n += std::popcount(bits_at(bits_, std::size_t(base + row.offset), row.width));
      if (n >= enough) break;
    }
    return n;
  }

  template <typename F>
  void for_each_neighbor(int idx, F&& f) const {
    const std::int64_t base = index(cells_[idx]);
    for (const Row& row : rows_) {
      const std::size_t start = std::size_t(base + row.offset);
      for (std::uint64_t b = bits_at(bits_, start, row.width); b != 0; b &= b - 1)
        f(slot_[start + std::size_t(std::countr_zero(b))]);
    }
  }

  /// Like for_each_neighbor, but skips neighbors already passed to close().
  template <typename F>
  void for_each_open_neighbor(int idx, F&& f) {
    const std::int64_t base = index(cells_[idx]);
    for (const Row& row : rows_) {
      const std::size_t start = std::size_t(base + row.offset);
      for (std::uint64_t b = bits_at(open_, start, row.width); b != 0; b &= b - 1)
        f(slot_[start + std::size_t(std::countr_zero(b))]);
    }
  }

  void close(int idx) {
    const std::size_t at = std::size_t(index(cells_[idx]));
    open_[at >> 6] &= ~(std::uint64_t(1) << (at & 63));
  }

 private:
  struct Row {
    std::int64_t offset;  // of the first cell in the row
    int width;
  };

  std::int64_t index(GridIndex c) const {
    return (std::int64_t(c.k + pad_) * py_ + (c.j + pad_)) * px_ + (c.i + pad_);
  }

  /// `width` (< 64) consecutive bits starting at `start`.
  static std::uint64_t bits_at(const std::vector<std::uint64_t>& words, std::size_t start, int width) {
    const std::size_t w = start >> 6;
    const unsigned sh = unsigned(start & 63);
    std::uint64_t v = words[w] >> sh;
    if (sh != 0) v |= words[w + 1] << (64 - sh);
    return v & ((std::uint64_t(1) << width) - 1);
  }

  std::span<const GridIndex> cells_;
  int pad_ = 0;
  int px_ = 0;
  int py_ = 0;
  std::vector<int> slot_;  // valid only where the bit is set
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> open_;  // cells not yet claimed by a cluster
  std::vector<Row> rows_;
};

template <typename Index>
std::vector<int> run_dbscan(std::size_t n, const Index& index, int min_samples) {
  constexpr int kUnvisited = -2;
  constexpr int kQueued = -3;
  std::vector<int> label(n, kUnvisited);

  std::vector<int> nb;
  std::vector<int> queue;
  int next_cluster = 0;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (label[seed] != kUnvisited) continue;
    index.query(int(seed), nb);
    if (int(nb.size()) < min_samples) {
      label[seed] = kNoise;
      continue;
    }
    const int cluster = next_cluster++;
    label[seed] = cluster;
    queue.clear();
    auto enqueue = [&](const std::vector<int>& from) {
      for (int j : from) {
        if (label[j] == kNoise) label[j] = cluster;  // border point
        else if (label[j] == kUnvisited) {
          label[j] = kQueued;
          queue.push_back(j);
        }
      }
    };
    enqueue(nb);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int j = queue[head];
      label[j] = cluster;
      index.query(j, nb);
      if (int(nb.size()) >= min_samples) enqueue(nb);
    }
  }
  return label;
}

}  // namespace

std::vector<int> dbscan(std::span<const Vec3> points, double eps, int min_samples) {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan eps must be positive");
  if (min_samples < 1) throw std::invalid_argument("dbscan min_samples must be >= 1");
  return run_dbscan(points.size(), BucketIndex(points, eps), min_samples);
}

std::vector<int> dbscan_cells(std::span<const GridIndex> cells, const GridBounds& bounds, double eps,
                              int min_samples) {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan eps must be positive");
  if (min_samples < 1) throw std::invalid_argument("dbscan min_samples must be >= 1");
  CellIndex index(cells, bounds, eps);
  constexpr int kUnvisited = -2;
  std::vector<int> label(cells.size(), kUnvisited);
  std::vector<int> queue;
  int next_cluster = 0;
  for (std::size_t seed = 0; seed < cells.size(); ++seed) {
    if (label[seed] != kUnvisited) continue;
    if (index.count_at_least(int(seed), min_samples) < min_samples) {
      label[seed] = kNoise;  // stays open: a later cluster may claim it as a border point
      continue;
    }
    const int cluster = next_cluster++;
    // every open cell reached from a core point joins the cluster; only core
    // points expand further
    auto claim = [&](int j) {
      index.close(j);
      const bool fresh = label[j] == kUnvisited;
      label[j] = cluster;
      if (fresh) queue.push_back(j);
    };
    queue.clear();
    claim(int(seed));
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int j = queue[head];
      if (j == int(seed) || index.count_at_least(j, min_samples) >= min_samples) index.for_each_open_neighbor(j, claim);
    }
  }
  return label;
}

}  // namespace raven
