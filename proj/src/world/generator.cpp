#include "raven/world/generator.hpp"

#include "raven/core/semantic_space.hpp"
#include "raven/core/text.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <sstream>

namespace raven {

namespace {

struct Box {
  GridIndex min, max;

  Box dilated(int g) const { return {{min.i - g, min.j - g, min.k - g}, {max.i + g, max.j + g, max.k + g}}; }
  bool intersects(const Box& o) const {
    return min.i <= o.max.i && o.min.i <= max.i && min.j <= o.max.j && o.min.j <= max.j &&
           min.k <= o.max.k && o.min.k <= max.k;
  }
};

struct Layout {
  std::vector<SemanticObject> objects;
  std::vector<Box> clutter;
  std::vector<std::string> featured;  // in selection order
};

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
int uniform(Rng& rng, SizeRange r) { return uniform(rng, r.min, r.max); }

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return stable_hash(std::to_string(b), a ^ 0xA5A5A5A5ULL);
}

bool fits(const Box& b, const GridBounds& dims) {
  return b.min.i >= 1 && b.min.j >= 1 && b.max.i <= dims.nx - 2 && b.max.j <= dims.ny - 2 &&
         b.min.k >= 1 && b.max.k <= dims.nz - 3;
}

bool clear_of(const Box& b, const std::vector<Box>& taken, int gap) {
  const Box d = b.dilated(gap);
  return std::none_of(taken.begin(), taken.end(), [&](const Box& t) { return d.intersects(t); });
}

std::optional<Box> random_box(Rng& rng, const GridBounds& dims, SizeRange foot, SizeRange height,
                              const std::vector<Box>& taken, int gap, int tries = 200) {
  for (int t = 0; t < tries; ++t) {
    const int w = uniform(rng, foot), d = uniform(rng, foot), h = uniform(rng, height);
    const int i = uniform(rng, 1, std::max(1, dims.nx - 1 - w));
    const int j = uniform(rng, 1, std::max(1, dims.ny - 1 - d));
    Box b{{i, j, 1}, {i + w - 1, j + d - 1, h}};
    if (fits(b, dims) && clear_of(b, taken, gap)) return b;
  }
  return std::nullopt;
}

/// Box of the given size placed beside `anchor` at a horizontal gap, on a random side.
std::optional<Box> beside(Rng& rng, const GridBounds& dims, const Box& anchor, SizeRange foot,
                          SizeRange height, const std::vector<Box>& taken) {
  const int w = uniform(rng, foot), d = uniform(rng, foot), h = uniform(rng, height);
  const int gap = uniform(rng, 2, 3);
  const int first = uniform(rng, 0, 3);
  for (int s = 0; s < 4; ++s) {
    const int side = (first + s) % 4;
    const int ci = (anchor.min.i + anchor.max.i) / 2 - w / 2;
    const int cj = (anchor.min.j + anchor.max.j) / 2 - d / 2;
    int i = ci, j = cj;
    switch (side) {
      case 0: i = anchor.max.i + 1 + gap; break;
      case 1: i = anchor.min.i - gap - w; break;
      case 2: j = anchor.max.j + 1 + gap; break;
      default: j = anchor.min.j - gap - d; break;
    }
    Box b{{i, j, 1}, {i + w - 1, j + d - 1, h}};
    std::vector<Box> others;
    for (const Box& t : taken)
      if (!(t.min == anchor.min && t.max == anchor.max)) others.push_back(t);
    if (fits(b, dims) && clear_of(b, others, 2) && !b.intersects(anchor.dilated(1))) return b;
  }
  return std::nullopt;
}

Layout make_layout(const GeneratorConfig& cfg, std::uint64_t world_seed) {
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Rng rng(mix(world_seed, 1000 + attempt));
    Layout out;
    std::vector<Box> taken;
    int next_id = 0;
    bool ok = true;

    std::vector<std::string> palette = cfg.goal_palette;
    std::shuffle(palette.begin(), palette.end(), rng);
    palette.resize(std::min<std::size_t>(palette.size(), std::size_t(cfg.featured_classes)));
    out.featured = palette;

    auto add = [&](const std::string& cls, const Box& b) {
      out.objects.push_back({next_id++, cls, b.min, b.max});
      taken.push_back(b);
    };

    for (const std::string& cls : out.featured) {
      const int n = uniform(rng, cfg.instances);
      const auto* row = cfg.cooccurrence.row(cls);
      const bool with_aux = cfg.aux_objects && row && !row->empty();
      for (int m = 0; m < n && ok; ++m) {
        bool placed = false;
        for (int t = 0; t < 30 && !placed; ++t) {
          auto goal = random_box(rng, cfg.dims, cfg.goal_footprint, cfg.goal_height, taken, 8);
          if (!goal) break;
          if (!with_aux) {
            add(cls, *goal);
            placed = true;
            break;
          }
          taken.push_back(*goal);
          auto aux = beside(rng, cfg.dims, *goal, cfg.aux_footprint, cfg.aux_height, taken);
          taken.pop_back();
          if (!aux) continue;
          add(cls, *goal);
          add((*row)[std::size_t(uniform(rng, 0, int(row->size()) - 1))], *aux);
          placed = true;
        }
        ok = placed;
      }
    }
    for (int d = 0; d < cfg.distractors && ok && !cfg.distractor_palette.empty(); ++d) {
      auto b = random_box(rng, cfg.dims, cfg.goal_footprint, cfg.goal_height, taken, 6);
      if (!b) {
        ok = false;
        break;
      }
      add(cfg.distractor_palette[std::size_t(uniform(rng, 0, int(cfg.distractor_palette.size()) - 1))], *b);
    }
    if (!ok) continue;

    const double mean_foot = 0.5 * (cfg.clutter_footprint.min + cfg.clutter_footprint.max);
    const int n_clutter =
        int(cfg.clutter_density * cfg.dims.nx * cfg.dims.ny / std::max(1.0, mean_foot * mean_foot));
    std::vector<Box> object_boxes = taken;
    for (int c = 0; c < n_clutter; ++c) {
      auto b = random_box(rng, cfg.dims, cfg.clutter_footprint, cfg.clutter_height, object_boxes, 2, 20);
      if (b) out.clutter.push_back(*b);
    }
    return out;
  }
  throw GenerationError("world generation exceeded the retry cap");
}

WorldModel build_world(const GeneratorConfig& cfg, const Layout& layout) {
  std::vector<GridIndex> occupied;
  occupied.reserve(std::size_t(cfg.dims.nx) * cfg.dims.ny);
  for (int j = 0; j < cfg.dims.ny; ++j)
    for (int i = 0; i < cfg.dims.nx; ++i) occupied.push_back({i, j, 0});
  for (const Box& b : layout.clutter)
    for (int k = b.min.k; k <= b.max.k; ++k)
      for (int j = b.min.j; j <= b.max.j; ++j)
        for (int i = b.min.i; i <= b.max.i; ++i) occupied.push_back({i, j, k});
  return WorldModel(cfg.dims, cfg.voxel_size, occupied, layout.objects);
}

TaskSpec make_task(const Layout& layout, int start_index, TaskKind kind) {
  const auto& f = layout.featured;
  const std::string& a = f[std::size_t(start_index) % f.size()];
  const std::string& b = f[std::size_t(start_index + 1) % f.size()];
  TaskSpec t;
  t.kind = kind;
  switch (kind) {
    case TaskKind::TypeI: t.class_sets = {{a}}; break;
    case TaskKind::TypeII: {
      std::vector<std::string> s{a, b};
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      t.class_sets = {s};
      break;
    }
    case TaskKind::TypeIII: t.class_sets = {{a}, {b}}; break;
  }
  return t;
}

}  // namespace

bool goal_reachable(const WorldModel& world, const Vec3& start, const SemanticObject& goal, double r_succ) {
  const GridBounds& b = world.bounds();
  const GridIndex s = cell_of(start);
  if (!world.free(s)) return false;
  auto in_goal = [&](GridIndex c) { return distance_to_box(cell_center(c), goal.lo(), goal.hi()) <= r_succ; };
  std::vector<std::uint8_t> seen(b.size(), 0);
  std::deque<GridIndex> queue{s};
  seen[b.linear(s)] = 1;
  while (!queue.empty()) {
    const GridIndex c = queue.front();
    queue.pop_front();
    if (in_goal(c)) return true;
    for (const GridIndex& d : kAllNeighbors) {
      const GridIndex n = c + d;
      if (!world.free(n)) continue;
      auto& flag = seen[b.linear(n)];
      if (flag) continue;
      flag = 1;
      queue.push_back(n);
    }
  }
  return false;
}

void validate_generator_config(const GeneratorConfig& cfg) {
  auto range = [](const SizeRange& r, const char* name) {
    if (r.min < 1 || r.max < r.min)
      throw ValidationError(std::string("field '") + name + "': need 1 <= min <= max");
  };
  if (cfg.dims.nx < 16 || cfg.dims.ny < 16 || cfg.dims.nz < 8)
    throw ValidationError("field 'dims': need at least 16 16 8");
  if (!(cfg.voxel_size > 0)) throw ValidationError("field 'voxel_size': must be positive");
  if (!(cfg.r_succ > 0)) throw ValidationError("field 'r_succ': must be positive");
  if (cfg.budget_steps < 0) throw ValidationError("field 'budget_steps': must be nonnegative");
  if (cfg.goal_palette.empty()) throw ValidationError("field 'goal_palette': must be nonempty");
  if (cfg.featured_classes < 1 || std::size_t(cfg.featured_classes) > cfg.goal_palette.size())
    throw ValidationError("field 'featured_classes': must be in [1, |goal_palette|]");
  range(cfg.instances, "instances");
  range(cfg.goal_footprint, "goal_footprint");
  range(cfg.goal_height, "goal_height");
  range(cfg.aux_footprint, "aux_footprint");
  range(cfg.aux_height, "aux_height");
  range(cfg.clutter_footprint, "clutter_footprint");
  range(cfg.clutter_height, "clutter_height");
  for (const auto& [h, name] : {std::pair{cfg.goal_height, "goal_height"}, std::pair{cfg.aux_height, "aux_height"},
                                std::pair{cfg.clutter_height, "clutter_height"}})
    if (h.max > cfg.dims.nz - 3)
      throw ValidationError(std::string("field '") + name + "': objects must leave two free layers under the ceiling");
  if (cfg.distractors < 0) throw ValidationError("field 'distractors': must be nonnegative");
  if (cfg.clutter_density < 0 || cfg.clutter_density > 0.5)
    throw ValidationError("field 'clutter_density': must lie in [0, 0.5]");
  if (cfg.starts_per_world < 1) throw ValidationError("field 'starts_per_world': must be >= 1");
  if (cfg.task_kinds.empty()) throw ValidationError("field 'task_kinds': must be nonempty");
  const bool sequential = std::find(cfg.task_kinds.begin(), cfg.task_kinds.end(), TaskKind::TypeIII) !=
                          cfg.task_kinds.end();
  if (sequential && cfg.featured_classes < 2)
    throw ValidationError("field 'featured_classes': Type III tasks need at least 2");
  if (cfg.start_clearance < 1 || cfg.start_clearance >= cfg.dims.nz)
    throw ValidationError("field 'start_clearance': must lie in [1, nz)");
  if (cfg.max_retries < 1) throw ValidationError("field 'max_retries': must be >= 1");
  // Two goal classes with `instances.max` each must fit the optimal-path oracle.
  const int per_task = std::min(cfg.featured_classes, 2) * cfg.instances.max;
  if (std::size_t(per_task) > kMaxGoalInstances)
    throw ValidationError("field 'instances': tasks could exceed " + std::to_string(kMaxGoalInstances) +
                          " goal instances");
}

Scenario generate_scenario(const GeneratorConfig& cfg, std::uint64_t world_seed, int start_index,
                           TaskKind kind) {
  validate_generator_config(cfg);
  const Layout layout = make_layout(cfg, world_seed);
  Scenario s;
  s.world = build_world(cfg, layout);
  s.task = make_task(layout, start_index, kind);
  s.budget_steps = cfg.budget_steps;
  s.r_succ = cfg.r_succ;
  s.seed = mix(world_seed, 7919ULL * std::uint64_t(start_index + 1) + std::uint64_t(kind)) >> 20;

  const auto goals = goal_instances(s.task, s.world);
  Rng rng(mix(world_seed, 50000 + std::uint64_t(start_index)));
  const GridBounds& dims = cfg.dims;
  for (int attempt = 0; attempt < 4000; ++attempt) {
    const int i = uniform(rng, 1, dims.nx - 2);
    const int j = uniform(rng, 1, dims.ny - 2);
    bool column_free = true;
    for (int k = 1; k <= cfg.start_clearance && column_free; ++k) column_free = s.world.free({i, j, k});
    if (!column_free) continue;
    const Vec3 p = cell_center({i, j, 1});
    bool far = true;
    for (const auto& o : s.world.objects()) {
      const double dxy = distance_to_box(Vec3(p.x(), p.y(), o.center().z()), o.lo(), o.hi());
      const bool is_goal_class = std::find(layout.featured.begin(), layout.featured.end(), o.class_name) !=
                                 layout.featured.end();
      if (dxy < (is_goal_class ? cfg.min_start_goal_distance : 4.0)) far = false;
    }
    if (!far) continue;
    s.start = Pose::from_yaw(p, deg2rad(45.0 * uniform(rng, 0, 7)));
    // Round the heading to keep the canonical text short and exact.
    for (int a = 0; a < 3; ++a)
      if (std::abs(s.start.heading(a)) < 1e-12) s.start.heading(a) = 0.0;
    s.start.heading.normalize();
    const bool reachable = std::all_of(goals.begin(), goals.end(), [&](const SemanticObject* g) {
      return goal_reachable(s.world, s.start.position, *g, s.r_succ);
    });
    if (!reachable) continue;
    validate_scenario(s);
    return s;
  }
  throw GenerationError("no valid start pose found within the retry cap");
}

Scenario generate_world(const GeneratorConfig& cfg, std::uint64_t seed) {
  validate_generator_config(cfg);
  return generate_scenario(cfg, seed, 0, cfg.task_kinds.front());
}

std::vector<Scenario> generate_suite(const GeneratorConfig& cfg, int count, std::uint64_t seed) {
  validate_generator_config(cfg);
  if (count < 0) throw ValidationError("count must be nonnegative");
  std::vector<Scenario> out;
  const int per_start = int(cfg.task_kinds.size());
  const int per_world = cfg.starts_per_world * per_start;
  for (int n = 0; n < count; ++n) {
    const int w = n / per_world;
    const int s = (n / per_start) % cfg.starts_per_world;
    const TaskKind kind = cfg.task_kinds[std::size_t(n % per_start)];
    out.push_back(generate_scenario(cfg, mix(seed, std::uint64_t(w)), s, kind));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text form of GeneratorConfig

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t n = 0; n < v.size(); ++n) out += (n ? ", " : "") + v[n];
  return out;
}

}  // namespace

GeneratorConfig parse_generator_config(std::string_view textIn) {
  GeneratorConfig cfg;
  std::istringstream in{std::string(textIn)};
  std::string raw;
  int line = 0;
  bool table_reset = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string body = text::trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key = text::trim(body.substr(0, eq));
    const std::string value = text::trim(body.substr(eq + 1));
    auto bad = [&](const std::string& why) -> ValidationError {
      return ValidationError("line " + std::to_string(line) + ": field '" + key + "': " + why);
    };
    auto ints = [&](std::size_t n) {
      auto t = text::tokens(value);
      if (t.size() != n) throw bad("expected " + std::to_string(n) + " integers");
      std::vector<int> out;
      for (auto& s : t) {
        long long v = 0;
        if (!text::parse_int(s, v)) throw bad("'" + s + "' is not an integer");
        out.push_back(int(v));
      }
      return out;
    };
    auto real = [&]() {
      double v = 0;
      if (!text::parse_double(value, v)) throw bad("'" + value + "' is not a number");
      return v;
    };
    auto range = [&]() {
      auto v = ints(2);
      return SizeRange{v[0], v[1]};
    };
    auto names = [&]() {
      std::vector<std::string> out;
      for (auto& n : text::split(value, ',')) {
        if (n.empty()) throw bad("empty class name");
        out.push_back(text::lower(n));
      }
      return out;
    };

    if (key == "dims") {
      auto v = ints(3);
      cfg.dims = GridBounds{v[0], v[1], v[2]};
    } else if (key == "voxel_size") cfg.voxel_size = real();
    else if (key == "r_succ") cfg.r_succ = real();
    else if (key == "budget_steps") cfg.budget_steps = ints(1)[0];
    else if (key == "goal_palette") cfg.goal_palette = names();
    else if (key == "distractor_palette") cfg.distractor_palette = value.empty() ? std::vector<std::string>{} : names();
    else if (key == "featured_classes") cfg.featured_classes = ints(1)[0];
    else if (key == "instances") cfg.instances = range();
    else if (key == "distractors") cfg.distractors = ints(1)[0];
    else if (key == "aux_objects") {
      if (value != "true" && value != "false") throw bad("expected true or false");
      cfg.aux_objects = value == "true";
    } else if (key == "goal_footprint") cfg.goal_footprint = range();
    else if (key == "goal_height") cfg.goal_height = range();
    else if (key == "aux_footprint") cfg.aux_footprint = range();
    else if (key == "aux_height") cfg.aux_height = range();
    else if (key == "clutter_footprint") cfg.clutter_footprint = range();
    else if (key == "clutter_height") cfg.clutter_height = range();
    else if (key == "clutter_density") cfg.clutter_density = real();
    else if (key == "min_start_goal_distance") cfg.min_start_goal_distance = real();
    else if (key == "start_clearance") cfg.start_clearance = ints(1)[0];
    else if (key == "starts_per_world") cfg.starts_per_world = ints(1)[0];
    else if (key == "task_kinds") {
      cfg.task_kinds.clear();
      for (auto& k : text::split(value, ',')) {
        try {
          cfg.task_kinds.push_back(task_kind_from_string(k));
        } catch (const ValidationError&) {
          throw bad("unknown task kind '" + k + "'");
        }
      }
    } else if (key == "max_retries") cfg.max_retries = ints(1)[0];
    else if (key.rfind("cooccur.", 0) == 0) {
      if (!table_reset) {
        cfg.cooccurrence.rows.clear();
        table_reset = true;
      }
      cfg.cooccurrence.rows[text::lower(key.substr(8))] = names();
    } else {
      throw ValidationError("line " + std::to_string(line) + ": unknown field '" + key + "'");
    }
  }
  validate_generator_config(cfg);
  return cfg;
}

std::string format_generator_config(const GeneratorConfig& cfg) {
  std::ostringstream out;
  auto range = [](const SizeRange& r) { return std::to_string(r.min) + " " + std::to_string(r.max); };
  out << "dims = " << cfg.dims.nx << " " << cfg.dims.ny << " " << cfg.dims.nz << "\n";
  out << "voxel_size = " << text::fmt(cfg.voxel_size) << "\n";
  out << "r_succ = " << text::fmt(cfg.r_succ) << "\n";
  out << "budget_steps = " << cfg.budget_steps << "\n";
  out << "goal_palette = " << join(cfg.goal_palette) << "\n";
  out << "distractor_palette = " << join(cfg.distractor_palette) << "\n";
  out << "featured_classes = " << cfg.featured_classes << "\n";
  out << "instances = " << range(cfg.instances) << "\n";
  out << "distractors = " << cfg.distractors << "\n";
  out << "aux_objects = " << (cfg.aux_objects ? "true" : "false") << "\n";
  out << "goal_footprint = " << range(cfg.goal_footprint) << "\n";
  out << "goal_height = " << range(cfg.goal_height) << "\n";
  out << "aux_footprint = " << range(cfg.aux_footprint) << "\n";
  out << "aux_height = " << range(cfg.aux_height) << "\n";
  out << "clutter_footprint = " << range(cfg.clutter_footprint) << "\n";
  out << "clutter_height = " << range(cfg.clutter_height) << "\n";
  out << "clutter_density = " << text::fmt(cfg.clutter_density) << "\n";
  out << "min_start_goal_distance = " << text::fmt(cfg.min_start_goal_distance) << "\n";
  out << "start_clearance = " << cfg.start_clearance << "\n";
  out << "starts_per_world = " << cfg.starts_per_world << "\n";
  std::vector<std::string> kinds;
  for (auto k : cfg.task_kinds) kinds.push_back(to_string(k));
  out << "task_kinds = " << join(kinds) << "\n";
  out << "max_retries = " << cfg.max_retries << "\n";
  for (const auto& [target, aux] : cfg.cooccurrence.rows) out << "cooccur." << target << " = " << join(aux) << "\n";
  return out.str();
}

}  // namespace raven
