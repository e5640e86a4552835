#include "raven/world/scenario.hpp"

#include "raven/core/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace raven {

void validate_scenario(const Scenario& s) {
  validate_task(s.task);
  const GridIndex sc = cell_of(s.start.position);
  if (!s.world.bounds().contains(sc)) throw ValidationError("start lies outside the world");
  if (s.world.occupied(sc)) throw ValidationError("start lies in an occupied cell");
  if (std::abs(s.start.heading.norm() - 1.0) > 1e-9) throw ValidationError("start heading is not a unit vector");
  if (s.budget_steps < 0) throw ValidationError("budget_steps must be nonnegative");
  if (!(s.r_succ > 0.0)) throw ValidationError("r_succ must be positive");
  const auto goals = goal_instances(s.task, s.world);
  if (goals.empty()) throw ValidationError("task has no goal instances in the world");
  if (goals.size() > kMaxGoalInstances)
    throw ValidationError("task has " + std::to_string(goals.size()) + " goal instances (max " +
                          std::to_string(kMaxGoalInstances) + ")");
}

namespace {

enum class Section { None, World, Occupied, Object, Task, Episode };

struct ObjectDraft {
  int line = 0;
  std::optional<int> id;
  std::optional<std::string> cls;
  std::optional<GridIndex> min, max;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Scenario run() {
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      ++line_;
      std::string raw(text_.substr(pos, end - pos));
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      handle(raw);
      if (end == text_.size()) break;
      pos = end + 1;
    }
    return finish();
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  void handle(const std::string& raw) {
    const std::string lineText = text::trim(raw.substr(0, raw.find('#')));
    if (lineText.empty()) return;
    if (lineText.front() == '[') {
      if (lineText.back() != ']') fail("unterminated section header");
      const std::string name = lineText.substr(1, lineText.size() - 2);
      if (name == "world") section_ = Section::World;
      else if (name == "occupied") section_ = Section::Occupied;
      else if (name == "object") {
        section_ = Section::Object;
        objects_.push_back({line_, {}, {}, {}, {}});
      } else if (name == "task") section_ = Section::Task;
      else if (name == "episode") section_ = Section::Episode;
      else fail("unknown section [" + name + "]");
      if (section_ != Section::Object) {
        if (seen_.count(name)) fail("duplicate section [" + name + "]");
        seen_[name] = line_;
      }
      return;
    }
    if (section_ == Section::None) fail("content before the first section");
    if (section_ == Section::Occupied) return occupied_run(lineText);

    const auto eq = lineText.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = text::trim(lineText.substr(0, eq));
    const std::string value = text::trim(lineText.substr(eq + 1));
    switch (section_) {
      case Section::World: world_field(key, value); break;
      case Section::Object: object_field(key, value); break;
      case Section::Task: task_field(key, value); break;
      case Section::Episode: episode_field(key, value); break;
      default: break;
    }
  }

  long long integer(const std::string& field, const std::string& v) const {
    long long out = 0;
    if (!text::parse_int(v, out)) fail("field '" + field + "': expected an integer, got '" + v + "'");
    return out;
  }

  double real(const std::string& field, const std::string& v) const {
    double out = 0;
    if (!text::parse_double(v, out)) fail("field '" + field + "': expected a number, got '" + v + "'");
    return out;
  }

  std::vector<std::string> exactly(const std::string& field, const std::string& v, std::size_t n) const {
    auto t = text::tokens(v);
    if (t.size() != n)
      fail("field '" + field + "': expected " + std::to_string(n) + " values, got " + std::to_string(t.size()));
    return t;
  }

  GridIndex cell(const std::string& field, const std::string& v) const {
    auto t = exactly(field, v, 3);
    return {int(integer(field, t[0])), int(integer(field, t[1])), int(integer(field, t[2]))};
  }

  Vec3 vec(const std::string& field, const std::string& v) const {
    auto t = exactly(field, v, 3);
    return {real(field, t[0]), real(field, t[1]), real(field, t[2])};
  }

  void world_field(const std::string& key, const std::string& v) {
    if (key == "dims") {
      const GridIndex d = cell(key, v);
      if (d.i <= 0 || d.j <= 0 || d.k <= 0) fail("field 'dims': all dimensions must be positive");
      dims_ = GridBounds{d.i, d.j, d.k};
    } else if (key == "voxel_size") {
      voxel_size_ = real(key, v);
      if (!(voxel_size_ > 0)) fail("field 'voxel_size': must be positive");
    } else if (key == "r_succ") {
      r_succ_ = real(key, v);
      if (!(r_succ_ > 0)) fail("field 'r_succ': must be positive");
    } else {
      fail("unknown [world] field '" + key + "'");
    }
  }

  void occupied_run(const std::string& lineText) {
    auto t = text::tokens(lineText);
    if (t.size() != 4) fail("occupied run needs 'i0 i1 j k'");
    const long long i0 = integer("run", t[0]), i1 = integer("run", t[1]);
    const long long j = integer("run", t[2]), k = integer("run", t[3]);
    if (i1 < i0) fail("occupied run has i1 < i0");
    runs_.push_back({line_, int(i0), int(i1), int(j), int(k)});
  }

  void object_field(const std::string& key, const std::string& v) {
    ObjectDraft& o = objects_.back();
    if (key == "id") o.id = int(integer(key, v));
    else if (key == "class") {
      if (v.empty()) fail("field 'class': empty class name");
      o.cls = text::lower(v);
    } else if (key == "min") o.min = cell(key, v);
    else if (key == "max") o.max = cell(key, v);
    else fail("unknown [object] field '" + key + "'");
  }

  void task_field(const std::string& key, const std::string& v) {
    if (key == "kind") {
      try {
        kind_ = task_kind_from_string(v);
      } catch (const ValidationError& e) {
        fail(e.what());
      }
    } else if (key == "set") {
      std::vector<std::string> names;
      for (auto& n : text::split(v, ',')) {
        if (n.empty()) fail("field 'set': empty class name");
        names.push_back(text::lower(n));
      }
      std::sort(names.begin(), names.end());
      names.erase(std::unique(names.begin(), names.end()), names.end());
      sets_.push_back(std::move(names));
    } else {
      fail("unknown [task] field '" + key + "'");
    }
  }

  void episode_field(const std::string& key, const std::string& v) {
    if (key == "start") start_ = vec(key, v);
    else if (key == "heading") {
      Vec3 h = vec(key, v);
      if (!(h.norm() > 0)) fail("field 'heading': zero vector");
      if (std::abs(h.norm() - 1.0) > 1e-12) h.normalize();
      heading_ = h;
    } else if (key == "budget_steps") {
      const long long b = integer(key, v);
      if (b < 0) fail("field 'budget_steps': must be nonnegative");
      budget_ = int(b);
    } else if (key == "seed") {
      const long long s = integer(key, v);
      if (s < 0) fail("field 'seed': must be nonnegative");
      seed_ = std::uint64_t(s);
    } else {
      fail("unknown [episode] field '" + key + "'");
    }
  }

  template <typename T>
  static const T& need(const std::optional<T>& v, int line, const std::string& what) {
    if (!v) throw ParseError(line, "missing " + what);
    return *v;
  }

  Scenario finish() {
    for (const char* s : {"world", "task", "episode"})
      if (!seen_.count(s)) throw ParseError(line_, std::string("missing section [") + s + "]");
    const GridBounds dims = need(dims_, seen_["world"], "field 'dims' in [world]");

    std::vector<GridIndex> occupied;
    for (const auto& r : runs_) {
      if (!dims.contains({r.i0, r.j, r.k}) || !dims.contains({r.i1, r.j, r.k}))
        throw ParseError(r.line, "occupied run outside world dims");
      for (int i = r.i0; i <= r.i1; ++i) occupied.push_back({i, r.j, r.k});
    }

    std::vector<SemanticObject> objects;
    for (const auto& d : objects_) {
      SemanticObject o;
      o.id = need(d.id, d.line, "field 'id' in [object]");
      o.class_name = need(d.cls, d.line, "field 'class' in [object]");
      o.min = need(d.min, d.line, "field 'min' in [object]");
      o.max = need(d.max, d.line, "field 'max' in [object]");
      objects.push_back(std::move(o));
    }

    Scenario s;
    s.world = WorldModel(dims, voxel_size_, occupied, std::move(objects));
    s.task.kind = need(kind_, seen_["task"], "field 'kind' in [task]");
    s.task.class_sets = sets_;
    s.start.position = need(start_, seen_["episode"], "field 'start' in [episode]");
    s.start.heading = heading_.value_or(Vec3::UnitX());
    s.budget_steps = need(budget_, seen_["episode"], "field 'budget_steps' in [episode]");
    s.seed = seed_.value_or(0);
    s.r_succ = r_succ_;
    validate_scenario(s);
    return s;
  }

  struct Run {
    int line, i0, i1, j, k;
  };

  std::string_view text_;
  int line_ = 0;
  Section section_ = Section::None;
  std::map<std::string, int> seen_;
  std::optional<GridBounds> dims_;
  double voxel_size_ = 0.5;
  double r_succ_ = kDefaultSuccessRadius;
  std::vector<Run> runs_;
  std::vector<ObjectDraft> objects_;
  std::optional<TaskKind> kind_;
  std::vector<std::vector<std::string>> sets_;
  std::optional<Vec3> start_;
  std::optional<Vec3> heading_;
  std::optional<int> budget_;
  std::optional<std::uint64_t> seed_;
};

std::string join_vec(const Vec3& v) {
  return text::fmt(v.x()) + " " + text::fmt(v.y()) + " " + text::fmt(v.z());
}

std::string join_cell(GridIndex c) {
  return std::to_string(c.i) + " " + std::to_string(c.j) + " " + std::to_string(c.k);
}

}  // namespace

Scenario load_scenario(std::string_view text) { return Parser(text).run(); }

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string save_scenario(const Scenario& s) {
  const GridBounds& d = s.world.bounds();
  std::ostringstream out;
  out << "# ravenbench scenario v1\n";
  out << "[world]\n";
  out << "dims = " << d.nx << " " << d.ny << " " << d.nz << "\n";
  out << "voxel_size = " << text::fmt(s.world.voxel_size()) << "\n";
  out << "r_succ = " << text::fmt(s.r_succ) << "\n";

  out << "\n[occupied]\n";
  for (int k = 0; k < d.nz; ++k)
    for (int j = 0; j < d.ny; ++j) {
      int i = 0;
      while (i < d.nx) {
        if (!s.world.occupied({i, j, k})) {
          ++i;
          continue;
        }
        int e = i;
        while (e + 1 < d.nx && s.world.occupied({e + 1, j, k})) ++e;
        out << i << " " << e << " " << j << " " << k << "\n";
        i = e + 1;
      }
    }

  for (const auto& o : s.world.objects()) {
    out << "\n[object]\n";
    out << "id = " << o.id << "\n";
    out << "class = " << text::lower(o.class_name) << "\n";
    out << "min = " << join_cell(o.min) << "\n";
    out << "max = " << join_cell(o.max) << "\n";
  }

  out << "\n[task]\n";
  out << "kind = " << to_string(s.task.kind) << "\n";
  for (const auto& set : s.task.class_sets) {
    std::vector<std::string> names;
    for (const auto& n : set) names.push_back(text::lower(n));
    std::sort(names.begin(), names.end());
    out << "set = ";
    for (std::size_t n = 0; n < names.size(); ++n) out << (n ? ", " : "") << names[n];
    out << "\n";
  }

  out << "\n[episode]\n";
  out << "start = " << join_vec(s.start.position) << "\n";
  out << "heading = " << join_vec(s.start.heading) << "\n";
  out << "budget_steps = " << s.budget_steps << "\n";
  out << "seed = " << s.seed << "\n";
  return out.str();
}

void save_scenario_file(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write scenario file '" + path + "'");
  out << save_scenario(s);
  if (!out) throw std::runtime_error("failed writing scenario file '" + path + "'");
}

}  // namespace raven
