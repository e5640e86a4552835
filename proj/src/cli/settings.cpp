#include "raven/cli/settings.hpp"

#include "raven/core/text.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace raven {

namespace {

struct Field {
  std::function<void(RunSettings&, const std::string&)> set;
  std::function<std::string(const RunSettings&)> get;
};

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!text::parse_double(v, out)) throw ConfigError("field '" + key + "': expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  if (!text::parse_int(v, out)) throw ConfigError("field '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string l = text::lower(v);
  if (l == "true" || l == "1" || l == "yes") return true;
  if (l == "false" || l == "0" || l == "no") return false;
  throw ConfigError("field '" + key + "': expected true or false, got '" + v + "'");
}

template <typename Get>
Field real(std::string key, Get get) {
  return {[key, get](RunSettings& s, const std::string& v) { get(s) = to_double(key, v); },
          [get](const RunSettings& s) { return text::fmt(get(const_cast<RunSettings&>(s))); }};
}

template <typename Get>
Field integer(std::string key, Get get) {
  return {[key, get](RunSettings& s, const std::string& v) {
            using T = std::remove_reference_t<decltype(get(s))>;
            const long long x = to_int(key, v);
            if (x < 0 && std::is_unsigned_v<T>) throw ConfigError("field '" + key + "': must be non-negative");
            get(s) = static_cast<T>(x);
          },
          [get](const RunSettings& s) { return std::to_string(get(const_cast<RunSettings&>(s))); }};
}

template <typename Get>
Field boolean(std::string key, Get get) {
  return {[key, get](RunSettings& s, const std::string& v) { get(s) = to_bool(key, v); },
          [get](const RunSettings& s) { return std::string(get(const_cast<RunSettings&>(s)) ? "true" : "false"); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> kFields = [] {
    std::map<std::string, Field> m;
    m["epsilon_vox"] = real("epsilon_vox", [](RunSettings& s) -> double& { return s.behavior.epsilon_vox; });
    m["tau_min"] = integer("tau_min", [](RunSettings& s) -> int& { return s.behavior.tau_min; });
    m["omega"] = real("omega", [](RunSettings& s) -> double& { return s.behavior.omega; });
    m["epsilon_ray"] = real("epsilon_ray", [](RunSettings& s) -> double& { return s.behavior.epsilon_ray; });
    m["theta_deg"] = real("theta_deg", [](RunSettings& s) -> double& { return s.behavior.theta_deg; });
    m["alpha"] = real("alpha", [](RunSettings& s) -> double& { return s.behavior.alpha; });
    m["beta"] = real("beta", [](RunSettings& s) -> double& { return s.behavior.beta; });
    m["omega_ray"] = real("omega_ray", [](RunSettings& s) -> double& { return s.behavior.omega_ray; });
    m["t_aux_steps"] = integer("t_aux_steps", [](RunSettings& s) -> int& { return s.behavior.t_aux_steps; });
    m["j_aux"] = integer("j_aux", [](RunSettings& s) -> int& { return s.behavior.j_aux; });
    m["z_thresh"] = real("z_thresh", [](RunSettings& s) -> double& { return s.behavior.z_thresh; });
    m["dbscan_eps"] = real("dbscan_eps", [](RunSettings& s) -> double& { return s.behavior.dbscan_eps; });
    m["dbscan_min_samples"] =
        integer("dbscan_min_samples", [](RunSettings& s) -> int& { return s.behavior.dbscan_min_samples; });
    m["alpha_dist"] = real("alpha_dist", [](RunSettings& s) -> double& { return s.behavior.alpha_dist; });
    m["alpha_head"] = real("alpha_head", [](RunSettings& s) -> double& { return s.behavior.alpha_head; });
    m["ascend_height"] = real("ascend_height", [](RunSettings& s) -> double& { return s.behavior.ascend_height; });
    m["blacklist_ticks"] = integer("blacklist_ticks", [](RunSettings& s) -> int& { return s.behavior.blacklist_ticks; });
    m["blacklist_radius"] =
        real("blacklist_radius", [](RunSettings& s) -> double& { return s.behavior.blacklist_radius; });
    m["h_fov"] = real("h_fov", [](RunSettings& s) -> double& { return s.sensor.h_fov_deg; });
    m["v_fov"] = real("v_fov", [](RunSettings& s) -> double& { return s.sensor.v_fov_deg; });
    m["rays_h"] = integer("rays_h", [](RunSettings& s) -> int& { return s.sensor.n_h; });
    m["rays_v"] = integer("rays_v", [](RunSettings& s) -> int& { return s.sensor.n_v; });
    m["max_depth"] = real("max_depth", [](RunSettings& s) -> double& { return s.sensor.max_depth; });
    m["max_visibility"] = real("max_visibility", [](RunSettings& s) -> double& { return s.sensor.max_visibility; });
    m["integrate_period"] =
        integer("integrate_period", [](RunSettings& s) -> int& { return s.sensor.integrate_period; });
    m["speed"] = real("speed", [](RunSettings& s) -> double& { return s.nav.speed; });
    m["unknown_traversable"] =
        boolean("unknown_traversable", [](RunSettings& s) -> bool& { return s.nav.unknown_traversable; });
    m["arrival_radius"] = real("arrival_radius", [](RunSettings& s) -> double& { return s.nav.arrival_radius; });
    m["retarget_radius"] = real("retarget_radius", [](RunSettings& s) -> double& { return s.nav.retarget_radius; });
    m["embedding_dim"] = integer("embedding_dim", [](RunSettings& s) -> int& { return s.space.dimension; });
    m["noise_sigma"] = real("noise_sigma", [](RunSettings& s) -> double& { return s.space.noise_sigma; });
    m["max_cross_sim"] = real("max_cross_sim", [](RunSettings& s) -> double& { return s.space.max_cross_sim; });
    m["embedding_seed"] = integer("embedding_seed", [](RunSettings& s) -> std::uint64_t& { return s.space.seed; });
    return m;
  }();
  return kFields;
}

}  // namespace

const std::vector<std::string>& RunSettings::keys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : fields()) out.push_back(k);
    return out;
  }();
  return kKeys;
}

void RunSettings::set(const std::string& key, const std::string& value) {
  auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(*this, text::trim(value));
}

void RunSettings::validate() const {
  try {
    behavior.validate();
    sensor.validate();
    nav.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (space.dimension < 2) throw ConfigError("embedding_dim must be >= 2");
  if (!(space.noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be non-negative");
  if (!(space.max_cross_sim > -1.0 && space.max_cross_sim <= 1.0)) throw ConfigError("max_cross_sim must lie in (-1, 1]");
}

std::string RunSettings::dump() const {
  std::ostringstream os;
  for (const auto& [k, f] : fields()) os << k << " = " << f.get(*this) << '\n';
  return os.str();
}

std::pair<std::string, std::string> split_assignment(std::string_view t) {
  const auto eq = t.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(t) + "'");
  std::string key = text::trim(t.substr(0, eq));
  std::string value = text::trim(t.substr(eq + 1));
  if (key.empty()) throw ConfigError("empty key in '" + std::string(t) + "'");
  return {key, value};
}

void apply_config_text(RunSettings& settings, std::string_view body) {
  std::istringstream is{std::string(body)};
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (text::trim(line).empty()) continue;
    try {
      const auto [k, v] = split_assignment(line);
      settings.set(k, v);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(n) + ": " + e.what());
    }
  }
}

}  // namespace raven
