#include "xhodge/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace xhodge {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& what) {
  throw ConfigError("setting '" + key + "' = '" + value + "': " + what);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) bad_value(key, v, "trailing characters");
    return d;
  } catch (const std::logic_error&) {
    bad_value(key, v, "not a number");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) bad_value(key, v, "not an integer");
    return i;
  } catch (const std::logic_error&) {
    bad_value(key, v, "not an integer");
  }
}

template <class S>
S& shape_as(RunConfig& cfg, const std::string& key, const std::string& value, const char* shape) {
  if (auto* s = std::get_if<S>(&cfg.domain.obstacle.kind)) return *s;
  bad_value(key, value, std::string("only valid after shape = ") + shape);
}

void apply_field_setting(FieldSpec& f, const std::string& key, const std::string& sub, const std::string& v) {
  if (sub == "kind") {
    static const char* kinds[] = {"zero",          "uniform",         "ball_q0",       "ball_grad_q0",
                                  "q0_grad",       "biot_savart_loop", "solenoidal_bump", "gradient_bump",
                                  "point_source",  "fourier",         "probe",         "discrete_curl_bump",
                                  "discrete_gradient_bump"};
    if (std::find(std::begin(kinds), std::end(kinds), v) == std::end(kinds)) bad_value(key, v, "unknown field kind");
    f.kind = v;
  } else if (sub == "axis") {
    f.axis = parse_axis(v);
  } else if (sub == "a") {
    f.a = to_double(key, v);
  } else if (sub == "center") {
    f.center = parse_vec3(v);
  } else if (sub == "width") {
    f.width = to_double(key, v);
  } else if (sub == "direction") {
    f.direction = parse_vec3(v);
  } else if (sub == "radius") {
    f.radius = to_double(key, v);
  } else if (sub == "loop_axis") {
    f.loop_axis = parse_vec3(v);
  } else if (sub == "segments") {
    f.segments = int(to_int(key, v));
  } else if (sub == "modes") {
    f.modes = int(to_int(key, v));
  } else if (sub == "index") {
    f.index = int(to_int(key, v));
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

}  // namespace

FarMode RunConfig::effective_far() const {
  return flavor == HarmonicFlavor::NormalHarmonic ? FarMode::NaturalNeumann : far;
}

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double("list", trim(item)));
  if (out.empty()) throw ConfigError("empty number list '" + s + "'");
  return out;
}

Vec3 parse_vec3(const std::string& s) {
  const auto v = parse_number_list(s);
  if (v.size() != 3) throw ConfigError("expected three comma-separated numbers, got '" + s + "'");
  return {v[0], v[1], v[2]};
}

int parse_axis(const std::string& s) {
  if (s == "x" || s == "0") return 0;
  if (s == "y" || s == "1") return 1;
  if (s == "z" || s == "2") return 2;
  throw ConfigError("unknown axis '" + s + "' (expected x, y or z)");
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key.rfind("field.", 0) == 0) return apply_field_setting(cfg.field, key, key.substr(6), v);
  if (key == "scenario") {
    cfg.scenario = v;
  } else if (key == "L") {
    cfg.domain.L = to_double(key, v);
  } else if (key == "n") {
    cfg.domain.n = int(to_int(key, v));
  } else if (key == "obstacle") {
    cfg.domain.obstacle = parse_obstacle(v);
  } else if (key == "shape") {
    if (v == "none")
      cfg.domain.obstacle = NoObstacle{};
    else if (v == "ball")
      cfg.domain.obstacle = Ball{};
    else if (v == "torus")
      cfg.domain.obstacle = SolidTorus{};
    else
      bad_value(key, v, "expected none, ball or torus");
  } else if (key == "center") {
    const Vec3 c = parse_vec3(v);
    if (auto* b = std::get_if<Ball>(&cfg.domain.obstacle.kind))
      b->center = c;
    else
      shape_as<SolidTorus>(cfg, key, v, "ball or torus").center = c;
  } else if (key == "radius") {
    shape_as<Ball>(cfg, key, v, "ball").radius = to_double(key, v);
  } else if (key == "major_radius") {
    shape_as<SolidTorus>(cfg, key, v, "torus").major_radius = to_double(key, v);
  } else if (key == "minor_radius") {
    shape_as<SolidTorus>(cfg, key, v, "torus").minor_radius = to_double(key, v);
  } else if (key == "torus_axis") {
    shape_as<SolidTorus>(cfg, key, v, "torus").axis = parse_vec3(v);
  } else if (key == "flavor") {
    cfg.flavor = parse_harmonic_flavor(v);
  } else if (key == "far") {
    cfg.far = parse_far_mode(v);
  } else if (key == "r_list") {
    cfg.r_list = parse_number_list(v);
  } else if (key == "probes") {
    cfg.probes = int(to_int(key, v));
  } else if (key == "svd_tol") {
    cfg.svd_tol = to_double(key, v);
  } else if (key == "seed") {
    const long long s = to_int(key, v);
    if (s < 0) bad_value(key, v, "must be non-negative");
    cfg.seed = std::uint64_t(s);
  } else if (key == "axis") {
    cfg.axis = parse_axis(v);
  } else if (key == "tol") {
    cfg.solver.rel_tol = to_double(key, v);
  } else if (key == "abs_tol") {
    cfg.solver.abs_tol = to_double(key, v);
  } else if (key == "max_iters") {
    cfg.solver.max_iters = int(to_int(key, v));
  } else if (key == "grids") {
    cfg.grids.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      const auto colon = item.find(':');
      if (colon == std::string::npos) bad_value(key, v, "expected n:L pairs");
      cfg.grids.emplace_back(int(to_int(key, trim(item.substr(0, colon)))), to_double(key, trim(item.substr(colon + 1))));
    }
    if (cfg.grids.empty()) bad_value(key, v, "no grids");
  } else if (key == "input") {
    cfg.input = v;
  } else if (key == "out") {
    cfg.out_dir = v;
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

RunConfig parse_config(std::istream& is, const std::string& source, RunConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  return parse_config(is, path, std::move(base));
}

void validate(const RunConfig& cfg) {
  if (cfg.flavor == HarmonicFlavor::TangentialHarmonic && cfg.far == FarMode::NaturalNeumann)
    throw ConfigError("tangential flavor needs far = zero or far = free");
  if (!(cfg.solver.rel_tol > 0.0) || !(cfg.solver.abs_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (cfg.solver.max_iters <= 0) throw ConfigError("max_iters must be positive");
  for (double r : cfg.r_list)
    if (!(r > 1.0)) throw ConfigError("r_list entries must exceed 1");
  for (const auto& [n, L] : cfg.grids)
    if (n < 8 || !(L > 0.0)) throw ConfigError("grids need n >= 8 and L > 0");
}

FaceField generate_field(const TopologyPtr& topo, const FieldSpec& f, std::uint64_t seed, const SolveOptions& opts) {
  if (f.kind == "zero") return FaceField(topo);
  if (f.kind == "uniform") return sample_uniform(topo, f.axis);
  if (f.kind == "ball_grad_q0") return sample_ball_grad_q0(topo, f.a);
  if (f.kind == "q0_grad") return solve_q0(topo, opts).grad;
  if (f.kind == "biot_savart_loop") {
    LoopSpec loop;
    loop.radius = f.radius;
    loop.center = f.center;
    loop.axis = f.loop_axis;
    loop.segments = f.segments;
    return sample_biot_savart_loop(topo, loop);
  }
  if (f.kind == "solenoidal_bump") return sample_solenoidal_bump(topo, Bump{f.center, f.width}, f.direction);
  if (f.kind == "gradient_bump") return sample_gradient_bump(topo, Bump{f.center, f.width});
  if (f.kind == "discrete_curl_bump")
    return curl_edge_to_face(sample_bump_edge_potential(topo, Bump{f.center, f.width}, f.direction));
  if (f.kind == "discrete_gradient_bump") return gradient_zero_ghost(sample_bump(topo, Bump{f.center, f.width}));
  if (f.kind == "point_source") return sample_point_source(topo, f.center);
  if (f.kind == "fourier") {
    std::mt19937_64 rng(seed);
    return sample_fourier(topo, FourierField::random(rng, topo->L(), f.modes));
  }
  if (f.kind == "probe") {
    if (f.index < 0) throw ConfigError("field.index must be non-negative");
    return probe_suite(topo, f.index + 1, seed).back();
  }
  throw ConfigError("field kind '" + f.kind + "' is not a face field");
}

ScalarField generate_scalar_field(const TopologyPtr& topo, const FieldSpec& f) {
  if (f.kind == "zero") return ScalarField(topo);
  if (f.kind == "ball_q0") return sample_ball_q0(topo, f.a);
  if (f.kind == "gradient_bump") return sample_bump(topo, Bump{f.center, f.width});
  throw ConfigError("field kind '" + f.kind + "' is not a cell field");
}

}  // namespace xhodge
