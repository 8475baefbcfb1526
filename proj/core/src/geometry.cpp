#include "xhodge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "xhodge/errors.hpp"

namespace xhodge {
namespace {

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_vec(const Vec3& v) {
  return fmt_double(v[0]) + "," + fmt_double(v[1]) + "," + fmt_double(v[2]);
}

void validate_shape(const ObstacleShape& shape) {
  std::visit(Overloaded{
                 [](const NoObstacle&) {},
                 [](const Ball& b) {
                   if (!(b.radius > 0.0)) throw GeometryError("ball radius must be positive");
                 },
                 [](const SolidTorus& t) {
                   if (!(t.minor_radius > 0.0) || !(t.major_radius > 0.0))
                     throw GeometryError("torus radii must be positive");
                   if (!(t.minor_radius < t.major_radius))
                     throw GeometryError("torus minor radius must be below the major radius");
                   if (!(norm3(t.axis) > 0.0)) throw GeometryError("torus axis must be nonzero");
                 },
                 [](const ObstacleUnion& u) {
                   for (const auto& p : u.parts) validate_shape(p);
                 },
             },
             shape.kind);
}

// ---- descriptor parsing -------------------------------------------------------------

class DescriptorParser {
 public:
  explicit DescriptorParser(std::string text) : s_(std::move(text)) {}

  ObstacleShape parse_all() {
    ObstacleShape shape = parse_shape();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return shape;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("obstacle descriptor '" + s_ + "': " + what + " at offset " +
                      std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  double number() {
    skip_ws();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += std::size_t(end - begin);
    return v;
  }

  Vec3 vec() {
    Vec3 v{};
    v[0] = number();
    expect(',');
    v[1] = number();
    expect(',');
    v[2] = number();
    return v;
  }

  ObstacleShape parse_shape() {
    const std::string w = word();
    if (w == "none") return NoObstacle{};
    if (w == "ball") {
      Ball b;
      expect('(');
      b.center = vec();
      expect(';');
      b.radius = number();
      expect(')');
      return b;
    }
    if (w == "torus") {
      SolidTorus t;
      expect('(');
      t.center = vec();
      expect(';');
      t.axis = vec();
      expect(';');
      t.major_radius = number();
      expect(',');
      t.minor_radius = number();
      expect(')');
      return t;
    }
    if (w == "union") {
      ObstacleUnion u;
      expect('[');
      if (!accept(']')) {
        do {
          u.parts.push_back(parse_shape());
        } while (accept('|'));
        expect(']');
      }
      return u;
    }
    fail("unknown shape '" + w + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

bool ObstacleShape::empty() const {
  return std::visit(Overloaded{
                        [](const NoObstacle&) { return true; },
                        [](const Ball&) { return false; },
                        [](const SolidTorus&) { return false; },
                        [](const ObstacleUnion& u) {
                          return std::all_of(u.parts.begin(), u.parts.end(),
                                             [](const ObstacleShape& p) { return p.empty(); });
                        },
                    },
                    kind);
}

double signed_distance(const ObstacleShape& shape, const Vec3& x) {
  return std::visit(
      Overloaded{
          [](const NoObstacle&) { return std::numeric_limits<double>::infinity(); },
          [&](const Ball& b) { return norm3(sub(x, b.center)) - b.radius; },
          [&](const SolidTorus& t) {
            const double an = norm3(t.axis);
            const Vec3 axis{t.axis[0] / an, t.axis[1] / an, t.axis[2] / an};
            const Vec3 d = sub(x, t.center);
            const double along = dot3(d, axis);
            const Vec3 radial{d[0] - along * axis[0], d[1] - along * axis[1], d[2] - along * axis[2]};
            const double rho = norm3(radial);
            return std::hypot(rho - t.major_radius, along) - t.minor_radius;
          },
          [&](const ObstacleUnion& u) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : u.parts) best = std::min(best, signed_distance(p, x));
            return best;
          },
      },
      shape.kind);
}

double obstacle_extent(const ObstacleShape& shape) {
  return std::visit(Overloaded{
                        [](const NoObstacle&) { return 0.0; },
                        [](const Ball& b) { return norm3(b.center) + b.radius; },
                        [](const SolidTorus& t) {
                          return norm3(t.center) + t.major_radius + t.minor_radius;
                        },
                        [](const ObstacleUnion& u) {
                          double e = 0.0;
                          for (const auto& p : u.parts) e = std::max(e, obstacle_extent(p));
                          return e;
                        },
                    },
                    shape.kind);
}

std::vector<ObstacleShape> obstacle_components(const ObstacleShape& shape) {
  std::vector<ObstacleShape> out;
  std::visit(Overloaded{
                 [](const NoObstacle&) {},
                 [&](const Ball& b) { out.emplace_back(b); },
                 [&](const SolidTorus& t) { out.emplace_back(t); },
                 [&](const ObstacleUnion& u) {
                   for (const auto& p : u.parts) {
                     auto sub_parts = obstacle_components(p);
                     out.insert(out.end(), sub_parts.begin(), sub_parts.end());
                   }
                 },
             },
             shape.kind);
  return out;
}

std::string to_descriptor(const ObstacleShape& shape) {
  return std::visit(Overloaded{
                        [](const NoObstacle&) { return std::string("none"); },
                        [](const Ball& b) {
                          return "ball(" + fmt_vec(b.center) + ";" + fmt_double(b.radius) + ")";
                        },
                        [](const SolidTorus& t) {
                          return "torus(" + fmt_vec(t.center) + ";" + fmt_vec(t.axis) + ";" +
                                 fmt_double(t.major_radius) + "," + fmt_double(t.minor_radius) +
                                 ")";
                        },
                        [](const ObstacleUnion& u) {
                          std::string s = "union[";
                          for (std::size_t i = 0; i < u.parts.size(); ++i) {
                            if (i) s += "|";
                            s += to_descriptor(u.parts[i]);
                          }
                          return s + "]";
                        },
                    },
                    shape.kind);
}

ObstacleShape parse_obstacle(const std::string& descriptor) {
  return DescriptorParser(descriptor).parse_all();
}

// ---- GridTopology ---------------------------------------------------------------------

GridTopology::GridTopology(DomainSpec spec) : spec_(std::move(spec)), h_(2.0 * spec_.L / spec_.n) {
  classify();
  collect_boundary();
}

Dims GridTopology::face_dims(int axis) const {
  Dims d{n(), n(), n()};
  if (axis == 0) d.nx += 1;
  if (axis == 1) d.ny += 1;
  if (axis == 2) d.nz += 1;
  return d;
}

Dims GridTopology::edge_dims(int axis) const {
  Dims d{n() + 1, n() + 1, n() + 1};
  if (axis == 0) d.nx -= 1;
  if (axis == 1) d.ny -= 1;
  if (axis == 2) d.nz -= 1;
  return d;
}

Dims GridTopology::dims(Entity e, int axis) const {
  switch (e) {
    case Entity::Cell:
      return cell_dims();
    case Entity::Node:
      return node_dims();
    case Entity::Face:
      return face_dims(axis);
    case Entity::Edge:
      return edge_dims(axis);
  }
  return {};
}

std::size_t GridTopology::offset(Entity e, int axis) const {
  if (e == Entity::Cell || e == Entity::Node) return 0;
  std::size_t off = 0;
  for (int a = 0; a < axis; ++a) off += dims(e, a).size();
  return off;
}

std::size_t GridTopology::size(Entity e) const {
  if (e == Entity::Cell || e == Entity::Node) return dims(e).size();
  return dims(e, 0).size() + dims(e, 1).size() + dims(e, 2).size();
}

std::span<const EntityKind> GridTopology::kinds(Entity e) const {
  switch (e) {
    case Entity::Cell:
      return cell_kind_;
    case Entity::Face:
      return face_kind_;
    case Entity::Edge:
      return edge_kind_;
    case Entity::Node:
      return node_kind_;
  }
  return {};
}

std::size_t GridTopology::count(Entity e, EntityKind k) const {
  const auto ks = kinds(e);
  return std::size_t(std::count(ks.begin(), ks.end(), k));
}

std::size_t GridTopology::active_count(Entity e) const {
  const auto ks = kinds(e);
  return std::size_t(std::count_if(ks.begin(), ks.end(),
                                   [](EntityKind k) { return k != EntityKind::Inactive; }));
}

std::pair<int, std::array<int, 3>> GridTopology::locate(Entity e, std::size_t flat) const {
  int axis = 0;
  if (e == Entity::Face || e == Entity::Edge) {
    while (axis < 2 && flat >= offset(e, axis + 1)) ++axis;
    flat -= offset(e, axis);
  }
  return {axis, dims(e, axis).unravel(flat)};
}

Vec3 GridTopology::position(Entity e, std::size_t flat) const {
  const auto [axis, ijk] = locate(e, flat);
  Vec3 x{};
  for (int d = 0; d < 3; ++d) {
    bool centered = false;
    switch (e) {
      case Entity::Cell:
        centered = true;
        break;
      case Entity::Node:
        centered = false;
        break;
      case Entity::Face:
        centered = (d != axis);
        break;
      case Entity::Edge:
        centered = (d == axis);
        break;
    }
    x[d] = (ijk[d] + (centered ? 0.5 : 0.0)) * h_ - spec_.L;
  }
  return x;
}

void GridTopology::classify() {
  const int nn = n();
  const Dims cd = cell_dims();
  cell_kind_.assign(cd.size(), EntityKind::Inactive);
  for (int k = 0; k < nn; ++k)
    for (int j = 0; j < nn; ++j)
      for (int i = 0; i < nn; ++i) {
        const Vec3 x{(i + 0.5) * h_ - L(), (j + 0.5) * h_ - L(), (k + 0.5) * h_ - L()};
        if (signed_distance(spec_.obstacle, x) > 0.0) cell_kind_[cd.index(i, j, k)] = EntityKind::Interior;
      }

  // 0 = outside the box, 1 = obstacle, 2 = fluid
  auto slot = [&](int i, int j, int k) -> int {
    if (!cd.contains(i, j, k)) return 0;
    return cell_kind_[cd.index(i, j, k)] == EntityKind::Interior ? 2 : 1;
  };
  auto classify_neighbourhood = [](int fluid, int obstacle, int outside) {
    if (fluid == 0) return EntityKind::Inactive;
    if (outside > 0) return EntityKind::FarBoundary;
    if (obstacle > 0) return EntityKind::ObstacleBoundary;
    return EntityKind::Interior;
  };

  face_kind_.assign(size(Entity::Face), EntityKind::Inactive);
  for (int a = 0; a < 3; ++a) {
    const Dims fd = face_dims(a);
    const std::size_t off = offset(Entity::Face, a);
    for (int k = 0; k < fd.nz; ++k)
      for (int j = 0; j < fd.ny; ++j)
        for (int i = 0; i < fd.nx; ++i) {
          std::array<int, 3> lo{i, j, k};
          lo[a] -= 1;
          int counts[3] = {0, 0, 0};
          ++counts[slot(lo[0], lo[1], lo[2])];
          ++counts[slot(i, j, k)];
          face_kind_[off + fd.index(i, j, k)] = classify_neighbourhood(counts[2], counts[1], counts[0]);
        }
  }

  edge_kind_.assign(size(Entity::Edge), EntityKind::Inactive);
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    const Dims ed = edge_dims(a);
    const std::size_t off = offset(Entity::Edge, a);
    for (int k = 0; k < ed.nz; ++k)
      for (int j = 0; j < ed.ny; ++j)
        for (int i = 0; i < ed.nx; ++i) {
          int counts[3] = {0, 0, 0};
          for (int db = -1; db <= 0; ++db)
            for (int dc = -1; dc <= 0; ++dc) {
              std::array<int, 3> cell{i, j, k};
              cell[b] += db;
              cell[c] += dc;
              ++counts[slot(cell[0], cell[1], cell[2])];
            }
          edge_kind_[off + ed.index(i, j, k)] = classify_neighbourhood(counts[2], counts[1], counts[0]);
        }
  }

  const Dims nd = node_dims();
  node_kind_.assign(nd.size(), EntityKind::Inactive);
  for (int k = 0; k < nd.nz; ++k)
    for (int j = 0; j < nd.ny; ++j)
      for (int i = 0; i < nd.nx; ++i) {
        int counts[3] = {0, 0, 0};
        for (int dk = -1; dk <= 0; ++dk)
          for (int dj = -1; dj <= 0; ++dj)
            for (int di = -1; di <= 0; ++di) ++counts[slot(i + di, j + dj, k + dk)];
        node_kind_[nd.index(i, j, k)] = classify_neighbourhood(counts[2], counts[1], counts[0]);
      }
}

void GridTopology::collect_boundary() {
  boundary_.clear();
  boundary_slot_.assign(size(Entity::Face), npos);
  const Dims cd = cell_dims();
  const double eps = 1e-6 * std::max(1.0, L());
  for (int a = 0; a < 3; ++a) {
    const Dims fd = face_dims(a);
    const std::size_t off = offset(Entity::Face, a);
    for (std::size_t local = 0; local < fd.size(); ++local) {
      const std::size_t flat = off + local;
      const EntityKind kind = face_kind_[flat];
      if (kind != EntityKind::ObstacleBoundary && kind != EntityKind::FarBoundary) continue;
      const auto ijk = fd.unravel(local);
      std::array<int, 3> lo = ijk;
      lo[a] -= 1;
      const bool lo_fluid = fluid(lo[0], lo[1], lo[2]);
      BoundaryFace bf;
      bf.axis = a;
      bf.flat = flat;
      bf.side = lo_fluid ? +1 : -1;
      const auto& fc = lo_fluid ? lo : ijk;
      const auto& gc = lo_fluid ? ijk : lo;
      bf.cell = cd.index(fc[0], fc[1], fc[2]);
      bf.center = position(Entity::Face, flat);
      for (int d = 0; d < 3; ++d) bf.ghost_center[d] = (gc[d] + 0.5) * h_ - L();
      bf.far = (kind == EntityKind::FarBoundary);
      if (bf.far) {
        bf.smooth_normal = {0.0, 0.0, 0.0};
        bf.smooth_normal[a] = double(bf.side);
      } else {
        Vec3 g{};
        for (int d = 0; d < 3; ++d) {
          Vec3 xp = bf.center, xm = bf.center;
          xp[d] += eps;
          xm[d] -= eps;
          g[d] = (signed_distance(spec_.obstacle, xp) - signed_distance(spec_.obstacle, xm)) / (2 * eps);
        }
        const double gn = norm3(g);
        if (gn > 0.0) {
          bf.smooth_normal = {-g[0] / gn, -g[1] / gn, -g[2] / gn};
        } else {
          bf.smooth_normal = {0.0, 0.0, 0.0};
          bf.smooth_normal[a] = double(bf.side);
        }
      }
      boundary_slot_[flat] = boundary_.size();
      boundary_.push_back(bf);
    }
  }
}

TopologyPtr build_domain(const DomainSpec& spec) {
  if (spec.n < 8) throw GeometryError("grid needs at least 8 cells per axis, got " + std::to_string(spec.n));
  if (!(spec.L > 0.0) || !std::isfinite(spec.L)) throw GeometryError("half-width L must be positive");
  validate_shape(spec.obstacle);
  const double h = 2.0 * spec.L / spec.n;
  if (!spec.obstacle.empty()) {
    const double extent = obstacle_extent(spec.obstacle);
    if (!(extent + 2.0 * h < spec.L)) {
      std::ostringstream os;
      os << "obstacle extent " << extent << " plus two cell widths reaches the box boundary L=" << spec.L;
      throw GeometryError(os.str());
    }
  }
  auto topo = std::make_shared<const GridTopology>(spec);
  if (!spec.obstacle.empty() && topo->count(Entity::Cell, EntityKind::Inactive) == 0)
    throw GeometryError("obstacle is thinner than the grid resolution: no obstacle cell classified");
  return topo;
}

SurfaceMeasure surface_measure(const GridTopology& topo) {
  SurfaceMeasure m;
  const double area = topo.h() * topo.h();
  for (const auto& bf : topo.boundary_faces()) {
    if (bf.far) {
      m.far_area += area;
    } else {
      m.obstacle_area += area;
      m.obstacle_projected_area += area * std::abs(bf.smooth_normal[bf.axis]);
    }
  }
  return m;
}

}  // namespace xhodge
