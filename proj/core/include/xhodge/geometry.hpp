#pragma once

// Truncated exterior domain: the box [-L, L]^3 minus a voxelized obstacle, together
// with the staggered-grid entity classification used by every operator.
//
// Layout conventions (n cells per axis, width h = 2L/n):
//   cell (i,j,k)          center ((i+1/2)h - L, (j+1/2)h - L, (k+1/2)h - L)
//   face of axis a        node index along a, center index along the other two
//   edge of axis a        center index along a, node index along the other two
//   node (i,j,k)          node index along all three
// Every entity family is stored as a flat array; for faces and edges the three
// axis blocks are concatenated in the order x, y, z.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace xhodge {

using Vec3 = std::array<double, 3>;

struct NoObstacle {};

struct Ball {
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 1.0;
};

struct SolidTorus {
  Vec3 center{0.0, 0.0, 0.0};
  Vec3 axis{0.0, 0.0, 1.0};
  double major_radius = 1.2;
  double minor_radius = 0.5;
};

struct ObstacleShape;

struct ObstacleUnion {
  std::vector<ObstacleShape> parts;
};

struct ObstacleShape {
  std::variant<NoObstacle, Ball, SolidTorus, ObstacleUnion> kind;

  ObstacleShape() = default;
  ObstacleShape(NoObstacle s) : kind(s) {}        // NOLINT(google-explicit-constructor)
  ObstacleShape(Ball s) : kind(s) {}              // NOLINT(google-explicit-constructor)
  ObstacleShape(SolidTorus s) : kind(s) {}        // NOLINT(google-explicit-constructor)
  ObstacleShape(ObstacleUnion s) : kind(std::move(s)) {}  // NOLINT(google-explicit-constructor)

  bool empty() const;
};

/// Signed distance to the obstacle surface: positive in the fluid, negative inside.
/// For an empty obstacle the result is +infinity.
double signed_distance(const ObstacleShape& shape, const Vec3& x);

/// Largest |x| over the closed obstacle (0 for an empty obstacle).
double obstacle_extent(const ObstacleShape& shape);

/// Leaf shapes of a (possibly nested) union, in declaration order.
std::vector<ObstacleShape> obstacle_components(const ObstacleShape& shape);

/// Round-trippable textual descriptor, e.g. "ball(0,0,0;1)" or
/// "torus(0,0,0;0,0,1;1.2,0.5)". Doubles are printed with 17 significant digits.
std::string to_descriptor(const ObstacleShape& shape);
ObstacleShape parse_obstacle(const std::string& descriptor);

struct DomainSpec {
  double L = 4.0;
  int n = 32;
  ObstacleShape obstacle;
};

enum class Entity : std::uint8_t { Cell, Face, Edge, Node };

/// Classification shared by every entity family. Cells use only Inactive (obstacle)
/// and Interior (fluid).
enum class EntityKind : std::uint8_t { Inactive = 0, Interior, ObstacleBoundary, FarBoundary };

struct Dims {
  int nx = 0, ny = 0, nz = 0;
  std::size_t size() const { return std::size_t(nx) * std::size_t(ny) * std::size_t(nz); }
  std::size_t index(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(nx) * (std::size_t(j) + std::size_t(ny) * std::size_t(k));
  }
  bool contains(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < nx && j < ny && k < nz;
  }
  std::array<int, 3> unravel(std::size_t idx) const {
    const int i = int(idx % std::size_t(nx));
    idx /= std::size_t(nx);
    const int j = int(idx % std::size_t(ny));
    return {i, j, int(idx / std::size_t(ny))};
  }
  int operator[](int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
};

/// A fluid-cell face lying on the obstacle surface or on the box surface.
struct BoundaryFace {
  int axis = 0;
  std::size_t flat = 0;      ///< index into the flat face layout
  int side = 1;              ///< +1 when the outward normal (out of the fluid) is +e_axis
  std::size_t cell = 0;      ///< the fluid cell behind the face
  Vec3 center{};             ///< face center
  Vec3 ghost_center{};       ///< center of the non-fluid cell across the face
  Vec3 smooth_normal{};      ///< outward unit normal from the signed-distance gradient
  bool far = false;
};

class GridTopology {
 public:
  explicit GridTopology(DomainSpec spec);

  const DomainSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  double L() const { return spec_.L; }
  double h() const { return h_; }
  double cell_volume() const { return h_ * h_ * h_; }
  bool has_obstacle() const { return !spec_.obstacle.empty(); }

  Dims cell_dims() const { return {n(), n(), n()}; }
  Dims node_dims() const { return {n() + 1, n() + 1, n() + 1}; }
  Dims face_dims(int axis) const;
  Dims edge_dims(int axis) const;
  /// Dims of component `axis` of the given entity family (axis ignored for cells/nodes).
  Dims dims(Entity e, int axis = 0) const;
  /// Start of component `axis` inside the flat layout.
  std::size_t offset(Entity e, int axis) const;
  std::size_t size(Entity e) const;
  static int components(Entity e) { return (e == Entity::Face || e == Entity::Edge) ? 3 : 1; }

  std::span<const EntityKind> kinds(Entity e) const;
  EntityKind kind(Entity e, std::size_t flat) const { return kinds(e)[flat]; }
  bool active(Entity e, std::size_t flat) const { return kinds(e)[flat] != EntityKind::Inactive; }
  bool fluid(std::size_t cell) const { return cell_kind_[cell] == EntityKind::Interior; }
  bool fluid(int i, int j, int k) const {
    return cell_dims().contains(i, j, k) && fluid(cell_dims().index(i, j, k));
  }
  std::size_t count(Entity e, EntityKind k) const;
  std::size_t active_count(Entity e) const;

  /// Location of a flat entity; for faces and edges the component is deduced.
  Vec3 position(Entity e, std::size_t flat) const;
  /// Axis and (i,j,k) of a flat face/edge index.
  std::pair<int, std::array<int, 3>> locate(Entity e, std::size_t flat) const;

  std::span<const BoundaryFace> boundary_faces() const { return boundary_; }
  /// Flat face index -> position in boundary_faces(), or npos.
  std::size_t boundary_slot(std::size_t flat_face) const { return boundary_slot_[flat_face]; }
  static constexpr std::size_t npos = std::size_t(-1);

 private:
  void classify();
  void collect_boundary();

  DomainSpec spec_;
  double h_;
  std::vector<EntityKind> cell_kind_;
  std::vector<EntityKind> face_kind_;
  std::vector<EntityKind> edge_kind_;
  std::vector<EntityKind> node_kind_;
  std::vector<BoundaryFace> boundary_;
  std::vector<std::size_t> boundary_slot_;
};

using TopologyPtr = std::shared_ptr<const GridTopology>;

/// Validates the domain description and builds the classified grid. Throws GeometryError.
TopologyPtr build_domain(const DomainSpec& spec);

struct SurfaceMeasure {
  double obstacle_area = 0.0;            ///< raw staircase area, faces x h^2
  double obstacle_projected_area = 0.0;  ///< sum of h^2 |n_face . nu_smooth|
  double far_area = 0.0;
};

SurfaceMeasure surface_measure(const GridTopology& topo);

}  // namespace xhodge
