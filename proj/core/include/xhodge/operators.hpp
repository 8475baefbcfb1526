#pragma once

// MAC difference operators. With h the cell width:
//   gradient          cell -> face   (p_hi - p_lo)/h, boundary faces from a condition
//   divergence        face -> cell   signed flux sum / h over the six faces
//   curl_face_to_edge face -> edge   circulation of the four faces around an edge
//   curl_edge_to_face edge -> face   circulation of the four edges bounding a face
//   node_gradient     node -> edge
//   edge_divergence   edge -> node   (= -node_gradient^T)
// curl_face_to_edge is the exact transpose of curl_edge_to_face, and divergence is
// minus the transpose of the gradient with zero ghost values.

#include <functional>
#include <vector>

#include "xhodge/fields.hpp"

namespace xhodge {

/// Per-boundary-face affine condition for a cell-centered scalar q. On boundary face b
/// the outward derivative is (coef[b] * q_in + value[b]) / h, where q_in is the fluid
/// cell behind the face.
///   Dirichlet value g (ghost at distance fraction theta): coef = -1/theta, value = g/theta
///   Neumann outward derivative g:                         coef = 0,        value = h g
///   ghost equal to kappa * q_in:                          coef = kappa - 1, value = 0
struct ScalarBoundaryCondition {
  std::vector<double> coef;
  std::vector<double> value;

  static ScalarBoundaryCondition neumann(const GridTopology& topo);
  static ScalarBoundaryCondition dirichlet(const GridTopology& topo, double obstacle_value, double far_value);

  void set_dirichlet(std::size_t slot, double g, double theta = 1.0) {
    coef[slot] = -1.0 / theta;
    value[slot] = g / theta;
  }
  void set_neumann(std::size_t slot, double outward_derivative, double h) {
    coef[slot] = 0.0;
    value[slot] = h * outward_derivative;
  }
  void set_ghost_ratio(std::size_t slot, double kappa) {
    coef[slot] = kappa - 1.0;
    value[slot] = 0.0;
  }
  /// Same coefficients, zero data.
  ScalarBoundaryCondition homogeneous() const;
};

FaceField gradient(const ScalarField& p, const ScalarBoundaryCondition& bc);
/// Gradient with zero ghost values on every boundary face.
FaceField gradient_zero_ghost(const ScalarField& p);
ScalarField divergence(const FaceField& f);
EdgeField curl_face_to_edge(const FaceField& f);
FaceField curl_edge_to_face(const EdgeField& e);
EdgeField node_gradient(const NodeField& phi);
NodeField edge_divergence(const EdgeField& e);

/// Minus the Laplacian of q under the homogeneous part of bc:
/// (A q)_c = (1/h^2) [ sum_interior (q_c - q_nb) - sum_boundary coef q_c ].
ScalarField neg_laplacian(const ScalarField& q, const ScalarBoundaryCondition& bc);
/// Diagonal of neg_laplacian.
ScalarField neg_laplacian_diagonal(const TopologyPtr& topo, const ScalarBoundaryCondition& bc);

/// Samples f at the active entities of the family (face and edge samplers receive the
/// component axis). Inactive entries stay zero.
ScalarField sample_cells(const TopologyPtr& topo, const std::function<double(const Vec3&)>& f);
NodeField sample_nodes(const TopologyPtr& topo, const std::function<double(const Vec3&)>& f);
FaceField sample_faces(const TopologyPtr& topo, const std::function<Vec3(const Vec3&)>& f);
EdgeField sample_edges(const TopologyPtr& topo, const std::function<Vec3(const Vec3&)>& f);

enum class BoundaryPart { Obstacle, Far, All };

/// Outward flux sum over boundary faces, side * f * h^2.
double boundary_flux(const FaceField& f, BoundaryPart part);

/// Cell-center vector obtained by averaging the two faces of each axis.
Vec3 cell_average(const FaceField& f, std::size_t cell);

}  // namespace xhodge
