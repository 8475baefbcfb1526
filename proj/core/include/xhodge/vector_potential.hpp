#pragma once

// Edge-based vector potentials. The unknown w lives on edges so that rot w is the face
// field curl_edge_to_face(w); the gauge term uses the node divergence of w.
//
//   A w = P_E [ curl_f2e(curl_e2f(w)) - node_gradient(P_N edge_divergence(w)) ]
//   rhs = P_E curl_f2e(u)
//
// VFlavor (w x nu = 0): E = interior edges, N = interior nodes. Both the obstacle and
// the far boundary are constrained, so rot w has zero flux through every boundary face.
// XFlavor (w . nu = 0): E = all active edges, N = all active nodes. The normal condition
// is the natural condition of the gauge term.

#include <optional>
#include <vector>

#include "xhodge/linsolve.hpp"
#include "xhodge/operators.hpp"

namespace xhodge {

enum class PotentialFlavor { XFlavor, VFlavor };

const char* to_string(PotentialFlavor f);

struct PotentialMasks {
  std::vector<unsigned char> edge;  ///< 1 on free edge unknowns
  std::vector<unsigned char> node;  ///< 1 on gauge nodes
};

PotentialMasks potential_masks(const GridTopology& topo, PotentialFlavor flavor);

LinearOperator assemble_curlcurl_operator(const TopologyPtr& topo, PotentialFlavor flavor);

/// P_E curl_f2e(u).
EdgeField curlcurl_rhs(const FaceField& u, PotentialFlavor flavor);

/// Kernel of the VFlavor operator: the node gradient of the discrete harmonic function
/// that is 0 on obstacle-side boundary nodes and 1 on the box surface. Empty without an
/// obstacle. Orthonormal in the flat (unweighted) sense.
std::vector<EdgeField> vflavor_kernel(const TopologyPtr& topo, const SolveOptions& opts = {});

struct VectorPotentialSolution {
  EdgeField w;
  FaceField rot_w;
  SolveStats stats;
  double div_norm = 0.0;                  ///< ||P_N edge_divergence(w)||_2
  double rhs_orthogonality = 0.0;         ///< max_i |<rhs, q_i>| / ||rhs||
  std::vector<double> kernel_components;  ///< <w, q_i> for every deflation vector
};

/// When `kernel` is not given, the VFlavor kernel is computed and deflated automatically;
/// XFlavor uses no deflation unless a basis is passed.
VectorPotentialSolution solve_vector_potential(const FaceField& u, PotentialFlavor flavor, const SolveOptions& opts = {},
                                               const std::optional<std::vector<EdgeField>>& kernel = std::nullopt,
                                               const std::optional<EdgeField>& initial_guess = std::nullopt);

/// ||P_N edge_divergence(w)||_2.
double gauge_divergence_norm(const EdgeField& w, PotentialFlavor flavor);

}  // namespace xhodge
