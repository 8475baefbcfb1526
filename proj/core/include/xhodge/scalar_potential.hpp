#pragma once

// Cell-centered Poisson solves: the weak Neumann and weak Dirichlet pressures, the
// capacity potential q0 (0 on the obstacle, 1 on the far boundary) and the translation
// potentials q_j, pi_j.

#include "xhodge/linsolve.hpp"
#include "xhodge/operators.hpp"

namespace xhodge {

enum class FarMode { NaturalNeumann, ZeroDirichlet, FreeConstant };

const char* to_string(FarMode m);
FarMode parse_far_mode(const std::string& s);

struct PressureSolution {
  ScalarField p;
  ScalarBoundaryCondition bc;
  /// Gradient on every active face. For the weak Neumann solve the boundary faces carry
  /// the data the solve used there, i.e. the input field itself.
  FaceField grad;
  double lambda = 0.0;
  FarMode far = FarMode::NaturalNeumann;
  SolveStats stats;
};

/// Solves -div(grad_bc q) = f over the fluid cells. A pure-Neumann condition deflates
/// the constants and returns a mean-free q.
struct PoissonResult {
  ScalarField q;
  SolveStats stats;
};
PoissonResult solve_poisson(const TopologyPtr& topo, const ScalarBoundaryCondition& bc, const ScalarField& f,
                            const SolveOptions& opts = {});

PressureSolution solve_weak_neumann(const FaceField& u, const SolveOptions& opts = {});

struct CapacityPotential {
  ScalarField q;
  ScalarBoundaryCondition bc;
  FaceField grad;
  SolveStats stats;
};
/// Throws GeometryError for an empty obstacle.
CapacityPotential solve_q0(const TopologyPtr& topo, const SolveOptions& opts = {});

/// far must be ZeroDirichlet or FreeConstant. A precomputed q0 may be passed to avoid
/// re-solving it.
PressureSolution solve_weak_dirichlet(const FaceField& u, FarMode far, const SolveOptions& opts = {},
                                      const CapacityPotential* q0 = nullptr);

enum class FarDecay { ZeroDirichlet, DipoleDecay };
enum class DirichletPlacement { CellCenter, DistanceWeighted };

struct TranslationOptions {
  FarDecay far = FarDecay::DipoleDecay;
  DirichletPlacement placement = DirichletPlacement::DistanceWeighted;
};

struct TranslationHarmonics {
  int axis = 2;
  ScalarField q;   ///< Neumann potential, outward derivative e_j . nu on the obstacle
  FaceField h;     ///< e_j - grad q
  ScalarField pi;  ///< Dirichlet potential, x_j on the obstacle
  FaceField k;     ///< e_j - grad pi
  SolveStats q_stats, pi_stats;
};

TranslationHarmonics translation_harmonics(const TopologyPtr& topo, int axis, const TranslationOptions& topts = {},
                                           const SolveOptions& opts = {});

}  // namespace xhodge
