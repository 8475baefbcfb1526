#pragma once

// u = h + rot w + grad p in the two boundary-condition flavors, with diagnostics,
// probe-based harmonic-dimension estimation and inequality probes.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xhodge/sampling.hpp"
#include "xhodge/scalar_potential.hpp"
#include "xhodge/vector_potential.hpp"

namespace xhodge {

enum class HarmonicFlavor {
  NormalHarmonic,      ///< h . nu = 0: weak Neumann p, w x nu = 0
  TangentialHarmonic,  ///< h x nu = 0: weak Dirichlet p, w . nu = 0
};

const char* to_string(HarmonicFlavor f);
HarmonicFlavor parse_harmonic_flavor(const std::string& s);
PotentialFlavor potential_flavor(HarmonicFlavor f);

struct HodgeParts {
  FaceField h;
  EdgeField w;
  FaceField rot_w;
  ScalarField p;
  FaceField grad_p;  ///< includes lambda grad q0 for the free-constant branch
  double lambda = 0.0;
  HarmonicFlavor flavor = HarmonicFlavor::NormalHarmonic;
  FarMode far = FarMode::NaturalNeumann;
  SolveStats p_stats, w_stats;
};

struct DecomposeOptions {
  SolveOptions solver;
  std::vector<double> r_list{1.5, 2.0, 3.0};
};

struct DiagnosticsReport {
  double u_norm = 0.0, h_norm = 0.0, rot_w_norm = 0.0, grad_p_norm = 0.0;
  double lambda = 0.0;
  double reconstruction_rel_err = 0.0;
  double div_h_rel = 0.0;  ///< h ||div h|| / ||u||
  double rot_h_rel = 0.0;  ///< h ||P_E curl_f2e h|| / ||u||
  double div_w_rel = 0.0;  ///< ||gauge divergence of w|| / ||u||
  double flux_obstacle = 0.0, flux_far = 0.0;
  std::array<double, 6> flux_patches{};  ///< obstacle flux by dominant normal -x,+x,-y,+y,-z,+z
  double boundary_circulation_rel = 0.0;  ///< h ||curl_f2e h on obstacle-boundary edges|| / ||u||
  double trace_normal_weak = 0.0;         ///< relative weak normal trace against a cutoff
  double trace_tangential_weak = 0.0;     ///< max relative weak tangential trace
  double ortho_h_gradp = 0.0, ortho_h_rotw = 0.0, ortho_gradp_rotw = 0.0;
  std::vector<std::pair<double, double>> stability;  ///< (r, ratio)
  int p_iterations = 0, w_iterations = 0;
  double p_residual = 0.0, w_residual = 0.0;

  std::vector<std::pair<std::string, double>> key_values() const;
};

std::pair<HodgeParts, DiagnosticsReport> decompose_normal(const FaceField& u, const DecomposeOptions& opts = {});
/// far: ZeroDirichlet or FreeConstant. q0 may be supplied to skip its solve.
std::pair<HodgeParts, DiagnosticsReport> decompose_tangential(const FaceField& u, FarMode far,
                                                              const DecomposeOptions& opts = {},
                                                              const CapacityPotential* q0 = nullptr);
std::pair<HodgeParts, DiagnosticsReport> decompose(const FaceField& u, HarmonicFlavor flavor, FarMode far,
                                                   const DecomposeOptions& opts = {},
                                                   const CapacityPotential* q0 = nullptr);

/// Diagnostics of stored parts; grad p and rot w are recomputed from p, lambda and w.
DiagnosticsReport diagnose(const FaceField& u, const HodgeParts& parts, const std::vector<double>& r_list);
/// Rebuilds rot_w, grad_p and h from (w, p, lambda) and the flavor.
void complete_parts(const FaceField& u, HodgeParts& parts);

// ---- traces and norms --------------------------------------------------------------------

/// Smooth cutoff equal to 1 within distance `inner` of the obstacle and 0 beyond `outer`.
struct ObstacleCutoff {
  const ObstacleShape* shape = nullptr;
  double inner = 0.5, outer = 1.5;
  double value(const Vec3& x) const;
  Vec3 grad(const Vec3& x) const;
};

/// (h, grad chi) + (div h, chi), relative to ||h|| ||grad chi|| + ||div h|| ||chi||.
double weak_normal_trace(const FaceField& h, const ObstacleCutoff& chi);
/// max_i |(rot_int h, chi e_i) - (h, grad chi x e_i)|, each relative to the magnitudes of
/// the two terms; rot_int uses interior edges only.
double weak_tangential_trace(const FaceField& h, const ObstacleCutoff& chi);

struct SurfaceTraces {
  double normal_rel = 0.0;      ///< (sum |h.nu|^2 h^2)^(1/2) / (sum |h|^2 h^2)^(1/2), smoothed normals
  double tangential_rel = 0.0;  ///< same with |h x nu|
};
/// Cell-averaged h at the fluid cells behind obstacle-boundary faces.
SurfaceTraces surface_traces(const FaceField& h);

/// L^r norm of one-sided differences of each stored component along each axis, over pairs
/// of active entries (optionally both inside `region`).
template <Entity E>
double component_gradient_lr(const Field<E>& f, double r, const std::vector<unsigned char>* region = nullptr);

/// Closed path through cell centers; the sum of face values times h along each step.
double cell_loop_circulation(const FaceField& h, const std::vector<std::array<int, 3>>& cells);
/// Rectangle in the plane x_axis = c through cell centers, corners nearest (u0,v0),(u1,v1)
/// in the two remaining coordinates (cyclic order), traversed counter-clockwise.
std::vector<std::array<int, 3>> rectangle_loop(const GridTopology& topo, int plane_axis, double c, double u0,
                                               double u1, double v0, double v1);

/// Rectangle through the hole of an axis-aligned torus, linking its tube once, oriented
/// so that the field of a current along the core circle (counter-clockwise about the
/// axis) has positive circulation. Empty for a tilted torus.
std::vector<std::array<int, 3>> torus_threading_loop(const GridTopology& topo, const SolidTorus& torus);

// ---- probes and harmonic dimension -------------------------------------------------------

/// Deterministic probe fields: uniform fields, sources inside each obstacle component,
/// loops threading each torus, solenoidal and gradient bumps, random Fourier fields.
std::vector<FaceField> probe_suite(const TopologyPtr& topo, int count, std::uint64_t seed = 42);

struct HarmonicBasisEstimate {
  HarmonicFlavor flavor = HarmonicFlavor::NormalHarmonic;
  FarMode far = FarMode::NaturalNeumann;
  int dimension = 0;
  std::vector<FaceField> basis;
  std::vector<double> singular_values;  ///< descending, of the normalized residual matrix
  int probes = 0, used = 0;
  double baseline_quality = 0.0;
};

HarmonicBasisEstimate estimate_harmonic_dimension(const TopologyPtr& topo, HarmonicFlavor flavor, FarMode far,
                                                  int n_probes = 12, double svd_tol = 1e-3, std::uint64_t seed = 42,
                                                  const SolveOptions& opts = {});

struct InequalityRow {
  int field = 0;
  double r = 2.0;
  double grad_norm = 0.0, rot_norm = 0.0, div_norm = 0.0, collar_norm = 0.0;
  double ratio = 0.0;           ///< grad / (rot + div + collar)
  double deflated_ratio = -1.0; ///< grad / (rot + div) after projecting off the basis; -1 when absent
};

/// Fields are masked to the flavor's boundary condition before measuring. The collar is
/// Omega intersected with the ball of radius obstacle extent + 2.
std::vector<InequalityRow> inequality_probe(const std::vector<FaceField>& fields, PotentialFlavor flavor,
                                            const std::vector<double>& r_list = {1.5, 2.0, 3.0},
                                            const std::vector<FaceField>* harmonic_basis = nullptr);

/// Stability ratio (||h||_r + ||grad w||_r + ||grad p||_r) / ||u||_r.
double stability_ratio(const FaceField& u, const HodgeParts& parts, double r);

}  // namespace xhodge
