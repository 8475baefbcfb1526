#include "xhodge/scalar_potential.hpp"

#include <algorithm>
#include <cmath>

namespace xhodge {
namespace {

double radius(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

LinearOperator laplacian_operator(const TopologyPtr& topo, const ScalarBoundaryCondition& bc) {
  LinearOperator A;
  A.dim = topo->size(Entity::Cell);
  // Shared copies keep the operator valid after the caller's objects go away.
  auto hom = std::make_shared<ScalarBoundaryCondition>(bc.homogeneous());
  A.apply = [topo, hom](const Vector& x, Vector& y) {
    const ScalarField q(topo, x);
    y = neg_laplacian(q, *hom).raw();
  };
  A.diagonal = [topo, hom]() { return neg_laplacian_diagonal(topo, *hom).raw(); };
  return A;
}

bool pure_neumann(const ScalarBoundaryCondition& bc) {
  return std::all_of(bc.coef.begin(), bc.coef.end(), [](double c) { return c == 0.0; });
}

}  // namespace

const char* to_string(FarMode m) {
  switch (m) {
    case FarMode::NaturalNeumann:
      return "neumann";
    case FarMode::ZeroDirichlet:
      return "zero";
    case FarMode::FreeConstant:
      return "free";
  }
  return "?";
}

FarMode parse_far_mode(const std::string& s) {
  if (s == "neumann" || s == "natural") return FarMode::NaturalNeumann;
  if (s == "zero" || s == "zero-dirichlet") return FarMode::ZeroDirichlet;
  if (s == "free" || s == "free-constant") return FarMode::FreeConstant;
  throw ConfigError("unknown far mode '" + s + "' (expected neumann, zero or free)");
}

PoissonResult solve_poisson(const TopologyPtr& topo, const ScalarBoundaryCondition& bc, const ScalarField& f,
                            const SolveOptions& opts) {
  // Boundary data moves to the right-hand side: A q = f + div(grad_bc 0).
  const ScalarField zero(topo);
  ScalarField rhs = f;
  rhs += divergence(gradient(zero, bc));
  rhs.clear_inactive();

  SolveOptions o = opts;
  if (pure_neumann(bc)) {
    Vector ones(topo->size(Entity::Cell), 0.0);
    for (std::size_t c = 0; c < ones.size(); ++c)
      if (topo->fluid(c)) ones[c] = 1.0;
    o.deflation.push_back(std::move(ones));
  }
  SolveResult s = cg_solve(laplacian_operator(topo, bc), rhs.raw(), o);
  return {ScalarField(topo, std::move(s.x)), std::move(s.stats)};
}

PressureSolution solve_weak_neumann(const FaceField& u, const SolveOptions& opts) {
  const TopologyPtr& topo = u.topo_ptr();
  if (!u.all_finite()) throw ContractError("input field has non-finite entries");
  PressureSolution out;
  out.far = FarMode::NaturalNeumann;
  out.bc = ScalarBoundaryCondition::neumann(*topo);
  // Testing against every cell function leaves only interior faces in the pairing.
  const FaceField u_int = restrict_to(u, {EntityKind::Interior});
  ScalarField f = divergence(u_int);
  f *= -1.0;
  PoissonResult r = solve_poisson(topo, out.bc, f, opts);
  out.p = std::move(r.q);
  out.stats = std::move(r.stats);
  out.grad = gradient(out.p, out.bc);
  for (const BoundaryFace& bf : topo->boundary_faces()) out.grad[bf.flat] = u[bf.flat];
  return out;
}

CapacityPotential solve_q0(const TopologyPtr& topo, const SolveOptions& opts) {
  if (!topo->has_obstacle()) throw GeometryError("q0 needs a nonempty obstacle");
  CapacityPotential out;
  out.bc = ScalarBoundaryCondition::dirichlet(*topo, 0.0, 1.0);
  PoissonResult r = solve_poisson(topo, out.bc, ScalarField(topo), opts);
  out.q = std::move(r.q);
  out.stats = std::move(r.stats);
  out.grad = gradient(out.q, out.bc);
  return out;
}

PressureSolution solve_weak_dirichlet(const FaceField& u, FarMode far, const SolveOptions& opts,
                                      const CapacityPotential* q0) {
  if (far == FarMode::NaturalNeumann) throw ContractError("weak Dirichlet solve needs a Dirichlet far mode");
  if (!u.all_finite()) throw ContractError("input field has non-finite entries");
  const TopologyPtr& topo = u.topo_ptr();
  PressureSolution out;
  out.far = far;
  out.bc = ScalarBoundaryCondition::dirichlet(*topo, 0.0, 0.0);
  ScalarField f = divergence(u);
  f *= -1.0;
  PoissonResult r = solve_poisson(topo, out.bc, f, opts);
  out.p = std::move(r.q);
  out.stats = std::move(r.stats);
  out.grad = gradient(out.p, out.bc);
  if (far == FarMode::ZeroDirichlet) return out;

  CapacityPotential local;
  if (!q0) {
    local = solve_q0(topo, opts);
    q0 = &local;
  }
  const double gg = inner_product(q0->grad, q0->grad);
  if (!(gg > 0.0)) throw ContractError("capacity potential has zero energy");
  out.lambda = (inner_product(u, q0->grad) - inner_product(out.grad, q0->grad)) / gg;
  out.p.axpy(out.lambda, q0->q);
  out.grad.axpy(out.lambda, q0->grad);
  out.bc = ScalarBoundaryCondition::dirichlet(*topo, 0.0, out.lambda);
  return out;
}

TranslationHarmonics translation_harmonics(const TopologyPtr& topo, int axis, const TranslationOptions& topts,
                                           const SolveOptions& opts) {
  if (!topo->has_obstacle()) throw GeometryError("translation harmonics need a nonempty obstacle");
  if (axis < 0 || axis > 2) throw ContractError("axis must be 0, 1 or 2");
  const double h = topo->h();
  const auto faces = topo->boundary_faces();
  const ObstacleShape& shape = topo->spec().obstacle;

  ScalarBoundaryCondition qbc = ScalarBoundaryCondition::neumann(*topo);
  ScalarBoundaryCondition pbc = ScalarBoundaryCondition::neumann(*topo);
  for (std::size_t s = 0; s < faces.size(); ++s) {
    const BoundaryFace& bf = faces[s];
    const Vec3 xin = topo->position(Entity::Cell, bf.cell);
    if (bf.far) {
      if (topts.far == FarDecay::DipoleDecay) {
        const double kappa = std::pow(radius(xin) / radius(bf.ghost_center), 2);
        qbc.set_ghost_ratio(s, kappa);
        pbc.set_ghost_ratio(s, kappa);
      } else {
        qbc.set_dirichlet(s, 0.0);
        pbc.set_dirichlet(s, 0.0);
      }
      continue;
    }
    // Staircase normal: e_j . nu is +-1 on faces of axis j and 0 elsewhere.
    qbc.set_neumann(s, bf.axis == axis ? double(bf.side) : 0.0, h);
    if (topts.placement == DirichletPlacement::DistanceWeighted) {
      const double phi_in = signed_distance(shape, xin);
      const double phi_g = signed_distance(shape, bf.ghost_center);
      const double theta = std::clamp(phi_in / (phi_in - phi_g), 0.05, 1.0);
      const double xb = xin[axis] + theta * (bf.ghost_center[axis] - xin[axis]);
      pbc.set_dirichlet(s, xb, theta);
    } else {
      pbc.set_dirichlet(s, bf.ghost_center[axis]);
    }
  }

  TranslationHarmonics out;
  out.axis = axis;
  const FaceField e = [&] {
    FaceField f(topo);
    for (std::size_t i = topo->offset(Entity::Face, axis); i < topo->offset(Entity::Face, axis) + topo->face_dims(axis).size(); ++i)
      if (topo->active(Entity::Face, i)) f[i] = 1.0;
    return f;
  }();

  PoissonResult rq = solve_poisson(topo, qbc, ScalarField(topo), opts);
  out.q = std::move(rq.q);
  out.q_stats = std::move(rq.stats);
  out.h = e - gradient(out.q, qbc);

  PoissonResult rp = solve_poisson(topo, pbc, ScalarField(topo), opts);
  out.pi = std::move(rp.q);
  out.pi_stats = std::move(rp.stats);
  out.k = e - gradient(out.pi, pbc);
  return out;
}

}  // namespace xhodge
