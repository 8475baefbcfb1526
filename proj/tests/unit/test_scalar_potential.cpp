#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "xhodge/sampling.hpp"
#include "xhodge/scalar_potential.hpp"

using namespace xhodge;
using namespace xhodge::testing;

namespace {

TopologyPtr ball(int n = 24) { return build_domain({4.0, n, Ball{{0, 0, 0}, 1.0}}); }

SolveOptions tight() {
  SolveOptions o;
  o.rel_tol = 1e-12;
  return o;
}

FaceField discrete_gradient(const TopologyPtr& t) {
  return gradient_zero_ghost(sample_bump(t, Bump{{2.0, 0.5, -0.3}, 1.0}));
}

FaceField discrete_curl(const TopologyPtr& t) {
  return curl_edge_to_face(sample_bump_edge_potential(t, Bump{{2.0, 0.5, -0.3}, 1.0}, {0.3, -0.5, 0.8}));
}

FaceField fourier(const TopologyPtr& t, unsigned seed) {
  std::mt19937_64 rng(seed);
  return sample_fourier(t, FourierField::random(rng, t->L()));
}

}  // namespace

TEST(ScalarPotential, FarModeNames) {
  for (FarMode m : {FarMode::NaturalNeumann, FarMode::ZeroDirichlet, FarMode::FreeConstant})
    EXPECT_EQ(parse_far_mode(to_string(m)), m);
  EXPECT_THROW(parse_far_mode("sideways"), ConfigError);
}

TEST(ScalarPotential, NeumannRecoversDiscreteGradient) {
  const TopologyPtr t = ball();
  const FaceField u = discrete_gradient(t);
  const PressureSolution s = solve_weak_neumann(u, tight());
  EXPECT_LE(norm2(s.grad - u), 1e-8 * norm2(u));
  EXPECT_EQ(s.far, FarMode::NaturalNeumann);
}

TEST(ScalarPotential, NeumannIgnoresDiscreteCurl) {
  const TopologyPtr t = ball();
  const FaceField u = discrete_curl(t);
  const PressureSolution s = solve_weak_neumann(u, tight());
  EXPECT_LE(norm2(restrict_to(s.grad, {EntityKind::Interior})), 1e-8 * norm2(u));
}

TEST(ScalarPotential, NeumannRemainderIsDivergenceFree) {
  const TopologyPtr t = ball();
  const FaceField u = fourier(t, 1);
  const PressureSolution s = solve_weak_neumann(u, tight());
  const ScalarField d = divergence(u - s.grad);
  EXPECT_LE(t->h() * max_abs(d), 1e-9 * max_abs(u));
  // boundary faces carry the input itself
  for (const BoundaryFace& bf : t->boundary_faces()) ASSERT_EQ(s.grad[bf.flat], u[bf.flat]);
}

TEST(ScalarPotential, ZeroInputGivesZeroPressure) {
  const TopologyPtr t = ball(16);
  const PressureSolution s = solve_weak_neumann(FaceField(t));
  EXPECT_EQ(max_abs(s.p), 0.0);
  const PressureSolution z = solve_weak_dirichlet(FaceField(t), FarMode::FreeConstant);
  EXPECT_EQ(max_abs(z.p), 0.0);
  EXPECT_EQ(z.lambda, 0.0);
}

TEST(ScalarPotential, CapacityPotentialMaximumPrinciple) {
  const TopologyPtr t = ball();
  const CapacityPotential q0 = solve_q0(t, tight());
  for (std::size_t c = 0; c < q0.q.size(); ++c) {
    if (!t->fluid(c)) continue;
    ASSERT_GT(q0.q[c], 0.0);
    ASSERT_LT(q0.q[c], 1.0);
  }
  // discrete harmonic in the fluid
  EXPECT_LE(t->h() * max_abs(divergence(q0.grad)), 1e-9 * max_abs(q0.grad));
  const double obstacle = boundary_flux(q0.grad, BoundaryPart::Obstacle);
  const double far = boundary_flux(q0.grad, BoundaryPart::Far);
  EXPECT_LT(obstacle, 0.0);
  EXPECT_NEAR(obstacle + far, 0.0, 1e-8 * std::abs(obstacle));
}

TEST(ScalarPotential, CapacityPotentialBoundaryValues) {
  const TopologyPtr t = ball();
  const CapacityPotential q0 = solve_q0(t, tight());
  double near = 0.0, far = 1.0;
  for (const BoundaryFace& bf : t->boundary_faces()) {
    const auto c = bf.cell;
    if (bf.far)
      far = std::min(far, q0.q[c]);
    else
      near = std::max(near, q0.q[c]);
  }
  // cells adjacent to the far boundary sit half a cell inside, next to the obstacle within about a cell
  EXPECT_GT(far, 0.9);
  EXPECT_LT(near, 0.5);
}

TEST(ScalarPotential, CapacityPotentialNeedsObstacle) {
  EXPECT_THROW(solve_q0(build_domain({2.0, 12, NoObstacle{}})), GeometryError);
}

TEST(ScalarPotential, FreeConstantRecoversMultipleOfGradQ0) {
  const TopologyPtr t = ball();
  const CapacityPotential q0 = solve_q0(t, tight());
  for (double c : {-2.0, 0.5, 1.0}) {
    FaceField u = q0.grad;
    u *= c;
    const PressureSolution s = solve_weak_dirichlet(u, FarMode::FreeConstant, tight(), &q0);
    EXPECT_NEAR(s.lambda, c, 1e-8 * std::abs(c));
    EXPECT_LE(norm2(s.grad - u), 1e-8 * norm2(u));
    const PressureSolution z = solve_weak_dirichlet(u, FarMode::ZeroDirichlet, tight(), &q0);
    EXPECT_LE(norm2(z.grad), 1e-8 * norm2(u));
  }
}

TEST(ScalarPotential, BranchesDifferByLambdaGradQ0) {
  const TopologyPtr t = ball();
  const CapacityPotential q0 = solve_q0(t, tight());
  const FaceField u = fourier(t, 2);
  const PressureSolution f = solve_weak_dirichlet(u, FarMode::FreeConstant, tight(), &q0);
  const PressureSolution z = solve_weak_dirichlet(u, FarMode::ZeroDirichlet, tight(), &q0);
  FaceField lq = q0.grad;
  lq *= f.lambda;
  EXPECT_LE(norm2(f.grad - z.grad - lq), 1e-8 * norm2(u));
  // the free branch is additive in its input
  const FaceField v = discrete_gradient(t);
  const PressureSolution fv = solve_weak_dirichlet(v, FarMode::FreeConstant, tight(), &q0);
  const PressureSolution fuv = solve_weak_dirichlet(u + v, FarMode::FreeConstant, tight(), &q0);
  EXPECT_NEAR(fuv.lambda, f.lambda + fv.lambda, 1e-8 * (std::abs(f.lambda) + 1.0));
}

TEST(ScalarPotential, DirichletRejectsNaturalMode) {
  const TopologyPtr t = ball(16);
  EXPECT_THROW(solve_weak_dirichlet(FaceField(t), FarMode::NaturalNeumann), ContractError);
}

TEST(ScalarPotential, TranslationHarmonicsAreOddInTheirAxis) {
  const TopologyPtr t = ball();
  const TranslationHarmonics th = translation_harmonics(t, 2, {}, tight());
  const Dims cd = t->cell_dims();
  double qodd = 0.0, piodd = 0.0;
  for (std::size_t c = 0; c < th.q.size(); ++c) {
    if (!t->fluid(c)) continue;
    const auto [a, ijk] = t->locate(Entity::Cell, c);
    const std::size_t m = cd.index(ijk[0], ijk[1], cd.nz - 1 - ijk[2]);
    qodd = std::max(qodd, std::abs(th.q[c] + th.q[m]));
    piodd = std::max(piodd, std::abs(th.pi[c] + th.pi[m]));
  }
  EXPECT_LE(qodd, 1e-8 * max_abs(th.q));
  EXPECT_LE(piodd, 1e-8 * max_abs(th.pi));
  // both harmonic fields are discretely divergence-free in the fluid
  EXPECT_LE(t->h() * max_abs(divergence(th.h)), 1e-8);
  EXPECT_LE(t->h() * max_abs(divergence(th.k)), 1e-8);
  EXPECT_THROW(translation_harmonics(t, 3), ContractError);
}
