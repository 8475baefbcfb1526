#pragma once

// Analytic fields evaluated pointwise at cell, face or edge centers.

#include <cstdint>
#include <random>

#include "xhodge/fields.hpp"

namespace xhodge {

/// Smooth compactly supported bump exp(-1/(1 - s^2)), s = |x - center| / width.
struct Bump {
  Vec3 center{0.0, 0.0, 0.0};
  double width = 1.0;

  double value(const Vec3& x) const;
  Vec3 grad(const Vec3& x) const;
};

struct LoopSpec {
  double radius = 1.2;
  Vec3 center{0.0, 0.0, 0.0};
  Vec3 axis{0.0, 0.0, 1.0};
  int segments = 512;
  double current = 1.0;
};

Vec3 biot_savart_eval(const LoopSpec& loop, const Vec3& x);

/// Random low-frequency vector field sum_m a_m sin(k_m . x + phi_m).
struct FourierField {
  std::vector<Vec3> k, amp;
  std::vector<double> phase;

  static FourierField random(std::mt19937_64& rng, double L, int modes = 4);
  Vec3 eval(const Vec3& x) const;
};

FaceField sample_uniform(const TopologyPtr& topo, int axis);
ScalarField sample_ball_q0(const TopologyPtr& topo, double a);
FaceField sample_ball_grad_q0(const TopologyPtr& topo, double a);
/// Throws ContractError when a sample point lies on the loop.
FaceField sample_biot_savart_loop(const TopologyPtr& topo, const LoopSpec& loop);
/// Pointwise curl of bump * direction.
FaceField sample_solenoidal_bump(const TopologyPtr& topo, const Bump& bump, const Vec3& direction = {0, 0, 1});
FaceField sample_gradient_bump(const TopologyPtr& topo, const Bump& bump);
ScalarField sample_bump(const TopologyPtr& topo, const Bump& bump);
/// bump * direction sampled on edges; its discrete curl is exactly divergence-free.
EdgeField sample_bump_edge_potential(const TopologyPtr& topo, const Bump& bump, const Vec3& direction);
/// Field of a unit point source, (x - c) / (4 pi |x - c|^3).
FaceField sample_point_source(const TopologyPtr& topo, const Vec3& center, double strength = 1.0);
FaceField sample_fourier(const TopologyPtr& topo, const FourierField& f);

}  // namespace xhodge
