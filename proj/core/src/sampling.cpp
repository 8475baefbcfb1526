#include "xhodge/sampling.hpp"

#include <cmath>
#include <numbers>

#include "xhodge/operators.hpp"

namespace xhodge {
namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Vec3 unit(const Vec3& a) {
  const double n = norm(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

}  // namespace

double Bump::value(const Vec3& x) const {
  const double s = norm(sub(x, center)) / width;
  if (s >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

Vec3 Bump::grad(const Vec3& x) const {
  const Vec3 d = sub(x, center);
  const double r = norm(d);
  const double s = r / width;
  if (s >= 1.0 || r == 0.0) return {0.0, 0.0, 0.0};
  const double q = 1.0 - s * s;
  const double dbds = std::exp(-1.0 / q) * (-2.0 * s / (q * q));
  const double f = dbds / (r * width);
  return {f * d[0], f * d[1], f * d[2]};
}

Vec3 biot_savart_eval(const LoopSpec& loop, const Vec3& x) {
  const Vec3 n = unit(loop.axis);
  // Orthonormal frame (e1, e2, n) spanning the loop plane.
  const Vec3 helper = std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 e1 = unit(cross(helper, n));
  const Vec3 e2 = cross(n, e1);

  // Distance to the circle, for the singularity check.
  const Vec3 d = sub(x, loop.center);
  const double along = dot(d, n);
  const double rho = std::hypot(dot(d, e1), dot(d, e2));
  if (std::hypot(rho - loop.radius, along) < 1e-9 * loop.radius)
    throw ContractError("Biot-Savart sample point lies on the loop");

  Vec3 b{0.0, 0.0, 0.0};
  const double dt = 2.0 * std::numbers::pi / loop.segments;
  for (int s = 0; s < loop.segments; ++s) {
    const double t = (s + 0.5) * dt;
    const double c = std::cos(t), sn = std::sin(t);
    const Vec3 xs{loop.center[0] + loop.radius * (c * e1[0] + sn * e2[0]),
                  loop.center[1] + loop.radius * (c * e1[1] + sn * e2[1]),
                  loop.center[2] + loop.radius * (c * e1[2] + sn * e2[2])};
    const Vec3 dl{loop.radius * dt * (-sn * e1[0] + c * e2[0]), loop.radius * dt * (-sn * e1[1] + c * e2[1]),
                  loop.radius * dt * (-sn * e1[2] + c * e2[2])};
    const Vec3 r = sub(x, xs);
    const double rn = norm(r);
    const Vec3 cr = cross(dl, r);
    const double w = loop.current / (4.0 * std::numbers::pi * rn * rn * rn);
    b[0] += w * cr[0];
    b[1] += w * cr[1];
    b[2] += w * cr[2];
  }
  return b;
}

FourierField FourierField::random(std::mt19937_64& rng, double L, int modes) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierField f;
  const double kmax = std::numbers::pi / L * 2.0;
  for (int m = 0; m < modes; ++m) {
    f.k.push_back({kmax * u(rng), kmax * u(rng), kmax * u(rng)});
    f.amp.push_back({u(rng), u(rng), u(rng)});
    f.phase.push_back(std::numbers::pi * u(rng));
  }
  return f;
}

Vec3 FourierField::eval(const Vec3& x) const {
  Vec3 v{0.0, 0.0, 0.0};
  for (std::size_t m = 0; m < k.size(); ++m) {
    const double s = std::sin(dot(k[m], x) + phase[m]);
    for (int d = 0; d < 3; ++d) v[d] += amp[m][d] * s;
  }
  return v;
}

FaceField sample_uniform(const TopologyPtr& topo, int axis) {
  Vec3 e{0.0, 0.0, 0.0};
  e[axis] = 1.0;
  return sample_faces(topo, [&](const Vec3&) { return e; });
}

ScalarField sample_ball_q0(const TopologyPtr& topo, double a) {
  return sample_cells(topo, [&](const Vec3& x) { return 1.0 - a / norm(x); });
}

FaceField sample_ball_grad_q0(const TopologyPtr& topo, double a) {
  return sample_faces(topo, [&](const Vec3& x) {
    const double r = norm(x);
    const double f = a / (r * r * r);
    return Vec3{f * x[0], f * x[1], f * x[2]};
  });
}

FaceField sample_biot_savart_loop(const TopologyPtr& topo, const LoopSpec& loop) {
  if (loop.segments < 3) throw ContractError("Biot-Savart loop needs at least 3 segments");
  return sample_faces(topo, [&](const Vec3& x) { return biot_savart_eval(loop, x); });
}

FaceField sample_solenoidal_bump(const TopologyPtr& topo, const Bump& bump, const Vec3& direction) {
  return sample_faces(topo, [&](const Vec3& x) { return cross(bump.grad(x), direction); });
}

FaceField sample_gradient_bump(const TopologyPtr& topo, const Bump& bump) {
  return sample_faces(topo, [&](const Vec3& x) { return bump.grad(x); });
}

ScalarField sample_bump(const TopologyPtr& topo, const Bump& bump) {
  return sample_cells(topo, [&](const Vec3& x) { return bump.value(x); });
}

EdgeField sample_bump_edge_potential(const TopologyPtr& topo, const Bump& bump, const Vec3& direction) {
  return sample_edges(topo, [&](const Vec3& x) {
    const double b = bump.value(x);
    return Vec3{b * direction[0], b * direction[1], b * direction[2]};
  });
}

FaceField sample_point_source(const TopologyPtr& topo, const Vec3& center, double strength) {
  return sample_faces(topo, [&](const Vec3& x) {
    const Vec3 d = sub(x, center);
    const double r = norm(d);
    if (r == 0.0) throw ContractError("point source sampled at its center");
    const double f = strength / (4.0 * std::numbers::pi * r * r * r);
    return Vec3{f * d[0], f * d[1], f * d[2]};
  });
}

FaceField sample_fourier(const TopologyPtr& topo, const FourierField& f) {
  return sample_faces(topo, [&](const Vec3& x) { return f.eval(x); });
}

}  // namespace xhodge
