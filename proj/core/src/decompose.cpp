#include "xhodge/decompose.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "xhodge/report.hpp"

namespace xhodge {
namespace {

double safe_ratio(double a, double b) { return b > 0.0 ? a / b : 0.0; }

double normalized_inner(const FaceField& a, const FaceField& b) {
  return safe_ratio(inner_product(a, b), norm2(a) * norm2(b));
}

std::vector<unsigned char> edge_set(const GridTopology& topo, PotentialFlavor flavor) {
  return potential_masks(topo, flavor).edge;
}

double masked_edge_norm(const EdgeField& e, const std::vector<unsigned char>& mask) {
  EdgeField m = e;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!mask[i]) m[i] = 0.0;
  return norm2(m);
}

double masked_edge_lr(const EdgeField& e, const std::vector<unsigned char>& mask, double r) {
  EdgeField m = e;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!mask[i]) m[i] = 0.0;
  return lr_norm(m, r);
}

// Smooth step: 1 for t <= 0, 0 for t >= 1.
double smooth_step_down(double t) {
  auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = f(1.0 - t), b = f(t);
  return a / (a + b);
}

}  // namespace

const char* to_string(HarmonicFlavor f) {
  return f == HarmonicFlavor::NormalHarmonic ? "normal" : "tangential";
}

HarmonicFlavor parse_harmonic_flavor(const std::string& s) {
  if (s == "normal") return HarmonicFlavor::NormalHarmonic;
  if (s == "tangential") return HarmonicFlavor::TangentialHarmonic;
  throw ConfigError("unknown flavor '" + s + "' (expected normal or tangential)");
}

PotentialFlavor potential_flavor(HarmonicFlavor f) {
  return f == HarmonicFlavor::NormalHarmonic ? PotentialFlavor::VFlavor : PotentialFlavor::XFlavor;
}

std::vector<std::pair<std::string, double>> DiagnosticsReport::key_values() const {
  std::vector<std::pair<std::string, double>> kv{
      {"u_norm", u_norm},
      {"h_norm", h_norm},
      {"rot_w_norm", rot_w_norm},
      {"grad_p_norm", grad_p_norm},
      {"lambda", lambda},
      {"reconstruction_rel_err", reconstruction_rel_err},
      {"div_h_rel", div_h_rel},
      {"rot_h_rel", rot_h_rel},
      {"div_w_rel", div_w_rel},
      {"flux_obstacle", flux_obstacle},
      {"flux_far", flux_far},
  };
  static const char* patch[6] = {"mx", "px", "my", "py", "mz", "pz"};
  for (int i = 0; i < 6; ++i) kv.emplace_back(std::string("flux_patch_") + patch[i], flux_patches[i]);
  kv.emplace_back("boundary_circulation_rel", boundary_circulation_rel);
  kv.emplace_back("trace_normal_weak", trace_normal_weak);
  kv.emplace_back("trace_tangential_weak", trace_tangential_weak);
  kv.emplace_back("ortho_h_gradp", ortho_h_gradp);
  kv.emplace_back("ortho_h_rotw", ortho_h_rotw);
  kv.emplace_back("ortho_gradp_rotw", ortho_gradp_rotw);
  for (const auto& [r, s] : stability) kv.emplace_back("stability_r" + format_number(r), s);
  kv.emplace_back("p_iterations", p_iterations);
  kv.emplace_back("w_iterations", w_iterations);
  kv.emplace_back("p_residual", p_residual);
  kv.emplace_back("w_residual", w_residual);
  return kv;
}

// ---- traces ------------------------------------------------------------------------------

double ObstacleCutoff::value(const Vec3& x) const {
  const double d = signed_distance(*shape, x);
  return smooth_step_down((d - inner) / (outer - inner));
}

Vec3 ObstacleCutoff::grad(const Vec3& x) const {
  const double eps = 1e-6;
  Vec3 g{};
  for (int a = 0; a < 3; ++a) {
    Vec3 p = x, m = x;
    p[a] += eps;
    m[a] -= eps;
    g[a] = (value(p) - value(m)) / (2.0 * eps);
  }
  return g;
}

double weak_normal_trace(const FaceField& h, const ObstacleCutoff& chi) {
  const TopologyPtr& topo = h.topo_ptr();
  const FaceField gchi = sample_faces(topo, [&](const Vec3& x) { return chi.grad(x); });
  const ScalarField vchi = sample_cells(topo, [&](const Vec3& x) { return chi.value(x); });
  const ScalarField div = divergence(h);
  const double a = inner_product(h, gchi), b = inner_product(div, vchi);
  return safe_ratio(std::abs(a + b), norm2(h) * norm2(gchi) + norm2(div) * norm2(vchi));
}

double weak_tangential_trace(const FaceField& h, const ObstacleCutoff& chi) {
  const TopologyPtr& topo = h.topo_ptr();
  EdgeField rot = curl_face_to_edge(h);
  rot = restrict_to(rot, {EntityKind::Interior});
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const EdgeField phi = sample_edges(topo, [&](const Vec3& x) {
      Vec3 v{0.0, 0.0, 0.0};
      v[i] = chi.value(x);
      return v;
    });
    const FaceField rphi = sample_faces(topo, [&](const Vec3& x) {
      const Vec3 g = chi.grad(x);
      Vec3 e{0.0, 0.0, 0.0};
      e[i] = 1.0;
      return Vec3{g[1] * e[2] - g[2] * e[1], g[2] * e[0] - g[0] * e[2], g[0] * e[1] - g[1] * e[0]};
    });
    const double a = inner_product(rot, phi), b = inner_product(h, rphi);
    worst = std::max(worst, safe_ratio(std::abs(a - b), norm2(rot) * norm2(phi) + norm2(h) * norm2(rphi)));
  }
  return worst;
}

SurfaceTraces surface_traces(const FaceField& h) {
  const GridTopology& t = h.topo();
  std::vector<double> nn, tt, hh;
  for (const BoundaryFace& bf : t.boundary_faces()) {
    if (bf.far) continue;
    const Vec3 v = cell_average(h, bf.cell);
    const Vec3& n = bf.smooth_normal;
    const double vn = v[0] * n[0] + v[1] * n[1] + v[2] * n[2];
    const Vec3 c{v[1] * n[2] - v[2] * n[1], v[2] * n[0] - v[0] * n[2], v[0] * n[1] - v[1] * n[0]};
    nn.push_back(vn * vn);
    tt.push_back(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    hh.push_back(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  }
  const double den = std::sqrt(pairwise_sum(hh));
  return {safe_ratio(std::sqrt(pairwise_sum(nn)), den), safe_ratio(std::sqrt(pairwise_sum(tt)), den)};
}

template <Entity E>
double component_gradient_lr(const Field<E>& f, double r, const std::vector<unsigned char>* region) {
  const GridTopology& t = f.topo();
  const auto kinds = t.kinds(E);
  std::vector<double> diffs;
  const double inv_h = 1.0 / t.h();
  for (int a = 0; a < GridTopology::components(E); ++a) {
    const Dims d = t.dims(E, a);
    const std::size_t off = t.offset(E, a);
    const std::size_t stride[3] = {1, std::size_t(d.nx), std::size_t(d.nx) * std::size_t(d.ny)};
    for (std::size_t local = 0; local < d.size(); ++local) {
      const std::size_t i = off + local;
      if (kinds[i] == EntityKind::Inactive || (region && !(*region)[i])) continue;
      const auto ijk = d.unravel(local);
      for (int dd = 0; dd < 3; ++dd) {
        if (ijk[dd] + 1 >= d[dd]) continue;
        const std::size_t j = i + stride[dd];
        if (kinds[j] == EntityKind::Inactive || (region && !(*region)[j])) continue;
        diffs.push_back((f[j] - f[i]) * inv_h);
      }
    }
  }
  if (!(r > 1.0)) throw ContractError("L^r exponent must exceed 1");
  return lr_norm_values(diffs, t.cell_volume(), r);
}

template double component_gradient_lr(const Field<Entity::Face>&, double, const std::vector<unsigned char>*);
template double component_gradient_lr(const Field<Entity::Edge>&, double, const std::vector<unsigned char>*);

double cell_loop_circulation(const FaceField& h, const std::vector<std::array<int, 3>>& cells) {
  const GridTopology& t = h.topo();
  std::vector<double> terms;
  for (std::size_t s = 0; s < cells.size(); ++s) {
    const auto& a = cells[s];
    const auto& b = cells[(s + 1) % cells.size()];
    int axis = -1, dir = 0;
    for (int d = 0; d < 3; ++d) {
      const int diff = b[d] - a[d];
      if (diff == 0) continue;
      if (axis >= 0 || std::abs(diff) != 1) throw ContractError("loop cells must be face neighbours");
      axis = d;
      dir = diff;
    }
    if (axis < 0) continue;
    std::array<int, 3> f = a;
    f[axis] = std::max(a[axis], b[axis]);
    const Dims fd = t.face_dims(axis);
    const std::size_t flat = t.offset(Entity::Face, axis) + fd.index(f[0], f[1], f[2]);
    if (!t.active(Entity::Face, flat)) throw ContractError("loop crosses an inactive face");
    terms.push_back(dir * h[flat] * t.h());
  }
  return pairwise_sum(terms);
}

std::vector<std::array<int, 3>> rectangle_loop(const GridTopology& topo, int plane_axis, double c, double u0,
                                               double u1, double v0, double v1) {
  const int ua = (plane_axis + 1) % 3, va = (plane_axis + 2) % 3;
  auto idx = [&](double x) {
    return std::clamp(int(std::floor((x + topo.L()) / topo.h())), 0, topo.n() - 1);
  };
  const int ic = idx(c), iu0 = idx(u0), iu1 = idx(u1), iv0 = idx(v0), iv1 = idx(v1);
  std::vector<std::array<int, 3>> cells;
  auto push = [&](int iu, int iv) {
    std::array<int, 3> x{};
    x[plane_axis] = ic;
    x[ua] = iu;
    x[va] = iv;
    cells.push_back(x);
  };
  for (int i = iu0; i < iu1; ++i) push(i, iv0);
  for (int j = iv0; j < iv1; ++j) push(iu1, j);
  for (int i = iu1; i > iu0; --i) push(i, iv1);
  for (int j = iv1; j > iv0; --j) push(iu0, j);
  return cells;
}

// ---- decomposition -----------------------------------------------------------------------

void complete_parts(const FaceField& u, HodgeParts& parts) {
  const GridTopology& t = u.topo();
  parts.rot_w = curl_edge_to_face(parts.w);
  if (parts.flavor == HarmonicFlavor::NormalHarmonic) {
    parts.grad_p = gradient(parts.p, ScalarBoundaryCondition::neumann(t));
    for (const BoundaryFace& bf : t.boundary_faces()) parts.grad_p[bf.flat] = u[bf.flat];
  } else {
    parts.grad_p = gradient(parts.p, ScalarBoundaryCondition::dirichlet(t, 0.0, parts.lambda));
  }
  parts.h = u - parts.rot_w - parts.grad_p;
}

double stability_ratio(const FaceField& u, const HodgeParts& parts, double r) {
  return safe_ratio(lr_norm(parts.h, r) + component_gradient_lr(parts.w, r) + lr_norm(parts.grad_p, r),
                    lr_norm(u, r));
}

DiagnosticsReport diagnose(const FaceField& u, const HodgeParts& parts, const std::vector<double>& r_list) {
  const GridTopology& t = u.topo();
  const PotentialFlavor pf = potential_flavor(parts.flavor);
  DiagnosticsReport d;
  d.u_norm = norm2(u);
  d.h_norm = norm2(parts.h);
  d.rot_w_norm = norm2(parts.rot_w);
  d.grad_p_norm = norm2(parts.grad_p);
  d.lambda = parts.lambda;
  d.reconstruction_rel_err = safe_ratio(norm2(u - parts.h - parts.rot_w - parts.grad_p), d.u_norm);
  d.div_h_rel = safe_ratio(t.h() * norm2(divergence(parts.h)), d.u_norm);
  const EdgeField rot_h = curl_face_to_edge(parts.h);
  d.rot_h_rel = safe_ratio(t.h() * masked_edge_norm(rot_h, edge_set(t, pf)), d.u_norm);
  d.div_w_rel = safe_ratio(gauge_divergence_norm(parts.w, pf), d.u_norm);
  d.flux_obstacle = boundary_flux(parts.h, BoundaryPart::Obstacle);
  d.flux_far = boundary_flux(parts.h, BoundaryPart::Far);
  {
    std::array<std::vector<double>, 6> terms;
    for (const BoundaryFace& bf : t.boundary_faces()) {
      if (bf.far) continue;
      int axis = 0;
      for (int a = 1; a < 3; ++a)
        if (std::abs(bf.smooth_normal[a]) > std::abs(bf.smooth_normal[axis])) axis = a;
      terms[2 * axis + (bf.smooth_normal[axis] > 0.0)].push_back(bf.side * parts.h[bf.flat]);
    }
    for (int i = 0; i < 6; ++i) d.flux_patches[i] = t.h() * t.h() * pairwise_sum(terms[i]);
  }
  d.boundary_circulation_rel =
      safe_ratio(t.h() * norm2(restrict_to(rot_h, {EntityKind::ObstacleBoundary})), d.u_norm);
  if (t.has_obstacle()) {
    const ObstacleCutoff chi{&t.spec().obstacle};
    d.trace_normal_weak = weak_normal_trace(parts.h, chi);
    d.trace_tangential_weak = weak_tangential_trace(parts.h, chi);
  }
  d.ortho_h_gradp = normalized_inner(parts.h, parts.grad_p);
  d.ortho_h_rotw = normalized_inner(parts.h, parts.rot_w);
  d.ortho_gradp_rotw = normalized_inner(parts.grad_p, parts.rot_w);
  for (double r : r_list) d.stability.emplace_back(r, stability_ratio(u, parts, r));
  d.p_iterations = parts.p_stats.iterations;
  d.w_iterations = parts.w_stats.iterations;
  d.p_residual = parts.p_stats.relative_residual;
  d.w_residual = parts.w_stats.relative_residual;
  return d;
}

std::pair<HodgeParts, DiagnosticsReport> decompose_normal(const FaceField& u, const DecomposeOptions& opts) {
  HodgeParts parts;
  parts.flavor = HarmonicFlavor::NormalHarmonic;
  parts.far = FarMode::NaturalNeumann;
  PressureSolution ps = solve_weak_neumann(u, opts.solver);
  VectorPotentialSolution vs = solve_vector_potential(u, PotentialFlavor::VFlavor, opts.solver);
  parts.p = std::move(ps.p);
  parts.grad_p = std::move(ps.grad);
  parts.p_stats = ps.stats;
  parts.w = std::move(vs.w);
  parts.rot_w = std::move(vs.rot_w);
  parts.w_stats = vs.stats;
  complete_parts(u, parts);  // same arithmetic as a reload from stored (w, p, lambda)
  DiagnosticsReport d = diagnose(u, parts, opts.r_list);
  return {std::move(parts), std::move(d)};
}

std::pair<HodgeParts, DiagnosticsReport> decompose_tangential(const FaceField& u, FarMode far,
                                                              const DecomposeOptions& opts,
                                                              const CapacityPotential* q0) {
  if (!u.topo().has_obstacle()) throw GeometryError("tangential decomposition needs a nonempty obstacle");
  HodgeParts parts;
  parts.flavor = HarmonicFlavor::TangentialHarmonic;
  parts.far = far;
  PressureSolution ps = solve_weak_dirichlet(u, far, opts.solver, q0);
  VectorPotentialSolution vs = solve_vector_potential(u, PotentialFlavor::XFlavor, opts.solver);
  parts.p = std::move(ps.p);
  parts.grad_p = std::move(ps.grad);
  parts.lambda = ps.lambda;
  parts.p_stats = ps.stats;
  parts.w = std::move(vs.w);
  parts.rot_w = std::move(vs.rot_w);
  parts.w_stats = vs.stats;
  complete_parts(u, parts);  // same arithmetic as a reload from stored (w, p, lambda)
  DiagnosticsReport d = diagnose(u, parts, opts.r_list);
  return {std::move(parts), std::move(d)};
}

std::pair<HodgeParts, DiagnosticsReport> decompose(const FaceField& u, HarmonicFlavor flavor, FarMode far,
                                                   const DecomposeOptions& opts, const CapacityPotential* q0) {
  if (flavor == HarmonicFlavor::NormalHarmonic) return decompose_normal(u, opts);
  return decompose_tangential(u, far, opts, q0);
}

// ---- probes ------------------------------------------------------------------------------

std::vector<FaceField> probe_suite(const TopologyPtr& topo, int count, std::uint64_t seed) {
  std::vector<FaceField> out;
  for (int a = 0; a < 3; ++a) out.push_back(sample_uniform(topo, a));
  const auto comps = obstacle_components(topo->spec().obstacle);
  for (const ObstacleShape& c : comps) {
    if (const auto* b = std::get_if<Ball>(&c.kind)) out.push_back(sample_point_source(topo, b->center));
    if (const auto* t = std::get_if<SolidTorus>(&c.kind)) {
      const double an = std::sqrt(t->axis[0] * t->axis[0] + t->axis[1] * t->axis[1] + t->axis[2] * t->axis[2]);
      const Vec3 n{t->axis[0] / an, t->axis[1] / an, t->axis[2] / an};
      const Vec3 helper = std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
      Vec3 e{helper[1] * n[2] - helper[2] * n[1], helper[2] * n[0] - helper[0] * n[2],
             helper[0] * n[1] - helper[1] * n[0]};
      const double en = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
      const Vec3 core{t->center[0] + t->major_radius * e[0] / en, t->center[1] + t->major_radius * e[1] / en,
                      t->center[2] + t->major_radius * e[2] / en};
      out.push_back(sample_point_source(topo, core));
    }
  }
  for (const ObstacleShape& c : comps) {
    if (const auto* t = std::get_if<SolidTorus>(&c.kind)) {
      LoopSpec loop;
      loop.radius = t->major_radius;
      loop.center = t->center;
      loop.axis = t->axis;
      loop.segments = 256;
      out.push_back(sample_biot_savart_loop(topo, loop));
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double L = topo->L();
  int kind = 0;
  while (int(out.size()) < count) {
    const double width = 0.6 + 0.3 * (unit(rng) + 1.0);
    const double span = L - width - 2.0 * topo->h();
    const Bump bump{{span * unit(rng), span * unit(rng), span * unit(rng)}, width};
    const Vec3 dir{unit(rng), unit(rng), unit(rng)};
    switch (kind++ % 3) {
      case 0:
        out.push_back(sample_solenoidal_bump(topo, bump, dir));
        break;
      case 1:
        out.push_back(sample_gradient_bump(topo, bump));
        break;
      default:
        out.push_back(sample_fourier(topo, FourierField::random(rng, L)));
        break;
    }
  }
  out.resize(std::size_t(count), FaceField(topo));
  return out;
}

HarmonicBasisEstimate estimate_harmonic_dimension(const TopologyPtr& topo, HarmonicFlavor flavor, FarMode far,
                                                  int n_probes, double svd_tol, std::uint64_t seed,
                                                  const SolveOptions& opts) {
  if (n_probes < 8) throw ContractError("harmonic dimension estimation needs at least 8 probes");
  HarmonicBasisEstimate est;
  est.flavor = flavor;
  est.far = flavor == HarmonicFlavor::NormalHarmonic ? FarMode::NaturalNeumann : far;
  est.probes = n_probes;

  std::optional<CapacityPotential> q0;
  if (topo->has_obstacle()) q0 = solve_q0(topo, opts);
  DecomposeOptions dopts;
  dopts.solver = opts;
  dopts.r_list.clear();

  struct Residual {
    FaceField h;
    double quality;
  };
  std::vector<Residual> kept;
  const auto probes = probe_suite(topo, n_probes, seed);
  for (const FaceField& u : probes) {
    const double un = norm2(u);
    if (un == 0.0) continue;
    auto [parts, diag] = decompose(u, flavor, far, dopts, q0 ? &*q0 : nullptr);
    const double hn = norm2(parts.h);
    if (hn < 1e-5 * un) continue;
    const double quality = std::max(diag.div_h_rel, diag.rot_h_rel) * un / hn;
    parts.h *= 1.0 / hn;
    kept.push_back({std::move(parts.h), quality});
  }
  if (kept.empty()) return est;

  std::vector<double> q;
  for (const auto& r : kept) q.push_back(r.quality);
  std::nth_element(q.begin(), q.begin() + q.size() / 2, q.end());
  est.baseline_quality = q[q.size() / 2];
  const double limit = 10.0 * std::max(est.baseline_quality, 1e-14);
  std::vector<const FaceField*> use;
  for (const auto& r : kept)
    if (r.quality <= limit) use.push_back(&r.h);
  est.used = int(use.size());
  if (use.empty()) return est;

  const int m = int(use.size());
  Eigen::MatrixXd G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = inner_product(*use[i], *use[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const Eigen::MatrixXd V = eig.eigenvectors();
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[std::size_t(i)] = m - 1 - i;  // descending
  for (int i : order) est.singular_values.push_back(std::sqrt(std::max(ev(i), 0.0)));
  const double smax = est.singular_values.front();

  for (std::size_t k = 0; k < order.size(); ++k) {
    const double s = est.singular_values[k];
    if (!(s >= svd_tol * smax) || s == 0.0) break;
    FaceField b(topo);
    for (int i = 0; i < m; ++i) b.axpy(V(i, order[k]) / s, *use[std::size_t(i)]);
    // Re-orthonormalize against previous basis vectors to clean round-off.
    for (const FaceField& prev : est.basis) b.axpy(-inner_product(prev, b), prev);
    b *= 1.0 / norm2(b);
    est.basis.push_back(std::move(b));
  }
  est.dimension = int(est.basis.size());

  // Sign convention: positive circulation through the first torus, otherwise positive
  // projection on grad q0.
  for (FaceField& b : est.basis) {
    double s = 0.0;
    for (const ObstacleShape& c : obstacle_components(topo->spec().obstacle)) {
      if (const auto* t = std::get_if<SolidTorus>(&c.kind)) {
        const auto loop = torus_threading_loop(*topo, *t);
        if (!loop.empty()) s = cell_loop_circulation(b, loop);
        break;
      }
    }
    if (s == 0.0 && q0) s = inner_product(b, q0->grad);
    if (s < 0.0) b *= -1.0;
  }
  return est;
}

std::vector<std::array<int, 3>> torus_threading_loop(const GridTopology& topo, const SolidTorus& t) {
  int a = -1;
  const double an = std::sqrt(t.axis[0] * t.axis[0] + t.axis[1] * t.axis[1] + t.axis[2] * t.axis[2]);
  for (int d = 0; d < 3; ++d)
    if (std::abs(std::abs(t.axis[d]) / an - 1.0) < 1e-12) a = d;
  if (a < 0) return {};
  const int b = (a + 1) % 3, p = (a + 2) % 3;
  const double margin = 0.5;
  const double hole = t.major_radius - t.minor_radius;
  // Plane through the cell centers nearest the torus center along p.
  const double cp = (std::floor((t.center[p] + topo.L()) / topo.h()) + 0.5) * topo.h() - topo.L();
  auto loop = rectangle_loop(topo, p, cp, t.center[a] - t.minor_radius - margin, t.center[a] + t.minor_radius + margin,
                             t.center[b] + 0.2 * hole, t.center[b] + t.major_radius + t.minor_radius + margin);
  if (t.axis[a] < 0.0) std::reverse(loop.begin(), loop.end());
  return loop;
}

std::vector<InequalityRow> inequality_probe(const std::vector<FaceField>& fields, PotentialFlavor flavor,
                                            const std::vector<double>& r_list,
                                            const std::vector<FaceField>* harmonic_basis) {
  std::vector<InequalityRow> rows;
  if (fields.empty()) return rows;
  const TopologyPtr& topo = fields.front().topo_ptr();
  const GridTopology& t = *topo;
  const auto emask = edge_set(t, flavor);
  const double collar_r = obstacle_extent(t.spec().obstacle) + 2.0;
  std::vector<unsigned char> collar(t.size(Entity::Face), 0);
  for (std::size_t i = 0; i < collar.size(); ++i) {
    if (!t.active(Entity::Face, i)) continue;
    const Vec3 x = t.position(Entity::Face, i);
    collar[i] = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) <= collar_r;
  }
  auto masked = [&](const FaceField& f) {
    FaceField g = f;
    if (flavor == PotentialFlavor::XFlavor) {
      for (const BoundaryFace& bf : t.boundary_faces()) g[bf.flat] = 0.0;
    } else {
      // Zero tangential components near the boundary: keep boundary faces and interior
      // faces whose four edges are interior.
      const auto ek = t.kinds(Entity::Edge);
      const auto fk = t.kinds(Entity::Face);
      for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        const Dims fd = t.face_dims(a);
        const std::size_t off = t.offset(Entity::Face, a);
        for (std::size_t local = 0; local < fd.size(); ++local) {
          const std::size_t fi = off + local;
          if (fk[fi] != EntityKind::Interior) continue;
          const auto ijk = fd.unravel(local);
          auto edge_kind = [&](int axis, std::array<int, 3> e) {
            const Dims ed = t.edge_dims(axis);
            return ek[t.offset(Entity::Edge, axis) + ed.index(e[0], e[1], e[2])];
          };
          std::array<int, 3> e1 = ijk, e2 = ijk;
          e1[b] += 1;
          e2[c] += 1;
          const bool all_interior = edge_kind(c, ijk) == EntityKind::Interior && edge_kind(c, e1) == EntityKind::Interior &&
                                    edge_kind(b, ijk) == EntityKind::Interior && edge_kind(b, e2) == EntityKind::Interior;
          if (!all_interior) g[fi] = 0.0;
        }
      }
    }
    return g;
  };
  auto collar_lr = [&](const FaceField& f, double r) {
    FaceField g = f;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!collar[i]) g[i] = 0.0;
    return lr_norm(g, r);
  };

  for (std::size_t fi = 0; fi < fields.size(); ++fi) {
    const FaceField u = masked(fields[fi]);
    const EdgeField rot = curl_face_to_edge(u);
    const ScalarField div = divergence(u);
    std::optional<FaceField> ud;
    if (harmonic_basis && !harmonic_basis->empty()) {
      FaceField g = u;
      for (const FaceField& b : *harmonic_basis) g.axpy(-inner_product(b, g) / inner_product(b, b), b);
      ud = masked(g);
    }
    for (double r : r_list) {
      InequalityRow row;
      row.field = int(fi);
      row.r = r;
      row.grad_norm = component_gradient_lr(u, r);
      row.rot_norm = masked_edge_lr(rot, emask, r);
      row.div_norm = lr_norm(div, r);
      row.collar_norm = collar_lr(u, r);
      row.ratio = safe_ratio(row.grad_norm, row.rot_norm + row.div_norm + row.collar_norm);
      if (ud) {
        const double g = component_gradient_lr(*ud, r);
        const double rr = masked_edge_lr(curl_face_to_edge(*ud), emask, r);
        const double dd = lr_norm(divergence(*ud), r);
        row.deflated_ratio = safe_ratio(g, rr + dd);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace xhodge
