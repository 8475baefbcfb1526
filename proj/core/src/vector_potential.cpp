#include "xhodge/vector_potential.hpp"

#include <cmath>

namespace xhodge {
namespace {

template <class F>
void apply_mask(F& f, const std::vector<unsigned char>& mask) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!mask[i]) f[i] = 0.0;
}

double flat_norm(const Vector& v) { return std::sqrt(pairwise_dot(v, v)); }

}  // namespace

const char* to_string(PotentialFlavor f) { return f == PotentialFlavor::XFlavor ? "x" : "v"; }

PotentialMasks potential_masks(const GridTopology& topo, PotentialFlavor flavor) {
  PotentialMasks m;
  const auto ek = topo.kinds(Entity::Edge);
  const auto nk = topo.kinds(Entity::Node);
  m.edge.resize(ek.size());
  m.node.resize(nk.size());
  const bool interior_only = flavor == PotentialFlavor::VFlavor;
  for (std::size_t i = 0; i < ek.size(); ++i)
    m.edge[i] = interior_only ? ek[i] == EntityKind::Interior : ek[i] != EntityKind::Inactive;
  for (std::size_t i = 0; i < nk.size(); ++i)
    m.node[i] = interior_only ? nk[i] == EntityKind::Interior : nk[i] != EntityKind::Inactive;
  return m;
}

LinearOperator assemble_curlcurl_operator(const TopologyPtr& topo, PotentialFlavor flavor) {
  auto masks = std::make_shared<PotentialMasks>(potential_masks(*topo, flavor));
  LinearOperator A;
  A.dim = topo->size(Entity::Edge);
  A.apply = [topo, masks](const Vector& x, Vector& y) {
    EdgeField w(topo, x);
    apply_mask(w, masks->edge);
    EdgeField out = curl_face_to_edge(curl_edge_to_face(w));
    NodeField phi = edge_divergence(w);
    apply_mask(phi, masks->node);
    out -= node_gradient(phi);
    apply_mask(out, masks->edge);
    y = std::move(out.raw());
  };
  A.diagonal = [topo, masks]() {
    const double inv_h2 = 1.0 / (topo->h() * topo->h());
    Vector d(topo->size(Entity::Edge), 0.0);
    const auto fk = topo->kinds(Entity::Face);
    const Dims nd = topo->node_dims();
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      const Dims ed = topo->edge_dims(a);
      const std::size_t off = topo->offset(Entity::Edge, a);
      for (std::size_t local = 0; local < ed.size(); ++local) {
        const std::size_t e = off + local;
        if (!masks->edge[e]) continue;
        const auto ijk = ed.unravel(local);
        int faces = 0;
        auto face_active = [&](int axis, std::array<int, 3> f) {
          const Dims fd = topo->face_dims(axis);
          return fd.contains(f[0], f[1], f[2]) &&
                 fk[topo->offset(Entity::Face, axis) + fd.index(f[0], f[1], f[2])] != EntityKind::Inactive;
        };
        std::array<int, 3> t = ijk;
        faces += face_active(c, t);
        faces += face_active(b, t);
        t[b] -= 1;
        faces += face_active(c, t);
        t = ijk;
        t[c] -= 1;
        faces += face_active(b, t);
        std::array<int, 3> hi = ijk;
        hi[a] += 1;
        const int nodes = masks->node[nd.index(ijk[0], ijk[1], ijk[2])] + masks->node[nd.index(hi[0], hi[1], hi[2])];
        d[e] = (faces + nodes) * inv_h2;
      }
    }
    return d;
  };
  return A;
}

EdgeField curlcurl_rhs(const FaceField& u, PotentialFlavor flavor) {
  EdgeField r = curl_face_to_edge(u);
  apply_mask(r, potential_masks(u.topo(), flavor).edge);
  return r;
}

std::vector<EdgeField> vflavor_kernel(const TopologyPtr& topo, const SolveOptions& opts) {
  if (!topo->has_obstacle()) return {};
  auto masks = std::make_shared<PotentialMasks>(potential_masks(*topo, PotentialFlavor::VFlavor));
  const auto nk = topo->kinds(Entity::Node);

  NodeField boundary(topo);
  for (std::size_t i = 0; i < nk.size(); ++i)
    if (nk[i] == EntityKind::FarBoundary) boundary[i] = 1.0;

  LinearOperator L;
  L.dim = topo->size(Entity::Node);
  L.apply = [topo, masks](const Vector& x, Vector& y) {
    NodeField phi(topo, x);
    apply_mask(phi, masks->node);
    NodeField out = edge_divergence(node_gradient(phi));
    out *= -1.0;
    apply_mask(out, masks->node);
    y = std::move(out.raw());
  };
  L.diagonal = [topo, masks]() {
    Vector d(topo->size(Entity::Node), 0.0);
    const double v = 6.0 / (topo->h() * topo->h());
    for (std::size_t i = 0; i < d.size(); ++i)
      if (masks->node[i]) d[i] = v;
    return d;
  };
  NodeField rhs = edge_divergence(node_gradient(boundary));
  apply_mask(rhs, masks->node);

  SolveOptions o = opts;
  o.deflation.clear();
  SolveResult s = cg_solve(L, rhs.raw(), o);
  NodeField phi(topo, std::move(s.x));
  phi += boundary;
  EdgeField k = node_gradient(phi);
  apply_mask(k, masks->edge);
  const double n = flat_norm(k.raw());
  if (n == 0.0) return {};
  k *= 1.0 / n;
  return {std::move(k)};
}

double gauge_divergence_norm(const EdgeField& w, PotentialFlavor flavor) {
  NodeField d = edge_divergence(w);
  apply_mask(d, potential_masks(w.topo(), flavor).node);
  return norm2(d);
}

VectorPotentialSolution solve_vector_potential(const FaceField& u, PotentialFlavor flavor, const SolveOptions& opts,
                                               const std::optional<std::vector<EdgeField>>& kernel,
                                               const std::optional<EdgeField>& initial_guess) {
  if (!u.all_finite()) throw ContractError("input field has non-finite entries");
  const TopologyPtr& topo = u.topo_ptr();
  std::vector<EdgeField> basis;
  if (kernel)
    basis = *kernel;
  else if (flavor == PotentialFlavor::VFlavor)
    basis = vflavor_kernel(topo, opts);

  const EdgeField rhs = curlcurl_rhs(u, flavor);
  VectorPotentialSolution out;
  SolveOptions o = opts;
  o.deflation.clear();
  for (const EdgeField& k : basis) o.deflation.push_back(k.raw());
  const std::vector<Vector> q = orthonormalize(o.deflation);

  // Relative to the larger of |rhs| and |u|/h: for a pure gradient the right-hand side is
  // rounding noise and its own norm is no scale.
  const double rn = std::max(flat_norm(rhs.raw()), flat_norm(u.raw()) / topo->h());
  for (const Vector& qi : q)
    if (rn > 0.0) out.rhs_orthogonality = std::max(out.rhs_orthogonality, std::abs(pairwise_dot(qi, rhs.raw())) / rn);
  if (out.rhs_orthogonality > 1e-6)
    throw ContractError("curl-curl right-hand side is not orthogonal to the kernel basis (defect " +
                        std::to_string(out.rhs_orthogonality) + ")");

  std::optional<Vector> x0;
  if (initial_guess) x0 = initial_guess->raw();
  SolveResult s = cg_solve(assemble_curlcurl_operator(topo, flavor), rhs.raw(), o, x0);
  out.w = EdgeField(topo, std::move(s.x));
  out.stats = std::move(s.stats);
  for (const Vector& qi : q) out.kernel_components.push_back(pairwise_dot(qi, out.w.raw()));
  out.rot_w = curl_edge_to_face(out.w);
  out.div_norm = gauge_divergence_norm(out.w, flavor);
  return out;
}

}  // namespace xhodge
