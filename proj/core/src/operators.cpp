#include "xhodge/operators.hpp"

#include "parallel.hpp"

namespace xhodge {
namespace {

struct Grid {
  const GridTopology& t;
  double inv_h;
  Dims fd[3], ed[3];
  std::size_t foff[3], eoff[3];
  explicit Grid(const GridTopology& topo) : t(topo), inv_h(1.0 / topo.h()) {
    for (int a = 0; a < 3; ++a) {
      fd[a] = t.face_dims(a);
      ed[a] = t.edge_dims(a);
      foff[a] = t.offset(Entity::Face, a);
      eoff[a] = t.offset(Entity::Edge, a);
    }
  }

  // Value of a face/edge component at (i,j,k), zero outside the index range.
  double at(const std::vector<double>& v, Entity e, int axis, std::array<int, 3> ijk) const {
    const Dims& d = (e == Entity::Face) ? fd[axis] : ed[axis];
    if (!d.contains(ijk[0], ijk[1], ijk[2])) return 0.0;
    return v[((e == Entity::Face) ? foff[axis] : eoff[axis]) + d.index(ijk[0], ijk[1], ijk[2])];
  }
};

std::array<int, 3> shift(std::array<int, 3> ijk, int axis, int by) {
  ijk[axis] += by;
  return ijk;
}

}  // namespace

ScalarBoundaryCondition ScalarBoundaryCondition::neumann(const GridTopology& topo) {
  ScalarBoundaryCondition bc;
  bc.coef.assign(topo.boundary_faces().size(), 0.0);
  bc.value.assign(topo.boundary_faces().size(), 0.0);
  return bc;
}

ScalarBoundaryCondition ScalarBoundaryCondition::dirichlet(const GridTopology& topo, double obstacle_value,
                                                           double far_value) {
  ScalarBoundaryCondition bc = neumann(topo);
  const auto faces = topo.boundary_faces();
  for (std::size_t s = 0; s < faces.size(); ++s) bc.set_dirichlet(s, faces[s].far ? far_value : obstacle_value);
  return bc;
}

ScalarBoundaryCondition ScalarBoundaryCondition::homogeneous() const {
  ScalarBoundaryCondition bc = *this;
  std::fill(bc.value.begin(), bc.value.end(), 0.0);
  return bc;
}

FaceField gradient(const ScalarField& p, const ScalarBoundaryCondition& bc) {
  const GridTopology& t = p.topo();
  if (bc.coef.size() != t.boundary_faces().size()) throw ContractError("boundary condition size mismatch");
  FaceField g(p.topo_ptr());
  const double inv_h = 1.0 / t.h();
  const Dims cd = t.cell_dims();
  const std::size_t stride[3] = {1, std::size_t(cd.nx), std::size_t(cd.nx) * std::size_t(cd.ny)};
  const auto kinds = t.kinds(Entity::Face);
  for (int a = 0; a < 3; ++a) {
    const Dims fd = t.face_dims(a);
    const std::size_t off = t.offset(Entity::Face, a);
    XHODGE_PARALLEL_FOR
    for (int k = 0; k < fd.nz; ++k)
      for (int j = 0; j < fd.ny; ++j)
        for (int i = 0; i < fd.nx; ++i) {
          const std::size_t f = off + fd.index(i, j, k);
          if (kinds[f] == EntityKind::Interior) {
            const std::size_t hi = cd.index(i, j, k);
            g[f] = (p[hi] - p[hi - stride[a]]) * inv_h;
          }
        }
  }
  const auto faces = t.boundary_faces();
  for (std::size_t s = 0; s < faces.size(); ++s) {
    const BoundaryFace& bf = faces[s];
    g[bf.flat] = bf.side * (bc.coef[s] * p[bf.cell] + bc.value[s]) * inv_h;
  }
  return g;
}

FaceField gradient_zero_ghost(const ScalarField& p) {
  return gradient(p, ScalarBoundaryCondition::dirichlet(p.topo(), 0.0, 0.0));
}

ScalarField divergence(const FaceField& f) {
  const GridTopology& t = f.topo();
  ScalarField d(f.topo_ptr());
  const double inv_h = 1.0 / t.h();
  const Dims cd = t.cell_dims();
  Dims fd[3];
  std::size_t off[3];
  for (int a = 0; a < 3; ++a) {
    fd[a] = t.face_dims(a);
    off[a] = t.offset(Entity::Face, a);
  }
  XHODGE_PARALLEL_FOR
  for (int k = 0; k < cd.nz; ++k)
    for (int j = 0; j < cd.ny; ++j)
      for (int i = 0; i < cd.nx; ++i) {
        const std::size_t c = cd.index(i, j, k);
        if (!t.fluid(c)) continue;
        double s = 0.0;
        for (int a = 0; a < 3; ++a) {
          const std::array<int, 3> hi = shift({i, j, k}, a, 1);
          s += f[off[a] + fd[a].index(hi[0], hi[1], hi[2])] - f[off[a] + fd[a].index(i, j, k)];
        }
        d[c] = s * inv_h;
      }
  return d;
}

EdgeField curl_face_to_edge(const FaceField& f) {
  const GridTopology& t = f.topo();
  const Grid g(t);
  EdgeField out(f.topo_ptr());
  const auto kinds = t.kinds(Entity::Edge);
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    const Dims ed = t.edge_dims(a);
    const std::size_t off = t.offset(Entity::Edge, a);
    XHODGE_PARALLEL_FOR
    for (int k = 0; k < ed.nz; ++k)
      for (int j = 0; j < ed.ny; ++j)
        for (int i = 0; i < ed.nx; ++i) {
          const std::size_t e = off + ed.index(i, j, k);
          if (kinds[e] == EntityKind::Inactive) continue;
          const std::array<int, 3> ijk{i, j, k};
          const double dfc = g.at(f.raw(), Entity::Face, c, ijk) - g.at(f.raw(), Entity::Face, c, shift(ijk, b, -1));
          const double dfb = g.at(f.raw(), Entity::Face, b, ijk) - g.at(f.raw(), Entity::Face, b, shift(ijk, c, -1));
          out[e] = (dfc - dfb) * g.inv_h;
        }
  }
  return out;
}

FaceField curl_edge_to_face(const EdgeField& e) {
  const GridTopology& t = e.topo();
  const Grid g(t);
  FaceField out(e.topo_ptr());
  const auto kinds = t.kinds(Entity::Face);
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    const Dims fd = t.face_dims(a);
    const std::size_t off = t.offset(Entity::Face, a);
    XHODGE_PARALLEL_FOR
    for (int k = 0; k < fd.nz; ++k)
      for (int j = 0; j < fd.ny; ++j)
        for (int i = 0; i < fd.nx; ++i) {
          const std::size_t f = off + fd.index(i, j, k);
          if (kinds[f] == EntityKind::Inactive) continue;
          const std::array<int, 3> ijk{i, j, k};
          const double dec = g.at(e.raw(), Entity::Edge, c, shift(ijk, b, 1)) - g.at(e.raw(), Entity::Edge, c, ijk);
          const double deb = g.at(e.raw(), Entity::Edge, b, shift(ijk, c, 1)) - g.at(e.raw(), Entity::Edge, b, ijk);
          out[f] = (dec - deb) * g.inv_h;
        }
  }
  return out;
}

EdgeField node_gradient(const NodeField& phi) {
  const GridTopology& t = phi.topo();
  EdgeField out(phi.topo_ptr());
  const double inv_h = 1.0 / t.h();
  const Dims nd = t.node_dims();
  const std::size_t stride[3] = {1, std::size_t(nd.nx), std::size_t(nd.nx) * std::size_t(nd.ny)};
  const auto kinds = t.kinds(Entity::Edge);
  for (int a = 0; a < 3; ++a) {
    const Dims ed = t.edge_dims(a);
    const std::size_t off = t.offset(Entity::Edge, a);
    XHODGE_PARALLEL_FOR
    for (int k = 0; k < ed.nz; ++k)
      for (int j = 0; j < ed.ny; ++j)
        for (int i = 0; i < ed.nx; ++i) {
          const std::size_t e = off + ed.index(i, j, k);
          if (kinds[e] == EntityKind::Inactive) continue;
          const std::size_t lo = nd.index(i, j, k);
          out[e] = (phi[lo + stride[a]] - phi[lo]) * inv_h;
        }
  }
  return out;
}

NodeField edge_divergence(const EdgeField& e) {
  const GridTopology& t = e.topo();
  const Grid g(t);
  NodeField out(e.topo_ptr());
  const Dims nd = t.node_dims();
  const auto kinds = t.kinds(Entity::Node);
  XHODGE_PARALLEL_FOR
  for (int k = 0; k < nd.nz; ++k)
    for (int j = 0; j < nd.ny; ++j)
      for (int i = 0; i < nd.nx; ++i) {
        const std::size_t n = nd.index(i, j, k);
        if (kinds[n] == EntityKind::Inactive) continue;
        const std::array<int, 3> ijk{i, j, k};
        double s = 0.0;
        for (int a = 0; a < 3; ++a)
          s += g.at(e.raw(), Entity::Edge, a, ijk) - g.at(e.raw(), Entity::Edge, a, shift(ijk, a, -1));
        out[n] = s * g.inv_h;
      }
  return out;
}

namespace {

template <class Visit>
void for_each_cell_side(const GridTopology& t, std::size_t c, const Visit& visit) {
  const Dims cd = t.cell_dims();
  const auto ijk = cd.unravel(c);
  for (int a = 0; a < 3; ++a) {
    const Dims fd = t.face_dims(a);
    const std::size_t off = t.offset(Entity::Face, a);
    for (int s = 0; s < 2; ++s) {
      std::array<int, 3> face = ijk;
      std::array<int, 3> nb = ijk;
      face[a] += s;
      nb[a] += s ? 1 : -1;
      visit(off + fd.index(face[0], face[1], face[2]), nb);
    }
  }
}

}  // namespace

ScalarField neg_laplacian(const ScalarField& q, const ScalarBoundaryCondition& bc) {
  const GridTopology& t = q.topo();
  ScalarField out(q.topo_ptr());
  const double inv_h2 = 1.0 / (t.h() * t.h());
  const Dims cd = t.cell_dims();
  XHODGE_PARALLEL_FOR
  for (long long c = 0; c < (long long)cd.size(); ++c) {
    if (!t.fluid(std::size_t(c))) continue;
    const double qc = q[std::size_t(c)];
    double s = 0.0;
    for_each_cell_side(t, std::size_t(c), [&](std::size_t face, const std::array<int, 3>& nb) {
      if (t.fluid(nb[0], nb[1], nb[2])) {
        s += qc - q[cd.index(nb[0], nb[1], nb[2])];
      } else {
        s -= bc.coef[t.boundary_slot(face)] * qc;
      }
    });
    out[std::size_t(c)] = s * inv_h2;
  }
  return out;
}

ScalarField neg_laplacian_diagonal(const TopologyPtr& topo_ptr, const ScalarBoundaryCondition& bc) {
  const GridTopology& topo = *topo_ptr;
  const double inv_h2 = 1.0 / (topo.h() * topo.h());
  ScalarField diag(topo_ptr);
  const Dims cd = topo.cell_dims();
  for (std::size_t c = 0; c < cd.size(); ++c) {
    if (!topo.fluid(c)) continue;
    double s = 0.0;
    for_each_cell_side(topo, c, [&](std::size_t face, const std::array<int, 3>& nb) {
      s += topo.fluid(nb[0], nb[1], nb[2]) ? 1.0 : -bc.coef[topo.boundary_slot(face)];
    });
    diag[c] = s * inv_h2;
  }
  return diag;
}

ScalarField sample_cells(const TopologyPtr& topo, const std::function<double(const Vec3&)>& f) {
  ScalarField out(topo);
  for (std::size_t c = 0; c < out.size(); ++c)
    if (topo->fluid(c)) out[c] = f(topo->position(Entity::Cell, c));
  return out;
}

NodeField sample_nodes(const TopologyPtr& topo, const std::function<double(const Vec3&)>& f) {
  NodeField out(topo);
  for (std::size_t n = 0; n < out.size(); ++n)
    if (topo->active(Entity::Node, n)) out[n] = f(topo->position(Entity::Node, n));
  return out;
}

FaceField sample_faces(const TopologyPtr& topo, const std::function<Vec3(const Vec3&)>& f) {
  FaceField out(topo);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!topo->active(Entity::Face, i)) continue;
    const int axis = topo->locate(Entity::Face, i).first;
    out[i] = f(topo->position(Entity::Face, i))[axis];
  }
  return out;
}

EdgeField sample_edges(const TopologyPtr& topo, const std::function<Vec3(const Vec3&)>& f) {
  EdgeField out(topo);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!topo->active(Entity::Edge, i)) continue;
    const int axis = topo->locate(Entity::Edge, i).first;
    out[i] = f(topo->position(Entity::Edge, i))[axis];
  }
  return out;
}

double boundary_flux(const FaceField& f, BoundaryPart part) {
  const GridTopology& t = f.topo();
  std::vector<double> terms;
  for (const BoundaryFace& bf : t.boundary_faces()) {
    if (part == BoundaryPart::Obstacle && bf.far) continue;
    if (part == BoundaryPart::Far && !bf.far) continue;
    terms.push_back(bf.side * f[bf.flat]);
  }
  return t.h() * t.h() * pairwise_sum(terms);
}

Vec3 cell_average(const FaceField& f, std::size_t cell) {
  const GridTopology& t = f.topo();
  const auto ijk = t.cell_dims().unravel(cell);
  Vec3 v{};
  for (int a = 0; a < 3; ++a) {
    const Dims fd = t.face_dims(a);
    const std::size_t off = t.offset(Entity::Face, a);
    std::array<int, 3> hi = ijk;
    hi[a] += 1;
    v[a] = 0.5 * (f[off + fd.index(ijk[0], ijk[1], ijk[2])] + f[off + fd.index(hi[0], hi[1], hi[2])]);
  }
  return v;
}

}  // namespace xhodge
