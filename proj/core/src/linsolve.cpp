#include "xhodge/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "xhodge/fields.hpp"

namespace xhodge {
namespace {

double dot(const Vector& a, const Vector& b) { return pairwise_dot(a, b); }
double nrm(const Vector& a) { return std::sqrt(dot(a, a)); }

void axpy(double s, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

void project_in_place(const std::vector<Vector>& basis, Vector& v) {
  for (int pass = 0; pass < 2; ++pass)
    for (const Vector& q : basis) axpy(-dot(q, v), q, v);
}

}  // namespace

Vector project_out(const std::vector<Vector>& basis, Vector v) {
  project_in_place(basis, v);
  return v;
}

std::vector<Vector> orthonormalize(const std::vector<Vector>& vectors, double drop_tol) {
  std::vector<Vector> basis;
  for (const Vector& v : vectors) {
    const double n0 = nrm(v);
    if (n0 == 0.0) continue;
    Vector w = project_out(basis, v);
    const double n1 = nrm(w);
    if (n1 <= drop_tol * n0) continue;
    for (double& x : w) x /= n1;
    basis.push_back(std::move(w));
  }
  return basis;
}

double symmetry_defect(const LinearOperator& A, int probes, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double worst = 0.0;
  Vector x(A.dim), y(A.dim), ax(A.dim), ay(A.dim);
  for (int p = 0; p < probes; ++p) {
    for (std::size_t i = 0; i < A.dim; ++i) {
      x[i] = g(rng);
      y[i] = g(rng);
    }
    A.apply(x, ax);
    A.apply(y, ay);
    const double scale = nrm(ax) * nrm(y) + nrm(x) * nrm(ay);
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(dot(ax, y) - dot(x, ay)) / scale);
  }
  return worst;
}

SolveResult cg_solve(const LinearOperator& A, const Vector& b, const SolveOptions& opts,
                     const std::optional<Vector>& x0) {
  if (b.size() != A.dim) throw ContractError("right-hand side length does not match the operator");
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) throw ContractError("solver tolerances must be positive");
  if (opts.check_symmetry && symmetry_defect(A) > 1e-12)
    throw ContractError("operator failed the symmetry probe");

  const std::vector<Vector> Q = orthonormalize(opts.deflation);
  SolveResult res;
  SolveStats& st = res.stats;
  for (const Vector& q : Q) st.deflated_components.push_back(dot(q, b));

  Vector bp = project_out(Q, b);
  st.rhs_norm = nrm(bp);
  res.x = x0 ? project_out(Q, *x0) : Vector(A.dim, 0.0);
  if (res.x.size() != A.dim) throw ContractError("initial guess length does not match the operator");

  Vector minv;
  if (opts.jacobi && A.diagonal) {
    minv = A.diagonal();
    for (double& d : minv) d = d > 0.0 ? 1.0 / d : 0.0;
  }
  auto precondition = [&](const Vector& r, Vector& z) {
    if (minv.empty()) {
      z = r;
    } else {
      for (std::size_t i = 0; i < r.size(); ++i) z[i] = minv[i] * r[i];
      project_in_place(Q, z);
    }
  };
  auto apply_projected = [&](const Vector& x, Vector& y) {
    A.apply(x, y);
    project_in_place(Q, y);
  };

  if (st.rhs_norm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    st.converged = true;
    return res;
  }
  const double target = std::max(opts.rel_tol * st.rhs_norm, opts.abs_tol);

  Vector r(A.dim), z(A.dim), p(A.dim), ap(A.dim);
  auto true_residual = [&]() {
    apply_projected(res.x, ap);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = bp[i] - ap[i];
    return nrm(r);
  };

  double rnorm = true_residual();
  // Restarts recover from drift between the recursive and the true residual.
  for (int restart = 0; restart < 4 && rnorm > target; ++restart) {
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    while (st.iterations < opts.max_iters) {
      apply_projected(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      axpy(alpha, p, res.x);
      axpy(-alpha, ap, r);
      ++st.iterations;
      if (nrm(r) <= target) break;
      precondition(r, z);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    rnorm = true_residual();
    if (st.iterations >= opts.max_iters) break;
  }
  project_in_place(Q, res.x);
  st.relative_residual = rnorm / st.rhs_norm;
  st.converged = rnorm <= target;
  if (!st.converged)
    throw SolverError("conjugate gradients did not reach the tolerance in " + std::to_string(st.iterations) +
                          " iterations (relative residual " + std::to_string(st.relative_residual) + ")",
                      st);
  return res;
}

}  // namespace xhodge
