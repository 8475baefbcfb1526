#pragma once

// Staggered-grid field containers. Storage is dense over every entity of the family;
// entries on inactive entities are kept at zero so that reductions can run over the
// whole array in a fixed order.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "xhodge/errors.hpp"
#include "xhodge/geometry.hpp"

namespace xhodge {

/// True when both topologies describe the same grid (same object, or same n, L and obstacle).
bool same_grid(const GridTopology& a, const GridTopology& b);

/// Fixed-order pairwise sum: blocks of 128 summed left to right, blocks combined as a
/// balanced binary tree. Results do not depend on the thread count.
double pairwise_sum(std::span<const double> x);
double pairwise_dot(std::span<const double> a, std::span<const double> b);

template <Entity E>
class Field {
 public:
  static constexpr Entity entity = E;

  Field() = default;
  explicit Field(TopologyPtr topo) : topo_(std::move(topo)), v_(topo_->size(E), 0.0) {}
  Field(TopologyPtr topo, std::vector<double> values) : topo_(std::move(topo)), v_(std::move(values)) {
    if (v_.size() != topo_->size(E)) throw ContractError("field length does not match the topology");
  }

  const TopologyPtr& topo_ptr() const { return topo_; }
  const GridTopology& topo() const { return *topo_; }
  bool valid() const { return topo_ != nullptr; }

  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  std::vector<double>& raw() { return v_; }
  const std::vector<double>& raw() const { return v_; }

  /// Zero every entry on an inactive entity.
  void clear_inactive() {
    const auto kinds = topo_->kinds(E);
    for (std::size_t i = 0; i < v_.size(); ++i)
      if (kinds[i] == EntityKind::Inactive) v_[i] = 0.0;
  }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  void check_compatible(const Field& o) const {
    if (!topo_ || !o.topo_) throw ContractError("operation on an unbound field");
    if (topo_ != o.topo_ && !same_grid(*topo_, *o.topo_))
      throw ContractError("fields live on different topologies");
  }

  Field& operator+=(const Field& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
  }
  /// this += s * o
  Field& axpy(double s, const Field& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += s * o.v_[i];
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }

 private:
  TopologyPtr topo_;
  std::vector<double> v_;
};

using ScalarField = Field<Entity::Cell>;
using FaceField = Field<Entity::Face>;
using EdgeField = Field<Entity::Edge>;
using NodeField = Field<Entity::Node>;

template <Entity E>
double inner_product(const Field<E>& a, const Field<E>& b) {
  a.check_compatible(b);
  return a.topo().cell_volume() * pairwise_dot(a.values(), b.values());
}

template <Entity E>
double norm2(const Field<E>& a) {
  return std::sqrt(inner_product(a, a));
}

/// (sum of h^3 |a_i|^r)^(1/r); r = infinity gives the max norm.
double lr_norm_values(std::span<const double> values, double cell_volume, double r);

template <Entity E>
double lr_norm(const Field<E>& a, double r) {
  if (!(r > 1.0)) throw ContractError("L^r exponent must exceed 1");
  return lr_norm_values(a.values(), a.topo().cell_volume(), r);
}

/// Copy of `a` with entries outside the given kinds set to zero.
template <Entity E>
Field<E> restrict_to(const Field<E>& a, std::initializer_list<EntityKind> keep) {
  Field<E> out = a;
  const auto kinds = a.topo().kinds(E);
  for (std::size_t i = 0; i < out.size(); ++i) {
    bool k = false;
    for (EntityKind kk : keep) k = k || kinds[i] == kk;
    if (!k) out[i] = 0.0;
  }
  return out;
}

}  // namespace xhodge
