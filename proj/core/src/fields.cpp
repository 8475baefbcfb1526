#include "xhodge/fields.hpp"

#include <algorithm>
#include <limits>

namespace xhodge {
namespace {

constexpr std::size_t kBlock = 128;

template <class Term>
double tree_sum(std::size_t n, const Term& term) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    double s = 0.0;
    for (std::size_t i = b * kBlock; i < end; ++i) s += term(i);
    partial[b] = s;
  }
  std::size_t m = nblocks;
  while (m > 1) {
    const std::size_t half = (m + 1) / 2;
    for (std::size_t i = 0; i < m / 2; ++i) partial[i] = partial[2 * i] + partial[2 * i + 1];
    if (m % 2) partial[m / 2] = partial[m - 1];
    m = half;
  }
  return partial[0];
}

}  // namespace

bool same_grid(const GridTopology& a, const GridTopology& b) {
  if (&a == &b) return true;
  return a.n() == b.n() && a.L() == b.L() &&
         to_descriptor(a.spec().obstacle) == to_descriptor(b.spec().obstacle);
}

double pairwise_sum(std::span<const double> x) {
  return tree_sum(x.size(), [&](std::size_t i) { return x[i]; });
}

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("dot product of vectors with different lengths");
  return tree_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double lr_norm_values(std::span<const double> values, double cell_volume, double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  // Scale by the max entry so large exponents do not overflow.
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  const double s = tree_sum(values.size(), [&](std::size_t i) { return std::pow(std::abs(values[i]) / m, r); });
  return m * std::pow(cell_volume * s, 1.0 / r);
}

}  // namespace xhodge
