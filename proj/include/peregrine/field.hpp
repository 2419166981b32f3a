#pragma once

#include <utility>

#include "peregrine/grid.hpp"

namespace peregrine {

// Sampled complex-valued function, one value per grid node.
struct ComplexField {
  Grid grid;
  ArrayXcd v;

  ComplexField() = default;
  ComplexField(Grid g, ArrayXcd values) : grid(g), v(std::move(values)) {
    if (v.size() != grid.n) throw std::invalid_argument("field/grid size mismatch");
    if (!v.allFinite()) throw std::invalid_argument("field has non-finite samples");
  }

  static ComplexField zero(const Grid& g) {
    return ComplexField(g, ArrayXcd::Zero(g.n));
  }
  template <typename Fn>
  static ComplexField sample(const Grid& g, Fn&& fn) {
    ArrayXcd vals(g.n);
    for (int j = 0; j < g.n; ++j) vals[j] = fn(g.node(j));
    return ComplexField(g, std::move(vals));
  }

  double sup_norm() const { return v.abs().maxCoeff(); }
  double max_imag() const { return v.imag().abs().maxCoeff(); }
};

// Largest sample magnitude on the outer 5% of nodes (2.5% per end).
inline double edge_level(const ComplexField& f) {
  const int n = f.grid.n;
  const int m = std::max(1, n / 40);
  double worst = 0.0;
  for (int j = 0; j < m; ++j) {
    worst = std::max(worst, std::abs(f.v[j]));
    worst = std::max(worst, std::abs(f.v[n - 1 - j]));
  }
  return worst;
}

// Truncation edge-decay check: the outer 5% of nodes must sit below
// rel_tol * max|f|. Fields failing this are not faithfully represented on
// the truncated line. An all-roundoff field (e.g. the decaying part of a
// purely periodic quantity) passes via the absolute floor.
inline bool passes_edge_decay(const ComplexField& f, double rel_tol = 1e-8) {
  const double peak = f.sup_norm();
  if (peak == 0.0) return true;
  const double edge = edge_level(f);
  return edge <= rel_tol * peak || edge <= 1e-13;
}

inline void require_edge_decay(const ComplexField& f, double rel_tol = 1e-8,
                               const char* what = "field") {
  if (f.grid.kind != GridKind::Line) return;
  if (!passes_edge_decay(f, rel_tol))
    throw DecayViolation(std::string(what) + ": samples do not decay at the truncation edge");
}

}  // namespace peregrine
