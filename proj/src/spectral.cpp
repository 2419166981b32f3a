#include "peregrine/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <map>
#include <vector>

namespace peregrine {
namespace {

// One plan cache per thread; Eigen::FFT is stateful.
Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

ArrayXcd fft_forward(const ArrayXcd& in) {
  Eigen::VectorXcd src = in.matrix();
  Eigen::VectorXcd dst;
  fft_engine().fwd(dst, src);
  return dst.array();
}

ArrayXcd fft_inverse(const ArrayXcd& in) {
  Eigen::VectorXcd src = in.matrix();
  Eigen::VectorXcd dst;
  fft_engine().inv(dst, src);  // includes the 1/N factor
  return dst.array();
}

// (-1)^m for FFT-ordered index; accounts for nodes starting at -length/2.
ArrayXd parity(int n) {
  ArrayXd p(n);
  for (int i = 0; i < n; ++i) p[i] = (i % 2 == 0) ? 1.0 : -1.0;
  return p;
}

}  // namespace

Spectrum dft(const ComplexField& f) {
  const int n = f.grid.n;
  ArrayXcd raw = fft_forward(f.v);
  const double scale =
      f.grid.kind == GridKind::Periodic ? 1.0 / n : f.grid.spacing();
  return Spectrum{f.grid, raw * parity(n) * scale};
}

ComplexField idft(const Spectrum& s) {
  const int n = s.grid.n;
  const double scale =
      s.grid.kind == GridKind::Periodic ? 1.0 / n : s.grid.spacing();
  ArrayXcd raw = s.coef * parity(n) / scale;
  return ComplexField(s.grid, fft_inverse(raw));
}

ComplexField spectral_derivative(const ComplexField& f, int order) {
  Spectrum s = dft(f);
  const int n = f.grid.n;
  for (int i = 0; i < n; ++i) {
    if (i == n / 2 && order % 2 != 0) {
      s.coef[i] = 0.0;  // Nyquist has no well-defined odd derivative
      continue;
    }
    s.coef[i] *= std::pow(kI * f.grid.frequency(i), order);
  }
  return idft(s);
}

ComplexField flat_hilbert(const ComplexField& f) {
  Spectrum s = dft(f);
  for (int i = 0; i < f.grid.n; ++i) {
    const double xi = f.grid.frequency(i);
    s.coef[i] *= xi > 0 ? -1.0 : (xi < 0 ? 1.0 : 0.0);
  }
  return idft(s);
}

ComplexField translate(const ComplexField& f, double delta) {
  Spectrum s = dft(f);
  for (int i = 0; i < f.grid.n; ++i)
    s.coef[i] *= std::exp(kI * (f.grid.frequency(i) * delta));
  return idft(s);
}

double grid_l2_norm(const ComplexField& f) {
  return std::sqrt(f.v.abs2().sum() * f.grid.spacing());
}

double spectrum_l2_norm(const Spectrum& s) {
  const double sum = s.coef.abs2().sum();
  if (s.grid.kind == GridKind::Periodic)
    return std::sqrt(sum * s.grid.period());
  const double dxi = 2.0 * kPi / s.grid.length;
  return std::sqrt(sum * dxi / (2.0 * kPi));
}

double sobolev_norm(const ComplexField& f, double s) {
  Spectrum sp = dft(f);
  double sum = 0.0;
  for (int i = 0; i < f.grid.n; ++i) {
    const double xi = f.grid.frequency(i);
    sum += std::pow(1.0 + xi * xi, s) * std::norm(sp.coef[i]);
  }
  if (f.grid.kind == GridKind::Periodic) return std::sqrt(sum);
  const double dxi = 2.0 * kPi / f.grid.length;
  return std::sqrt(sum * dxi / (2.0 * kPi));
}

XsSplit xs_split(const ComplexField& f, double period, double decay_tol) {
  if (f.grid.kind != GridKind::Line)
    throw std::invalid_argument("xs_split needs a line-grid field");
  const double ratio = f.grid.length / period;
  const long n_periods = std::lround(ratio);
  if (n_periods < 2 || std::abs(ratio - n_periods) > 1e-9 * ratio)
    throw std::invalid_argument("truncation must be an integer number of periods");
  const double per_nodes = period / f.grid.spacing();
  const int nper = static_cast<int>(std::lround(per_nodes));
  if (std::abs(per_nodes - nper) > 1e-9 || nper % 2 != 0)
    throw std::invalid_argument("period must hold an even integer number of nodes");

  const int n = f.grid.n;
  // Phase class of node j: since -L is a multiple of the period, node j has
  // phase (j mod nper) * h relative to the period start.
  ArrayXcd acc = ArrayXcd::Zero(nper);
  Eigen::ArrayXi count = Eigen::ArrayXi::Zero(nper);
  const double half = 0.5 * f.grid.half_width();
  for (int j = 0; j < n; ++j) {
    if (std::abs(f.grid.node(j)) < half) continue;
    const int r = j % nper;
    acc[r] += f.v[j];
    count[r] += 1;
  }
  ArrayXcd class_avg(nper);
  for (int r = 0; r < nper; ++r) class_avg[r] = acc[r] / double(count[r]);

  // Periodic grid nodes live at -P/2 + q*h; phase r*h corresponds to node
  // index q = (r - nper/2) mod nper.
  Grid pg = Grid::periodic(nper, period);
  ArrayXcd pv(nper);
  for (int r = 0; r < nper; ++r) pv[(r + nper / 2) % nper] = class_avg[r];
  ComplexField f0(pg, std::move(pv));

  ComplexField tiled = tile_periodic(f0, f.grid);
  ComplexField f1(f.grid, f.v - tiled.v);
  // Decay of the remainder is judged against the input's scale so that an
  // all-roundoff remainder from a purely periodic input still passes.
  const double scale = std::max(f.sup_norm(), f1.sup_norm());
  if (scale > 0.0 && edge_level(f1) > decay_tol * scale)
    throw DecayViolation("xs_split: remainder fails the edge-decay check");
  return XsSplit{std::move(f0), std::move(f1)};
}

ComplexField tile_periodic(const ComplexField& periodic, const Grid& line) {
  if (periodic.grid.kind != GridKind::Periodic || line.kind != GridKind::Line)
    throw std::invalid_argument("tile_periodic: wrong grid kinds");
  const int nper = periodic.grid.n;
  if (std::abs(periodic.grid.spacing() - line.spacing()) >
      1e-12 * line.spacing())
    throw std::invalid_argument("tile_periodic: incommensurate spacings");
  ArrayXcd vals(line.n);
  // Line node j has phase (j mod nper)*h; periodic node for that phase is
  // (j + nper/2) mod nper (see xs_split).
  for (int j = 0; j < line.n; ++j)
    vals[j] = periodic.v[(j + nper / 2) % nper];
  return ComplexField(line, std::move(vals));
}

double xs_norm(const ComplexField& f, double s, double s0, double period,
               double decay_tol) {
  if (f.grid.kind == GridKind::Periodic) return sobolev_norm(f, s + s0);
  XsSplit parts = xs_split(f, period, decay_tol);
  return sobolev_norm(parts.periodic, s + s0) + sobolev_norm(parts.decaying, s);
}

}  // namespace peregrine
