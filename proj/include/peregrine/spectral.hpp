#pragma once

#include <utility>

#include "peregrine/field.hpp"

namespace peregrine {

// Fourier data under the pinned conventions:
//   periodic:  coef(m) = (1/P) * sum_j f(x_j) e^{-i xi_m x_j} * h
//   line:      coef(m) =         sum_j f(x_j) e^{-i xi_m x_j} * h
// with xi_m = 2*pi*m/length in FFT order. Both are exactly invertible.
struct Spectrum {
  Grid grid;
  ArrayXcd coef;

  Complex at(int m) const {  // signed mode index
    const int idx = m >= 0 ? m : m + grid.n;
    return coef[idx];
  }
};

Spectrum dft(const ComplexField& f);
ComplexField idft(const Spectrum& s);

ComplexField spectral_derivative(const ComplexField& f, int order = 1);

// Flat-line/flat-circle Hilbert transform: Fourier multiplier -sgn(xi),
// zero mode mapped to 0. With this sign, (I - sgn(k) H) e^{-i k x} = 0.
ComplexField flat_hilbert(const ComplexField& f);

// Samples translated by +delta via the spectrum phase (trigonometric shift).
ComplexField translate(const ComplexField& f, double delta);

double grid_l2_norm(const ComplexField& f);
double spectrum_l2_norm(const Spectrum& s);

// H^s norm: periodic sum_m (1+xi^2)^s |coef|^2, line (1/2pi) * integral.
double sobolev_norm(const ComplexField& f, double s);

struct XsSplit {
  ComplexField periodic;  // f0 on a PeriodicGrid covering one period
  ComplexField decaying;  // f1 = f - (f0 tiled), on the original line grid
};

// Unique periodic/decaying decomposition of a line-grid field. f0 is the
// phase-aligned per-period average of f over the outer half |x| >= L/2,
// where the decaying part is already negligible. Throws DecayViolation when
// the reconstructed f1 fails the edge-decay check at `decay_tol`.
XsSplit xs_split(const ComplexField& f, double period, double decay_tol = 1e-8);

// Periodic extension of a periodic-grid field onto a commensurate line grid.
ComplexField tile_periodic(const ComplexField& periodic, const Grid& line);

// ||f0||_{H^{s+s0}(T)} + ||f1||_{H^s(R)}.
double xs_norm(const ComplexField& f, double s, double s0 = 2.0,
               double period = 2.0 * kPi, double decay_tol = 1e-8);

}  // namespace peregrine
