#pragma once

#include <optional>

#include "peregrine/spectral.hpp"

namespace peregrine::curves {

using namespace peregrine;

struct ChordArc {
  double lower = 0.0;
  double upper = 0.0;
};

// Periodic interface omega(alpha) with omega - alpha periodic.
struct PeriodicCurve {
  Grid grid;  // periodic
  ComplexField omega;
  ComplexField omega_alpha;
  mutable std::optional<ChordArc> chord_arc_cache;

  const ChordArc& chord_arc() const;
};

PeriodicCurve make_periodic_curve(const Grid& grid, ArrayXcd omega_samples);
PeriodicCurve flat_periodic_curve(const Grid& grid);

// Evaluate a periodic-grid field at arbitrary points by its Fourier series.
ArrayXcd evaluate_periodic(const ComplexField& f, const ArrayXd& points);

// A function on a line grid carried as periodic + decaying parts. All
// arithmetic keeps the split exact: no averaging is involved.
struct SplitField {
  ComplexField periodic;     // f0 on the backbone's periodic grid
  ComplexField decaying;     // f1 on the line grid
  ComplexField periodic_on_line;  // f0 evaluated at the line nodes

  ComplexField total() const {
    return ComplexField(decaying.grid, periodic_on_line.v + decaying.v);
  }
};

SplitField make_split(const ComplexField& periodic_part, const Grid& line);
SplitField make_split(const ComplexField& periodic_part, ComplexField decaying_part);
SplitField decaying_split(const Grid& periodic_grid, ComplexField decaying_part);
// Split a raw line field by phase-aligned averaging (xs_split).
SplitField split_by_averaging(const ComplexField& f, double period, double decay_tol = 1e-8);

SplitField operator+(const SplitField& a, const SplitField& b);
SplitField operator-(const SplitField& a, const SplitField& b);
SplitField operator*(const SplitField& a, const SplitField& b);
SplitField operator*(Complex c, const SplitField& a);
SplitField operator+(const SplitField& a, Complex c);
SplitField operator-(const SplitField& a, Complex c);
SplitField conj(const SplitField& a);
SplitField derivative(const SplitField& a, int order = 1);
SplitField real_part(const SplitField& a);
// 1/a; throws DivisionGuard when |a| dips below `floor` anywhere.
SplitField reciprocal(const SplitField& a, double floor = 0.1);

// Interface zeta = omega + (decaying correction) over a periodic backbone.
struct LineCurve {
  Grid grid;  // line
  ComplexField zeta;
  ComplexField zeta_alpha;
  PeriodicCurve backbone;
  ComplexField omega_on_line;        // backbone curve at line nodes
  ComplexField omega_alpha_on_line;  // backbone derivative at line nodes
  mutable std::optional<ChordArc> chord_arc_cache;

  const ChordArc& chord_arc() const;
  ComplexField correction() const {  // zeta - omega, decaying
    return ComplexField(grid, zeta.v - omega_on_line.v);
  }
};

// zeta given as backbone + decaying correction; derivatives spectral per part
// unless supplied.
LineCurve make_line_curve(const Grid& line, const PeriodicCurve& backbone,
                          const ComplexField& correction,
                          std::optional<ComplexField> zeta_alpha = std::nullopt,
                          double decay_tol = 1e-8);
LineCurve flat_line_curve(const Grid& line, double backbone_period = 2.0 * kPi,
                          int backbone_points = 256);

void require_chord_arc(const PeriodicCurve& c);
void require_chord_arc(const LineCurve& c);

}  // namespace peregrine::curves
