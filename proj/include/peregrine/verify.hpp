#pragma once

#include <map>
#include <string>
#include <vector>

#include "peregrine/wavepacket.hpp"

namespace peregrine::verify {

using curves::LineCurve;
using curves::PeriodicCurve;
using curves::SplitField;

struct ResidualReport {
  double epsilon = 0.0;
  double residual_sup = 0.0;      // sup of the momentum residual
  double residual_sobolev = 0.0;  // H^s norm of its decaying part
  std::map<std::string, double> components;
};

struct WwOptions {
  double sobolev_s = 4.0;
  bool with_holomorphicity = true;
};

// Momentum residual Dt~^2 zeta - i A~ d_a zeta + i of the packet, pointwise
// and in H^s on the decaying part, plus holomorphicity defects of the
// conjugated interface and velocity and the third-order hierarchy residual.
ResidualReport ww_residual(const packet::WavePacket& wp, const WwOptions& opts = {});

// Transport coefficient from (I - H_zeta) b = -[D_t zeta, H_zeta] (zbar_a-1)/z_a:
// real part taken, then the double-layer resolvent.
SplitField recover_b(const LineCurve& curve, const SplitField& Dtz);
ComplexField recover_b(const PeriodicCurve& curve, const ComplexField& Dtz);

// Acceleration coefficient A = 1 + solve of the displayed two-commutator
// right side.
SplitField recover_A(const LineCurve& curve, const SplitField& Dtz,
                     const SplitField& Dt2z);
ComplexField recover_A(const PeriodicCurve& curve, const ComplexField& Dtz,
                       const ComplexField& Dt2z);

// (a_t/a) o kappa^{-1} from the displayed identity, solving for the real
// unknown h = q A in (I - H)(h zbar_a) = RHS and dividing out A afterwards.
SplitField recover_at_over_a(const LineCurve& curve, const SplitField& Dtz,
                             const SplitField& Dt2z, const SplitField& A);
ComplexField recover_at_over_a(const PeriodicCurve& curve, const ComplexField& Dtz,
                               const ComplexField& Dt2z, const ComplexField& A);

// Cubic right side G of the quasilinearized system.
SplitField eval_G(const LineCurve& curve, const SplitField& Dtz);
ComplexField eval_G(const PeriodicCurve& curve, const ComplexField& Dtz);

struct EnergyReport {
  double total = 0.0;
  double kinetic = 0.0;  // int (1/A) |D_t Theta|^2
  double holo = 0.0;     // int i Theta d_a conj(Theta)
};

// Trapezoid evaluation of the basic energy. The derivative inside the
// second summand uses 6th-order finite differences (one-sided at the
// edges): slowly decaying holomorphic test fields would otherwise pick up
// spectral seam artifacts.
EnergyReport energy_e0(const ComplexField& A, const ComplexField& theta,
                       const ComplexField& dt_theta);

struct OrderStudyReport {
  std::vector<double> epsilons;
  std::vector<double> norms;
  double fitted_slope = 0.0;
  double r_squared = 0.0;
  double target = 0.0;
  bool pass = false;
  bool degenerate = false;  // an exactly zero norm: slope reported as +inf
};

// Least-squares slope of log(norm) against log(eps); pass at target - 0.2
// (three-point desk-scale fits carry preasymptotic curvature).
OrderStudyReport fit_slope(const std::vector<double>& epsilons,
                           const std::vector<double>& norms, double target);

}  // namespace peregrine::verify
