#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "peregrine/verify.hpp"

namespace peregrine::initdata {

using curves::LineCurve;
using curves::PeriodicCurve;
using curves::SplitField;

struct FixedPointTrace {
  std::vector<double> increments;  // successive sup-norm steps
  bool converged = false;
  double final_increment = 0.0;
  int n_iter = 0;
};

struct PeriodicFixedPoint {
  PeriodicCurve curve;
  FixedPointTrace trace;
};

// Picard iteration for the periodic interface solving
// conj(omega) - alpha = c e^{-i k omega}; contraction for |c| <= 0.2 / k.
PeriodicFixedPoint iterate_periodic(
    Complex c, int k, double tol = 1e-12, int n_points = 256, int cap = 200,
    std::optional<ArrayXcd> start = std::nullopt);

struct LocalizedFixedPoint {
  ComplexField xi1;   // localized correction
  LineCurve curve;    // composite zeta_0 = omega_0 + xi1
  FixedPointTrace trace;
};

// Picard iteration for the localized correction making
// conj(zeta_0) - alpha holomorphic below the composite curve:
//   conj(g_{n+1}) = (1/2)(I + H_{z_n}) conj(xi1_tilde)
//                   + (H_{z_n} - H_{omega_0}) conj(xi0).
LocalizedFixedPoint iterate_localized(const PeriodicCurve& omega0,
                                      const ComplexField& xi1_tilde,
                                      const ComplexField& xi0,
                                      double tol = 1e-10, int cap = 60,
                                      double decay_tol = 1e-2);

// Holomorphic projection producing a compatible velocity from packet data:
// conj(v0) = (1/2)(I + H_{zeta0}) conj(Dt zeta-tilde).
SplitField project_velocity(const LineCurve& zeta0, const SplitField& Dt_zeta);

struct CompatibilityRefs {
  const ComplexField* xi1_tilde = nullptr;   // for the (I-3) interface distance
  const SplitField* v_tilde = nullptr;       // for the (I-3) velocity distance
  double sobolev_s = 4.0;
};

// Residuals of the five compatibility conditions; distance entries appear
// only when the references are supplied.
std::map<std::string, double> check_compatibility(
    const LineCurve& zeta0, const SplitField& v0, const SplitField& w0,
    const CompatibilityRefs& refs = {});

}  // namespace peregrine::initdata
