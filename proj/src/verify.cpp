#include "peregrine/verify.hpp"

#include <cmath>
#include <limits>

namespace peregrine::verify {

using curves::commutator;
using curves::conj;
using curves::derivative;
using curves::quadratic_kernel;
using curves::real_part;
using curves::reciprocal;
using curves::resolvent_solve;
using curves::Side;

ResidualReport ww_residual(const packet::WavePacket& wp, const WwOptions& opts) {
  ResidualReport rep;
  rep.epsilon = wp.params.epsilon;

  // A-tilde is identically one, so -i A d_a zeta + i = -i (zeta_a - 1).
  SplitField momentum =
      wp.Dt2_zeta - kI * (wp.zeta_alpha - Complex(1.0, 0.0));
  ComplexField total = momentum.total();
  rep.residual_sup = total.sup_norm();
  rep.residual_sobolev = sobolev_norm(momentum.decaying, opts.sobolev_s);

  rep.components["momentum_sup"] = rep.residual_sup;
  rep.components["momentum_real"] = total.v.real().abs().maxCoeff();
  rep.components["momentum_imag"] = total.v.imag().abs().maxCoeff();
  rep.components["hierarchy"] = packet::hierarchy_residual(wp);
  if (opts.with_holomorphicity) {
    rep.components["holo_zeta"] =
        holomorphicity_residual(wp.curve, conj(wp.eta), Side::Below);
    rep.components["holo_Dt_zeta"] =
        holomorphicity_residual(wp.curve, conj(wp.Dt_zeta), Side::Below);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Coefficient recoveries. The little algebra helpers below keep the line and
// periodic variants textually parallel.
// ---------------------------------------------------------------------------

namespace {

ComplexField cf_conj(const ComplexField& f) {
  return ComplexField(f.grid, f.v.conjugate());
}
ComplexField cf_mul(const ComplexField& a, const ComplexField& b) {
  return ComplexField(a.grid, a.v * b.v);
}
ComplexField cf_recip(const ComplexField& a, double floor = 0.1) {
  if (a.v.abs().minCoeff() < floor)
    throw DivisionGuard("reciprocal: field magnitude below the safety floor");
  return ComplexField(a.grid, a.v.inverse());
}
ComplexField cf_real(const ComplexField& a) {
  return ComplexField(a.grid, a.v.real().cast<Complex>());
}

// (zbar_a - 1) / z_a for both field flavors.
SplitField holo_slope(const LineCurve& c) {
  SplitField za{c.backbone.omega_alpha,
                ComplexField(c.grid, c.zeta_alpha.v - c.omega_alpha_on_line.v),
                c.omega_alpha_on_line};
  return (conj(za) - Complex(1.0, 0.0)) * reciprocal(za);
}
ComplexField holo_slope(const PeriodicCurve& c) {
  ComplexField za = c.omega_alpha;
  return cf_mul(ComplexField(za.grid, za.v.conjugate() - 1.0), cf_recip(za));
}

SplitField curve_slope_split(const LineCurve& c) {
  return SplitField{c.backbone.omega_alpha,
                    ComplexField(c.grid, c.zeta_alpha.v - c.omega_alpha_on_line.v),
                    c.omega_alpha_on_line};
}

}  // namespace

SplitField recover_b(const LineCurve& curve, const SplitField& Dtz) {
  SplitField g = Complex(-1.0, 0.0) * commutator(curve, Dtz, holo_slope(curve));
  return resolvent_solve(curve, real_part(g));
}

ComplexField recover_b(const PeriodicCurve& curve, const ComplexField& Dtz) {
  ComplexField g = commutator(curve, Dtz, holo_slope(curve));
  return resolvent_solve(curve, ComplexField(g.grid, -g.v.real()));
}

SplitField recover_A(const LineCurve& curve, const SplitField& Dtz,
                     const SplitField& Dt2z) {
  SplitField za = curve_slope_split(curve);
  SplitField arg1 = derivative(conj(Dtz)) * reciprocal(za);
  SplitField g = kI * commutator(curve, Dtz, arg1) +
                 kI * commutator(curve, Dt2z, holo_slope(curve));
  return resolvent_solve(curve, real_part(g)) + Complex(1.0, 0.0);
}

ComplexField recover_A(const PeriodicCurve& curve, const ComplexField& Dtz,
                       const ComplexField& Dt2z) {
  ComplexField arg1 =
      cf_mul(spectral_derivative(cf_conj(Dtz)), cf_recip(curve.omega_alpha));
  ComplexField g1 = commutator(curve, Dtz, arg1);
  ComplexField g2 = commutator(curve, Dt2z, holo_slope(curve));
  ComplexField rhs(g1.grid, (kI * (g1.v + g2.v)).real().cast<Complex>());
  ComplexField sol = resolvent_solve(curve, rhs);
  return ComplexField(sol.grid, sol.v + 1.0);
}

namespace {

// Solve (I - H)(h zbar_a) = rhs for real h. Expanding h zbar_a =
// h + (h z_a) Phi with Phi = (zbar_a - 1)/z_a and (I - H)Phi = 0 gives
// (I - H)h = rhs - [h z_a, H]Phi, a contraction in the perturbative regime.
template <typename CurveT, typename FieldT, typename RealOf, typename Mul,
          typename Sub, typename NormOf>
FieldT solve_weighted_real(const CurveT& curve, const FieldT& rhs,
                           const FieldT& slope_field, const FieldT& phi,
                           RealOf&& re, Mul&& mul, Sub&& sub, NormOf&& norm) {
  FieldT h = resolvent_solve(curve, re(rhs));
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 8; ++it) {
    FieldT corr = commutator(curve, mul(h, slope_field), phi);
    FieldT next = resolvent_solve(curve, re(sub(rhs, corr)));
    const double inc = norm(sub(next, h));
    h = next;
    // O(eps^2)-contractive; the achievable floor is the quadrature's own
    // accuracy, reached within a few rounds.
    if (inc <= 1e-10 * std::max(1.0, norm(h)) || inc > 0.5 * prev) return h;
    prev = inc;
  }
  return h;
}

}  // namespace

SplitField recover_at_over_a(const LineCurve& curve, const SplitField& Dtz,
                             const SplitField& Dt2z, const SplitField& A) {
  SplitField za = curve_slope_split(curve);
  SplitField irecip = reciprocal(za);
  SplitField rhs =
      Complex(0.0, 2.0) * commutator(curve, Dt2z, derivative(conj(Dtz)) * irecip) +
      Complex(0.0, 2.0) * commutator(curve, Dtz, derivative(conj(Dt2z)) * irecip) -
      kI * quadratic_kernel(curve, Dtz, derivative(conj(Dtz)));

  SplitField h = solve_weighted_real(
      curve, rhs, za, holo_slope(curve),
      [](const SplitField& f) { return real_part(f); },
      [](const SplitField& a, const SplitField& b) { return a * b; },
      [](const SplitField& a, const SplitField& b) { return a - b; },
      [](const SplitField& f) { return f.total().sup_norm(); });

  // Divide out A zbar_a: h = q A with q real, after checking the guard.
  ComplexField weight(curve.grid,
                      A.total().v * curve.zeta_alpha.v.conjugate());
  if (weight.v.abs().minCoeff() < 0.1)
    throw DivisionGuard("recover_at_over_a: |A zbar_a| below 0.1");
  return h * reciprocal(A);
}

ComplexField recover_at_over_a(const PeriodicCurve& curve, const ComplexField& Dtz,
                               const ComplexField& Dt2z, const ComplexField& A) {
  ComplexField irecip = cf_recip(curve.omega_alpha);
  ComplexField t1 = commutator(
      curve, Dt2z, cf_mul(spectral_derivative(cf_conj(Dtz)), irecip));
  ComplexField t2 = commutator(
      curve, Dtz, cf_mul(spectral_derivative(cf_conj(Dt2z)), irecip));
  ComplexField t3 = quadratic_kernel(curve, Dtz, spectral_derivative(cf_conj(Dtz)));
  ComplexField rhs(t1.grid, 2.0 * kI * (t1.v + t2.v) - kI * t3.v);

  ComplexField h = solve_weighted_real(
      curve, rhs, curve.omega_alpha, holo_slope(curve),
      [](const ComplexField& f) { return cf_real(f); },
      [](const ComplexField& a, const ComplexField& b) { return cf_mul(a, b); },
      [](const ComplexField& a, const ComplexField& b) {
        return ComplexField(a.grid, a.v - b.v);
      },
      [](const ComplexField& f) { return f.sup_norm(); });

  ComplexField weight(curve.grid, A.v * curve.omega_alpha.v.conjugate());
  if (weight.v.abs().minCoeff() < 0.1)
    throw DivisionGuard("recover_at_over_a: |A omega_a-bar| below 0.1");
  return cf_mul(h, cf_recip(A));
}

SplitField eval_G(const LineCurve& curve, const SplitField& Dtz) {
  SplitField za = curve_slope_split(curve);
  SplitField irecip = reciprocal(za);
  // M(g) = H(g / z_a) + conj(H(conj(g) / z_a)): the operator in the bracket.
  auto M = [&](const SplitField& g) {
    SplitField a = curves::hilbert(curve, g * irecip);
    SplitField b = curves::hilbert(curve, conj(g) * irecip);
    return a + conj(b);
  };
  SplitField dv = derivative(Dtz);
  SplitField bracket = Dtz * M(dv) - M(Dtz * dv);

  SplitField eta{
      ComplexField(curve.backbone.grid,
                   curve.backbone.omega.v -
                       curve.backbone.grid.nodes().cast<Complex>()),
      curve.correction(),
      ComplexField(curve.grid, curve.omega_on_line.v -
                                   curve.grid.nodes().cast<Complex>())};
  SplitField zeta_minus_conj = eta - conj(eta);
  SplitField qk = quadratic_kernel(curve, Dtz, derivative(zeta_minus_conj));
  return Complex(-2.0, 0.0) * bracket + qk;
}

ComplexField eval_G(const PeriodicCurve& curve, const ComplexField& Dtz) {
  ComplexField irecip = cf_recip(curve.omega_alpha);
  auto M = [&](const ComplexField& g) {
    ComplexField a = curves::hilbert(curve, cf_mul(g, irecip));
    ComplexField b = curves::hilbert(curve, cf_mul(cf_conj(g), irecip));
    return ComplexField(a.grid, a.v + b.v.conjugate());
  };
  ComplexField dv = spectral_derivative(Dtz);
  ComplexField Mdv = M(dv);
  ComplexField Mproduct = M(cf_mul(Dtz, dv));
  ArrayXcd bracket = Dtz.v * Mdv.v - Mproduct.v;

  ComplexField wiggle(curve.grid,
                      curve.omega.v - curve.grid.nodes().cast<Complex>());
  ComplexField zc(curve.grid, wiggle.v - wiggle.v.conjugate());
  ComplexField qk = quadratic_kernel(curve, Dtz, spectral_derivative(zc));
  return ComplexField(curve.grid, -2.0 * bracket + qk.v);
}

// ---------------------------------------------------------------------------
// Energy and slope fitting.
// ---------------------------------------------------------------------------

namespace {

// 6th-order first derivative; centered inside, one-sided at the edges.
ArrayXcd fd6(const ComplexField& f) {
  const int n = f.grid.n;
  const double h = f.grid.spacing();
  ArrayXcd d(n);
  static const double fwd[7] = {-49.0 / 20, 6.0, -15.0 / 2, 20.0 / 3,
                                -15.0 / 4,  6.0 / 5, -1.0 / 6};
  for (int j = 0; j < n; ++j) {
    if (j >= 3 && j < n - 3) {
      d[j] = (45.0 * (f.v[j + 1] - f.v[j - 1]) - 9.0 * (f.v[j + 2] - f.v[j - 2]) +
              (f.v[j + 3] - f.v[j - 3])) /
             (60.0 * h);
    } else if (j < 3) {
      Complex acc = 0.0;
      for (int s = 0; s < 7; ++s) acc += fwd[s] * f.v[j + s];
      d[j] = acc / h;
    } else {
      Complex acc = 0.0;
      for (int s = 0; s < 7; ++s) acc += fwd[s] * f.v[j - s];
      d[j] = -acc / h;
    }
  }
  return d;
}

}  // namespace

EnergyReport energy_e0(const ComplexField& A, const ComplexField& theta,
                       const ComplexField& dt_theta) {
  if (A.v.real().minCoeff() < 0.1)
    throw DivisionGuard("energy_e0: A below 0.1");
  const double h = theta.grid.spacing();
  EnergyReport rep;
  rep.kinetic = (dt_theta.v.abs2() / A.v.real()).sum() * h;
  ArrayXcd dbar = fd6(theta).conjugate();
  rep.holo = std::real((kI * (theta.v * dbar)).sum() * h);
  rep.total = rep.kinetic + rep.holo;
  return rep;
}

OrderStudyReport fit_slope(const std::vector<double>& epsilons,
                           const std::vector<double>& norms, double target) {
  if (epsilons.size() < 3 || epsilons.size() != norms.size())
    throw std::invalid_argument("fit_slope needs >= 3 (epsilon, norm) pairs");
  for (size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("fit_slope needs strictly decreasing epsilons");

  OrderStudyReport rep;
  rep.epsilons = epsilons;
  rep.norms = norms;
  rep.target = target;

  for (double n : norms) {
    if (n < 0.0) throw std::invalid_argument("fit_slope needs nonnegative norms");
    if (n == 0.0) {  // exact cancellation
      rep.degenerate = true;
      rep.fitted_slope = std::numeric_limits<double>::infinity();
      rep.r_squared = 1.0;
      rep.pass = true;
      return rep;
    }
  }

  const int n = static_cast<int>(epsilons.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(epsilons[i]);
    const double y = std::log(norms[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - rep.fitted_slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (int i = 0; i < n; ++i) {
    const double y = std::log(norms[i]);
    const double yhat = intercept + rep.fitted_slope * std::log(epsilons[i]);
    ss_res += (y - yhat) * (y - yhat);
    ss_tot += (y - sy / n) * (y - sy / n);
  }
  rep.r_squared = ss_tot > 1e-30 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  rep.pass = rep.fitted_slope >= target - 0.2;
  return rep;
}

}  // namespace peregrine::verify
