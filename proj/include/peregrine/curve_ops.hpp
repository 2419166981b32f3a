#pragma once

#include "peregrine/curve.hpp"

namespace peregrine::curves {

enum class Side { Below, Above };
enum class LayerVariant { K, KStar };

// Cotangent-kernel Hilbert transform on a periodic curve, alternating-grid
// trapezoid rule (targets on the primary grid, sources half-shifted).
ComplexField hilbert(const PeriodicCurve& curve, const ComplexField& f);

// Cauchy-kernel Hilbert transform over a line curve. The periodic background
// of f is routed through the backbone's cotangent kernel; the remainder is a
// single fused quadrature of (full kernel - backbone image-sum kernel), whose
// integrand decays. Truncation tails are dropped; the dropped mass is
// O(|f0| |zeta-omega| / L) further damped by carrier oscillation.
SplitField hilbert(const LineCurve& curve, const SplitField& f);

// Decaying input only (no background routing needed).
ComplexField hilbert(const LineCurve& curve, const ComplexField& f_decaying,
                     double decay_tol = 1e-8);

// Auto-routing: decaying fields go direct, otherwise the field is split by
// phase-aligned averaging over the backbone period. Rejects fields that
// admit neither route.
ComplexField hilbert_auto(const LineCurve& curve, const ComplexField& f,
                          double decay_tol = 1e-8);

// Double-layer operators (real input, real output).
ComplexField double_layer(const PeriodicCurve& curve, const ComplexField& f,
                          LayerVariant variant = LayerVariant::K);
SplitField double_layer(const LineCurve& curve, const SplitField& f);
ComplexField double_layer_decaying(const LineCurve& curve, const ComplexField& f,
                                   LayerVariant variant = LayerVariant::K);

// Solve (I - K) h = g by Neumann iteration; ||K|| is estimated by five
// power-iteration steps and must be below 0.9.
ComplexField resolvent_solve(const PeriodicCurve& curve, const ComplexField& g,
                             LayerVariant variant = LayerVariant::K,
                             double tol = 1e-12);
SplitField resolvent_solve(const LineCurve& curve, const SplitField& g,
                           double tol = 1e-12);

// sup |(I -+ H) f|: zero iff f is the boundary value of a function
// holomorphic below (Side::Below) or above (Side::Above) the interface.
double holomorphicity_residual(const PeriodicCurve& curve, const ComplexField& f,
                               Side side);
double holomorphicity_residual(const LineCurve& curve, const SplitField& f,
                               Side side);
double holomorphicity_residual(const LineCurve& curve, const ComplexField& f,
                               Side side, double decay_tol = 1e-8);

// [g, H] f = g * H(f) - H(g f).
ComplexField commutator(const PeriodicCurve& curve, const ComplexField& g,
                        const ComplexField& f);
SplitField commutator(const LineCurve& curve, const SplitField& g,
                      const SplitField& f);

// (1/(pi i)) integral of ((u(a)-u(b)) / (zeta(a)-zeta(b)))^2 dF(b), with the
// all-periodic block summed to the squared-cosecant kernel on the backbone.
ComplexField quadratic_kernel(const PeriodicCurve& curve, const ComplexField& u,
                              const ComplexField& dF);
SplitField quadratic_kernel(const LineCurve& curve, const SplitField& u,
                            const SplitField& dF);

}  // namespace peregrine::curves
