#include "peregrine/curve_ops.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "peregrine/parallel.hpp"

namespace peregrine::curves {
namespace {

// cot(z) and 1/sin^2(z) through w = e^{2iz}; the kernels below build w from
// per-target and per-source factors, keeping the inner loops free of exp.
Complex cot_from_w(Complex w) { return kI * (w + 1.0) / (w - 1.0); }
Complex inv_sin2_from_w(Complex w) {
  const Complex d = w - 1.0;
  return -4.0 * w / (d * d);
}

ArrayXcd phase_factors(const ArrayXcd& omega, double period, double sign) {
  ArrayXcd out(omega.size());
  for (Eigen::Index i = 0; i < omega.size(); ++i)
    out[i] = std::exp(kI * (sign * 2.0 * kPi / period) * omega[i]);
  return out;
}

ChordArc measure_chord_arc(const ArrayXd& x, const ArrayXcd& z, double shift_period,
                           int n_shifts) {
  std::vector<double> lows(x.size(), std::numeric_limits<double>::infinity());
  std::vector<double> highs(x.size(), 0.0);
  parallel_for(0, x.size(), [&](long i) {
    double l = std::numeric_limits<double>::infinity(), h = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      for (int s = -n_shifts; s <= n_shifts; ++s) {
        const double dx = x[i] - x[j] - s * shift_period;
        if (dx == 0.0) continue;
        const double r =
            std::abs(z[i] - z[j] - Complex(s * shift_period, 0.0)) / std::abs(dx);
        l = std::min(l, r);
        h = std::max(h, r);
      }
    }
    lows[i] = l;
    highs[i] = h;
  });
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    lo = std::min(lo, lows[i]);
    hi = std::max(hi, highs[i]);
  }
  return ChordArc{lo, hi};
}

}  // namespace

const ChordArc& PeriodicCurve::chord_arc() const {
  if (!chord_arc_cache)
    chord_arc_cache = measure_chord_arc(grid.nodes(), omega.v, grid.period(), 1);
  return *chord_arc_cache;
}

const ChordArc& LineCurve::chord_arc() const {
  if (!chord_arc_cache)
    chord_arc_cache = measure_chord_arc(grid.nodes(), zeta.v, 0.0, 0);
  return *chord_arc_cache;
}

// Numerical floor 0.1: a sampled fold shows up as a near-zero pair ratio,
// while every perturbative-regime curve here stays above ~0.7.
void require_chord_arc(const PeriodicCurve& c) {
  if (c.chord_arc().lower <= 0.1)
    throw ChordArcViolation("periodic curve is (numerically) self-intersecting");
}

void require_chord_arc(const LineCurve& c) {
  if (c.chord_arc().lower <= 0.1)
    throw ChordArcViolation("line curve is (numerically) self-intersecting");
}

PeriodicCurve make_periodic_curve(const Grid& grid, ArrayXcd omega_samples) {
  if (grid.kind != GridKind::Periodic)
    throw std::invalid_argument("periodic curve needs a periodic grid");
  ComplexField omega(grid, std::move(omega_samples));
  ComplexField wiggle(grid, omega.v - grid.nodes().cast<Complex>());
  ComplexField omega_alpha(grid, spectral_derivative(wiggle).v + 1.0);
  return PeriodicCurve{grid, std::move(omega), std::move(omega_alpha), {}};
}

PeriodicCurve flat_periodic_curve(const Grid& grid) {
  return make_periodic_curve(grid, grid.nodes().cast<Complex>());
}

ArrayXcd evaluate_periodic(const ComplexField& f, const ArrayXd& points) {
  Spectrum s = dft(f);
  const int n = f.grid.n;
  // natural (ascending) frequency order for the phase recurrence
  ArrayXcd coef(n);
  for (int i = 0; i < n; ++i) coef[i] = s.coef[(i + n / 2) % n];
  const double dxi = 2.0 * kPi / f.grid.length;
  const double xi0 = -0.5 * n * dxi;

  ArrayXcd out(points.size());
  parallel_for(0, points.size(), [&](long j) {
    const double x = points[j];
    const Complex step = std::exp(kI * (dxi * x));
    Complex ph = std::exp(kI * (xi0 * x));
    Complex acc = 0.0;
    for (int m = 0; m < n; ++m) {
      if (m % 512 == 0) ph = std::exp(kI * ((xi0 + m * dxi) * x));
      acc += coef[m] * ph;
      ph *= step;
    }
    out[j] = acc;
  }, 512);
  return out;
}

SplitField make_split(const ComplexField& periodic_part, const Grid& line) {
  return make_split(periodic_part, ComplexField::zero(line));
}

SplitField make_split(const ComplexField& periodic_part, ComplexField decaying_part) {
  const Grid line = decaying_part.grid;
  ComplexField on_line(line, evaluate_periodic(periodic_part, line.nodes()));
  return SplitField{periodic_part, std::move(decaying_part), std::move(on_line)};
}

SplitField decaying_split(const Grid& periodic_grid, ComplexField decaying_part) {
  const Grid line = decaying_part.grid;
  return SplitField{ComplexField::zero(periodic_grid), std::move(decaying_part),
                    ComplexField::zero(line)};
}

SplitField split_by_averaging(const ComplexField& f, double period, double decay_tol) {
  XsSplit parts = xs_split(f, period, decay_tol);
  return make_split(parts.periodic, parts.decaying);
}

SplitField operator+(const SplitField& a, const SplitField& b) {
  return SplitField{ComplexField(a.periodic.grid, a.periodic.v + b.periodic.v),
                    ComplexField(a.decaying.grid, a.decaying.v + b.decaying.v),
                    ComplexField(a.periodic_on_line.grid,
                                 a.periodic_on_line.v + b.periodic_on_line.v)};
}

SplitField operator-(const SplitField& a, const SplitField& b) {
  return SplitField{ComplexField(a.periodic.grid, a.periodic.v - b.periodic.v),
                    ComplexField(a.decaying.grid, a.decaying.v - b.decaying.v),
                    ComplexField(a.periodic_on_line.grid,
                                 a.periodic_on_line.v - b.periodic_on_line.v)};
}

SplitField operator*(const SplitField& a, const SplitField& b) {
  ArrayXcd p = a.periodic.v * b.periodic.v;
  ArrayXcd pol = a.periodic_on_line.v * b.periodic_on_line.v;
  ArrayXcd total = (a.periodic_on_line.v + a.decaying.v) *
                   (b.periodic_on_line.v + b.decaying.v);
  return SplitField{ComplexField(a.periodic.grid, std::move(p)),
                    ComplexField(a.decaying.grid, total - pol),
                    ComplexField(a.periodic_on_line.grid, std::move(pol))};
}

SplitField operator*(Complex c, const SplitField& a) {
  return SplitField{ComplexField(a.periodic.grid, c * a.periodic.v),
                    ComplexField(a.decaying.grid, c * a.decaying.v),
                    ComplexField(a.periodic_on_line.grid, c * a.periodic_on_line.v)};
}

SplitField operator+(const SplitField& a, Complex c) {
  return SplitField{ComplexField(a.periodic.grid, a.periodic.v + c), a.decaying,
                    ComplexField(a.periodic_on_line.grid, a.periodic_on_line.v + c)};
}

SplitField operator-(const SplitField& a, Complex c) { return a + (-c); }

SplitField conj(const SplitField& a) {
  return SplitField{ComplexField(a.periodic.grid, a.periodic.v.conjugate()),
                    ComplexField(a.decaying.grid, a.decaying.v.conjugate()),
                    ComplexField(a.periodic_on_line.grid,
                                 a.periodic_on_line.v.conjugate())};
}

SplitField real_part(const SplitField& a) {
  auto re = [](const ComplexField& f) {
    return ComplexField(f.grid, f.v.real().cast<Complex>());
  };
  return SplitField{re(a.periodic), re(a.decaying), re(a.periodic_on_line)};
}

SplitField derivative(const SplitField& a, int order) {
  ComplexField dp = spectral_derivative(a.periodic, order);
  ComplexField dp_line(a.decaying.grid,
                       evaluate_periodic(dp, a.decaying.grid.nodes()));
  return SplitField{std::move(dp), spectral_derivative(a.decaying, order),
                    std::move(dp_line)};
}

SplitField reciprocal(const SplitField& a, double floor) {
  ArrayXcd tot = a.periodic_on_line.v + a.decaying.v;
  if (a.periodic.v.abs().minCoeff() < floor || tot.abs().minCoeff() < floor)
    throw DivisionGuard("reciprocal: field magnitude below the safety floor");
  ArrayXcd p = a.periodic.v.inverse();
  ArrayXcd pol = a.periodic_on_line.v.inverse();
  return SplitField{ComplexField(a.periodic.grid, std::move(p)),
                    ComplexField(a.decaying.grid, tot.inverse() - pol),
                    ComplexField(a.periodic_on_line.grid, std::move(pol))};
}

LineCurve make_line_curve(const Grid& line, const PeriodicCurve& backbone,
                          const ComplexField& correction,
                          std::optional<ComplexField> zeta_alpha, double decay_tol) {
  if (line.kind != GridKind::Line)
    throw std::invalid_argument("line curve needs a line grid");
  require_edge_decay(correction, decay_tol, "curve correction");

  ArrayXd x = line.nodes();
  ComplexField wiggle(backbone.grid,
                      backbone.omega.v - backbone.grid.nodes().cast<Complex>());
  ComplexField omega_line(line, evaluate_periodic(wiggle, x) + x.cast<Complex>());
  ComplexField slope(backbone.grid, backbone.omega_alpha.v - 1.0);
  ComplexField omega_alpha_line(line, evaluate_periodic(slope, x) + 1.0);

  ComplexField zeta(line, omega_line.v + correction.v);
  ComplexField za = zeta_alpha ? std::move(*zeta_alpha)
                               : ComplexField(line, omega_alpha_line.v +
                                                        spectral_derivative(correction).v);
  return LineCurve{line,
                   std::move(zeta),
                   std::move(za),
                   backbone,
                   std::move(omega_line),
                   std::move(omega_alpha_line),
                   {}};
}

LineCurve flat_line_curve(const Grid& line, double backbone_period,
                          int backbone_points) {
  PeriodicCurve flat =
      flat_periodic_curve(Grid::periodic(backbone_points, backbone_period));
  return make_line_curve(line, flat, ComplexField::zero(line));
}

// ---------------------------------------------------------------------------
// Quadratures. Sources live on the half-shifted grid (alternating-grid rule),
// so kernels are evaluated strictly off the diagonal.
// ---------------------------------------------------------------------------

namespace {

struct ShiftedPeriodic {
  ArrayXd beta;
  ArrayXcd omega, omega_alpha, f;
};

ShiftedPeriodic shift_periodic(const PeriodicCurve& c, const ComplexField& f) {
  const double half = 0.5 * c.grid.spacing();
  ArrayXd beta = c.grid.nodes() + half;
  ComplexField wiggle(c.grid, c.omega.v - c.grid.nodes().cast<Complex>());
  ArrayXcd omega = translate(wiggle, half).v + beta.cast<Complex>();
  ComplexField slope(c.grid, c.omega_alpha.v - 1.0);
  ArrayXcd omega_alpha = translate(slope, half).v + 1.0;
  ArrayXcd fsh = translate(f, half).v;
  return ShiftedPeriodic{std::move(beta), std::move(omega), std::move(omega_alpha),
                         std::move(fsh)};
}

struct ShiftedLine {
  ArrayXd beta;
  ArrayXcd omega, omega_alpha;  // backbone at sources
  ArrayXcd zeta, zeta_alpha;    // full curve at sources
  ArrayXcd f0, f_total;         // transform argument at sources
};

ShiftedLine shift_line(const LineCurve& c, const SplitField& f) {
  const double half = 0.5 * c.grid.spacing();
  ShiftedLine s;
  s.beta = c.grid.nodes() + half;

  ComplexField wiggle(c.backbone.grid,
                      c.backbone.omega.v - c.backbone.grid.nodes().cast<Complex>());
  s.omega = evaluate_periodic(wiggle, s.beta) + s.beta.cast<Complex>();
  ComplexField slope(c.backbone.grid, c.backbone.omega_alpha.v - 1.0);
  s.omega_alpha = evaluate_periodic(slope, s.beta) + 1.0;

  ArrayXcd corr = translate(c.correction(), half).v;
  ArrayXcd corr_alpha =
      translate(ComplexField(c.grid, c.zeta_alpha.v - c.omega_alpha_on_line.v), half).v;
  s.zeta = s.omega + corr;
  s.zeta_alpha = s.omega_alpha + corr_alpha;

  s.f0 = evaluate_periodic(f.periodic, s.beta);
  s.f_total = s.f0 + translate(f.decaying, half).v;
  return s;
}

void require_real(const ComplexField& f, const char* what) {
  const double scale = std::max(1.0, f.sup_norm());
  if (f.max_imag() > 1e-10 * scale)
    throw std::invalid_argument(std::string(what) + ": input must be real-valued");
}

}  // namespace

ComplexField hilbert(const PeriodicCurve& curve, const ComplexField& f) {
  require_chord_arc(curve);
  const int n = curve.grid.n;
  const double P = curve.grid.period();
  const double h = curve.grid.spacing();
  ShiftedPeriodic src = shift_periodic(curve, f);

  const ArrayXcd a = phase_factors(curve.omega.v, P, +1.0);
  const ArrayXcd b = phase_factors(src.omega, P, -1.0);
  ArrayXcd numer = src.omega_alpha * src.f;

  ArrayXcd out(n);
  const Complex scale = h / (kI * P);
  parallel_for(0, n, [&](long i) {
    Complex acc = 0.0;
    const Complex ai = a[i];
    for (int j = 0; j < n; ++j) acc += numer[j] * cot_from_w(ai * b[j]);
    out[i] = scale * acc;
  });
  return ComplexField(curve.grid, std::move(out));
}

SplitField hilbert(const LineCurve& curve, const SplitField& f) {
  require_chord_arc(curve);
  const int n = curve.grid.n;
  const double L2 = curve.grid.length;  // 2L

  // Truncated-line fields are effectively periodic with period 2L, so the
  // Cauchy kernel is used in image-summed form (pi/2L) cot(pi d / 2L). This
  // keeps the quadrature consistent with the spectral flat transform and
  // leaves no truncation tail. The backbone's transform of the periodic
  // part is the exact P-periodic cotangent transform, so the line sum
  // carries only the decaying difference of the two kernels.
  ComplexField per_out = hilbert(curve.backbone, f.periodic);

  ShiftedLine src = shift_line(curve, f);
  ArrayXcd cauchy_numer = src.zeta_alpha * src.f_total;
  ArrayXcd backbone_numer = src.omega_alpha * src.f0;

  const ArrayXcd at = phase_factors(curve.zeta.v, L2, +1.0);
  const ArrayXcd bs = phase_factors(src.zeta, L2, -1.0);
  const ArrayXcd atw = phase_factors(curve.omega_on_line.v, L2, +1.0);
  const ArrayXcd bsw = phase_factors(src.omega, L2, -1.0);

  ArrayXcd dec(n);
  const Complex scale = 1.0 / (kI * double(n));  // h * (pi/2L) / (pi i)
  parallel_for(0, n, [&](long i) {
    Complex acc = 0.0;
    const Complex ai = at[i];
    const Complex aiw = atw[i];
    for (int j = 0; j < n; ++j) {
      acc += cauchy_numer[j] * cot_from_w(ai * bs[j]) -
             backbone_numer[j] * cot_from_w(aiw * bsw[j]);
    }
    dec[i] = scale * acc;
  });

  ComplexField per_on_line(curve.grid,
                           evaluate_periodic(per_out, curve.grid.nodes()));
  return SplitField{std::move(per_out), ComplexField(curve.grid, std::move(dec)),
                    std::move(per_on_line)};
}

ComplexField hilbert(const LineCurve& curve, const ComplexField& f_decaying,
                     double decay_tol) {
  require_edge_decay(f_decaying, decay_tol, "hilbert argument");
  SplitField sf = decaying_split(curve.backbone.grid, f_decaying);
  return hilbert(curve, sf).decaying;
}

ComplexField hilbert_auto(const LineCurve& curve, const ComplexField& f,
                          double decay_tol) {
  if (passes_edge_decay(f, decay_tol)) return hilbert(curve, f, decay_tol);
  SplitField sf = split_by_averaging(f, curve.backbone.grid.period(), decay_tol);
  return hilbert(curve, sf).total();
}

ComplexField double_layer(const PeriodicCurve& curve, const ComplexField& f,
                          LayerVariant variant) {
  require_real(f, "double_layer");
  if (variant == LayerVariant::K) {
    ComplexField hf = hilbert(curve, f);
    return ComplexField(curve.grid, hf.v.real().cast<Complex>());
  }
  require_chord_arc(curve);
  const int n = curve.grid.n;
  const double P = curve.grid.period();
  const double h = curve.grid.spacing();
  ShiftedPeriodic src = shift_periodic(curve, f);
  const ArrayXcd a = phase_factors(curve.omega.v, P, +1.0);
  const ArrayXcd b = phase_factors(src.omega, P, -1.0);
  ArrayXcd numer = src.omega_alpha.abs() * src.f;
  ArrayXcd out(n);
  parallel_for(0, n, [&](long i) {
    Complex acc = 0.0;
    const Complex ai = a[i];
    for (int j = 0; j < n; ++j) acc += numer[j] * cot_from_w(ai * b[j]);
    const Complex unit = curve.omega_alpha.v[i] / std::abs(curve.omega_alpha.v[i]);
    out[i] = std::real(-h / (kI * P) * unit * acc);
  });
  return ComplexField(curve.grid, std::move(out));
}

SplitField double_layer(const LineCurve& curve, const SplitField& f) {
  require_real(f.total(), "double_layer");
  return real_part(hilbert(curve, f));
}

ComplexField double_layer_decaying(const LineCurve& curve, const ComplexField& f,
                                   LayerVariant variant) {
  require_real(f, "double_layer");
  if (variant == LayerVariant::K) {
    ComplexField hf = hilbert(curve, f);
    return ComplexField(curve.grid, hf.v.real().cast<Complex>());
  }
  require_chord_arc(curve);
  const int n = curve.grid.n;
  const double L2 = curve.grid.length;
  SplitField sf = decaying_split(curve.backbone.grid, f);
  ShiftedLine src = shift_line(curve, sf);
  ArrayXcd numer = src.zeta_alpha.abs() * src.f_total;
  const ArrayXcd at = phase_factors(curve.zeta.v, L2, +1.0);
  const ArrayXcd bs = phase_factors(src.zeta, L2, -1.0);
  ArrayXcd out(n);
  parallel_for(0, n, [&](long i) {
    Complex acc = 0.0;
    const Complex ai = at[i];
    for (int j = 0; j < n; ++j) acc += numer[j] * cot_from_w(ai * bs[j]);
    const Complex unit = curve.zeta_alpha.v[i] / std::abs(curve.zeta_alpha.v[i]);
    out[i] = std::real(-1.0 / (kI * double(n)) * unit * acc);
  });
  return ComplexField(curve.grid, std::move(out));
}

namespace {

template <typename FieldT, typename ApplyK, typename Norm, typename Axpy>
FieldT neumann_solve(const FieldT& g, ApplyK&& K, Norm&& norm, Axpy&& add,
                     double tol, const char* what) {
  const double gscale = std::max(1.0, norm(g));
  if (norm(g) == 0.0) return g;

  // Five power-iteration steps estimate ||K|| on the fly. Stop once the
  // iterate has contracted far below its start: past that it sinks into the
  // quadrature's absolute noise floor, where growth ratios turn meaningless.
  FieldT v = g;
  double est = 0.0;
  double vn = norm(v);
  const double vn_floor = 1e-4 * vn;
  for (int it = 0; it < 5 && vn > vn_floor; ++it) {
    FieldT Kv = K(v);
    const double kn = norm(Kv);
    est = std::max(est, kn / vn);
    v = std::move(Kv);
    vn = kn;
  }
  if (est >= 0.9)
    throw NoConvergence(std::string(what) +
                        ": operator norm estimate >= 0.9, Neumann series rejected");

  FieldT h = g;
  double prev = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < 300; ++it) {
    FieldT next = add(g, K(h), 1.0);  // g + K h
    const double inc = norm(add(next, h, -1.0));
    h = std::move(next);
    if (inc <= tol * gscale) return h;
    // The iterates can bottom out at the quadrature's own accuracy level
    // (notably on line curves whose fields carry algebraic far-field
    // tails); accept that floor, reject stalls above it.
    stalled = inc > 0.5 * prev ? stalled + 1 : 0;
    if (stalled >= 3) {
      if (inc <= 1e-5 * gscale) return h;
      throw NoConvergence(std::string(what) +
                          ": Neumann iteration stalled above tolerance");
    }
    prev = inc;
  }
  throw NoConvergence(std::string(what) + ": Neumann iteration exhausted its budget");
}

}  // namespace

ComplexField resolvent_solve(const PeriodicCurve& curve, const ComplexField& g,
                             LayerVariant variant, double tol) {
  require_real(g, "resolvent_solve");
  auto K = [&](const ComplexField& u) { return double_layer(curve, u, variant); };
  auto norm = [](const ComplexField& u) { return u.sup_norm(); };
  auto add = [](const ComplexField& x, const ComplexField& y, double s) {
    return ComplexField(x.grid, x.v + s * y.v);
  };
  return neumann_solve(g, K, norm, add, tol, "resolvent_solve(periodic)");
}

SplitField resolvent_solve(const LineCurve& curve, const SplitField& g, double tol) {
  auto K = [&](const SplitField& u) { return double_layer(curve, u); };
  auto norm = [](const SplitField& u) { return u.total().sup_norm(); };
  auto add = [](const SplitField& x, const SplitField& y, double s) {
    return x + Complex(s, 0.0) * y;
  };
  return neumann_solve(g, K, norm, add, tol, "resolvent_solve(line)");
}

double holomorphicity_residual(const PeriodicCurve& curve, const ComplexField& f,
                               Side side) {
  ComplexField hf = hilbert(curve, f);
  const double sign = side == Side::Below ? -1.0 : 1.0;
  return (f.v + sign * hf.v).abs().maxCoeff();
}

double holomorphicity_residual(const LineCurve& curve, const SplitField& f,
                               Side side) {
  SplitField hf = hilbert(curve, f);
  const double sign = side == Side::Below ? -1.0 : 1.0;
  return (f.total().v + sign * hf.total().v).abs().maxCoeff();
}

double holomorphicity_residual(const LineCurve& curve, const ComplexField& f,
                               Side side, double decay_tol) {
  if (passes_edge_decay(f, decay_tol)) {
    ComplexField hf = hilbert(curve, f, decay_tol);
    const double sign = side == Side::Below ? -1.0 : 1.0;
    return (f.v + sign * hf.v).abs().maxCoeff();
  }
  SplitField sf = split_by_averaging(f, curve.backbone.grid.period(), decay_tol);
  return holomorphicity_residual(curve, sf, side);
}

ComplexField commutator(const PeriodicCurve& curve, const ComplexField& g,
                        const ComplexField& f) {
  ComplexField hf = hilbert(curve, f);
  ComplexField hgf = hilbert(curve, ComplexField(curve.grid, g.v * f.v));
  return ComplexField(curve.grid, g.v * hf.v - hgf.v);
}

SplitField commutator(const LineCurve& curve, const SplitField& g,
                      const SplitField& f) {
  SplitField hf = hilbert(curve, f);
  SplitField hgf = hilbert(curve, g * f);
  return g * hf - hgf;
}

ComplexField quadratic_kernel(const PeriodicCurve& curve, const ComplexField& u,
                              const ComplexField& dF) {
  require_chord_arc(curve);
  const int n = curve.grid.n;
  const double P = curve.grid.period();
  const double h = curve.grid.spacing();
  ShiftedPeriodic src = shift_periodic(curve, dF);
  ArrayXcd u_src = translate(u, 0.5 * h).v;

  const ArrayXcd a = phase_factors(curve.omega.v, P, +1.0);
  const ArrayXcd b = phase_factors(src.omega, P, -1.0);
  const double pref = (kPi / P) * (kPi / P);

  ArrayXcd out(n);
  const Complex scale = h / (kPi * kI);
  parallel_for(0, n, [&](long i) {
    Complex acc = 0.0;
    const Complex ai = a[i];
    const Complex ui = u.v[i];
    for (int j = 0; j < n; ++j) {
      const Complex du = ui - u_src[j];
      acc += du * du * pref * inv_sin2_from_w(ai * b[j]) * src.f[j];
    }
    out[i] = scale * acc;
  });
  return ComplexField(curve.grid, std::move(out));
}

SplitField quadratic_kernel(const LineCurve& curve, const SplitField& u,
                            const SplitField& dF) {
  require_chord_arc(curve);
  const int n = curve.grid.n;
  const double h = curve.grid.spacing();

  // Same structure as the split hilbert: the all-periodic block is the
  // image-summed squared-cosecant integral on the backbone; the line
  // quadrature carries only the decaying difference of plain kernels.
  ComplexField per_out = quadratic_kernel(curve.backbone, u.periodic, dF.periodic);

  ShiftedLine geom = shift_line(curve, dF);
  ArrayXcd u0_src = evaluate_periodic(u.periodic, geom.beta);
  ArrayXcd u_src = u0_src + translate(u.decaying, 0.5 * h).v;
  const ArrayXcd u_tgt = u.total().v;
  const ArrayXcd& u0_tgt = u.periodic_on_line.v;

  const double L2 = curve.grid.length;
  const ArrayXcd at = phase_factors(curve.zeta.v, L2, +1.0);
  const ArrayXcd bs = phase_factors(geom.zeta, L2, -1.0);
  const ArrayXcd atw = phase_factors(curve.omega_on_line.v, L2, +1.0);
  const ArrayXcd bsw = phase_factors(geom.omega, L2, -1.0);
  const double pref2 = (kPi / L2) * (kPi / L2);

  ArrayXcd dec(n);
  const Complex scale = h / (kPi * kI);
  parallel_for(0, n, [&](long i) {
    Complex acc = 0.0;
    const Complex ai = at[i];
    const Complex aiw = atw[i];
    for (int j = 0; j < n; ++j) {
      const Complex du = u_tgt[i] - u_src[j];
      const Complex du0 = u0_tgt[i] - u0_src[j];
      acc += du * du * pref2 * inv_sin2_from_w(ai * bs[j]) * geom.f_total[j] -
             du0 * du0 * pref2 * inv_sin2_from_w(aiw * bsw[j]) * geom.f0[j];
    }
    dec[i] = scale * acc;
  });

  ComplexField per_on_line(curve.grid,
                           evaluate_periodic(per_out, curve.grid.nodes()));
  return SplitField{std::move(per_out), ComplexField(curve.grid, std::move(dec)),
                    std::move(per_on_line)};
}

}  // namespace peregrine::curves
