#include "peregrine/nls.hpp"

#include <cmath>

namespace peregrine::nls {
namespace {

// Peregrine family in the standard normalization i B_t + B_xx = -2|B|^2 B:
//
//   B(x,t) = e^{2it} (1 - 4(1+4it) / (1 + 4x^2 + 16t^2)).
//
// The literature states the formula for i q_t + q_xx/2 + |q|^2 q = 0 as
// e^{it}(1 - 4(1+2it)/(1+4x^2+4t^2)); rescaling t -> 2t gives the pattern
// above (phase rate 2, 4it, 16t^2). breather_equation_residual pins it.
struct Rational {
  Complex N;   // 1 + 4it
  double D;    // 1 + 4x^2 + 16t^2
  Complex ph;  // e^{2it}
};

Rational parts(double x, double t) {
  return {Complex{1.0, 4.0 * t}, 1.0 + 4.0 * x * x + 16.0 * t * t,
          std::exp(kI * (2.0 * t))};
}

Complex standard_value(double x, double t) {
  auto [N, D, ph] = parts(x, t);
  return ph * (1.0 - 4.0 * N / D);
}

Complex standard_dt(double x, double t) {
  auto [N, D, ph] = parts(x, t);
  const Complex Nt{0.0, 4.0};
  const double Dt = 32.0 * t;
  return 2.0 * kI * standard_value(x, t) - 4.0 * ph * (Nt * D - N * Dt) / (D * D);
}

Complex standard_dxx(double x, double t) {
  auto [N, D, ph] = parts(x, t);
  // B_x = 32 x N e^{2it} / D^2
  return 32.0 * N * ph * (D - 16.0 * x * x) / (D * D * D);
}

double scale_lambda(double k) { return 2.0 * std::pow(k, -1.25); }
double scale_dilation(double k) { return std::sqrt(8.0 * std::pow(k, 1.5)); }

}  // namespace

Complex breather_value(const NlsParams& params, double x, double t) {
  if (params.form == NlsParams::Form::Standard) return standard_value(x, t);
  return scale_lambda(params.k) * standard_value(scale_dilation(params.k) * x, t);
}

Complex breather_dt(const NlsParams& params, double x, double t) {
  if (params.form == NlsParams::Form::Standard) return standard_dt(x, t);
  return scale_lambda(params.k) * standard_dt(scale_dilation(params.k) * x, t);
}

Complex breather_dxx(const NlsParams& params, double x, double t) {
  if (params.form == NlsParams::Form::Standard) return standard_dxx(x, t);
  const double a = scale_dilation(params.k);
  return scale_lambda(params.k) * a * a * standard_dxx(a * x, t);
}

double breather_equation_residual(const NlsParams& params, const Grid& grid,
                                  double t) {
  double worst = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.node(j);
    const Complex B = breather_value(params, x, t);
    const Complex r = kI * params.a_t() * breather_dt(params, x, t) +
                      params.a_x() * breather_dxx(params, x, t) +
                      params.a_n() * B * std::norm(B);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

NlsState breather_state(const NlsParams& params, const Grid& grid, double t,
                        double decay_tol) {
  const double rho0 =
      params.form == NlsParams::Form::Standard ? 1.0 : scale_lambda(params.k);
  const double mu = params.background_rate(rho0);
  const Complex bg = rho0 * std::exp(kI * (mu * t));
  ArrayXcd pert(grid.n);
  for (int j = 0; j < grid.n; ++j)
    pert[j] = breather_value(params, grid.node(j), t) - bg;
  return NlsState(params, t, rho0, ComplexField(grid, std::move(pert)), decay_tol);
}

NlsState background_state(const NlsParams& params, const Grid& grid, double rho0) {
  return NlsState(params, 0.0, rho0, ComplexField::zero(grid));
}

BreatherSpec::BreatherSpec(NlsParams p) : params(p) {
  const Grid probe = Grid::line(1024, 64.0);
  for (double t : {0.0, 0.3, -1.0}) {
    if (breather_equation_residual(params, probe, t) > 1e-8)
      throw std::logic_error("breather coefficient pattern fails the residual oracle");
  }
  // Amplification factor three over the background at the peak.
  const double rho0 =
      params.form == NlsParams::Form::Standard ? 1.0 : scale_lambda(params.k);
  if (std::abs(std::abs(breather_value(params, 0.0, 0.0)) - 3.0 * rho0) > 1e-10)
    throw std::logic_error("breather peak is not three times the background");
}

double nls_residual(const NlsState& state, double dT) {
  if (!(dT > 0.0 && dT <= 1e-2))
    throw std::invalid_argument("nls_residual needs dT in (0, 1e-2]");
  const NlsState fwd = evolve(state, dT, 1, true);
  const NlsState bwd = evolve(state, -dT, 1, true);

  const Complex bg = state.background();
  const Complex bg_T = kI * state.mu() * bg;
  ArrayXcd B1_T = (fwd.B1.v - bwd.B1.v) / (2.0 * dT);
  ArrayXcd B1_XX = spectral_derivative(state.B1, 2).v;

  const double at = state.params.a_t(), ax = state.params.a_x(), an = state.params.a_n();
  double worst = 0.0;
  for (int j = 0; j < state.B1.grid.n; ++j) {
    const Complex B = bg + state.B1.v[j];
    const Complex r =
        kI * at * (bg_T + B1_T[j]) + ax * B1_XX[j] + an * B * std::norm(B);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

namespace {

// Pointwise nonlinear flow over duration s, exact for the cubic rotation:
// the full field rotates by exp(i c |B|^2 s); the background picks up
// exactly e^{i mu s}, and the perturbation update below never forms the
// difference of two O(1) quantities.
void nonlinear_substep(ArrayXcd& B1, Complex& bg, double c, double mu, double s) {
  const Complex bg_rot = std::exp(kI * (mu * s));
  for (Eigen::Index j = 0; j < B1.size(); ++j) {
    const Complex b1 = B1[j];
    const double w = 2.0 * (std::conj(bg) * b1).real() + std::norm(b1);
    const double theta = c * w * s;
    const Complex expm1{-2.0 * std::pow(std::sin(0.5 * theta), 2), std::sin(theta)};
    B1[j] = bg_rot * (bg * expm1 + b1 * (expm1 + 1.0));
  }
  bg *= bg_rot;
}

void linear_substep(ArrayXcd& B1, const Grid& grid, double nu, double s) {
  ComplexField f(grid, B1);
  Spectrum sp = dft(f);
  for (int i = 0; i < grid.n; ++i) {
    const double xi = grid.frequency(i);
    sp.coef[i] *= std::exp(kI * (-nu * xi * xi * s));
  }
  B1 = idft(sp).v;
}

}  // namespace

NlsState evolve(const NlsState& state, double dT_total, int n_steps,
                bool allow_long_horizon) {
  if (n_steps < 1) throw std::invalid_argument("evolve needs n_steps >= 1");
  if (!allow_long_horizon && std::abs(state.T + dT_total) > 2.0)
    throw std::invalid_argument(
        "evolution beyond |T| = 2 is outside the local well-posedness window; "
        "pass the long-horizon override to proceed");

  const double c = state.params.a_n() / state.params.a_t();   // rotation rate
  const double nu = state.params.a_x() / state.params.a_t();  // dispersion rate
  const double mu = state.mu();
  const double tau = dT_total / n_steps;

  // Triple-jump composition of Strang steps: fourth order.
  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2);
  const double w0 = -cbrt2 / (2.0 - cbrt2);

  ArrayXcd B1 = state.B1.v;
  Complex bg = state.background();
  const Grid& grid = state.B1.grid;

  for (int step = 0; step < n_steps; ++step) {
    for (double w : {w1, w0, w1}) {
      const double s = w * tau;
      nonlinear_substep(B1, bg, c, mu, 0.5 * s);
      linear_substep(B1, grid, nu, s);
      nonlinear_substep(B1, bg, c, mu, 0.5 * s);
    }
    if (B1.abs().maxCoeff() > 1e6)
      throw StepBlowup("evolve: perturbation exceeded the trust region");
  }
  return NlsState(state.params, state.T + dT_total, state.rho0,
                  ComplexField(grid, std::move(B1)), state.decay_tol);
}

NlsState scale_to_packet_frame(const NlsState& standard_state, double k) {
  if (standard_state.params.form != NlsParams::Form::Standard)
    throw NormalizationMismatch("scale_to_packet_frame expects a standard-form state");
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  const double lambda = scale_lambda(k);
  const double a = scale_dilation(k);
  const Grid& g = standard_state.B1.grid;
  // x = a X: the grid dilates by 1/a, samples are reused pointwise.
  Grid scaled_grid = Grid::line(g.n, g.half_width() / a);
  return NlsState(NlsParams::scaled(k), standard_state.T,
                  lambda * standard_state.rho0,
                  ComplexField(scaled_grid, lambda * standard_state.B1.v),
                  standard_state.decay_tol);
}

NlsState packet_frame_to_standard(const NlsState& scaled_state) {
  if (scaled_state.params.form != NlsParams::Form::Scaled)
    throw NormalizationMismatch("packet_frame_to_standard expects a scaled-form state");
  const double k = scaled_state.params.k;
  const double lambda = scale_lambda(k);
  const double a = scale_dilation(k);
  const Grid& g = scaled_state.B1.grid;
  Grid std_grid = Grid::line(g.n, g.half_width() * a);
  return NlsState(NlsParams::standard(), scaled_state.T,
                  scaled_state.rho0 / lambda,
                  ComplexField(std_grid, scaled_state.B1.v / lambda),
                  scaled_state.decay_tol);
}

}  // namespace peregrine::nls
