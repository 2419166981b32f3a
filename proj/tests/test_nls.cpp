#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "peregrine/nls.hpp"

using namespace peregrine;
using namespace peregrine::nls;

namespace {
const Grid kUnitGrid = Grid::line(4096, 32.0 * kPi);

double exact_error(const NlsState& state, double t) {
  double worst = 0.0;
  for (int j = 0; j < state.B1.grid.n; ++j) {
    const Complex exact = breather_value(state.params, state.B1.grid.node(j), t);
    worst = std::max(worst, std::abs(state.background() + state.B1.v[j] - exact));
  }
  return worst;
}
}  // namespace

TEST_CASE("breather peak, far field and symmetries") {
  NlsParams p = NlsParams::standard();
  CHECK(std::abs(breather_value(p, 0.0, 0.0) - Complex(-3.0, 0.0)) < 1e-14);
  CHECK(std::abs(std::abs(breather_value(p, 0.0, 0.0)) - 3.0) < 1e-10);

  for (double t : {0.0, 0.7, -1.3})
    for (double x : {300.0, -450.0})
      CHECK(std::abs(std::abs(breather_value(p, x, t)) - 1.0) < 1e-4);

  for (double x : {0.3, 1.7, 5.0})
    for (double t : {0.2, 1.1}) {
      CHECK(std::abs(std::abs(breather_value(p, x, t)) -
                     std::abs(breather_value(p, x, -t))) < 1e-12);
      CHECK(breather_value(p, x, t) == breather_value(p, -x, t));
    }
}

TEST_CASE("breather equation residual oracle pins the coefficients") {
  // The printed formula's pattern (phase rate 1, 2it, 4t^2) fails the
  // equation i B_t + B_xx = -2|B|^2 B; the resolved one passes to roundoff.
  CHECK_NOTHROW(BreatherSpec(NlsParams::standard()));
  CHECK_NOTHROW(BreatherSpec(NlsParams::scaled(1.0)));
  CHECK_NOTHROW(BreatherSpec(NlsParams::scaled(2.5)));
  const Grid probe = Grid::line(1024, 64.0);
  CHECK(breather_equation_residual(NlsParams::standard(), probe, 0.0) < 1e-12);
  CHECK(breather_equation_residual(NlsParams::scaled(4.0), probe, 0.4) < 1e-12);

  // Counter-oracle: the printed far-field phase e^{it} leaves an O(1)
  // residual in the printed equation (rate must be 2).
  const Complex bad = std::exp(kI * 1.0);
  const Complex res = kI * (kI * bad) + 2.0 * bad * std::norm(bad);
  CHECK(std::abs(res) > 0.9);
}

TEST_CASE("background rate comes from plane-wave balance") {
  CHECK(NlsParams::standard().background_rate(1.0) == doctest::Approx(2.0));
  const double k = 2.0;
  const double rho0 = 2.0 * std::pow(k, -1.25);
  CHECK(NlsParams::scaled(k).background_rate(rho0) ==
        doctest::Approx(std::pow(k, 2.5) * rho0 * rho0 / 2.0));
}

TEST_CASE("nls_residual on balanced backgrounds and the zero field") {
  NlsState bg = background_state(NlsParams::standard(), kUnitGrid, 1.0);
  CHECK(nls_residual(bg, 1e-3) < 1e-10);

  NlsState zero = background_state(NlsParams::scaled(1.0), kUnitGrid, 0.0);
  CHECK(nls_residual(zero, 1e-3) == 0.0);

  NlsState bg_scaled = background_state(NlsParams::scaled(2.0), kUnitGrid, 0.7);
  CHECK(nls_residual(bg_scaled, 1e-3) < 1e-10);
}

TEST_CASE("nls_residual of the sampled breather is differencing-limited") {
  Grid g = Grid::line(8192, 128.0 * kPi);
  NlsState state = breather_state(NlsParams::standard(), g, 0.3);
  CHECK(nls_residual(state, 1e-4) < 1e-6);
}

TEST_CASE("evolve keeps the background subspace invariant") {
  NlsState bg = background_state(NlsParams::standard(), kUnitGrid, 1.0);
  NlsState out = evolve(bg, 0.5, 50);
  CHECK(out.B1.sup_norm() < 1e-12);
  CHECK(out.T == doctest::Approx(0.5));
}

TEST_CASE("evolve tracks the exact breather") {
  Grid g = Grid::line(16384, 256.0 * kPi);
  NlsState state = breather_state(NlsParams::standard(), g, -1.0);
  NlsState out = evolve(state, 1.0, 500);
  CHECK(exact_error(out, 0.0) < 2e-5);  // truncation-floor limited
}

TEST_CASE("evolve superconverges until the truncation floor") {
  // Step counts chosen so the splitting error dominates the domain
  // truncation floor (~1e-5 on this grid) on both runs.
  Grid g = Grid::line(8192, 128.0 * kPi);
  NlsState state = breather_state(NlsParams::standard(), g, -1.0);
  const double e_coarse = exact_error(evolve(state, 1.0, 100), 0.0);
  const double e_fine = exact_error(evolve(state, 1.0, 200), 0.0);
  CHECK(e_fine > 5e-5);
  CHECK(e_coarse / e_fine > 8.0);  // order >= 3 observed
}

TEST_CASE("evolve error accumulates at most linearly over [-2, 0]") {
  // The local error rate is strongly time dependent (it peaks toward the
  // focusing time), so "linear growth at fixed step size" means additive
  // accumulation: the full-window error does not exceed the sum of per-leg
  // errors measured from exact restarts.
  Grid g = Grid::line(8192, 128.0 * kPi);
  NlsState state = breather_state(NlsParams::standard(), g, -2.0, 1e-3);
  NlsState mid = evolve(state, 1.0, 250);
  NlsState full = evolve(mid, 1.0, 250);
  const double e_leg1 = exact_error(mid, -1.0);
  const double e_leg2 =
      exact_error(evolve(breather_state(NlsParams::standard(), g, -1.0, 1e-3),
                         1.0, 250),
                  0.0);
  const double e_total = exact_error(full, 0.0);
  CHECK(e_total < 1.25 * (e_leg1 + e_leg2) + 1e-8);
}

TEST_CASE("far-field pinning survives evolution") {
  Grid g = Grid::line(8192, 128.0 * kPi);
  NlsState state = breather_state(NlsParams::standard(), g, -0.5);
  NlsState out = evolve(state, 0.5, 200);
  CHECK(passes_edge_decay(out.B1, out.decay_tol));
}

TEST_CASE("long-horizon runs are rejected without the override") {
  NlsState bg = background_state(NlsParams::standard(), kUnitGrid, 1.0);
  CHECK_THROWS_AS(evolve(bg, 3.0, 10), std::invalid_argument);
  CHECK_NOTHROW(evolve(bg, 3.0, 10, /*allow_long_horizon=*/true));
}

TEST_CASE("blowup guard trips on oversized data") {
  Grid g = Grid::line(256, 16.0);
  ArrayXcd big(g.n);
  ArrayXd x = g.nodes();
  for (int j = 0; j < g.n; ++j)
    big[j] = Complex(2e6, 0.0) * std::exp(-x[j] * x[j]);
  NlsState state(NlsParams::standard(), 0.0, 0.0, ComplexField(g, big), 1.0);
  CHECK_THROWS_AS(evolve(state, 1.0, 2, true), StepBlowup);
}

TEST_CASE("packet-frame scaling: factors, residual, and round trip") {
  const double k = 1.0;
  Grid g = kUnitGrid;
  NlsState std_state = breather_state(NlsParams::standard(), g, 0.2);
  NlsState scaled = scale_to_packet_frame(std_state, k);
  // Amplitude factor 2 and dilation sqrt(8) at k = 1.
  CHECK(scaled.rho0 == doctest::Approx(2.0 * std_state.rho0));
  CHECK(scaled.B1.grid.half_width() ==
        doctest::Approx(g.half_width() / std::sqrt(8.0)));
  CHECK(std::abs(scaled.B1.v[100] - 2.0 * std_state.B1.v[100]) < 1e-14);

  // The mapped family satisfies the scaled equation (analytic oracle) and
  // the mapped state has a small numerical residual.
  CHECK(breather_equation_residual(NlsParams::scaled(k), Grid::line(512, 30.0), 0.2) < 1e-12);
  // dT chosen from the measured O(dT^2) differencing error of the oracle.
  Grid big = Grid::line(8192, 128.0 * kPi);
  NlsState fine = breather_state(NlsParams::standard(), big, 0.2);
  CHECK(nls_residual(scale_to_packet_frame(fine, k), 3e-5) < 1e-6);

  NlsState zero = background_state(NlsParams::standard(), g, 0.0);
  CHECK(scale_to_packet_frame(zero, 2.0).total().sup_norm() == 0.0);

  NlsState back = packet_frame_to_standard(scaled);
  CHECK(back.rho0 == doctest::Approx(std_state.rho0).epsilon(1e-12));
  CHECK((back.B1.v - std_state.B1.v).abs().maxCoeff() < 1e-12);
  CHECK(back.B1.grid.half_width() == doctest::Approx(g.half_width()).epsilon(1e-12));
}

TEST_CASE("scaling rejects mismatched normalizations") {
  NlsState scaled = background_state(NlsParams::scaled(2.0), kUnitGrid, 1.0);
  CHECK_THROWS_AS(scale_to_packet_frame(scaled, 2.0), NormalizationMismatch);
  NlsState std_state = background_state(NlsParams::standard(), kUnitGrid, 1.0);
  CHECK_THROWS_AS(packet_frame_to_standard(std_state), NormalizationMismatch);
}
