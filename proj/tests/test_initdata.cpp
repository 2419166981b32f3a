#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "peregrine/initdata.hpp"

using namespace peregrine;
using namespace peregrine::initdata;
using namespace peregrine::packet;
using curves::SplitField;
using nls::NlsParams;
using nls::NlsState;

namespace {

NlsState gaussian_envelope(double amp = 0.5) {
  Grid eg = Grid::line(2048, 32.0 * kPi);
  ArrayXd X = eg.nodes();
  ArrayXcd pert(eg.n);
  for (int j = 0; j < eg.n; ++j) pert[j] = amp * std::exp(-X[j] * X[j]);
  return NlsState(NlsParams::scaled(1.0), 0.0, 1.0, ComplexField(eg, pert));
}

ComplexField backbone_wiggle(const curves::PeriodicCurve& c) {
  return ComplexField(c.grid, c.omega.v - c.grid.nodes().cast<Complex>());
}

struct BuiltData {
  LocalizedFixedPoint lfp;
  SplitField v0;
  SplitField w0;
  WavePacket wp;
};

BuiltData build_initial_data(double eps, int packet_n = 4096,
                             double packet_half = 32.0 * kPi) {
  NlsState B = gaussian_envelope();
  WavePacket wp = build_packet(PacketParams(eps, 1.0, 0.0), B,
                               Grid::line(packet_n, packet_half));
  auto pfp = iterate_periodic(Complex(eps, 0.0), 1);
  auto lfp = iterate_localized(pfp.curve, wp.eta.decaying, backbone_wiggle(pfp.curve));
  SplitField v0 = project_velocity(lfp.curve, wp.Dt_zeta);
  return BuiltData{std::move(lfp), std::move(v0), wp.Dt2_zeta, std::move(wp)};
}

double fitted_slope(const std::vector<double>& eps, const std::vector<double>& val) {
  const int n = static_cast<int>(eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(eps[i]), y = std::log(val[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("zero coefficient fixes the flat curve in one step") {
  auto [curve, trace] = iterate_periodic(Complex(0.0, 0.0), 1);
  CHECK(trace.n_iter == 1);
  CHECK(trace.converged);
  CHECK((curve.omega.v - curve.grid.nodes().cast<Complex>()).abs().maxCoeff() == 0.0);
}

TEST_CASE("periodic fixed point: contraction certificate and tail") {
  for (double c : {0.1, 0.05, 0.025}) {
    auto [curve, trace] = iterate_periodic(Complex(c, 0.0), 1);
    CHECK(trace.converged);
    // increment(n+1)/increment(n) <= 2|c| + 0.05 for all n >= 1
    for (size_t i = 1; i + 1 < trace.increments.size(); ++i)
      CHECK(trace.increments[i + 1] / trace.increments[i] <= 2.0 * c + 0.05);
    // geometric tail
    CHECK(trace.final_increment <=
          std::pow(2.0 * c, trace.n_iter - 1) * trace.increments.front() * 1.1);
    // defining relation holds pointwise
    ArrayXcd defect = curve.omega.v.conjugate() -
                      curve.grid.nodes().cast<Complex>() -
                      Complex(c, 0.0) * (-kI * curve.omega.v).exp();
    CHECK(defect.abs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("per-step ratio at |c| = 0.05 stays under 0.12") {
  auto [curve, trace] = iterate_periodic(Complex(0.05, 0.0), 1);
  for (size_t i = 1; i + 1 < trace.increments.size(); ++i)
    CHECK(trace.increments[i + 1] / trace.increments[i] <= 0.12);
}

TEST_CASE("distance to the first-order curve is quadratic in |c|") {
  std::vector<double> cs = {0.1, 0.05, 0.025};
  std::vector<double> dist;
  for (double c : cs) {
    auto [curve, trace] = iterate_periodic(Complex(c, 0.0), 1);
    ArrayXcd first_order =
        curve.grid.nodes().cast<Complex>() +
        c * (kI * curve.grid.nodes().cast<Complex>()).exp();
    dist.push_back((curve.omega.v - first_order).abs().maxCoeff());
  }
  CHECK(fitted_slope(cs, dist) > 1.8);
}

TEST_CASE("general wavenumber and the contraction precondition") {
  auto [curve, trace] = iterate_periodic(Complex(0.05, 0.02), 2);
  CHECK(trace.converged);
  ArrayXcd defect = curve.omega.v.conjugate() -
                    curve.grid.nodes().cast<Complex>() -
                    Complex(0.05, 0.02) * (-2.0 * kI * curve.omega.v).exp();
  CHECK(defect.abs().maxCoeff() < 1e-11);

  CHECK_THROWS_AS(iterate_periodic(Complex(0.15, 0.0), 2), std::invalid_argument);
  CHECK_THROWS_AS(iterate_periodic(Complex(0.19, 0.0), 1, 1e-12, 256, 3),
                  NoConvergence);
}

TEST_CASE("idempotence: restarting from the fixed point converges at once") {
  auto first = iterate_periodic(Complex(0.05, 0.0), 1);
  auto again = iterate_periodic(Complex(0.05, 0.0), 1, 1e-12, 256, 200,
                                first.curve.omega.v);
  CHECK(again.trace.n_iter == 1);
  CHECK(again.trace.converged);
}

TEST_CASE("localized correction: zero target over the flat backbone") {
  Grid pg = Grid::periodic(256);
  curves::PeriodicCurve flat = curves::flat_periodic_curve(pg);
  Grid line = Grid::line(1024, 16.0 * kPi);
  auto lfp = iterate_localized(flat, ComplexField::zero(line),
                               ComplexField::zero(pg));
  CHECK(lfp.trace.converged);
  CHECK(lfp.xi1.sup_norm() < 1e-14);
}

TEST_CASE("localized correction renders the composite interface holomorphic") {
  BuiltData data = build_initial_data(0.05);
  CHECK(data.lfp.trace.converged);

  auto compat = check_compatibility(data.lfp.curve, data.v0, data.w0, {});
  CHECK(compat.at("I1_interface") < 1e-6);
  CHECK(compat.at("I1_velocity") < 1e-6);
  CHECK(compat.at("I2_interface") < 1e-6);
  CHECK(compat.at("I2_velocity") < 1e-6);
  CHECK(compat.at("I4_identity") < 1e-6);
  CHECK(compat.at("I5_identity") < 1e-6);
  // The raw interface residual is the mean-mode constant, O(1/L)-sized.
  CHECK(compat.at("I1_interface_raw") < 1e-3);
  CHECK(compat.at("I1_interface_raw") > compat.at("I1_interface"));
}

TEST_CASE("rest state passes compatibility trivially") {
  Grid pg = Grid::periodic(256);
  curves::PeriodicCurve flat = curves::flat_periodic_curve(pg);
  Grid line = Grid::line(1024, 16.0 * kPi);
  curves::LineCurve c = curves::make_line_curve(line, flat, ComplexField::zero(line));
  SplitField zero = curves::make_split(ComplexField::zero(pg), line);
  auto compat = check_compatibility(c, zero, zero, {});
  for (const auto& [key, value] : compat) {
    INFO(key);
    CHECK(value < 1e-13);
  }
}

TEST_CASE("distance to the approximate data shrinks like eps^(3/2) or faster") {
  // Grids scale with 1/eps so the truncation's mean-mode artifact (an
  // O(eps/L) constant) stays subdominant to the genuine distance.
  std::vector<double> eps = {0.1, 0.05, 0.025};
  std::vector<int> npts = {2048, 4096, 8192};
  std::vector<double> half = {32.0 * kPi, 64.0 * kPi, 128.0 * kPi};
  std::vector<double> d_interface;
  for (size_t i = 0; i < eps.size(); ++i) {
    NlsState B = gaussian_envelope();
    WavePacket wp = build_packet(PacketParams(eps[i], 1.0, 0.0), B,
                                 Grid::line(npts[i], half[i]));
    auto pfp = iterate_periodic(Complex(eps[i], 0.0), 1);
    auto lfp = iterate_localized(pfp.curve, wp.eta.decaying,
                                 backbone_wiggle(pfp.curve));
    ComplexField diff(wp.curve.grid, lfp.xi1.v - wp.eta.decaying.v);
    d_interface.push_back(sobolev_norm(spectral_derivative(diff), 4.0));
  }
  CHECK(fitted_slope(eps, d_interface) > 1.3);
}

TEST_CASE("seeded non-holomorphic bump trips the velocity check") {
  BuiltData data = build_initial_data(0.05);
  // bump e^{ik alpha} g(eps alpha): not the boundary value of anything
  // holomorphic below the perturbed interface (appendix mechanism).
  const Grid& line = data.lfp.curve.grid;
  ArrayXcd bump(line.n);
  for (int j = 0; j < line.n; ++j) {
    const double a = line.node(j);
    bump[j] = 0.5 * std::exp(kI * a) * std::exp(-0.05 * 0.05 * a * a);
  }
  SplitField bad = data.v0;
  bad.decaying = ComplexField(line, bad.decaying.v + bump);
  auto compat = check_compatibility(data.lfp.curve, bad, data.w0, {});
  CHECK(compat.at("I1_velocity") > 1e-2);
}
