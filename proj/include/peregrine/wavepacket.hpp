#pragma once

#include <optional>

#include "peregrine/curve_ops.hpp"
#include "peregrine/nls.hpp"

namespace peregrine::packet {

using curves::LineCurve;
using curves::PeriodicCurve;
using curves::SplitField;

struct PacketParams {
  double epsilon;
  double k;
  double t;

  PacketParams(double eps, double wavenumber, double fast_time)
      : epsilon(eps), k(wavenumber), t(fast_time) {
    if (!(epsilon > 0.0 && epsilon <= 0.25))
      throw std::invalid_argument(
          "epsilon must lie in (0, 0.25]: beyond that the asymptotic ordering fails");
    if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  }
  double gamma() const { return std::sqrt(k); }
};

struct SlowVars {
  double X, T, phi;
};

// X = eps (alpha + t / (2 sqrt(k))), T = eps^2 t, phi = k alpha + sqrt(k) t.
SlowVars slow_vars(const PacketParams& p, double alpha);

// Half-width 32*pi doubled until eps * L >= reach (the envelope must decay
// inside half the domain); the point count scales with it.
Grid packet_grid(double epsilon, double reach = 10.0);

// The third-order approximate interface and its transport data at fixed
// (eps, k, t). Every field carries its exact periodic/decaying split.
struct WavePacket {
  PacketParams params;
  LineCurve curve;       // zeta-tilde over the backbone omega-tilde
  SplitField eta;        // zeta-tilde - alpha
  SplitField zeta_alpha; // 1 + eta_alpha
  SplitField b;          // b-tilde (real)
  SplitField Dt_zeta;    // material velocity
  SplitField Dt2_zeta;   // material acceleration
  ComplexField A;        // A-tilde, identically one

  // analytic partial derivatives retained for residual work and the
  // finite-difference cross-checks
  SplitField eta_t, eta_tt, eta_ta, eta_aa, b_t, b_a;
  ComplexField G3;  // 2 k^3 B|B|^2 e^{i phi} on the packet grid

  const ComplexField& xi0() const { return eta.periodic; }
  const ComplexField& xi1() const { return eta.decaying; }
  const ComplexField& b0() const { return b.periodic; }
  const ComplexField& b1() const { return b.decaying; }
};

// Assembles the packet from an NLS state in the scaled(k) normalization
// (NormalizationMismatch otherwise). Time derivatives of the envelope are
// taken from the governing equation; spatial derivatives are spectral.
WavePacket build_packet(const PacketParams& params, const nls::NlsState& B,
                        std::optional<Grid> grid = std::nullopt,
                        int backbone_points = 256);

// Same formulas at t + dt with the envelope advanced by the NLS flow.
WavePacket packet_at_shifted_time(const PacketParams& params,
                                  const nls::NlsState& B, double dt,
                                  std::optional<Grid> grid = std::nullopt);

// sup norm of (Dt~^2 - i d_alpha)(I - H)(zeta - alpha) - eps^3 G_3 with
// G_3 = 2 k^3 B|B|^2 e^{i phi}: the third-order solvability residual of the
// hierarchy, which vanishes at order eps^3 exactly when B solves the NLS.
double hierarchy_residual(const WavePacket& packet);

// Same quantity without the transport and cubic bookkeeping (the bare flat
// operator): retains an eps^3 term even for NLS envelopes; kept for the
// order studies that document the difference.
double bare_hierarchy_residual(const WavePacket& packet);

}  // namespace peregrine::packet
