#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "peregrine/errors.hpp"

namespace peregrine {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

enum class GridKind { Periodic, Line };

// Uniform grid on [-length/2, length/2). For a periodic grid `length` is the
// period; for a truncated-line grid it is 2L. Nodes are x_j = -length/2 + j*h.
struct Grid {
  GridKind kind = GridKind::Periodic;
  int n = 0;
  double length = 2.0 * kPi;

  static Grid periodic(int n_points, double period = 2.0 * kPi) {
    validate(n_points, period);
    return Grid{GridKind::Periodic, n_points, period};
  }
  static Grid line(int n_points, double half_width) {
    validate(n_points, 2.0 * half_width);
    return Grid{GridKind::Line, n_points, 2.0 * half_width};
  }

  double spacing() const { return length / n; }
  double left() const { return -0.5 * length; }
  double period() const { return length; }
  double half_width() const { return 0.5 * length; }

  double node(int j) const { return left() + j * spacing(); }
  ArrayXd nodes() const {
    return ArrayXd::LinSpaced(n, 0, n - 1) * spacing() + left();
  }

  // FFT-ordered frequencies 2*pi*m/length, m in [0..n/2-1, -n/2..-1].
  double frequency(int idx) const {
    const int m = idx < n / 2 ? idx : idx - n;
    return 2.0 * kPi * m / length;
  }
  ArrayXd frequencies() const {
    ArrayXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = frequency(i);
    return xi;
  }

  bool operator==(const Grid& o) const {
    return kind == o.kind && n == o.n && length == o.length;
  }

 private:
  static void validate(int n_points, double length) {
    if (n_points < 8 || n_points % 2 != 0)
      throw std::invalid_argument("grid needs an even point count >= 8");
    if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
  }
};

}  // namespace peregrine
