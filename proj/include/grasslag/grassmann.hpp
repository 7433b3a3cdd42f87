#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "grasslag/polynomial.hpp"
#include "grasslag/rational.hpp"

namespace grasslag {

// A 2-frame in 4-space: rows span the plane. u is the first vector, up the second.
template <typename T>
struct Frame {
  std::array<T, 4> u{};
  std::array<T, 4> up{};
};

using RatFrame = Frame<Rat>;
using RealFrame = Frame<double>;
using ComplexFrame = Frame<std::complex<double>>;

namespace detail {
inline double scalar_abs(const Rat& q) { return std::abs(rat_d(q)); }
inline double scalar_abs(double x) { return std::abs(x); }
inline double scalar_abs(const std::complex<double>& z) { return std::abs(z); }
inline bool exactly_zero(const Rat& q) { return q == 0; }
inline bool exactly_zero(double) { return false; }
inline bool exactly_zero(const std::complex<double>&) { return false; }
}  // namespace detail

// 2x2 minor built from rows a and b of the frame.
template <typename T>
T frame_minor(const Frame<T>& f, int a, int b) {
  return f.u[a] * f.up[b] - f.u[b] * f.up[a];
}

// Index of the unordered pair (a,b), a<b, in the fixed order
// (01),(02),(03),(12),(13),(23).
int pair_index(int a, int b);
std::pair<int, int> pair_from_index(int idx);

// The six minors in pair order; these are the homogeneous coordinates
// eta0..eta5 of the plane spanned by the frame.
template <typename T>
std::array<T, 6> pluecker(const Frame<T>& f) {
  std::array<T, 6> eta;
  for (int t = 0; t < 6; ++t) {
    auto [a, b] = pair_from_index(t);
    eta[t] = frame_minor(f, a, b);
  }
  return eta;
}

template <typename T>
T quadric_residual(const std::array<T, 6>& eta) {
  return eta[0] * eta[5] - eta[1] * eta[4] + eta[2] * eta[3];
}

// Frame rank check: at least one minor nonzero (exact for rationals,
// relative tolerance 1e-12 for floating scalars).
template <typename T>
bool frame_has_rank2(const Frame<T>& f) {
  auto eta = pluecker(f);
  double mx = 0.0, scale = 0.0;
  bool exact_nonzero = false;
  for (const auto& e : eta) {
    mx = std::max(mx, detail::scalar_abs(e));
    if (!detail::exactly_zero(e)) exact_nonzero = true;
  }
  for (int i = 0; i < 4; ++i) {
    scale = std::max(scale, detail::scalar_abs(f.u[i]));
    scale = std::max(scale, detail::scalar_abs(f.up[i]));
  }
  if constexpr (std::is_same_v<T, Rat>) {
    return exact_nonzero;
  } else {
    return mx > 1e-12 * std::max(1.0, scale * scale);
  }
}

template <typename T>
struct PlueckerPoint {
  std::array<T, 6> eta;

  explicit PlueckerPoint(const std::array<T, 6>& e) : eta(e) {
    double mx = 0.0;
    for (const auto& x : e) mx = std::max(mx, detail::scalar_abs(x));
    if constexpr (std::is_same_v<T, Rat>) {
      bool nz = false;
      for (const auto& x : e)
        if (x != 0) nz = true;
      if (!nz) throw std::invalid_argument("pluecker point is identically zero");
      if (quadric_residual(e) != 0)
        throw std::invalid_argument("pluecker point violates the quadric relation");
    } else {
      if (mx <= 0.0) throw std::invalid_argument("pluecker point is identically zero");
      if (detail::scalar_abs(quadric_residual(e)) > 1e-9 * mx * mx)
        throw std::invalid_argument("pluecker point violates the quadric relation");
    }
  }
};

// GL2 change of frame: (u, up) -> (a*u + c*up, b*u + d*up); the Plucker vector
// scales by ad - bc, which must be nonzero.
template <typename T>
Frame<T> frame_action(const Frame<T>& f, const T& a, const T& b, const T& c, const T& d) {
  T det = a * d - b * c;
  bool singular;
  if constexpr (std::is_same_v<T, Rat>) {
    singular = (det == 0);
  } else {
    singular = (detail::scalar_abs(det) == 0.0);
  }
  if (singular) throw std::invalid_argument("frame_action with singular matrix");
  Frame<T> g;
  for (int i = 0; i < 4; ++i) {
    g.u[i] = a * f.u[i] + c * f.up[i];
    g.up[i] = b * f.u[i] + d * f.up[i];
  }
  return g;
}

struct Chart {
  int i = 0, j = 1;  // 0 <= i < j <= 3
  Chart() = default;
  Chart(int ii, int jj) : i(ii), j(jj) {
    if (i < 0 || j > 3 || i >= j) throw std::invalid_argument("bad chart indices");
  }
  int index() const { return pair_index(i, j); }
  std::pair<int, int> complement() const;
  bool operator==(const Chart& o) const { return i == o.i && j == o.j; }
  std::string name() const { return "U" + std::to_string(i) + std::to_string(j); }
};

Chart chart_from_index(int idx);
std::vector<Chart> all_charts();

template <typename T>
struct ChartPoint {
  Chart chart;
  std::array<T, 4> zeta{};  // (zeta1, zeta2, zeta3, zeta4)
};

// Affine coordinates on the chart where rows (i,j) are invertible: with
// A = rows (i,j), B = rows (k,l) of [u up], the matrix B*A^{-1} is
// [[zeta3, zeta1], [zeta4, zeta2]].  Equivalently, with signed minors m(a,b):
// zeta1 = m(i,k)/m(i,j), zeta2 = m(i,l)/m(i,j),
// zeta3 = m(k,j)/m(i,j), zeta4 = m(l,j)/m(i,j).
template <typename T>
ChartPoint<T> chart_coords(const Frame<T>& f, Chart chart) {
  auto [k, l] = chart.complement();
  auto sm = [&](int a, int b) -> T {
    return a < b ? frame_minor(f, a, b) : T(-frame_minor(f, b, a));
  };
  T piv = frame_minor(f, chart.i, chart.j);
  bool bad;
  if constexpr (std::is_same_v<T, Rat>) {
    bad = (piv == 0);
  } else {
    double mx = 0.0;
    for (int t = 0; t < 6; ++t) {
      auto [a, b] = pair_from_index(t);
      mx = std::max(mx, detail::scalar_abs(frame_minor(f, a, b)));
    }
    bad = detail::scalar_abs(piv) <= 1e-12 * std::max(1.0, mx);
  }
  if (bad) throw std::domain_error("frame is outside chart " + chart.name());
  ChartPoint<T> p;
  p.chart = chart;
  p.zeta[0] = sm(chart.i, k) / piv;
  p.zeta[1] = sm(chart.i, l) / piv;
  p.zeta[2] = sm(k, chart.j) / piv;
  p.zeta[3] = sm(l, chart.j) / piv;
  return p;
}

// Normalized frame with identity block in rows (i,j); chart_coords of the
// result reproduces the chart point exactly.
template <typename T>
Frame<T> reconstruct_frame(const ChartPoint<T>& p) {
  auto [k, l] = p.chart.complement();
  Frame<T> f;
  f.u[p.chart.i] = T(1);
  f.u[p.chart.j] = T(0);
  f.u[k] = p.zeta[2];
  f.u[l] = p.zeta[3];
  f.up[p.chart.i] = T(0);
  f.up[p.chart.j] = T(1);
  f.up[k] = p.zeta[0];
  f.up[l] = p.zeta[1];
  return f;
}

// Change of charts inside the atlas: exact for rational scalars.
template <typename T>
ChartPoint<T> transition(const ChartPoint<T>& p, Chart target) {
  if (p.chart == target) return p;
  return chart_coords(reconstruct_frame(p), target);
}

// Variable names used by all symbolic chart computations.
const std::vector<std::string>& zeta_vars();

// Symbolic transition between two atlas charts, as four rational functions of
// (z1, z2, z3, z4) on the source chart.
std::array<RationalFunction, 4> transition_map(Chart source, Chart target);

// Jacobian matrix of a symbolic transition, evaluated later at numeric points.
struct TransitionDifferential {
  std::array<RationalFunction, 4> map;
  std::array<std::array<RationalFunction, 4>, 4> jac;  // jac[i][j] = d map_i / d z_j
};
const TransitionDifferential& transition_differential(Chart source, Chart target);

// The two classical model transition maps in their textbook form
// (the atlas transitions equal these up to a signed relabeling of outputs):
//   first type:  (z1,z2,z3,z4) -> (-z2/z1, 1/z1, -D/z1, z3/z1)
//   second type: (z1,z2,z3,z4) -> (-z4/D, z2/D, z3/D, -z1/D),  D = z1*z4 - z2*z3
std::array<RationalFunction, 4> transition_first_type();
std::array<RationalFunction, 4> transition_second_type();

struct AtlasIdentity {
  std::string name;
  std::string lhs;  // symbolic determinant, num/den
  std::string rhs;  // expected value
  bool pass = false;
};

struct AtlasJacobianReport {
  std::vector<AtlasIdentity> identities;
  bool all_pass = false;
};

// Certifies, by exact cross-multiplication, the Jacobian determinants of the
// atlas transitions (first type 1/z1^4, second type 1/D^4), of the two model
// maps, and of every ordered chart pair against the pivot-ratio fourth power.
// corrupt_first_type is a test hook that injects a wrong first-type map.
AtlasJacobianReport verify_transition_jacobians(bool corrupt_first_type = false);

// Differential of chart_coords with respect to the 8 frame coordinates
// (u0,u1,u2,u3,up0,up1,up2,up3), evaluated at a real frame.
std::array<std::array<double, 8>, 4> chart_coords_differential(const Frame<double>& f, Chart chart);

// Minor gradient: d m(a,b) as a function of the 8 frame coordinates.
std::array<double, 8> minor_gradient(const Frame<double>& f, int a, int b);

}  // namespace grasslag
