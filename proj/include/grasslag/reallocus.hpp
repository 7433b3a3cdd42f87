#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "grasslag/grassmann.hpp"
#include "grasslag/hypersurface.hpp"

namespace grasslag {

template <typename T, size_t N>
T quartic_norm(const std::array<T, N>& v) {
  T s{};
  for (const T& x : v) {
    T q = x * x;
    s += q * q;
  }
  return s;
}

// Split of the defining polynomial into two sides with nonnegative weights:
// sum_t pos_t eta_t^4 - sum_t neg_t eta_t^4 = sum_t c_t eta_t^4.
struct LocusSplit {
  std::array<Rat, 6> pos;
  std::array<Rat, 6> neg;

  // pos_t = max(c_t, 0), neg_t = max(-c_t, 0).
  static LocusSplit direct(const CoefficientVector& cv);
  // The alternate split for c = (1,1,-1,-2,-2,-2): both sides gain one copy
  // of eta2^4, giving (eta0^4+eta1^4+eta2^4, 2 eta2^4+2 eta3^4+2 eta4^4+2 eta5^4).
  static LocusSplit alternate(const CoefficientVector& cv);
};

template <typename T>
T eval_split_side(const std::array<Rat, 6>& w, const std::array<T, 6>& eta) {
  T s{};
  for (int t = 0; t < 6; ++t) {
    if (w[t] == 0) continue;
    T q = eta[t] * eta[t];
    q = q * q;
    if constexpr (std::is_same_v<T, Rat>) {
      s += w[t] * q;
    } else {
      s += T(rat_d(w[t])) * q;
    }
  }
  return s;
}

// (|P(eta) - 1|, |N(eta) - 1|)
std::pair<double, double> locus_residuals(const LocusSplit& split,
                                          const std::array<double, 6>& eta);

// For a frame u = (a, w), up = (a', w') this is
// (sum (w x w')_i^4, sum (a'w - aw')_i^4), the two sides of the c=(1,1,1,-1,-1,-1)
// normalization expressed without Pluecker coordinates.
template <typename T>
std::pair<T, T> psi(const Frame<T>& f) {
  std::array<T, 3> cross = {f.u[2] * f.up[3] - f.u[3] * f.up[2],
                            f.u[3] * f.up[1] - f.u[1] * f.up[3],
                            f.u[1] * f.up[2] - f.u[2] * f.up[1]};
  std::array<T, 3> diff = {f.up[0] * f.u[1] - f.u[0] * f.up[1],
                           f.up[0] * f.u[2] - f.u[0] * f.up[2],
                           f.up[0] * f.u[3] - f.u[0] * f.up[3]};
  return {quartic_norm(cross), quartic_norm(diff)};
}

struct RealLocusPoint {
  std::array<double, 4> u{};
  std::array<double, 4> up{};
  std::array<double, 6> eta{};
  double p_residual = 0.0;
  double n_residual = 0.0;
};

// Validates max(|P-1|, |N-1|) <= 1e-10 and frame rank 2.
RealLocusPoint make_real_locus_point(const LocusSplit& split, const std::array<double, 4>& u,
                                     const std::array<double, 4>& up);

struct SampleResult {
  std::vector<RealLocusPoint> points;   // converged points in index order
  std::vector<size_t> failed_indices;   // draws that never converged
};

// Deterministic sampler: per index, Gaussian frame draw, prescale by
// (P N)^(-1/16), then least-norm damped Newton on (P-1, N-1) down to 1e-14,
// with up to 10 redraws. Thread-count independent.
SampleResult sample_locus(const LocusSplit& split, size_t n, uint64_t seed);

// Canonical representative of the plane through (u, up) on the locus orbit:
// depends only on the plane, not the spanning pair. Throws if the frame is
// rank deficient or the plane does not meet the locus (P, N ratio off by
// more than 1e-6 after normalization).
RealLocusPoint canonicalize(const LocusSplit& split, const std::array<double, 4>& u,
                            const std::array<double, 4>& up);

struct SubmersionReport {
  double sigma1 = 0.0;  // larger singular value of the 2x8 differential
  double sigma2 = 0.0;
  bool full_rank = false;  // sigma2 > 1e-8 * sigma1
};

SubmersionReport submersion_check(const LocusSplit& split, const RealLocusPoint& p);

using Tangent8 = std::array<double, 8>;

// Orthonormal basis of ker d(P,N) orthogonal to the in-kernel directions of
// the frame-change action, span{(up,0),(0,u),(u,-up)}: dimension 3.
std::array<Tangent8, 3> locus_tangent_basis(const LocusSplit& split, const RealLocusPoint& p);

// Push a frame direction to Pluecker coordinates.
std::array<double, 6> eta_differential(const RealLocusPoint& p, const Tangent8& t);

// Fubini-Study Hermitian form at z on representatives a, b:
// H(a,b) = (<a,b><z,z> - <a,z><z,b>) / <z,z>^2, <x,y> = sum x_i conj(y_i).
std::complex<double> fs_hermitian(const std::array<std::complex<double>, 6>& z,
                                  const std::array<std::complex<double>, 6>& a,
                                  const std::array<std::complex<double>, 6>& b);

// Im H(a,b) / sqrt(H(a,a) H(b,b)): the symplectic pairing normalized by the
// metric, so a complex line inside the span scores 1.
double symplectic_pairing(const std::array<std::complex<double>, 6>& z,
                          const std::array<std::complex<double>, 6>& a,
                          const std::array<std::complex<double>, 6>& b);

// Max normalized symplectic pairing over the three basis pairs pushed to
// Pluecker coordinates.
double symplectic_residual(const RealLocusPoint& p, const std::array<Tangent8, 3>& basis);

struct VolumePhase {
  Chart chart;             // chart with the largest pivot minor
  double phase = 0.0;      // arg of the residue value folded mod pi into (-pi/2, pi/2]
  double magnitude = 0.0;  // |residue value|
  double deviation = 0.0;  // |Im z| / |z| before folding
  double pivot_agreement = 0.0;
};

// Residue value of the chart volume form on the locus tangent triple. The
// folded phase is invariant under relabeling of the basis; the collection of
// phases over the locus is the flatness evidence.
VolumePhase volume_form_phase(const CoefficientVector& cv, const LocusSplit& split,
                              const RealLocusPoint& p);

// Unit vector along w x w' with the first component of magnitude above
// 0.1 * max made positive; representative of the line through w x w'.
std::array<double, 3> base_projection(const RealLocusPoint& p);

// Scales a 3-vector pair so that sum (w x w')_i^4 = 1. Throws if the cross
// product is numerically zero.
void normalize_base_pair(std::array<double, 3>& w, std::array<double, 3>& wp);

// Point of the c=(1,1,1,-1,-1,-1) locus over a normalized base pair:
// d(theta) = cos(theta) w - sin(theta) w', r = (sum d_i^4)^(-1/4),
// u = (r sin(theta), w), up = (r cos(theta), w'). theta = 0 recovers
// u = (0, w), up = (r, w').
RealLocusPoint fiber_point(const std::array<double, 3>& w, const std::array<double, 3>& wp,
                           double theta);

// m equally spaced fiber points, theta_k = 2 pi k / m. Requires m >= 3.
std::vector<RealLocusPoint> fiber_samples(const std::array<double, 3>& w,
                                          const std::array<double, 3>& wp, size_t m);

}  // namespace grasslag
