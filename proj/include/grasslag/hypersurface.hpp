#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "grasslag/grassmann.hpp"
#include "grasslag/polynomial.hpp"

namespace grasslag {

// Coefficients (c0..c5) of F = sum_t c_t eta_t^4. All entries nonzero, with at
// least one of each sign, so the real locus normalization has two sides.
struct CoefficientVector {
  std::array<Rat, 6> c;

  explicit CoefficientVector(const std::array<Rat, 6>& coeffs);
  static CoefficientVector from_strings(const std::array<std::string, 6>& txt);
  static CoefficientVector preset(const std::string& name);  // eq1, eq7, eq8

  bool operator==(const CoefficientVector& o) const { return c == o.c; }
  std::array<std::string, 6> str() const;
};

template <typename T>
T eval_F(const CoefficientVector& cv, const Frame<T>& f) {
  auto eta = pluecker(f);
  T sum{};
  for (int t = 0; t < 6; ++t) {
    T q = eta[t] * eta[t];
    q = q * q;
    if constexpr (std::is_same_v<T, Rat>) {
      sum += cv.c[t] * q;
    } else {
      sum += T(rat_d(cv.c[t])) * q;
    }
  }
  return sum;
}

// F restricted to a chart and divided by the pivot minor^4:
//   f = c(i,j) + c(i,k) z1^4 + c(i,l) z2^4 + c(j,k) z3^4 + c(j,l) z4^4 + c(k,l) D^4.
Polynomial chart_expression(const CoefficientVector& cv, Chart chart);

// The four partials of chart_expression divided by the common factor 4.
std::array<Polynomial, 4> gradient_system(const CoefficientVector& cv, Chart chart);

struct HypersurfacePoint {
  Chart chart;
  std::array<std::complex<double>, 4> zeta;
  double residual = 0.0;  // |f(zeta)|
};

// Validates |f(zeta)| <= 1e-10 * scale, scale = 1 + max|zeta|^4 * max|c|.
HypersurfacePoint make_hypersurface_point(const CoefficientVector& cv, Chart chart,
                                          const std::array<std::complex<double>, 4>& zeta);

struct SmoothnessWitness {
  size_t start_index;
  std::array<std::complex<double>, 4> zeta;
  double residual;
};

struct SmoothnessReport {
  std::string chart;
  size_t starts = 0;
  std::vector<SmoothnessWitness> witnesses;
  double min_residual = 0.0;  // best final residual over all starts
  double p25_residual = 0.0;
  double median_residual = 0.0;
};

// Multistart damped Gauss-Newton on the joint system {f = 0, grad f = 0}
// (5 equations, 4 complex unknowns), starts drawn from the polydisc
// |z_i| <= 2 with substreams keyed by (seed, start index). A witness is a
// final iterate with max(|f|, |grad f|_inf) < 1e-10. Zero witnesses is
// reported as evidence of smoothness, not a proof.
SmoothnessReport smoothness_search(const CoefficientVector& cv, Chart chart, size_t n_starts,
                                   uint64_t seed);

// Same search on an arbitrary polynomial in the chart variables; used by the
// negative control (e.g. z1^2, whose joint system has the solution plane z1=0).
SmoothnessReport smoothness_search_system(const Polynomial& f, size_t n_starts, uint64_t seed);

using Tangent4 = std::array<std::complex<double>, 4>;

struct ResidueValue {
  std::complex<double> value;
  int pivot;                  // 0-based index of the partial used
  double pivot_agreement;     // relative difference against the runner-up pivot
};

// Poincare residue 3-form of (dz1^dz2^dz3^dz4)/f evaluated on a tangent
// triple: with pivot k (largest |df/dz_k|), gamma = s_k * (wedge of the other
// three dz, increasing order) / (df/dz_k), s_k = -1,+1,-1,+1 for k = 0..3,
// normalized so gamma ^ df = + dz1^dz2^dz3^dz4.
// Preconditions: p satisfies its residual invariant; each tangent annihilates
// df at p to 1e-8 relative. Throws if all four partials are below 1e-8.
ResidueValue residue_form(const CoefficientVector& cv, const HypersurfacePoint& p,
                          const std::array<Tangent4, 3>& tangents, int force_pivot = -1);

// Evaluates the residue at p in its own chart and at the transported point in
// the other chart (tangents pushed through the transition differential);
// returns the relative discrepancy between the two values.
double residue_chart_consistency(const CoefficientVector& cv, const HypersurfacePoint& p,
                                 Chart other);

// Solves f = 0 in the given chart starting from a random point (deterministic
// by (seed, index)); used to produce test points on the hypersurface.
HypersurfacePoint solve_on_hypersurface(const CoefficientVector& cv, Chart chart, uint64_t seed,
                                        uint64_t index);

// Orthonormal-ish basis of ker(df) at p built from coordinate directions
// corrected along the pivot; each vector annihilates df exactly.
std::array<Tangent4, 3> hypersurface_tangent_basis(const CoefficientVector& cv,
                                                   const HypersurfacePoint& p);

}  // namespace grasslag
