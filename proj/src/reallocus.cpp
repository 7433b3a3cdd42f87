#include "grasslag/reallocus.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "grasslag/parallel.hpp"
#include "grasslag/rng.hpp"

namespace grasslag {

LocusSplit LocusSplit::direct(const CoefficientVector& cv) {
  LocusSplit s;
  for (int t = 0; t < 6; ++t) {
    if (cv.c[t] > 0) {
      s.pos[t] = cv.c[t];
      s.neg[t] = 0;
    } else {
      s.pos[t] = 0;
      s.neg[t] = -cv.c[t];
    }
  }
  return s;
}

LocusSplit LocusSplit::alternate(const CoefficientVector& cv) {
  CoefficientVector eq8 = CoefficientVector::preset("eq8");
  if (!(cv == eq8))
    throw std::invalid_argument("alternate split is defined for the (1,1,-1,-2,-2,-2) system");
  LocusSplit s = direct(cv);
  s.pos[2] += 1;
  s.neg[2] += 1;
  return s;
}

std::pair<double, double> locus_residuals(const LocusSplit& split,
                                          const std::array<double, 6>& eta) {
  double p = eval_split_side(split.pos, eta);
  double n = eval_split_side(split.neg, eta);
  return {std::abs(p - 1.0), std::abs(n - 1.0)};
}

RealLocusPoint make_real_locus_point(const LocusSplit& split, const std::array<double, 4>& u,
                                     const std::array<double, 4>& up) {
  Frame<double> f{u, up};
  if (!frame_has_rank2(f)) throw std::invalid_argument("frame is rank deficient");
  RealLocusPoint p;
  p.u = u;
  p.up = up;
  p.eta = pluecker(f);
  auto [rp, rn] = locus_residuals(split, p.eta);
  p.p_residual = rp;
  p.n_residual = rn;
  if (std::max(rp, rn) > 1e-10)
    throw std::invalid_argument("frame does not satisfy the locus normalization");
  return p;
}

namespace {

using Vec8 = Eigen::Matrix<double, 8, 1>;

std::array<double, 8> pack(const std::array<double, 4>& u, const std::array<double, 4>& up) {
  std::array<double, 8> x;
  for (int i = 0; i < 4; ++i) {
    x[i] = u[i];
    x[4 + i] = up[i];
  }
  return x;
}

Frame<double> unpack(const std::array<double, 8>& x) {
  Frame<double> f;
  for (int i = 0; i < 4; ++i) {
    f.u[i] = x[i];
    f.up[i] = x[4 + i];
  }
  return f;
}

// 2x8 differential of (P, N) at the frame.
Eigen::Matrix<double, 2, 8> locus_jacobian(const LocusSplit& split, const Frame<double>& f,
                                           const std::array<double, 6>& eta) {
  Eigen::Matrix<double, 2, 8> J = Eigen::Matrix<double, 2, 8>::Zero();
  for (int t = 0; t < 6; ++t) {
    double e3 = 4.0 * eta[t] * eta[t] * eta[t];
    double wp = rat_d(split.pos[t]) * e3;
    double wn = rat_d(split.neg[t]) * e3;
    if (wp == 0.0 && wn == 0.0) continue;
    auto [a, b] = pair_from_index(t);
    auto mg = minor_gradient(f, a, b);
    for (int k = 0; k < 8; ++k) {
      J(0, k) += wp * mg[k];
      J(1, k) += wn * mg[k];
    }
  }
  return J;
}

double max_locus_residual(const LocusSplit& split, const Frame<double>& f) {
  auto [rp, rn] = locus_residuals(split, pluecker(f));
  return std::max(rp, rn);
}

// Least-norm damped Newton on (P-1, N-1); returns the reached residual.
double newton_to_locus(const LocusSplit& split, std::array<double, 8>& x, double target) {
  double res = max_locus_residual(split, unpack(x));
  for (int iter = 0; iter < 80 && res > target; ++iter) {
    Frame<double> f = unpack(x);
    auto eta = pluecker(f);
    double p = eval_split_side(split.pos, eta);
    double n = eval_split_side(split.neg, eta);
    Eigen::Matrix<double, 2, 8> J = locus_jacobian(split, f, eta);
    Eigen::Vector2d r(p - 1.0, n - 1.0);
    Vec8 step = J.completeOrthogonalDecomposition().solve(-r);

    double alpha = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt) {
      std::array<double, 8> trial = x;
      for (int k = 0; k < 8; ++k) trial[k] += alpha * step(k);
      double rt = max_locus_residual(split, unpack(trial));
      if (rt < (1.0 - 1e-4 * alpha) * res) {
        x = trial;
        res = rt;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  return res;
}

}  // namespace

SampleResult sample_locus(const LocusSplit& split, size_t n, uint64_t seed) {
  std::vector<std::optional<RealLocusPoint>> slots(n);
  parallel_for(n, [&](size_t i) {
    for (int attempt = 0; attempt < 10; ++attempt) {
      RngStream rng(seed, i * 31ull + attempt);
      std::array<double, 8> x;
      for (int k = 0; k < 8; ++k) x[k] = rng.gauss();
      Frame<double> f = unpack(x);
      auto eta = pluecker(f);
      double p = eval_split_side(split.pos, eta);
      double nn = eval_split_side(split.neg, eta);
      if (p < 1e-12 || nn < 1e-12) continue;
      double g = std::pow(p * nn, -1.0 / 16.0);
      for (int k = 0; k < 8; ++k) x[k] *= g;

      double res = newton_to_locus(split, x, 1e-14);
      if (res > 1e-12) continue;
      Frame<double> fr = unpack(x);
      if (!frame_has_rank2(fr)) continue;
      slots[i] = make_real_locus_point(split, fr.u, fr.up);
      return;
    }
  });

  SampleResult out;
  for (size_t i = 0; i < n; ++i) {
    if (slots[i])
      out.points.push_back(*slots[i]);
    else
      out.failed_indices.push_back(i);
  }
  return out;
}

namespace {

double dot4(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double norm4(const std::array<double, 4>& a) { return std::sqrt(dot4(a, a)); }

}  // namespace

RealLocusPoint canonicalize(const LocusSplit& split, const std::array<double, 4>& u,
                            const std::array<double, 4>& up) {
  Frame<double> f{u, up};
  if (!frame_has_rank2(f)) throw std::invalid_argument("frame is rank deficient");

  // orthonormal pair spanning the same plane
  std::array<double, 4> e1 = u;
  double n1 = norm4(e1);
  for (double& v : e1) v /= n1;
  std::array<double, 4> e2 = up;
  double c = dot4(e2, e1);
  for (int i = 0; i < 4; ++i) e2[i] -= c * e1[i];
  double n2 = norm4(e2);
  if (n2 < 1e-10 * norm4(up)) throw std::invalid_argument("frame is rank deficient");
  for (double& v : e2) v /= n2;

  // projection onto the plane; depends only on the plane
  double pm[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) pm[i][j] = e1[i] * e1[j] + e2[i] * e2[j];

  // b1: normalized largest column (columns of pm carry no basis ambiguity)
  int j1 = 0;
  for (int j = 1; j < 4; ++j)
    if (pm[j][j] > pm[j1][j1]) j1 = j;
  std::array<double, 4> b1;
  for (int i = 0; i < 4; ++i) b1[i] = pm[i][j1];
  double nb1 = norm4(b1);
  for (double& v : b1) v /= nb1;

  // b2: in-plane direction orthogonal to b1, from the column with the largest
  // orthogonal part, sign fixed by its first significant component
  std::array<double, 4> best{};
  double bestn = -1.0;
  for (int j = 0; j < 4; ++j) {
    std::array<double, 4> w;
    for (int i = 0; i < 4; ++i) w[i] = pm[i][j];
    double d = dot4(w, b1);
    for (int i = 0; i < 4; ++i) w[i] -= d * b1[i];
    double nw = norm4(w);
    if (nw > bestn) {
      bestn = nw;
      best = w;
    }
  }
  std::array<double, 4> b2 = best;
  for (double& v : b2) v /= bestn;
  double mx2 = 0.0;
  for (double v : b2) mx2 = std::max(mx2, std::abs(v));
  for (double v : b2) {
    if (std::abs(v) > 0.1 * mx2) {
      if (v < 0)
        for (double& w : b2) w = -w;
      break;
    }
  }

  // orientation: first significant Pluecker coordinate positive
  Frame<double> cf{b1, b2};
  auto eta = pluecker(cf);
  double mxe = 0.0;
  for (double v : eta) mxe = std::max(mxe, std::abs(v));
  for (double v : eta) {
    if (std::abs(v) > 0.1 * mxe) {
      if (v < 0) {
        std::swap(cf.u, cf.up);
        for (double& w : eta) w = -w;
      }
      break;
    }
  }

  // scale onto P = 1, then insist the other side lands as well
  double p = eval_split_side(split.pos, eta);
  if (p <= 0.0) throw std::domain_error("plane is not equivalent to a locus point");
  double g = std::pow(p, -1.0 / 8.0);
  for (int i = 0; i < 4; ++i) {
    cf.u[i] *= g;
    cf.up[i] *= g;
  }
  eta = pluecker(cf);
  double n = eval_split_side(split.neg, eta);
  if (std::abs(n - 1.0) > 1e-6)
    throw std::domain_error("plane is not equivalent to a locus point");

  auto x = pack(cf.u, cf.up);
  double res = newton_to_locus(split, x, 1e-14);
  if (res > 1e-12) throw std::domain_error("canonical polish did not converge");
  Frame<double> out = unpack(x);
  return make_real_locus_point(split, out.u, out.up);
}

SubmersionReport submersion_check(const LocusSplit& split, const RealLocusPoint& p) {
  Frame<double> f{p.u, p.up};
  Eigen::Matrix<double, 2, 8> J = locus_jacobian(split, f, p.eta);
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 8>> svd(J);
  SubmersionReport rep;
  rep.sigma1 = svd.singularValues()(0);
  rep.sigma2 = svd.singularValues()(1);
  rep.full_rank = rep.sigma2 > 1e-8 * rep.sigma1;
  return rep;
}

std::array<Tangent8, 3> locus_tangent_basis(const LocusSplit& split, const RealLocusPoint& p) {
  Frame<double> f{p.u, p.up};
  Eigen::Matrix<double, 2, 8> J = locus_jacobian(split, f, p.eta);

  Eigen::Matrix<double, 5, 8> M;
  for (int r = 0; r < 2; ++r) {
    double rn = J.row(r).norm();
    if (rn < 1e-14) throw std::domain_error("degenerate locus differential");
    M.row(r) = J.row(r) / rn;
  }
  // in-kernel directions of the frame-change action
  Eigen::Matrix<double, 3, 8> S = Eigen::Matrix<double, 3, 8>::Zero();
  for (int i = 0; i < 4; ++i) {
    S(0, i) = p.up[i];
    S(1, 4 + i) = p.u[i];
    S(2, i) = p.u[i];
    S(2, 4 + i) = -p.up[i];
  }
  for (int r = 0; r < 3; ++r) {
    for (int q = 0; q < r; ++q) S.row(r) -= S.row(r).dot(S.row(q)) * S.row(q);
    double rn = S.row(r).norm();
    if (rn < 1e-14) throw std::domain_error("degenerate action directions");
    S.row(r) /= rn;
  }
  M.block<3, 8>(2, 0) = S;

  Eigen::JacobiSVD<Eigen::Matrix<double, 5, 8>> svd(M, Eigen::ComputeFullV);
  std::array<Tangent8, 3> basis;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 8; ++i) basis[k][i] = svd.matrixV()(i, 5 + k);
  return basis;
}

std::array<double, 6> eta_differential(const RealLocusPoint& p, const Tangent8& t) {
  Frame<double> f{p.u, p.up};
  std::array<double, 6> d{};
  for (int s = 0; s < 6; ++s) {
    auto [a, b] = pair_from_index(s);
    auto mg = minor_gradient(f, a, b);
    double acc = 0.0;
    for (int k = 0; k < 8; ++k) acc += mg[k] * t[k];
    d[s] = acc;
  }
  return d;
}

std::complex<double> fs_hermitian(const std::array<std::complex<double>, 6>& z,
                                  const std::array<std::complex<double>, 6>& a,
                                  const std::array<std::complex<double>, 6>& b) {
  auto herm = [](const std::array<std::complex<double>, 6>& x,
                 const std::array<std::complex<double>, 6>& y) {
    std::complex<double> s = 0.0;
    for (int i = 0; i < 6; ++i) s += x[i] * std::conj(y[i]);
    return s;
  };
  std::complex<double> zz = herm(z, z);
  return (herm(a, b) * zz - herm(a, z) * herm(z, b)) / (zz * zz);
}

double symplectic_pairing(const std::array<std::complex<double>, 6>& z,
                          const std::array<std::complex<double>, 6>& a,
                          const std::array<std::complex<double>, 6>& b) {
  double haa = fs_hermitian(z, a, a).real();
  double hbb = fs_hermitian(z, b, b).real();
  double den = std::sqrt(std::max(haa * hbb, 1e-300));
  return fs_hermitian(z, a, b).imag() / den;
}

double symplectic_residual(const RealLocusPoint& p, const std::array<Tangent8, 3>& basis) {
  std::array<std::complex<double>, 6> z;
  for (int i = 0; i < 6; ++i) z[i] = p.eta[i];
  std::array<std::array<std::complex<double>, 6>, 3> d;
  for (int k = 0; k < 3; ++k) {
    auto dk = eta_differential(p, basis[k]);
    for (int i = 0; i < 6; ++i) d[k][i] = dk[i];
  }
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      worst = std::max(worst, std::abs(symplectic_pairing(z, d[a], d[b])));
  return worst;
}

VolumePhase volume_form_phase(const CoefficientVector& cv, const LocusSplit& split,
                              const RealLocusPoint& p) {
  int best = 0;
  for (int t = 1; t < 6; ++t)
    if (std::abs(p.eta[t]) > std::abs(p.eta[best])) best = t;
  auto [i, j] = pair_from_index(best);
  Chart chart{i, j};

  ComplexFrame fc;
  for (int k = 0; k < 4; ++k) {
    fc.u[k] = p.u[k];
    fc.up[k] = p.up[k];
  }
  auto cp = chart_coords(fc, chart);
  HypersurfacePoint hp = make_hypersurface_point(cv, chart, cp.zeta);

  auto basis = locus_tangent_basis(split, p);
  auto dz = chart_coords_differential(Frame<double>{p.u, p.up}, chart);
  std::array<Tangent4, 3> tangents{};
  for (int k = 0; k < 3; ++k)
    for (int r = 0; r < 4; ++r) {
      double acc = 0.0;
      for (int c = 0; c < 8; ++c) acc += dz[r][c] * basis[k][c];
      tangents[k][r] = acc;
    }

  ResidueValue rv = residue_form(cv, hp, tangents);
  VolumePhase out;
  out.chart = chart;
  out.magnitude = std::abs(rv.value);
  out.deviation = std::abs(rv.value.imag()) / std::max(out.magnitude, 1e-300);
  out.phase = std::remainder(std::arg(rv.value), 3.14159265358979323846);
  out.pivot_agreement = rv.pivot_agreement;
  return out;
}

namespace {

std::array<double, 3> cross3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm3(const std::array<double, 3>& a) {
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

const LocusSplit& eq1_split() {
  static const LocusSplit s = LocusSplit::direct(CoefficientVector::preset("eq1"));
  return s;
}

}  // namespace

std::array<double, 3> base_projection(const RealLocusPoint& p) {
  std::array<double, 3> w = {p.u[1], p.u[2], p.u[3]};
  std::array<double, 3> wp = {p.up[1], p.up[2], p.up[3]};
  auto v = cross3(w, wp);
  double n = norm3(v);
  if (n < 1e-12) throw std::domain_error("spatial parts are collinear");
  for (double& x : v) x /= n;
  double mx = std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
  for (double x : v) {
    if (std::abs(x) > 0.1 * mx) {
      if (x < 0)
        for (double& y : v) y = -y;
      break;
    }
  }
  return v;
}

void normalize_base_pair(std::array<double, 3>& w, std::array<double, 3>& wp) {
  auto v = cross3(w, wp);
  double n = norm3(v);
  if (n < 1e-10 * std::max(norm3(w) * norm3(wp), 1e-30))
    throw std::invalid_argument("base pair is degenerate");
  double qn = v[0] * v[0] * v[0] * v[0] + v[1] * v[1] * v[1] * v[1] + v[2] * v[2] * v[2] * v[2];
  double t = std::pow(qn, -1.0 / 8.0);
  for (double& x : w) x *= t;
  for (double& x : wp) x *= t;
}

RealLocusPoint fiber_point(const std::array<double, 3>& w, const std::array<double, 3>& wp,
                           double theta) {
  auto v = cross3(w, wp);
  std::array<double, 3> va = {v[0], v[1], v[2]};
  double qn = quartic_norm(va);
  if (std::abs(qn - 1.0) > 1e-9)
    throw std::invalid_argument("base pair is not normalized");
  double ct = std::cos(theta), st = std::sin(theta);
  std::array<double, 3> d = {ct * w[0] - st * wp[0], ct * w[1] - st * wp[1],
                             ct * w[2] - st * wp[2]};
  double qd = quartic_norm(d);
  double r = std::pow(qd, -0.25);
  std::array<double, 4> u = {r * st, w[0], w[1], w[2]};
  std::array<double, 4> up = {r * ct, wp[0], wp[1], wp[2]};
  return make_real_locus_point(eq1_split(), u, up);
}

std::vector<RealLocusPoint> fiber_samples(const std::array<double, 3>& w,
                                          const std::array<double, 3>& wp, size_t m) {
  if (m < 3) throw std::invalid_argument("fiber sampling needs at least 3 points");
  std::vector<RealLocusPoint> out;
  out.reserve(m);
  for (size_t k = 0; k < m; ++k)
    out.push_back(fiber_point(w, wp, 2.0 * 3.14159265358979323846 * double(k) / double(m)));
  return out;
}

}  // namespace grasslag
