#include "grasslag/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grasslag {

namespace {

double norm3(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

std::pair<Vec3, Vec3> uv_split(const std::array<double, 6>& eta) {
  double mx = 0.0;
  for (double e : eta) mx = std::max(mx, std::abs(e));
  if (mx <= 0.0) throw std::invalid_argument("zero Pluecker vector");
  double q = quadric_residual(eta);
  if (std::abs(q) > 1e-9 * mx * mx)
    throw std::invalid_argument("Pluecker vector violates the quadric relation");
  Vec3 u = {eta[0], eta[1], eta[2]};
  Vec3 v = {eta[5], -eta[4], eta[3]};
  return {u, v};
}

Mat3 so3_matrix(const Vec3& u, const Vec3& v) {
  double nu = norm3(u), nv = norm3(v);
  if (nu < 1e-12 || nv < 1e-12) throw std::invalid_argument("degenerate column vector");
  double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  if (std::abs(dot) > 1e-10 * nu * nv)
    throw std::invalid_argument("columns are not orthogonal");
  Vec3 c0 = {u[0] / nu, u[1] / nu, u[2] / nu};
  Vec3 c1 = {v[0] / nv, v[1] / nv, v[2] / nv};
  Vec3 c2 = cross3(c0, c1);
  Mat3 R;
  for (int i = 0; i < 3; ++i) {
    R[i][0] = c0[i];
    R[i][1] = c1[i];
    R[i][2] = c2[i];
  }
  return R;
}

Quat quaternion_lift(const Mat3& R) {
  double tr = R[0][0] + R[1][1] + R[2][2];
  Quat q;
  if (tr > 0.0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    q = {0.25 * s, (R[2][1] - R[1][2]) / s, (R[0][2] - R[2][0]) / s, (R[1][0] - R[0][1]) / s};
  } else if (R[0][0] > R[1][1] && R[0][0] > R[2][2]) {
    double s = std::sqrt(1.0 + R[0][0] - R[1][1] - R[2][2]) * 2.0;
    q = {(R[2][1] - R[1][2]) / s, 0.25 * s, (R[0][1] + R[1][0]) / s, (R[0][2] + R[2][0]) / s};
  } else if (R[1][1] > R[2][2]) {
    double s = std::sqrt(1.0 + R[1][1] - R[0][0] - R[2][2]) * 2.0;
    q = {(R[0][2] - R[2][0]) / s, (R[0][1] + R[1][0]) / s, 0.25 * s, (R[1][2] + R[2][1]) / s};
  } else {
    double s = std::sqrt(1.0 + R[2][2] - R[0][0] - R[1][1]) * 2.0;
    q = {(R[1][0] - R[0][1]) / s, (R[0][2] + R[2][0]) / s, (R[1][2] + R[2][1]) / s, 0.25 * s};
  }
  double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  for (double& x : q) x /= n;
  return q;
}

Mat3 quaternion_rotation(const Quat& q) {
  double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 R;
  R[0] = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)};
  R[1] = {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)};
  R[2] = {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)};
  return R;
}

Quat qmul(const Quat& a, const Quat& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

std::array<Quat, 4> z4_coset(const Quat& q) {
  Quat qk = qmul(q, quat_k());
  Quat mq = {-q[0], -q[1], -q[2], -q[3]};
  Quat mqk = {-qk[0], -qk[1], -qk[2], -qk[3]};
  return {q, mq, qk, mqk};
}

double coset_distance(const std::array<Quat, 4>& a, const std::array<Quat, 4>& b) {
  auto directed = [](const std::array<Quat, 4>& from, const std::array<Quat, 4>& to) {
    double worst = 0.0;
    for (const Quat& p : from) {
      double best = 1e300;
      for (const Quat& r : to) {
        double d = 0.0;
        for (int i = 0; i < 4; ++i) d += (p[i] - r[i]) * (p[i] - r[i]);
        best = std::min(best, std::sqrt(d));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

BundleCheck bundle_projection_consistency(const RealLocusPoint& p) {
  BundleCheck out;

  auto frame_route = base_projection(p);
  auto [u, v] = uv_split(p.eta);
  double nv = norm3(v);
  if (nv < 1e-12) throw std::domain_error("degenerate base direction");
  Vec3 pv = {v[0] / nv, v[1] / nv, v[2] / nv};
  double mx = std::max({std::abs(pv[0]), std::abs(pv[1]), std::abs(pv[2])});
  for (double x : pv) {
    if (std::abs(x) > 0.1 * mx) {
      if (x < 0)
        for (double& y : pv) y = -y;
      break;
    }
  }
  double d = 0.0;
  for (int i = 0; i < 3; ++i) d += (frame_route[i] - pv[i]) * (frame_route[i] - pv[i]);
  out.base_discrepancy = std::sqrt(d);

  Mat3 R = so3_matrix(u, v);
  double nu = norm3(u);
  double dc = 0.0;
  for (int i = 0; i < 3; ++i) {
    double diff = R[i][0] - u[i] / nu;
    dc += diff * diff;
  }
  out.column_discrepancy = std::sqrt(dc);
  return out;
}

}  // namespace grasslag
