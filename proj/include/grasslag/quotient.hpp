#pragma once

#include <array>
#include <utility>

#include "grasslag/reallocus.hpp"

namespace grasslag {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Quat = std::array<double, 4>;  // (w, x, y, z), rotation v -> q v conj(q)

// u = (eta0, eta1, eta2), v = (eta5, -eta4, eta3). The quadric residual of
// eta equals u . v, so it must vanish (1e-9 relative to max|eta|^2) for the
// pair to be a genuine orthogonal split; throws otherwise.
std::pair<Vec3, Vec3> uv_split(const std::array<double, 6>& eta);

// Rotation with columns (u/|u|, v/|v|, (u/|u|) x (v/|v|)). Throws if either
// norm is below 1e-12 or if u . v exceeds 1e-10 relative. Det +1.
Mat3 so3_matrix(const Vec3& u, const Vec3& v);

// One of the two unit quaternion lifts of a rotation matrix.
Quat quaternion_lift(const Mat3& R);

Mat3 quaternion_rotation(const Quat& q);

Quat qmul(const Quat& a, const Quat& b);

inline Quat quat_k() { return {0.0, 0.0, 0.0, 1.0}; }

// {q, -q, qk, -qk}: the lifts reaching the same base configuration. qk and
// -qk rotate to R * diag(-1,-1,1).
std::array<Quat, 4> z4_coset(const Quat& q);

// Hausdorff distance between two quaternion 4-sets in R^4.
double coset_distance(const std::array<Quat, 4>& a, const std::array<Quat, 4>& b);

struct BundleCheck {
  double base_discrepancy = 0.0;    // spatial route vs Pluecker route to the base line
  double column_discrepancy = 0.0;  // first column of the rotation vs normalized u
};

BundleCheck bundle_projection_consistency(const RealLocusPoint& p);

}  // namespace grasslag
