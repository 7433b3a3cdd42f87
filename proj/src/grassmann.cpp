#include "grasslag/grassmann.hpp"

#include <map>
#include <mutex>

namespace grasslag {

namespace {
constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
}

int pair_index(int a, int b) {
  for (int t = 0; t < 6; ++t)
    if (kPairs[t][0] == a && kPairs[t][1] == b) return t;
  throw std::invalid_argument("bad index pair");
}

std::pair<int, int> pair_from_index(int idx) {
  if (idx < 0 || idx > 5) throw std::invalid_argument("bad pair index");
  return {kPairs[idx][0], kPairs[idx][1]};
}

std::pair<int, int> Chart::complement() const {
  int out[2];
  int c = 0;
  for (int v = 0; v < 4; ++v)
    if (v != i && v != j) out[c++] = v;
  return {out[0], out[1]};
}

Chart chart_from_index(int idx) {
  auto [a, b] = pair_from_index(idx);
  return Chart(a, b);
}

std::vector<Chart> all_charts() {
  std::vector<Chart> cs;
  for (int t = 0; t < 6; ++t) cs.push_back(chart_from_index(t));
  return cs;
}

const std::vector<std::string>& zeta_vars() {
  static const std::vector<std::string> vars = {"z1", "z2", "z3", "z4"};
  return vars;
}

namespace {

Polynomial zvar(int k) { return Polynomial::variable(zeta_vars(), k); }

Polynomial zconst(long v) { return Polynomial::constant(zeta_vars(), Rat(v)); }

Polynomial det_poly() { return zvar(0) * zvar(3) - zvar(1) * zvar(2); }  // D = z1 z4 - z2 z3

// On the source chart (i,j) with complement (k,l), the six minors normalized by
// m(i,j) are polynomials in the chart coordinates:
//   m(i,j) -> 1, m(i,k) -> z1, m(i,l) -> z2,
//   m(j,k) -> -z3, m(j,l) -> -z4, m(k,l) -> -D.
// Antisymmetric in the index pair.
Polynomial source_minor(Chart source, int a, int b) {
  if (a == b) return zconst(0);
  if (a > b) return -source_minor(source, b, a);
  auto [k, l] = source.complement();
  int i = source.i, j = source.j;
  auto same = [](int x, int y, int p, int q) { return (x == p && y == q) || (x == q && y == p); };
  if (same(a, b, i, j)) return zconst(1);
  if (same(a, b, i, k)) return a == i ? zvar(0) : -zvar(0);
  if (same(a, b, i, l)) return a == i ? zvar(1) : -zvar(1);
  if (same(a, b, j, k)) return a == j ? -zvar(2) : zvar(2);
  if (same(a, b, j, l)) return a == j ? -zvar(3) : zvar(3);
  if (same(a, b, k, l)) return a == k ? -det_poly() : det_poly();
  throw std::logic_error("unreachable minor pair");
}

}  // namespace

std::array<RationalFunction, 4> transition_map(Chart source, Chart target) {
  auto [tk, tl] = target.complement();
  Polynomial piv = source_minor(source, target.i, target.j);
  if (piv.is_zero()) throw std::logic_error("degenerate transition pivot");
  std::array<RationalFunction, 4> out = {
      RationalFunction(source_minor(source, target.i, tk), piv),
      RationalFunction(source_minor(source, target.i, tl), piv),
      RationalFunction(source_minor(source, tk, target.j), piv),
      RationalFunction(source_minor(source, tl, target.j), piv),
  };
  return out;
}

const TransitionDifferential& transition_differential(Chart source, Chart target) {
  static std::map<std::pair<int, int>, TransitionDifferential> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(source.index(), target.index());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  TransitionDifferential d;
  d.map = transition_map(source, target);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) d.jac[i][j] = d.map[i].derivative(j);
  return cache.emplace(key, std::move(d)).first->second;
}

std::array<RationalFunction, 4> transition_first_type() {
  Polynomial one = zconst(1);
  return {
      RationalFunction(-zvar(1), zvar(0)),      // -z2/z1
      RationalFunction(one, zvar(0)),           // 1/z1
      RationalFunction(-det_poly(), zvar(0)),   // -D/z1
      RationalFunction(zvar(2), zvar(0)),       // z3/z1
  };
}

std::array<RationalFunction, 4> transition_second_type() {
  Polynomial d = det_poly();
  return {
      RationalFunction(-zvar(3), d),  // -z4/D
      RationalFunction(zvar(1), d),   // z2/D
      RationalFunction(zvar(2), d),   // z3/D
      RationalFunction(-zvar(0), d),  // -z1/D
  };
}

namespace {

AtlasIdentity check_det(const std::string& name, const std::array<RationalFunction, 4>& map,
                        const RationalFunction& expected) {
  RationalFunction det = jacobian_determinant(map);
  AtlasIdentity id;
  id.name = name;
  id.lhs = det.str();
  id.rhs = expected.str();
  id.pass = det.equals(expected);
  return id;
}

}  // namespace

AtlasJacobianReport verify_transition_jacobians(bool corrupt_first_type) {
  AtlasJacobianReport rep;
  Polynomial one = zconst(1);
  RationalFunction inv_z1_4(one, zvar(0).pow(4));
  RationalFunction inv_d4(one, det_poly().pow(4));

  auto first = transition_map(Chart(0, 1), Chart(0, 2));
  if (corrupt_first_type) first[2] = -first[2];  // test hook: breaks the determinant identity
  rep.identities.push_back(check_det("atlas_first_type_det_eq_inv_z1^4", first, inv_z1_4));
  rep.identities.push_back(
      check_det("atlas_second_type_det_eq_inv_D^4", transition_map(Chart(0, 1), Chart(2, 3)), inv_d4));
  rep.identities.push_back(
      check_det("model_first_type_det_eq_minus_inv_z1^4", transition_first_type(),
                RationalFunction(-one, zvar(0).pow(4))));
  rep.identities.push_back(
      check_det("model_second_type_det_eq_inv_D^4", transition_second_type(), inv_d4));

  // Every ordered chart pair: det equals the inverse fourth power of the
  // target pivot minor expressed on the source chart (sign dies in the power).
  for (const Chart& a : all_charts()) {
    for (const Chart& b : all_charts()) {
      if (a == b) continue;
      RationalFunction expected(one, source_minor(a, b.i, b.j).pow(4));
      rep.identities.push_back(check_det("atlas_det_" + a.name() + "_to_" + b.name(),
                                         transition_map(a, b), expected));
    }
  }

  rep.all_pass = true;
  for (const auto& id : rep.identities)
    if (!id.pass) rep.all_pass = false;
  return rep;
}

std::array<double, 8> minor_gradient(const Frame<double>& f, int a, int b) {
  // m(a,b) = u[a] up[b] - u[b] up[a]
  std::array<double, 8> g{};
  g[a] += f.up[b];
  g[b] -= f.up[a];
  g[4 + b] += f.u[a];
  g[4 + a] -= f.u[b];
  return g;
}

std::array<std::array<double, 8>, 4> chart_coords_differential(const Frame<double>& f, Chart chart) {
  auto [k, l] = chart.complement();
  double piv = frame_minor(f, chart.i, chart.j);
  if (std::abs(piv) == 0.0) throw std::domain_error("frame is outside chart " + chart.name());
  auto piv_grad = minor_gradient(f, chart.i, chart.j);

  auto signed_minor = [&](int a, int b) {
    return a < b ? frame_minor(f, a, b) : -frame_minor(f, b, a);
  };
  auto signed_grad = [&](int a, int b) {
    auto g = minor_gradient(f, std::min(a, b), std::max(a, b));
    if (a > b)
      for (double& x : g) x = -x;
    return g;
  };

  const int nums[4][2] = {{chart.i, k}, {chart.i, l}, {k, chart.j}, {l, chart.j}};
  std::array<std::array<double, 8>, 4> out{};
  for (int c = 0; c < 4; ++c) {
    double m = signed_minor(nums[c][0], nums[c][1]);
    auto mg = signed_grad(nums[c][0], nums[c][1]);
    for (int x = 0; x < 8; ++x) out[c][x] = (mg[x] * piv - m * piv_grad[x]) / (piv * piv);
  }
  return out;
}

}  // namespace grasslag
