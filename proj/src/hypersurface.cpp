#include "grasslag/hypersurface.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>

#include "grasslag/parallel.hpp"
#include "grasslag/rng.hpp"

namespace grasslag {

CoefficientVector::CoefficientVector(const std::array<Rat, 6>& coeffs) : c(coeffs) {
  bool pos = false, neg = false;
  for (const Rat& x : c) {
    if (x == 0) throw std::invalid_argument("coefficient vector entries must be nonzero");
    if (x > 0) pos = true;
    if (x < 0) neg = true;
  }
  if (!pos || !neg)
    throw std::invalid_argument("coefficient vector needs at least one entry of each sign");
}

CoefficientVector CoefficientVector::from_strings(const std::array<std::string, 6>& txt) {
  std::array<Rat, 6> c;
  for (int i = 0; i < 6; ++i) c[i] = parse_rational(txt[i]);
  return CoefficientVector(c);
}

CoefficientVector CoefficientVector::preset(const std::string& name) {
  if (name == "eq1") return CoefficientVector({Rat(1), Rat(1), Rat(1), Rat(-1), Rat(-1), Rat(-1)});
  if (name == "eq7") return CoefficientVector({Rat(1), Rat(-1), Rat(-1), Rat(-1), Rat(-1), Rat(-2)});
  if (name == "eq8") return CoefficientVector({Rat(1), Rat(1), Rat(-1), Rat(-2), Rat(-2), Rat(-2)});
  throw std::invalid_argument("unknown preset '" + name + "' (expected eq1, eq7, or eq8)");
}

std::array<std::string, 6> CoefficientVector::str() const {
  std::array<std::string, 6> out;
  for (int i = 0; i < 6; ++i) out[i] = rat_str(c[i]);
  return out;
}

Polynomial chart_expression(const CoefficientVector& cv, Chart chart) {
  auto [k, l] = chart.complement();
  int i = chart.i, j = chart.j;
  auto pi = [](int a, int b) { return pair_index(std::min(a, b), std::max(a, b)); };
  const auto& vars = zeta_vars();
  Polynomial d = Polynomial::variable(vars, 0) * Polynomial::variable(vars, 3) -
                 Polynomial::variable(vars, 1) * Polynomial::variable(vars, 2);
  Polynomial f = Polynomial::constant(vars, cv.c[pi(i, j)]);
  f += cv.c[pi(i, k)] * Polynomial::variable(vars, 0).pow(4);
  f += cv.c[pi(i, l)] * Polynomial::variable(vars, 1).pow(4);
  f += cv.c[pi(j, k)] * Polynomial::variable(vars, 2).pow(4);
  f += cv.c[pi(j, l)] * Polynomial::variable(vars, 3).pow(4);
  f += cv.c[pi(k, l)] * d.pow(4);
  return f;
}

std::array<Polynomial, 4> gradient_system(const CoefficientVector& cv, Chart chart) {
  Polynomial f = chart_expression(cv, chart);
  Rat quarter(1, 4);
  std::array<Polynomial, 4> g;
  for (size_t v = 0; v < 4; ++v) g[v] = f.derivative(v) * quarter;
  return g;
}

namespace {

using cplx = std::complex<double>;

double coeff_scale(const CoefficientVector& cv) {
  double m = 0.0;
  for (const Rat& x : cv.c) m = std::max(m, std::abs(rat_d(x)));
  return m;
}

double point_scale(const CoefficientVector& cv, const std::array<cplx, 4>& zeta) {
  double z = 0.0;
  for (const auto& x : zeta) z = std::max(z, std::abs(x));
  double z4 = z * z;
  z4 *= z4;
  return 1.0 + z4 * coeff_scale(cv);
}

// Flat evaluator for hot loops.
struct Compiled {
  struct Term {
    double c;
    std::array<uint8_t, 4> e;
  };
  std::vector<Term> terms;

  static Compiled from(const Polynomial& p) {
    Compiled out;
    for (const auto& [e, c] : p.terms()) {
      Term t;
      t.c = rat_d(c);
      for (int i = 0; i < 4; ++i) t.e[i] = static_cast<uint8_t>(e[i]);
      out.terms.push_back(t);
    }
    return out;
  }

  cplx eval(const std::array<std::array<cplx, 9>, 4>& pw) const {
    cplx s = 0.0;
    for (const Term& t : terms) s += t.c * pw[0][t.e[0]] * pw[1][t.e[1]] * pw[2][t.e[2]] * pw[3][t.e[3]];
    return s;
  }
};

struct CompiledSystem {
  Compiled f;
  std::array<Compiled, 4> grad;
  std::array<std::array<Compiled, 4>, 4> hess;

  static CompiledSystem from(const Polynomial& fp) {
    CompiledSystem s;
    s.f = Compiled::from(fp);
    std::array<Polynomial, 4> g;
    for (size_t v = 0; v < 4; ++v) {
      g[v] = fp.derivative(v);
      s.grad[v] = Compiled::from(g[v]);
    }
    for (size_t a = 0; a < 4; ++a)
      for (size_t b = 0; b < 4; ++b) s.hess[a][b] = Compiled::from(g[a].derivative(b));
    return s;
  }
};

std::array<std::array<cplx, 9>, 4> power_table(const std::array<cplx, 4>& z) {
  std::array<std::array<cplx, 9>, 4> pw;
  for (int i = 0; i < 4; ++i) {
    pw[i][0] = 1.0;
    for (int k = 1; k <= 8; ++k) pw[i][k] = pw[i][k - 1] * z[i];
  }
  return pw;
}

struct StartOutcome {
  double final_residual = 0.0;
  bool witness = false;
  std::array<cplx, 4> zeta{};
};

// Damped Gauss-Newton on {f = 0, grad f = 0} from one start.
StartOutcome run_start(const CompiledSystem& sys, uint64_t seed, uint64_t index) {
  RngStream rng(seed, index);
  std::array<cplx, 4> z;
  for (int i = 0; i < 4; ++i) {
    double r = 2.0 * std::sqrt(rng.uniform());
    double a = 6.283185307179586 * rng.uniform();
    z[i] = cplx(r * std::cos(a), r * std::sin(a));
  }

  auto residual_vec = [&](const std::array<cplx, 4>& p, Eigen::Matrix<cplx, 5, 1>& F) {
    auto pw = power_table(p);
    F(0) = sys.f.eval(pw);
    for (int i = 0; i < 4; ++i) F(i + 1) = sys.grad[i].eval(pw);
  };

  Eigen::Matrix<cplx, 5, 1> F;
  residual_vec(z, F);
  double res = F.norm();
  for (int iter = 0; iter < 100; ++iter) {
    if (res < 1e-13) break;
    auto pw = power_table(z);
    Eigen::Matrix<cplx, 5, 4> J;
    for (int j = 0; j < 4; ++j) J(0, j) = sys.grad[j].eval(pw);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) J(i + 1, j) = sys.hess[i][j].eval(pw);
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 5, 4>> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-13);
    Eigen::Matrix<cplx, 4, 1> step = svd.solve(-F);
    double stepn = step.norm();
    double zn = 0.0;
    for (const auto& x : z) zn += std::norm(x);
    if (stepn < 1e-15 * (1.0 + std::sqrt(zn))) break;

    double alpha = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 25; ++bt) {
      std::array<cplx, 4> trial;
      for (int i = 0; i < 4; ++i) trial[i] = z[i] + alpha * step(i);
      Eigen::Matrix<cplx, 5, 1> Ft;
      residual_vec(trial, Ft);
      double rt = Ft.norm();
      if (rt < (1.0 - 1e-4 * alpha) * res) {
        z = trial;
        F = Ft;
        res = rt;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }

  StartOutcome out;
  out.zeta = z;
  double inf = std::abs(F(0));
  for (int i = 1; i < 5; ++i) inf = std::max(inf, std::abs(F(i)));
  out.final_residual = inf;
  out.witness = inf < 1e-10;
  return out;
}

SmoothnessReport search_impl(const CompiledSystem& sys, const std::string& label, size_t n_starts,
                             uint64_t seed) {
  std::vector<StartOutcome> outcomes(n_starts);
  parallel_for(n_starts, [&](size_t i) { outcomes[i] = run_start(sys, seed, i); });

  SmoothnessReport rep;
  rep.chart = label;
  rep.starts = n_starts;
  std::vector<double> res(n_starts);
  for (size_t i = 0; i < n_starts; ++i) {
    res[i] = outcomes[i].final_residual;
    if (outcomes[i].witness)
      rep.witnesses.push_back({i, outcomes[i].zeta, outcomes[i].final_residual});
  }
  std::sort(res.begin(), res.end());
  if (!res.empty()) {
    rep.min_residual = res.front();
    rep.p25_residual = res[res.size() / 4];
    rep.median_residual = res[res.size() / 2];
  }
  return rep;
}

}  // namespace

SmoothnessReport smoothness_search(const CoefficientVector& cv, Chart chart, size_t n_starts,
                                   uint64_t seed) {
  CompiledSystem sys = CompiledSystem::from(chart_expression(cv, chart));
  return search_impl(sys, chart.name(), n_starts, seed);
}

SmoothnessReport smoothness_search_system(const Polynomial& f, size_t n_starts, uint64_t seed) {
  if (f.variables() != zeta_vars())
    throw std::invalid_argument("smoothness_search_system expects the chart variables");
  CompiledSystem sys = CompiledSystem::from(f);
  return search_impl(sys, "custom", n_starts, seed);
}

HypersurfacePoint make_hypersurface_point(const CoefficientVector& cv, Chart chart,
                                          const std::array<cplx, 4>& zeta) {
  Polynomial f = chart_expression(cv, chart);
  std::vector<cplx> pt(zeta.begin(), zeta.end());
  double r = std::abs(f.evaluate(pt));
  if (r > 1e-10 * point_scale(cv, zeta))
    throw std::invalid_argument("point does not satisfy the hypersurface equation");
  return HypersurfacePoint{chart, zeta, r};
}

namespace {

std::array<cplx, 4> gradient_at(const CoefficientVector& cv, Chart chart,
                                const std::array<cplx, 4>& zeta) {
  Polynomial f = chart_expression(cv, chart);
  std::vector<cplx> pt(zeta.begin(), zeta.end());
  std::array<cplx, 4> d;
  for (size_t v = 0; v < 4; ++v) d[v] = f.derivative(v).evaluate(pt);
  return d;
}

cplx det3c(const std::array<std::array<cplx, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

cplx residue_with_pivot(const std::array<cplx, 4>& d, const std::array<Tangent4, 3>& t, int piv) {
  int rows[3];
  int rc = 0;
  for (int r = 0; r < 4; ++r)
    if (r != piv) rows[rc++] = r;
  std::array<std::array<cplx, 3>, 3> m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = t[c][rows[r]];
  double sign = (piv % 2 == 0) ? -1.0 : 1.0;  // gamma ^ df = + dz1^dz2^dz3^dz4
  return sign * det3c(m) / d[piv];
}

}  // namespace

ResidueValue residue_form(const CoefficientVector& cv, const HypersurfacePoint& p,
                          const std::array<Tangent4, 3>& tangents, int force_pivot) {
  auto d = gradient_at(cv, p.chart, p.zeta);
  double dmax = 0.0;
  for (const auto& x : d) dmax = std::max(dmax, std::abs(x));
  if (dmax < 1e-8) throw std::domain_error("all partials vanish: singular point");

  double dnorm = 0.0;
  for (const auto& x : d) dnorm += std::norm(x);
  dnorm = std::sqrt(dnorm);
  for (const auto& t : tangents) {
    cplx pair = 0.0;
    double tn = 0.0;
    for (int i = 0; i < 4; ++i) {
      pair += d[i] * t[i];
      tn += std::norm(t[i]);
    }
    tn = std::sqrt(tn);
    if (std::abs(pair) > 1e-8 * dnorm * std::max(tn, 1e-300))
      throw std::invalid_argument("tangent vector does not annihilate df");
  }

  int best = 0, second = -1;
  for (int i = 1; i < 4; ++i)
    if (std::abs(d[i]) > std::abs(d[best])) best = i;
  for (int i = 0; i < 4; ++i) {
    if (i == best) continue;
    if (second < 0 || std::abs(d[i]) > std::abs(d[second])) second = i;
  }
  int piv = force_pivot >= 0 ? force_pivot : best;
  if (force_pivot >= 0 && std::abs(d[piv]) < 1e-8)
    throw std::domain_error("forced pivot partial is numerically zero");
  int alt = (piv == best) ? second : best;

  ResidueValue rv;
  rv.pivot = piv;
  rv.value = residue_with_pivot(d, tangents, piv);
  if (alt >= 0 && std::abs(d[alt]) > 1e-8) {
    cplx v2 = residue_with_pivot(d, tangents, alt);
    rv.pivot_agreement =
        std::abs(rv.value - v2) / std::max({std::abs(rv.value), std::abs(v2), 1e-300});
  } else {
    rv.pivot_agreement = 0.0;
  }
  return rv;
}

std::array<Tangent4, 3> hypersurface_tangent_basis(const CoefficientVector& cv,
                                                   const HypersurfacePoint& p) {
  auto d = gradient_at(cv, p.chart, p.zeta);
  int q = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(d[i]) > std::abs(d[q])) q = i;
  if (std::abs(d[q]) < 1e-8) throw std::domain_error("all partials vanish: singular point");

  std::array<Tangent4, 3> t{};
  int idx = 0;
  for (int r = 0; r < 4; ++r) {
    if (r == q) continue;
    Tangent4 v{};
    v[r] = 1.0;
    v[q] = -d[r] / d[q];
    t[idx++] = v;
  }
  // complex Gram-Schmidt for conditioning; stays inside ker(df)
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < a; ++b) {
      cplx proj = 0.0;
      for (int i = 0; i < 4; ++i) proj += t[a][i] * std::conj(t[b][i]);
      for (int i = 0; i < 4; ++i) t[a][i] -= proj * t[b][i];
    }
    double n = 0.0;
    for (int i = 0; i < 4; ++i) n += std::norm(t[a][i]);
    n = std::sqrt(n);
    for (int i = 0; i < 4; ++i) t[a][i] /= n;
  }
  return t;
}

double residue_chart_consistency(const CoefficientVector& cv, const HypersurfacePoint& p,
                                 Chart other) {
  if (p.chart == other) {
    auto t = hypersurface_tangent_basis(cv, p);
    ResidueValue a = residue_form(cv, p, t);
    return 0.0 * std::abs(a.value);
  }
  auto t = hypersurface_tangent_basis(cv, p);
  const TransitionDifferential& td = transition_differential(p.chart, other);
  std::vector<cplx> at(p.zeta.begin(), p.zeta.end());

  std::array<cplx, 4> image;
  for (int i = 0; i < 4; ++i) image[i] = td.map[i].evaluate(at);
  std::array<std::array<cplx, 4>, 4> J;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) J[i][j] = td.jac[i][j].evaluate(at);

  std::array<Tangent4, 3> pushed{};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 4; ++i) {
      cplx s = 0.0;
      for (int j = 0; j < 4; ++j) s += J[i][j] * t[c][j];
      pushed[c][i] = s;
    }

  HypersurfacePoint q = make_hypersurface_point(cv, other, image);
  ResidueValue va = residue_form(cv, p, t);
  ResidueValue vb = residue_form(cv, q, pushed);
  return std::abs(va.value - vb.value) /
         std::max({std::abs(va.value), std::abs(vb.value), 1e-300});
}

HypersurfacePoint solve_on_hypersurface(const CoefficientVector& cv, Chart chart, uint64_t seed,
                                        uint64_t index) {
  Polynomial f = chart_expression(cv, chart);
  Polynomial d1 = f.derivative(0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    RngStream rng(seed, index * 97ull + attempt);
    std::array<cplx, 4> z;
    for (int i = 0; i < 4; ++i) {
      double r = 0.35 + 0.85 * rng.uniform();
      double a = 6.283185307179586 * rng.uniform();
      z[i] = cplx(r * std::cos(a), r * std::sin(a));
    }
    bool ok = false;
    for (int iter = 0; iter < 80; ++iter) {
      std::vector<cplx> pt(z.begin(), z.end());
      cplx fv = f.evaluate(pt);
      if (std::abs(fv) < 1e-13 * point_scale(cv, z)) {
        ok = true;
        break;
      }
      cplx dv = d1.evaluate(pt);
      if (std::abs(dv) < 1e-12) break;
      z[0] -= fv / dv;
      if (std::abs(z[0]) > 50.0) break;
    }
    if (ok) return make_hypersurface_point(cv, chart, z);
  }
  throw std::runtime_error("failed to locate a hypersurface point");
}

}  // namespace grasslag
