#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "grasslag/grassmann.hpp"
#include "grasslag/rng.hpp"

using namespace grasslag;

namespace {

// mpq_class(n, d) keeps the raw pair; reduce it before exact comparisons
Rat ratq(long n, long d) {
  Rat q(n, d);
  q.canonicalize();
  return q;
}

RatFrame rand_rat_frame(RngStream& rng) {
  for (;;) {
    RatFrame f;
    for (int i = 0; i < 4; ++i) {
      f.u[i] = ratq(rng.integer(-9, 9), rng.integer(1, 7));
      f.up[i] = ratq(rng.integer(-9, 9), rng.integer(1, 7));
    }
    if (frame_has_rank2(f)) return f;
  }
}

std::array<Rat, 4> rand_gl2(RngStream& rng) {
  for (;;) {
    Rat a = ratq(rng.integer(-5, 5), rng.integer(1, 4));
    Rat b = ratq(rng.integer(-5, 5), rng.integer(1, 4));
    Rat c = ratq(rng.integer(-5, 5), rng.integer(1, 4));
    Rat d = ratq(rng.integer(-5, 5), rng.integer(1, 4));
    if (a * d - b * c != 0) return {a, b, c, d};
  }
}

}  // namespace

TEST_CASE("pair indexing is the fixed minor order") {
  CHECK(pair_index(0, 1) == 0);
  CHECK(pair_index(0, 2) == 1);
  CHECK(pair_index(0, 3) == 2);
  CHECK(pair_index(1, 2) == 3);
  CHECK(pair_index(1, 3) == 4);
  CHECK(pair_index(2, 3) == 5);
  for (int t = 0; t < 6; ++t) {
    auto [a, b] = pair_from_index(t);
    CHECK(pair_index(a, b) == t);
  }
}

TEST_CASE("pluecker of pinned frames") {
  RatFrame e01;
  e01.u = {Rat(1), Rat(0), Rat(0), Rat(0)};
  e01.up = {Rat(0), Rat(1), Rat(0), Rat(0)};
  auto eta = pluecker(e01);
  CHECK(eta == std::array<Rat, 6>{Rat(1), Rat(0), Rat(0), Rat(0), Rat(0), Rat(0)});

  RatFrame f;
  f.u = {Rat(0), Rat(1), Rat(0), Rat(0)};
  f.up = {Rat(1), Rat(0), Rat(1), Rat(0)};
  auto eta2 = pluecker(f);
  CHECK(eta2 == std::array<Rat, 6>{Rat(-1), Rat(0), Rat(0), Rat(1), Rat(0), Rat(0)});
}

TEST_CASE("quadric residual vanishes exactly on rational frames") {
  RngStream rng(21, 0);
  for (int trial = 0; trial < 150; ++trial) {
    auto f = rand_rat_frame(rng);
    CHECK(quadric_residual(pluecker(f)) == 0);
  }
}

TEST_CASE("pluecker point validation") {
  std::array<Rat, 6> good = {Rat(1), Rat(0), Rat(0), Rat(0), Rat(0), Rat(0)};
  CHECK_NOTHROW(PlueckerPoint<Rat>{good});
  std::array<Rat, 6> zero{};
  CHECK_THROWS_AS(PlueckerPoint<Rat>{zero}, std::invalid_argument);
  std::array<Rat, 6> offq = {Rat(1), Rat(0), Rat(0), Rat(0), Rat(0), Rat(1)};
  CHECK_THROWS_AS(PlueckerPoint<Rat>{offq}, std::invalid_argument);
}

TEST_CASE("frame action scales the minors by the determinant") {
  RngStream rng(22, 0);
  RatFrame f = rand_rat_frame(rng);

  auto same = frame_action(f, Rat(1), Rat(0), Rat(0), Rat(1));
  CHECK(pluecker(same) == pluecker(f));

  auto swapped = frame_action(f, Rat(0), Rat(1), Rat(1), Rat(0));
  auto eta = pluecker(f), etas = pluecker(swapped);
  for (int t = 0; t < 6; ++t) CHECK(etas[t] == -eta[t]);

  RatFrame e01;
  e01.u = {Rat(1), Rat(0), Rat(0), Rat(0)};
  e01.up = {Rat(0), Rat(1), Rat(0), Rat(0)};
  auto scaled = frame_action(e01, Rat(2), Rat(0), Rat(0), Rat(1));
  CHECK(pluecker(scaled) == std::array<Rat, 6>{Rat(2), Rat(0), Rat(0), Rat(0), Rat(0), Rat(0)});

  for (int trial = 0; trial < 60; ++trial) {
    RatFrame g = rand_rat_frame(rng);
    auto [a, b, c, d] = rand_gl2(rng);
    auto lhs = pluecker(frame_action(g, a, b, c, d));
    auto rhs = pluecker(g);
    Rat det = a * d - b * c;
    for (int t = 0; t < 6; ++t) CHECK(lhs[t] == det * rhs[t]);
  }

  CHECK_THROWS_AS(frame_action(f, Rat(1), Rat(2), Rat(2), Rat(4)), std::invalid_argument);
}

TEST_CASE("chart coordinates at pinned frames") {
  RatFrame e01;
  e01.u = {Rat(1), Rat(0), Rat(0), Rat(0)};
  e01.up = {Rat(0), Rat(1), Rat(0), Rat(0)};
  auto p = chart_coords(e01, Chart(0, 1));
  CHECK(p.zeta == std::array<Rat, 4>{Rat(0), Rat(0), Rat(0), Rat(0)});

  RatFrame f;
  f.u = {Rat(1), Rat(0), Rat(1), Rat(0)};
  f.up = {Rat(0), Rat(1), Rat(0), Rat(1)};
  auto q = chart_coords(f, Chart(0, 1));
  CHECK(q.zeta == std::array<Rat, 4>{Rat(0), Rat(1), Rat(1), Rat(0)});

  // e01 plane has zero (2,3) minor: outside chart U23
  CHECK_THROWS_AS(chart_coords(e01, Chart(2, 3)), std::domain_error);
}

TEST_CASE("chart coordinates are invariant under frame actions") {
  RngStream rng(23, 0);
  for (int trial = 0; trial < 60; ++trial) {
    RatFrame f = rand_rat_frame(rng);
    for (const Chart& ch : all_charts()) {
      if (frame_minor(f, ch.i, ch.j) == 0) continue;
      auto [a, b, c, d] = rand_gl2(rng);
      auto p1 = chart_coords(f, ch);
      auto p2 = chart_coords(frame_action(f, a, b, c, d), ch);
      CHECK(p1.zeta == p2.zeta);
    }
  }
}

TEST_CASE("reconstruction round trip is exact") {
  RngStream rng(24, 0);
  for (int trial = 0; trial < 100; ++trial) {
    ChartPoint<Rat> p;
    p.chart = all_charts()[size_t(rng.integer(0, 5))];
    for (int i = 0; i < 4; ++i) p.zeta[i] = ratq(rng.integer(-9, 9), rng.integer(1, 7));
    auto f = reconstruct_frame(p);
    auto q = chart_coords(f, p.chart);
    CHECK(q.zeta == p.zeta);
  }
}

TEST_CASE("model transition maps evaluate to the pinned values") {
  std::vector<Rat> pt = {Rat(1), Rat(2), Rat(3), Rat(4)};
  auto first = transition_first_type();
  std::array<Rat, 4> got;
  for (int i = 0; i < 4; ++i) got[i] = first[i].evaluate(pt);
  CHECK(got == std::array<Rat, 4>{Rat(-2), Rat(1), Rat(2), Rat(3)});

  std::vector<Rat> pt2 = {Rat(1), Rat(0), Rat(0), Rat(2)};
  auto second = transition_second_type();
  std::array<Rat, 4> got2;
  for (int i = 0; i < 4; ++i) got2[i] = second[i].evaluate(pt2);
  CHECK(got2 == std::array<Rat, 4>{Rat(-1), Rat(0), Rat(0), Rat(-1, 2)});
}

TEST_CASE("transitions agree with chart coordinates of reconstructed frames") {
  RngStream rng(25, 0);
  for (int trial = 0; trial < 60; ++trial) {
    ChartPoint<Rat> p;
    p.chart = all_charts()[size_t(rng.integer(0, 5))];
    for (int i = 0; i < 4; ++i) p.zeta[i] = ratq(rng.integer(-9, 9), rng.integer(1, 7));
    Chart target = all_charts()[size_t(rng.integer(0, 5))];
    auto f = reconstruct_frame(p);
    if (frame_minor(f, target.i, target.j) == 0) continue;
    auto via = transition(p, target);
    auto direct = chart_coords(f, target);
    CHECK(via.zeta == direct.zeta);
  }
  ChartPoint<Rat> p;
  p.chart = Chart(0, 1);
  p.zeta = {Rat(1), Rat(2), Rat(3), Rat(4)};
  CHECK(transition(p, Chart(0, 1)).zeta == p.zeta);
}

TEST_CASE("transition cocycle closes exactly") {
  RngStream rng(26, 0);
  int done = 0;
  for (int trial = 0; trial < 400 && done < 100; ++trial) {
    ChartPoint<Rat> p;
    p.chart = all_charts()[size_t(rng.integer(0, 5))];
    for (int i = 0; i < 4; ++i) p.zeta[i] = ratq(rng.integer(-9, 9), rng.integer(1, 7));
    Chart b = all_charts()[size_t(rng.integer(0, 5))];
    Chart c = all_charts()[size_t(rng.integer(0, 5))];
    auto f = reconstruct_frame(p);
    if (frame_minor(f, b.i, b.j) == 0 || frame_minor(f, c.i, c.j) == 0) continue;
    auto via = transition(transition(p, b), c);
    auto direct = transition(p, c);
    CHECK(via.zeta == direct.zeta);
    ++done;
  }
  CHECK(done == 100);
}

TEST_CASE("atlas jacobian certification") {
  AtlasJacobianReport rep = verify_transition_jacobians();
  CHECK(rep.all_pass);
  CHECK(rep.identities.size() == 34);

  bool saw_first = false, saw_second = false;
  for (const auto& id : rep.identities) {
    CHECK(id.pass);
    if (id.name == "atlas_first_type_det_eq_inv_z1^4") {
      saw_first = true;
      CHECK(id.rhs == "(1) / (z1^4)");
    }
    if (id.name == "atlas_second_type_det_eq_inv_D^4") {
      saw_second = true;
      Polynomial d4 = parse_expression("(z1*z4 - z2*z3)^4", zeta_vars());
      CHECK(id.rhs == RationalFunction(Polynomial::constant(zeta_vars(), 1), d4).str());
    }
  }
  CHECK(saw_first);
  CHECK(saw_second);

  AtlasJacobianReport bad = verify_transition_jacobians(true);
  CHECK(!bad.all_pass);
  size_t failures = 0;
  for (const auto& id : bad.identities)
    if (!id.pass) ++failures;
  CHECK(failures > 0);
}

TEST_CASE("model map determinants keep their signs") {
  RationalFunction dfirst = jacobian_determinant(transition_first_type());
  RationalFunction dsecond = jacobian_determinant(transition_second_type());
  const auto& vars = zeta_vars();
  Polynomial one = Polynomial::constant(vars, 1);
  Polynomial z1 = Polynomial::variable(vars, 0);
  Polynomial D = parse_expression("z1*z4 - z2*z3", vars);
  CHECK(dfirst.equals(RationalFunction(-one, z1.pow(4))));
  CHECK(!dfirst.equals(RationalFunction(one, z1.pow(4))));
  CHECK(dsecond.equals(RationalFunction(one, D.pow(4))));
}

TEST_CASE("chart coordinate differential matches finite differences") {
  RngStream rng(27, 0);
  for (int trial = 0; trial < 10; ++trial) {
    RealFrame f;
    for (int i = 0; i < 4; ++i) {
      f.u[i] = rng.gauss();
      f.up[i] = rng.gauss();
    }
    Chart ch(0, 1);
    if (std::abs(frame_minor(f, 0, 1)) < 0.3) continue;
    auto J = chart_coords_differential(f, ch);
    const double h = 1e-6;
    for (int w = 0; w < 8; ++w) {
      RealFrame fp = f, fm = f;
      (w < 4 ? fp.u[w] : fp.up[w - 4]) += h;
      (w < 4 ? fm.u[w] : fm.up[w - 4]) -= h;
      auto zp = chart_coords(fp, ch).zeta;
      auto zm = chart_coords(fm, ch).zeta;
      for (int r = 0; r < 4; ++r) {
        double fd = (zp[r] - zm[r]) / (2 * h);
        CHECK(std::abs(fd - J[r][w]) < 1e-6 * (1.0 + std::abs(fd)));
      }
    }
  }
}

TEST_CASE("minor gradient matches finite differences") {
  RngStream rng(28, 0);
  RealFrame f;
  for (int i = 0; i < 4; ++i) {
    f.u[i] = rng.gauss();
    f.up[i] = rng.gauss();
  }
  const double h = 1e-6;
  for (int t = 0; t < 6; ++t) {
    auto [a, b] = pair_from_index(t);
    auto g = minor_gradient(f, a, b);
    for (int w = 0; w < 8; ++w) {
      RealFrame fp = f, fm = f;
      (w < 4 ? fp.u[w] : fp.up[w - 4]) += h;
      (w < 4 ? fm.u[w] : fm.up[w - 4]) -= h;
      double fd = (frame_minor(fp, a, b) - frame_minor(fm, a, b)) / (2 * h);
      CHECK(std::abs(fd - g[w]) < 1e-7 * (1.0 + std::abs(fd)));
    }
  }
}

TEST_CASE("chart bookkeeping") {
  CHECK(Chart(0, 1).name() == "U01");
  CHECK(Chart(2, 3).complement() == std::pair<int, int>(0, 1));
  CHECK(Chart(0, 2).complement() == std::pair<int, int>(1, 3));
  CHECK_THROWS_AS(Chart(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Chart(0, 4), std::invalid_argument);
  CHECK(all_charts().size() == 6);
  CHECK(chart_from_index(5) == Chart(2, 3));
}
