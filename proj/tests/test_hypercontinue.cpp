#include <doctest.h>

#include <random>

#include "flop/hypercontinue.hpp"

using namespace flop;
using namespace flop::hc;
using C = C128;
using R = C::value_type;

namespace {

double dabs(const C& x) { return static_cast<double>(R(bmp::abs(x))); }

C cx(double re, double im = 0) { return C(R(re), R(im)); }

HyperParams<C> binomial_params(const C& beta) { return HyperParams<C>{{C(0)}, {beta}}; }

// u-plane polygon from doubles
Vec<C> poly_path(std::initializer_list<std::pair<double, double>> pts) {
  Vec<C> v;
  for (auto [a, b] : pts) v.push_back(cx(a, b));
  return v;
}

}  // namespace

TEST_CASE("complex literals") {
  auto a = crat_from_string("1+2i");
  CHECK(a.re == 1);
  CHECK(a.im == 2);
  auto b = crat_from_string("-0.5-1i");
  CHECK(b.re == rat(-1, 2));
  CHECK(b.im == -1);
  CHECK(crat_from_string("2i").im == 2);
  CHECK(crat_from_string("-i").im == -1);
  CHECK(crat_from_string("3").re == 3);
}

TEST_CASE("series evaluation") {
  HyperParams<C> p{{cx(0.3), cx(-0.2)}, {cx(0.7), cx(0.1)}};
  auto j0 = eval_J_series(p, C(0), 3);
  CHECK(dabs(j0[0] - C(1)) < 1e-35);
  CHECK(dabs(j0[1]) < 1e-35);
  // (1 + y)^{1/2} at y = 0.21
  auto b = binomial_params(cx(0.5));
  auto v = eval_J_series(b, from_rat<C>(rat(21, 100)), 1);
  CHECK(dabs(v[0] - from_rat<C>(rat(11, 10))) < 1e-35);
  // theta J = y J' = 0.5 y / sqrt(1+y)
  CHECK(dabs(v[1] - from_rat<C>(rat(21, 100)) * from_rat<C>(rat(1, 2)) / from_rat<C>(rat(11, 10))) < 1e-35);
  CHECK_THROWS_AS(eval_J_series(b, cx(0.95), 1), NumericError);
}

TEST_CASE("coefficient ratios tend to 1") {
  std::mt19937 g(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 10; ++t) {
    HyperParams<C> p;
    for (int j = 0; j < 3; ++j) {
      p.alpha.push_back(cx(u(g), u(g)));
      p.beta.push_back(cx(u(g), u(g)));
    }
    int d = 5000;
    C num(1), den(1);
    for (int j = 0; j < 3; ++j) {
      num *= p.beta[j] - C(d);
      den *= p.alpha[j] + C(d + 1);
    }
    CHECK(std::abs(dabs(num / den) - 1) < 1e-2);
  }
}

TEST_CASE("ODE continuation agrees with the series inside the disk") {
  std::mt19937 g(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5), ang(-3, 3);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    int n = 1 + t % 4;
    HyperParams<C> p;
    for (int j = 0; j < n; ++j) {
      p.alpha.push_back(cx(u(g), u(g)));
      p.beta.push_back(cx(u(g), u(g)));
    }
    C u0 = cx(std::log(0.1), ang(g)), u1 = cx(std::log(0.6), ang(g));
    auto jet = eval_J_series(p, bmp::exp(u0), n);
    auto end = continue_J(p, Vec<C>{u0, u1}, jet);
    auto ref = eval_J_series(p, bmp::exp(u1), n);
    worst = std::max(worst, rel_diff(end, ref));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("n = 1 closed form along paths and monodromy") {
  C beta = from_rat<C>(rat(1, 2));
  auto p = binomial_params(beta);
  // along the real axis past y = 1: principal branch of sqrt(1 + y)
  auto path = poly_path({{std::log(0.2), 0}, {std::log(5.0), 0}});
  auto jet = continue_J(p, path, eval_J_series(p, bmp::exp(path[0]), 1));
  CHECK(dabs(jet[0] - bmp::sqrt(C(6))) < 1e-10);
  // general exponent along a gamma-type path at height 0
  C b2 = cx(0.3, 0.4);
  auto p2 = binomial_params(b2);
  auto path2 = poly_path({{std::log(0.1), 0}, {std::log(0.1), 0.5}, {std::log(10.0), 0.5}, {std::log(10.0), 0}});
  auto j2 = continue_J(p2, path2, eval_J_series(p2, bmp::exp(path2[0]), 1));
  CHECK(dabs(j2[0] - bmp::exp(b2 * bmp::log(C(11)))) < 1e-10);
  // a loop around y = -1 multiplies by e^{2 pi i / 2} = -1
  C pi = pi_c<C>();
  Vec<C> loop{cx(-1, -1) + i_c<C>() * pi, cx(1, -1) + i_c<C>() * pi, cx(1, 1) + i_c<C>() * pi,
              cx(-1, 1) + i_c<C>() * pi, cx(-1, -1) + i_c<C>() * pi};
  auto j0 = eval_J_series(p, bmp::exp(loop[0]), 1);
  auto j1 = continue_J(p, loop, j0);
  CHECK(dabs(j1[0] + j0[0]) < 1e-10);
  CHECK(dabs(j1[1] + j0[1]) < 1e-10);
}

TEST_CASE("monodromy eigenvalues do not depend on the basepoint") {
  HyperParams<C> p{{C(0), cx(0.37)}, {cx(0.21), cx(-0.43)}};
  int N = 3;
  C c = i_c<C>() * pi_c<C>() * C(2);  // singular point for n = 2
  auto mono = [&](const C& base) {
    // square loop through base around c
    C d = base - c;
    Vec<C> loop{base, c + d * i_c<C>(), c - d, c - d * i_c<C>(), base};
    Mat<C> M = mat_zero<C>(N, N);
    for (int col = 0; col < N; ++col) {
      Vec<C> e(N, C(0));
      e[col] = C(1);
      auto out = continue_J(p, loop, e);
      for (int r = 0; r < N; ++r) M[r][col] = out[r];
    }
    return M;
  };
  auto A = mono(c + cx(-0.8, -0.6)), B = mono(c + cx(0.5, 0.9));
  auto tr = [&](const Mat<C>& m) {
    C s(0);
    for (int i = 0; i < N; ++i) s += m[i][i];
    return s;
  };
  CHECK(dabs(tr(A) - tr(B)) < 1e-8);
  CHECK(dabs(tr(mat_mul(A, A)) - tr(mat_mul(B, B))) < 1e-8);
  CHECK(dabs(tr(mat_mul(mat_mul(A, A), A)) - tr(mat_mul(mat_mul(B, B), B))) < 1e-8);
}

TEST_CASE("homotopic paths agree") {
  HyperParams<C> p{{C(0), cx(0.31), cx(-0.52)}, {cx(0.13), cx(-0.44), cx(0.27)}};
  C pi = pi_c<C>();
  auto path_at = [&](double off) {
    C h = i_c<C>() * (pi * C(2) + cx(off));
    C a = cx(std::log(0.1)), b = cx(-std::log(0.1));
    return Vec<C>{a, a + h, b + h, b};
  };
  auto jet = eval_J_series(p, from_rat<C>(rat(1, 10)), 3);
  auto e1 = continue_J(p, path_at(0.2), jet), e2 = continue_J(p, path_at(-0.2), jet);
  CHECK(rel_diff(e1, e2) < 1e-30);
  // crossing into the next corridor changes the answer
  auto e3 = continue_J(p, path_at(3.6), jet);
  CHECK(rel_diff(e3, e1) > 1e-3);
}

TEST_CASE("paths") {
  Rat eps(1, 10);
  auto ps = build_paths(2, 3, eps);
  auto g = ps.gamma.vertices<C>();
  CHECK(dabs(C(bmp::imag(g.front()))) == 0);
  CHECK(dabs(C(bmp::imag(g.back()))) == 0);
  CHECK(dabs(C(bmp::imag(g[1])) - pi_c<C>() * C(2)) < 1e-35);
  CHECK(path_clearance(ps.gamma, 3, 0) > 2.0);
  CHECK(path_clearance(ps.delta, 3, 1) > 1.0);
  auto p1 = build_paths(1, 2, eps);
  auto d1 = p1.delta.vertices<C>(), g1 = p1.gamma.vertices<C>();
  CHECK(d1.front() == g1.front());
  CHECK(d1.back() == g1.back());
  CHECK_THROWS_AS(build_paths(2, 3, Rat(2)), ContractError);
}

TEST_CASE("basis matrices") {
  NumParams np = NumParams::seeded(2, 3, 5);
  C z = cx(1, 2);
  // trivial path: continuation equals direct evaluation
  PathSpec still{Rat(1, 10), {{1, 0, 0, 0}, {1, 0, 0, 0}}};
  C ls = still.vertices<C>()[0];
  for (int j = 0; j < 3; ++j) {
    auto a = plus_factor_continued(np, z, j, still, Rat(0), 4, {});
    auto b = plus_factor_direct(np, z, j, ls, Rat(0), 4);
    CHECK(rel_diff(a, b) < 1e-35);
  }
  // product structure: the d/dl_1 column against central differences of the full product
  std::vector<Vec<C>> fac;
  for (int j = 0; j < 3; ++j) fac.push_back(plus_factor_direct(np, z, j, ls, Rat(0), 2));
  std::vector<const std::vector<Vec<C>>*> pp(2, &fac);
  auto A = assemble(pp, 3, z);
  C h = from_rat<C>(rat(1, 1000000));
  for (int F = 0; F < 9; ++F) {
    auto f = mixed_tuple(F, 2, 3);
    auto fp = plus_factor_direct(np, z, f[0], ls + h, Rat(0), 0), fm = plus_factor_direct(np, z, f[0], ls - h, Rat(0), 0);
    C g2 = fac[f[1]][0];
    C fd = z * (z * fp[0] * g2 - z * fm[0] * g2) / (C(2) * h);
    // column mu = (1, 0) has index 3
    CHECK(dabs(fd - A[F][3]) / dabs(A[F][3]) < 1e-6);
  }
  // k = 1: invertible near the start
  NumParams n1 = NumParams::seeded(1, 2, 5);
  std::vector<Vec<C>> f1;
  for (int j = 0; j < 2; ++j) f1.push_back(plus_factor_direct(n1, z, j, ls, Rat(0), 1));
  std::vector<const std::vector<Vec<C>>*> p1(1, &f1);
  CHECK(condition(assemble(p1, 2, z)) < 1e6);
  // B = A gives the identity
  auto tc = solve_connection(A, A);
  CHECK(rel_diff(tc.U, mat_id<C>(9)) < 1e-30);
}

TEST_CASE("property checks on simple matrices") {
  auto I = mat_id<C>(3);
  Mat<C> G{{cx(2), C(0), C(0)}, {C(0), cx(-1), C(0)}, {C(0), C(0), cx(0.5)}};
  CHECK(symplectic_residual(I, I, G, G) < 1e-35);
  CHECK(weyl_residual(mat_id<C>(9), 2, 3) == 0);
  CHECK(degree_residual(I, I, {0, 1, 2}, {0, 1, 2}, Rat(2)) < 1e-35);
}

TEST_CASE("k = 1, n = 2 continuation") {
  NumParams np = NumParams::seeded(1, 2, 2);
  for (CRat zr : {CRat{1, 0}, CRat{1, 2}}) {
    C z = from_crat<C>(zr);
    RunInputs<C> in{np, zr, Rat(1, 10), Route::Gamma, 1, {}, nullptr};
    auto g = diagonal_jets(in);
    auto tc = toric_connection(np, g, z);
    in.z = -zr;
    auto tm = toric_connection(np, diagonal_jets(in), -z);
    auto Gp = abelian_gram<C>(np, 1), Gm = abelian_gram<C>(np, -1);
    CHECK(symplectic_residual(tc.U, tm.U, Gm, Gp) < 1e-8);
    // the Weyl group is trivial: U = U_T up to the basis change
    auto UG = assemble_U(tc.U, np);
    CHECK(rel_diff(UG.loc, tc.U) < 1e-35);
    // a transposed pair of columns breaks the identity
    auto bad = tc.U;
    for (auto& row : bad) std::swap(row[0], row[1]);
    CHECK(symplectic_residual(bad, tm.U, Gm, Gp) > 1e-3);
    // one wall
    CHECK(rel_diff(toric_connection_walls<C>(np, zr, Rat(1, 10), {}), tc.U) < 1e-30);
  }
}

TEST_CASE("k = 2, n = 3: residuals and properties") {
  ContinuationConfig cfg;
  cfg.np = NumParams::seeded(2, 3, 1);
  cfg.X = 1;
  cfg.L = 1;
  auto rep = run_continuation(cfg);
  CHECK(rep.bits_used == 128);
  for (auto& z : rep.per_z) {
    CHECK(z.gamma_residual < 1e-8);
    CHECK(z.delta_twisted_residual < 1e-8);
    CHECK(z.delta_sameU_residual > 1e-3);
    CHECK(z.weyl < 1e-8);
    CHECK(z.antiinv < 1e-8);
    CHECK(z.symplectic_T < 1e-8);
    CHECK(z.symplectic_G < 1e-8);
    CHECK(z.degree_T < 1e-8);
    CHECK(z.degree_G < 1e-8);
    CHECK(z.walls_vs_diagonal < 1e-8);
    CHECK(z.eps_independence < 1e-8);
    CHECK(z.basepoint_independence < 1e-8);
    CHECK(z.U.size() == 3);
  }
  CHECK(rep.param_stamp().find("bits=128") != std::string::npos);
}
