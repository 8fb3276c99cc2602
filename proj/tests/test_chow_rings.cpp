#include <doctest.h>

#include <random>

#include "flop/chow_rings.hpp"
#include "flop/multiseries.hpp"

using namespace flop;

namespace {

Poly rand_h_poly(std::mt19937& g, const Params& p, int maxdeg) {
  std::uniform_int_distribution<int> c(-4, 4);
  Poly out;
  for (int t = 0; t < 4; ++t) {
    Poly m(Rat(c(g)));
    int deg = int(g() % (maxdeg + 1));
    for (int i = 0; i < deg; ++i) m *= p.H(int(g() % p.k));
    if (g() % 2) m *= p.lam_p(int(g() % p.n));
    out += m;
  }
  return out;
}

// substitute H_i -> root at fixed point F
RatFn substitute_at(const AbelianChowRing& R, const Poly& p, int F) {
  auto t = R.tuple(F);
  Poly q = p;
  for (int i = 0; i < R.k(); ++i) q = q.subst(R.params().v_H(i), R.root(i, t[i]));
  return RatFn(q);
}

}  // namespace

TEST_CASE("normal_form examples") {
  Params p = Params::make_symbolic(1, 2);
  auto R = AbelianChowRing::make(p, 0);
  ChowClass h2 = R->normal_form(p.H(0) * p.H(0));
  ChowClass expect = R->normal_form((p.lam_p(0) + p.lam_p(1)) * p.H(0) - p.lam_p(0) * p.lam_p(1));
  CHECK(h2 == expect);
  CHECK(h2.coef()[1] == RatFn(p.lam_p(0) + p.lam_p(1)));
  CHECK(h2.coef()[0] == RatFn(-p.lam_p(0) * p.lam_p(1)));
  // already reduced monomial
  CHECK(R->normal_form(p.H(0)) == R->basis_element(1));
  Params p2 = Params::make_symbolic(2, 3);
  auto R2 = AbelianChowRing::make(p2, 1);
  CHECK(R2->normal_form(p2.H(0) * p2.H(1) * p2.H(1)) == R2->basis_element(R2->index({1, 2})));
}

TEST_CASE("localization consistency of normal_form, k=2 n=3, all chambers") {
  Params p = Params::make_symbolic(2, 3);
  std::mt19937 g(5);
  for (int c = 0; c <= 2; ++c) {
    auto R = AbelianChowRing::make(p, c);
    for (int F = 0; F < R->dim(); ++F) CHECK(substitute_at(*R, R->relation(0), F).is_zero());
    for (int it = 0; it < 50 / 3 + 1; ++it) {
      Poly q = rand_h_poly(g, p, 5);
      ChowClass a = R->normal_form(q);
      auto r = R->restrict_all(a);
      for (int F = 0; F < R->dim(); ++F) CHECK(r[F] == substitute_at(*R, q, F));
      CHECK(R->from_restrictions(r) == a);
    }
  }
}

TEST_CASE("Weyl action") {
  Params p = Params::make_symbolic(2, 3);
  for (int c : {0, 2}) {
    auto R = AbelianChowRing::make(p, c);
    Perm s{1, 0};
    CHECK(weyl_act(s, R->H(0)) == R->H(1));
    CHECK(weyl_act(s, R->delta()) == -R->delta());
    std::mt19937 g(9);
    for (int it = 0; it < 5; ++it) {
      ChowClass a = R->normal_form(rand_h_poly(g, p, 4));
      ChowClass wa = weyl_act(s, a);
      for (int F = 0; F < R->dim(); ++F) {
        auto t = R->tuple(F);
        CHECK(R->restrict(wa, F) == R->restrict(a, R->index({t[s[0]], t[s[1]]})));
      }
    }
  }
  Params p3 = Params::make_seeded(3, 4, 1);
  auto R3 = AbelianChowRing::make(p3, 0);
  for (auto& w : all_perms(3)) CHECK(weyl_act(w, R3->delta()) == R3->delta() * Rat(perm_sign(w)));
  auto mid = AbelianChowRing::make(p, 1);
  CHECK_THROWS_AS(weyl_act({1, 0}, mid->H(0)), ContractError);
}

TEST_CASE("projectors") {
  Params p = Params::make_symbolic(2, 3);
  auto R = AbelianChowRing::make(p, 0);
  ChowClass h1 = R->H(0), h2 = R->H(1);
  CHECK(project(h1, ProjMode::antiinvariant) == (h1 - h2) * rat(1, 2));
  CHECK(project(h1 * h2, ProjMode::antiinvariant).is_zero());
  CHECK(project(h1 * h1, ProjMode::invariant) == (h1 * h1 + h2 * h2) * rat(1, 2));
  std::mt19937 g(2);
  ChowClass a = R->normal_form(rand_h_poly(g, p, 4));
  auto pa = project(a, ProjMode::antiinvariant), pw = project(a, ProjMode::invariant);
  CHECK(project(pa, ProjMode::antiinvariant) == pa);
  CHECK(project(pw, ProjMode::invariant) == pw);
  CHECK(project(pw, ProjMode::antiinvariant).is_zero());
  CHECK(is_antiinvariant(pa));
}

TEST_CASE("divide_by_delta") {
  Params p = Params::make_symbolic(2, 3);
  auto R = AbelianChowRing::make(p, 0);
  ChowClass d = R->delta(), h1 = R->H(0), h2 = R->H(1);
  CHECK(divide_by_delta(d) == R->one());
  CHECK(divide_by_delta(d * (h1 + h2)) == h1 + h2);
  ChowClass beta = divide_by_delta(h1 * h1 - h2 * h2);
  CHECK(beta == h1 + h2);
  // fixed-point oracle at ordered pairs with distinct entries
  ChowClass alpha = h1 * h1 - h2 * h2;
  for (int F = 0; F < R->dim(); ++F) {
    if (!R->distinct(F)) continue;
    CHECK(R->restrict(beta, F) == R->restrict(alpha, F) / R->restrict(d, F));
  }
  CHECK_THROWS_AS(divide_by_delta(h1), ContractError);
  // the minus side and k = 3
  auto Rm = AbelianChowRing::make(p, 2);
  CHECK(divide_by_delta(Rm->delta() * Rm->H(0) * Rm->H(1)) == Rm->H(0) * Rm->H(1));
  Params p3 = Params::make_seeded(3, 4, 2);
  auto R3 = AbelianChowRing::make(p3, 0);
  ChowClass e = R3->H(0) + R3->H(1) + R3->H(2);
  CHECK(divide_by_delta(R3->delta() * e) == e);
}

TEST_CASE("pairing_abelian") {
  Params p = Params::make_symbolic(1, 2);
  auto R = AbelianChowRing::make(p, 0);
  Poly l1 = p.lam_p(0), l2 = p.lam_p(1), s1 = p.sig_p(0), s2 = p.sig_p(1);
  RatFn expect = RatFn::inv_product({l1 - l2, s1 - l1, s2 - l1}) + RatFn::inv_product({l2 - l1, s1 - l2, s2 - l2});
  CHECK(pairing_abelian(R->one(), R->one()) == expect);
  // H^{n-1} times the fiber Euler class integrates to 1
  ChowClass fiber = R->normal_form((s1 - p.H(0)) * (s2 - p.H(0)));
  CHECK(pairing_abelian(R->H(0) * fiber, R->one()) == RatFn(1));
  // n = 3: residue sum of H^2 over the base
  Params p3 = Params::make_symbolic(1, 3);
  auto R3 = AbelianChowRing::make(p3, 0);
  Poly f3(1);
  for (int j = 0; j < 3; ++j) f3 *= p3.sig_p(j) - p3.H(0);
  CHECK(pairing_abelian(R3->normal_form(p3.H(0) * p3.H(0) * f3), R3->one()) == RatFn(1));
  CHECK(pairing_abelian(R3->normal_form(p3.H(0) * f3), R3->one()).is_zero());
  std::mt19937 g(4);
  Params p2 = Params::make_symbolic(2, 3);
  auto R2 = AbelianChowRing::make(p2, 1);
  ChowClass a = R2->normal_form(rand_h_poly(g, p2, 2)), b = R2->normal_form(rand_h_poly(g, p2, 2));
  CHECK(pairing_abelian(a, b) == pairing_abelian(b, a));
}

TEST_CASE("abelian Gram matrices are nondegenerate") {
  Params p = Params::make_symbolic(1, 2);
  for (int c = 0; c <= 1; ++c) CHECK_FALSE(determinant(gram_abelian(*AbelianChowRing::make(p, c))).is_zero());
  Params q = Params::make_seeded(2, 3, 3);
  for (int c = 0; c <= 2; ++c) CHECK_FALSE(determinant(gram_abelian(*AbelianChowRing::make(q, c))).is_zero());
}

TEST_CASE("pairing_nonabelian dual routes, k=2 n=3 symbolic") {
  Params p = Params::make_symbolic(2, 3);
  for (int side : {1, -1}) {
    NonabelianChowModule m(p, side);
    auto R = m.abelian();
    std::vector<ChowClass> B{R->one(), R->H(0) + R->H(1), R->H(0) * R->H(1)};
    for (auto& a : B)
      for (auto& b : B) {
        RatFn r1 = pairing_nonabelian(m, a, b), r2 = pairing_nonabelian_via_abelian(m, a, b);
        CHECK(r1 == r2);
        CHECK(r1 == pairing_nonabelian(m, b, a));
      }
  }
}

TEST_CASE("the dual-route constant is -1/2 for k=2") {
  Params p = Params::make_seeded(2, 3, 8);
  NonabelianChowModule m(p, 1);
  auto R = m.abelian();
  RatFn raw = pairing_abelian(R->delta(), R->delta());
  CHECK(pairing_nonabelian_via_abelian(m, R->one(), R->one()) == raw * rat(-1, 2));
  CHECK(pairing_nonabelian(m, R->one(), R->one()) == raw * rat(-1, 2));
}

TEST_CASE("p_a and its inverse") {
  Params p = Params::make_symbolic(2, 3);
  NonabelianChowModule m(p, 1);
  auto R = m.abelian();
  CHECK(p_a(R->delta()) == R->one());
  for (auto& P : m.basis()) {
    CHECK(p_a(R->delta() * P) == P);
    CHECK(p_a(p_a_inverse(P)) == P);
  }
  // fixed-point description of p_a
  ChowClass anti = R->delta() * (R->H(0) * R->H(1) + R->H(0) + R->H(1));
  ChowClass s = p_a(anti);
  for (int J = 0; J < m.rank(); ++J) {
    int F = m.ordered_point(J);
    CHECK(R->restrict(s, F) == R->restrict(anti, F) / R->restrict(R->delta(), F));
  }
  CHECK_THROWS_AS(p_a(R->H(0)), ContractError);
}

TEST_CASE("nonabelian module basis and rank") {
  auto c23 = MonomialCatalog::build(2, 3);
  CHECK(c23.M() == 2);
  CHECK(c23.N() == 2);
  auto c24 = MonomialCatalog::build(2, 4);
  CHECK(c24.M() == 7);
  CHECK(c24.N() == 5);
  CHECK(c24.orbit_rep[1] == std::vector<int>{0, 2});
  for (auto [k, n] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}}) {
    Params p = Params::make_seeded(k, n, 11);
    for (int side : {1, -1}) {
      NonabelianChowModule m(p, side);
      CHECK(m.rank() == m.catalog().N() + 1);
      CHECK(rank(m.loc_matrix()) == m.rank());
      for (auto& b : m.basis()) CHECK(is_invariant(b));
    }
  }
}

TEST_CASE("cup with Delta maps invariants onto anti-invariants") {
  for (int n : {2, 3, 4}) {
    Params p = n < 4 ? Params::make_symbolic(2, n) : Params::make_seeded(2, n, 5);
    auto R = AbelianChowRing::make(p, 0);
    std::vector<std::vector<RatFn>> rows;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        ChowClass s = project(R->basis_element(R->index({a, b})), ProjMode::invariant);
        rows.push_back((R->delta() * s).coef());
      }
    CHECK(rank(rows) == n * (n - 1) / 2);
  }
}

TEST_CASE("root data and the sign identity") {
  for (int k = 1; k <= 4; ++k) {
    RootData r = RootData::standard(k);
    CHECK(r.size() == k * (k - 1) / 2);
    CHECK(r.sign_identity_holds());
    auto a = r.a(1);
    for (int i = 0; i < k; ++i) CHECK(a[i] == k - 1 - 2 * i);
  }
  Params p = Params::make_symbolic(2, 3);
  CHECK(RootData::standard(2).with_negated(0).delta_poly(p) == -RootData::standard(2).delta_poly(p));
}

TEST_CASE("symplectic_gram residue rule") {
  using ZL = ZLaurent<RatFn>;
  Poly x = Poly::var(0);
  SymplecticGram sg = symplectic_gram({{RatFn(x)}});
  // Omega(phi z^0, psi z^-1) = +(phi, psi); reversed order gives the opposite sign
  CHECK(sg.omega({ZL::mono(0, RatFn(2))}, {ZL::mono(-1, RatFn(3))}) == RatFn(x * Rat(6)));
  CHECK(sg.omega({ZL::mono(-1, RatFn(3))}, {ZL::mono(0, RatFn(2))}) == RatFn(x * Rat(-6)));
  // even z-dependence: Omega(f, f) = 0
  ZL f(-2, {RatFn(1), RatFn(0), RatFn(5), RatFn(0), RatFn(7)});
  CHECK(sg.omega({f}, {f}).is_zero());
  // bilinearity
  ZL g(-1, {RatFn(2), RatFn(1)}), h(-3, {RatFn(1), RatFn(4)});
  CHECK(sg.omega({g + h}, {f}) == sg.omega({g}, {f}) + sg.omega({h}, {f}));
  CHECK(sg.omega({g}, {h}) == -sg.omega({h}, {g}));
}

TEST_CASE("exp_linear nilpotency in the k=1 n=2 ring") {
  Params p = Params::make_symbolic(1, 2);
  auto R = AbelianChowRing::make(p, 0);
  VarSpec s;
  s.logy = {"l"};
  s.L = 2;
  MultiSeries<ChowClass> ell(s);
  ell.add_term({1}, R->H(0) * (RatFn(1) / RatFn(p.z())));
  auto e = exp_linear(ell, R->one());
  Poly l1 = p.lam_p(0), l2 = p.lam_p(1), z = p.z();
  ChowClass expect = R->normal_form(p.H(0) * (l1 + l2) - l1 * l2) * (RatFn(1) / RatFn(z * z * Rat(2)));
  CHECK(*e.find({2}) == expect);
}
