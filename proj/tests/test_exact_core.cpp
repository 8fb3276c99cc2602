#include <doctest.h>

#include <random>

#include "flop/canon_json.hpp"
#include "flop/multiseries.hpp"
#include "flop/ratfn.hpp"
#include "flop/zlaurent.hpp"

using namespace flop;

namespace {

Poly rand_poly(std::mt19937& g, int nvars, int maxdeg, int nterms) {
  std::uniform_int_distribution<int> c(-5, 5), dv(1, 4);
  Poly p;
  for (int t = 0; t < nterms; ++t) {
    Poly m(rat(c(g), dv(g)));
    int deg = std::uniform_int_distribution<int>(0, maxdeg)(g);
    for (int i = 0; i < deg; ++i) m *= Poly::var(std::uniform_int_distribution<int>(0, nvars - 1)(g));
    p += m;
  }
  return p;
}

VarSpec one_q(int Dq) {
  VarSpec s;
  s.q = {"q"};
  s.Dq = Dq;
  return s;
}

VarSpec one_logy(int L) {
  VarSpec s;
  s.logy = {"l"};
  s.L = L;
  return s;
}

}  // namespace

TEST_CASE("rationals parse and print") {
  CHECK(rat_from_string("3/6") == Rat(1, 2));
  CHECK(rat_from_string("-1.25") == Rat(-5, 4));
  CHECK(rat_from_string(".5") == Rat(1, 2));
  CHECK(to_string(rat(-6, 4)) == "-3/2");
  CHECK(rat_pow(Rat(2, 3), -2) == Rat(9, 4));
  CHECK(binomial(5, 2) == 10);
}

TEST_CASE("poly ring axioms on random samples") {
  std::mt19937 g(7);
  for (int it = 0; it < 40; ++it) {
    Poly a = rand_poly(g, 4, 3, 4), b = rand_poly(g, 4, 3, 4), c = rand_poly(g, 4, 3, 4);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK((a - a).is_zero());
    Poly q;
    if (!b.is_zero()) {
      REQUIRE(Poly::divide_exact(a * b, b, &q));
      CHECK(q == a);
    }
  }
}

TEST_CASE("poly grlex order and division failure") {
  Poly x = Poly::var(0), y = Poly::var(1);
  Poly p = x * x + y;
  CHECK(p.lm() == mono_var(0, 2));
  Poly q;
  CHECK_FALSE(Poly::divide_exact(x * x + Poly(1), x + y, &q));
  CHECK(Poly::divide_exact(x * x - y * y, x + y, &q));
  CHECK(q == x - y);
  CHECK((x + y).pow(3).subst(1, -x).is_zero());
  CHECK(p.str({"x", "y"}) == "x^2 + y");
}

TEST_CASE("ratfn canonical form and field axioms") {
  std::mt19937 g(11);
  Poly x = Poly::var(0), y = Poly::var(1);
  RatFn a = RatFn(x) / RatFn(x - y), b = RatFn(y) / RatFn(x - y);
  CHECK(a - b == RatFn(1));
  RatFn c = RatFn((x - y) * (x + y)) / RatFn(x - y);
  c.cancel();
  CHECK(c.is_polynomial());
  CHECK(c.num() == x + y);
  RatFn d = c;
  d.cancel();
  CHECK(d.num() == c.num());
  for (int it = 0; it < 20; ++it) {
    Poly p1 = rand_poly(g, 3, 2, 3), p2 = rand_poly(g, 3, 2, 3) + Poly(1);
    Poly p3 = rand_poly(g, 3, 2, 3), p4 = rand_poly(g, 3, 2, 3) + Poly(2);
    if (p2.is_zero() || p4.is_zero()) continue;
    RatFn f = RatFn(p1) / RatFn(p2), h = RatFn(p3) / RatFn(p4);
    // a/b = c/d exactly when ad - bc = 0
    CHECK((f == h) == (p1 * p4 - p3 * p2).is_zero());
    CHECK((f + h) * RatFn(p2) == RatFn(p1) + h * RatFn(p2));
    CHECK(f * h == h * f);
    if (!p1.is_zero()) CHECK(f / f == RatFn(1));
  }
  RatFn e = RatFn::inv_product({x * Rat(2) - y * Rat(4), y});
  CHECK(e.den().size() == 2);
  CHECK(e * RatFn(x - y * Rat(2)) * RatFn(y) == RatFn(Rat(1, 2)));
}

TEST_CASE("series_arith examples") {
  VarSpec s = one_q(2);
  MultiSeries<RatFn> a(s), b(s);
  a.add_term({0}, RatFn(1));
  a.add_term({1}, RatFn(1));
  b.add_term({0}, RatFn(1));
  b.add_term({1}, RatFn(-1));
  MultiSeries<RatFn> p = a * b;
  CHECK(p.terms().size() == 2);
  CHECK(*p.find({2}) == RatFn(-1));
  MultiSeries<RatFn> zero(s);
  CHECK((a * zero).is_zero());
  VarSpec other = one_q(3);
  CHECK_THROWS_AS(a + MultiSeries<RatFn>(other), SpecError);
}

TEST_CASE("exp(L/z) * exp(-L/z) = 1 at L_logy = 4") {
  // brute force partial sums of the exponential, L = H log y, z symbolic
  VarSpec s = one_logy(4);
  Poly H = Poly::var(0), z = Poly::var(1);
  MultiSeries<RatFn> ell(s), mell(s);
  ell.add_term({1}, RatFn(H) / RatFn(z));
  mell.add_term({1}, RatFn(-H) / RatFn(z));
  MultiSeries<RatFn> ea(s), eb(s);
  for (int m = 0; m <= 4; ++m) {
    RatFn c = RatFn(H.pow(m)) / RatFn(z.pow(m)) * Rat(Rat(1) / factorial(m));
    ea.add_term({m}, c);
    eb.add_term({m}, m % 2 ? -c : c);
  }
  CHECK(exp_linear(ell, RatFn(1)) == ea);
  CHECK(exp_linear(mell, RatFn(1)) == eb);
  CHECK(ea * eb == series_constant(s, RatFn(1)));
}

TEST_CASE("exp_linear rejects nonlinear input and maps 0 to 1") {
  VarSpec s = one_logy(3);
  MultiSeries<RatFn> zero(s);
  CHECK(exp_linear(zero, RatFn(1)) == series_constant(s, RatFn(1)));
  MultiSeries<RatFn> sq(s);
  sq.add_term({2}, RatFn(1));
  CHECK_THROWS_AS(exp_linear(sq, RatFn(1)), SpecError);
  // L = H log y / z at L_logy = 2
  VarSpec s2 = one_logy(2);
  Poly H = Poly::var(0), z = Poly::var(1);
  MultiSeries<RatFn> ell(s2);
  ell.add_term({1}, RatFn(H) / RatFn(z));
  auto e = exp_linear(ell, RatFn(1));
  CHECK(*e.find({0}) == RatFn(1));
  CHECK(*e.find({1}) == RatFn(H) / RatFn(z));
  CHECK(*e.find({2}) == RatFn(H * H) / RatFn(z * z * Rat(2)));
}

TEST_CASE("series_derivative") {
  VarSpec s = one_logy(3);
  MultiSeries<RatFn> l2(s);
  l2.add_term({2}, RatFn(1));
  auto d = l2.derivative_logy("l");
  CHECK(d.terms().size() == 1);
  CHECK(*d.find({1}) == RatFn(2));
  CHECK_THROWS_AS(l2.derivative_logy("nope"), SpecError);
  // d/dlogy e^{H log y / z} = (H/z) e^{...}, truncated one degree lower
  Poly H = Poly::var(0), z = Poly::var(1);
  MultiSeries<RatFn> ell(s);
  ell.add_term({1}, RatFn(H) / RatFn(z));
  auto e = exp_linear(ell, RatFn(1));
  auto lhs = e.derivative_logy(0);
  auto rhs = e.scaled_by(RatFn(H) / RatFn(z)).truncated(0, 2, 0);
  CHECK(lhs.truncated(0, 2, 0) == rhs);
}

TEST_CASE("truncation coherence of products") {
  std::mt19937 g(3);
  VarSpec hi;
  hi.q = {"q1", "q2"};
  hi.logy = {"l1"};
  hi.Dq = 4, hi.L = 3;
  auto rnd = [&](const VarSpec& s) {
    MultiSeries<RatFn> a(s);
    for (int i = 0; i < 12; ++i) {
      Exps e = {int(g() % 3), int(g() % 3), int(g() % 3)};
      a.add_term(e, RatFn(rand_poly(g, 2, 2, 2)));
    }
    return a;
  };
  auto a = rnd(hi), b = rnd(hi);
  auto lo_a = a.truncated(2, 1, 0), lo_b = b.truncated(2, 1, 0);
  CHECK((a * b).truncated(2, 1, 0) == lo_a * lo_b);
  CHECK((a + b).truncated(2, 1, 0) == lo_a + lo_b);
}

TEST_CASE("zlaurent arithmetic and residue") {
  using ZL = ZLaurent<RatFn>;
  ZL a(-1, {RatFn(2), RatFn(0), RatFn(3)});  // 2/z + 3z
  ZL b = ZL::mono(0, RatFn(5));
  CHECK(a.minPow() == -1);
  CHECK(a.maxPow() == 1);
  CHECK((a * b).residue() == RatFn(10));
  CHECK(a.negate_z().coeff(-1) == RatFn(-2));
  CHECK((a - a).is_zero());
  ZL t(-2, {RatFn(0), RatFn(1), RatFn(0)});
  CHECK(t.minPow() == -1);
  CHECK(t.maxPow() == -1);
}

TEST_CASE("canonical json round trip") {
  Poly x = Poly::var(0), y = Poly::var(1);
  Poly p = x * Rat(3, 2) - y * y;
  CHECK(poly_from_json(poly_to_json(p, 2)) == p);
  RatFn f = RatFn(p) / RatFn(x - y);
  CHECK(ratfn_from_json(ratfn_to_json(f, 2)) == f);
  CHECK(canonical_dump(poly_to_json(p, 2)) == canonical_dump(poly_to_json(p * Rat(1), 2)));
}
