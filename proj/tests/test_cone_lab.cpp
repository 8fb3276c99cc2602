#include <doctest.h>

#include <random>

#include "flop/cone_lab.hpp"
#include "flop/errors.hpp"

using namespace flop;
using namespace flop::cone;

namespace {

// -z e^{-x/z} with x nilpotent, expanded to the truncation
GVec minus_z_exp(const AlgPtr& alg, const TA& x) {
  GVec r(1);
  TA p = TA::constant(alg, Rat(1));
  for (int n = 0; n <= alg->order + 1 && !p.is_zero(); ++n) {
    r.add(1 - n, 0, p * (Rat(n % 2 ? 1 : -1) / factorial(n)));
    p = p * x;
  }
  return r;
}

// e^{-x/z} as a 1x1 matrix
GMat exp_mat(const AlgPtr& alg, const TA& x, int sign = -1) {
  GMat m(1);
  TA p = TA::constant(alg, Rat(1));
  for (int n = 0; n <= alg->order + 1 && !p.is_zero(); ++n) {
    m.add(-n, 0, 0, p * (Rat(sign < 0 && n % 2 ? -1 : 1) / factorial(n)));
    p = p * x;
  }
  return m;
}

TA random_nilpotent(const AlgPtr& alg, const std::vector<int>& gens, std::mt19937& rng, int deg = 3) {
  std::uniform_int_distribution<int> c(-4, 4), pick(0, int(gens.size()) - 1), d(1, deg);
  Poly p;
  for (int i = 0; i < 5; ++i) {
    Poly m(Rat(c(rng), 1 + std::abs(c(rng))));
    int e = d(rng);
    for (int j = 0; j < e; ++j) m *= Poly::var(gens[pick(rng)]);
    p += m;
  }
  return TA(alg, p);
}

// two points, basis 1 = e1 + e2, phi = e1 - e2
class TwoPoints : public Genus0Theory {
 public:
  TwoPoints() : Genus0Theory(2, RatMat{{Rat(2), Rat(0)}, {Rat(0), Rat(2)}}) {}
  std::string name() const override { return "two points"; }

 protected:
  Rat raw(const std::vector<Insertion>& s) const override {
    if (s.size() < 3) return 0;
    std::vector<int> k;
    int odd = 0;
    for (auto& i : s) {
      k.push_back(i.psi);
      odd += i.alpha;
    }
    return point_psi_oracle(k) * (odd % 2 ? 0 : 2);
  }
};

}  // namespace

TEST_CASE("psi integrals on a point") {
  CHECK(point_psi_oracle({0, 0, 0}) == 1);
  CHECK(point_psi_oracle({1, 0, 0, 0}) == 1);
  CHECK(point_psi_oracle({1, 1, 0, 0, 0}) == 2);
  CHECK(point_psi_string_reduction({1, 0, 0, 0}) == 1);
  CHECK(point_psi_string_reduction({1, 1, 0, 0, 0}) == 2);
  CHECK_THROWS_AS(point_psi_oracle({0, 0}), ContractError);
  // closed form against the recursion, every exponent vector up to 7 points
  int checked = 0;
  for (int m = 3; m <= 7; ++m) {
    std::vector<int> k(m, 0);
    std::function<void(int)> rec = [&](int i) {
      if (i == m) {
        CHECK(point_psi_oracle(k) == point_psi_string_reduction(k));
        ++checked;
        return;
      }
      for (int e = 0; e <= m - 2; ++e) {
        k[i] = e;
        rec(i + 1);
      }
    };
    rec(0);
  }
  CHECK(checked > 1000);
}

TEST_CASE("truncated algebra") {
  auto alg = make_alg({"a", "b"}, 3);
  TA a = TA::gen(alg, 0), b = TA::gen(alg, 1);
  CHECK((a * a * a).poly() == Poly::var(0, 3));
  CHECK((a * a * b * b).is_zero());
  CHECK(a.pow(4).is_zero());
  TA u = TA::constant(alg, Rat(2)) + a - b * b;
  CHECK(u * u.inverse() == TA::constant(alg, Rat(1)));
  CHECK_THROWS_AS(a.inverse(), ContractError);
  CHECK(a.valuation() == 1);
  // simultaneous substitution a -> b, b -> a
  TA x = a * a * b + a;
  CHECK(x.compose({b, a}) == b * b * a + b);
}

TEST_CASE("correlators at t") {
  PointTheory pt;
  auto alg = make_alg({"tau"}, 6);
  TA tau = TA::gen(alg, 0);
  TPoint t{{{0, 0}, tau}};
  for (int l = 0; l <= 5; ++l) {
    TA v = correlator_at_t(pt, {{0, l}}, t, alg);
    TA want = l + 2 <= 6 ? tau.pow(l + 2) * (1 / factorial(l + 2)) : TA(alg, Poly());
    CHECK(v == want);
  }
  CHECK(correlator_at_t(pt, {}, TPoint{}, alg).is_zero());
  // TRR for the point at a generic descendant point
  auto a2 = make_alg({"s0", "s1", "s2", "s3"}, 6);
  TPoint g;
  for (int k = 0; k < 4; ++k) g[{0, k}] = TA::gen(a2, k);
  for (int k = 0; k <= 2; ++k)
    for (int l = 0; l <= 2; ++l)
      for (int m = l; m <= 2; ++m) {
        TA lhs = correlator_at_t(pt, {{0, k + 1}, {0, l}, {0, m}}, g, a2);
        TA rhs = correlator_at_t(pt, {{0, k}, {0, 0}}, g, a2) *
                 correlator_at_t(pt, {{0, 0}, {0, l}, {0, m}}, g, a2);
        CHECK(lhs == rhs);
      }
}

TEST_CASE("J-function and DI of the point") {
  PointTheory pt;
  Family J = j_family(pt, 6);
  TA tau = TA::gen(J.alg, 0);
  CHECK(J.I == minus_z_exp(J.alg, tau));
  GVec slice = J.I.compose({TA(J.alg, Poly())});
  GVec mz(1);
  mz.add(1, 0, TA::constant(J.alg, Rat(-1)));
  CHECK(slice == mz);

  GMat D = di_matrix(J);
  CHECK(D == exp_mat(J.alg, tau));
  CHECK(D.identity_mod_nilpotents());

  Family bad{J.alg, J.tau, J.I * TA::constant(J.alg, Rat(2)), std::nullopt};
  CHECK_THROWS_AS(di_matrix(bad), ContractError);
}

TEST_CASE("V factor for a reparametrized J") {
  PointTheory pt;
  Family J = j_family(pt, 6);
  TA tau = TA::gen(J.alg, 0);
  Family I = reparametrize(J, {tau + tau * tau});
  auto m = mirror_map(I);
  CHECK(m[0] == tau + tau * tau);
  GMat V = v_factor(J, I);
  GMat want(1);
  want.add(0, 0, 0, TA::constant(J.alg, Rat(1)) + tau * Rat(2));
  CHECK(V == want);
  CHECK(di_matrix(I) == di_matrix(J).compose(tau_subst(J, m)) * V);
}

TEST_CASE("reconstruction examples") {
  PointTheory pt;
  auto alg = make_alg({"tau", "s", "eps"}, 6);
  Family J = j_family(pt, alg, {0});
  TA tau = TA::gen(alg, 0), s = TA::gen(alg, 1), eps = TA::gen(alg, 2);
  GVec minus1(1);
  minus1.add(0, 0, TA::constant(alg, Rat(-1)));

  auto r = reconstruct(J.I, J);
  CHECK(r.on_cone);
  CHECK(r.t[0] == tau);
  CHECK(r.w == minus1);

  GVec K = minus_z_exp(alg, s);
  r = reconstruct(K, J);
  CHECK(r.on_cone);
  CHECK(r.t[0] == s);
  CHECK(r.w == minus1);

  GVec off = K;
  off.add(-2, 0, eps);
  r = reconstruct(off, J);
  CHECK(r.converged);
  CHECK_FALSE(r.on_cone);
  CHECK_FALSE(r.residual.is_zero());
  CHECK(r.residual.at(-2, 0) == eps);  // first order in eps
  for (auto& [p, row] : r.residual.c) CHECK(row[0].valuation() >= 1);

  GVec notbase(1);
  notbase.add(1, 0, TA::constant(alg, Rat(1)));
  CHECK_THROWS_AS(reconstruct(notbase, J), ContractError);
}

TEST_CASE("reconstruction round trip") {
  PointTheory pt;
  auto alg = make_alg({"tau", "s1", "s2"}, 5);
  Family J = j_family(pt, alg, {0});
  TA tau = TA::gen(alg, 0);
  Family I = reparametrize(J, {tau + tau * tau});
  GMat DJ = di_matrix(J);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    TA t = random_nilpotent(alg, {1, 2}, rng);
    GVec w(1);
    w.add(0, 0, TA::constant(alg, Rat(-1)));
    for (int p = 0; p <= 2; ++p) w.add(p, 0, random_nilpotent(alg, {1, 2}, rng, 2));
    GVec K = (DJ.compose({t}) * w).shifted(1);
    auto r = reconstruct(K, J);
    CHECK(r.on_cone);
    CHECK(r.t[0] == t);
    CHECK(r.w == w);
    // the cone is the graph over its own descendant coordinates
    CHECK(K == graph_point(pt, alg, t_coords(K)));
    // through the reparametrized family
    auto ri = reconstruct(K, I, J);
    CHECK(ri.on_cone);
    CHECK(mirror_map(I)[0].compose({ri.t[0]}) == r.tJ[0]);
    CHECK(ri.residual.is_zero());
    // string flow: multiplying by e^{s/z} moves t by -s
    TA sh = random_nilpotent(alg, {1, 2}, rng, 1);
    GVec K2 = exp_mat(alg, sh, +1) * K;
    auto r2 = reconstruct(K2, J);
    CHECK(r2.on_cone);
    CHECK(r2.t[0] == t - sh);
    CHECK(r2.w == w);
  }
}

TEST_CASE("axioms for the point") {
  PointTheory pt;
  auto rep = axioms_check(pt, 6);
  CHECK(rep.de);
  CHECK(rep.se);
  CHECK(rep.trr);
  CHECK(rep.trr_instances == 18);

  TamperedTheory bad(pt, {{{{0, 0}, {0, 1}}, Rat(1)}});
  auto alg = make_alg({"tau"}, 4);
  TA tau = TA::gen(alg, 0);
  TPoint t{{{0, 0}, tau}};
  CHECK(correlator_at_t(bad, {{0, 1}}, t, alg) - correlator_at_t(pt, {{0, 1}}, t, alg) == tau);
  auto rb = axioms_check(bad, 6);
  CHECK_FALSE(rb.de);
  CHECK_FALSE(rb.ok());

  // SE constant term
  CHECK(correlator_at_t(pt, {{0, 0}}, t, alg) == tau * tau * Rat(1, 2));
}

TEST_CASE("table theory and rank two") {
  PointTheory pt;
  std::map<std::vector<Insertion>, Rat> tab;
  for (int m = 3; m <= 8; ++m)
    for (int l = 0; l <= m - 3; ++l) {
      // psi^l and psi^(m-3-l) on two points, 1 elsewhere
      std::vector<Insertion> ins(m, {0, 0});
      ins[0].psi = l;
      ins[1].psi = m - 3 - l;
      tab[ins] = pt.correlator(ins);
    }
  TableTheory tt(1, RatMat{{Rat(1)}}, tab);
  CHECK_FALSE(tt.verified());
  Family J1 = j_family(pt, 6), J2 = j_family(tt, J1.alg, {0});
  CHECK(J1.I == J2.I);

  TwoPoints two;
  auto rep = axioms_check(two, 5, 2);
  CHECK(rep.ok());
  auto alg = make_alg({"tau1", "tau2", "s"}, 4);
  Family J = j_family(two, alg, {0, 1});
  GMat DJ = di_matrix(J);
  std::mt19937 rng(5);
  std::vector<TA> t{random_nilpotent(alg, {2}, rng), random_nilpotent(alg, {2}, rng)};
  GVec w(2);
  w.add(0, 0, TA::constant(alg, Rat(-1)));
  w.add(1, 1, random_nilpotent(alg, {2}, rng, 1));
  GVec K = (DJ.compose({t[0], t[1]}) * w).shifted(1);
  auto r = reconstruct(K, J);
  CHECK(r.on_cone);
  CHECK(r.t[0] == t[0]);
  CHECK(r.t[1] == t[1]);
  CHECK(r.w == w);
  CHECK(K == graph_point(two, alg, t_coords(K)));
}
