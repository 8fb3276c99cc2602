#include "flop/ifactory.hpp"

#include <functional>

#include "flop/errors.hpp"

namespace flop {

bool LocVec::is_zero() const {
  for (auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

LocVec& LocVec::operator+=(const LocVec& o) {
  if (o.v.empty()) return *this;
  if (v.empty()) return *this = o;
  for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
  return *this;
}

LocVec operator*(const LocVec& a, const LocVec& b) {
  if (a.v.empty() || b.v.empty()) return LocVec();
  LocVec r;
  for (size_t i = 0; i < a.v.size(); ++i) r.v.push_back(a.v[i] * b.v[i]);
  return r;
}

LocVec operator*(LocVec a, const Rat& c) {
  for (auto& x : a.v) x *= c;
  return a;
}

LocVec operator*(LocVec a, const RatFn& c) {
  for (auto& x : a.v) x *= c;
  return a;
}

bool operator==(const LocVec& a, const LocVec& b) {
  size_t n = std::max(a.v.size(), b.v.size());
  for (size_t i = 0; i < n; ++i) {
    RatFn x = i < a.v.size() ? a.v[i] : RatFn(), y = i < b.v.size() ? b.v[i] : RatFn();
    if (!(x == y)) return false;
  }
  return true;
}

MultiSeries<ChowClass> ISeries::to_basis() const {
  return s.map<ChowClass>([&](const LocVec& v) { return ring->from_restrictions(v.v); });
}

MultiSeries<LocVec> GSeries::coords() const {
  return s.map<LocVec>([&](const LocVec& v) { return LocVec{module->coords_from_restrictions(v.v)}; });
}

RatFn zpow(const Params& p, int e) {
  if (e >= 0) return RatFn(p.z().pow(e));
  return RatFn::inv_product(std::vector<Poly>(-e, p.z()));
}

std::vector<std::vector<int>> effective_degrees(int k, int c, int Dq) {
  std::vector<std::vector<int>> out;
  std::vector<int> d(k, 0);
  std::function<void(int, int)> rec = [&](int i, int budget) {
    if (i == k) {
      out.push_back(d);
      return;
    }
    for (int a = 0; a <= budget; ++a) {
      d[i] = i < c ? -a : a;
      rec(i + 1, budget - a);
    }
    d[i] = 0;
  };
  rec(0, Dq);
  return out;
}

static std::vector<std::vector<int>> multi_indices(int nv, int maxdeg) {
  std::vector<std::vector<int>> out;
  std::vector<int> m(nv, 0);
  std::function<void(int, int)> rec = [&](int i, int budget) {
    if (i == nv) {
      out.push_back(m);
      return;
    }
    for (int a = 0; a <= budget; ++a) {
      m[i] = a;
      rec(i + 1, budget - a);
    }
    m[i] = 0;
  };
  rec(0, maxdeg);
  return out;
}

// restriction of I^c_{T,d} at the fixed point whose H values are r
static RatFn toric_value(const Params& p, int c, const std::vector<Poly>& r, const std::vector<int>& d) {
  Poly num(1);
  std::vector<Poly> den;
  Poly z = p.z();
  for (int i = 0; i < p.k; ++i)
    for (int j = 0; j < p.n; ++j) {
      if (i >= c) {
        for (int l = -d[i] + 1; l <= 0; ++l) num *= p.sig_p(j) - r[i] + z * Rat(l);
        for (int l = 1; l <= d[i]; ++l) den.push_back(r[i] - p.lam_p(j) + z * Rat(l));
      } else {
        for (int l = d[i] + 1; l <= 0; ++l) num *= r[i] - p.lam_p(j) + z * Rat(l);
        for (int l = 1; l <= -d[i]; ++l) den.push_back(p.sig_p(j) - r[i] + z * Rat(l));
      }
    }
  return RatFn(num) * RatFn::inv_product(den);
}

static std::vector<Poly> roots_at(const AbelianChowRing& R, int F) {
  auto t = R.tuple(F);
  std::vector<Poly> r;
  for (int i = 0; i < R.k(); ++i) r.push_back(R.root(i, t[i]));
  return r;
}

LocVec toric_coeff_loc(const AbelianChowRing& R, const std::vector<int>& d) {
  LocVec out;
  for (int F = 0; F < R.dim(); ++F) out.v.push_back(toric_value(R.params(), R.c(), roots_at(R, F), d));
  return out;
}

ChowClass toric_coeff(const AbelianChowRing& R, const std::vector<int>& d) {
  for (int i = 0; i < R.k(); ++i)
    if ((i < R.c() && d[i] > 0) || (i >= R.c() && d[i] < 0)) throw ContractError("degree not effective for chamber");
  return R.from_restrictions(toric_coeff_loc(R, d).v);
}

static VarSpec abelian_spec(const AbelianChowRing& R, const Trunc& t, int nx) {
  VarSpec s;
  for (int i = 0; i < R.k(); ++i) {
    s.q.push_back("q" + std::to_string(i + 1));
    s.logy.push_back("logy" + std::to_string(i + 1) + (i < R.c() ? "-" : "+"));
  }
  for (int j = 0; j < nx; ++j) s.x.push_back("x" + std::to_string(j + 1));
  s.Dq = t.Dq, s.L = t.L, s.X = t.X;
  return s;
}

static ISeries build_toric(std::shared_ptr<const AbelianChowRing> R, const Trunc& t, const MonomialCatalog* cat) {
  const Params& p = R->params();
  int k = p.k, nx = cat ? cat->M() : 0;
  VarSpec spec = abelian_spec(*R, t, nx);
  ISeries out{R, MultiSeries<LocVec>(spec)};
  auto ms = multi_indices(k, t.L);
  auto as = multi_indices(nx, nx ? t.X : 0);
  Poly z = p.z();
  std::vector<RatFn> zp;
  for (int e = 0; e <= t.L + t.X + 1; ++e) zp.push_back(zpow(p, 1 - e));
  for (auto& d : effective_degrees(k, R->c(), t.Dq)) {
    std::map<Exps, LocVec> acc;
    for (int F = 0; F < R->dim(); ++F) {
      auto r = roots_at(*R, F);
      RatFn Id = toric_value(p, R->c(), r, d);
      std::vector<Poly> w;
      for (int i = 0; i < k; ++i) w.push_back(r[i] + z * Rat(d[i]));
      // powers of eps_i * w_i and of mu_j(w)
      std::vector<std::vector<Poly>> wp(k), mp(nx);
      for (int i = 0; i < k; ++i) {
        Poly base = w[i] * Rat(i < R->c() ? -1 : 1);
        wp[i].push_back(Poly(1));
        for (int e = 1; e <= t.L; ++e) wp[i].push_back(wp[i].back() * base);
      }
      for (int j = 0; j < nx; ++j) {
        Poly base = cat->eval_mu(j, w);
        mp[j].push_back(Poly(1));
        for (int e = 1; e <= t.X; ++e) mp[j].push_back(mp[j].back() * base);
      }
      for (auto& m : ms)
        for (auto& a : as) {
          Poly poly(1);
          Rat fact = 1;
          int deg = 0;
          for (int i = 0; i < k; ++i) {
            poly *= wp[i][m[i]];
            fact *= factorial(m[i]);
            deg += m[i];
          }
          for (int j = 0; j < nx; ++j) {
            poly *= mp[j][a[j]];
            fact *= factorial(a[j]);
            deg += a[j];
          }
          Exps e(d);
          e.insert(e.end(), m.begin(), m.end());
          e.insert(e.end(), a.begin(), a.end());
          auto& slot = acc[e];
          if (slot.v.empty()) slot.v.resize(R->dim());
          slot.v[F] = RatFn(poly * Rat(1 / fact)) * Id * zp[deg];
        }
    }
    for (auto& [e, v] : acc) out.s.add_term(e, v);
  }
  return out;
}

ISeries small_I_toric(std::shared_ptr<const AbelianChowRing> R, const Trunc& t) {
  Trunc u = t;
  u.X = 0;
  return build_toric(std::move(R), u, nullptr);
}

ISeries big_I_toric(const Params& p, int side, const MonomialCatalog& cat, const Trunc& t) {
  auto R = AbelianChowRing::make(p, side > 0 ? 0 : p.k);
  return build_toric(R, t, &cat);
}

ISeries apply_partial_delta(const ISeries& s, const RootData& roots) {
  const AbelianChowRing& R = *s.ring;
  if (R.c() != 0 && R.c() != R.k()) throw ContractError("partial Delta needs c = 0 or c = k");
  RatFn z(R.params().z());
  MultiSeries<LocVec> cur = s.s;
  for (auto [i, j] : roots.roots) {
    int si = i < R.c() ? -1 : 1, sj = j < R.c() ? -1 : 1;
    auto a = cur.derivative_logy(i).scaled(Rat(si));
    auto b = cur.derivative_logy(j).scaled(Rat(-sj));
    cur = (a + b).scaled_by(z);
  }
  auto& sp = s.s.spec();
  return ISeries{s.ring, cur.truncated(sp.Dq, std::max(0, sp.L - roots.size()), sp.X)};
}

ISeries weyl_permute(const ISeries& s, const Perm& w) {
  const AbelianChowRing& R = *s.ring;
  const VarSpec& sp = s.s.spec();
  if (sp.nx()) throw ContractError("weyl_permute acts on the small series only");
  MultiSeries<LocVec> out(sp);
  int k = R.k();
  for (auto& [e, v] : s.s.terms()) {
    Exps f(e.size());
    for (int i = 0; i < k; ++i) {
      f[w[i]] = e[i];
      f[k + w[i]] = e[k + i];
    }
    LocVec nv;
    nv.v.resize(R.dim());
    for (int F = 0; F < R.dim(); ++F) {
      auto t = R.tuple(F), u = t;
      for (int i = 0; i < k; ++i) u[i] = t[w[i]];
      nv.v[F] = v.v[R.index(u)];
    }
    out.add_term(f, nv);
  }
  return ISeries{s.ring, out};
}

static VarSpec grass_spec(int N, const Trunc& t) {
  VarSpec s;
  s.q = {"Q"};
  s.logy = {"L"};
  for (int j = 0; j < N; ++j) s.x.push_back("X" + std::to_string(j + 1));
  s.Dq = t.Dq, s.L = t.L, s.X = t.X;
  return s;
}

ISeries specialized_delta_series(const Params& p, int side, const Trunc& t, const RootData& roots) {
  auto cat = MonomialCatalog::build(p.k, p.n);
  int k = p.k;
  Trunc big = t;
  big.L = t.L + roots.size();
  ISeries D = apply_partial_delta(big_I_toric(p, side, cat, big), roots);
  // q_i -> (-1)^{k-1} Q, log y_i -> L, x_i -> X_{J(i)}
  MultiSeries<LocVec> spec_s(grass_spec(cat.N(), t));
  for (auto& [e, v] : D.s.terms()) {
    Exps f(2 + cat.N(), 0);
    for (int i = 0; i < k; ++i) f[0] += e[i], f[1] += e[k + i];
    for (int j = 0; j < cat.M(); ++j) f[2 + cat.orbit[j]] += e[2 * k + j];
    int sgn = ((k - 1) * (f[0] % 2 + 2)) % 2 ? -1 : 1;
    spec_s.add_term(f, sgn > 0 ? v : v * Rat(-1));
  }
  return ISeries{D.ring, spec_s};
}

DivisibilityReport delta_divisibility(const ISeries& s, const RootData& roots) {
  DivisibilityReport rep;
  Poly dpoly = roots.delta_poly(s.ring->params());
  ChowClass delta = s.ring->normal_form(dpoly);
  for (auto& [e, v] : s.s.terms()) {
    ++rep.checked;
    ChowClass a = s.ring->from_restrictions(v.v);
    if (!is_antiinvariant(a)) {
      rep.antiinvariant = false;
      rep.divisible = false;
      continue;
    }
    try {
      ChowClass b = divide_by_delta(a);
      // divide_by_delta uses the standard Delta; fix the sign for other root choices
      if (!(b * delta == a)) b = -b;
      if (!(b * delta == a) || !is_invariant(b)) rep.divisible = false;
    } catch (const ConsistencyError&) {
      rep.divisible = false;
    }
  }
  return rep;
}

static GSeries formula_A(const Params& p, int side, const Trunc& t, const RootData& roots) {
  auto mod = std::make_shared<NonabelianChowModule>(p, side);
  int k = p.k;
  ISeries D = specialized_delta_series(p, side, t, roots);
  auto R = D.ring;
  const MultiSeries<LocVec>& spec_s = D.s;
  // adjacent transpositions generate S_k
  std::vector<Perm> gens;
  for (int i = 0; i + 1 < k; ++i) {
    Perm w(k);
    for (int j = 0; j < k; ++j) w[j] = j;
    std::swap(w[i], w[i + 1]);
    gens.push_back(w);
  }
  Poly dpoly = roots.delta_poly(p);
  std::vector<RatFn> dinv;
  for (int J = 0; J < mod->rank(); ++J) {
    auto tu = R->tuple(mod->ordered_point(J));
    Poly dv = dpoly;
    for (int i = 0; i < k; ++i) dv = dv.subst(p.v_H(i), R->root(i, tu[i]));
    if (dv.is_zero()) throw ConsistencyError("Delta vanishes at a fixed point");
    dinv.push_back(RatFn::inv_product({dv}));
  }
  GSeries out{mod, MultiSeries<LocVec>(spec_s.spec())};
  for (auto& [e, v] : spec_s.terms()) {
    for (int F = 0; F < R->dim(); ++F) {
      auto tu = R->tuple(F), u = tu;
      for (auto& w : gens) {
        for (int i = 0; i < k; ++i) u[i] = tu[w[i]];
        if (!(v.v[R->index(u)] == -v.v[F]))
          throw ConsistencyError("formula A: a coefficient of the Delta-derivative is not anti-invariant");
      }
    }
    // the quotient by Delta is symmetric; restrict it at the k-subsets
    LocVec g;
    for (int J = 0; J < mod->rank(); ++J) g.v.push_back(v.v[mod->ordered_point(J)] * dinv[J]);
    out.s.add_term(e, g);
  }
  return out;
}

namespace {
// exact element of Q(i)
struct QI {
  Rat re, im;
};
QI exp_i_pi(const Rat& r) {
  // e^{i pi r} for r in (1/2)Z
  Rat twice = r * 2;
  if (twice.get_den() != 1) throw ConsistencyError("phase outside Q(i)");
  Int m = twice.get_num() % 4;
  if (m < 0) m += 4;
  long q = m.get_si();
  return QI{q == 0 ? Rat(1) : q == 2 ? Rat(-1) : Rat(0), q == 1 ? Rat(1) : q == 3 ? Rat(-1) : Rat(0)};
}
}  // namespace

static GSeries formula_B(const Params& p, int side, const Trunc& t, const RootData& roots) {
  auto mod = std::make_shared<NonabelianChowModule>(p, side);
  const MonomialCatalog& cat = mod->catalog();
  auto R = mod->abelian();
  int k = p.k, N = cat.N();
  Poly z = p.z();
  auto zeta = roots.zeta();
  auto a = roots.a(side);
  // exponent of the shift, as a class: sum_i (i pi a_i) * (side H_i)/z, minus the prefactor
  Poly theta;
  for (int i = 0; i < k; ++i) theta += p.H(i) * Rat(a[i] * side) - p.H(i) * Rat(zeta[i]);
  if (!theta.is_zero()) throw ConsistencyError("formula B: prefactor does not cancel the shift");
  GSeries out{mod, MultiSeries<LocVec>(grass_spec(N, t))};
  auto as = multi_indices(N, t.X);
  std::vector<RatFn> zp;
  for (int e = 0; e <= t.L + t.X + 1; ++e) zp.push_back(zpow(p, 1 - e));
  for (auto& d : effective_degrees(k, side > 0 ? 0 : k, t.Dq)) {
    // phase e^{i pi sum_i a_i (side d_i)}
    long ad = 0, dsum = 0;
    for (int i = 0; i < k; ++i) ad += long(a[i]) * side * d[i], dsum += d[i];
    QI ph = exp_i_pi(Rat(ad));
    if (ph.im != 0) throw ConsistencyError("formula B: non-real phase");
    std::map<Exps, LocVec> acc;
    for (int J = 0; J < mod->rank(); ++J) {
      int F = mod->ordered_point(J);
      auto tu = R->tuple(F);
      std::vector<Poly> r, w;
      for (int i = 0; i < k; ++i) {
        r.push_back(R->root(i, tu[i]));
        w.push_back(r.back() + z * Rat(d[i]));
      }
      Poly eig(1), dl(1), sw;
      for (auto [i, j] : roots.roots) {
        eig *= w[i] - w[j];
        dl *= r[i] - r[j];
      }
      for (int i = 0; i < k; ++i) sw += w[i] * Rat(side);
      RatFn base = toric_value(p, R->c(), r, d) * RatFn(eig) / RatFn(dl) * ph.re;
      std::vector<Poly> Pw;
      for (int j = 0; j < N; ++j) Pw.push_back(cat.eval_P(j, w));
      for (int M = 0; M <= t.L; ++M)
        for (auto& av : as) {
          Poly poly = sw.pow(M);
          Rat fact = factorial(M);
          int deg = M;
          for (int j = 0; j < N; ++j) {
            poly *= Pw[j].pow(av[j]);
            fact *= factorial(av[j]);
            deg += av[j];
          }
          Exps e{int(dsum), M};
          e.insert(e.end(), av.begin(), av.end());
          auto& slot = acc[e];
          if (slot.v.empty()) slot.v.resize(mod->rank());
          slot.v[J] = RatFn(poly * Rat(1 / fact)) * base * zp[deg];
        }
    }
    for (auto& [e, v] : acc) out.s.add_term(e, v);
  }
  return out;
}

GSeries abelianize_IG(const Params& p, int side, Formula f, const Trunc& t, const RootData& roots) {
  if (roots.k != p.k) throw ContractError("root data rank mismatch");
  return f == Formula::A ? formula_A(p, side, t, roots) : formula_B(p, side, t, roots);
}

GSeries abelianize_IG(const Params& p, int side, Formula f, const Trunc& t) {
  return abelianize_IG(p, side, f, t, RootData::standard(p.k));
}

bool abelianization_factor_check(const Params& p, const std::vector<int>& d) {
  Poly z = p.z();
  RatFn lhs(1), rhs(1);
  for (int i = 0; i < p.k; ++i)
    for (int j = 0; j < p.k; ++j) {
      if (i == j) continue;
      Poly c = p.H(i) - p.H(j);
      int b = d[i] - d[j];
      for (int l = 1; l <= b; ++l) lhs *= RatFn(c + z * Rat(l));
      for (int l = b + 1; l <= 0; ++l) lhs /= RatFn(c + z * Rat(l));
      if (b > 0) rhs *= RatFn(c + z * Rat(b)) * RatFn::inv_product({c}) * Rat(b % 2 ? -1 : 1);
    }
  return lhs == rhs;
}

BigPointReport bigness_check(const GSeries& ig) {
  BigPointReport rep;
  const NonabelianChowModule& m = *ig.module;
  int N = m.catalog().N();
  auto get = [&](const Exps& e) {
    auto* v = ig.s.find(e);
    std::vector<RatFn> out(m.rank());
    if (v)
      for (int J = 0; J < m.rank(); ++J) out[J] = v->v[J];
    return out;
  };
  Exps e(2 + N, 0);
  e[1] = 1;
  rep.derivative_matrix.push_back(get(e));
  for (int j = 0; j < N; ++j) {
    Exps f(2 + N, 0);
    f[2 + j] = 1;
    rep.derivative_matrix.push_back(get(f));
  }
  rep.matches_expected = true;
  for (int b = 0; b <= N; ++b)
    if (rep.derivative_matrix[b] != m.restrict_all(m.basis()[b])) rep.matches_expected = false;
  rep.rank = rank(rep.derivative_matrix);
  rep.basis_flag = rep.rank == N + 1;
  return rep;
}

}  // namespace flop
