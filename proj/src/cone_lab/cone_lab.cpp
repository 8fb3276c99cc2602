#include "flop/cone_lab.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "flop/errors.hpp"

namespace flop::cone {

AlgPtr make_alg(std::vector<std::string> gens, int order) {
  if (gens.size() > size_t(kMaxVars)) throw ContractError("cone: too many generators");
  if (order < 0) throw ContractError("cone: negative truncation order");
  auto a = std::make_shared<AlgSpec>();
  a->gens = std::move(gens);
  a->order = order;
  return a;
}

// ---------------------------------------------------------------- TA

namespace {

Poly truncate(const Poly& p, int order) {
  std::vector<Term> keep;
  for (auto& t : p.terms())
    if (mono_deg(t.m) <= order) keep.push_back(t);
  if (keep.size() == p.terms().size()) return p;
  return Poly::from_terms(std::move(keep));
}

const AlgPtr& pick(const AlgPtr& a, const AlgPtr& b) {
  if (a && b && a != b) throw SpecError("cone: elements of different algebras");
  return a ? a : b;
}

}  // namespace

TA::TA(AlgPtr a, const Poly& p) : a_(std::move(a)), p_(a_ ? truncate(p, a_->order) : p) {}

TA TA::constant(AlgPtr a, const Rat& c) { return TA(std::move(a), Poly(c)); }

TA TA::gen(AlgPtr a, int i) {
  if (!a || i < 0 || i >= int(a->gens.size())) throw ContractError("cone: bad generator index");
  return TA(a, Poly::var(i));
}

int TA::valuation() const {
  if (p_.is_zero()) return a_ ? a_->order + 1 : 0;
  return mono_deg(p_.terms().front().m);
}

TA TA::derivative(int g) const { return TA(a_, p_.derivative(g)); }

TA TA::operator-() const { return TA(a_, -p_); }

TA& TA::operator+=(const TA& o) {
  a_ = pick(a_, o.a_);
  p_ += o.p_;
  return *this;
}

TA& TA::operator-=(const TA& o) {
  a_ = pick(a_, o.a_);
  p_ -= o.p_;
  return *this;
}

TA operator*(const TA& a, const TA& b) {
  const AlgPtr& al = pick(a.a_, b.a_);
  if (a.is_zero() || b.is_zero()) return TA(al, Poly());
  if (!al) return TA(al, a.p_ * b.p_);
  int ord = al->order;
  std::vector<Term> out;
  for (auto& x : a.p_.terms()) {
    int dx = mono_deg(x.m);
    for (auto& y : b.p_.terms()) {
      if (dx + mono_deg(y.m) > ord) break;  // ascending degree within b
      out.push_back({mono_mul(x.m, y.m), x.c * y.c});
    }
  }
  TA r;
  r.a_ = al;
  r.p_ = Poly::from_terms(std::move(out));
  return r;
}

TA operator*(TA a, const Rat& c) {
  a.p_ *= c;
  return a;
}

TA TA::pow(int e) const {
  if (e < 0) throw ContractError("cone: negative power");
  TA r = constant(a_, Rat(1));
  for (int i = 0; i < e && !r.is_zero(); ++i) r = r * *this;
  return r;
}

TA TA::compose(const std::vector<std::optional<TA>>& vals) const {
  if (!a_) return *this;
  int ng = int(a_->gens.size());
  std::vector<std::vector<TA>> pw(ng);
  auto power = [&](int v, int e) -> const TA& {
    auto& P = pw[v];
    if (P.empty()) P.push_back(constant(a_, Rat(1)));
    while (int(P.size()) <= e) {
      TA base = (v < int(vals.size()) && vals[v]) ? *vals[v] : gen(a_, v);
      P.push_back(P.back() * base);
    }
    return P[e];
  };
  TA acc(a_, Poly());
  for (auto& t : p_.terms()) {
    TA x = constant(a_, t.c);
    for (int v = 0; v < ng && !x.is_zero(); ++v) {
      int e = mono_exp(t.m, v);
      if (e) x = x * power(v, e);
    }
    acc += x;
  }
  return acc;
}

TA TA::inverse() const {
  Rat c0 = constant_term();
  if (c0 == 0) throw ContractError("cone: inverse of a nilpotent element");
  Rat ic = 1 / c0;
  TA u = *this * ic - constant(a_, Rat(1));  // nilpotent
  TA term = constant(a_, Rat(1)), acc = term;
  for (int k = 1; k <= (a_ ? a_->order + 1 : 64); ++k) {
    term = -(term * u);
    if (term.is_zero()) break;
    acc += term;
  }
  return acc * ic;
}

std::string TA::str() const {
  if (!a_) return p_.is_zero() ? "0" : p_.str({});
  return p_.str(a_->gens);
}

// ---------------------------------------------------------------- GVec

TA GVec::at(int zp, int alpha) const {
  auto it = c.find(zp);
  if (it == c.end()) return TA();
  return it->second[alpha];
}

void GVec::add(int zp, int alpha, const TA& v) {
  if (v.is_zero()) return;
  auto& row = c[zp];
  if (row.empty()) row.resize(N);
  row[alpha] += v;
}

void GVec::prune() {
  for (auto it = c.begin(); it != c.end();) {
    bool z = std::all_of(it->second.begin(), it->second.end(), [](const TA& t) { return t.is_zero(); });
    it = z ? c.erase(it) : std::next(it);
  }
}

bool GVec::is_zero() const {
  for (auto& [p, row] : c)
    for (auto& t : row)
      if (!t.is_zero()) return false;
  return true;
}

int GVec::min_pow() const { return c.empty() ? 0 : c.begin()->first; }
int GVec::max_pow() const { return c.empty() ? 0 : c.rbegin()->first; }

GVec GVec::shifted(int s) const {
  GVec r(N);
  for (auto& [p, row] : c) r.c[p + s] = row;
  return r;
}

GVec GVec::part_ge(int p) const {
  GVec r(N);
  for (auto it = c.lower_bound(p); it != c.end(); ++it) r.c.insert(*it);
  return r;
}

GVec GVec::compose(const std::vector<std::optional<TA>>& vals) const {
  GVec r(N);
  for (auto& [p, row] : c)
    for (int a = 0; a < N; ++a) r.add(p, a, row[a].compose(vals));
  r.prune();
  return r;
}

GVec GVec::derivative(int g) const {
  GVec r(N);
  for (auto& [p, row] : c)
    for (int a = 0; a < N; ++a) r.add(p, a, row[a].derivative(g));
  r.prune();
  return r;
}

GVec GVec::operator-() const {
  GVec r(N);
  for (auto& [p, row] : c)
    for (int a = 0; a < N; ++a) r.add(p, a, -row[a]);
  return r;
}

GVec operator+(const GVec& a, const GVec& b) {
  if (a.N != b.N) throw SpecError("cone: rank mismatch");
  GVec r = a;
  for (auto& [p, row] : b.c)
    for (int i = 0; i < b.N; ++i) r.add(p, i, row[i]);
  r.prune();
  return r;
}

GVec operator-(const GVec& a, const GVec& b) { return a + (-b); }

GVec operator*(const GVec& a, const TA& s) {
  GVec r(a.N);
  for (auto& [p, row] : a.c)
    for (int i = 0; i < a.N; ++i) r.add(p, i, row[i] * s);
  r.prune();
  return r;
}

std::string GVec::str() const {
  std::ostringstream os;
  for (auto& [p, row] : c) {
    os << "z^" << p << ": [";
    for (int i = 0; i < N; ++i) os << (i ? ", " : "") << row[i].str();
    os << "]\n";
  }
  if (c.empty()) os << "0\n";
  return os.str();
}

// ---------------------------------------------------------------- GMat

GMat GMat::identity(AlgPtr a, int n) {
  GMat m(n);
  for (int i = 0; i < n; ++i) m.add(0, i, i, TA::constant(a, Rat(1)));
  return m;
}

TA GMat::at(int zp, int r, int s) const {
  auto it = c.find(zp);
  if (it == c.end()) return TA();
  return it->second[r][s];
}

void GMat::add(int zp, int r, int s, const TA& v) {
  if (v.is_zero()) return;
  auto& m = c[zp];
  if (m.empty()) m.assign(N, std::vector<TA>(N));
  m[r][s] += v;
}

void GMat::prune() {
  for (auto it = c.begin(); it != c.end();) {
    bool z = true;
    for (auto& row : it->second)
      for (auto& t : row) z = z && t.is_zero();
    it = z ? c.erase(it) : std::next(it);
  }
}

bool GMat::is_zero() const {
  for (auto& [p, m] : c)
    for (auto& row : m)
      for (auto& t : row)
        if (!t.is_zero()) return false;
  return true;
}

GMat GMat::compose(const std::vector<std::optional<TA>>& vals) const {
  GMat r(N);
  for (auto& [p, m] : c)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) r.add(p, i, j, m[i][j].compose(vals));
  r.prune();
  return r;
}

bool GMat::identity_mod_nilpotents() const {
  for (auto& [p, m] : c)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        Rat want = (p == 0 && i == j) ? Rat(1) : Rat(0);
        if (m[i][j].constant_term() != want) return false;
      }
  return c.count(0) > 0;
}

GMat operator+(const GMat& a, const GMat& b) {
  if (a.N != b.N) throw SpecError("cone: rank mismatch");
  GMat r = a;
  for (auto& [p, m] : b.c)
    for (int i = 0; i < b.N; ++i)
      for (int j = 0; j < b.N; ++j) r.add(p, i, j, m[i][j]);
  r.prune();
  return r;
}

GMat operator-(const GMat& a, const GMat& b) {
  GMat nb(b.N);
  for (auto& [p, m] : b.c)
    for (int i = 0; i < b.N; ++i)
      for (int j = 0; j < b.N; ++j) nb.add(p, i, j, -m[i][j]);
  return a + nb;
}

GMat operator*(const GMat& a, const GMat& b) {
  if (a.N != b.N) throw SpecError("cone: rank mismatch");
  int N = a.N;
  GMat r(N);
  for (auto& [p, x] : a.c)
    for (auto& [q, y] : b.c)
      for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) {
          if (x[i][k].is_zero()) continue;
          for (int j = 0; j < N; ++j)
            if (!y[k][j].is_zero()) r.add(p + q, i, j, x[i][k] * y[k][j]);
        }
  r.prune();
  return r;
}

GVec operator*(const GMat& a, const GVec& v) {
  if (a.N != v.N) throw SpecError("cone: rank mismatch");
  GVec r(v.N);
  for (auto& [p, x] : a.c)
    for (auto& [q, y] : v.c)
      for (int i = 0; i < v.N; ++i)
        for (int k = 0; k < v.N; ++k)
          if (!x[i][k].is_zero() && !y[k].is_zero()) r.add(p + q, i, x[i][k] * y[k]);
  r.prune();
  return r;
}

GMat GMat::inverse() const {
  if (!identity_mod_nilpotents()) throw ContractError("cone: matrix is not the identity mod nilpotents");
  AlgPtr al;
  for (auto& [p, m] : c)
    for (auto& row : m)
      for (auto& t : row)
        if (t.alg()) al = t.alg();
  GMat id = identity(al, N);
  GMat x = id - *this;  // nilpotent entries
  GMat acc = id, term = id;
  int cap = al ? al->order + 1 : 64;
  for (int k = 1; k <= cap; ++k) {
    term = term * x;
    if (term.is_zero()) break;
    acc = acc + term;
  }
  return acc;
}

std::string GMat::str() const {
  std::ostringstream os;
  for (auto& [p, m] : c) {
    os << "z^" << p << ":";
    for (auto& row : m) {
      os << " [";
      for (int j = 0; j < N; ++j) os << (j ? ", " : "") << row[j].str();
      os << "]";
    }
    os << "\n";
  }
  if (c.empty()) os << "0\n";
  return os.str();
}

// ---------------------------------------------------------------- theories

Genus0Theory::Genus0Theory(int N, RatMat gram) : N_(N), g_(std::move(gram)) {
  if (N < 1 || int(g_.size()) != N) throw ContractError("cone: gram size");
  for (auto& r : g_)
    if (int(r.size()) != N) throw ContractError("cone: gram size");
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (g_[i][j] != g_[j][i]) throw ContractError("cone: gram not symmetric");
  // Gauss-Jordan
  RatMat a = g_;
  ginv_.assign(N, std::vector<Rat>(N, Rat(0)));
  for (int i = 0; i < N; ++i) ginv_[i][i] = 1;
  for (int col = 0; col < N; ++col) {
    int piv = -1;
    for (int r = col; r < N; ++r)
      if (a[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw ContractError("cone: gram is degenerate");
    std::swap(a[piv], a[col]);
    std::swap(ginv_[piv], ginv_[col]);
    Rat inv = 1 / a[col][col];
    for (int j = 0; j < N; ++j) {
      a[col][j] *= inv;
      ginv_[col][j] *= inv;
    }
    for (int r = 0; r < N; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rat f = a[r][col];
      for (int j = 0; j < N; ++j) {
        a[r][j] -= f * a[col][j];
        ginv_[r][j] -= f * ginv_[col][j];
      }
    }
  }
}

Rat Genus0Theory::correlator(std::vector<Insertion> ins) const {
  for (auto& i : ins)
    if (i.alpha < 0 || i.alpha >= N_ || i.psi < 0) throw ContractError("cone: bad insertion");
  std::sort(ins.begin(), ins.end());
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = memo_.find(ins);
    if (it != memo_.end()) return it->second;
  }
  Rat v = raw(ins);
  std::lock_guard<std::mutex> lk(mu_);
  memo_.emplace(std::move(ins), v);
  return v;
}

Rat point_psi_oracle(const std::vector<int>& k) {
  int m = int(k.size());
  if (m < 3) throw ContractError("psi oracle: need at least 3 points");
  int s = 0;
  Rat den = 1;
  for (int x : k) {
    if (x < 0) return 0;
    s += x;
    den *= factorial(x);
  }
  if (s != m - 3) return 0;
  return factorial(m - 3) / den;
}

Rat point_psi_string_reduction(const std::vector<int>& k) {
  int m = int(k.size());
  if (m < 3) throw ContractError("psi oracle: need at least 3 points");
  int s = 0;
  for (int x : k) {
    if (x < 0) return 0;
    s += x;
  }
  if (s != m - 3) return 0;
  if (m == 3) return 1;
  // some exponent vanishes since the sum is below m; forget that point
  auto z = std::find(k.begin(), k.end(), 0);
  std::vector<int> rest(k.begin(), z);
  rest.insert(rest.end(), z + 1, k.end());
  Rat acc = 0;
  for (size_t j = 0; j < rest.size(); ++j) {
    if (rest[j] == 0) continue;
    auto r = rest;
    --r[j];
    acc += point_psi_string_reduction(r);
  }
  return acc;
}

Rat PointTheory::raw(const std::vector<Insertion>& s) const {
  if (s.size() < 3) return 0;
  std::vector<int> k;
  for (auto& i : s) k.push_back(i.psi);
  return point_psi_oracle(k);
}

TableTheory::TableTheory(int N, RatMat gram, std::map<std::vector<Insertion>, Rat> table)
    : Genus0Theory(N, std::move(gram)) {
  for (auto& [key, v] : table) {
    auto k = key;
    std::sort(k.begin(), k.end());
    t_[k] = v;
  }
}

Rat TableTheory::raw(const std::vector<Insertion>& s) const {
  auto it = t_.find(s);
  return it == t_.end() ? Rat(0) : it->second;
}

TamperedTheory::TamperedTheory(const Genus0Theory& base, std::map<std::vector<Insertion>, Rat> overrides)
    : Genus0Theory(base.rank(), base.gram()), base_(base) {
  for (auto& [key, v] : overrides) {
    auto k = key;
    std::sort(k.begin(), k.end());
    over_[k] = v;
  }
}

Rat TamperedTheory::raw(const std::vector<Insertion>& s) const {
  auto it = over_.find(s);
  return it != over_.end() ? it->second : base_.correlator(s);
}

// ---------------------------------------------------------------- correlators

TA correlator_at_t(const Genus0Theory& th, const std::vector<Insertion>& ins, const TPoint& t,
                   const AlgPtr& alg) {
  std::vector<Insertion> slot;
  std::vector<std::vector<TA>> pw;  // t^n / n!
  for (auto& [key, v] : t) {
    if (v.is_zero()) continue;
    if (!v.nilpotent()) throw ContractError("cone: t-coordinates must be nilpotent");
    slot.push_back(key);
    std::vector<TA> p{TA::constant(alg, Rat(1))};
    for (int n = 1;; ++n) {
      TA nx = p.back() * v * (Rat(1) / Rat(n));
      if (nx.is_zero()) break;
      p.push_back(nx);
    }
    pw.push_back(std::move(p));
  }
  TA acc(alg, Poly());
  std::vector<Insertion> cur = ins;
  std::function<void(size_t, const TA&)> rec = [&](size_t i, const TA& coef) {
    if (i == slot.size()) {
      Rat c = th.correlator(cur);
      if (c != 0) acc += coef * c;
      return;
    }
    size_t base = cur.size();
    for (size_t n = 0; n < pw[i].size(); ++n) {
      TA cf = n ? coef * pw[i][n] : coef;
      if (cf.is_zero()) break;
      if (n) cur.push_back(slot[i]);
      rec(i + 1, cf);
    }
    cur.resize(base);
  };
  rec(0, TA::constant(alg, Rat(1)));
  return acc;
}

namespace {

// largest psi exponent that can carry a nonzero value at this truncation
int psi_cap(const AlgPtr& alg) { return alg->order + 2; }

// sum_{l, b} <<phi_b psi^l>>(t) phi^b (-z)^{-l-1}
void add_p_part(const Genus0Theory& th, const AlgPtr& alg, const TPoint& t, GVec& out) {
  int N = th.rank();
  for (int l = 0; l <= psi_cap(alg); ++l) {
    Rat sg = (l % 2 == 0) ? Rat(-1) : Rat(1);
    for (int b = 0; b < N; ++b) {
      TA v = correlator_at_t(th, {{b, l}}, t, alg);
      if (v.is_zero()) continue;
      for (int g = 0; g < N; ++g)
        if (th.gram_inv()[b][g] != 0) out.add(-l - 1, g, v * (sg * th.gram_inv()[b][g]));
    }
  }
  out.prune();
}

}  // namespace

GVec graph_point(const Genus0Theory& th, const AlgPtr& alg, const TPoint& t) {
  GVec K(th.rank());
  K.add(1, 0, TA::constant(alg, Rat(-1)));
  for (auto& [key, v] : t) K.add(key.psi, key.alpha, v);
  add_p_part(th, alg, t, K);
  return K;
}

TPoint t_coords(const GVec& K) {
  TPoint t;
  for (auto& [p, row] : K.c) {
    if (p < 0) continue;
    for (int a = 0; a < K.N; ++a) {
      TA v = row[a];
      if (p == 1 && a == 0) v += TA::constant(v.alg(), Rat(1));
      if (!v.is_zero()) t[{a, p}] = v;
    }
  }
  return t;
}

GVec j_function(const Genus0Theory& th, const AlgPtr& alg, const std::vector<int>& tau) {
  if (int(tau.size()) != th.rank()) throw ContractError("cone: need one tau per basis element");
  TPoint t;
  for (int a = 0; a < th.rank(); ++a) t[{a, 0}] = TA::gen(alg, tau[a]);
  return graph_point(th, alg, t);
}

namespace {

// d J / d tau^b = phi_b + sum <<phi_b, phi_c psi^l>>(tau) phi^c (-z)^{-l-1}
GMat dj_exact(const Genus0Theory& th, const AlgPtr& alg, const std::vector<int>& tau) {
  int N = th.rank();
  TPoint t;
  for (int a = 0; a < N; ++a) t[{a, 0}] = TA::gen(alg, tau[a]);
  GMat D = GMat::identity(alg, N);
  for (int l = 0; l <= psi_cap(alg); ++l) {
    Rat sg = (l % 2 == 0) ? Rat(-1) : Rat(1);
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c) {
        TA v = correlator_at_t(th, {{b, 0}, {c, l}}, t, alg);
        if (v.is_zero()) continue;
        for (int g = 0; g < N; ++g)
          if (th.gram_inv()[c][g] != 0) D.add(-l - 1, g, b, v * (sg * th.gram_inv()[c][g]));
      }
  }
  D.prune();
  return D;
}

}  // namespace

Family j_family(const Genus0Theory& th, int order) {
  std::vector<std::string> g;
  std::vector<int> tau;
  for (int a = 0; a < th.rank(); ++a) {
    g.push_back("tau" + std::to_string(a + 1));
    tau.push_back(a);
  }
  return j_family(th, make_alg(g, order), tau);
}

Family j_family(const Genus0Theory& th, const AlgPtr& alg, const std::vector<int>& tau) {
  return {alg, tau, j_function(th, alg, tau), dj_exact(th, alg, tau)};
}

GMat di_matrix(const Family& f) {
  int N = f.I.N;
  if (int(f.tau.size()) != N) throw ContractError("cone: need one tau per basis element");
  if (f.DI) {
    if (!f.DI->identity_mod_nilpotents()) throw ContractError("cone: point family is not big");
    return *f.DI;
  }
  GMat D(N);
  for (int b = 0; b < N; ++b) {
    GVec col = f.I.derivative(f.tau[b]);
    for (auto& [p, row] : col.c)
      for (int a = 0; a < N; ++a) D.add(p, a, b, row[a]);
  }
  D.prune();
  if (!D.identity_mod_nilpotents()) throw ContractError("cone: point family is not big");
  return D;
}

Family reparametrize(const Family& f, const std::vector<TA>& phi) {
  int N = f.I.N;
  if (int(phi.size()) != N) throw ContractError("cone: reparametrization size");
  auto sub = tau_subst(f, phi);
  GMat jac(N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) jac.add(0, a, b, phi[a].derivative(f.tau[b]));
  jac.prune();
  return {f.alg, f.tau, f.I.compose(sub), di_matrix(f).compose(sub) * jac};
}

std::vector<TA> mirror_map(const Family& f) {
  std::vector<TA> m;
  for (int a = 0; a < f.I.N; ++a) m.push_back(f.I.at(0, a));
  return m;
}

std::vector<std::optional<TA>> tau_subst(const Family& f, const std::vector<TA>& vals) {
  std::vector<std::optional<TA>> s(f.alg->gens.size());
  for (size_t a = 0; a < f.tau.size(); ++a) s[f.tau[a]] = vals.at(a);
  return s;
}

GMat v_factor(const Family& J, const Family& I) {
  GMat DJ = di_matrix(J).compose(tau_subst(J, mirror_map(I)));
  return DJ.inverse() * di_matrix(I);
}

namespace {

void require_cone_base(const GVec& K) {
  for (auto& [p, row] : K.c)
    for (int a = 0; a < K.N; ++a) {
      Rat want = (p == 1 && a == 0) ? Rat(-1) : Rat(0);
      if (row[a].constant_term() != want) throw ContractError("cone: point is not -z mod nilpotents");
    }
}

std::vector<TA> z0(const GVec& v) {
  std::vector<TA> r;
  for (int a = 0; a < v.N; ++a) r.push_back(v.at(0, a));
  return r;
}

}  // namespace

ReconstructionResult reconstruct(const GVec& K, const Family& J) {
  require_cone_base(K);
  int N = K.N;
  const AlgPtr& alg = J.alg;
  GMat DJ = di_matrix(J);
  ReconstructionResult R;
  R.t.assign(N, TA(alg, Poly()));
  // z^0 part of DJ(t)^{-1} K vanishes; the string equation makes this a
  // contraction in the nilpotent filtration
  GMat Dinv(N);
  for (int it = 0; it <= alg->order + 2; ++it) {
    Dinv = DJ.compose(tau_subst(J, R.t)).inverse();
    auto e = z0(Dinv * K);
    bool zero = std::all_of(e.begin(), e.end(), [](const TA& x) { return x.is_zero(); });
    R.iterations = it;
    if (zero) {
      R.converged = true;
      break;
    }
    for (int a = 0; a < N; ++a) R.t[a] += e[a];
  }
  if (!R.converged) Dinv = DJ.compose(tau_subst(J, R.t)).inverse();
  R.tJ = R.t;
  R.w = (Dinv * K).part_ge(1).shifted(-1);
  GMat DJt = DJ.compose(tau_subst(J, R.t));
  R.residual = K - (DJt * R.w).shifted(1);
  R.on_cone = R.converged && R.residual.is_zero();
  return R;
}

ReconstructionResult reconstruct(const GVec& K, const Family& I, const Family& J) {
  if (I.alg != J.alg) throw SpecError("cone: families over different algebras");
  ReconstructionResult rj = reconstruct(K, J);
  int N = K.N;
  auto tauI = mirror_map(I);
  // invert tau_I at tJ
  std::vector<TA> s = rj.tJ;
  bool conv = false;
  for (int it = 0; it <= I.alg->order + 2; ++it) {
    auto sub = tau_subst(I, s);
    bool zero = true;
    std::vector<TA> e(N);
    for (int a = 0; a < N; ++a) {
      e[a] = rj.tJ[a] - tauI[a].compose(sub);
      zero = zero && e[a].is_zero();
    }
    if (zero) {
      conv = true;
      break;
    }
    for (int a = 0; a < N; ++a) s[a] += e[a];
  }
  ReconstructionResult R;
  R.tJ = rj.tJ;
  R.t = s;
  R.iterations = rj.iterations;
  R.converged = rj.converged && conv;
  auto sub = tau_subst(I, s);
  GMat V = v_factor(J, I).compose(sub);
  R.w = V.inverse() * rj.w;
  GMat DI = di_matrix(I).compose(sub);
  R.residual = K - (DI * R.w).shifted(1);
  R.on_cone = R.converged && R.residual.is_zero();
  return R;
}

// ---------------------------------------------------------------- axioms

AxiomReport axioms_check(const Genus0Theory& th, int order, int kmax) {
  int N = th.rank();
  int cap = kMaxVars / N - 1;
  if (cap < 1) throw ContractError("axioms: rank too large for the generator budget");
  if (kmax < 0) kmax = std::min(order, cap);
  if (kmax > cap) throw ContractError("axioms: too many descendant directions");
  AxiomReport rep;
  rep.order = order;
  rep.kmax = kmax;

  std::vector<std::string> g;
  for (int a = 0; a < N; ++a)
    for (int k = 0; k <= kmax; ++k) g.push_back("t" + std::to_string(a + 1) + "_" + std::to_string(k));
  auto alg = make_alg(g, order);
  TPoint t;
  for (int a = 0; a < N; ++a)
    for (int k = 0; k <= kmax; ++k) t[{a, k}] = TA::gen(alg, a * (kmax + 1) + k);
  auto cor = [&](const std::vector<Insertion>& ins) { return correlator_at_t(th, ins, t, alg); };

  // dilaton
  {
    TA rhs = cor({}) * Rat(-2);
    for (auto& [key, v] : t) rhs += v * cor({key});
    rep.de = (cor({{0, 1}}) == rhs);
    if (!rep.de) rep.failures.push_back("DE");
  }
  // string
  {
    TA rhs(alg, Poly());
    for (auto& [key, v] : t)
      if (key.psi >= 1) rhs += v * cor({{key.alpha, key.psi - 1}});
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        if (th.gram()[a][b] != 0) rhs += t.at({a, 0}) * t.at({b, 0}) * (th.gram()[a][b] / 2);
    rep.se = (cor({{0, 0}}) == rhs);
    if (!rep.se) rep.failures.push_back("SE");
  }
  // topological recursion
  rep.trr = true;
  int kk = std::min(2, kmax);
  std::vector<Insertion> pool;
  for (int a = 0; a < N; ++a)
    for (int l = 0; l <= 2; ++l) pool.push_back({a, l});
  for (int a = 0; a < N; ++a)
    for (int k = 0; k <= kk; ++k)
      for (size_t i = 0; i < pool.size(); ++i)
        for (size_t j = i; j < pool.size(); ++j) {
          TA lhs = cor({{a, k + 1}, pool[i], pool[j]});
          TA rhs(alg, Poly());
          for (int mu = 0; mu < N; ++mu) {
            TA left = cor({{a, k}, {mu, 0}});
            if (left.is_zero()) continue;
            for (int nu = 0; nu < N; ++nu)
              if (th.gram_inv()[mu][nu] != 0)
                rhs += left * cor({{nu, 0}, pool[i], pool[j]}) * th.gram_inv()[mu][nu];
          }
          ++rep.trr_instances;
          if (lhs != rhs) {
            rep.trr = false;
            std::ostringstream os;
            os << "TRR a=" << a << " k=" << k << " (" << pool[i].alpha << "," << pool[i].psi << ") ("
               << pool[j].alpha << "," << pool[j].psi << ")";
            rep.failures.push_back(os.str());
          }
        }
  return rep;
}

}  // namespace flop::cone
