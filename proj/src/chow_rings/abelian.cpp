#include <map>
#include <mutex>

#include "flop/chow_rings.hpp"
#include "flop/errors.hpp"

namespace flop {

namespace {
std::mutex table_mu;

int ipow(int b, int e) {
  int r = 1;
  while (e--) r *= b;
  return r;
}
}  // namespace

ChowClass::ChowClass(std::shared_ptr<const AbelianChowRing> r, std::vector<RatFn> c)
    : r_(std::move(r)), c_(std::move(c)) {}

bool ChowClass::is_zero() const {
  for (auto& x : c_)
    if (!x.is_zero()) return false;
  return true;
}

ChowClass& ChowClass::operator+=(const ChowClass& o) {
  if (o.c_.empty()) return *this;
  if (c_.empty()) return *this = o;
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

ChowClass ChowClass::operator-() const {
  ChowClass r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

ChowClass operator*(const ChowClass& a, const ChowClass& b) {
  if (a.c_.empty() || b.c_.empty()) return ChowClass();
  const AbelianChowRing& R = *a.r_;
  std::vector<RatFn> out(R.dim());
  for (int i = 0; i < R.dim(); ++i) {
    if (a.c_[i].is_zero()) continue;
    for (int j = 0; j < R.dim(); ++j) {
      if (b.c_[j].is_zero()) continue;
      RatFn s = a.c_[i] * b.c_[j];
      auto& t = R.mul_table(i, j);
      for (int m = 0; m < R.dim(); ++m)
        if (!t[m].is_zero()) out[m] += s * t[m];
    }
  }
  return ChowClass(a.r_, std::move(out));
}

ChowClass operator*(ChowClass a, const RatFn& s) {
  for (auto& x : a.c_) x *= s;
  return a;
}

std::shared_ptr<AbelianChowRing> AbelianChowRing::make(const Params& p, int c) {
  return std::shared_ptr<AbelianChowRing>(new AbelianChowRing(p, c));
}

AbelianChowRing::AbelianChowRing(const Params& p, int c) : p_(p), c_(c) {
  p_.validate();
  if (c < 0 || c > p.k) throw ContractError("chamber index out of range");
  int n = p.n, k = p.k;
  dim_ = ipow(n, k);
  red_.resize(k);
  vinv_.resize(k);
  for (int i = 0; i < k; ++i) {
    // monic relation prod_j (H - r_j) = H^n + sum_e rel[e] H^e
    std::vector<Poly> rel(n + 1);
    rel[0] = Poly(1);
    for (int j = 0; j < n; ++j) {
      std::vector<Poly> nx(n + 1);
      for (int e = 0; e <= j + 1; ++e) {
        if (e > 0) nx[e] += rel[e - 1];
        if (e <= j) nx[e] -= root(i, j) * rel[e];
      }
      rel = nx;
    }
    auto& R = red_[i];
    for (int m = 0; m <= 4 * n + 4; ++m) {
      std::vector<Poly> v(n);
      if (m < n) {
        v[m] = Poly(1);
      } else {
        auto& prev = R[m - 1];
        for (int e = 1; e < n; ++e) v[e] = prev[e - 1];
        for (int e = 0; e < n; ++e) v[e] -= rel[e] * prev[n - 1];
      }
      R.push_back(v);
    }
    // inverse Vandermonde: coefficient of H^b in the Lagrange basis polynomial of root j
    vinv_[i].assign(n * n, RatFn());
    for (int j = 0; j < n; ++j) {
      std::vector<Poly> l(1, Poly(1));
      std::vector<Poly> dens;
      for (int m = 0; m < n; ++m) {
        if (m == j) continue;
        std::vector<Poly> nx(l.size() + 1);
        for (size_t e = 0; e < l.size(); ++e) {
          nx[e + 1] += l[e];
          nx[e] -= root(i, m) * l[e];
        }
        l = nx;
        dens.push_back(root(i, j) - root(i, m));
      }
      RatFn inv = RatFn::inv_product(dens);
      for (int b = 0; b < n; ++b) vinv_[i][b * n + j] = inv * RatFn(l[b]);
    }
  }
  table_.resize(size_t(dim_) * dim_);
  table_set_.assign(size_t(dim_) * dim_, false);
}

std::vector<int> AbelianChowRing::tuple(int idx) const {
  std::vector<int> t(p_.k);
  for (int i = p_.k - 1; i >= 0; --i) {
    t[i] = idx % p_.n;
    idx /= p_.n;
  }
  return t;
}

int AbelianChowRing::index(const std::vector<int>& b) const {
  int idx = 0;
  for (int i = 0; i < p_.k; ++i) idx = idx * p_.n + b[i];
  return idx;
}

Poly AbelianChowRing::relation(int i) const {
  Poly r(1);
  for (int j = 0; j < p_.n; ++j) r *= (i < c_ ? p_.sig_p(j) - p_.H(i) : p_.H(i) - p_.lam_p(j));
  return r;
}

std::vector<Poly> AbelianChowRing::euler_factors(int F) const {
  auto t = tuple(F);
  std::vector<Poly> f;
  for (int i = 0; i < p_.k; ++i) {
    int a = t[i];
    for (int j = 0; j < p_.n; ++j) {
      if (i >= c_) {
        if (j != a) f.push_back(p_.lam_p(a) - p_.lam_p(j));
        f.push_back(p_.sig_p(j) - p_.lam_p(a));
      } else {
        if (j != a) f.push_back(p_.sig_p(j) - p_.sig_p(a));
        f.push_back(p_.sig_p(a) - p_.lam_p(j));
      }
    }
  }
  return f;
}

RatFn AbelianChowRing::euler(int F) const {
  Poly e(1);
  for (auto& f : euler_factors(F)) e *= f;
  return RatFn(e);
}

bool AbelianChowRing::distinct(int F) const {
  auto t = tuple(F);
  for (int i = 0; i < p_.k; ++i)
    for (int j = i + 1; j < p_.k; ++j)
      if (t[i] == t[j]) return false;
  return true;
}

ChowClass AbelianChowRing::zero() const {
  return ChowClass(shared_from_this(), std::vector<RatFn>(dim_));
}

ChowClass AbelianChowRing::one() const { return basis_element(0); }

ChowClass AbelianChowRing::basis_element(int idx) const {
  std::vector<RatFn> c(dim_);
  c[idx] = RatFn(1);
  return ChowClass(shared_from_this(), std::move(c));
}

ChowClass AbelianChowRing::H(int i) const { return normal_form(p_.H(i)); }

ChowClass AbelianChowRing::from_coef(std::vector<RatFn> c) const {
  if ((int)c.size() != dim_) throw ContractError("coefficient vector has wrong size");
  return ChowClass(shared_from_this(), std::move(c));
}

const std::vector<Poly>& AbelianChowRing::reduce_power(int i, int m) const {
  if (m >= (int)red_[i].size()) throw ContractError("power too large for the reduction table");
  return red_[i][m];
}

ChowClass AbelianChowRing::normal_form(const Poly& p) const {
  int n = p_.n, k = p_.k;
  std::vector<Poly> acc(dim_);
  for (auto& tm : p.terms()) {
    std::vector<int> e(k);
    Mono rest = tm.m;
    for (int i = 0; i < k; ++i) {
      e[i] = mono_exp(tm.m, p_.v_H(i));
      rest -= mono_var(p_.v_H(i), e[i]);
    }
    Poly coef = Poly::monomial(rest, tm.c);
    // tensor product of univariate reductions
    std::vector<Poly> cur(1, coef);
    for (int i = 0; i < k; ++i) {
      auto& r = reduce_power(i, e[i]);
      std::vector<Poly> nx(cur.size() * n);
      for (size_t a = 0; a < cur.size(); ++a)
        for (int b = 0; b < n; ++b)
          if (!r[b].is_zero()) nx[a * n + b] = cur[a] * r[b];
      cur.swap(nx);
    }
    for (int idx = 0; idx < dim_; ++idx)
      if (!cur[idx].is_zero()) acc[idx] += cur[idx];
  }
  std::vector<RatFn> c;
  for (auto& x : acc) c.emplace_back(x);
  return ChowClass(shared_from_this(), std::move(c));
}

// apply a per-axis n x n matrix (row-major [out][in]) along every tensor axis
static std::vector<RatFn> tensor_apply(const std::vector<std::vector<RatFn>>& mats, std::vector<RatFn> v,
                                       int n, int k) {
  int dim = int(v.size());
  for (int i = 0; i < k; ++i) {
    int stride = ipow(n, k - 1 - i);
    std::vector<RatFn> out(dim);
    for (int idx = 0; idx < dim; ++idx) {
      int digit = (idx / stride) % n;
      int base = idx - digit * stride;
      RatFn s;
      for (int j = 0; j < n; ++j) {
        const RatFn& m = mats[i][digit * n + j];
        const RatFn& x = v[base + j * stride];
        if (!m.is_zero() && !x.is_zero()) s += m * x;
      }
      out[idx] = std::move(s);
    }
    v.swap(out);
  }
  return v;
}

std::vector<RatFn> AbelianChowRing::restrict_all(const ChowClass& a) const {
  int n = p_.n, k = p_.k;
  std::vector<std::vector<RatFn>> V(k, std::vector<RatFn>(n * n));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j)
      for (int b = 0; b < n; ++b) V[i][j * n + b] = RatFn(root(i, j).pow(b));
  return tensor_apply(V, a.coef(), n, k);
}

RatFn AbelianChowRing::restrict(const ChowClass& a, int F) const {
  auto t = tuple(F);
  RatFn s;
  for (int idx = 0; idx < dim_; ++idx) {
    if (a.coef()[idx].is_zero()) continue;
    auto b = tuple(idx);
    Poly m(1);
    for (int i = 0; i < p_.k; ++i) m *= root(i, t[i]).pow(b[i]);
    s += a.coef()[idx] * RatFn(m);
  }
  return s;
}

ChowClass AbelianChowRing::from_restrictions(const std::vector<RatFn>& vals) const {
  return ChowClass(shared_from_this(), tensor_apply(vinv_, vals, p_.n, p_.k));
}

ChowClass AbelianChowRing::delta() const {
  Poly d(1);
  for (int i = 0; i < p_.k; ++i)
    for (int j = i + 1; j < p_.k; ++j) d *= p_.H(i) - p_.H(j);
  return normal_form(d);
}

const std::vector<RatFn>& AbelianChowRing::mul_table(int a, int b) const {
  size_t key = size_t(a) * dim_ + b;
  std::lock_guard<std::mutex> lk(table_mu);
  if (!table_set_[key]) {
    auto ta = tuple(a), tb = tuple(b);
    std::vector<RatFn> cur(1, RatFn(1));
    for (int i = 0; i < p_.k; ++i) {
      auto& r = reduce_power(i, ta[i] + tb[i]);
      std::vector<RatFn> nx(cur.size() * p_.n);
      for (size_t x = 0; x < cur.size(); ++x)
        for (int e = 0; e < p_.n; ++e)
          if (!r[e].is_zero()) nx[x * p_.n + e] = cur[x] * RatFn(r[e]);
      cur.swap(nx);
    }
    table_[key] = std::move(cur);
    table_set_[key] = true;
  }
  return table_[key];
}

ChowClass weyl_act(const Perm& w, const ChowClass& a) {
  const AbelianChowRing& R = a.ring();
  if (R.c() != 0 && R.c() != R.k()) throw ContractError("Weyl action needs c = 0 or c = k");
  std::vector<RatFn> out(R.dim());
  for (int idx = 0; idx < R.dim(); ++idx) {
    auto b = R.tuple(idx);
    std::vector<int> nb(R.k());
    for (int i = 0; i < R.k(); ++i) nb[w[i]] = b[i];
    out[R.index(nb)] = a.coef()[idx];
  }
  return ChowClass(a.ring_ptr(), std::move(out));
}

ChowClass project(const ChowClass& a, ProjMode m) {
  auto perms = all_perms(a.ring().k());
  ChowClass s = a.ring().zero();
  for (auto& w : perms) {
    ChowClass t = weyl_act(w, a);
    s += (m == ProjMode::antiinvariant && perm_sign(w) < 0) ? -t : t;
  }
  return s * rat(1, long(perms.size()));
}

bool is_antiinvariant(const ChowClass& a) {
  for (auto& w : all_perms(a.ring().k()))
    if (!(weyl_act(w, a) == a * Rat(perm_sign(w)))) return false;
  return true;
}

bool is_invariant(const ChowClass& a) {
  for (auto& w : all_perms(a.ring().k()))
    if (!(weyl_act(w, a) == a)) return false;
  return true;
}

ChowClass divide_by_delta(const ChowClass& a) {
  if (!is_antiinvariant(a)) throw ContractError("divide_by_delta: input is not anti-invariant");
  const AbelianChowRing& R = a.ring();
  int k = R.k();
  // the normal form of an anti-invariant class is an alternating polynomial
  std::map<std::vector<int>, RatFn> f;
  for (int idx = 0; idx < R.dim(); ++idx)
    if (!a.coef()[idx].is_zero()) f[R.tuple(idx)] = a.coef()[idx];
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      // divide by (H_i - H_j)
      std::map<std::vector<int>, RatFn> q;
      for (;;) {
        auto best = f.end();
        for (auto it = f.begin(); it != f.end(); ++it)
          if (it->first[i] > 0 && (best == f.end() || it->first[i] > best->first[i])) best = it;
        if (best == f.end()) break;
        std::vector<int> e = best->first;
        RatFn c = best->second;
        f.erase(best);
        e[i] -= 1;
        q[e] += c;
        e[j] += 1;
        auto& slot = f[e];
        slot += c;
        if (slot.is_zero()) f.erase(e);
      }
      for (auto& [e, c] : f)
        if (!c.is_zero()) throw ConsistencyError("divide_by_delta: Vandermonde division left a remainder");
      f.swap(q);
    }
  std::vector<RatFn> c(R.dim());
  for (auto& [e, v] : f) {
    for (int x : e)
      if (x >= R.n()) throw ConsistencyError("divide_by_delta: quotient outside the monomial basis");
    c[R.index(e)] = v;
  }
  return ChowClass(a.ring_ptr(), std::move(c));
}

RatFn pairing_abelian(const ChowClass& a, const ChowClass& b) {
  const AbelianChowRing& R = a.ring();
  auto ra = R.restrict_all(a), rb = R.restrict_all(b);
  RatFn s;
  for (int F = 0; F < R.dim(); ++F)
    if (!ra[F].is_zero() && !rb[F].is_zero()) s += ra[F] * rb[F] * R.inv_euler(F);
  return s;
}

std::vector<std::vector<RatFn>> gram_abelian(const AbelianChowRing& r) {
  std::vector<std::vector<RatFn>> G(r.dim(), std::vector<RatFn>(r.dim()));
  for (int a = 0; a < r.dim(); ++a)
    for (int b = a; b < r.dim(); ++b) G[a][b] = G[b][a] = pairing_abelian(r.basis_element(a), r.basis_element(b));
  return G;
}

}  // namespace flop
