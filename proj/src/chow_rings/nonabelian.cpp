#include <algorithm>
#include <map>

#include "flop/chow_rings.hpp"
#include "flop/errors.hpp"

namespace flop {

MonomialCatalog MonomialCatalog::build(int k, int n) {
  MonomialCatalog c;
  c.k = k, c.n = n;
  int m = n - k;
  std::vector<int> b(k, 0);
  for (;;) {
    int s = 0;
    for (int x : b) s += x;
    if (s != 1) c.mu.push_back(b);
    int i = k - 1;
    while (i >= 0 && b[i] == m) b[i--] = 0;
    if (i < 0) break;
    ++b[i];
  }
  // orbit representative: sorted exponents are lexicographically least
  std::map<std::vector<int>, int> idx;
  std::vector<std::vector<int>> reps;
  for (auto& x : c.mu) {
    auto r = x;
    std::sort(r.begin(), r.end());
    reps.push_back(r);
    idx[r] = 0;
  }
  int j = 0;
  for (auto& [r, v] : idx) {
    v = j++;
    c.orbit_rep.push_back(r);
  }
  for (auto& r : reps) c.orbit.push_back(idx[r]);
  return c;
}

Poly MonomialCatalog::eval_mu(int i, const std::vector<Poly>& h) const {
  Poly p(1);
  for (int t = 0; t < k; ++t) p *= h[t].pow(mu[i][t]);
  return p;
}

Poly MonomialCatalog::eval_P(int j, const std::vector<Poly>& h) const {
  Poly p;
  for (int i = 0; i < M(); ++i)
    if (orbit[i] == j) p += eval_mu(i, h);
  return p;
}

NonabelianChowModule::NonabelianChowModule(const Params& p, int side)
    : ab_(AbelianChowRing::make(p, side > 0 ? 0 : p.k)), side_(side > 0 ? 1 : -1),
      cat_(MonomialCatalog::build(p.k, p.n)) {
  if (p.k >= p.n) throw ContractError("the nonabelian quotient needs k < n");
  std::vector<int> J(p.k);
  for (int i = 0; i < p.k; ++i) J[i] = i;
  for (;;) {
    subsets_.push_back(J);
    int i = p.k - 1;
    while (i >= 0 && J[i] == p.n - p.k + i) --i;
    if (i < 0) break;
    ++J[i];
    for (int t = i + 1; t < p.k; ++t) J[t] = J[t - 1] + 1;
  }
  Poly s;
  std::vector<Poly> h;
  for (int i = 0; i < p.k; ++i) {
    s += p.H(i) * Rat(side_);
    h.push_back(p.H(i));
  }
  basis_.push_back(ab_->normal_form(s));
  for (int j = 0; j < cat_.N(); ++j) basis_.push_back(ab_->normal_form(cat_.eval_P(j, h)));
  if ((int)basis_.size() != rank())
    throw ConsistencyError("nonabelian basis size differs from the number of k-subsets");
}

int NonabelianChowModule::ordered_point(int J) const { return ab_->index(subsets_[J]); }

std::vector<int> NonabelianChowModule::degrees() const {
  std::vector<int> d{1};
  for (auto& r : cat_.orbit_rep) {
    int s = 0;
    for (int x : r) s += x;
    d.push_back(s);
  }
  return d;
}

std::vector<Poly> NonabelianChowModule::euler_factors(int Jidx) const {
  const Params& p = ab_->params();
  auto& J = subsets_[Jidx];
  std::vector<bool> in(p.n, false);
  for (int a : J) in[a] = true;
  std::vector<Poly> f;
  for (int a : J) {
    for (int j = 0; j < p.n; ++j) {
      if (side_ > 0) {
        if (!in[j]) f.push_back(p.lam_p(a) - p.lam_p(j));
        f.push_back(p.sig_p(j) - p.lam_p(a));
      } else {
        if (!in[j]) f.push_back(p.sig_p(j) - p.sig_p(a));
        f.push_back(p.sig_p(a) - p.lam_p(j));
      }
    }
  }
  return f;
}

std::vector<RatFn> NonabelianChowModule::restrict_all(const ChowClass& sym) const {
  std::vector<RatFn> v;
  for (int J = 0; J < rank(); ++J) v.push_back(ab_->restrict(sym, ordered_point(J)));
  return v;
}

std::vector<std::vector<RatFn>> NonabelianChowModule::loc_matrix() const {
  std::vector<std::vector<RatFn>> M(rank(), std::vector<RatFn>(rank()));
  for (int b = 0; b < rank(); ++b) {
    auto v = restrict_all(basis_[b]);
    for (int J = 0; J < rank(); ++J) M[J][b] = v[J];
  }
  return M;
}

std::vector<RatFn> NonabelianChowModule::coords_from_restrictions(const std::vector<RatFn>& v) const {
  if (minv_.empty()) minv_ = inverse(loc_matrix());
  std::vector<RatFn> c(rank());
  for (int b = 0; b < rank(); ++b)
    for (int J = 0; J < rank(); ++J)
      if (!v[J].is_zero()) c[b] += minv_[b][J] * v[J];
  return c;
}

ChowClass NonabelianChowModule::from_coords(const std::vector<RatFn>& c) const {
  ChowClass s = ab_->zero();
  for (int b = 0; b < rank(); ++b) s += basis_[b] * c[b];
  return s;
}

ChowClass p_a(const ChowClass& anti) { return divide_by_delta(anti); }

ChowClass p_a_inverse(const ChowClass& sym) {
  if (!is_invariant(sym)) throw ContractError("p_a inverse: input is not W-invariant");
  return sym.ring().delta() * sym;
}

RatFn pairing_nonabelian(const NonabelianChowModule& m, const ChowClass& a, const ChowClass& b) {
  auto ra = m.restrict_all(a), rb = m.restrict_all(b);
  RatFn s;
  for (int J = 0; J < m.rank(); ++J)
    if (!ra[J].is_zero() && !rb[J].is_zero()) s += ra[J] * rb[J] * m.inv_euler(J);
  return s;
}

RatFn pairing_nonabelian_via_abelian(const NonabelianChowModule& m, const ChowClass& a, const ChowClass& b) {
  int k = m.params().k;
  int npos = k * (k - 1) / 2;
  long wsize = 1;
  for (int i = 2; i <= k; ++i) wsize *= i;
  RatFn s = pairing_abelian(p_a_inverse(a), p_a_inverse(b));
  return s * rat(npos % 2 ? -1 : 1, wsize);
}

std::vector<std::vector<RatFn>> gram_nonabelian(const NonabelianChowModule& m, bool via_abelian) {
  int r = m.rank();
  std::vector<std::vector<RatFn>> G(r, std::vector<RatFn>(r));
  for (int a = 0; a < r; ++a)
    for (int b = a; b < r; ++b) {
      G[a][b] = via_abelian ? pairing_nonabelian_via_abelian(m, m.basis()[a], m.basis()[b])
                            : pairing_nonabelian(m, m.basis()[a], m.basis()[b]);
      G[b][a] = G[a][b];
    }
  return G;
}

RatFn SymplecticGram::omega(const Vec& f, const Vec& g) const {
  RatFn s;
  for (size_t a = 0; a < f.size(); ++a)
    for (size_t b = 0; b < g.size(); ++b) {
      if (G[a][b].is_zero()) continue;
      s += (f[a].negate_z() * ZLaurent<RatFn>::mono(0, G[a][b]) * g[b]).residue();
    }
  return s;
}

SymplecticGram symplectic_gram(const std::vector<std::vector<RatFn>>& G) { return SymplecticGram{G}; }

// Gaussian elimination; returns pivot count, fills det
static int eliminate(std::vector<std::vector<RatFn>>& a, std::vector<std::vector<RatFn>>* aug, RatFn* det) {
  int rows = int(a.size()), cols = rows ? int(a[0].size()) : 0;
  int r = 0;
  RatFn d(1);
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (!a[i][c].is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) {
      d = RatFn();
      continue;
    }
    if (piv != r) {
      std::swap(a[piv], a[r]);
      if (aug) std::swap((*aug)[piv], (*aug)[r]);
      d = -d;
    }
    RatFn p = a[r][c];
    d *= p;
    RatFn ip = RatFn(1) / p;
    for (auto& x : a[r]) (x *= ip).cancel();
    if (aug)
      for (auto& x : (*aug)[r]) (x *= ip).cancel();
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c].is_zero()) continue;
      RatFn f = a[i][c];
      for (int j = 0; j < cols; ++j)
        if (!a[r][j].is_zero()) (a[i][j] -= f * a[r][j]).cancel();
      if (aug)
        for (size_t j = 0; j < (*aug)[r].size(); ++j)
          if (!(*aug)[r][j].is_zero()) ((*aug)[i][j] -= f * (*aug)[r][j]).cancel();
    }
    ++r;
  }
  if (r < rows) d = RatFn();
  if (det) *det = d;
  return r;
}

RatFn determinant(std::vector<std::vector<RatFn>> a) {
  RatFn d;
  eliminate(a, nullptr, &d);
  return d.cancel();
}

std::vector<std::vector<RatFn>> inverse(std::vector<std::vector<RatFn>> a) {
  int n = int(a.size());
  std::vector<std::vector<RatFn>> I(n, std::vector<RatFn>(n));
  for (int i = 0; i < n; ++i) I[i][i] = RatFn(1);
  if (eliminate(a, &I, nullptr) < n) throw ConsistencyError("matrix is singular");
  return I;
}

int rank(std::vector<std::vector<RatFn>> a) { return eliminate(a, nullptr, nullptr); }

}  // namespace flop
