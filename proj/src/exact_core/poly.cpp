#include "flop/poly.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "flop/errors.hpp"

namespace flop {

Mono mono_mul(Mono a, Mono b) {
  if (mono_deg(a) + mono_deg(b) > 255) throw SpecError("monomial degree overflow");
  return a + b;
}

bool mono_divides(Mono a, Mono b) {
  for (int v = 0; v < kMaxVars; ++v)
    if (mono_exp(a, v) > mono_exp(b, v)) return false;
  return true;
}

Poly::Poly(const Rat& c) {
  if (c != 0) t_.push_back({0, c});
}

Poly Poly::var(int v, int e) {
  if (v < 0 || v >= kMaxVars) throw SpecError("variable index out of range");
  return monomial(mono_var(v, e), 1);
}

Poly Poly::monomial(Mono m, const Rat& c) {
  Poly p;
  if (c != 0) p.t_.push_back({m, c});
  return p;
}

Poly Poly::from_terms(std::vector<Term> t) {
  std::sort(t.begin(), t.end(), [](const Term& a, const Term& b) { return a.m < b.m; });
  Poly p;
  for (auto& tm : t) {
    if (!p.t_.empty() && p.t_.back().m == tm.m) {
      p.t_.back().c += tm.c;
    } else {
      if (!p.t_.empty() && p.t_.back().c == 0) p.t_.pop_back();
      p.t_.push_back(std::move(tm));
    }
  }
  if (!p.t_.empty() && p.t_.back().c == 0) p.t_.pop_back();
  return p;
}

Rat Poly::constant_term() const {
  if (!t_.empty() && t_[0].m == 0) return t_[0].c;
  return 0;
}

int Poly::degree_in(int v) const {
  int d = 0;
  for (auto& tm : t_) d = std::max(d, mono_exp(tm.m, v));
  return d;
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& tm : p.t_) tm.c = -tm.c;
  return p;
}

static void merge_into(std::vector<Term>& a, const std::vector<Term>& b, int sign) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].m < b[j].m)) {
      out.push_back(std::move(a[i++]));
    } else if (i == a.size() || b[j].m < a[i].m) {
      out.push_back({b[j].m, sign > 0 ? b[j].c : Rat(-b[j].c)});
      ++j;
    } else {
      Rat c = sign > 0 ? Rat(a[i].c + b[j].c) : Rat(a[i].c - b[j].c);
      if (c != 0) out.push_back({a[i].m, std::move(c)});
      ++i, ++j;
    }
  }
  a.swap(out);
}

Poly& Poly::operator+=(const Poly& o) {
  merge_into(t_, o.t_, 1);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  merge_into(t_, o.t_, -1);
  return *this;
}

Poly& Poly::operator*=(const Rat& c) {
  if (c == 0) {
    t_.clear();
  } else {
    for (auto& tm : t_) tm.c *= c;
  }
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (a.t_.size() == 1 && a.t_[0].m == 0) return b * a.t_[0].c;
  if (b.t_.size() == 1 && b.t_[0].m == 0) return a * b.t_[0].c;
  if (a.total_degree() + b.total_degree() > 255) throw SpecError("monomial degree overflow");
  std::vector<Term> t;
  t.reserve(a.t_.size() * b.t_.size());
  for (auto& x : a.t_)
    for (auto& y : b.t_) t.push_back({x.m + y.m, x.c * y.c});
  return Poly::from_terms(std::move(t));
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.t_.size() != b.t_.size()) return false;
  for (size_t i = 0; i < a.t_.size(); ++i)
    if (a.t_[i].m != b.t_[i].m || a.t_[i].c != b.t_[i].c) return false;
  return true;
}

int Poly::compare(const Poly& o) const {
  size_t n = std::min(t_.size(), o.t_.size());
  for (size_t i = 0; i < n; ++i) {
    if (t_[i].m != o.t_[i].m) return t_[i].m < o.t_[i].m ? -1 : 1;
    int c = cmp(t_[i].c, o.t_[i].c);
    if (c) return c < 0 ? -1 : 1;
  }
  if (t_.size() != o.t_.size()) return t_.size() < o.t_.size() ? -1 : 1;
  return 0;
}

Poly Poly::pow(int e) const {
  Poly out(1), b = *this;
  while (e) {
    if (e & 1) out = out * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return out;
}

Rat Poly::content() const {
  if (t_.empty()) return 1;
  Int g = 0, l = 1;
  for (auto& tm : t_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), tm.c.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), tm.c.get_den_mpz_t());
  }
  Rat c(g, l);
  c.canonicalize();
  return c;
}

Poly Poly::primitive(Rat* scale) const {
  Rat c = content();
  if (lc() < 0) c = -c;
  if (scale) *scale = c;
  return *this * Rat(1 / c);
}

Poly Poly::subst(int v, const Poly& val) const {
  int dmax = degree_in(v);
  if (dmax == 0) return *this;
  std::vector<Poly> pw(dmax + 1);
  pw[0] = Poly(1);
  for (int e = 1; e <= dmax; ++e) pw[e] = pw[e - 1] * val;
  std::vector<Term> rest;
  Poly acc;
  std::map<int, std::vector<Term>> by_e;
  for (auto& tm : t_) {
    int e = mono_exp(tm.m, v);
    Mono m = tm.m - mono_var(v, e);
    by_e[e].push_back({m, tm.c});
  }
  for (auto& [e, ts] : by_e) acc += Poly::from_terms(ts) * pw[e];
  return acc;
}

Poly Poly::derivative(int v) const {
  std::vector<Term> t;
  for (auto& tm : t_) {
    int e = mono_exp(tm.m, v);
    if (e) t.push_back({tm.m - mono_var(v, 1), tm.c * e});
  }
  return from_terms(std::move(t));
}

Poly Poly::coeff_in(int v, int e) const {
  std::vector<Term> t;
  for (auto& tm : t_)
    if (mono_exp(tm.m, v) == e) t.push_back({tm.m - mono_var(v, e), tm.c});
  return from_terms(std::move(t));
}

Rat Poly::eval(const std::vector<Rat>& vals) const {
  return eval_with<Rat>(vals, [](const Rat& r) { return r; });
}

bool Poly::divide_exact(const Poly& p, const Poly& d, Poly* q) {
  if (d.is_zero()) throw ContractError("division by zero polynomial");
  if (p.is_zero()) {
    if (q) *q = Poly();
    return true;
  }
  if (d.t_.size() == 1) {
    std::vector<Term> t;
    for (auto& tm : p.t_) {
      if (!mono_divides(d.t_[0].m, tm.m)) return false;
      t.push_back({tm.m - d.t_[0].m, tm.c / d.t_[0].c});
    }
    if (q) *q = from_terms(std::move(t));
    return true;
  }
  std::map<Mono, Rat> r;
  for (auto& tm : p.t_) r.emplace(tm.m, tm.c);
  const Term& dl = d.t_.back();
  std::vector<Term> qt;
  while (!r.empty()) {
    auto it = std::prev(r.end());
    if (!mono_divides(dl.m, it->first)) return false;
    Mono qm = it->first - dl.m;
    Rat qc = it->second / dl.c;
    for (auto& tm : d.t_) {
      Mono m = qm + tm.m;
      auto jt = r.find(m);
      if (jt == r.end()) {
        r.emplace(m, -qc * tm.c);
      } else {
        jt->second -= qc * tm.c;
        if (jt->second == 0) r.erase(jt);
      }
    }
    qt.push_back({qm, qc});
  }
  if (q) *q = from_terms(std::move(qt));
  return true;
}

std::string Poly::str(const std::vector<std::string>& names) const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
    Rat c = it->c;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    bool unit = c == 1 && it->m != 0;
    if (!unit) os << c.get_str();
    bool need_star = !unit;
    for (int v = 0; v < kMaxVars; ++v) {
      int e = mono_exp(it->m, v);
      if (!e) continue;
      if (need_star) os << "*";
      os << (v < (int)names.size() ? names[v] : "v" + std::to_string(v));
      if (e > 1) os << "^" << e;
      need_star = true;
    }
  }
  return os.str();
}

}  // namespace flop
