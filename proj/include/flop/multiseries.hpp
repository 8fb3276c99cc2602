#pragma once
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "flop/errors.hpp"
#include "flop/rat.hpp"

namespace flop {

// Variable roles: Novikov q's, log y's, x's; each role has its own
// total-degree budget. q exponents may be negative (minus side).
struct VarSpec {
  std::vector<std::string> q, logy, x;
  int Dq = 0, L = 0, X = 0;

  int nq() const { return int(q.size()); }
  int nl() const { return int(logy.size()); }
  int nx() const { return int(x.size()); }
  int size() const { return nq() + nl() + nx(); }
  int logy_index(const std::string& name) const;
  friend bool operator==(const VarSpec& a, const VarSpec& b) {
    return a.q == b.q && a.logy == b.logy && a.x == b.x && a.Dq == b.Dq && a.L == b.L && a.X == b.X;
  }
};

using Exps = std::vector<int>;

inline int q_degree(const VarSpec& s, const Exps& e) {
  int d = 0;
  for (int i = 0; i < s.nq(); ++i) d += std::abs(e[i]);
  return d;
}
inline int logy_degree(const VarSpec& s, const Exps& e) {
  int d = 0;
  for (int i = 0; i < s.nl(); ++i) d += e[s.nq() + i];
  return d;
}
inline int x_degree(const VarSpec& s, const Exps& e) {
  int d = 0;
  for (int i = 0; i < s.nx(); ++i) d += e[s.nq() + s.nl() + i];
  return d;
}
inline bool within(const VarSpec& s, const Exps& e) {
  return q_degree(s, e) <= s.Dq && logy_degree(s, e) <= s.L && x_degree(s, e) <= s.X;
}

// Truncated series with coefficients in V. V needs +=, *, * Rat, is_zero().
template <class V>
class MultiSeries {
 public:
  MultiSeries() = default;
  explicit MultiSeries(VarSpec s) : spec_(std::move(s)) {}

  const VarSpec& spec() const { return spec_; }
  const std::map<Exps, V>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  // silently drops terms beyond truncation
  void add_term(const Exps& e, const V& v) {
    if ((int)e.size() != spec_.size()) throw SpecError("exponent vector has wrong length");
    if (!within(spec_, e) || v.is_zero()) return;
    auto it = t_.find(e);
    if (it == t_.end()) {
      t_.emplace(e, v);
    } else {
      it->second += v;
      if (it->second.is_zero()) t_.erase(it);
    }
  }
  const V* find(const Exps& e) const {
    auto it = t_.find(e);
    return it == t_.end() ? nullptr : &it->second;
  }

  MultiSeries& operator+=(const MultiSeries& o) {
    check(o);
    for (auto& [e, v] : o.t_) add_term(e, v);
    return *this;
  }
  friend MultiSeries operator+(MultiSeries a, const MultiSeries& b) { return a += b; }
  friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
    a.check(b);
    MultiSeries r(a.spec_);
    Exps e(a.spec_.size());
    for (auto& [ea, va] : a.t_)
      for (auto& [eb, vb] : b.t_) {
        for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        if (!within(a.spec_, e)) continue;
        r.add_term(e, va * vb);
      }
    return r;
  }
  MultiSeries scaled(const Rat& c) const {
    MultiSeries r(spec_);
    if (c == 0) return r;
    for (auto& [e, v] : t_) r.t_.emplace(e, v * c);
    return r;
  }
  template <class S>
  MultiSeries scaled_by(const S& c) const {
    MultiSeries r(spec_);
    for (auto& [e, v] : t_) r.add_term(e, v * c);
    return r;
  }
  template <class W, class F>
  MultiSeries<W> map(F f) const {
    MultiSeries<W> r(spec_);
    for (auto& [e, v] : t_) r.add_term(e, f(v));
    return r;
  }
  // d/d(logy_i)
  MultiSeries derivative_logy(int i) const {
    if (i < 0 || i >= spec_.nl()) throw SpecError("unknown logy variable");
    MultiSeries r(spec_);
    int pos = spec_.nq() + i;
    for (auto& [e, v] : t_) {
      if (e[pos] == 0) continue;
      Exps f = e;
      f[pos] -= 1;
      r.add_term(f, v * Rat(e[pos]));
    }
    return r;
  }
  MultiSeries derivative_logy(const std::string& name) const { return derivative_logy(spec_.logy_index(name)); }
  // restrict to a smaller truncation (same variables)
  MultiSeries truncated(int Dq, int L, int X) const {
    VarSpec s = spec_;
    s.Dq = Dq, s.L = L, s.X = X;
    MultiSeries r(s);
    for (auto& [e, v] : t_)
      if (within(s, e)) r.t_.emplace(e, v);
    return r;
  }
  friend bool operator==(const MultiSeries& a, const MultiSeries& b) {
    if (!(a.spec_ == b.spec_)) return false;
    for (auto& [e, v] : a.t_) {
      auto* w = b.find(e);
      if (!w) return false;
      if (!(v == *w)) return false;
    }
    for (auto& [e, v] : b.t_)
      if (!a.find(e)) return false;
    return true;
  }

  void check(const MultiSeries& o) const {
    if (!(spec_ == o.spec_)) throw SpecError("mismatched series variable specs");
  }

 private:
  VarSpec spec_;
  std::map<Exps, V> t_;
};

template <class V>
MultiSeries<V> series_constant(const VarSpec& s, const V& v) {
  MultiSeries<V> r(s);
  r.add_term(Exps(s.size(), 0), v);
  return r;
}

// exp(ell) truncated, where ell is homogeneous of logy-degree 1 with no q or x.
// The caller puts the 1/z into the coefficients of ell.
template <class V>
MultiSeries<V> exp_linear(const MultiSeries<V>& ell, const V& one) {
  const VarSpec& s = ell.spec();
  for (auto& [e, v] : ell.terms())
    if (q_degree(s, e) || x_degree(s, e) || logy_degree(s, e) != 1)
      throw SpecError("exp_linear: argument is not linear in the log variables");
  MultiSeries<V> out = series_constant(s, one), pw = out;
  for (int m = 1; m <= s.L; ++m) {
    pw = (pw * ell).scaled(Rat(1, m));
    out += pw;
  }
  return out;
}

}  // namespace flop
