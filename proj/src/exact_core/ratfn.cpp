#include "flop/ratfn.hpp"

#include <algorithm>

#include "flop/errors.hpp"

namespace flop {

RatFn::RatFn(Poly num, std::vector<Factor> den) : num_(std::move(num)) {
  for (auto& [f, e] : den) add_factor(f, e);
}

RatFn RatFn::inv_product(const std::vector<Poly>& factors) {
  RatFn r(1);
  for (auto& f : factors) r.add_factor(f, 1);
  return r;
}

void RatFn::add_factor(const Poly& f, int e) {
  if (e == 0) return;
  if (f.is_zero()) throw ContractError("zero denominator");
  if (e < 0) {
    num_ *= f.pow(-e);
    return;
  }
  Rat s;
  Poly p = f.primitive(&s);
  num_ *= rat_pow(s, -e);
  if (p.is_constant()) return;
  auto it = std::lower_bound(den_.begin(), den_.end(), p,
                             [](const Factor& a, const Poly& b) { return a.first.compare(b) < 0; });
  if (it != den_.end() && it->first == p) {
    it->second += e;
  } else {
    den_.insert(it, {std::move(p), e});
  }
}

Poly RatFn::den_poly() const {
  Poly d(1);
  for (auto& [f, e] : den_) d *= f.pow(e);
  return d;
}

RatFn RatFn::operator-() const {
  RatFn r = *this;
  r.num_ = -r.num_;
  return r;
}

RatFn& RatFn::operator+=(const RatFn& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (den_ == o.den_) {
    num_ += o.num_;
    if (num_.is_zero()) den_.clear();
    return *this;
  }
  // lcm of the two factor lists
  std::vector<Factor> l;
  Poly ma(1), mb(1);
  size_t i = 0, j = 0;
  while (i < den_.size() || j < o.den_.size()) {
    int c = i == den_.size() ? 1 : j == o.den_.size() ? -1 : den_[i].first.compare(o.den_[j].first);
    if (c < 0) {
      mb *= den_[i].first.pow(den_[i].second);
      l.push_back(den_[i++]);
    } else if (c > 0) {
      ma *= o.den_[j].first.pow(o.den_[j].second);
      l.push_back(o.den_[j++]);
    } else {
      int ea = den_[i].second, eb = o.den_[j].second;
      if (ea < eb) ma *= den_[i].first.pow(eb - ea);
      if (eb < ea) mb *= den_[i].first.pow(ea - eb);
      l.push_back({den_[i].first, std::max(ea, eb)});
      ++i, ++j;
    }
  }
  num_ = num_ * ma + o.num_ * mb;
  den_ = num_.is_zero() ? std::vector<Factor>{} : std::move(l);
  return *this;
}

RatFn& RatFn::operator*=(const RatFn& o) {
  if (is_zero()) return *this;
  if (o.is_zero()) return *this = RatFn();
  num_ *= o.num_;
  for (auto& [f, e] : o.den_) add_factor(f, e);
  return *this;
}

RatFn& RatFn::operator*=(const Rat& c) {
  num_ *= c;
  if (num_.is_zero()) den_.clear();
  return *this;
}

RatFn& RatFn::operator/=(const RatFn& o) {
  if (o.is_zero()) throw ContractError("RatFn division by zero");
  if (is_zero()) return *this;
  num_ *= o.den_poly();
  if (o.num_.is_constant()) {
    num_ *= Rat(1 / o.num_.constant_term());
  } else {
    Rat s;
    Poly p = o.num_.primitive(&s);
    num_ *= Rat(1 / s);
    Poly q;
    if (Poly::divide_exact(num_, p, &q)) {
      num_ = std::move(q);
    } else {
      add_factor(p, 1);
    }
  }
  return *this;
}

RatFn RatFn::pow(int e) const {
  if (e < 0) return RatFn(1) / pow(-e);
  RatFn r;
  r.num_ = num_.pow(e);
  for (auto& [f, m] : den_) r.den_.push_back({f, m * e});
  if (r.num_.is_zero()) r.den_.clear();
  return r;
}

RatFn& RatFn::cancel() {
  for (auto& [f, e] : den_) {
    Poly q;
    while (e > 0 && Poly::divide_exact(num_, f, &q)) {
      num_ = std::move(q);
      --e;
    }
  }
  den_.erase(std::remove_if(den_.begin(), den_.end(), [](const Factor& x) { return x.second == 0; }),
             den_.end());
  if (num_.is_zero()) den_.clear();
  return *this;
}

RatFn RatFn::subst(int v, const Poly& val) const {
  RatFn r(num_.subst(v, val));
  for (auto& [f, e] : den_) {
    Poly g = f.subst(v, val);
    if (g.is_zero()) throw ContractError("substitution makes a denominator vanish");
    r.add_factor(g, e);
  }
  return r;
}

Rat RatFn::eval(const std::vector<Rat>& vals) const {
  Rat d = 1;
  for (auto& [f, e] : den_) d *= rat_pow(f.eval(vals), e);
  if (d == 0) throw ContractError("evaluation at a pole");
  return num_.eval(vals) / d;
}

std::string RatFn::str(const std::vector<std::string>& names) const {
  if (den_.empty()) return num_.str(names);
  std::string s = "(" + num_.str(names) + ")/(";
  for (size_t i = 0; i < den_.size(); ++i) {
    if (i) s += "*";
    s += "(" + den_[i].first.str(names) + ")";
    if (den_[i].second > 1) s += "^" + std::to_string(den_[i].second);
  }
  return s + ")";
}

}  // namespace flop
