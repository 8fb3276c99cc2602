#pragma once
#include <vector>

#include "flop/errors.hpp"

namespace flop {

// Finite Laurent polynomial in z: sum_{p} coeffs[p - minPow] z^p.
// V needs +, -, * (V,V), is_zero(); V() must be a zero element.
template <class V>
class ZLaurent {
 public:
  ZLaurent() = default;
  ZLaurent(int minPow, std::vector<V> c) : minPow_(minPow), c_(std::move(c)) { trim(); }
  static ZLaurent mono(int p, const V& v) { return ZLaurent(p, {v}); }

  int minPow() const { return minPow_; }
  int maxPow() const { return minPow_ + int(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  V coeff(int p) const {
    if (p < minPow_ || p > maxPow()) return V();
    return c_[p - minPow_];
  }
  const std::vector<V>& coeffs() const { return c_; }

  ZLaurent& operator+=(const ZLaurent& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    int lo = std::min(minPow_, o.minPow_), hi = std::max(maxPow(), o.maxPow());
    std::vector<V> c(hi - lo + 1);
    for (int p = lo; p <= hi; ++p) {
      bool a = p >= minPow_ && p <= maxPow(), b = p >= o.minPow_ && p <= o.maxPow();
      if (a && b) c[p - lo] = c_[p - minPow_] + o.c_[p - o.minPow_];
      else if (a) c[p - lo] = c_[p - minPow_];
      else if (b) c[p - lo] = o.c_[p - o.minPow_];
    }
    minPow_ = lo;
    c_ = std::move(c);
    trim();
    return *this;
  }
  ZLaurent operator-() const {
    ZLaurent r = *this;
    for (auto& v : r.c_) v = V() - v;
    return r;
  }
  friend ZLaurent operator+(ZLaurent a, const ZLaurent& b) { return a += b; }
  friend ZLaurent operator-(ZLaurent a, const ZLaurent& b) { return a += -b; }
  friend ZLaurent operator*(const ZLaurent& a, const ZLaurent& b) {
    if (a.is_zero() || b.is_zero()) return ZLaurent();
    std::vector<V> c(a.c_.size() + b.c_.size() - 1);
    std::vector<bool> set(c.size(), false);
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) {
        if (!set[i + j]) {
          c[i + j] = a.c_[i] * b.c_[j];
          set[i + j] = true;
        } else {
          c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
        }
      }
    return ZLaurent(a.minPow_ + b.minPow_, std::move(c));
  }
  // f(z) -> f(-z)
  ZLaurent negate_z() const {
    ZLaurent r = *this;
    for (size_t i = 0; i < r.c_.size(); ++i)
      if ((minPow_ + int(i)) % 2 != 0) r.c_[i] = V() - r.c_[i];
    return r;
  }
  V residue() const { return coeff(-1); }
  // drop powers below p
  ZLaurent truncate_below(int p) const {
    std::vector<V> c;
    int lo = std::max(p, minPow_);
    for (int q = lo; q <= maxPow(); ++q) c.push_back(coeff(q));
    return ZLaurent(lo, std::move(c));
  }
  friend bool operator==(const ZLaurent& a, const ZLaurent& b) { return (a - b).is_zero(); }

 private:
  void trim() {
    size_t lo = 0;
    while (lo < c_.size() && c_[lo].is_zero()) ++lo;
    size_t hi = c_.size();
    while (hi > lo && c_[hi - 1].is_zero()) --hi;
    if (lo == hi) {
      c_.clear();
      minPow_ = 0;
      return;
    }
    c_ = std::vector<V>(c_.begin() + lo, c_.begin() + hi);
    minPow_ += int(lo);
  }
  int minPow_ = 0;
  std::vector<V> c_;
};

}  // namespace flop
