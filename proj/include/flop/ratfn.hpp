#pragma once
#include <string>
#include <utility>
#include <vector>

#include "flop/poly.hpp"

namespace flop {

// num / prod(f_i^{e_i}); the f_i are primitive, leading coefficient positive,
// pairwise distinct and sorted. Cancellation is lazy: call cancel() when a
// reduced form is wanted. Equality never needs it.
class RatFn {
 public:
  using Factor = std::pair<Poly, int>;

  RatFn() = default;
  RatFn(const Rat& c) : num_(c) {}
  RatFn(long c) : num_(Rat(c)) {}
  RatFn(const Poly& p) : num_(p) {}
  RatFn(Poly num, std::vector<Factor> den);
  // 1 / prod(factors)
  static RatFn inv_product(const std::vector<Poly>& factors);

  const Poly& num() const { return num_; }
  const std::vector<Factor>& den() const { return den_; }
  Poly den_poly() const;
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.empty(); }

  RatFn operator-() const;
  RatFn& operator+=(const RatFn& o);
  RatFn& operator-=(const RatFn& o) { return *this += -o; }
  RatFn& operator*=(const RatFn& o);
  RatFn& operator*=(const Rat& c);
  RatFn& operator/=(const RatFn& o);
  friend RatFn operator+(RatFn a, const RatFn& b) { return a += b; }
  friend RatFn operator-(RatFn a, const RatFn& b) { return a -= b; }
  friend RatFn operator*(RatFn a, const RatFn& b) { return a *= b; }
  friend RatFn operator*(RatFn a, const Rat& c) { return a *= c; }
  friend RatFn operator/(RatFn a, const RatFn& b) { return a /= b; }
  friend bool operator==(const RatFn& a, const RatFn& b) { return (a - b).is_zero(); }
  friend bool operator!=(const RatFn& a, const RatFn& b) { return !(a == b); }

  RatFn pow(int e) const;
  // remove every den factor that divides the numerator; idempotent
  RatFn& cancel();
  RatFn subst(int v, const Poly& val) const;
  Rat eval(const std::vector<Rat>& vals) const;
  template <class T, class F>
  T eval_with(const std::vector<T>& vals, F from_rat) const {
    T n = num_.template eval_with<T>(vals, from_rat);
    T d = from_rat(Rat(1));
    for (auto& [f, e] : den_) {
      T fv = f.template eval_with<T>(vals, from_rat);
      for (int i = 0; i < e; ++i) d = d * fv;
    }
    return n / d;
  }
  std::string str(const std::vector<std::string>& names) const;

 private:
  void add_factor(const Poly& f, int e);
  Poly num_;
  std::vector<Factor> den_;
};

}  // namespace flop
