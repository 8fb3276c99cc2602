#pragma once
#include <string>
#include <utility>
#include <vector>

#include "flop/rat.hpp"

namespace flop {

// Packed exponent vector: 8 bits per variable (at most 15 variables), total
// degree in the top byte, so integer comparison of two Monos is grlex with
// higher variable index more significant.
using Mono = unsigned __int128;
constexpr int kMaxVars = 15;

inline int mono_exp(Mono m, int v) { return int((m >> (8 * v)) & 0xff); }
inline int mono_deg(Mono m) { return int(m >> 120); }
inline Mono mono_var(int v, int e = 1) { return (Mono(e) << (8 * v)) | (Mono(e) << 120); }
Mono mono_mul(Mono a, Mono b);
bool mono_divides(Mono a, Mono b);  // a | b
inline Mono mono_div(Mono b, Mono a) { return b - a; }

struct Term {
  Mono m;
  Rat c;
};

class Poly {
 public:
  Poly() = default;
  Poly(const Rat& c);
  Poly(long c) : Poly(Rat(c)) {}
  static Poly var(int v, int e = 1);
  static Poly monomial(Mono m, const Rat& c);
  static Poly from_terms(std::vector<Term> t);  // sorts, merges, drops zeros

  const std::vector<Term>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].m == 0); }
  Rat constant_term() const;
  Rat lc() const { return t_.empty() ? Rat(0) : t_.back().c; }
  Mono lm() const { return t_.back().m; }
  int total_degree() const { return t_.empty() ? -1 : mono_deg(t_.back().m); }
  int degree_in(int v) const;
  bool uses_var(int v) const { return degree_in(v) > 0; }

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly& operator*=(const Rat& c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Rat& c) { return a *= c; }
  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
  // total order, used to sort factor lists
  int compare(const Poly& o) const;

  Poly pow(int e) const;
  // positive rational c with p/c integral and primitive
  Rat content() const;
  // p/(content * sign(lc)), leading coefficient positive; returns the scale
  Poly primitive(Rat* scale = nullptr) const;
  Poly subst(int v, const Poly& val) const;
  Poly derivative(int v) const;
  // coefficient of v^e, as a polynomial not involving v
  Poly coeff_in(int v, int e) const;
  Rat eval(const std::vector<Rat>& vals) const;
  template <class T, class F>
  T eval_with(const std::vector<T>& vals, F from_rat) const {
    T acc = from_rat(Rat(0));
    for (auto& tm : t_) {
      T x = from_rat(tm.c);
      for (int v = 0; v < kMaxVars; ++v)
        for (int e = mono_exp(tm.m, v); e > 0; --e) x = x * vals[v];
      acc = acc + x;
    }
    return acc;
  }

  // exact division; false if d does not divide p
  static bool divide_exact(const Poly& p, const Poly& d, Poly* q);

  std::string str(const std::vector<std::string>& names) const;

 private:
  std::vector<Term> t_;  // ascending Mono, no zero coefficients
};

}  // namespace flop
