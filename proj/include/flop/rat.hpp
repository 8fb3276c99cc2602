#pragma once
#include <gmpxx.h>

#include <string>

namespace flop {

using Rat = mpq_class;
using Int = mpz_class;

// canonicalized a/b (mpq_class(a, b) alone is not reduced)
inline Rat rat(long a, long b = 1) {
  Rat r(a, b);
  r.canonicalize();
  return r;
}

std::string to_string(const Rat& r);
// accepts "p", "p/q", "-1.25"
Rat rat_from_string(const std::string& s);
Rat rat_pow(const Rat& r, int e);
Rat factorial(int n);
Rat binomial(int n, int k);

}  // namespace flop
