#include "flop/rat.hpp"

#include "flop/errors.hpp"

namespace flop {

std::string to_string(const Rat& r) { return r.get_str(); }

Rat rat_from_string(const std::string& s) {
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw SpecError("bad rational: " + s);
    r.canonicalize();
    return r;
  }
  std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
  bool neg = !ip.empty() && ip[0] == '-';
  if (neg || (!ip.empty() && ip[0] == '+')) ip = ip.substr(1);
  if (ip.empty()) ip = "0";
  for (char c : ip + fp)
    if (c < '0' || c > '9') throw SpecError("bad decimal: " + s);
  Int num(ip + fp, 10), den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
  Rat r(num, den);
  r.canonicalize();
  return neg ? Rat(-r) : r;
}

Rat rat_pow(const Rat& r, int e) {
  Rat b = e < 0 ? Rat(1 / r) : r;
  if (e < 0) e = -e;
  Rat out = 1;
  while (e) {
    if (e & 1) out *= b;
    b *= b;
    e >>= 1;
  }
  return out;
}

Rat factorial(int n) {
  Int f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rat(f);
}

Rat binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Int b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rat(b);
}

}  // namespace flop
