#include <algorithm>
#include <random>
#include <set>

#include "flop/chow_rings.hpp"
#include "flop/errors.hpp"

namespace flop {

Params Params::make_symbolic(int k, int n) {
  Params p;
  p.k = k, p.n = n, p.symbolic = true;
  p.validate();
  return p;
}

Params Params::make_specialized(int k, int n, std::vector<Rat> lam, std::vector<Rat> sig) {
  Params p;
  p.k = k, p.n = n, p.symbolic = false;
  p.lam = std::move(lam), p.sig = std::move(sig);
  p.validate();
  return p;
}

Params Params::make_seeded(int k, int n, unsigned seed) {
  std::mt19937 g(seed);
  std::uniform_int_distribution<int> num(-40, 40), den(1, 6);
  std::set<Rat> used;
  auto draw = [&] {
    for (;;) {
      Rat r = rat(num(g), den(g));
      if (used.insert(r).second) return r;
    }
  };
  std::vector<Rat> lam, sig;
  for (int j = 0; j < n; ++j) lam.push_back(draw());
  for (int j = 0; j < n; ++j) sig.push_back(draw());
  return make_specialized(k, n, lam, sig);
}

std::vector<std::string> Params::names() const {
  std::vector<std::string> s;
  for (int j = 0; j < n; ++j) s.push_back("l" + std::to_string(j + 1));
  for (int j = 0; j < n; ++j) s.push_back("s" + std::to_string(j + 1));
  for (int i = 0; i < k; ++i) s.push_back("H" + std::to_string(i + 1));
  s.push_back("z");
  return s;
}

void Params::validate() const {
  if (k < 1 || n < 1 || k > n) throw ContractError("need 1 <= k <= n");
  if (nvars() > kMaxVars) throw ContractError("too many variables for the packed monomial layout");
  if (!symbolic) {
    if ((int)lam.size() != n || (int)sig.size() != n) throw ContractError("parameter vectors must have length n");
    std::set<Rat> all(lam.begin(), lam.end());
    all.insert(sig.begin(), sig.end());
    if ((int)all.size() != 2 * n) throw ContractError("equivariant parameters must be pairwise distinct");
  }
}

std::vector<Perm> all_perms(int k) {
  Perm w(k);
  for (int i = 0; i < k; ++i) w[i] = i;
  std::vector<Perm> out;
  do out.push_back(w);
  while (std::next_permutation(w.begin(), w.end()));
  return out;
}

int perm_sign(const Perm& w) {
  int s = 1;
  for (size_t i = 0; i < w.size(); ++i)
    for (size_t j = i + 1; j < w.size(); ++j)
      if (w[i] > w[j]) s = -s;
  return s;
}

}  // namespace flop
