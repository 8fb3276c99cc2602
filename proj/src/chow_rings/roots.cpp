#include "flop/chow_rings.hpp"

namespace flop {

RootData RootData::standard(int k) {
  RootData r;
  r.k = k;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) r.roots.push_back({i, j});
  return r;
}

RootData RootData::with_negated(int idx) const {
  RootData r = *this;
  std::swap(r.roots[idx].first, r.roots[idx].second);
  return r;
}

std::vector<int> RootData::zeta() const {
  std::vector<int> z(k, 0);
  for (auto [i, j] : roots) ++z[i], --z[j];
  return z;
}

std::vector<int> RootData::a(int side) const {
  auto z = zeta();
  for (auto& x : z) x *= side;
  return z;
}

std::vector<int> RootData::root_coords(int r, int side) const {
  std::vector<int> c(k, 0);
  c[roots[r].first] += side;
  c[roots[r].second] -= side;
  return c;
}

bool RootData::sign_identity_holds() const {
  for (int side : {1, -1})
    for (int x : a(side))
      if ((((x % 2) + 2) % 2) != (k - 1) % 2) return false;
  return true;
}

Poly RootData::delta_poly(const Params& p) const {
  Poly d(1);
  for (auto [i, j] : roots) d *= p.H(i) - p.H(j);
  return d;
}

}  // namespace flop
