#include "flop/canon_json.hpp"

#include <algorithm>

namespace flop {

json poly_to_json(const Poly& p, int nvars) {
  std::vector<std::pair<std::vector<int>, std::string>> rows;
  for (auto& t : p.terms()) {
    std::vector<int> e(nvars);
    for (int v = 0; v < nvars; ++v) e[v] = mono_exp(t.m, v);
    rows.push_back({e, t.c.get_str()});
  }
  std::sort(rows.begin(), rows.end());
  json a = json::array();
  for (auto& [e, c] : rows) a.push_back({e, c});
  return a;
}

Poly poly_from_json(const json& j) {
  std::vector<Term> t;
  for (auto& row : j) {
    Mono m = 0;
    auto e = row[0].get<std::vector<int>>();
    for (size_t v = 0; v < e.size(); ++v)
      if (e[v]) m += mono_var(int(v), e[v]);
    t.push_back({m, rat_from_string(row[1].get<std::string>())});
  }
  return Poly::from_terms(std::move(t));
}

json ratfn_to_json(const RatFn& f, int nvars) {
  RatFn g = f;
  g.cancel();
  json den = json::array();
  for (auto& [p, e] : g.den()) den.push_back({{"factor", poly_to_json(p, nvars)}, {"mult", e}});
  return {{"num", poly_to_json(g.num(), nvars)}, {"den", den}};
}

RatFn ratfn_from_json(const json& j) {
  std::vector<RatFn::Factor> den;
  for (auto& d : j.at("den")) den.push_back({poly_from_json(d.at("factor")), d.at("mult").get<int>()});
  return RatFn(poly_from_json(j.at("num")), den);
}

json varspec_to_json(const VarSpec& s) {
  return {{"q", s.q}, {"logy", s.logy}, {"x", s.x}, {"Dq", s.Dq}, {"L", s.L}, {"X", s.X}};
}

std::string canonical_dump(const json& j) { return j.dump(1) + "\n"; }

}  // namespace flop
