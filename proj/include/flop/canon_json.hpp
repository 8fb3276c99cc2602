#pragma once
#include <json.hpp>

#include "flop/multiseries.hpp"
#include "flop/ratfn.hpp"

namespace flop {

using json = nlohmann::json;

// Terms ordered by exponent vector (lexicographic), rationals as decimal strings.
json poly_to_json(const Poly& p, int nvars);
Poly poly_from_json(const json& j);
json ratfn_to_json(const RatFn& f, int nvars);
RatFn ratfn_from_json(const json& j);
json varspec_to_json(const VarSpec& s);

template <class V, class F>
json series_to_json(const MultiSeries<V>& s, F coef_to_json) {
  json terms = json::array();
  for (auto& [e, v] : s.terms()) terms.push_back({{"exp", e}, {"coef", coef_to_json(v)}});
  return {{"spec", varspec_to_json(s.spec())}, {"terms", terms}};
}

// byte-stable text form
std::string canonical_dump(const json& j);

}  // namespace flop
