#pragma once
// Run configuration and the individual checks behind `flopctl verify-all`
// and the acceptance driver.
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "flop/chow_rings.hpp"
#include "flop/hypercontinue.hpp"
#include "flop/ifactory.hpp"

namespace flop::pipe {

using json = nlohmann::json;

struct RunConfig {
  int k = 2, n = 3;
  std::vector<int> sides{1, -1};
  int Dq = 4, L = 3, X = 2;
  std::string eps = "1/10", eps_alt = "1/20";
  int bits = 128, max_bits = 512;
  double tol = 1e-8;
  std::vector<std::string> z{"1", "1+2i"};
  unsigned seed = 1;
  int param_samples = 1;
  bool symbolic = false;  // exact stages with symbolic lambda, sigma
  std::string out;        // output directory, empty for none
  int jobs = 1;

  void validate() const;  // ContractError
  json to_json() const;
  // unknown keys are rejected; missing keys keep their defaults
  static RunConfig from_json(const json& j);
  std::string stamp() const;
  Params exact_params() const;
  hc::ContinuationConfig continuation(unsigned seed) const;
};

enum class Kind { Contract, Consistency, Numeric };
int exit_code(Kind k);
const char* kind_name(Kind k);

struct Check {
  std::string id;
  std::string title;
  bool pass = false;
  Kind kind = Kind::Consistency;  // what a failure means
  std::string detail;
  double seconds = 0;
  json data = json::object();
};

json check_json(const Check& c);

// Runs f; exceptions become a failed check of the matching kind.
Check guarded(const std::string& id, const std::string& title, const std::function<Check()>& f);

// ---- exact stages
Check chow_consistency(const Params& p);
Check abelianization_AB(const Params& p, int side, const Trunc& t);
Check delta_antiinvariance(const Params& p, int side, const Trunc& t);
Check pairing_routes(const Params& p, int side);
Check pairing_constant(int k, int n, unsigned seed);
Check bigness(const Params& p, int side);

// ---- numeric stages
struct ContinuationChecks {
  hc::ContinuationReport report;
  std::vector<Check> checks;  // cont.gamma, cont.delta_sameU, cont.delta_twisted, ...
};
ContinuationChecks continuation_checks(const hc::ContinuationConfig& cfg);
json zreport_json(const hc::ZReport& z);
Check k1_reduction(const hc::NumParams& np, const std::vector<hc::CRat>& zs);
Check ode_closed_form();
Check ode_vs_series(int draws, unsigned seed);

// ---- genus-zero suite on the point
std::vector<Check> cone_suite(int order);
// J, DI and a reconstruction round trip for the point; text transcript plus JSON
json cone_demo_point(int order, std::string* transcript);

// ---- orchestration
struct Report {
  RunConfig cfg;
  std::vector<Check> checks;
  std::set<std::string> expected_failures;
  double seconds = 0;
  // 0 when the failing set equals expected_failures
  int exit_status() const;
  json to_json() const;
};

Report verify_all(const RunConfig& cfg, const std::set<std::string>& expect_fail,
                  const std::function<void(const Check&)>& progress = {});

// ---- export
// coefficient rows of the nonabelian series: d, x-exp, logy-exp, z-pow, basis
std::string series_csv(const GSeries& g);
json series_json(const GSeries& g);

std::string fmt(double x);  // short scientific

}  // namespace flop::pipe
