// Acceptance run: one line per criterion, sub-check ids "<criterion>.<name>".
// Exit 0 only when the failing sub-checks are exactly the ones passed to --expect-fail.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>

#include "flop/pipeline.hpp"

using namespace flop;
using namespace flop::pipe;

namespace {

struct Sub {
  std::string id;
  Check c;
};

std::vector<std::set<std::string>> failing_by_criterion(11);
std::set<std::string> failing;

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Sub timed(const std::string& id, double seconds, double limit) {
  Check c;
  c.pass = seconds < limit;
  c.kind = Kind::Numeric;
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.0f s (target %.0f s)", seconds, limit);
  c.detail = buf;
  return {id, c};
}

void report(int n, const std::string& title, const std::vector<Sub>& subs, const std::set<std::string>& expected) {
  bool pass = true;
  std::ostringstream det;
  for (auto& s : subs) {
    if (!s.c.pass) {
      pass = false;
      failing.insert(s.id);
      failing_by_criterion[n].insert(s.id);
    }
    det << "\n      " << (s.c.pass ? "ok   " : "FAIL ") << s.id << ": " << s.c.detail;
  }
  std::string note;
  if (!pass) {
    bool all_declared = true;
    for (auto& id : failing_by_criterion[n]) all_declared &= expected.count(id) > 0;
    note = all_declared ? " (declared)" : "";
  }
  std::printf("criterion %2d: %s  %s%s%s\n", n, pass ? "PASS" : "FAIL", title.c_str(), note.c_str(), det.str().c_str());
  std::fflush(stdout);
}

RunConfig config(int k, int n) {
  RunConfig c;
  c.k = k;
  c.n = n;
  c.Dq = 4;
  c.L = 3;
  c.X = 2;
  c.validate();
  return c;
}

std::string side_tag(int side) { return side > 0 ? "+" : "-"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance run"};
  std::vector<std::string> expect;
  app.add_option("--expect-fail", expect, "sub-check ids declared to fail");
  CLI11_PARSE(app, argc, argv);
  std::set<std::string> expected;
  for (auto& e : expect) {
    std::stringstream ss(e);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) expected.insert(item);
  }
  auto t_all = std::chrono::steady_clock::now();
  const std::vector<std::pair<int, int>> kn{{2, 3}, {2, 4}};

  {
    std::vector<Sub> subs;
    auto t0 = std::chrono::steady_clock::now();
    for (auto [k, n] : kn) {
      Params p = config(k, n).exact_params();
      for (int side : {1, -1}) {
        std::string id = "1.AB(" + std::to_string(k) + "," + std::to_string(n) + ")" + side_tag(side);
        subs.push_back({id, guarded(id, "", [&] { return abelianization_AB(p, side, Trunc{4, 3, 2}); })});
      }
    }
    subs.push_back(timed("1.runtime", since(t0), 300));
    report(1, "formulas A and B give identical I_G on both sides, (2,3) and (2,4)", subs, expected);
  }
  {
    std::vector<Sub> subs;
    for (auto [k, n] : kn) {
      Params p = config(k, n).exact_params();
      for (int side : {1, -1}) {
        std::string id = "2.anti(" + std::to_string(k) + "," + std::to_string(n) + ")" + side_tag(side);
        subs.push_back({id, guarded(id, "", [&] { return delta_antiinvariance(p, side, Trunc{4, 3, 2}); })});
      }
    }
    report(2, "derivative of I_T anti-invariant and divisible by Delta", subs, expected);
  }
  {
    std::vector<Sub> subs;
    for (auto [k, n] : kn) {
      Params p = config(k, n).exact_params();
      for (int side : {1, -1}) {
        std::string id = "3.routes(" + std::to_string(k) + "," + std::to_string(n) + ")" + side_tag(side);
        subs.push_back({id, guarded(id, "", [&] { return pairing_routes(p, side); })});
      }
    }
    Sub cst{"3.constant", guarded("3.constant", "", [] { return pairing_constant(2, 3, 1); })};
    if (cst.c.pass && cst.c.data.value("constant", "") != "-1/2") {
      cst.c.pass = false;
      cst.c.detail += " (expected -1/2)";
    }
    subs.push_back(cst);
    report(3, "Gram matrices agree on both routes; constant -1/2", subs, expected);
  }
  {
    std::vector<Sub> subs;
    Params p = config(2, 3).exact_params();
    for (int side : {1, -1}) {
      std::string id = "4.big" + side_tag(side);
      Sub s{id, guarded(id, "", [&] { return bigness(p, side); })};
      if (s.c.pass && s.c.data.value("rank", -1) != 3) {
        s.c.pass = false;
        s.c.detail += " (expected rank 3)";
      }
      subs.push_back(s);
    }
    report(4, "derivative classes {sum(+-H_i), P_j}, rank 3 for (2,3)", subs, expected);
  }

  RunConfig c23 = config(2, 3);
  auto t0 = std::chrono::steady_clock::now();
  std::vector<Check> cont;
  try {
    cont = continuation_checks(c23.continuation(c23.seed)).checks;
  } catch (const std::exception& e) {
    Check c;
    c.detail = std::string("continuation failed: ") + e.what();
    cont = {c};
    cont[0].id = "cont.run";
  }
  double t_cont = since(t0);
  auto pick = [&](int crit, const std::string& id) {
    std::string name = id.substr(id.find('.') + 1);
    for (auto& c : cont)
      if (c.id == id) return Sub{std::to_string(crit) + "." + name, c};
    Check miss;
    miss.detail = "not computed";
    for (auto& c : cont)
      if (c.id == "cont.run") miss.detail = c.detail;
    return Sub{std::to_string(crit) + "." + name, miss};
  };
  report(5, "continued I_G^+ matches I_G^- along gamma and along delta with the same U, (2,3)",
         {pick(5, "cont.gamma"), pick(5, "cont.delta_sameU"), pick(5, "cont.delta_twisted"),
          timed("5.runtime", t_cont, 120)},
         expected);
  report(6, "U is Weyl equivariant, symplectic and degree homogeneous",
         {pick(6, "cont.weyl"), pick(6, "cont.symplectic"), pick(6, "cont.degree")}, expected);
  report(7, "diagonal and wall-by-wall routes agree; eps 0.05 and 0.1 agree", {pick(7, "cont.walls"), pick(7, "cont.eps")},
         expected);
  report(8, "ODE engine: (1+y)^beta along paths; ODE against series on 100 draws",
         {{"8.closed_form", guarded("8.closed_form", "", ode_closed_form)},
          {"8.vs_series", guarded("8.vs_series", "", [] { return ode_vs_series(100, 7); })}},
         expected);
  {
    RunConfig c = config(1, 3);
    auto rep = verify_all(c, {});
    std::vector<Sub> subs;
    for (auto& ch : rep.checks) subs.push_back({"9." + ch.id, ch});
    report(9, "k = 1: full pipeline for (1,3), single toric wall with U = U_T", subs, expected);
  }
  {
    std::vector<Sub> subs;
    for (auto& ch : cone_suite(6)) subs.push_back({"10." + ch.id.substr(ch.id.find('.') + 1), ch});
    report(10, "point theory: SE, DE, TRR at order 6, round trip, identity, off-cone detection", subs, expected);
  }

  std::printf("total %.0f s\n", since(t_all));
  std::set<std::string> surprise, missing;
  for (auto& f : failing)
    if (!expected.count(f)) surprise.insert(f);
  for (auto& e : expected)
    if (!failing.count(e)) missing.insert(e);
  for (auto& s : surprise) std::printf("undeclared failure: %s\n", s.c_str());
  for (auto& s : missing) std::printf("declared failure did not occur: %s\n", s.c_str());
  return surprise.empty() && missing.empty() ? 0 : 1;
}
