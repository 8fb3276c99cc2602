// flopctl: command-line driver for the flop pipeline.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "flop/canon_json.hpp"
#include "flop/cone_lab.hpp"
#include "flop/errors.hpp"
#include "flop/pipeline.hpp"

using namespace flop;
using namespace flop::pipe;
namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  int k = 0, n = 0, Dq = 0, L = 0, X = 0, bits = 0, jobs = 0;
  unsigned seed = 0;
  std::string eps, out, side;
  double tol = 0;
  std::vector<std::string> z;
  bool symbolic = false;
};

RunConfig resolve(const CLI::App& app, const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ContractError("cannot read config file " + f.config);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ContractError("config file is not valid JSON: " + std::string(e.what()));
    }
    c = RunConfig::from_json(j);
  }
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--k")) c.k = f.k;
  if (given("--n")) c.n = f.n;
  if (given("--dq")) c.Dq = f.Dq;
  if (given("--L")) c.L = f.L;
  if (given("--X")) c.X = f.X;
  if (given("--bits")) c.bits = f.bits, c.max_bits = std::max(c.max_bits, f.bits);
  if (given("--jobs")) c.jobs = f.jobs;
  if (given("--seed")) c.seed = f.seed;
  if (given("--eps")) c.eps = f.eps;
  if (given("--out")) c.out = f.out;
  if (given("--tol")) c.tol = f.tol;
  if (given("--z")) c.z = f.z;
  if (given("--symbolic")) c.symbolic = f.symbolic;
  if (given("--side")) {
    if (f.side == "+") c.sides = {1};
    else if (f.side == "-") c.sides = {-1};
    else if (f.side == "both") c.sides = {1, -1};
    else throw ContractError("--side takes +, - or both");
  }
  c.validate();
  return c;
}

void write_out(const RunConfig& c, const std::string& name, const std::string& text) {
  if (c.out.empty()) return;
  fs::create_directories(c.out);
  std::ofstream(fs::path(c.out) / name) << text;
  std::cerr << "wrote " << (fs::path(c.out) / name).string() << "\n";
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ull;
  return h;
}

fs::path cache_path(const RunConfig& c, unsigned seed) {
  const char* dir = std::getenv("FLOP_CACHE_DIR");
  if (!dir || !*dir) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(c.stamp() + "#" + std::to_string(seed)));
  return fs::path(dir) / ("continue-" + std::string(buf) + ".json");
}

json continuation_json(const ContinuationChecks& cc) {
  json per = json::array();
  for (auto& z : cc.report.per_z) per.push_back(zreport_json(z));
  json checks = json::array();
  for (auto& c : cc.checks) checks.push_back(check_json(c));
  return {{"paramStamp", cc.report.param_stamp()}, {"bits_used", cc.report.bits_used}, {"per_z", per}, {"checks", checks}};
}

// continuation result from the cache, or computed (and cached) unless cached_only
json continuation_result(const RunConfig& c, bool cached_only) {
  fs::path p = cache_path(c, c.seed);
  if (!p.empty() && fs::exists(p)) {
    std::ifstream in(p);
    return json::parse(in);
  }
  if (cached_only)
    throw ContractError("no cached continuation for this configuration" +
                        std::string(p.empty() ? " (FLOP_CACHE_DIR is not set)" : " at " + p.string()) +
                        "; run `flopctl continue` with the same options first");
  json j = continuation_json(continuation_checks(c.continuation(c.seed)));
  // timings make the cached file differ between runs; drop them
  for (auto& ch : j["checks"]) ch.erase("seconds");
  if (!p.empty()) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << canonical_dump(j) << "\n";
  }
  return j;
}

void print_check(const Check& c) {
  std::printf("%-4s %-22s %s\n", c.pass ? "ok" : "FAIL", c.id.c_str(), c.detail.c_str());
  std::fflush(stdout);
}

std::string d17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string gram_text(const std::vector<std::vector<RatFn>>& G, const Params& p) {
  json a = json::array();
  for (auto& row : G) {
    json r = json::array();
    for (auto& x : row) r.push_back(x.str(p.names()));
    a.push_back(r);
  }
  return canonical_dump(a);
}

int run(int argc, char** argv) {
  CLI::App app{"flopctl: Grassmannian flop pipeline"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "flat JSON config file; flags override it");
  app.add_option("--k", f.k, "k (default 2)");
  app.add_option("--n", f.n, "n (default 3)");
  app.add_option("--dq", f.Dq, "Novikov truncation (default 4)");
  app.add_option("--L", f.L, "log y truncation (default 3)");
  app.add_option("--X", f.X, "x truncation (default 2)");
  app.add_option("--eps", f.eps, "path parameter epsilon (default 1/10)");
  app.add_option("--bits", f.bits, "working precision in bits (default 128)");
  app.add_option("--tol", f.tol, "relative tolerance (default 1e-8)");
  app.add_option("--z", f.z, "z samples (default 1 1+2i)");
  app.add_option("--seed", f.seed, "parameter seed (default 1)");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--jobs", f.jobs, "worker threads (default 1)");
  app.add_option("--side", f.side, "+, - or both");
  app.add_flag("--symbolic", f.symbolic, "exact stages with symbolic lambda, sigma");

  auto* chow = app.add_subcommand("chow", "build the Chow rings and check them");
  std::string formula = "B";
  bool csv = false, as_json = false;
  auto* ifun = app.add_subcommand("ifun", "nonabelian I-function series");
  ifun->add_option("--formula", formula, "A or B")->check(CLI::IsMember({"A", "B"}));
  ifun->add_flag("--csv", csv, "coefficient table");
  ifun->add_flag("--json", as_json, "full series as JSON");
  auto* abel = app.add_subcommand("abelianize", "compare both abelianization formulas");
  auto* cont = app.add_subcommand("continue", "analytic continuation and the connection matrix");
  auto* cone = app.add_subcommand("cone", "genus-zero cone experiments on the point");
  cone->require_subcommand(1);
  int order = 6;
  auto* demo = cone->add_subcommand("demo-point", "J, DI and a reconstruction round trip");
  demo->add_option("--order", order, "truncation order");
  demo->add_flag("--json", as_json, "JSON export");
  auto* suite = cone->add_subcommand("suite", "axioms and reconstruction checks");
  suite->add_option("--order", order, "truncation order");
  auto* verify = app.add_subcommand("verify-all", "run every stage and report");
  std::vector<std::string> expect_fail;
  verify->add_option("--expect-fail", expect_fail, "check ids whose failure is declared");
  auto* emit = app.add_subcommand("emit", "write a series or matrix");
  std::string selector, emit_file, golden;
  bool cached_only = false;
  emit->add_option("selector", selector, "ifun-plus | ifun-minus | U | UT | gram-plus | gram-minus | config")
      ->required()
      ->check(CLI::IsMember({"ifun-plus", "ifun-minus", "U", "UT", "gram-plus", "gram-minus", "config"}));
  emit->add_flag("--json", as_json, "JSON (default)");
  emit->add_flag("--csv", csv, "CSV");
  emit->add_option("-o,--output", emit_file, "file instead of stdout");
  emit->add_option("--check", golden, "compare with a golden file instead of writing");
  emit->add_flag("--cached-only", cached_only, "fail instead of recomputing a missing stage");
  for (auto* s : {chow, ifun, abel, cont, verify, emit}) s->fallthrough();
  cone->fallthrough();
  demo->fallthrough();
  suite->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  RunConfig cfg = resolve(app, f);

  if (*chow) {
    Params p = cfg.exact_params();
    Check c = guarded("chow.consistency", "", [&] { return chow_consistency(p); });
    json out = {{"paramStamp", cfg.stamp()}, {"check", check_json(c)}};
    for (int side : cfg.sides) {
      NonabelianChowModule m(p, side);
      std::printf("side %s: rank %d, degrees", side > 0 ? "+" : "-", m.rank());
      for (int d : m.degrees()) std::printf(" %d", d);
      std::printf("\n");
      out[side > 0 ? "plus" : "minus"] = {{"rank", m.rank()}, {"degrees", m.degrees()}};
    }
    print_check(c);
    write_out(cfg, "chow.json", canonical_dump(out) + "\n");
    return c.pass ? 0 : exit_code(c.kind);
  }
  if (*ifun) {
    Params p = cfg.exact_params();
    Trunc t{cfg.Dq, cfg.L, cfg.X};
    for (int side : cfg.sides) {
      auto g = abelianize_IG(p, side, formula == "A" ? Formula::A : Formula::B, t);
      std::string sname = side > 0 ? "plus" : "minus";
      std::printf("I_G^%s: %zu coefficients (formula %s, Dq=%d L=%d X=%d)\n", side > 0 ? "+" : "-",
                  g.s.terms().size(), formula.c_str(), t.Dq, t.L, t.X);
      if (csv) {
        std::string s = series_csv(g);
        if (cfg.out.empty()) std::cout << s;
        write_out(cfg, "ifun-" + sname + ".csv", s);
      }
      if (as_json) {
        json j = series_json(g);
        j["paramStamp"] = cfg.stamp();
        std::string s = canonical_dump(j) + "\n";
        if (cfg.out.empty()) std::cout << s;
        write_out(cfg, "ifun-" + sname + ".json", s);
      }
    }
    return 0;
  }
  if (*abel) {
    Params p = cfg.exact_params();
    int code = 0;
    for (int side : cfg.sides) {
      std::string id = std::string("abelianize.AB") + (side > 0 ? "+" : "-");
      Check c = guarded(id, "", [&] { return abelianization_AB(p, side, Trunc{cfg.Dq, cfg.L, cfg.X}); });
      print_check(c);
      if (!c.pass && !code) code = exit_code(c.kind);
    }
    return code;
  }
  if (*cont) {
    auto cc = continuation_checks(cfg.continuation(cfg.seed));
    std::printf("%s\n", cc.report.param_stamp().c_str());
    for (auto& z : cc.report.per_z)
      std::printf("z=%s: cond(A)=%s, %.1f s\n", z.z.str().c_str(), fmt(z.cond_A).c_str(), z.seconds);
    int code = 0;
    for (auto& c : cc.checks) {
      print_check(c);
      if (!c.pass && !code) code = exit_code(c.kind);
    }
    json j = continuation_json(cc);
    write_out(cfg, "continue.json", canonical_dump(j) + "\n");
    fs::path p = cache_path(cfg, cfg.seed);
    if (!p.empty()) {
      for (auto& ch : j["checks"]) ch.erase("seconds");
      fs::create_directories(p.parent_path());
      std::ofstream(p) << canonical_dump(j) << "\n";
    }
    return code;
  }
  if (*demo) {
    std::string tr;
    json j = cone_demo_point(order, &tr);
    if (as_json) std::cout << canonical_dump(j) << "\n";
    else std::cout << tr;
    write_out(cfg, "cone-demo-point.json", canonical_dump(j) + "\n");
    return j["on_cone"].get<bool>() ? 0 : 3;
  }
  if (*suite) {
    int code = 0;
    for (auto& c : cone_suite(order)) {
      print_check(c);
      if (!c.pass && !code) code = exit_code(c.kind);
    }
    return code;
  }
  if (*verify) {
    std::set<std::string> ef;
    for (auto& e : expect_fail) {
      std::stringstream ss(e);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) ef.insert(item);
    }
    std::printf("paramStamp %s\n", cfg.stamp().c_str());
    auto rep = verify_all(cfg, ef, print_check);
    int st = rep.exit_status();
    std::printf("%zu checks, %.1f s, exit %d\n", rep.checks.size(), rep.seconds, st);
    write_out(cfg, "report.json", canonical_dump(rep.to_json()) + "\n");
    return st;
  }
  if (*emit) {
    std::string text;
    if (selector == "config") {
      text = canonical_dump(cfg.to_json()) + "\n";
    } else if (selector == "ifun-plus" || selector == "ifun-minus") {
      int side = selector == "ifun-plus" ? 1 : -1;
      Params p = cfg.exact_params();
      auto g = abelianize_IG(p, side, Formula::B, Trunc{cfg.Dq, cfg.L, cfg.X});
      if (csv) text = series_csv(g);
      else {
        json j = series_json(g);
        j["paramStamp"] = cfg.stamp();
        text = canonical_dump(j) + "\n";
      }
    } else if (selector == "gram-plus" || selector == "gram-minus") {
      Params p = cfg.exact_params();
      NonabelianChowModule m(p, selector == "gram-plus" ? 1 : -1);
      auto G = gram_nonabelian(m, false);
      if (csv) {
        std::ostringstream os;
        os << "row,col,value\n";
        for (size_t r = 0; r < G.size(); ++r)
          for (size_t c = 0; c < G.size(); ++c) os << r << "," << c << "," << G[r][c].str(p.names()) << "\n";
        text = os.str();
      } else {
        text = canonical_dump(json{{"paramStamp", cfg.stamp()}, {"gram", json::parse(gram_text(G, p))}}) + "\n";
      }
    } else {  // U, UT
      json res = continuation_result(cfg, cached_only);
      std::string key = selector == "U" ? "U" : "U_T";
      if (csv) {
        std::ostringstream os;
        os << "z,row,col,re,im\n";
        for (auto& z : res["per_z"]) {
          auto& M = z[key];
          for (size_t r = 0; r < M.size(); ++r)
            for (size_t c = 0; c < M[r].size(); ++c)
              os << z["z"].get<std::string>() << "," << r << "," << c << "," << d17(M[r][c][0].get<double>()) << ","
                 << d17(M[r][c][1].get<double>()) << "\n";
        }
        text = os.str();
      } else {
        json mats = json::array();
        for (auto& z : res["per_z"]) mats.push_back({{"z", z["z"]}, {"matrix", z[key]}});
        text = canonical_dump(json{{"paramStamp", res["paramStamp"]}, {"seed", cfg.seed}, {key, mats}}) + "\n";
      }
    }
    if (!golden.empty()) {
      std::ifstream in(golden, std::ios::binary);
      if (!in) throw ContractError("cannot read golden file " + golden);
      std::string ref((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      if (ref != text) {
        std::cerr << "output differs from " << golden << "\n";
        return 3;
      }
      std::cerr << "matches " << golden << "\n";
      return 0;
    }
    if (emit_file.empty()) std::cout << text;
    else std::ofstream(emit_file) << text;
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ContractError& e) {
    std::cerr << "contract error: " << e.what() << "\n";
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency failure: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  }
}
