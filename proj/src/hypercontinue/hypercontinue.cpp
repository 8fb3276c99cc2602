#include "flop/hypercontinue.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace flop::hc {

std::string CRat::str() const {
  if (im == 0) return to_string(re);
  std::string s = re == 0 ? "" : to_string(re);
  if (im > 0 && !s.empty()) s += "+";
  return s + to_string(im) + "i";
}

CRat crat_from_string(const std::string& in) {
  std::string s;
  for (char ch : in)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ContractError("empty complex literal");
  CRat out;
  if (s.back() != 'i') {
    out.re = rat_from_string(s);
    return out;
  }
  s.pop_back();
  // split at the last sign that is not the leading one and not after an exponent marker
  size_t cut = std::string::npos;
  for (size_t i = s.size(); i-- > 1;)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      cut = i;
      break;
    }
  std::string re = cut == std::string::npos ? "" : s.substr(0, cut);
  std::string im = cut == std::string::npos ? s : s.substr(cut);
  if (im == "+" || im == "" ) im = "1";
  if (im == "-") im = "-1";
  if (!re.empty()) out.re = rat_from_string(re);
  out.im = rat_from_string(im[0] == '+' ? im.substr(1) : im);
  return out;
}

std::string PathSpec::str() const {
  std::ostringstream o;
  for (size_t i = 0; i < pts.size(); ++i) {
    auto& q = pts[i];
    if (i) o << " -> ";
    o << "(";
    if (q.log_eps) o << (q.log_eps > 0 ? "" : "-") << "log(" << to_string(eps) << ")";
    if (q.re_off != 0) o << "+" << to_string(q.re_off);
    if (q.pi_im != 0) o << "+" << to_string(q.pi_im) << "*pi*i";
    if (q.im_off != 0) o << "+" << to_string(q.im_off) << "i";
    if (!q.log_eps && q.re_off == 0 && q.pi_im == 0 && q.im_off == 0) o << "0";
    o << ")";
  }
  return o.str();
}

Paths build_paths(int k, int n, const Rat& eps) {
  if (eps <= 0 || eps >= 1) throw ContractError("eps must lie in (0, 1)");
  Paths p;
  Rat h(n - 1);
  auto gam = [&](const Rat& shift) {
    return std::vector<PathPoint>{{1, shift, 0, 0}, {1, h + shift, 0, 0}, {-1, h + shift, 0, 0}, {-1, shift, 0, 0}};
  };
  p.gamma = {eps, gam(0)};
  // delta = delta_1 * (gamma shifted by -i pi (k-1)) * delta_0, in log y^+
  Rat s(k - 1);
  p.delta.eps = eps;
  p.delta.pts.push_back({1, 0, 0, 0});
  for (auto& q : gam(-s)) p.delta.pts.push_back(q);
  p.delta.pts.push_back({-1, 0, 0, 0});
  for (int c = 1; c <= k; ++c) p.gamma_prime.push_back(p.gamma);
  return p;
}

double path_clearance(const PathSpec& p, int n, const Rat& shift_pi) {
  auto v = p.vertices<C128>(shift_pi);
  double best = 1e300;
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    // sample densely; segments are short
    for (int t = 0; t <= 400; ++t) {
      C128 u = v[i] + (v[i + 1] - v[i]) * C128(t) / C128(400);
      best = std::min(best, to_d<C128>(singular_distance(u, n)));
    }
  }
  return best;
}

NumParams NumParams::seeded(int k, int n, unsigned seed) {
  if (k < 1 || k > n) throw ContractError("need 1 <= k <= n");
  std::mt19937 g(seed);
  std::uniform_int_distribution<int> num(-60, 60);
  NumParams p;
  p.k = k, p.n = n;
  for (;;) {
    std::set<Rat> vals;
    std::vector<Rat> all;
    while (int(all.size()) < 2 * n) {
      Rat r = rat(num(g), 61);
      if (vals.insert(r).second) all.push_back(r);
    }
    // differences are never integers (all values in (-1, 1), distinct, and |diff| != 1)
    bool ok = true;
    for (size_t a = 0; a < all.size(); ++a)
      for (size_t b = a + 1; b < all.size(); ++b) {
        Rat d = all[a] - all[b];
        if (d.get_den() == 1) ok = false;
      }
    if (!ok) continue;
    p.lam.assign(all.begin(), all.begin() + n);
    p.sig.assign(all.begin() + n, all.end());
    return p;
  }
}

NumParams NumParams::scaled(const Rat& t) const {
  NumParams p = *this;
  for (auto& x : p.lam) x *= t;
  for (auto& x : p.sig) x *= t;
  return p;
}

std::string NumParams::str() const {
  std::ostringstream o;
  o << "k=" << k << " n=" << n << " lambda=[";
  for (size_t j = 0; j < lam.size(); ++j) o << (j ? "," : "") << to_string(lam[j]);
  o << "] sigma=[";
  for (size_t j = 0; j < sig.size(); ++j) o << (j ? "," : "") << to_string(sig[j]);
  o << "]";
  return o.str();
}

Poly coefficient_operator(const MonomialCatalog& cat, const CoeffSel& s) {
  int k = cat.k;
  std::vector<Poly> u;
  for (int i = 0; i < k; ++i) u.push_back(Poly::var(i));
  Poly op(1);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) op *= u[i] - u[j];
  for (int j = 0; j < cat.N() && j < int(s.a.size()); ++j)
    if (s.a[j]) op *= cat.eval_P(j, u).pow(s.a[j]);
  Poly sum;
  for (auto& x : u) sum += x;
  op *= sum.pow(s.m);
  return op;
}

int operator_order(const MonomialCatalog& cat, const std::vector<CoeffSel>& sels) {
  int best = 0;
  for (auto& s : sels) {
    Poly op = coefficient_operator(cat, s);
    for (auto& t : op.terms())
      for (int i = 0; i < cat.k; ++i) best = std::max(best, mono_exp(t.m, i));
  }
  return best;
}

std::vector<CoeffSel> retained_coefficients(int N, int X, int L) {
  std::vector<CoeffSel> out;
  std::vector<int> a(N, 0);
  std::function<void(int, int)> rec = [&](int j, int budget) {
    if (j == N) {
      for (int m = 0; m <= L; ++m) out.push_back({a, m});
      return;
    }
    for (int e = 0; e <= budget; ++e) {
      a[j] = e;
      rec(j + 1, budget - e);
    }
    a[j] = 0;
  };
  rec(0, X);
  return out;
}

double ContinuationReport::worst(const std::function<double(const ZReport&)>& f) const {
  double w = 0;
  for (auto& z : per_z) w = std::max(w, f(z));
  return w;
}

std::string ContinuationReport::param_stamp() const {
  std::ostringstream o;
  o << cfg.np.str() << " eps=" << to_string(cfg.eps) << " eps_alt=" << to_string(cfg.eps_alt) << " z=[";
  for (size_t i = 0; i < cfg.z_samples.size(); ++i) o << (i ? "," : "") << cfg.z_samples[i].str();
  o << "] bits=" << bits_used << " tol_rel=" << cfg.tol_rel << " X=" << cfg.X << " L=" << cfg.L
    << " hmax=" << cfg.sc.hmax;
  return o.str();
}

namespace {

template <class C>
struct Runner {
  static std::vector<ZReport> run(const ContinuationConfig& cfg) {
    const NumParams& np = cfg.np;
    int k = np.k, n = np.n;
    if (k >= n) throw ContractError("continuation needs k < n");
    auto cat = MonomialCatalog::build(k, n);
    auto sels = retained_coefficients(cat.N(), cfg.X, cfg.L);
    int order = std::max(n - 1, operator_order(cat, sels));
    NumParams scaled = np.scaled(cfg.degree_t);
    auto Gp = abelian_gram<C>(np, 1), Gm = abelian_gram<C>(np, -1);
    auto GGp = nonabelian_gram<C>(np, 1), GGm = nonabelian_gram<C>(np, -1);
    Params p = np.exact();
    NonabelianChowModule mp(p, 1), mm(p, -1);
    auto degG = mp.degrees();
    auto degT = abelian_monomial_degrees(k, n);
    // basepoint variant: end further out on the minus side
    Paths ps = build_paths(k, n, cfg.eps);
    PathSpec bp = ps.gamma;
    bp.pts.back().re_off = Rat(1, 2);
    bp.pts[bp.pts.size() - 2].re_off = Rat(1, 2);

    std::vector<ZReport> out;
    for (auto& zr : cfg.z_samples) {
      auto t0 = std::chrono::steady_clock::now();
      ZReport rep;
      rep.z = zr;
      C z = from_crat<C>(zr);
      auto jets_for = [&](const NumParams& q, const CRat& zz, Route r, const Rat& eps, int ord,
                          const PathSpec* path = nullptr) {
        RunInputs<C> in{q, zz, eps, r, ord, cfg.sc, path};
        return diagonal_jets(in);
      };
      auto g = jets_for(np, zr, Route::Gamma, cfg.eps, order);
      auto tc = toric_connection(np, g, z);
      rep.cond_A = tc.cond_A;
      auto UG = assemble_U(tc.U, np);
      rep.U_T = to_double(tc.U);
      rep.U = to_double(UG.basis);
      rep.antiinv = UG.antiinv_residual;
      rep.weyl = weyl_residual(tc.U, k, n);

      // residuals along gamma
      for (auto& s : sels) {
        auto vp = ig_values(np, g, z, 1, s), vm = ig_values(np, g, z, -1, s);
        double r = rel_diff(mat_vec(UG.loc, vp), vm);
        rep.gamma_table.push_back({s.a, s.m, r});
        rep.gamma_residual = std::max(rep.gamma_residual, r);
      }
      // delta: the same U, and the U twisted by exp(-i pi (k-1) c_1 / z) on both sides
      auto d = jets_for(np, zr, Route::Delta, cfg.eps, order);
      Mat<C> twisted = UG.loc;
      {
        C ph = -i_c<C>() * pi_c<C>() * C(k - 1) / z;
        for (int Jp = 0; Jp < mm.rank(); ++Jp)
          for (int J = 0; J < mp.rank(); ++J) {
            C cm(0), cp(0);
            for (int x : mm.subsets()[Jp]) cm += from_rat<C>(np.sig[x]);
            for (int x : mp.subsets()[J]) cp += from_rat<C>(np.lam[x]);
            twisted[Jp][J] *= bmp::exp(ph * cm) / bmp::exp(ph * cp);
          }
      }
      for (auto& s : sels) {
        auto vp = ig_values(np, d, z, 1, s), vm = ig_values(np, d, z, -1, s);
        double same = rel_diff(mat_vec(UG.loc, vp), vm);
        double tw = rel_diff(mat_vec(twisted, vp), vm);
        rep.delta_table.push_back({s.a, s.m, same});
        rep.delta_sameU_residual = std::max(rep.delta_sameU_residual, same);
        rep.delta_twisted_residual = std::max(rep.delta_twisted_residual, tw);
      }

      // symplectic: needs U at -z
      auto gm = jets_for(np, -zr, Route::Gamma, cfg.eps, n - 1);
      auto tcm = toric_connection(np, gm, -z);
      rep.symplectic_T = symplectic_residual(tc.U, tcm.U, Gm, Gp);
      auto UGm = assemble_U(tcm.U, np);
      rep.symplectic_G = symplectic_residual(UG.basis, UGm.basis, GGm, GGp);

      // degree: rerun at (t lambda, t sigma, t z)
      CRat zs = zr * cfg.degree_t;
      auto gs = jets_for(scaled, zs, Route::Gamma, cfg.eps, n - 1);
      auto tcs = toric_connection(scaled, gs, from_crat<C>(zs));
      rep.degree_T = degree_residual(abelian_monomial_basis(tc.U, np), abelian_monomial_basis(tcs.U, scaled), degT, degT,
                                     cfg.degree_t);
      auto UGs = assemble_U(tcs.U, scaled);
      rep.degree_G = degree_residual(UG.basis, UGs.basis, degG, degG, cfg.degree_t);

      // route, eps and basepoint independence
      StepControl wsc = cfg.sc;
      wsc.hmax *= 0.7;
      rep.walls_vs_diagonal = rel_diff(toric_connection_walls<C>(np, zr, cfg.eps, wsc), tc.U);
      auto ge = jets_for(np, zr, Route::Gamma, cfg.eps_alt, n - 1);
      rep.eps_independence = rel_diff(toric_connection(np, ge, z).U, tc.U);
      auto gb = jets_for(np, zr, Route::Gamma, cfg.eps, n - 1, &bp);
      rep.basepoint_independence = rel_diff(toric_connection(np, gb, z).U, tc.U);

      rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.push_back(rep);
    }
    return out;
  }
};

bool precision_limited(const std::vector<ZReport>& zs, double tol) {
  for (auto& r : zs) {
    for (double v : {r.gamma_residual, r.weyl, r.antiinv, r.symplectic_T, r.symplectic_G, r.degree_T, r.degree_G,
                     r.walls_vs_diagonal, r.eps_independence, r.basepoint_independence})
      if (!(v < tol)) return true;
  }
  return false;
}

}  // namespace

ContinuationReport run_continuation(const ContinuationConfig& cfg) {
  ContinuationReport rep;
  rep.cfg = cfg;
  int bits = cfg.bits;
  for (;;) {
    rep.per_z = with_precision<Runner>(bits, cfg);
    rep.bits_used = bits;
    if (!cfg.escalate || !precision_limited(rep.per_z, cfg.tol_rel) || bits * 2 > cfg.max_bits) break;
    bits *= 2;
  }
  return rep;
}

}  // namespace flop::hc
