#pragma once
#include <boost/multiprecision/complex_adaptor.hpp>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "flop/chow_rings.hpp"
#include "flop/errors.hpp"
#include "flop/rat.hpp"

namespace flop::hc {

namespace bmp = boost::multiprecision;

constexpr unsigned digits_for(unsigned bits) { return bits * 30103u / 100000u + 2u; }
template <unsigned Bits>
using RealT = bmp::number<bmp::mpfr_float_backend<digits_for(Bits)>, bmp::et_off>;
template <unsigned Bits>
using CplxT = bmp::number<bmp::complex_adaptor<bmp::mpfr_float_backend<digits_for(Bits)>>, bmp::et_off>;

using C128 = CplxT<128>;
using C256 = CplxT<256>;
using C512 = CplxT<512>;

template <class C>
using Vec = std::vector<C>;
template <class C>
using Mat = std::vector<std::vector<C>>;

// exact complex number, used for z samples
struct CRat {
  Rat re = 0, im = 0;
  CRat operator-() const { return {-re, -im}; }
  CRat operator*(const Rat& t) const { return {re * t, im * t}; }
  std::string str() const;
};
CRat crat_from_string(const std::string& s);  // "1", "1+2i", "-0.5-1i", "2i"

template <class C>
C from_rat(const Rat& r) {
  using R = typename C::value_type;
  return C(R(r.get_num().get_str()) / R(r.get_den().get_str()));
}
template <class C>
C from_crat(const CRat& r) {
  using R = typename C::value_type;
  return C(R(r.re.get_num().get_str()) / R(r.re.get_den().get_str()),
           R(r.im.get_num().get_str()) / R(r.im.get_den().get_str()));
}
template <class C>
C pi_c() {
  using R = typename C::value_type;
  return C(boost::math::constants::pi<R>());
}
template <class C>
C i_c() {
  using R = typename C::value_type;
  return C(R(0), R(1));
}
template <class C>
double to_d(const typename C::value_type& x) {
  return static_cast<double>(x);
}
template <class C>
std::complex<double> to_cd(const C& x) {
  return {static_cast<double>(bmp::real(x)), static_cast<double>(bmp::imag(x))};
}

// ---- dense complex linear algebra ----

template <class C>
Mat<C> mat_zero(int r, int c) {
  return Mat<C>(r, Vec<C>(c, C(0)));
}
template <class C>
Mat<C> mat_id(int n) {
  auto m = mat_zero<C>(n, n);
  for (int i = 0; i < n; ++i) m[i][i] = C(1);
  return m;
}
template <class C>
Mat<C> mat_mul(const Mat<C>& a, const Mat<C>& b) {
  int r = int(a.size()), k = int(b.size()), c = k ? int(b[0].size()) : 0;
  auto m = mat_zero<C>(r, c);
  for (int i = 0; i < r; ++i)
    for (int l = 0; l < k; ++l) {
      if (a[i][l] == C(0)) continue;
      for (int j = 0; j < c; ++j) m[i][j] += a[i][l] * b[l][j];
    }
  return m;
}
template <class C>
Vec<C> mat_vec(const Mat<C>& a, const Vec<C>& v) {
  Vec<C> r(a.size(), C(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
  return r;
}
template <class C>
Mat<C> mat_t(const Mat<C>& a) {
  int r = int(a.size()), c = r ? int(a[0].size()) : 0;
  auto m = mat_zero<C>(c, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m[j][i] = a[i][j];
  return m;
}
template <class C>
typename C::value_type max_abs(const Mat<C>& a) {
  typename C::value_type m(0);
  for (auto& row : a)
    for (auto& x : row) m = std::max(m, typename C::value_type(bmp::abs(x)));
  return m;
}
template <class C>
typename C::value_type max_abs(const Vec<C>& a) {
  typename C::value_type m(0);
  for (auto& x : a) m = std::max(m, typename C::value_type(bmp::abs(x)));
  return m;
}
// max |a - b| / max |b|
template <class C>
double rel_diff(const Mat<C>& a, const Mat<C>& b) {
  auto d = a;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) d[i][j] -= b[i][j];
  auto den = max_abs(b);
  if (den == 0) return to_d<C>(max_abs(d));
  return to_d<C>(max_abs(d) / den);
}
template <class C>
double rel_diff(const Vec<C>& a, const Vec<C>& b) {
  return rel_diff(Mat<C>{a}, Mat<C>{b});
}
// Gauss-Jordan with partial pivoting
template <class C>
Mat<C> mat_inv(Mat<C> a) {
  int n = int(a.size());
  auto inv = mat_id<C>(n);
  auto scale = max_abs(a);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (bmp::abs(a[r][c]) > bmp::abs(a[piv][c])) piv = r;
    if (bmp::abs(a[piv][c]) <= scale * std::numeric_limits<typename C::value_type>::epsilon())
      throw NumericError("singular matrix in connection solve");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    C d = C(1) / a[c][c];
    for (int j = 0; j < n; ++j) a[c][j] *= d, inv[c][j] *= d;
    for (int r = 0; r < n; ++r) {
      if (r == c || a[r][c] == C(0)) continue;
      C f = a[r][c];
      for (int j = 0; j < n; ++j) a[r][j] -= f * a[c][j], inv[r][j] -= f * inv[c][j];
    }
  }
  return inv;
}
template <class C>
double condition(const Mat<C>& a) {
  return to_d<C>(max_abs(a) * max_abs(mat_inv(a))) * double(a.size());
}
template <class C>
Mat<std::complex<double>> to_double(const Mat<C>& a) {
  Mat<std::complex<double>> m(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (auto& x : a[i]) m[i].push_back(to_cd(x));
  return m;
}

// ---- hypergeometric factor ----

// J(y) = sum_d a_d y^d, a_d / a_{d-1} = prod_j (beta_j - d + 1) / prod_j (alpha_j + d)
template <class C>
struct HyperParams {
  Vec<C> alpha, beta;
  int n() const { return int(alpha.size()); }
};

template <class C>
typename C::value_type work_eps() {
  return std::numeric_limits<typename C::value_type>::epsilon();
}

// theta^m J (theta = y d/dy) for m = 0..order at y; requires |y| <= 1 - margin
template <class C>
Vec<C> eval_J_series(const HyperParams<C>& p, const C& y, int order, double margin = 0.2) {
  using R = typename C::value_type;
  R ay = bmp::abs(y);
  if (ay > R(1) - R(margin)) throw NumericError("series point too close to the unit circle");
  Vec<C> out(order + 1, C(0));
  C a(1), yd(1);
  R tol = work_eps<C>() / R(16);
  R scale(1);
  int small_run = 0;
  for (int d = 0; d < 200000; ++d) {
    C t = a * yd;
    C dm(1);
    R mag(0);
    for (int m = 0; m <= order; ++m) {
      C v = dm * t;
      out[m] += v;
      mag = std::max(mag, R(bmp::abs(v)));
      dm *= C(d);
    }
    for (int m = 0; m <= order; ++m) scale = std::max(scale, R(bmp::abs(out[m])));
    // tail bound for a geometric-like tail once the ratio has settled
    if (d > 4 && mag <= tol * scale * (R(1) - ay)) {
      if (++small_run >= 3) return out;
    } else {
      small_run = 0;
    }
    C num(1), den(1);
    for (int j = 0; j < p.n(); ++j) {
      num *= p.beta[j] - C(d);
      den *= p.alpha[j] + C(d + 1);
    }
    if (den == C(0)) throw NumericError("resonant hypergeometric parameters");
    a = a * num / den;
    yd *= y;
    if (a == C(0)) return out;  // terminating series
  }
  throw NumericError("series did not converge");
}

// Taylor coefficients c_0..c_{R-1} of J(u0 + s) for the ODE
//   theta P(theta) J = e^u (theta + 1) Q(theta) J,  P = prod(theta + alpha), Q = prod(beta - theta)
// given the jet theta^m J(u0), m = 0..n.
template <class C>
struct OdeCoeffs {
  Vec<C> lhs, rhs;  // polynomial coefficients, degree n + 1
  explicit OdeCoeffs(const HyperParams<C>& p) {
    Vec<C> P{C(1)}, Q{C(1)};
    for (int j = 0; j < p.n(); ++j) {
      Vec<C> np(P.size() + 1, C(0)), nq(Q.size() + 1, C(0));
      for (size_t i = 0; i < P.size(); ++i) {
        np[i] += P[i] * p.alpha[j];
        np[i + 1] += P[i];
        nq[i] += Q[i] * p.beta[j];
        nq[i + 1] -= Q[i];
      }
      P = np, Q = nq;
    }
    lhs.assign(P.size() + 1, C(0));
    rhs.assign(Q.size() + 1, C(0));
    for (size_t i = 0; i < P.size(); ++i) lhs[i + 1] += P[i];
    for (size_t i = 0; i < Q.size(); ++i) rhs[i + 1] += Q[i], rhs[i] += Q[i];
  }
  int order() const { return int(lhs.size()) - 1; }
};

template <class C>
class TaylorSeries {
 public:
  TaylorSeries(const OdeCoeffs<C>& ode, const C& u0, const Vec<C>& jet) : ode_(ode), E0_(bmp::exp(u0)) {
    N_ = ode.order();
    if (int(jet.size()) < N_) throw ContractError("jet too short for the ODE order");
    C f(1);
    for (int m = 0; m < N_; ++m) {
      if (m) f *= C(m);
      c_.push_back(jet[m] / f);
    }
  }
  // ensure coefficients up to index r exist
  const C& coeff(int r) {
    while (int(c_.size()) <= r) next();
    return c_[r];
  }
  int size() const { return int(c_.size()); }

 private:
  // D(m, r) = coefficient of s^r in theta^m J
  C D(int m, int r) const {
    C v = c_[r + m];
    for (int i = 1; i <= m; ++i) v *= C(r + i);
    return v;
  }
  void next() {
    int r = int(c_.size()) - N_;
    C known(0);
    for (int m = 0; m < N_; ++m) known += ode_.rhs[m] * D(m, r);
    C conv(0), fact(1);
    for (int t = 1; t <= r; ++t) {
      fact *= C(t);
      conv += G_[r - t] / fact;
    }
    C lhs_known(0);
    for (int m = 0; m < N_; ++m) lhs_known += ode_.lhs[m] * D(m, r);
    C top = (E0_ * (known + conv) - lhs_known) / (ode_.lhs[N_] - E0_ * ode_.rhs[N_]);
    C c = top;
    for (int i = 1; i <= N_; ++i) c /= C(r + i);
    c_.push_back(c);
    G_.push_back(known + ode_.rhs[N_] * top);
  }
  const OdeCoeffs<C>& ode_;
  C E0_;
  int N_;
  Vec<C> c_, G_;
};

// distance from u to the singular set i pi (n + 2Z)
template <class C>
typename C::value_type singular_distance(const C& u, int n) {
  using R = typename C::value_type;
  R pi = boost::math::constants::pi<R>();
  R im = bmp::imag(u), re = bmp::real(u);
  R m = bmp::round((im / pi - R(n)) / R(2));
  R best(1e300);
  for (int d = -1; d <= 1; ++d) {
    R h = pi * (R(n) + R(2) * (m + R(d)));
    best = std::min(best, R(bmp::sqrt(re * re + (im - h) * (im - h))));
  }
  return best;
}

struct StepControl {
  double hmax = 0.25;
  double rho_fraction = 1.0 / 3.0;
  double min_dist = 1e-8;
};

// jet theta^m J, m = 0..n, transported along the polygon through the vertices
template <class C>
Vec<C> continue_J(const HyperParams<C>& p, const Vec<C>& vertices, Vec<C> jet, const StepControl& sc = {}) {
  using R = typename C::value_type;
  OdeCoeffs<C> ode(p);
  int N = ode.order();
  jet.resize(N);
  R tol = work_eps<C>() / R(64);
  for (size_t v = 0; v + 1 < vertices.size(); ++v) {
    C a = vertices[v], b = vertices[v + 1];
    R len = bmp::abs(b - a);
    if (len == 0) continue;
    C dir = (b - a) / C(len);
    R done(0);
    while (done < len) {
      C u0 = a + dir * C(done);
      R rho = singular_distance(u0, p.n());
      if (rho < R(sc.min_dist)) throw NumericError("path passes through a singular point");
      R h = std::min(R(sc.hmax), rho * R(sc.rho_fraction));
      h = std::min(h, len - done);
      TaylorSeries<C> ts(ode, u0, jet);
      C hc = dir * C(h);
      R jscale = max_abs(jet);
      Vec<C> nj(N, C(0));
      // sum until the terms are negligible
      C hp(1);
      int quiet = 0;
      for (int r = 0;; ++r) {
        C cr = ts.coeff(r);
        // contribution of c_r to theta^m J(u0 + h) is c_r r!/(r-m)! h^{r-m}
        C ff(1), hpow = hp;
        R mag(0);
        for (int m = 0; m < N && m <= r; ++m) {
          // falling factorial r (r-1) ... (r-m+1), and h^{r-m}
          C term = cr * ff * hpow;
          nj[m] += term;
          mag = std::max(mag, R(bmp::abs(term)));
          ff *= C(r - m);
          if (m < r) hpow /= hc;
        }
        hp *= hc;
        if (r > N && mag <= tol * std::max(jscale, R(max_abs(nj)))) {
          if (++quiet >= 4) break;
        } else {
          quiet = 0;
        }
        if (r > 3000) throw NumericError("Taylor series did not converge; step too large");
      }
      jet = nj;
      done += h;
    }
  }
  return jet;
}

// theta^m J for m = 0..order at u, from a jet of length n+1
template <class C>
Vec<C> extend_jet(const HyperParams<C>& p, const C& u, const Vec<C>& jet, int order) {
  OdeCoeffs<C> ode(p);
  TaylorSeries<C> ts(ode, u, jet);
  Vec<C> out;
  C f(1);
  for (int m = 0; m <= order; ++m) {
    if (m) f *= C(m);
    out.push_back(ts.coeff(m) * f);
  }
  return out;
}

// ---- paths ----

// a vertex  log_eps * log(eps) + re_off + i (pi * pi_im + im_off)
struct PathPoint {
  int log_eps = 0;
  Rat pi_im = 0;
  Rat re_off = 0, im_off = 0;
};
struct PathSpec {
  Rat eps;
  std::vector<PathPoint> pts;
  template <class C>
  Vec<C> vertices(const Rat& extra_pi_im = 0) const {
    using R = typename C::value_type;
    R le = bmp::log(R(eps.get_num().get_str()) / R(eps.get_den().get_str()));
    C pi = pi_c<C>(), I = i_c<C>();
    Vec<C> v;
    for (auto& q : pts)
      v.push_back(C(le * R(q.log_eps)) + from_rat<C>(q.re_off) +
                  I * (pi * from_rat<C>(q.pi_im + extra_pi_im) + from_rat<C>(q.im_off)));
    return v;
  }
  std::string str() const;
};

struct Paths {
  PathSpec gamma, delta;
  // the moving coordinate of gamma'_c for c = 1..k; spectators sit at the ends
  std::vector<PathSpec> gamma_prime;
};
// all paths are in log y^+ coordinates
Paths build_paths(int k, int n, const Rat& eps);
// minimal distance (in the J-argument coordinate, shifted by i pi shift) to the singular set
double path_clearance(const PathSpec& p, int n, const Rat& shift_pi);

// ---- numeric parameters and runs ----

struct NumParams {
  int k = 1, n = 2;
  std::vector<Rat> lam, sig;
  // distinct values in (-1, 1) with no integral differences
  static NumParams seeded(int k, int n, unsigned seed);
  Params exact() const { return Params::make_specialized(k, n, lam, sig); }
  NumParams scaled(const Rat& t) const;
  std::string str() const;
};

enum class Route { Gamma, Delta };

// (z d/dl)^b f for one factor at the path end, b = 0..B, with f the k = 1 factor
// e^{l h/z} J(+-) of root h = lambda_j (plus) or sigma_j (minus)
template <class C>
struct FactorJets {
  std::vector<Vec<C>> plus, minus;  // [j][b]
};

template <class C>
struct RunInputs {
  NumParams np;
  CRat z;
  Rat eps{1, 10};
  Route route = Route::Gamma;
  int order = 0;  // derivative order B (at least n - 1)
  StepControl sc;
  const PathSpec* path = nullptr;  // overrides the route's path
};

template <class C>
HyperParams<C> factor_params(const NumParams& np, const C& z, int j, bool plus) {
  HyperParams<C> hp;
  C h = from_rat<C>(plus ? np.lam[j] : np.sig[j]);
  for (int m = 0; m < np.n; ++m) {
    C l = from_rat<C>(np.lam[m]), s = from_rat<C>(np.sig[m]);
    if (plus) {
      hp.alpha.push_back((h - l) / z);
      hp.beta.push_back((s - h) / z);
    } else {
      hp.alpha.push_back((s - h) / z);
      hp.beta.push_back((h - l) / z);
    }
  }
  return hp;
}

// combine e^{l h/z} with theta^r J into (z d/dl)^b, kappa = +1 (J argument e^{u}, u = l + c) or -1 (argument e^{-l})
template <class C>
Vec<C> combine(const C& h, const C& z, const C& l, const Vec<C>& theta, int kappa) {
  int B = int(theta.size()) - 1;
  C pre = bmp::exp(l * h / z);
  Vec<C> out;
  for (int b = 0; b <= B; ++b) {
    C s(0), binom(1);
    C kz = z * C(kappa);
    C kzr(1);
    for (int r = 0; r <= b; ++r) {
      if (r) {
        binom = binom * C(b - r + 1) / C(r);
        kzr *= kz;
      }
      s += binom * bmp::pow(h, b - r) * kzr * theta[r];
    }
    out.push_back(pre * s);
  }
  return out;
}

// plus factor, J argument e^{l + i pi shift}, at l directly (series)
template <class C>
Vec<C> plus_factor_direct(const NumParams& np, const C& z, int j, const C& l, const Rat& shift, int order) {
  auto hp = factor_params<C>(np, z, j, true);
  C u = l + i_c<C>() * pi_c<C>() * from_rat<C>(shift);
  auto jet = eval_J_series(hp, bmp::exp(u), np.n);
  return combine(from_rat<C>(np.lam[j]), z, l, extend_jet(hp, u, jet, std::max(order, np.n)), 1);
}

// plus factor continued along the path (vertices in l); J argument e^{l + i pi shift}
template <class C>
Vec<C> plus_factor_continued(const NumParams& np, const C& z, int j, const PathSpec& path, const Rat& shift, int order,
                             const StepControl& sc) {
  auto hp = factor_params<C>(np, z, j, true);
  auto vl = path.vertices<C>();
  auto vu = path.vertices<C>(shift);
  auto jet = eval_J_series(hp, bmp::exp(vu.front()), np.n);
  jet = continue_J(hp, vu, jet, sc);
  auto th = extend_jet(hp, vu.back(), jet, std::max(order, np.n));
  th.resize(std::max(order, np.n) + 1);
  return combine(from_rat<C>(np.lam[j]), z, vl.back(), th, 1);
}

// minus factor e^{l h/z} J(q^{-1} e^{-l}) with q^{-1} = qinv
template <class C>
Vec<C> minus_factor(const NumParams& np, const C& z, int j, const C& l, int qinv, int order) {
  auto hp = factor_params<C>(np, z, j, false);
  auto th = eval_J_series(hp, C(qinv) * bmp::exp(-l), std::max(order, np.n));
  return combine(from_rat<C>(np.sig[j]), z, l, th, -1);
}

// shift of the J argument on the plus side and q^{-1} on the minus side for a route
inline Rat route_shift(Route r, int k) { return r == Route::Gamma ? Rat(0) : Rat(k - 1); }
inline int route_qinv(Route r, int k) { return r == Route::Gamma || (k - 1) % 2 == 0 ? 1 : -1; }

template <class C>
FactorJets<C> diagonal_jets(const RunInputs<C>& in) {
  const NumParams& np = in.np;
  C z = from_crat<C>(in.z);
  Paths ps = build_paths(np.k, np.n, in.eps);
  const PathSpec& path = in.path ? *in.path : in.route == Route::Gamma ? ps.gamma : ps.delta;
  Rat shift = route_shift(in.route, np.k);
  int order = std::max(in.order, np.n - 1);
  FactorJets<C> fj;
  C lend = path.vertices<C>().back();
  for (int j = 0; j < np.n; ++j) {
    fj.plus.push_back(plus_factor_continued(np, z, j, path, shift, order, in.sc));
    fj.minus.push_back(minus_factor(np, z, j, lend, route_qinv(in.route, np.k), order));
  }
  return fj;
}

inline std::vector<int> mixed_tuple(int idx, int k, int n) {
  std::vector<int> t(k);
  for (int i = k - 1; i >= 0; --i) t[i] = idx % n, idx /= n;
  return t;
}
inline int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// A[F][mu] = z prod_i jets[i][F_i][mu_i], F and mu in [n]^k with the mixed-radix order
template <class C>
Mat<C> assemble(const std::vector<const std::vector<Vec<C>>*>& per_factor, int n, const C& z) {
  int k = int(per_factor.size()), D = ipow(n, k);
  auto A = mat_zero<C>(D, D);
  for (int F = 0; F < D; ++F) {
    auto f = mixed_tuple(F, k, n);
    for (int mu = 0; mu < D; ++mu) {
      auto b = mixed_tuple(mu, k, n);
      C v = z;
      for (int i = 0; i < k; ++i) v *= (*per_factor[i])[f[i]][b[i]];
      A[F][mu] = v;
    }
  }
  return A;
}

template <class C>
struct ToricConnection {
  Mat<C> A, B, U;
  double cond_A = 0;
};

template <class C>
ToricConnection<C> solve_connection(Mat<C> A, Mat<C> B) {
  ToricConnection<C> t;
  t.cond_A = condition(A);
  t.U = mat_mul(B, mat_inv(A));
  t.A = std::move(A);
  t.B = std::move(B);
  return t;
}

template <class C>
ToricConnection<C> toric_connection(const NumParams& np, const FactorJets<C>& fj, const C& z) {
  std::vector<const std::vector<Vec<C>>*> pa(np.k, &fj.plus), pb(np.k, &fj.minus);
  return solve_connection(assemble(pa, np.n, z), assemble(pb, np.n, z));
}

// U_T = U_k ... U_1, each wall computed from its own chamber matrices along gamma'_c
template <class C>
Mat<C> toric_connection_walls(const NumParams& np, const CRat& zr, const Rat& eps, const StepControl& sc,
                              std::vector<Mat<C>>* walls = nullptr) {
  C z = from_crat<C>(zr);
  int k = np.k, n = np.n;
  Paths ps = build_paths(k, n, eps);
  auto pts = ps.gamma.vertices<C>();
  C lstart = pts.front(), lend = pts.back();
  std::vector<Vec<C>> minus_end, plus_start;
  for (int j = 0; j < n; ++j) {
    minus_end.push_back(minus_factor(np, z, j, lend, 1, n - 1));
    plus_start.push_back(plus_factor_direct(np, z, j, lstart, Rat(0), n - 1));
  }
  Mat<C> U = mat_id<C>(ipow(n, k));
  for (int c = 1; c <= k; ++c) {
    std::vector<Vec<C>> moving;
    for (int j = 0; j < n; ++j) moving.push_back(plus_factor_continued(np, z, j, ps.gamma_prime[c - 1], Rat(0), n - 1, sc));
    std::vector<const std::vector<Vec<C>>*> pa, pb;
    for (int i = 0; i < k; ++i) {
      // 0-based factor i: crossed if i < c - 1, moving if i == c - 1
      pa.push_back(i < c - 1 ? &minus_end : i == c - 1 ? &moving : &plus_start);
      pb.push_back(i <= c - 1 ? &minus_end : &plus_start);
    }
    auto Uc = solve_connection(assemble(pa, n, z), assemble(pb, n, z)).U;
    if (walls) walls->push_back(Uc);
    U = mat_mul(Uc, U);
  }
  return U;
}

// permutation action on localization coordinates: (P_w v)[F] = v[F o w]
template <class C>
Mat<C> weyl_matrix(const Perm& w, int k, int n) {
  int D = ipow(n, k);
  auto P = mat_zero<C>(D, D);
  for (int F = 0; F < D; ++F) {
    auto t = mixed_tuple(F, k, n), u = t;
    for (int i = 0; i < k; ++i) u[i] = t[w[i]];
    int G = 0;
    for (int i = 0; i < k; ++i) G = G * n + u[i];
    P[F][G] = C(1);
  }
  return P;
}

template <class C>
double weyl_residual(const Mat<C>& U, int k, int n) {
  double worst = 0;
  for (int i = 0; i + 1 < k; ++i) {
    Perm w(k);
    for (int a = 0; a < k; ++a) w[a] = a;
    std::swap(w[i], w[i + 1]);
    auto P = weyl_matrix<C>(w, k, n);
    worst = std::max(worst, rel_diff(mat_mul(mat_mul(P, U), mat_t(P)), U));
  }
  return worst;
}

// numeric values of exact data
template <class C>
C eval_ratfn(const RatFn& f, const Params& p, const C& z) {
  std::vector<C> vals(p.nvars(), C(0));
  for (int j = 0; j < p.n; ++j) {
    vals[p.v_lam(j)] = from_rat<C>(p.lam[j]);
    vals[p.v_sig(j)] = from_rat<C>(p.sig[j]);
  }
  vals[p.v_z()] = z;
  return f.template eval_with<C>(vals, [](const Rat& r) { return from_rat<C>(r); });
}
template <class C>
Mat<C> eval_mat(const std::vector<std::vector<RatFn>>& m, const Params& p, const C& z = C(0)) {
  Mat<C> out;
  for (auto& row : m) {
    Vec<C> r;
    for (auto& x : row) r.push_back(eval_ratfn(x, p, z));
    out.push_back(r);
  }
  return out;
}

// nonabelian U in localization coordinates (k-subsets):
//   U_G[J', J] = sum_w sgn(w) U_T[F(J'), F(J) o w] Delta^+(F(J)) / Delta^-(F(J'))
template <class C>
struct NonabelianConnection {
  Mat<C> loc;    // k-subset coordinates
  Mat<C> basis;  // basis {sum +-H_i, P_j}
  double antiinv_residual = 0;
};

template <class C>
C delta_at(const std::vector<Rat>& roots, const std::vector<int>& J) {
  C d(1);
  for (size_t a = 0; a < J.size(); ++a)
    for (size_t b = a + 1; b < J.size(); ++b) d *= from_rat<C>(roots[J[a]] - roots[J[b]]);
  return d;
}

template <class C>
NonabelianConnection<C> assemble_U(const Mat<C>& UT, const NumParams& np) {
  Params p = np.exact();
  NonabelianChowModule mp(p, 1), mm(p, -1);
  int k = np.k, n = np.n, r = mp.rank();
  auto perms = all_perms(k);
  NonabelianConnection<C> out;
  out.loc = mat_zero<C>(r, r);
  auto idx = [&](const std::vector<int>& t) {
    int G = 0;
    for (int i = 0; i < k; ++i) G = G * n + t[i];
    return G;
  };
  for (int Jp = 0; Jp < r; ++Jp)
    for (int J = 0; J < r; ++J) {
      auto sJ = mp.subsets()[J], sJp = mm.subsets()[Jp];
      C s(0);
      for (auto& w : perms) {
        std::vector<int> u(k);
        for (int i = 0; i < k; ++i) u[i] = sJ[w[i]];
        s += C(perm_sign(w)) * UT[idx(sJp)][idx(u)];
      }
      out.loc[Jp][J] = s * delta_at<C>(np.lam, sJ) / delta_at<C>(np.sig, sJp);
    }
  // anti-invariant vectors must map to anti-invariant vectors
  double worst = 0;
  auto scale = max_abs(UT);
  for (int J = 0; J < r; ++J) {
    Vec<C> v(UT.size(), C(0));
    for (auto& w : perms) {
      std::vector<int> u(k);
      for (int i = 0; i < k; ++i) u[i] = mp.subsets()[J][w[i]];
      v[idx(u)] = C(perm_sign(w));
    }
    auto img = mat_vec(UT, v);
    for (int F = 0; F < int(UT.size()); ++F) {
      auto t = mixed_tuple(F, k, n);
      for (int i = 0; i + 1 < k; ++i) {
        auto u = t;
        std::swap(u[i], u[i + 1]);
        worst = std::max(worst, to_d<C>(bmp::abs(img[F] + img[idx(u)]) / scale));
      }
    }
  }
  out.antiinv_residual = worst;
  auto Mp = eval_mat<C>(mp.loc_matrix(), p), Mm = eval_mat<C>(mm.loc_matrix(), p);
  out.basis = mat_mul(mat_mul(mat_inv(Mm), out.loc), Mp);
  return out;
}

// Grams: abelian diag(1/e_F) for c = 0 and c = k; nonabelian in the module basis
template <class C>
Mat<C> abelian_gram(const NumParams& np, int side) {
  Params p = np.exact();
  auto R = AbelianChowRing::make(p, side > 0 ? 0 : p.k);
  auto G = mat_zero<C>(R->dim(), R->dim());
  for (int F = 0; F < R->dim(); ++F) G[F][F] = eval_ratfn(R->inv_euler(F), p, C(0));
  return G;
}
template <class C>
Mat<C> nonabelian_gram(const NumParams& np, int side) {
  Params p = np.exact();
  NonabelianChowModule m(p, side);
  return eval_mat<C>(gram_nonabelian(m, false), p);
}

// U(-z)^T G^- U(z) = G^+
template <class C>
double symplectic_residual(const Mat<C>& Uz, const Mat<C>& Umz, const Mat<C>& Gm, const Mat<C>& Gp) {
  return rel_diff(mat_mul(mat_mul(mat_t(Umz), Gm), Uz), Gp);
}

// U'_{ab} = t^{deg_b - deg_a} U_{ab}
template <class C>
double degree_residual(const Mat<C>& U, const Mat<C>& Uscaled, const std::vector<int>& deg_out,
                       const std::vector<int>& deg_in, const Rat& t) {
  auto pred = U;
  C tc = from_rat<C>(t);
  for (size_t a = 0; a < U.size(); ++a)
    for (size_t b = 0; b < U[a].size(); ++b) pred[a][b] = U[a][b] * bmp::pow(tc, deg_in[b] - deg_out[a]);
  return rel_diff(Uscaled, pred);
}

// abelian U in the monomial basis prod H_i^{b_i}, b_i < n
template <class C>
Mat<C> abelian_monomial_basis(const Mat<C>& UT, const NumParams& np) {
  int k = np.k, n = np.n, D = ipow(n, k);
  auto V = [&](const std::vector<Rat>& roots) {
    auto M = mat_zero<C>(D, D);
    for (int F = 0; F < D; ++F) {
      auto f = mixed_tuple(F, k, n);
      for (int b = 0; b < D; ++b) {
        auto e = mixed_tuple(b, k, n);
        C v(1);
        for (int i = 0; i < k; ++i) v *= bmp::pow(from_rat<C>(roots[f[i]]), e[i]);
        M[F][b] = v;
      }
    }
    return M;
  };
  return mat_mul(mat_mul(mat_inv(V(np.sig)), UT), V(np.lam));
}
inline std::vector<int> abelian_monomial_degrees(int k, int n) {
  std::vector<int> d;
  for (int b = 0; b < ipow(n, k); ++b) {
    int s = 0;
    for (int x : mixed_tuple(b, k, n)) s += x;
    d.push_back(s);
  }
  return d;
}

// ---- nonabelian series values at the path end ----

// coefficient selector: x-exponent a (per orbit) and log-derivative order m
struct CoeffSel {
  std::vector<int> a;
  int m = 0;
};

// the operator prod_{i<j}(u_i - u_j) prod_j P_j(u)^{a_j} (sum u_i)^m as a polynomial in u_1..u_k,
// with u_i = z d/dl_i; the power z^{-(|a| + m)} is applied separately
Poly coefficient_operator(const MonomialCatalog& cat, const CoeffSel& s);

// values of d^a_x d^m_L IG^{side} at the k-subsets, from factor jets (plus continued, minus direct)
template <class C>
Vec<C> ig_values(const NumParams& np, const FactorJets<C>& fj, const C& z, int side, const CoeffSel& s) {
  auto cat = MonomialCatalog::build(np.k, np.n);
  Poly op = coefficient_operator(cat, s);
  Params p = np.exact();
  NonabelianChowModule m(p, side);
  const auto& jets = side > 0 ? fj.plus : fj.minus;
  const auto& roots = side > 0 ? np.lam : np.sig;
  int deg = s.m;
  for (int x : s.a) deg += x;
  C zp = bmp::pow(z, -deg);
  Vec<C> out;
  for (auto& J : m.subsets()) {
    C v(0);
    for (auto& t : op.terms()) {
      C prod = from_rat<C>(t.c) * z;
      for (int i = 0; i < np.k; ++i) {
        int e = mono_exp(t.m, i);
        if (e >= int(jets[J[i]].size())) throw ContractError("factor jets too short for the coefficient operator");
        prod *= jets[J[i]][e];
      }
      v += prod;
    }
    out.push_back(v * zp / delta_at<C>(roots, J));
  }
  return out;
}

int operator_order(const MonomialCatalog& cat, const std::vector<CoeffSel>& sels);
std::vector<CoeffSel> retained_coefficients(int N, int X, int L);

// ---- the full continuation run ----

struct ContinuationConfig {
  NumParams np;
  std::vector<CRat> z_samples{{1, 0}, {1, 2}};
  Rat eps{1, 10};
  Rat eps_alt{1, 20};
  Rat degree_t{2};
  int bits = 128;
  int max_bits = 512;
  double tol_rel = 1e-8;
  int X = 2, L = 3;
  StepControl sc;
  bool escalate = true;
};

struct ResidualEntry {
  std::vector<int> a;
  int m = 0;
  double rel = 0;
};

struct ZReport {
  CRat z;
  Mat<std::complex<double>> U_T, U;  // U in the module basis
  double cond_A = 0;
  double gamma_residual = 0;          // worst over retained coefficients
  double delta_sameU_residual = 0;
  double delta_twisted_residual = 0;
  std::vector<ResidualEntry> gamma_table, delta_table;
  double weyl = 0, antiinv = 0;
  double symplectic_T = 0, symplectic_G = 0;
  double degree_T = 0, degree_G = 0;
  double walls_vs_diagonal = 0;
  double eps_independence = 0;
  double basepoint_independence = 0;
  double seconds = 0;
};

struct ContinuationReport {
  ContinuationConfig cfg;
  int bits_used = 0;
  std::vector<ZReport> per_z;
  double worst(const std::function<double(const ZReport&)>& f) const;
  std::string param_stamp() const;
};

ContinuationReport run_continuation(const ContinuationConfig& cfg);

// Dispatch helper for precision levels.
template <template <class> class F, class... Args>
auto with_precision(int bits, Args&&... args) {
  if (bits <= 128) return F<C128>::run(std::forward<Args>(args)...);
  if (bits <= 256) return F<C256>::run(std::forward<Args>(args)...);
  if (bits <= 512) return F<C512>::run(std::forward<Args>(args)...);
  throw ContractError("precision above 512 bits is not supported");
}

}  // namespace flop::hc
