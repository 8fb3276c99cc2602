#pragma once
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "flop/ratfn.hpp"
#include "flop/zlaurent.hpp"

namespace flop {

// Variable layout: lambda_1..n, sigma_1..n, H_1..k, z. In specialized mode
// lambda and sigma are fixed rationals and only H, z stay symbolic.
struct Params {
  int k = 1, n = 2;
  bool symbolic = true;
  std::vector<Rat> lam, sig;

  static Params make_symbolic(int k, int n);
  static Params make_specialized(int k, int n, std::vector<Rat> lam, std::vector<Rat> sig);
  // deterministic generic rationals from a seed
  static Params make_seeded(int k, int n, unsigned seed);

  int nvars() const { return 2 * n + k + 1; }
  int v_lam(int j) const { return j; }
  int v_sig(int j) const { return n + j; }
  int v_H(int i) const { return 2 * n + i; }
  int v_z() const { return 2 * n + k; }
  Poly lam_p(int j) const { return symbolic ? Poly::var(v_lam(j)) : Poly(lam[j]); }
  Poly sig_p(int j) const { return symbolic ? Poly::var(v_sig(j)) : Poly(sig[j]); }
  Poly H(int i) const { return Poly::var(v_H(i)); }
  Poly z() const { return Poly::var(v_z()); }
  std::vector<std::string> names() const;
  void validate() const;
};

struct ChamberSpec {
  int k, n, c;
  // -1 for i < c (0-based), +1 otherwise
  int sign(int i) const { return i < c ? -1 : 1; }
};

// Positive roots e_i - e_j (stored as (i, j)); negating a root swaps the pair.
struct RootData {
  int k = 1;
  std::vector<std::pair<int, int>> roots;
  static RootData standard(int k);
  RootData with_negated(int r) const;
  int size() const { return int(roots.size()); }
  // zeta = sum of the positive roots, in the e_i basis
  std::vector<int> zeta() const;
  // coordinates of zeta in the chamber basis pr_i = side * e_i
  std::vector<int> a(int side) const;
  // coordinates of one root in the chamber basis
  std::vector<int> root_coords(int r, int side) const;
  bool sign_identity_holds() const;
  Poly delta_poly(const Params& p) const;
};

// Weyl group elements of S_k as permutations w[i] = w(i), 0-based.
using Perm = std::vector<int>;
std::vector<Perm> all_perms(int k);
int perm_sign(const Perm& w);

class AbelianChowRing;

// Basis form: coefficients over monomials H^b, 0 <= b_i <= n-1, index
// sum_i b_i n^{k-1-i}.
class ChowClass {
 public:
  ChowClass() = default;
  ChowClass(std::shared_ptr<const AbelianChowRing> r, std::vector<RatFn> c);
  const std::vector<RatFn>& coef() const { return c_; }
  const AbelianChowRing& ring() const { return *r_; }
  std::shared_ptr<const AbelianChowRing> ring_ptr() const { return r_; }
  bool is_zero() const;

  ChowClass& operator+=(const ChowClass& o);
  ChowClass operator-() const;
  friend ChowClass operator+(ChowClass a, const ChowClass& b) { return a += b; }
  friend ChowClass operator-(ChowClass a, const ChowClass& b) { return a += -b; }
  friend ChowClass operator*(const ChowClass& a, const ChowClass& b);
  friend ChowClass operator*(ChowClass a, const RatFn& s);
  friend ChowClass operator*(ChowClass a, const Rat& s) { return a * RatFn(s); }
  friend bool operator==(const ChowClass& a, const ChowClass& b) { return (a - b).is_zero(); }

 private:
  std::shared_ptr<const AbelianChowRing> r_;
  std::vector<RatFn> c_;
};

class AbelianChowRing : public std::enable_shared_from_this<AbelianChowRing> {
 public:
  static std::shared_ptr<AbelianChowRing> make(const Params& p, int c);

  const Params& params() const { return p_; }
  ChamberSpec chamber() const { return {p_.k, p_.n, c_}; }
  int k() const { return p_.k; }
  int n() const { return p_.n; }
  int c() const { return c_; }
  int dim() const { return dim_; }
  std::vector<int> tuple(int idx) const;
  int index(const std::vector<int>& b) const;

  // H_i at a fixed point with index j: lambda_j for i >= c, sigma_j for i < c
  Poly root(int i, int j) const { return i < c_ ? p_.sig_p(j) : p_.lam_p(j); }
  // relation for H_i, as a polynomial in the H_i variable
  Poly relation(int i) const;
  std::vector<Poly> euler_factors(int F) const;
  RatFn euler(int F) const;
  RatFn inv_euler(int F) const { return RatFn::inv_product(euler_factors(F)); }
  bool distinct(int F) const;

  ChowClass zero() const;
  ChowClass one() const;
  ChowClass H(int i) const;
  ChowClass basis_element(int idx) const;
  ChowClass from_coef(std::vector<RatFn> c) const;
  // p is a polynomial in all variables; the H part is reduced
  ChowClass normal_form(const Poly& p) const;
  std::vector<RatFn> restrict_all(const ChowClass& a) const;
  RatFn restrict(const ChowClass& a, int F) const;
  ChowClass from_restrictions(const std::vector<RatFn>& vals) const;
  ChowClass delta() const;

  // basis-level multiplication table entry: H^a * H^b in normal form
  const std::vector<RatFn>& mul_table(int a, int b) const;

 private:
  AbelianChowRing(const Params& p, int c);
  // univariate reduction of H_i^m, m < red_[i].size()
  const std::vector<Poly>& reduce_power(int i, int m) const;
  Params p_;
  int c_, dim_;
  std::vector<std::vector<std::vector<Poly>>> red_;
  std::vector<std::vector<RatFn>> vinv_;  // per variable: inverse Vandermonde [b][j]
  mutable std::vector<std::vector<RatFn>> table_;
  mutable std::vector<bool> table_set_;
};

ChowClass weyl_act(const Perm& w, const ChowClass& a);
enum class ProjMode { invariant, antiinvariant };
ChowClass project(const ChowClass& a, ProjMode m);
bool is_antiinvariant(const ChowClass& a);
bool is_invariant(const ChowClass& a);
// exact Vandermonde division of an anti-invariant class
ChowClass divide_by_delta(const ChowClass& a);
RatFn pairing_abelian(const ChowClass& a, const ChowClass& b);

// mu = u^b with 0 <= b_i <= n-k, sum b != 1; lexicographic order
struct MonomialCatalog {
  int k, n;
  std::vector<std::vector<int>> mu;
  std::vector<int> orbit;                   // J: mu index -> orbit index
  std::vector<std::vector<int>> orbit_rep;  // lexicographically least member
  int M() const { return int(mu.size()); }
  int N() const { return int(orbit_rep.size()); }
  static MonomialCatalog build(int k, int n);
  // mu_i evaluated at the given values of H_1..H_k
  Poly eval_mu(int i, const std::vector<Poly>& h) const;
  Poly eval_P(int j, const std::vector<Poly>& h) const;
};

// Nonabelian side: + is c = 0 (roots lambda), - is c = k (roots sigma).
// Classes are W-symmetric abelian classes; two are equal when they agree
// at every k-subset.
class NonabelianChowModule {
 public:
  NonabelianChowModule(const Params& p, int side);
  int side() const { return side_; }
  const Params& params() const { return ab_->params(); }
  std::shared_ptr<const AbelianChowRing> abelian() const { return ab_; }
  const MonomialCatalog& catalog() const { return cat_; }
  int rank() const { return int(subsets_.size()); }
  const std::vector<std::vector<int>>& subsets() const { return subsets_; }
  // increasing ordering of J as an abelian fixed point index
  int ordered_point(int J) const;
  // basis: 0 -> sum(+-H_i), 1..N -> P_j
  const std::vector<ChowClass>& basis() const { return basis_; }
  std::vector<int> degrees() const;
  std::vector<Poly> euler_factors(int J) const;
  RatFn euler(int J) const { return RatFn(1) / RatFn::inv_product(euler_factors(J)); }
  RatFn inv_euler(int J) const { return RatFn::inv_product(euler_factors(J)); }
  std::vector<RatFn> restrict_all(const ChowClass& sym) const;
  // restriction matrix M[J][beta] of the basis
  std::vector<std::vector<RatFn>> loc_matrix() const;
  // coordinates in the basis of a vector of Grassmannian restrictions
  std::vector<RatFn> coords_from_restrictions(const std::vector<RatFn>& v) const;
  ChowClass from_coords(const std::vector<RatFn>& c) const;

 private:
  std::shared_ptr<const AbelianChowRing> ab_;
  int side_;
  MonomialCatalog cat_;
  std::vector<std::vector<int>> subsets_;
  std::vector<ChowClass> basis_;
  mutable std::vector<std::vector<RatFn>> minv_;
};

ChowClass p_a(const ChowClass& anti);         // anti-invariant -> symmetric
ChowClass p_a_inverse(const ChowClass& sym);  // multiply by Delta
// route (i): Grassmannian localization
RatFn pairing_nonabelian(const NonabelianChowModule& m, const ChowClass& a, const ChowClass& b);
// route (ii): (-1)^{|Phi+|}/|W| * (Delta a, Delta b)_T
RatFn pairing_nonabelian_via_abelian(const NonabelianChowModule& m, const ChowClass& a,
                                     const ChowClass& b);
std::vector<std::vector<RatFn>> gram_nonabelian(const NonabelianChowModule& m, bool via_abelian);
std::vector<std::vector<RatFn>> gram_abelian(const AbelianChowRing& r);

// Gram matrix plus the residue rule Omega(f, g) = Res_{z=0} (f(-z), g(z)).
struct SymplecticGram {
  std::vector<std::vector<RatFn>> G;
  using Vec = std::vector<ZLaurent<RatFn>>;
  RatFn omega(const Vec& f, const Vec& g) const;
};
SymplecticGram symplectic_gram(const std::vector<std::vector<RatFn>>& G);

// small dense linear algebra over RatFn
RatFn determinant(std::vector<std::vector<RatFn>> a);
std::vector<std::vector<RatFn>> inverse(std::vector<std::vector<RatFn>> a);
int rank(std::vector<std::vector<RatFn>> a);

}  // namespace flop
