#pragma once
// Genus-zero cones over truncated nilpotent algebras: correlators, J-function,
// DI matrix, reconstruction of cone points, axiom checks.
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "flop/poly.hpp"
#include "flop/rat.hpp"

namespace flop::cone {

// Generators are nilpotent; everything of total degree > order is zero.
struct AlgSpec {
  std::vector<std::string> gens;
  int order = 0;
};
using AlgPtr = std::shared_ptr<const AlgSpec>;
AlgPtr make_alg(std::vector<std::string> gens, int order);

// Element of a truncated algebra. A default-constructed TA is the zero with
// no algebra attached; it combines with anything.
class TA {
 public:
  TA() = default;
  TA(AlgPtr a, const Poly& p);
  static TA constant(AlgPtr a, const Rat& c);
  static TA gen(AlgPtr a, int i);

  const AlgPtr& alg() const { return a_; }
  const Poly& poly() const { return p_; }
  bool is_zero() const { return p_.is_zero(); }
  Rat constant_term() const { return p_.constant_term(); }
  bool nilpotent() const { return constant_term() == 0; }
  // lowest total degree present; order+1 for zero
  int valuation() const;

  TA derivative(int g) const;
  // simultaneous substitution of generators; unset entries stay
  TA compose(const std::vector<std::optional<TA>>& vals) const;
  TA inverse() const;  // needs a nonzero constant term

  TA operator-() const;
  TA& operator+=(const TA& o);
  TA& operator-=(const TA& o);
  friend TA operator+(TA a, const TA& b) { return a += b; }
  friend TA operator-(TA a, const TA& b) { return a -= b; }
  friend TA operator*(const TA& a, const TA& b);
  friend TA operator*(TA a, const Rat& c);
  friend bool operator==(const TA& a, const TA& b) { return (a - b).is_zero(); }
  friend bool operator!=(const TA& a, const TA& b) { return !(a == b); }
  TA pow(int e) const;
  std::string str() const;

 private:
  AlgPtr a_;
  Poly p_;
};

// Vector in the Givental space: sum over j of c[j] z^j, components in basis
// phi_1..phi_N (phi_1 = 1).
struct GVec {
  int N = 1;
  std::map<int, std::vector<TA>> c;

  explicit GVec(int n = 1) : N(n) {}
  TA at(int zp, int alpha) const;
  void add(int zp, int alpha, const TA& v);
  void prune();
  bool is_zero() const;
  int min_pow() const;
  int max_pow() const;
  GVec shifted(int s) const;        // times z^s
  GVec part_ge(int p) const;        // powers >= p
  GVec compose(const std::vector<std::optional<TA>>& vals) const;
  GVec derivative(int g) const;
  GVec operator-() const;
  friend GVec operator+(const GVec& a, const GVec& b);
  friend GVec operator-(const GVec& a, const GVec& b);
  friend GVec operator*(const GVec& a, const TA& s);
  friend bool operator==(const GVec& a, const GVec& b) { return (a - b).is_zero(); }
  std::string str() const;
};

// N x N matrix of z-series; entry (alpha, beta) of coefficient z^j is c[j][alpha][beta].
struct GMat {
  int N = 1;
  std::map<int, std::vector<std::vector<TA>>> c;

  explicit GMat(int n = 1) : N(n) {}
  static GMat identity(AlgPtr a, int n);
  TA at(int zp, int r, int s) const;
  void add(int zp, int r, int s, const TA& v);
  void prune();
  bool is_zero() const;
  GMat compose(const std::vector<std::optional<TA>>& vals) const;
  // constant terms of all coefficients equal the identity at z^0
  bool identity_mod_nilpotents() const;
  GMat inverse() const;  // requires identity_mod_nilpotents
  friend GMat operator+(const GMat& a, const GMat& b);
  friend GMat operator-(const GMat& a, const GMat& b);
  friend GMat operator*(const GMat& a, const GMat& b);
  friend GVec operator*(const GMat& a, const GVec& v);
  friend bool operator==(const GMat& a, const GMat& b) { return (a - b).is_zero(); }
  std::string str() const;
};

// psi^k phi_alpha
struct Insertion {
  int alpha = 0;
  int psi = 0;
  auto operator<=>(const Insertion&) const = default;
};

using RatMat = std::vector<std::vector<Rat>>;

class Genus0Theory {
 public:
  Genus0Theory(int N, RatMat gram);
  virtual ~Genus0Theory() = default;
  int rank() const { return N_; }
  const RatMat& gram() const { return g_; }
  const RatMat& gram_inv() const { return ginv_; }
  // degree-zero (no Novikov) correlator of the insertions, memoized
  Rat correlator(std::vector<Insertion> ins) const;
  virtual bool verified() const { return true; }
  virtual std::string name() const = 0;

 protected:
  virtual Rat raw(const std::vector<Insertion>& sorted) const = 0;

 private:
  int N_;
  RatMat g_, ginv_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<Insertion>, Rat> memo_;
};

// psi-class integrals on M_{0,m}bar
Rat point_psi_oracle(const std::vector<int>& k);
Rat point_psi_string_reduction(const std::vector<int>& k);

class PointTheory : public Genus0Theory {
 public:
  PointTheory() : Genus0Theory(1, RatMat{{Rat(1)}}) {}
  std::string name() const override { return "point"; }

 protected:
  Rat raw(const std::vector<Insertion>& s) const override;
};

// Correlators given by a finite table (sorted insertion lists); unlisted
// entries are zero. Not checked against anything.
class TableTheory : public Genus0Theory {
 public:
  TableTheory(int N, RatMat gram, std::map<std::vector<Insertion>, Rat> table);
  bool verified() const override { return false; }
  std::string name() const override { return "table (unverified)"; }

 protected:
  Rat raw(const std::vector<Insertion>& s) const override;

 private:
  std::map<std::vector<Insertion>, Rat> t_;
};

// A base theory with some correlators replaced.
class TamperedTheory : public Genus0Theory {
 public:
  TamperedTheory(const Genus0Theory& base, std::map<std::vector<Insertion>, Rat> overrides);
  bool verified() const override { return false; }
  std::string name() const override { return base_.name() + " (tampered)"; }

 protected:
  Rat raw(const std::vector<Insertion>& s) const override;

 private:
  const Genus0Theory& base_;
  std::map<std::vector<Insertion>, Rat> over_;
};

// descendant coordinates t^alpha_k
using TPoint = std::map<Insertion, TA>;

// <<ins>>(t), summed to the truncation order
TA correlator_at_t(const Genus0Theory& th, const std::vector<Insertion>& ins, const TPoint& t,
                   const AlgPtr& alg);

// A family of cone points parametrized by the generators tau (one per basis
// element). Differentiating a truncated series loses its top degree, so DI
// is carried along when it is known exactly.
struct Family {
  AlgPtr alg;
  std::vector<int> tau;
  GVec I;
  std::optional<GMat> DI;
};

// J(tau) = -z + tau + sum <<phi_b psi^l>>(tau) phi^b (-z)^{-l-1}
GVec j_function(const Genus0Theory& th, const AlgPtr& alg, const std::vector<int>& tau);
// fresh algebra with generators tau1..tauN
Family j_family(const Genus0Theory& th, int order);
Family j_family(const Genus0Theory& th, const AlgPtr& alg, const std::vector<int>& tau);

GMat di_matrix(const Family& f);  // ContractError unless big
// I(phi(tau)) with DI from the chain rule; phi must be exact at this order
Family reparametrize(const Family& f, const std::vector<TA>& phi);
std::vector<TA> mirror_map(const Family& f);  // z^0 coefficient
// V with DI = DJ(tau_I) V
GMat v_factor(const Family& J, const Family& I);
// the tau-substitution tau -> vals
std::vector<std::optional<TA>> tau_subst(const Family& f, const std::vector<TA>& vals);

// -z + t(z) + sum <<phi_b psi^l>>(t) phi^b (-z)^{-l-1}; the cone as a graph
GVec graph_point(const Genus0Theory& th, const AlgPtr& alg, const TPoint& t);
// descendant coordinates of K: t_k = [K]_{z^k} + delta_{k1} 1
TPoint t_coords(const GVec& K);

struct ReconstructionResult {
  std::vector<TA> t;    // relative to I
  std::vector<TA> tJ;   // relative to J
  GVec w;
  GVec residual;        // K - z DI(t) w
  int iterations = 0;
  bool converged = false;
  bool on_cone = false;
};

ReconstructionResult reconstruct(const GVec& K, const Family& J);
ReconstructionResult reconstruct(const GVec& K, const Family& I, const Family& J);

struct AxiomReport {
  int order = 0;
  int kmax = 0;
  bool de = false, se = false, trr = false;
  int trr_instances = 0;
  std::vector<std::string> failures;
  bool ok() const { return de && se && trr; }
};
// DE and SE at a generic descendant point, TRR over small insertion ranges
AxiomReport axioms_check(const Genus0Theory& th, int order, int kmax = -1);

}  // namespace flop::cone
