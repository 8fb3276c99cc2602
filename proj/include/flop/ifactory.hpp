#pragma once
#include <memory>
#include <vector>

#include "flop/chow_rings.hpp"
#include "flop/multiseries.hpp"

namespace flop {

// Values at a list of fixed points; pointwise ring operations. Empty = 0.
struct LocVec {
  std::vector<RatFn> v;
  bool is_zero() const;
  LocVec& operator+=(const LocVec& o);
  friend LocVec operator+(LocVec a, const LocVec& b) { return a += b; }
  friend LocVec operator*(const LocVec& a, const LocVec& b);
  friend LocVec operator*(LocVec a, const Rat& c);
  friend LocVec operator*(LocVec a, const RatFn& c);
  friend bool operator==(const LocVec& a, const LocVec& b);
};

struct Trunc {
  int Dq = 2, L = 1, X = 0;
};

// Abelian series in localization form, over the fixed points of a chamber.
struct ISeries {
  std::shared_ptr<const AbelianChowRing> ring;
  MultiSeries<LocVec> s;
  MultiSeries<ChowClass> to_basis() const;
};

// Nonabelian series: values at the k-subsets of the side's module.
struct GSeries {
  std::shared_ptr<const NonabelianChowModule> module;
  MultiSeries<LocVec> s;
  // coefficient vectors in the basis {sum(+-H), P_j}
  MultiSeries<LocVec> coords() const;
};

RatFn zpow(const Params& p, int e);
std::vector<std::vector<int>> effective_degrees(int k, int c, int Dq);

// I^c_{T,d}: restriction at every fixed point, and the basis form
LocVec toric_coeff_loc(const AbelianChowRing& R, const std::vector<int>& d);
ChowClass toric_coeff(const AbelianChowRing& R, const std::vector<int>& d);

ISeries small_I_toric(std::shared_ptr<const AbelianChowRing> R, const Trunc& t);
// side +1 uses c = 0, side -1 uses c = k; x variables follow the catalog
ISeries big_I_toric(const Params& p, int side, const MonomialCatalog& cat, const Trunc& t);
// prod over roots (i, j) of (z d/dlog y_i^+ - z d/dlog y_j^+)
ISeries apply_partial_delta(const ISeries& s, const RootData& roots);
// Weyl action on the classes combined with y_i -> y_{w(i)}, q_i -> q_{w(i)}
ISeries weyl_permute(const ISeries& s, const Perm& w);

// big series after the Delta-derivative and the Weyl-invariant specialization,
// still in abelian localization form (variables Q, L, X_j)
ISeries specialized_delta_series(const Params& p, int side, const Trunc& t, const RootData& roots);

struct DivisibilityReport {
  int checked = 0;
  bool antiinvariant = true;
  bool divisible = true;  // exact quotient by Delta exists and is symmetric
};
// class-level check through the abelian basis
DivisibilityReport delta_divisibility(const ISeries& s, const RootData& roots);

enum class Formula { A, B };
GSeries abelianize_IG(const Params& p, int side, Formula f, const Trunc& t, const RootData& roots);
GSeries abelianize_IG(const Params& p, int side, Formula f, const Trunc& t);

// the abelianization factor identity, for all roots of GL(k), as exact RatFns
bool abelianization_factor_check(const Params& p, const std::vector<int>& d);

struct BigPointReport {
  std::vector<std::vector<RatFn>> derivative_matrix;  // [basis element][k-subset]
  bool matches_expected = false;
  int rank = 0;
  bool basis_flag = false;
};
BigPointReport bigness_check(const GSeries& ig);

}  // namespace flop
