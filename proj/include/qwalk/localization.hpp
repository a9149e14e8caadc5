#pragma once

// Decision procedures for localization of space-homogeneous walks.
//
//  * Rank test: if some ell in {0,1}^d gives a full-rank submatrix
//    C^(ell) = [c_{2j+ell_j, 2k+ell_k}], localization is impossible.
//  * Fourier certificates: the explicit full-rank selector for the Fourier
//    coin, cross-checked against closed-form determinant magnitudes.
//  * Finite-support eigenvector search: nullspace of (U - lambda) on a
//    truncated box. A nonzero solution is an honest eigenvector of the
//    infinite walk and therefore proves localization.
//  * decide: the three combined into a verdict.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qwalk/core.hpp"
#include "qwalk/momentum.hpp"
#include "qwalk/serialize.hpp"

namespace qwalk {

inline constexpr double kRankTol = 1e-10;
inline constexpr double kNullspaceTol = 1e-10;
inline constexpr double kEigenResidualTol = 1e-9;
inline constexpr double kCertificateDetTol = 1e-9;
inline constexpr int kMaxSelectorBits = 20;
/// Largest source basis handed to the dense SVD in the eigenvector search
/// (only reached when the Cholesky screen cannot rule a nullspace out).
inline constexpr std::size_t kMaxSearchColumns = 6000;

struct CoinSubmatrix {
  SubmatrixSelector selector;
  ComplexMatrix matrix;
  std::vector<double> singular_values;  // descending
  int rank = 0;
};

/// Numerical rank: singular values above rank_tol * max(sigma_max, 1).
int numerical_rank(const std::vector<double>& singular_values, double rank_tol = kRankTol);

CoinSubmatrix coin_submatrix(const CoinMatrix& coin, const SubmatrixSelector& selector,
                             double rank_tol = kRankTol);

struct NecessaryConditionReport {
  int d = 0;
  std::vector<CoinSubmatrix> rank_table;  // canonical selector order
  /// First full-rank selector in canonical order, if any. Its presence rules
  /// localization out.
  std::optional<SubmatrixSelector> full_rank_witness;

  bool rules_out_localization() const { return full_rank_witness.has_value(); }
};

/// Evaluates every selector. Throws ResourceError above 2^20 selectors.
NecessaryConditionReport necessary_condition_test(const CoinMatrix& coin, double rank_tol = kRankTol);

enum class Parity { odd, even };

struct FourierCertificate {
  int d = 0;
  Parity parity = Parity::odd;
  SubmatrixSelector selector;
  int rank = 0;
  double min_singular_value = 0.0;
  double det_magnitude = 0.0;
  double expected_det_magnitude = 0.0;
};

/// (0,...,0) for odd d; d/2 zeros then d/2 ones for even d.
SubmatrixSelector fourier_selector(Dimension d);

/// Closed-form |det C^(ell)| for the Fourier selector: 2^{-d/2} for odd d,
/// prod_{i<j<d} |w^i - w^j| / (2d)^{d/2} with w = exp(2 pi i / 2d) for even d.
double fourier_expected_det_magnitude(Dimension d);

/// Throws ConsistencyError if the rank is not d or the determinant disagrees
/// with the closed form.
FourierCertificate fourier_certificate(Dimension d);

/// True when coin equals fourier_coin(d) entrywise within tol.
bool is_fourier_coin(const CoinMatrix& coin, double tol = 1e-12);

struct EigenvectorSearchResult {
  Complex lambda;
  int radius = 0;
  int nullspace_dimension = 0;
  std::vector<LatticeState> basis;  // orthonormal, supported in the radius box
  std::vector<double> residuals;    // |U psi - lambda psi| / |psi|
};

/// Throws InvalidArgument if | |lambda| - 1 | >= 1e-6 and ResourceError when
/// the box is too large.
EigenvectorSearchResult finite_support_eigenvector_search(const CoinMatrix& coin, Complex lambda,
                                                          int radius);

/// |psi - P psi| / |psi| where P projects onto span(basis) (basis orthonormal).
double projection_residual(const LatticeState& psi, const std::vector<LatticeState>& basis);

enum class LocalizationStatus { no_localization, localization, unknown };

std::string to_string(LocalizationStatus s);

struct EigenvectorWitness {
  Complex lambda;
  LatticeState state;
  double residual = 0.0;
};

using Witness = std::variant<std::monostate, SubmatrixSelector, EigenvectorWitness>;

struct ScanParameters {
  int grid = kDefaultScanGrid;
  double tolerance = kDefaultScanTol;
};

struct LocalizationVerdict {
  LocalizationStatus status = LocalizationStatus::unknown;
  Witness witness;
  NecessaryConditionReport rank_report;
  std::optional<FourierCertificate> certificate;
  std::optional<ConstancyReport> scan;
  std::vector<EigenvectorSearchResult> searches;
};

/// 1. Rank test; any full-rank submatrix gives no_localization.
/// 2. Otherwise scan for constant eigenvalues and search each one on boxes of
///    radius 0..radius_budget; the first nonempty nullspace gives
///    localization.
/// 3. Otherwise unknown.
///
/// A coin recognized as the Fourier coin also gets its certificate, whose
/// parity selector becomes the witness.
LocalizationVerdict decide(const CoinMatrix& coin, const ScanParameters& scan, int radius_budget);

Json rank_table_to_json(const NecessaryConditionReport& report);
Json certificate_to_json(const FourierCertificate& cert);
/// Eigenvector witnesses are referenced through `state_file` (may be empty,
/// in which case the state is embedded inline under "state").
Json verdict_to_json(const LocalizationVerdict& verdict, const std::string& coin_name,
                     const std::string& state_file);

}  // namespace qwalk
