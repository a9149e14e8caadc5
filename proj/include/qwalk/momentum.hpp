#pragma once

// Momentum-space operator U^(k) = D(k) C with
// D(k) = diag(e^{ik_1}, e^{-ik_1}, ..., e^{ik_d}, e^{-ik_d}), pointwise
// spectra, and the grid scan for k-independent eigenvalues.
//
// The phase convention follows from the shift: component 2j of the new state
// at x is read from x + e_j, so its Fourier coefficient picks up e^{+ik_j}.

#include <complex>
#include <string>
#include <vector>

#include "qwalk/core.hpp"
#include "qwalk/serialize.hpp"

namespace qwalk {

/// k in [0, 2 pi)^d; components are reduced mod 2 pi on construction.
class MomentumPoint {
 public:
  explicit MomentumPoint(std::vector<double> k);
  static MomentumPoint zero(Dimension d);

  int size() const noexcept { return static_cast<int>(k_.size()); }
  double operator[](int axis) const { return k_[static_cast<std::size_t>(axis)]; }
  const std::vector<double>& components() const noexcept { return k_; }

 private:
  std::vector<double> k_;
};

struct MomentumOperator {
  Dimension d;
  ComplexMatrix matrix;
};

MomentumOperator momentum_operator(const CoinMatrix& coin, const MomentumPoint& k);

/// Eigenvalues of U^(k), sorted by principal argument ascending.
/// Throws NumericalError (naming k) if the solver fails or an eigenvalue
/// leaves the unit circle by more than 1e-9.
std::vector<Complex> spectrum(const CoinMatrix& coin, const MomentumPoint& k);

/// Distance from lambda to the nearest element of `eigenvalues`.
double distance_to_spectrum(Complex lambda, const std::vector<Complex>& eigenvalues);

/// Eigenvalues closer than this are treated as one candidate.
inline constexpr double kCandidateDedupTol = 1e-8;
inline constexpr double kDefaultScanTol = 1e-8;
inline constexpr int kDefaultScanGrid = 32;
inline constexpr std::size_t kMaxScanGridPoints = 10'000'000;

struct EigenvalueCandidate {
  Complex lambda;
  double max_deviation = 0.0;
};

/// Result of scanning k over the uniform grid {2 pi m / M}^d.
///
/// Candidates come from the spectrum at k = 0, which any constant eigenvalue
/// must belong to. A nonempty constant_eigenvalues list is evidence for
/// localization; an empty list on a finite grid is evidence against, not a
/// proof.
struct ConstancyReport {
  int d = 0;
  int grid = 0;
  double tolerance = 0.0;
  std::vector<EigenvalueCandidate> candidates;
  std::vector<EigenvalueCandidate> constant_eigenvalues;
};

ConstancyReport constant_eigenvalue_scan(const CoinMatrix& coin, int grid_points,
                                         double tolerance = kDefaultScanTol);

/// Scan report JSON: {"coin", "d", "grid", "tol", "candidates", "constant_eigenvalues"}.
Json scan_report_to_json(const ConstancyReport& report, const std::string& coin_name);

}  // namespace qwalk
