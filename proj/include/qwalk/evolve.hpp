#pragma once

// Position-space evolution under U = S (I (x) C) and bounded-time return
// probability diagnostics.

#include <Eigen/Sparse>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/core.hpp"

namespace qwalk {

/// One application of U:
///   Psi'(x)_{2j}   = (C Psi(x + e_j))_{2j}
///   Psi'(x)_{2j+1} = (C Psi(x - e_j))_{2j+1}
/// Every target component receives exactly one term, so the result does not
/// depend on traversal order.
LatticeState step(const LatticeState& psi, const CoinMatrix& coin);

/// U^n Psi0. n = 0 returns Psi0 unchanged.
LatticeState evolve(const LatticeState& psi0, const CoinMatrix& coin, int steps);

struct EvolutionRecord {
  int step_index = 0;
  double norm = 0.0;
  /// |Psi_n(x0)|^2
  double return_probability = 0.0;
  /// (1/(n+1)) sum_{m<=n} |Psi_m(x0)|^2
  double avg_return_probability = 0.0;
  std::size_t support_size = 0;
};

/// Records for n = 0 .. n_max (n_max + 1 rows).
std::vector<EvolutionRecord> return_probability_series(const LatticeState& psi0,
                                                       const CoinMatrix& coin,
                                                       const Position& x0, int n_max);

/// Mean of return_probability over records with step_index in [first, last].
double window_average_return_probability(const std::vector<EvolutionRecord>& records, int first,
                                         int last);

/// CSV with header `n,norm,return_prob,avg_return_prob,support`, %.17g floats.
std::string series_to_csv(const std::vector<EvolutionRecord>& records);

/// Hard cap on the basis size of truncated operators.
inline constexpr std::size_t kMaxBasisVectors = 1'000'000;

/// Indexing of the L-infinity box of a given radius around the origin:
/// sites in lexicographic order (axis 0 slowest), then chirality.
class BoxIndex {
 public:
  BoxIndex(Dimension d, int radius);

  Dimension dimension() const noexcept { return d_; }
  int radius() const noexcept { return radius_; }
  std::size_t site_count() const noexcept { return sites_; }
  std::size_t basis_size() const noexcept { return sites_ * static_cast<std::size_t>(d_.internal_size()); }

  std::optional<std::size_t> site_index(const Position& x) const;
  Position site(std::size_t index) const;
  std::size_t basis_index(std::size_t site_idx, int chirality) const {
    return site_idx * static_cast<std::size_t>(d_.internal_size()) + static_cast<std::size_t>(chirality);
  }

 private:
  Dimension d_;
  int radius_;
  std::size_t side_;
  std::size_t sites_;
};

/// Number of basis vectors in the box of the given radius, saturating at
/// SIZE_MAX instead of overflowing.
std::size_t box_basis_size(Dimension d, int radius);

/// Matrix of U restricted to the radius box, landing in the radius+1 box.
struct TruncatedOperator {
  BoxIndex source;
  BoxIndex target;
  Eigen::SparseMatrix<Complex> matrix;  // target.basis_size() x source.basis_size()
};

/// Throws ResourceError when the target basis exceeds kMaxBasisVectors.
TruncatedOperator dense_operator(const CoinMatrix& coin, int radius);

/// Coefficient vector of psi in the box basis. Throws InvalidArgument if psi
/// has a nonzero amplitude outside the box.
Eigen::VectorXcd vectorize(const LatticeState& psi, const BoxIndex& box);
/// Inverse of vectorize; zero sites are omitted.
LatticeState devectorize(const Eigen::VectorXcd& coeffs, const BoxIndex& box);

}  // namespace qwalk
