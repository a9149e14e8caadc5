#pragma once

// Domain types shared by every analysis: lattice dimension, sites, chirality
// labels, coin matrices, finitely supported lattice states and the selectors
// that pick d x d coin submatrices.
//
// Basis convention (fixed globally, coin files rely on it): chirality 2j moves
// one step along -e_j, chirality 2j+1 moves along +e_j.

#include <Eigen/Dense>

#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qwalk/errors.hpp"

namespace qwalk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Spinor = Eigen::VectorXcd;

/// Unitarity tolerance for matrices produced by the built-in constructors.
inline constexpr double kExactUnitarityTol = 1e-12;
/// Unitarity tolerance for user-supplied coin files (decimal-rounded entries).
inline constexpr double kUserUnitarityTol = 1e-10;

class Dimension {
 public:
  explicit Dimension(int d);

  int value() const noexcept { return d_; }
  /// Size of the chirality space, 2d.
  int internal_size() const noexcept { return 2 * d_; }

  friend bool operator==(Dimension, Dimension) = default;

 private:
  int d_;
};

/// A lattice site x in Z^d.
class Position {
 public:
  Position() = default;
  explicit Position(std::vector<int> coords) : coords_(std::move(coords)) {}
  Position(std::initializer_list<int> coords) : coords_(coords) {}

  /// The origin of Z^d.
  static Position origin(Dimension d);

  int size() const noexcept { return static_cast<int>(coords_.size()); }
  int operator[](int axis) const { return coords_[static_cast<std::size_t>(axis)]; }
  const std::vector<int>& coords() const noexcept { return coords_; }

  /// x + step * e_axis
  Position shifted(int axis, int step) const;
  /// max_j |x_j|
  int linf_norm() const;
  /// sum_j |x_j|
  int l1_norm() const;

  std::string to_string() const;

  friend auto operator<=>(const Position&, const Position&) = default;

 private:
  std::vector<int> coords_;
};

/// Axis moved along by chirality index idx.
inline int chirality_axis(int idx) { return idx / 2; }
/// Direction (-1 or +1) moved along by chirality index idx.
inline int chirality_direction(int idx) { return (idx % 2 == 0) ? -1 : +1; }

/// Unitary 2d x 2d matrix acting on the chirality components at each site.
class CoinMatrix {
 public:
  /// Validates shape and unitarity; throws ShapeError / ValidationError.
  CoinMatrix(Dimension d, ComplexMatrix entries, double unitarity_tol = kUserUnitarityTol);

  Dimension dimension() const noexcept { return d_; }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  /// max-norm of C C^dagger - I
  double unitarity_defect() const;

 private:
  Dimension d_;
  ComplexMatrix m_;
};

/// max_{j,k} |(M M^dagger - I)_{jk}|
double unitarity_defect(const ComplexMatrix& m);

/// Fourier coin: entry (j,k) = omega^{jk} / sqrt(2d), omega = exp(2 pi i / 2d).
CoinMatrix fourier_coin(Dimension d);
inline CoinMatrix fourier_coin(int d) { return fourier_coin(Dimension(d)); }

/// The 4x4 Grover coin on Z^2, (1/2)[[-1,1,1,1],[1,-1,1,1],[1,1,-1,1],[1,1,1,-1]].
CoinMatrix grover_coin_2d();

/// The Hadamard coin, identical to fourier_coin(1).
CoinMatrix hadamard_coin();

/// A finitely supported state Psi : Z^d -> C^{2d}.
///
/// Sites holding an all-zero vector may be stored; they are invisible to
/// equality, norms and every downstream operation. Iteration is in
/// lexicographic site order.
class LatticeState {
 public:
  using Storage = std::map<Position, Spinor>;

  explicit LatticeState(Dimension d) : d_(d) {}

  Dimension dimension() const noexcept { return d_; }

  /// Adds amp to the vector stored at x (creating it if absent).
  void add(const Position& x, const Spinor& amp);
  /// Adds value to a single component of the vector at x.
  void add_component(const Position& x, int chirality, Complex value);
  /// Replaces the vector at x.
  void set(const Position& x, Spinor amp);

  /// Vector at x, or zero if x is not stored.
  Spinor at(const Position& x) const;

  /// Sites whose stored vector is nonzero, in lexicographic order.
  std::vector<Position> support() const;
  std::size_t support_size() const;
  /// Number of stored entries, including explicit zeros.
  std::size_t stored_size() const noexcept { return sites_.size(); }

  Storage::const_iterator begin() const noexcept { return sites_.begin(); }
  Storage::const_iterator end() const noexcept { return sites_.end(); }

  double squared_norm() const;

  LatticeState& operator+=(const LatticeState& other);
  LatticeState& operator*=(Complex factor);

  /// Exact equality ignoring explicit zeros.
  friend bool operator==(const LatticeState& a, const LatticeState& b);

 private:
  void check_spinor(const Spinor& amp) const;

  Dimension d_;
  Storage sites_;
};

LatticeState operator+(LatticeState a, const LatticeState& b);
LatticeState operator-(LatticeState a, const LatticeState& b);
LatticeState operator*(Complex factor, LatticeState a);

/// max over all sites and components of |a(x)_c - b(x)_c|.
double max_abs_difference(const LatticeState& a, const LatticeState& b);

/// Normalized state concentrated at a single site: Psi(x) = spin / |spin|.
LatticeState delta_state(Dimension d, const Position& x, const Spinor& spin);

/// The finite-support lambda=1 eigenvector of the 2D Grover walk, in its
/// displayed scaling 1/(2 sqrt 2) on the unit square {0,1}^2.
LatticeState grover_stationary_state();

/// sqrt(sum_x |Psi(x)|^2)
double state_norm(const LatticeState& psi);

/// ell in {0,1}^d selecting the coin submatrix with entries
/// c_{2j+ell_j, 2k+ell_k}.
class SubmatrixSelector {
 public:
  explicit SubmatrixSelector(std::vector<int> bits);

  /// Selector number `index` in canonical order, where ell_0 is the most
  /// significant bit: index 0 is (0,...,0), index 1 is (0,...,0,1).
  static SubmatrixSelector from_index(Dimension d, std::uint64_t index);

  int size() const noexcept { return static_cast<int>(bits_.size()); }
  const std::vector<int>& bits() const noexcept { return bits_; }
  /// Row/column indices 2j + ell_j of the parent coin.
  std::vector<int> indices() const;
  /// Compact form, e.g. "010".
  std::string to_string() const;

  friend bool operator==(const SubmatrixSelector&, const SubmatrixSelector&) = default;

 private:
  std::vector<int> bits_;
};

}  // namespace qwalk
