#include "qwalk/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qwalk {

Dimension::Dimension(int d) : d_(d) {
  if (d < 1) {
    throw InvalidArgument("invalid dimension d=" + std::to_string(d) + " (need d >= 1)");
  }
}

Position Position::origin(Dimension d) {
  return Position(std::vector<int>(static_cast<std::size_t>(d.value()), 0));
}

Position Position::shifted(int axis, int step) const {
  Position out = *this;
  out.coords_[static_cast<std::size_t>(axis)] += step;
  return out;
}

int Position::linf_norm() const {
  int m = 0;
  for (int c : coords_) m = std::max(m, std::abs(c));
  return m;
}

int Position::l1_norm() const {
  int s = 0;
  for (int c : coords_) s += std::abs(c);
  return s;
}

std::string Position::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) os << ',';
    os << coords_[i];
  }
  os << ')';
  return os.str();
}

double unitarity_defect(const ComplexMatrix& m) {
  const ComplexMatrix r = m * m.adjoint() - ComplexMatrix::Identity(m.rows(), m.cols());
  return r.cwiseAbs().maxCoeff();
}

CoinMatrix::CoinMatrix(Dimension d, ComplexMatrix entries, double unitarity_tol)
    : d_(d), m_(std::move(entries)) {
  const int n = d.internal_size();
  if (m_.rows() != n || m_.cols() != n) {
    throw ShapeError("coin for d=" + std::to_string(d.value()) + " must be " + std::to_string(n) +
                     "x" + std::to_string(n) + ", got " + std::to_string(m_.rows()) + "x" +
                     std::to_string(m_.cols()));
  }
  const double defect = qwalk::unitarity_defect(m_);
  if (!(defect < unitarity_tol)) {
    std::ostringstream os;
    os << "coin is not unitary: max|C C^dagger - I| = " << defect << " (tolerance " << unitarity_tol
       << ")";
    throw ValidationError(os.str(), defect);
  }
}

double CoinMatrix::unitarity_defect() const { return qwalk::unitarity_defect(m_); }

CoinMatrix fourier_coin(Dimension d) {
  const int n = d.internal_size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexMatrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // Reduce the exponent mod 2d first so large products keep full accuracy.
      const int e = (j * k) % n;
      const double phase = 2.0 * std::numbers::pi * e / n;
      m(j, k) = std::polar(scale, phase);
    }
  }
  return CoinMatrix(d, std::move(m), kExactUnitarityTol);
}

CoinMatrix grover_coin_2d() {
  ComplexMatrix m = ComplexMatrix::Constant(4, 4, Complex(0.5, 0.0));
  for (int j = 0; j < 4; ++j) m(j, j) = Complex(-0.5, 0.0);
  return CoinMatrix(Dimension(2), std::move(m), kExactUnitarityTol);
}

CoinMatrix hadamard_coin() { return fourier_coin(Dimension(1)); }

// ---------------------------------------------------------------------------
// LatticeState

void LatticeState::check_spinor(const Spinor& amp) const {
  if (amp.size() != d_.internal_size()) {
    throw InvalidArgument("amplitude vector has length " + std::to_string(amp.size()) +
                          ", expected " + std::to_string(d_.internal_size()));
  }
}

void LatticeState::add(const Position& x, const Spinor& amp) {
  check_spinor(amp);
  if (x.size() != d_.value()) throw InvalidArgument("site " + x.to_string() + " has wrong length");
  auto [it, inserted] = sites_.try_emplace(x, amp);
  if (!inserted) it->second += amp;
}

void LatticeState::add_component(const Position& x, int chirality, Complex value) {
  auto it = sites_.find(x);
  if (it == sites_.end()) {
    if (x.size() != d_.value()) throw InvalidArgument("site " + x.to_string() + " has wrong length");
    it = sites_.emplace(x, Spinor::Zero(d_.internal_size())).first;
  }
  it->second(chirality) += value;
}

void LatticeState::set(const Position& x, Spinor amp) {
  check_spinor(amp);
  if (x.size() != d_.value()) throw InvalidArgument("site " + x.to_string() + " has wrong length");
  sites_.insert_or_assign(x, std::move(amp));
}

Spinor LatticeState::at(const Position& x) const {
  auto it = sites_.find(x);
  if (it == sites_.end()) return Spinor::Zero(d_.internal_size());
  return it->second;
}

std::vector<Position> LatticeState::support() const {
  std::vector<Position> out;
  for (const auto& [x, v] : sites_) {
    if (!v.isZero(0.0)) out.push_back(x);
  }
  return out;
}

std::size_t LatticeState::support_size() const {
  std::size_t n = 0;
  for (const auto& [x, v] : sites_) {
    if (!v.isZero(0.0)) ++n;
  }
  return n;
}

double LatticeState::squared_norm() const {
  double s = 0.0;
  for (const auto& [x, v] : sites_) s += v.squaredNorm();
  return s;
}

LatticeState& LatticeState::operator+=(const LatticeState& other) {
  if (!(other.d_ == d_)) throw InvalidArgument("dimension mismatch in state addition");
  for (const auto& [x, v] : other.sites_) add(x, v);
  return *this;
}

LatticeState& LatticeState::operator*=(Complex factor) {
  for (auto& [x, v] : sites_) v *= factor;
  return *this;
}

bool operator==(const LatticeState& a, const LatticeState& b) {
  if (!(a.d_ == b.d_)) return false;
  auto matches = [](const LatticeState& lhs, const LatticeState& rhs) {
    for (const auto& [x, v] : lhs.sites_) {
      if (v.isZero(0.0)) continue;
      auto it = rhs.sites_.find(x);
      if (it == rhs.sites_.end() || it->second != v) return false;
    }
    return true;
  };
  return matches(a, b) && matches(b, a);
}

LatticeState operator+(LatticeState a, const LatticeState& b) {
  a += b;
  return a;
}

LatticeState operator-(LatticeState a, const LatticeState& b) {
  a += Complex(-1.0, 0.0) * b;
  return a;
}

LatticeState operator*(Complex factor, LatticeState a) {
  a *= factor;
  return a;
}

double max_abs_difference(const LatticeState& a, const LatticeState& b) {
  if (!(a.dimension() == b.dimension())) throw InvalidArgument("dimension mismatch");
  double m = 0.0;
  for (const auto& [x, v] : a) m = std::max(m, (v - b.at(x)).cwiseAbs().maxCoeff());
  for (const auto& [x, v] : b) m = std::max(m, (v - a.at(x)).cwiseAbs().maxCoeff());
  return m;
}

LatticeState delta_state(Dimension d, const Position& x, const Spinor& spin) {
  if (spin.size() != d.internal_size()) {
    throw InvalidArgument("spin vector has length " + std::to_string(spin.size()) + ", expected " +
                          std::to_string(d.internal_size()));
  }
  const double n = spin.norm();
  if (!(n > 0.0)) throw InvalidArgument("spin vector must be nonzero");
  LatticeState psi(d);
  psi.set(x, spin / n);
  return psi;
}

LatticeState grover_stationary_state() {
  const double a = 1.0 / (2.0 * std::numbers::sqrt2);
  auto spinor = [a](double c0, double c1, double c2, double c3) {
    Spinor v(4);
    v << a * c0, a * c1, a * c2, a * c3;
    return v;
  };
  LatticeState psi(Dimension(2));
  psi.set({0, 0}, spinor(1, 0, 1, 0));
  psi.set({1, 0}, spinor(0, 1, 1, 0));
  psi.set({0, 1}, spinor(1, 0, 0, 1));
  psi.set({1, 1}, spinor(0, 1, 0, 1));
  return psi;
}

double state_norm(const LatticeState& psi) { return std::sqrt(psi.squared_norm()); }

// ---------------------------------------------------------------------------
// SubmatrixSelector

SubmatrixSelector::SubmatrixSelector(std::vector<int> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) throw InvalidArgument("selector must have length d >= 1");
  for (int b : bits_) {
    if (b != 0 && b != 1) throw InvalidArgument("selector bits must be 0 or 1");
  }
}

SubmatrixSelector SubmatrixSelector::from_index(Dimension d, std::uint64_t index) {
  const int n = d.value();
  std::vector<int> bits(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    bits[static_cast<std::size_t>(j)] = static_cast<int>((index >> (n - 1 - j)) & 1u);
  }
  return SubmatrixSelector(std::move(bits));
}

std::vector<int> SubmatrixSelector::indices() const {
  std::vector<int> out(bits_.size());
  for (std::size_t j = 0; j < bits_.size(); ++j) out[j] = 2 * static_cast<int>(j) + bits_[j];
  return out;
}

std::string SubmatrixSelector::to_string() const {
  std::string s;
  for (int b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

}  // namespace qwalk
