#include "qwalk/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qwalk {

namespace {

void require_same_dimension(const LatticeState& psi, const CoinMatrix& coin) {
  if (!(psi.dimension() == coin.dimension())) {
    throw InvalidArgument("dimension mismatch: state d=" + std::to_string(psi.dimension().value()) +
                          ", coin d=" + std::to_string(coin.dimension().value()));
  }
}

// Flat engine: sites in lexicographic order, coordinates and amplitudes in
// contiguous arrays. Translating every site by the same vector preserves
// lexicographic order, so the 2d shifted component streams of one step are
// already sorted and the new state is their 2d-way merge.
class FlatState {
 public:
  explicit FlatState(const LatticeState& psi)
      : d_(psi.dimension().value()), n_(2 * d_) {
    for (const auto& [x, v] : psi) {
      if (v.isZero(0.0)) continue;
      coords_.insert(coords_.end(), x.coords().begin(), x.coords().end());
      amps_.insert(amps_.end(), v.data(), v.data() + n_);
    }
  }

  std::size_t sites() const noexcept { return amps_.size() / static_cast<std::size_t>(n_); }

  void step(const ComplexMatrix& coin) {
    const std::size_t count = sites();
    // mixed = C psi(y) for every source site y
    std::vector<Complex> mixed(amps_.size());
    for (std::size_t s = 0; s < count; ++s) {
      Eigen::Map<const Eigen::VectorXcd> in(amps_.data() + s * n_, n_);
      Eigen::Map<Eigen::VectorXcd> out(mixed.data() + s * n_, n_);
      out.noalias() = coin * in;
    }

    // Stream c carries component c of site y to y + direction(c) e_axis(c).
    std::vector<std::size_t> cursor(static_cast<std::size_t>(n_), 0);
    std::vector<int> next_coords;
    std::vector<Complex> next_amps;
    next_coords.reserve(coords_.size() * 2);
    next_amps.reserve(amps_.size() * 2);
    std::vector<int> best(static_cast<std::size_t>(d_));
    std::vector<int> cand(static_cast<std::size_t>(d_));

    auto load = [&](int c, std::vector<int>& into) {
      const std::size_t s = cursor[static_cast<std::size_t>(c)];
      std::copy_n(coords_.begin() + static_cast<std::ptrdiff_t>(s * d_), d_, into.begin());
      into[static_cast<std::size_t>(chirality_axis(c))] += chirality_direction(c);
    };

    for (;;) {
      int lead = -1;
      for (int c = 0; c < n_; ++c) {
        if (cursor[static_cast<std::size_t>(c)] == count) continue;
        if (lead < 0) {
          load(c, best);
          lead = c;
          continue;
        }
        load(c, cand);
        if (cand < best) {
          best.swap(cand);
          lead = c;
        }
      }
      if (lead < 0) break;

      const std::size_t base = next_amps.size();
      next_amps.resize(base + static_cast<std::size_t>(n_), Complex(0.0, 0.0));
      bool nonzero = false;
      for (int c = 0; c < n_; ++c) {
        const std::size_t s = cursor[static_cast<std::size_t>(c)];
        if (s == count) continue;
        load(c, cand);
        if (cand != best) continue;
        const Complex v = mixed[s * n_ + static_cast<std::size_t>(c)];
        next_amps[base + static_cast<std::size_t>(c)] = v;
        nonzero = nonzero || v != Complex(0.0, 0.0);
        ++cursor[static_cast<std::size_t>(c)];
      }
      if (nonzero) {
        next_coords.insert(next_coords.end(), best.begin(), best.end());
      } else {
        next_amps.resize(base);  // exact zeros carry no information
      }
    }
    coords_.swap(next_coords);
    amps_.swap(next_amps);
  }

  double squared_norm() const {
    double s = 0.0;
    for (Complex z : amps_) s += std::norm(z);
    return s;
  }

  /// |Psi(x)|^2, by binary search over the sorted sites.
  double probability_at(const Position& x) const {
    std::size_t lo = 0, hi = sites();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const auto first = coords_.begin() + static_cast<std::ptrdiff_t>(mid * d_);
      if (std::lexicographical_compare(first, first + d_, x.coords().begin(), x.coords().end())) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    if (lo == sites() || !std::equal(x.coords().begin(), x.coords().end(),
                                     coords_.begin() + static_cast<std::ptrdiff_t>(lo * d_))) {
      return 0.0;
    }
    double p = 0.0;
    for (int c = 0; c < n_; ++c) p += std::norm(amps_[lo * n_ + static_cast<std::size_t>(c)]);
    return p;
  }

  LatticeState to_state(Dimension d) const {
    LatticeState psi(d);
    for (std::size_t s = 0; s < sites(); ++s) {
      std::vector<int> x(coords_.begin() + static_cast<std::ptrdiff_t>(s * d_),
                         coords_.begin() + static_cast<std::ptrdiff_t>((s + 1) * d_));
      psi.set(Position(std::move(x)),
              Eigen::Map<const Eigen::VectorXcd>(amps_.data() + s * n_, n_));
    }
    return psi;
  }

 private:
  int d_;
  int n_;
  std::vector<int> coords_;
  std::vector<Complex> amps_;
};

}  // namespace

LatticeState step(const LatticeState& psi, const CoinMatrix& coin) {
  require_same_dimension(psi, coin);
  FlatState flat(psi);
  flat.step(coin.matrix());
  return flat.to_state(psi.dimension());
}

LatticeState evolve(const LatticeState& psi0, const CoinMatrix& coin, int steps) {
  if (steps < 0) throw InvalidArgument("steps must be >= 0");
  require_same_dimension(psi0, coin);
  if (steps == 0) return psi0;
  FlatState flat(psi0);
  for (int n = 0; n < steps; ++n) flat.step(coin.matrix());
  return flat.to_state(psi0.dimension());
}

std::vector<EvolutionRecord> return_probability_series(const LatticeState& psi0,
                                                       const CoinMatrix& coin,
                                                       const Position& x0, int n_max) {
  if (n_max < 1) throw InvalidArgument("n_max must be >= 1");
  require_same_dimension(psi0, coin);
  if (x0.size() != coin.dimension().value()) {
    throw InvalidArgument("tracked site " + x0.to_string() + " has wrong length");
  }
  std::vector<EvolutionRecord> out;
  out.reserve(static_cast<std::size_t>(n_max) + 1);
  FlatState flat(psi0);
  double running = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) flat.step(coin.matrix());
    EvolutionRecord r;
    r.step_index = n;
    r.norm = std::sqrt(flat.squared_norm());
    r.return_probability = flat.probability_at(x0);
    running += r.return_probability;
    r.avg_return_probability = running / (n + 1);
    r.support_size = flat.sites();
    out.push_back(r);
  }
  return out;
}

double window_average_return_probability(const std::vector<EvolutionRecord>& records, int first,
                                         int last) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : records) {
    if (r.step_index >= first && r.step_index <= last) {
      sum += r.return_probability;
      ++count;
    }
  }
  if (count == 0) throw InvalidArgument("empty averaging window");
  return sum / count;
}

std::string series_to_csv(const std::vector<EvolutionRecord>& records) {
  std::string out = "n,norm,return_prob,avg_return_prob,support\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%zu\n", r.step_index, r.norm,
                  r.return_probability, r.avg_return_probability, r.support_size);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncated operator

std::size_t box_basis_size(Dimension d, int radius) {
  const std::size_t side = 2 * static_cast<std::size_t>(radius) + 1;
  std::size_t n = static_cast<std::size_t>(d.internal_size());
  for (int j = 0; j < d.value(); ++j) {
    if (n > std::numeric_limits<std::size_t>::max() / side) return std::numeric_limits<std::size_t>::max();
    n *= side;
  }
  return n;
}

BoxIndex::BoxIndex(Dimension d, int radius)
    : d_(d), radius_(radius), side_(2 * static_cast<std::size_t>(radius) + 1), sites_(1) {
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  if (box_basis_size(d, radius) > kMaxBasisVectors) {
    throw ResourceError("box of radius " + std::to_string(radius) + " in d=" +
                        std::to_string(d.value()) + " exceeds " + std::to_string(kMaxBasisVectors) +
                        " basis vectors");
  }
  for (int j = 0; j < d.value(); ++j) sites_ *= side_;
}

std::optional<std::size_t> BoxIndex::site_index(const Position& x) const {
  std::size_t idx = 0;
  for (int j = 0; j < d_.value(); ++j) {
    const int c = x[j];
    if (c < -radius_ || c > radius_) return std::nullopt;
    idx = idx * side_ + static_cast<std::size_t>(c + radius_);
  }
  return idx;
}

Position BoxIndex::site(std::size_t index) const {
  std::vector<int> coords(static_cast<std::size_t>(d_.value()));
  for (int j = d_.value() - 1; j >= 0; --j) {
    coords[static_cast<std::size_t>(j)] = static_cast<int>(index % side_) - radius_;
    index /= side_;
  }
  return Position(std::move(coords));
}

TruncatedOperator dense_operator(const CoinMatrix& coin, int radius) {
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  const Dimension d = coin.dimension();
  const std::size_t target_basis = box_basis_size(d, radius + 1);
  if (target_basis > kMaxBasisVectors) {
    throw ResourceError("truncated operator needs " +
                        (target_basis == std::numeric_limits<std::size_t>::max()
                             ? std::string("more than 2^64")
                             : std::to_string(target_basis)) +
                        " basis vectors (limit " + std::to_string(kMaxBasisVectors) + ")");
  }
  BoxIndex source(d, radius);
  BoxIndex target(d, radius + 1);
  const int n = d.internal_size();
  const ComplexMatrix& c = coin.matrix();

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(source.basis_size() * static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < source.site_count(); ++s) {
    const Position y = source.site(s);
    for (int row = 0; row < n; ++row) {
      // Component `row` of C psi(y) lands at y + direction(row) e_axis(row).
      const Position x = y.shifted(chirality_axis(row), chirality_direction(row));
      const std::size_t t = *target.site_index(x);
      for (int col = 0; col < n; ++col) {
        if (c(row, col) == Complex(0.0, 0.0)) continue;
        triplets.emplace_back(static_cast<int>(target.basis_index(t, row)),
                              static_cast<int>(source.basis_index(s, col)), c(row, col));
      }
    }
  }
  Eigen::SparseMatrix<Complex> m(static_cast<Eigen::Index>(target.basis_size()),
                                 static_cast<Eigen::Index>(source.basis_size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return TruncatedOperator{source, target, std::move(m)};
}

Eigen::VectorXcd vectorize(const LatticeState& psi, const BoxIndex& box) {
  if (!(psi.dimension() == box.dimension())) throw InvalidArgument("dimension mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(box.basis_size()));
  const int n = box.dimension().internal_size();
  for (const auto& [x, v] : psi) {
    if (v.isZero(0.0)) continue;
    const auto s = box.site_index(x);
    if (!s) {
      throw InvalidArgument("state has amplitude at " + x.to_string() + " outside the box of radius " +
                            std::to_string(box.radius()));
    }
    out.segment(static_cast<Eigen::Index>(box.basis_index(*s, 0)), n) = v;
  }
  return out;
}

LatticeState devectorize(const Eigen::VectorXcd& coeffs, const BoxIndex& box) {
  if (static_cast<std::size_t>(coeffs.size()) != box.basis_size()) {
    throw InvalidArgument("coefficient vector does not match the box basis");
  }
  const int n = box.dimension().internal_size();
  LatticeState psi(box.dimension());
  for (std::size_t s = 0; s < box.site_count(); ++s) {
    Spinor v = coeffs.segment(static_cast<Eigen::Index>(box.basis_index(s, 0)), n);
    if (!v.isZero(0.0)) psi.set(box.site(s), std::move(v));
  }
  return psi;
}

}  // namespace qwalk
