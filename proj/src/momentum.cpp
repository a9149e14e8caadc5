#include "qwalk/momentum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qwalk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string describe(const MomentumPoint& k) {
  std::ostringstream os;
  os.precision(17);
  os << "k=(";
  for (int j = 0; j < k.size(); ++j) os << (j ? "," : "") << k[j];
  os << ')';
  return os.str();
}

}  // namespace

MomentumPoint::MomentumPoint(std::vector<double> k) : k_(std::move(k)) {
  for (double& c : k_) {
    if (!std::isfinite(c)) throw InvalidArgument("momentum component must be finite");
    c = std::fmod(c, kTwoPi);
    if (c < 0.0) c += kTwoPi;
    if (c >= kTwoPi) c = 0.0;
  }
}

MomentumPoint MomentumPoint::zero(Dimension d) {
  return MomentumPoint(std::vector<double>(static_cast<std::size_t>(d.value()), 0.0));
}

MomentumOperator momentum_operator(const CoinMatrix& coin, const MomentumPoint& k) {
  const Dimension d = coin.dimension();
  if (k.size() != d.value()) {
    throw InvalidArgument("dimension mismatch: momentum has " + std::to_string(k.size()) +
                          " components, coin d=" + std::to_string(d.value()));
  }
  ComplexMatrix m = coin.matrix();
  for (int j = 0; j < d.value(); ++j) {
    if (k[j] == 0.0) continue;  // keep U^(0) = C bit-exact
    m.row(2 * j) *= std::polar(1.0, k[j]);
    m.row(2 * j + 1) *= std::polar(1.0, -k[j]);
  }
  return MomentumOperator{d, std::move(m)};
}

std::vector<Complex> spectrum(const CoinMatrix& coin, const MomentumPoint& k) {
  const MomentumOperator u = momentum_operator(coin, k);
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(u.matrix, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigen-solver failed at " + describe(k));
  }
  std::vector<Complex> eig(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
  for (Complex z : eig) {
    if (std::abs(std::abs(z) - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "eigenvalue " << z << " off the unit circle at " << describe(k);
      throw NumericalError(os.str());
    }
  }
  std::stable_sort(eig.begin(), eig.end(),
                   [](Complex a, Complex b) { return std::arg(a) < std::arg(b); });
  return eig;
}

double distance_to_spectrum(Complex lambda, const std::vector<Complex>& eigenvalues) {
  double best = std::numeric_limits<double>::infinity();
  for (Complex z : eigenvalues) best = std::min(best, std::abs(z - lambda));
  return best;
}

ConstancyReport constant_eigenvalue_scan(const CoinMatrix& coin, int grid_points, double tolerance) {
  if (grid_points < 2) throw InvalidArgument("grid must have at least 2 points per axis");
  if (!(tolerance > 0.0)) throw InvalidArgument("tol must be positive");
  const int d = coin.dimension().value();
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    if (total > kMaxScanGridPoints / static_cast<std::size_t>(grid_points)) {
      throw ResourceError("scan grid " + std::to_string(grid_points) + "^" + std::to_string(d) +
                          " exceeds " + std::to_string(kMaxScanGridPoints) + " points");
    }
    total *= static_cast<std::size_t>(grid_points);
  }

  ConstancyReport report;
  report.d = d;
  report.grid = grid_points;
  report.tolerance = tolerance;
  for (Complex z : spectrum(coin, MomentumPoint::zero(coin.dimension()))) {
    const bool seen = std::any_of(report.candidates.begin(), report.candidates.end(),
                                  [z](const EigenvalueCandidate& c) {
                                    return std::abs(c.lambda - z) < kCandidateDedupTol;
                                  });
    if (!seen) report.candidates.push_back({z, 0.0});
  }

  // Odometer over m in [0, M)^d, axis 0 slowest.
  std::vector<int> m(static_cast<std::size_t>(d), 0);
  std::vector<double> k(static_cast<std::size_t>(d), 0.0);
  for (std::size_t point = 0; point < total; ++point) {
    for (int j = 0; j < d; ++j) {
      k[static_cast<std::size_t>(j)] = kTwoPi * m[static_cast<std::size_t>(j)] / grid_points;
    }
    const auto eig = spectrum(coin, MomentumPoint(k));
    for (auto& c : report.candidates) {
      c.max_deviation = std::max(c.max_deviation, distance_to_spectrum(c.lambda, eig));
    }
    for (int j = d - 1; j >= 0; --j) {
      if (++m[static_cast<std::size_t>(j)] < grid_points) break;
      m[static_cast<std::size_t>(j)] = 0;
    }
  }

  for (const auto& c : report.candidates) {
    if (c.max_deviation <= tolerance) report.constant_eigenvalues.push_back(c);
  }
  return report;
}

Json scan_report_to_json(const ConstancyReport& report, const std::string& coin_name) {
  auto rows = [](const std::vector<EigenvalueCandidate>& cs) {
    Json out = Json::array();
    for (const auto& c : cs) {
      out.push_back(Json{{"lambda", complex_to_json(c.lambda)}, {"max_deviation", c.max_deviation}});
    }
    return out;
  };
  return Json{{"coin", coin_name},
              {"d", report.d},
              {"grid", report.grid},
              {"tol", report.tolerance},
              {"candidates", rows(report.candidates)},
              {"constant_eigenvalues", rows(report.constant_eigenvalues)}};
}

}  // namespace qwalk
