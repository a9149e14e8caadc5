#include "qwalk/localization.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qwalk/evolve.hpp"

namespace qwalk {

namespace {

std::vector<double> singular_values_of(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

// Multiplies v by a unit phase so that its first largest-magnitude entry is
// real and positive, then normalizes.
void canonicalize_phase(Eigen::VectorXcd& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
  v.normalize();
}

// Sufficient test for an empty numerical nullspace of A (|A| <= 2 since U is
// a contraction on the box and |lambda| = 1): if A^H A - tau^2 I admits a
// Cholesky factorization then sigma_min(A) > tau, far above the SVD cutoff.
// Rounding in forming and factoring the Gram matrix is ~1e-12, well below
// tau^2 = 1e-10. A failed factorization proves nothing.
bool nullspace_screen_rules_out(const Eigen::SparseMatrix<Complex>& a) {
  constexpr double tau = 1e-5;
  Eigen::SparseMatrix<Complex> gram = Eigen::SparseMatrix<Complex>(a.adjoint()) * a;
  Eigen::SparseMatrix<Complex> shift(gram.rows(), gram.cols());
  shift.setIdentity();
  gram -= (tau * tau) * shift;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<Complex>> llt(gram);
  return llt.info() == Eigen::Success;
}

}  // namespace

int numerical_rank(const std::vector<double>& singular_values, double rank_tol) {
  double largest = 0.0;
  for (double s : singular_values) largest = std::max(largest, s);
  const double cutoff = rank_tol * std::max(largest, 1.0);
  int rank = 0;
  for (double s : singular_values) {
    if (s > cutoff) ++rank;
  }
  return rank;
}

CoinSubmatrix coin_submatrix(const CoinMatrix& coin, const SubmatrixSelector& selector,
                             double rank_tol) {
  const int d = coin.dimension().value();
  if (selector.size() != d) {
    throw InvalidArgument("dimension mismatch: selector has length " +
                          std::to_string(selector.size()) + ", coin d=" + std::to_string(d));
  }
  const std::vector<int> idx = selector.indices();
  ComplexMatrix sub(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      sub(j, k) = coin(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(k)]);
    }
  }
  CoinSubmatrix out{selector, std::move(sub), {}, 0};
  out.singular_values = singular_values_of(out.matrix);
  out.rank = numerical_rank(out.singular_values, rank_tol);
  return out;
}

NecessaryConditionReport necessary_condition_test(const CoinMatrix& coin, double rank_tol) {
  const Dimension d = coin.dimension();
  if (d.value() > kMaxSelectorBits) {
    throw ResourceError("rank test over 2^" + std::to_string(d.value()) + " selectors exceeds 2^" +
                        std::to_string(kMaxSelectorBits));
  }
  NecessaryConditionReport report;
  report.d = d.value();
  const std::uint64_t count = std::uint64_t{1} << d.value();
  report.rank_table.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    report.rank_table.push_back(coin_submatrix(coin, SubmatrixSelector::from_index(d, i), rank_tol));
    const auto& entry = report.rank_table.back();
    if (!report.full_rank_witness && entry.rank == d.value()) {
      report.full_rank_witness = entry.selector;
    }
  }
  return report;
}

SubmatrixSelector fourier_selector(Dimension d) {
  const int n = d.value();
  std::vector<int> bits(static_cast<std::size_t>(n), 0);
  if (n % 2 == 0) {
    for (int j = n / 2; j < n; ++j) bits[static_cast<std::size_t>(j)] = 1;
  }
  return SubmatrixSelector(std::move(bits));
}

double fourier_expected_det_magnitude(Dimension d) {
  const int n = d.value();
  if (n % 2 == 1) return std::pow(2.0, -0.5 * n);
  // Vandermonde nodes w^m, m = 0..d-1, with w a primitive (2d)-th root of unity.
  double prod = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // |w^i - w^j| = 2 |sin(pi (j - i) / 2d)|
      prod *= 2.0 * std::abs(std::sin(std::numbers::pi * (j - i) / (2.0 * n)));
    }
  }
  return prod / std::pow(2.0 * n, 0.5 * n);
}

FourierCertificate fourier_certificate(Dimension d) {
  const CoinMatrix coin = fourier_coin(d);
  FourierCertificate cert{d.value(), d.value() % 2 ? Parity::odd : Parity::even, fourier_selector(d),
                          0, 0.0, 0.0, 0.0};
  const CoinSubmatrix sub = coin_submatrix(coin, cert.selector);
  cert.rank = sub.rank;
  cert.min_singular_value = sub.singular_values.empty() ? 0.0 : sub.singular_values.back();
  cert.det_magnitude = std::abs(sub.matrix.partialPivLu().determinant());
  cert.expected_det_magnitude = fourier_expected_det_magnitude(d);

  if (cert.rank != d.value()) {
    throw ConsistencyError("Fourier certificate for d=" + std::to_string(d.value()) + ": rank " +
                           std::to_string(cert.rank) + " != d");
  }
  if (!(std::abs(cert.det_magnitude - cert.expected_det_magnitude) < kCertificateDetTol)) {
    std::ostringstream os;
    os.precision(17);
    os << "Fourier certificate for d=" << d.value() << ": |det| = " << cert.det_magnitude
       << " but closed form gives " << cert.expected_det_magnitude;
    throw ConsistencyError(os.str());
  }
  return cert;
}

bool is_fourier_coin(const CoinMatrix& coin, double tol) {
  const ComplexMatrix ref = fourier_coin(coin.dimension()).matrix();
  return (coin.matrix() - ref).cwiseAbs().maxCoeff() < tol;
}

EigenvectorSearchResult finite_support_eigenvector_search(const CoinMatrix& coin, Complex lambda,
                                                          int radius) {
  if (!(std::abs(std::abs(lambda) - 1.0) < 1e-6)) {
    std::ostringstream os;
    os << "lambda " << lambda << " is not on the unit circle";
    throw InvalidArgument(os.str());
  }
  if (radius < 0) throw InvalidArgument("radius must be >= 0");

  const TruncatedOperator op = dense_operator(coin, radius);
  const std::size_t cols = op.source.basis_size();

  // A = U|box(r) -> box(r+1)  minus  lambda * inclusion(box(r) -> box(r+1))
  const int n = coin.dimension().internal_size();
  Eigen::SparseMatrix<Complex> inclusion(op.matrix.rows(), op.matrix.cols());
  {
    std::vector<Eigen::Triplet<Complex>> ones;
    ones.reserve(cols);
    for (std::size_t s = 0; s < op.source.site_count(); ++s) {
      const std::size_t t = *op.target.site_index(op.source.site(s));
      for (int c = 0; c < n; ++c) {
        ones.emplace_back(static_cast<int>(op.target.basis_index(t, c)),
                          static_cast<int>(op.source.basis_index(s, c)), Complex(1.0, 0.0));
      }
    }
    inclusion.setFromTriplets(ones.begin(), ones.end());
  }
  const Eigen::SparseMatrix<Complex> a_sparse = op.matrix - lambda * inclusion;

  EigenvectorSearchResult result;
  result.lambda = lambda;
  result.radius = radius;
  if (nullspace_screen_rules_out(a_sparse)) return result;

  if (cols > kMaxSearchColumns) {
    throw ResourceError("eigenvector search on " + std::to_string(cols) +
                        " unknowns exceeds the dense SVD limit of " +
                        std::to_string(kMaxSearchColumns));
  }

  const ComplexMatrix a(a_sparse);
  Eigen::BDCSVD<ComplexMatrix> svd(a, Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD failed in eigenvector search");
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = kNullspaceTol * (sv.size() ? sv(0) : 0.0);

  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) >= cutoff) continue;
    Eigen::VectorXcd v = svd.matrixV().col(i);
    canonicalize_phase(v);
    LatticeState psi = devectorize(v, op.source);
    LatticeState r = step(psi, coin) - lambda * psi;
    result.residuals.push_back(state_norm(r) / state_norm(psi));
    result.basis.push_back(std::move(psi));
  }
  result.nullspace_dimension = static_cast<int>(result.basis.size());
  return result;
}

double projection_residual(const LatticeState& psi, const std::vector<LatticeState>& basis) {
  const double norm = state_norm(psi);
  if (!(norm > 0.0)) throw InvalidArgument("projection of the zero state");
  LatticeState rest = psi;
  for (const auto& b : basis) {
    Complex overlap(0.0, 0.0);
    for (const auto& [x, v] : b) overlap += v.dot(psi.at(x));  // <b, psi>
    rest = rest - overlap * b;
  }
  return state_norm(rest) / norm;
}

std::string to_string(LocalizationStatus s) {
  switch (s) {
    case LocalizationStatus::no_localization: return "no_localization";
    case LocalizationStatus::localization: return "localization";
    case LocalizationStatus::unknown: return "unknown";
  }
  return "unknown";
}

LocalizationVerdict decide(const CoinMatrix& coin, const ScanParameters& scan, int radius_budget) {
  if (radius_budget < 0) throw InvalidArgument("radius budget must be >= 0");
  LocalizationVerdict verdict;
  verdict.rank_report = necessary_condition_test(coin);

  if (is_fourier_coin(coin)) {
    verdict.certificate = fourier_certificate(coin.dimension());
    const auto& cert_sel = verdict.certificate->selector;
    bool listed = false;
    for (const auto& row : verdict.rank_report.rank_table) {
      if (row.selector == cert_sel) listed = row.rank == coin.dimension().value();
    }
    if (!listed) throw ConsistencyError("certificate selector is not full rank in the rank table");
    verdict.status = LocalizationStatus::no_localization;
    verdict.witness = cert_sel;
    return verdict;
  }

  if (verdict.rank_report.full_rank_witness) {
    verdict.status = LocalizationStatus::no_localization;
    verdict.witness = *verdict.rank_report.full_rank_witness;
    return verdict;
  }

  verdict.scan = constant_eigenvalue_scan(coin, scan.grid, scan.tolerance);
  for (const auto& candidate : verdict.scan->constant_eigenvalues) {
    // Project the candidate onto the unit circle; scan noise is ~1e-15.
    const Complex lambda = candidate.lambda / std::abs(candidate.lambda);
    for (int r = 0; r <= radius_budget; ++r) {
      verdict.searches.push_back(finite_support_eigenvector_search(coin, lambda, r));
      const auto& found = verdict.searches.back();
      if (found.nullspace_dimension > 0 && found.residuals.front() < kEigenResidualTol) {
        verdict.status = LocalizationStatus::localization;
        verdict.witness = EigenvectorWitness{lambda, found.basis.front(), found.residuals.front()};
        return verdict;
      }
    }
  }
  verdict.status = LocalizationStatus::unknown;
  return verdict;
}

// ---------------------------------------------------------------------------
// JSON

Json rank_table_to_json(const NecessaryConditionReport& report) {
  Json rows = Json::array();
  for (const auto& e : report.rank_table) {
    rows.push_back(Json{{"ell", e.selector.bits()}, {"singular_values", e.singular_values}, {"rank", e.rank}});
  }
  return rows;
}

Json certificate_to_json(const FourierCertificate& cert) {
  return Json{{"d", cert.d},
              {"parity", cert.parity == Parity::odd ? "odd" : "even"},
              {"ell", cert.selector.bits()},
              {"rank", cert.rank},
              {"min_singular_value", cert.min_singular_value},
              {"det_magnitude", cert.det_magnitude},
              {"expected_det_magnitude", cert.expected_det_magnitude}};
}

Json verdict_to_json(const LocalizationVerdict& verdict, const std::string& coin_name,
                     const std::string& state_file) {
  Json witness = nullptr;
  if (const auto* sel = std::get_if<SubmatrixSelector>(&verdict.witness)) {
    witness = Json{{"ell", sel->bits()}};
  } else if (const auto* ev = std::get_if<EigenvectorWitness>(&verdict.witness)) {
    witness = Json{{"lambda", complex_to_json(ev->lambda)}, {"residual", ev->residual}};
    if (state_file.empty()) {
      witness["state_file"] = nullptr;
      witness["state"] = state_to_json(ev->state);
    } else {
      witness["state_file"] = state_file;
    }
  }

  Json searches = Json::array();
  for (const auto& s : verdict.searches) {
    searches.push_back(Json{{"lambda", complex_to_json(s.lambda)},
                            {"radius", s.radius},
                            {"nullspace_dimension", s.nullspace_dimension},
                            {"residuals", s.residuals}});
  }

  return Json{{"coin", coin_name},
              {"d", verdict.rank_report.d},
              {"status", to_string(verdict.status)},
              {"witness", std::move(witness)},
              {"rank_table", rank_table_to_json(verdict.rank_report)},
              {"certificate", verdict.certificate ? certificate_to_json(*verdict.certificate) : Json(nullptr)},
              {"scan", verdict.scan ? scan_report_to_json(*verdict.scan, coin_name) : Json(nullptr)},
              {"searches", std::move(searches)}};
}

}  // namespace qwalk
