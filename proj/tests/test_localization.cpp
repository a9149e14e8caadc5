#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qwalk/evolve.hpp"
#include "qwalk/localization.hpp"

using namespace qwalk;

namespace {

CoinMatrix swap_coin() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return CoinMatrix(Dimension(1), m, 1e-12);
}

std::vector<Complex> distinct_eigenvalues_at_zero(const CoinMatrix& coin) {
  std::vector<Complex> out;
  for (Complex z : spectrum(coin, MomentumPoint::zero(coin.dimension()))) {
    bool seen = false;
    for (Complex w : out) seen = seen || std::abs(w - z) < 1e-8;
    if (!seen) out.push_back(z / std::abs(z));
  }
  return out;
}

}  // namespace

TEST_CASE("coin_submatrix picks rows and columns 2j + ell_j") {
  const CoinMatrix c = fourier_coin(3);
  const CoinSubmatrix s = coin_submatrix(c, SubmatrixSelector({0, 1, 0}));
  const int idx[3] = {0, 3, 4};
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) CHECK(s.matrix(j, k) == c(idx[j], idx[k]));
  }
  CHECK_THROWS_AS(coin_submatrix(c, SubmatrixSelector({0, 1})), InvalidArgument);
}

TEST_CASE("Grover submatrix for ell=(0,1) has rank 1") {
  const CoinSubmatrix s = coin_submatrix(grover_coin_2d(), SubmatrixSelector({0, 1}));
  ComplexMatrix expected(2, 2);
  expected << -0.5, 0.5, 0.5, -0.5;
  CHECK(s.matrix == expected);
  // 2x2 determinant (-1)(-1) - (1)(1) = 0.
  CHECK(std::abs(testing::leibniz_determinant(s.matrix)) == 0.0);
  CHECK(s.rank == 1);
  CHECK(s.singular_values.size() == 2);
  CHECK(s.singular_values[0] >= s.singular_values[1]);
}

TEST_CASE("all-zero selector gives the even principal submatrix") {
  std::mt19937_64 rng(9);
  const CoinMatrix c(Dimension(3), testing::random_unitary(6, rng), 1e-10);
  const CoinSubmatrix s = coin_submatrix(c, SubmatrixSelector({0, 0, 0}));
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) CHECK(s.matrix(j, k) == c(2 * j, 2 * k));
  }
}

TEST_CASE("submatrix extraction is exact for random coins and selectors") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 200; ++t) {
    const Dimension d(1 + t % 5);
    const CoinMatrix c(d, testing::random_unitary(d.internal_size(), rng), 1e-10);
    std::uniform_int_distribution<std::uint64_t> pick(0, (1u << d.value()) - 1);
    const SubmatrixSelector ell = SubmatrixSelector::from_index(d, pick(rng));
    const auto s = coin_submatrix(c, ell);
    const auto idx = ell.indices();
    for (int j = 0; j < d.value(); ++j) {
      for (int k = 0; k < d.value(); ++k) {
        REQUIRE(s.matrix(j, k) == c(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(k)]));
      }
    }
  }
}

TEST_CASE("rank is invariant under nonzero complex scaling") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const CoinSubmatrix s = coin_submatrix(grover_coin_2d(), SubmatrixSelector::from_index(Dimension(2), t % 4));
    Complex alpha = testing::random_unit_disc(rng);
    if (std::abs(alpha) < 1e-3) alpha = 1.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(alpha * s.matrix);
    std::vector<double> sv(svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size());
    REQUIRE(numerical_rank(sv) == s.rank);
  }
  // Fourier full-rank selectors stay full rank.
  const auto f = coin_submatrix(fourier_coin(3), SubmatrixSelector({0, 0, 0}));
  Eigen::JacobiSVD<ComplexMatrix> svd(Complex(0.01, -0.2) * f.matrix);
  std::vector<double> sv(svd.singularValues().data(), svd.singularValues().data() + 3);
  CHECK(numerical_rank(sv) == 3);
}

TEST_CASE("numerical_rank uses max(sigma_max, 1)") {
  CHECK(numerical_rank({1.0, 0.5, 1e-11}) == 2);
  CHECK(numerical_rank({1e-3, 1e-11}) == 1);
  CHECK(numerical_rank({1e-12}) == 0);
  CHECK(numerical_rank({100.0, 1e-9}) == 1);
}

TEST_CASE("necessary condition on Grover 2D is inconclusive") {
  const auto report = necessary_condition_test(grover_coin_2d());
  REQUIRE(report.rank_table.size() == 4);
  for (const auto& row : report.rank_table) {
    CHECK(row.rank == 1);
    CHECK(row.singular_values[1] < 1e-12);
    CHECK(std::abs(testing::leibniz_determinant(row.matrix)) < 1e-15);
  }
  CHECK_FALSE(report.rules_out_localization());
  // ell=(0,0) reads rows/columns {0,2}: (1/2)[[-1,1],[1,-1]].
  ComplexMatrix expected(2, 2);
  expected << -0.5, 0.5, 0.5, -0.5;
  CHECK(report.rank_table[0].matrix == expected);
}

TEST_CASE("necessary condition on Fourier 2D rules localization out via ell=(0,1)") {
  const auto report = necessary_condition_test(fourier_coin(2));
  REQUIRE(report.rules_out_localization());
  CHECK(*report.full_rank_witness == SubmatrixSelector({0, 1}));
  CHECK(report.rank_table[0].rank == 1);
  CHECK(report.rank_table[1].rank == 2);
}

TEST_CASE("necessary condition on Hadamard") {
  const auto report = necessary_condition_test(hadamard_coin());
  REQUIRE(report.rules_out_localization());
  CHECK(*report.full_rank_witness == SubmatrixSelector({0}));
  CHECK(std::abs(report.rank_table[0].matrix(0, 0) - 1.0 / std::numbers::sqrt2) < 1e-15);
}

TEST_CASE("necessary condition guard") {
  CHECK_THROWS_AS(necessary_condition_test(fourier_coin(21)), ResourceError);
}

TEST_CASE("Fourier certificates, hand-computed cases") {
  const auto c1 = fourier_certificate(Dimension(1));
  CHECK(c1.selector == SubmatrixSelector({0}));
  CHECK(std::abs(c1.det_magnitude - 1.0 / std::numbers::sqrt2) < 1e-15);

  // c00 = c03 = c30 = 1/2, c33 = i/2 -> |(i - 1)/4| = sqrt(2)/4
  const auto c2 = fourier_certificate(Dimension(2));
  CHECK(c2.selector == SubmatrixSelector({0, 1}));
  CHECK(c2.parity == Parity::even);
  CHECK(std::abs(c2.det_magnitude - std::numbers::sqrt2 / 4) < 1e-15);

  // Rows are a permutation of the DFT_3 rows scaled by 6^{-1/2}:
  // 3^{3/2} / 6^{3/2} = 2^{-3/2}.
  const auto c3 = fourier_certificate(Dimension(3));
  CHECK(c3.selector == SubmatrixSelector({0, 0, 0}));
  CHECK(c3.parity == Parity::odd);
  CHECK(c3.det_magnitude == doctest::Approx(0.35355339).epsilon(1e-8));
}

TEST_CASE("Fourier certificates agree with the Leibniz determinant for d <= 6") {
  for (int d = 1; d <= 6; ++d) {
    const auto cert = fourier_certificate(Dimension(d));
    CHECK(cert.rank == d);
    CHECK(cert.min_singular_value > 1e-3);
    const auto sub = coin_submatrix(fourier_coin(d), cert.selector);
    const double brute = std::abs(testing::leibniz_determinant(sub.matrix));
    CHECK(std::abs(brute - cert.det_magnitude) < 1e-12);
    CHECK(std::abs(brute - cert.expected_det_magnitude) < 1e-9);
  }
  CHECK(fourier_selector(Dimension(4)) == SubmatrixSelector({0, 0, 1, 1}));
  CHECK(fourier_selector(Dimension(6)) == SubmatrixSelector({0, 0, 0, 1, 1, 1}));
}

TEST_CASE("is_fourier_coin") {
  CHECK(is_fourier_coin(fourier_coin(4)));
  CHECK(is_fourier_coin(hadamard_coin()));
  CHECK_FALSE(is_fourier_coin(grover_coin_2d()));
}

TEST_CASE("eigenvector search finds the Grover stationary state") {
  const CoinMatrix g = grover_coin_2d();
  for (int radius = 1; radius <= 2; ++radius) {
    const auto r = finite_support_eigenvector_search(g, Complex(1, 0), radius);
    REQUIRE(r.nullspace_dimension >= 1);
    CHECK(r.basis.size() == static_cast<std::size_t>(r.nullspace_dimension));
    for (double res : r.residuals) CHECK(res < 1e-9);
    for (const auto& psi : r.basis) {
      CHECK(std::abs(state_norm(psi) - 1.0) < 1e-12);
      for (const auto& x : psi.support()) CHECK(x.linf_norm() <= radius);
    }
    CHECK(projection_residual(grover_stationary_state(), r.basis) < 1e-10);
  }
  const auto r0 = finite_support_eigenvector_search(g, Complex(1, 0), 0);
  CHECK(r0.nullspace_dimension == 0);
}

TEST_CASE("eigenvector search is empty for Fourier walks") {
  for (int d = 1; d <= 2; ++d) {
    const CoinMatrix c = fourier_coin(d);
    for (Complex lambda : distinct_eigenvalues_at_zero(c)) {
      for (int radius = 0; radius <= 3; ++radius) {
        REQUIRE(finite_support_eigenvector_search(c, lambda, radius).nullspace_dimension == 0);
      }
    }
  }
}

TEST_CASE("Hadamard truncated operator has full column rank, by direct SVD") {
  // Oracle independent of the Cholesky screen: singular values of the
  // explicit radius-3 matrix for every eigenvalue of U^(0).
  const CoinMatrix h = hadamard_coin();
  const TruncatedOperator op = dense_operator(h, 3);
  for (Complex lambda : distinct_eigenvalues_at_zero(h)) {
    ComplexMatrix a(op.matrix);
    for (std::size_t s = 0; s < op.source.site_count(); ++s) {
      const std::size_t t = *op.target.site_index(op.source.site(s));
      for (int c = 0; c < 2; ++c) {
        a(static_cast<Eigen::Index>(op.target.basis_index(t, c)),
          static_cast<Eigen::Index>(op.source.basis_index(s, c))) -= lambda;
      }
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    const auto& sv = svd.singularValues();
    CHECK(sv(sv.size() - 1) > 1e-3 * sv(0));
    CHECK(finite_support_eigenvector_search(h, lambda, 3).nullspace_dimension == 0);
  }
}

TEST_CASE("rank certificate and eigenvector search never disagree on Fourier d=3") {
  const CoinMatrix c = fourier_coin(3);
  REQUIRE(necessary_condition_test(c).rules_out_localization());
  for (Complex lambda : distinct_eigenvalues_at_zero(c)) {
    for (int radius = 0; radius <= 3; ++radius) {
      REQUIRE(finite_support_eigenvector_search(c, lambda, radius).nullspace_dimension == 0);
    }
  }
}

TEST_CASE("eigenvector search argument checks") {
  CHECK_THROWS_AS(finite_support_eigenvector_search(grover_coin_2d(), Complex(2, 0), 1), InvalidArgument);
  CHECK_THROWS_AS(finite_support_eigenvector_search(grover_coin_2d(), Complex(1, 0), -1), InvalidArgument);
  CHECK_THROWS_AS(finite_support_eigenvector_search(fourier_coin(6), Complex(1, 0), 2), ResourceError);
  // Grover has a flat band, so the screen cannot help and the dense SVD guard applies.
  CHECK_THROWS_AS(finite_support_eigenvector_search(grover_coin_2d(), Complex(1, 0), 40), ResourceError);
}

TEST_CASE("decide on Fourier coins") {
  for (int d = 1; d <= 6; ++d) {
    const auto v = decide(fourier_coin(d), ScanParameters{}, 2);
    REQUIRE(v.status == LocalizationStatus::no_localization);
    const auto* sel = std::get_if<SubmatrixSelector>(&v.witness);
    REQUIRE(sel != nullptr);
    CHECK(*sel == fourier_selector(Dimension(d)));
    REQUIRE(v.certificate.has_value());
    // Independent re-check of the witness: |det| > 1e-9 by permutation expansion.
    const auto sub = coin_submatrix(fourier_coin(d), *sel);
    CHECK(std::abs(testing::leibniz_determinant(sub.matrix)) > 1e-9);
  }
}

TEST_CASE("decide on Grover 2D") {
  const auto v = decide(grover_coin_2d(), ScanParameters{}, 2);
  REQUIRE(v.status == LocalizationStatus::localization);
  const auto* w = std::get_if<EigenvectorWitness>(&v.witness);
  REQUIRE(w != nullptr);
  CHECK(std::abs(w->lambda - 1.0) < 1e-12);
  CHECK(w->residual < 1e-9);
  const LatticeState& psi = w->state;
  CHECK(state_norm(step(psi, grover_coin_2d()) - w->lambda * psi) / state_norm(psi) < 1e-9);
  // lambda sits in every U^(k) spectrum on a 16^2 grid.
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      const MomentumPoint k({2 * std::numbers::pi * a / 16, 2 * std::numbers::pi * b / 16});
      REQUIRE(distance_to_spectrum(w->lambda, spectrum(grover_coin_2d(), k)) < 1e-8);
    }
  }
  CHECK_FALSE(v.certificate.has_value());
}

TEST_CASE("decide on the swap coin") {
  // Both 1x1 submatrices vanish, so the rank test is silent. U^(k) is
  // off-diagonal with eigenvalues +-1 at every k, and the pipeline finds a
  // radius-1 eigenvector (frozen from the first run).
  const auto report = necessary_condition_test(swap_coin());
  CHECK(report.rank_table[0].rank == 0);
  CHECK(report.rank_table[1].rank == 0);
  const auto v = decide(swap_coin(), ScanParameters{}, 2);
  REQUIRE(v.status == LocalizationStatus::localization);
  const auto* w = std::get_if<EigenvectorWitness>(&v.witness);
  REQUIRE(w != nullptr);
  CHECK(w->residual < 1e-9);
  CHECK(v.searches.back().radius == 1);
}

TEST_CASE("decide on a random unitary reports no_localization") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 10; ++t) {
    const Dimension d(1 + t % 3);
    const CoinMatrix c(d, testing::random_unitary(d.internal_size(), rng), 1e-10);
    const auto v = decide(c, ScanParameters{8, 1e-8}, 1);
    REQUIRE(v.status == LocalizationStatus::no_localization);
    const auto* sel = std::get_if<SubmatrixSelector>(&v.witness);
    REQUIRE(sel != nullptr);
    CHECK(std::abs(testing::leibniz_determinant(coin_submatrix(c, *sel).matrix)) > 1e-9);
  }
}

TEST_CASE("verdict JSON") {
  const auto v = decide(fourier_coin(3), ScanParameters{}, 2);
  const Json j = verdict_to_json(v, "fourier:3", "");
  CHECK(j["status"] == "no_localization");
  CHECK(j["witness"]["ell"] == Json::array({0, 0, 0}));
  CHECK(j["rank_table"].size() == 8);
  CHECK(j["certificate"]["parity"] == "odd");

  const auto g = decide(grover_coin_2d(), ScanParameters{}, 2);
  const Json jg = verdict_to_json(g, "grover2d", "");
  CHECK(jg["status"] == "localization");
  CHECK(jg["witness"]["state_file"].is_null());
  CHECK(state_from_json(jg["witness"]["state"]) == std::get<EigenvectorWitness>(g.witness).state);
  CHECK(verdict_to_json(g, "grover2d", "w.json")["witness"]["state_file"] == "w.json");
  CHECK(jg["certificate"].is_null());
}
