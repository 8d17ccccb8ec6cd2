#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "core/datagen.hpp"
#include "core/errors.hpp"
#include "core/integrate.hpp"
#include "core/rng.hpp"

using namespace epochdd;

namespace {

SpectralDataset small_exact(std::uint64_t seed = 7,
                            const Eigen::MatrixXd* noise = nullptr) {
    Eigen::VectorXd lambda(4), sigma(3), rho(3);
    lambda << 1.0, 1.5, 0.7, 1.2;
    sigma << 2.5, 1.8, 1.1;
    rho << 0.5, 0.0, 0.8;
    return synthesize_exact(24, 4, 3, lambda, sigma, rho, seed, noise);
}

}  // namespace

TEST_CASE("exact construction satisfies the spectral identities") {
    SpectralDataset ds = small_exact();
    double n = ds.n;
    Eigen::MatrixXd lhs = ds.X / std::sqrt(n);
    Eigen::MatrixXd rhs =
        ds.U * ds.lambda.cwiseSqrt().asDiagonal() * ds.V.transpose();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);

    Eigen::MatrixXd Sigma_rect = Eigen::MatrixXd::Zero(3, 4);
    for (int i = 0; i < 3; ++i) Sigma_rect(i, i) = ds.sigma[i];
    Eigen::MatrixXd cross = ds.Y.transpose() * ds.X / n;
    CHECK((cross - ds.U_yx * Sigma_rect * ds.V.transpose())
              .cwiseAbs()
              .maxCoeff() <= 1e-10);

    Eigen::MatrixXd cov = ds.X.transpose() * ds.X / n;
    CHECK((cov - ds.V * ds.lambda.asDiagonal() * ds.V.transpose())
              .cwiseAbs()
              .maxCoeff() <= 1e-10);

    CHECK((ds.U.transpose() * ds.U - Eigen::MatrixXd::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    CHECK((ds.V.transpose() * ds.V - Eigen::MatrixXd::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    CHECK(ds.misalignment <= 1e-12);
}

TEST_CASE("true synaptic weights land at (1 - rho) sigma / lambda") {
    SpectralDataset ds = small_exact();
    Eigen::MatrixXd Zbar = true_synaptic_weights(ds);
    CHECK(Zbar(0, 0) == doctest::Approx(0.5 * 2.5 / 1.0).epsilon(1e-12));
    CHECK(Zbar(1, 1) == doctest::Approx(1.8 / 1.5).epsilon(1e-12));    // rho 0
    CHECK(Zbar(2, 2) == doctest::Approx(0.2 * 1.1 / 0.7).epsilon(1e-12));
    // off-diagonal mass is zero in exact mode
    for (int i = 0; i < Zbar.rows(); ++i)
        for (int j = 0; j < Zbar.cols(); ++j)
            if (i != j) CHECK(std::fabs(Zbar(i, j)) <= 1e-12);
}

TEST_CASE("rotated-noise identity reproduces the true weights") {
    SpectralDataset ds = small_exact();
    Eigen::MatrixXd E = ds.Y - ds.X * ds.Wbar.transpose();
    Eigen::MatrixXd Et =
        ds.U.transpose() * E * ds.U_yx / std::sqrt(static_cast<double>(ds.n));
    Eigen::MatrixXd Zbar = true_synaptic_weights(ds);
    for (int i = 0; i < 3; ++i) {
        double expect =
            ds.sigma[i] / ds.lambda[i] - Et(i, i) / std::sqrt(ds.lambda[i]);
        CHECK(std::fabs(Zbar(i, i) - expect) <= 1e-10);
        CHECK(Et(i, i) == doctest::Approx(ds.noise_diag[i]).epsilon(1e-9));
    }
}

TEST_CASE("zero eigenvalue modes are excluded via the pseudoinverse rule") {
    Eigen::VectorXd lambda(3), sigma(3), rho(3);
    lambda << 1.0, 0.0, 1.2;
    sigma << 2.0, 0.0, 1.0;
    rho << 0.5, 0.0, 0.5;
    SpectralDataset ds = synthesize_exact(16, 3, 3, lambda, sigma, rho, 11);
    Eigen::MatrixXd Zbar = true_synaptic_weights(ds);
    CHECK(std::fabs(Zbar(1, 1)) <= 1e-12);
    CHECK(ds.noise_diag[1] == 0.0);
}

TEST_CASE("rank violations are rejected") {
    Eigen::VectorXd lambda(3), sigma(3), rho(3);
    lambda << 1.0, 0.0, 1.2;
    sigma << 2.0, 0.5, 1.0;  // sigma > 0 where lambda = 0
    rho << 0.5, 0.0, 0.5;
    CHECK_THROWS_AS(
        (void)synthesize_exact(16, 3, 3, lambda, sigma, rho, 11), Error);
}

TEST_CASE("spectral init decouples the synaptic weights") {
    SpectralDataset ds = small_exact();
    InitSpec init;
    init.h = 3;
    Rng rng(3);
    Eigen::MatrixXd R = random_orthonormal(3, 3, rng);
    for (int i = 0; i < 3; ++i) init.r_vectors.push_back(R.col(i));
    init.a0 = {0.2, 0.1, 0.3};
    init.b0 = {0.05, 0.4, 0.1};
    auto [W1, W2] = spectral_init(ds, init);
    CHECK(W1.rows() == 3);
    CHECK(W1.cols() == 4);
    Eigen::MatrixXd Z0 = ds.U_yx.transpose() * W2 * W1 * ds.V;
    for (int i = 0; i < Z0.rows(); ++i)
        for (int j = 0; j < Z0.cols(); ++j) {
            if (i == j && i < 3)
                CHECK(Z0(i, j) ==
                      doctest::Approx(init.a0[static_cast<std::size_t>(i)] *
                                      init.b0[static_cast<std::size_t>(i)])
                          .epsilon(1e-12));
            else
                CHECK(std::fabs(Z0(i, j)) <= 1e-12);
        }
}

TEST_CASE("all-zero directions pin the weights at zero") {
    SpectralDataset ds = small_exact();
    InitSpec init;
    init.h = 2;
    init.r_vectors = {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)};
    init.a0 = {0.5, 0.5};
    init.b0 = {0.5, 0.5};
    auto [W1, W2] = spectral_init(ds, init);
    CHECK(W1.norm() == 0.0);
    CHECK(W2.norm() == 0.0);
}

TEST_CASE("undercomplete hidden layer bounds the rank") {
    SpectralDataset ds = small_exact();
    InitSpec init;
    init.h = 2;
    Eigen::VectorXd r0(2), r1(2);
    r0 << 1.0, 0.0;
    r1 << 0.0, 1.0;
    init.r_vectors = {r0, r1};
    init.a0 = {0.3, 0.2};
    init.b0 = {0.1, 0.4};
    auto [W1, W2] = spectral_init(ds, init);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(W2 * W1);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-12) ++rank;
    CHECK(rank <= 2);
}

TEST_CASE("non-orthogonal directions are an init error") {
    SpectralDataset ds = small_exact();
    InitSpec init;
    init.h = 2;
    Eigen::VectorXd r0(2), r1(2);
    r0 << 1.0, 0.0;
    r1 << std::sqrt(0.5), std::sqrt(0.5);
    init.r_vectors = {r0, r1};
    init.a0 = {0.3, 0.2};
    init.b0 = {0.1, 0.4};
    CHECK_THROWS_AS((void)spectral_init(ds, init), Error);
}

TEST_CASE("sampled mode basics") {
    SUBCASE("zero truth gives zero outputs") {
        Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3);
        Eigen::MatrixXd Wbar = Eigen::MatrixXd::Zero(2, 3);
        Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(2, 2);
        SpectralDataset ds = synthesize_sampled(12, 3, 2, cov, Wbar, noise, 5);
        CHECK(ds.Y.norm() == 0.0);
        CHECK(ds.sigma.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("empirical eigenvalues approach the truth") {
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
        cov << 2.0, 0.3, 0.3, 0.5;
        Eigen::MatrixXd Wbar = Eigen::MatrixXd::Random(2, 2);
        Eigen::MatrixXd noise = 0.01 * Eigen::MatrixXd::Identity(2, 2);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        double worst = 0.0;
        int n = 20000;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            SpectralDataset ds =
                synthesize_sampled(n, 2, 2, cov, Wbar, noise, seed);
            Eigen::VectorXd emp = ds.lambda;
            std::sort(emp.data(), emp.data() + emp.size());
            Eigen::VectorXd truth = es.eigenvalues();
            worst = std::max(worst, (emp - truth).cwiseAbs().maxCoeff());
        }
        CHECK(worst <= 8.0 / std::sqrt(static_cast<double>(n)));
    }
    SUBCASE("non-PSD covariance is rejected") {
        Eigen::MatrixXd cov(2, 2);
        cov << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
        CHECK_THROWS_AS((void)synthesize_sampled(
                            8, 2, 2, cov, Eigen::MatrixXd::Zero(2, 2),
                            Eigen::MatrixXd::Zero(2, 2), 1),
                        Error);
    }
}

TEST_CASE("export and import round-trip bit-exactly") {
    SpectralDataset ds = small_exact(99);
    auto dir = std::filesystem::temp_directory_path() / "epochdd_ds_test";
    std::filesystem::remove_all(dir);
    export_dataset(ds, dir);
    SpectralDataset back = import_dataset(dir);
    CHECK(back.construction == "exact");
    CHECK(back.seed == 99);
    CHECK((back.X - ds.X).norm() == 0.0);
    CHECK((back.Y - ds.Y).norm() == 0.0);
    CHECK((back.Wbar - ds.Wbar).norm() == 0.0);
    CHECK((back.U_yx - ds.U_yx).norm() == 0.0);
    CHECK(back.misalignment == ds.misalignment);
    // re-imported exact data stays aligned
    CHECK(back.misalignment <= 1e-10);
    std::filesystem::remove_all(dir);
}

TEST_CASE("generation is deterministic in the seed") {
    SpectralDataset a = small_exact(1234);
    SpectralDataset b = small_exact(1234);
    CHECK((a.X - b.X).norm() == 0.0);
    CHECK((a.Y - b.Y).norm() == 0.0);
}
