#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "modes.hpp"
#include "rng.hpp"

namespace epochdd {

// Synthetic training set whose input and input-output covariances carry a
// prescribed spectral structure:
//   X / sqrt(n)   = U Lambda^{1/2} V^T,
//   Y^T X / n     = U_yx Sigma V^T      (shared right singular vectors),
// together with the generating truth (Wbar, covariances, noise diagonal).
struct SpectralDataset {
    Eigen::MatrixXd X;           // n x d_x
    Eigen::MatrixXd Y;           // n x d_y
    int n = 0, d_x = 0, d_y = 0;
    Eigen::MatrixXd U;           // n x d_x, orthonormal columns
    Eigen::MatrixXd V;           // d_x x d_x, orthogonal
    Eigen::MatrixXd U_yx;        // d_y x m, orthonormal columns, m = min(d_x, d_y)
    Eigen::VectorXd lambda;      // d_x eigenvalues of X^T X / n
    Eigen::VectorXd sigma;       // m singular values of Y^T X / n
    Eigen::MatrixXd Wbar;        // d_y x d_x true weights
    Eigen::VectorXd noise_diag;  // m diagonal entries of the rotated noise
    Eigen::MatrixXd noise_cov;   // d_y x d_y PSD
    Eigen::MatrixXd true_cov;    // d_x x d_x PSD
    std::string construction;    // "exact" | "sampled"
    std::uint64_t seed = 0;
    // Residual off-diagonal mass of (Y^T X / n * V); zero when the shared
    // right-singular-vector structure holds exactly.
    double misalignment = 0.0;

    int m() const { return static_cast<int>(sigma.size()); }
};

// Decoupled spectral initialisation: h-dimensional unit vectors r_i, pairwise
// orthogonal (zero vectors allowed to pin a diagonal weight at 0), with
// per-mode scalar inits a0_i, b0_i.
struct InitSpec {
    int h = 0;
    std::vector<Eigen::VectorXd> r_vectors;
    std::vector<double> a0;
    std::vector<double> b0;
};

// Builds (X, Y) realizing the spectral structure to machine precision. The
// rotated-noise diagonal is chosen as rho_i sigma_i / sqrt(lambda_i) so that
// the true synaptic weights come out at (1 - rho_i) sigma_i / lambda_i.
// An optional noise covariance only affects the generative test model.
SpectralDataset synthesize_exact(int n, int d_x, int d_y,
                                 const Eigen::VectorXd& lambda_diag,
                                 const Eigen::VectorXd& sigma_diag,
                                 const Eigen::VectorXd& rho_diag,
                                 std::uint64_t seed,
                                 const Eigen::MatrixXd* noise_cov = nullptr);

// Draws rows x ~ N(0, true_cov), eps ~ N(0, noise_cov), y = x Wbar^T + eps
// and extracts the empirical spectral structure by SVD. The shared
// right-singular-vector property holds only approximately; the gap is
// recorded in `misalignment`.
SpectralDataset synthesize_sampled(int n, int d_x, int d_y,
                                   const Eigen::MatrixXd& true_cov,
                                   const Eigen::MatrixXd& Wbar,
                                   const Eigen::MatrixXd& noise_cov,
                                   std::uint64_t seed);

// Layer matrices (W1, W2) with W1 V having columns a0_i r_i and
// U_yx^T W2 having rows b0_i r_i^T, so Z(0) is diagonal with entries
// a0_i b0_i.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> spectral_init(
    const SpectralDataset& ds, const InitSpec& init);

// Z_bar = U_yx^T Wbar V (m x d_x).
Eigen::MatrixXd true_synaptic_weights(const SpectralDataset& ds);

// Synaptic rotation of an arbitrary weight matrix: U_yx^T W V.
Eigen::MatrixXd to_synaptic(const SpectralDataset& ds,
                            const Eigen::MatrixXd& W);

// Per-mode parameters implied by the dataset spectra and an (a0, b0) init.
std::vector<ModeParams> dataset_modes(const SpectralDataset& ds,
                                      const InitSpec& init, double eta_a,
                                      double eta_b);

// Directory export: one binary file per matrix (small text header with
// shape/dtype/role, then row-major little-endian float64) plus
// manifest.json. Import validates the header and manifest.
void export_dataset(const SpectralDataset& ds,
                    const std::filesystem::path& dir);
SpectralDataset import_dataset(const std::filesystem::path& dir);

// Random orthogonal basis helpers (seeded Gaussian + QR, sign-fixed so the
// first nonzero entry of every column is positive).
Eigen::MatrixXd random_orthonormal(int rows, int cols, Rng& rng);

}  // namespace epochdd
