#include "datagen.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "errors.hpp"

namespace epochdd {

namespace {

using json = nlohmann::json;

Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
    Eigen::MatrixXd out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out(r, c) = rng.gaussian();
    return out;
}

void sign_fix_columns(Eigen::MatrixXd& Q) {
    for (int c = 0; c < Q.cols(); ++c) {
        for (int r = 0; r < Q.rows(); ++r) {
            double v = Q(r, c);
            if (std::fabs(v) > 1e-12) {
                if (v < 0.0) Q.col(c) = -Q.col(c);
                break;
            }
        }
    }
}

// Symmetric PSD square root; throws CovarianceError on indefinite input.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& A, const char* what) {
    if (A.rows() != A.cols())
        fail(ErrorKind::Covariance, std::string(what) + " must be square");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + A.cwiseAbs().maxCoeff()))
        fail(ErrorKind::Covariance, std::string(what) + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    if (es.eigenvalues().minCoeff() < -1e-10 * top)
        fail(ErrorKind::Covariance,
             std::string(what) + " has a negative eigenvalue");
    Eigen::VectorXd sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
}

double misalignment_score(const Eigen::MatrixXd& Syx,
                          const Eigen::MatrixXd& V) {
    Eigen::MatrixXd K = Syx * V;
    Eigen::MatrixXd G = K.transpose() * K;
    double off = 0.0, dia = 0.0;
    for (int i = 0; i < G.rows(); ++i)
        for (int j = 0; j < G.cols(); ++j)
            (i == j ? dia : off) += G(i, j) * G(i, j);
    return std::sqrt(off) / std::max(std::sqrt(dia), 1e-300);
}

}  // namespace

Eigen::MatrixXd random_orthonormal(int rows, int cols, Rng& rng) {
    if (cols > rows)
        fail(ErrorKind::Parameter, "orthonormal basis needs cols <= rows");
    Eigen::MatrixXd G = gaussian_matrix(rows, cols, rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q =
        qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
    sign_fix_columns(Q);
    return Q;
}

SpectralDataset synthesize_exact(int n, int d_x, int d_y,
                                 const Eigen::VectorXd& lambda_diag,
                                 const Eigen::VectorXd& sigma_diag,
                                 const Eigen::VectorXd& rho_diag,
                                 std::uint64_t seed,
                                 const Eigen::MatrixXd* noise_cov) {
    int m = std::min(d_x, d_y);
    if (n < d_x) fail(ErrorKind::Parameter, "exact mode needs n >= d_x");
    if (d_x < 1 || d_y < 1) fail(ErrorKind::Parameter, "need d_x, d_y >= 1");
    if (lambda_diag.size() != d_x)
        fail(ErrorKind::Dimension, "lambda_diag must have d_x entries");
    if (sigma_diag.size() != m || rho_diag.size() != m)
        fail(ErrorKind::Dimension,
             "sigma_diag and rho_diag must have min(d_x, d_y) entries");
    for (int i = 0; i < d_x; ++i)
        if (lambda_diag[i] < 0.0)
            fail(ErrorKind::Parameter, "eigenvalues must be >= 0");
    for (int i = 0; i < m; ++i) {
        if (sigma_diag[i] < 0.0)
            fail(ErrorKind::Parameter, "singular values must be >= 0");
        if (rho_diag[i] < 0.0 || rho_diag[i] > 1.0)
            fail(ErrorKind::Parameter, "rho entries must lie in [0, 1]");
        if (sigma_diag[i] > 0.0 && lambda_diag[i] == 0.0)
            fail(ErrorKind::RankViolation,
                 "sigma > 0 requires lambda > 0 in the same mode");
    }

    Rng rng(seed);
    SpectralDataset ds;
    ds.n = n;
    ds.d_x = d_x;
    ds.d_y = d_y;
    ds.seed = seed;
    ds.construction = "exact";
    ds.U = random_orthonormal(n, d_x, rng);
    ds.V = random_orthonormal(d_x, d_x, rng);
    ds.U_yx = random_orthonormal(d_y, m, rng);
    ds.lambda = lambda_diag;
    ds.sigma = sigma_diag;

    double sqn = std::sqrt(static_cast<double>(n));
    ds.X = sqn * ds.U * lambda_diag.cwiseSqrt().asDiagonal() *
           ds.V.transpose();

    // Y = sqrt(n) U M^T with M = U_yx Sigma Lambda^{-1/2} (lambda > 0 modes)
    // gives Y^T X / n = U_yx Sigma V^T exactly.
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, d_x);
    Eigen::VectorXd zbar = Eigen::VectorXd::Zero(m);
    ds.noise_diag = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
        if (lambda_diag[i] > 0.0) {
            S(i, i) = sigma_diag[i] / std::sqrt(lambda_diag[i]);
            zbar[i] = (1.0 - rho_diag[i]) * sigma_diag[i] / lambda_diag[i];
            ds.noise_diag[i] =
                rho_diag[i] * sigma_diag[i] / std::sqrt(lambda_diag[i]);
        }
    }
    Eigen::MatrixXd M = ds.U_yx * S;  // d_y x d_x
    ds.Y = sqn * ds.U * M.transpose();

    Eigen::MatrixXd Zbar = Eigen::MatrixXd::Zero(m, d_x);
    for (int i = 0; i < m; ++i) Zbar(i, i) = zbar[i];
    ds.Wbar = ds.U_yx * Zbar * ds.V.transpose();

    ds.true_cov = ds.V * lambda_diag.asDiagonal() * ds.V.transpose();
    if (noise_cov) {
        (void)psd_sqrt(*noise_cov, "noise covariance");
        if (noise_cov->rows() != d_y)
            fail(ErrorKind::Dimension, "noise covariance must be d_y x d_y");
        ds.noise_cov = *noise_cov;
    } else {
        ds.noise_cov = Eigen::MatrixXd::Zero(d_y, d_y);
    }
    ds.misalignment =
        misalignment_score(ds.Y.transpose() * ds.X / static_cast<double>(n),
                           ds.V);
    return ds;
}

SpectralDataset synthesize_sampled(int n, int d_x, int d_y,
                                   const Eigen::MatrixXd& true_cov,
                                   const Eigen::MatrixXd& Wbar,
                                   const Eigen::MatrixXd& noise_cov,
                                   std::uint64_t seed) {
    if (n < d_x) fail(ErrorKind::Parameter, "sampled mode needs n >= d_x");
    if (true_cov.rows() != d_x || Wbar.rows() != d_y || Wbar.cols() != d_x ||
        noise_cov.rows() != d_y)
        fail(ErrorKind::Dimension, "inconsistent shapes");
    Eigen::MatrixXd Ax = psd_sqrt(true_cov, "input covariance");
    Eigen::MatrixXd Ae = psd_sqrt(noise_cov, "noise covariance");

    Rng rng(seed);
    SpectralDataset ds;
    ds.n = n;
    ds.d_x = d_x;
    ds.d_y = d_y;
    ds.seed = seed;
    ds.construction = "sampled";
    ds.true_cov = true_cov;
    ds.noise_cov = noise_cov;
    ds.Wbar = Wbar;

    ds.X = gaussian_matrix(n, d_x, rng) * Ax;       // rows x ~ N(0, true_cov)
    Eigen::MatrixXd E = gaussian_matrix(n, d_y, rng) * Ae;
    ds.Y = ds.X * Wbar.transpose() + E;

    double sqn = std::sqrt(static_cast<double>(n));
    Eigen::BDCSVD<Eigen::MatrixXd> svd_x(ds.X / sqn,
                                         Eigen::ComputeThinU |
                                             Eigen::ComputeThinV);
    ds.U = svd_x.matrixU();
    ds.V = svd_x.matrixV();
    // deterministic signs, keeping U V^T invariant
    for (int c = 0; c < ds.V.cols(); ++c) {
        for (int r = 0; r < ds.V.rows(); ++r) {
            if (std::fabs(ds.V(r, c)) > 1e-12) {
                if (ds.V(r, c) < 0.0) {
                    ds.V.col(c) = -ds.V.col(c);
                    ds.U.col(c) = -ds.U.col(c);
                }
                break;
            }
        }
    }
    ds.lambda = svd_x.singularValues().cwiseAbs2();

    int m = std::min(d_x, d_y);
    Eigen::MatrixXd Syx = ds.Y.transpose() * ds.X / static_cast<double>(n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_c(Syx, Eigen::ComputeThinU |
                                                     Eigen::ComputeThinV);
    // Align cross directions with the input basis: greedily match each
    // cross right-singular vector to its closest column of V (the shared
    // right-singular-vector structure holds only approximately here).
    ds.sigma = Eigen::VectorXd::Zero(m);
    ds.U_yx = Eigen::MatrixXd::Zero(d_y, m);
    std::vector<bool> v_used(static_cast<std::size_t>(d_x), false);
    std::vector<bool> col_set(static_cast<std::size_t>(m), false);
    for (int k = 0; k < m; ++k) {
        int best = -1;
        double best_dot = -1.0;
        for (int i = 0; i < d_x; ++i) {
            if (v_used[static_cast<std::size_t>(i)]) continue;
            double d = std::fabs(svd_c.matrixV().col(k).dot(ds.V.col(i)));
            if (d > best_dot) {
                best_dot = d;
                best = i;
            }
        }
        if (best < 0 || best >= m) continue;  // unrepresentable direction
        v_used[static_cast<std::size_t>(best)] = true;
        col_set[static_cast<std::size_t>(best)] = true;
        double s =
            svd_c.matrixV().col(k).dot(ds.V.col(best)) < 0.0 ? -1.0 : 1.0;
        ds.sigma[best] = svd_c.singularValues()[k];
        ds.U_yx.col(best) = s * svd_c.matrixU().col(k);
    }
    for (int i = 0; i < m; ++i) {
        if (!col_set[static_cast<std::size_t>(i)]) {
            // orthonormal filler for a direction the data left empty
            Eigen::VectorXd v = Eigen::VectorXd::Zero(d_y);
            v[i % d_y] = 1.0;
            for (int j = 0; j < m; ++j)
                if (col_set[static_cast<std::size_t>(j)])
                    v -= v.dot(ds.U_yx.col(j)) * ds.U_yx.col(j);
            if (v.norm() > 1e-12) ds.U_yx.col(i) = v / v.norm();
            col_set[static_cast<std::size_t>(i)] = true;
        }
    }

    Eigen::MatrixXd Etilde =
        ds.U.transpose() * E * ds.U_yx / sqn;  // d_x x m
    ds.noise_diag = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) ds.noise_diag[i] = Etilde(i, i);

    ds.misalignment = misalignment_score(Syx, ds.V);
    return ds;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> spectral_init(
    const SpectralDataset& ds, const InitSpec& init) {
    int m = ds.m();
    std::size_t k = init.r_vectors.size();
    if (init.a0.size() != k || init.b0.size() != k)
        fail(ErrorKind::Init, "a0, b0 and r_vectors must have equal length");
    if (static_cast<int>(k) > m)
        fail(ErrorKind::Init,
             "at most min(d_x, d_y) decoupled directions are available");
    if (init.h < 1) fail(ErrorKind::Init, "hidden width must be >= 1");
    for (std::size_t i = 0; i < k; ++i) {
        if (init.r_vectors[i].size() != init.h)
            fail(ErrorKind::Init, "every r vector must have h entries");
        double nrm = init.r_vectors[i].norm();
        if (nrm > 1e-12 && std::fabs(nrm - 1.0) > 1e-9)
            fail(ErrorKind::Init, "r vectors must be unit length or zero");
        for (std::size_t j = 0; j < i; ++j)
            if (std::fabs(init.r_vectors[i].dot(init.r_vectors[j])) > 1e-12)
                fail(ErrorKind::Init, "r vectors must be pairwise orthogonal");
    }

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(init.h, ds.d_x);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, init.h);
    for (std::size_t i = 0; i < k; ++i) {
        A.col(static_cast<int>(i)) = init.a0[i] * init.r_vectors[i];
        B.row(static_cast<int>(i)) =
            init.b0[i] * init.r_vectors[i].transpose();
    }
    return {A * ds.V.transpose(), ds.U_yx * B};
}

Eigen::MatrixXd true_synaptic_weights(const SpectralDataset& ds) {
    return ds.U_yx.transpose() * ds.Wbar * ds.V;
}

Eigen::MatrixXd to_synaptic(const SpectralDataset& ds,
                            const Eigen::MatrixXd& W) {
    return ds.U_yx.transpose() * W * ds.V;
}

std::vector<ModeParams> dataset_modes(const SpectralDataset& ds,
                                      const InitSpec& init, double eta_a,
                                      double eta_b) {
    Eigen::MatrixXd Zbar = true_synaptic_weights(ds);
    std::vector<ModeParams> modes;
    for (std::size_t i = 0; i < init.a0.size(); ++i) {
        int idx = static_cast<int>(i);
        ModeParams m;
        m.lambda = ds.lambda[idx];
        m.sigma = ds.sigma[idx];
        m.eta_a = eta_a;
        m.eta_b = eta_b;
        m.gamma = conserved_gamma(init.a0[i], init.b0[i], eta_a, eta_b);
        m.z0 = init.a0[i] * init.b0[i];
        if (m.lambda > 0.0 && m.sigma > 0.0)
            m.rho = 1.0 - Zbar(idx, idx) * m.lambda / m.sigma;
        modes.push_back(m);
    }
    return modes;
}

namespace {

void write_matrix(const std::filesystem::path& path, const char* role,
                  const Eigen::MatrixXd& M) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << "epochdd-matrix 1\n"
        << "role " << role << "\n"
        << "dtype float64-le\n"
        << "shape " << M.rows() << " " << M.cols() << "\n"
        << "data\n";
    for (int r = 0; r < M.rows(); ++r)
        for (int c = 0; c < M.cols(); ++c) {
            double v = M(r, c);
            out.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
    if (!out) fail(ErrorKind::Io, "short write to " + path.string());
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path,
                            const char* role) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
    std::string magic, role_key, role_val, dtype_key, dtype_val, shape_key,
        data_key;
    int version = 0;
    long rows = 0, cols = 0;
    in >> magic >> version >> role_key >> role_val >> dtype_key >> dtype_val >>
        shape_key >> rows >> cols >> data_key;
    if (magic != "epochdd-matrix" || version != 1 || role_key != "role" ||
        dtype_val != "float64-le" || shape_key != "shape" || data_key != "data")
        fail(ErrorKind::Io, "malformed matrix header in " + path.string());
    if (role_val != role)
        fail(ErrorKind::Io, "expected role " + std::string(role) + ", found " +
                                role_val);
    in.get();  // newline after "data"
    Eigen::MatrixXd M(rows, cols);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) {
            double v = 0.0;
            in.read(reinterpret_cast<char*>(&v), sizeof(double));
            M(r, c) = v;
        }
    if (!in) fail(ErrorKind::Io, "truncated matrix data in " + path.string());
    return M;
}

}  // namespace

void export_dataset(const SpectralDataset& ds,
                    const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_matrix(dir / "X.mat", "X", ds.X);
    write_matrix(dir / "Y.mat", "Y", ds.Y);
    write_matrix(dir / "U.mat", "U", ds.U);
    write_matrix(dir / "V.mat", "V", ds.V);
    write_matrix(dir / "U_yx.mat", "U_yx", ds.U_yx);
    write_matrix(dir / "lambda.mat", "lambda", ds.lambda);
    write_matrix(dir / "sigma.mat", "sigma", ds.sigma);
    write_matrix(dir / "Wbar.mat", "Wbar", ds.Wbar);
    write_matrix(dir / "noise_diag.mat", "noise_diag", ds.noise_diag);
    write_matrix(dir / "noise_cov.mat", "noise_cov", ds.noise_cov);
    write_matrix(dir / "true_cov.mat", "true_cov", ds.true_cov);

    json manifest;
    manifest["format"] = "epochdd-dataset";
    manifest["version"] = 1;
    manifest["construction"] = ds.construction;
    manifest["seed"] = ds.seed;
    manifest["n"] = ds.n;
    manifest["d_x"] = ds.d_x;
    manifest["d_y"] = ds.d_y;
    manifest["misalignment"] = ds.misalignment;
    std::ofstream out(dir / "manifest.json");
    if (!out) fail(ErrorKind::Io, "cannot write manifest.json");
    out << manifest.dump(2) << "\n";
}

SpectralDataset import_dataset(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) fail(ErrorKind::Io, "cannot read manifest.json");
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        fail(ErrorKind::Io, std::string("bad manifest: ") + e.what());
    }
    if (manifest.value("format", "") != "epochdd-dataset")
        fail(ErrorKind::Io, "not an epochdd dataset directory");

    SpectralDataset ds;
    ds.construction = manifest.at("construction").get<std::string>();
    ds.seed = manifest.at("seed").get<std::uint64_t>();
    ds.n = manifest.at("n").get<int>();
    ds.d_x = manifest.at("d_x").get<int>();
    ds.d_y = manifest.at("d_y").get<int>();
    ds.misalignment = manifest.at("misalignment").get<double>();
    ds.X = read_matrix(dir / "X.mat", "X");
    ds.Y = read_matrix(dir / "Y.mat", "Y");
    ds.U = read_matrix(dir / "U.mat", "U");
    ds.V = read_matrix(dir / "V.mat", "V");
    ds.U_yx = read_matrix(dir / "U_yx.mat", "U_yx");
    ds.lambda = read_matrix(dir / "lambda.mat", "lambda");
    ds.sigma = read_matrix(dir / "sigma.mat", "sigma");
    ds.Wbar = read_matrix(dir / "Wbar.mat", "Wbar");
    ds.noise_diag = read_matrix(dir / "noise_diag.mat", "noise_diag");
    ds.noise_cov = read_matrix(dir / "noise_cov.mat", "noise_cov");
    ds.true_cov = read_matrix(dir / "true_cov.mat", "true_cov");
    if (ds.X.rows() != ds.n || ds.X.cols() != ds.d_x ||
        ds.Y.cols() != ds.d_y)
        fail(ErrorKind::Io, "manifest and matrix shapes disagree");
    return ds;
}

}  // namespace epochdd
