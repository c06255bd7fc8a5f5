#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "linkpred/errors.hpp"
#include "linkpred/heuristics.hpp"
#include "linkpred/random.hpp"

namespace linkpred {

namespace {

constexpr std::size_t kOversampling = 8;
constexpr std::size_t kMinPowerIterations = 7;
constexpr std::size_t kMaxPowerIterations = 200;
constexpr double kRitzTolerance = 1e-13;

// Y = A·X for the binary adjacency A (row u has ones at out_neighbors(u)).
Eigen::MatrixXd multiply(const DiGraph& g, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v : g.out_neighbors(u)) y.row(u) += x.row(v);
    }
    return y;
}

// Y = Aᵀ·X.
Eigen::MatrixXd multiply_transposed(const DiGraph& g, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (NodeId v = 0; v < g.node_count(); ++v) {
        for (NodeId u : g.in_neighbors(v)) y.row(v) += x.row(u);
    }
    return y;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

SvdFactors compute_svd(const DiGraph& g, std::size_t k, std::uint64_t seed) {
    const std::size_t n = g.node_count();
    if (k < 1) throw Error("svd: rank must be at least 1");
    if (k > n) throw Error("svd: rank " + std::to_string(k) + " exceeds node count " + std::to_string(n));
    const std::size_t width = std::min(k + kOversampling, n);
    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(width);

    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd omega(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) omega(i, j) = gauss(rng);
    }

    Eigen::MatrixXd q = orthonormalize(multiply(g, omega));
    Eigen::VectorXd previous = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    Eigen::JacobiSVD<Eigen::MatrixXd> small;
    Eigen::MatrixXd bt;  // (Qᵀ A)ᵀ = Aᵀ Q, N × width
    std::size_t iteration = 0;
    for (;;) {
        bt = multiply_transposed(g, q);
        small.compute(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::VectorXd current = small.singularValues().head(static_cast<Eigen::Index>(k));
        const double scale = std::max(current.maxCoeff(), 1e-300);
        const bool settled = (current - previous).cwiseAbs().maxCoeff() <= kRitzTolerance * scale;
        if ((iteration >= kMinPowerIterations && settled) || iteration >= kMaxPowerIterations) break;
        previous = current;
        q = orthonormalize(multiply(g, orthonormalize(bt)));
        ++iteration;
    }

    // bt = V_small Σ W_smallᵀ, so A ≈ Q·W_small·Σ·V_smallᵀ.
    const auto kk = static_cast<Eigen::Index>(k);
    SvdFactors out;
    out.power_iterations = iteration;
    out.s = small.singularValues().head(kk);
    out.u = q * small.matrixV().leftCols(kk);
    out.v = small.matrixU().leftCols(kk).transpose();
    for (Eigen::Index j = 0; j < kk; ++j) {
        Eigen::Index arg = 0;
        out.u.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.u(arg, j) < 0.0) {
            out.u.col(j) *= -1.0;
            out.v.row(j) *= -1.0;
        }
    }
    return out;
}

}  // namespace linkpred
