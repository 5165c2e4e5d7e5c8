#pragma once

// Generators shared by the unit and acceptance tests. Random SPD matrices
// are assembled from a known orthonormal basis and known eigenvalues, so
// their logarithm is available without going through the solver under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lemsched/matrix.hpp"
#include "lemsched/rng.hpp"
#include "lemsched/kernel_svm.hpp"
#include "lemsched/spd_geometry.hpp"

namespace lemsched::testing {

struct KnownSpd {
    std::vector<long double> eigenvalues;
    std::vector<std::vector<long double>> basis;  // basis[k] = k-th eigenvector

    /// sum_k f(lambda_k) u_k u_k^T in long double, rounded to double.
    template <typename F>
    Matrix spectral(F f) const {
        const std::size_t n = eigenvalues.size();
        Matrix out(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                long double s = 0.0L;
                for (std::size_t k = 0; k < n; ++k) s += basis[k][i] * f(eigenvalues[k]) * basis[k][j];
                out(i, j) = static_cast<double>(s);
            }
        return out;
    }

    Matrix matrix() const {
        return spectral([](long double x) { return x; });
    }
    Matrix log_matrix() const {
        return spectral([](long double x) { return std::log(x); });
    }
};

/// Orthonormal basis by modified Gram-Schmidt (long double) on Gaussian-ish
/// vectors; eigenvalues log-uniform in [min_eig, max_eig].
inline KnownSpd random_known_spd(Rng& rng, std::size_t n, double min_eig = 1e-3, double max_eig = 1e3) {
    KnownSpd out;
    out.basis.assign(n, std::vector<long double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        auto& v = out.basis[k];
        for (auto& x : v) x = rng.uniform(-1.0, 1.0) + rng.uniform(-1.0, 1.0);
        for (std::size_t pass = 0; pass < 2; ++pass)
            for (std::size_t m = 0; m < k; ++m) {
                long double dot = 0.0L;
                for (std::size_t i = 0; i < n; ++i) dot += v[i] * out.basis[m][i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= dot * out.basis[m][i];
            }
        long double norm = 0.0L;
        for (auto x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (auto& x : v) x /= norm;
    }
    const double lo = std::log(min_eig), hi = std::log(max_eig);
    out.eigenvalues.resize(n);
    for (auto& e : out.eigenvalues) e = std::exp(static_cast<long double>(rng.uniform(lo, hi)));
    return out;
}

inline SpdMatrix random_spd(Rng& rng, std::size_t n, double min_eig = 1e-2, double max_eig = 1e2) {
    return SpdMatrix(random_known_spd(rng, n, min_eig, max_eig).matrix());
}

inline Matrix random_symmetric(Rng& rng, std::size_t n, double scale = 1.0) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = scale * rng.uniform(-1.0, 1.0);
    return m;
}

/// Dual objective sum(a) - 1/2 a^T Q a, Q_ij = y_i y_j K_ij.
inline double dual_value(const Matrix& gram, std::span<const int> y, std::span<const double> alpha) {
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        lin += alpha[i];
        for (std::size_t j = 0; j < alpha.size(); ++j) quad += alpha[i] * alpha[j] * y[i] * y[j] * gram(i, j);
    }
    return lin - 0.5 * quad;
}

/// Euclidean projection onto {0 <= a <= upper, sum a_i y_i = 0}, by bisection
/// on the multiplier of the equality constraint.
inline std::vector<double> project_box_hyperplane(std::span<const double> v, std::span<const int> y,
                                                  std::span<const double> upper) {
    const std::size_t n = v.size();
    auto at = [&](double mu) {
        std::vector<double> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::clamp(v[i] - mu * y[i], 0.0, upper[i]);
        return a;
    };
    auto residual = [&](double mu) {
        const auto a = at(mu);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * y[i];
        return s;
    };
    double span_v = 0.0, span_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) span_v = std::max(span_v, std::abs(v[i])), span_c = std::max(span_c, upper[i]);
    double lo = -(span_v + span_c) - 1.0, hi = -lo;  // residual(lo) >= 0 >= residual(hi)
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) > 0.0 ? lo : hi) = mid;
    }
    return at(0.5 * (lo + hi));
}

/// Accelerated projected gradient ascent on the SVM dual, run until the
/// iterate moves less than `step_tol`.
inline std::vector<double> reference_dual_solve(const Matrix& gram, std::span<const int> y,
                                                std::span<const double> upper, double step_tol = 1e-12,
                                                std::size_t max_iter = 2'000'000) {
    const std::size_t n = y.size();
    double lipschitz = 0.0;  // Gershgorin bound on ||Q||
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(gram(i, j));
        lipschitz = std::max(lipschitz, row);
    }
    const double step = 1.0 / lipschitz;
    std::vector<double> x(n, 0.0), z = x, prev = x, g(n);
    double t = 1.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double qz = 0.0;
            for (std::size_t j = 0; j < n; ++j) qz += y[i] * y[j] * gram(i, j) * z[j];
            g[i] = z[i] + step * (1.0 - qz);
        }
        prev = x;
        x = project_box_hyperplane(g, y, upper);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        double move = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = x[i] + (t - 1.0) / t_next * (x[i] - prev[i]);
            move = std::max(move, std::abs(x[i] - prev[i]));
        }
        t = t_next;
        if (move < step_tol && it > 10) break;
    }
    return x;
}

/// Largest KKT residual of a trained solution, measured on the margins
/// y_i f(x_i): >= 1 at a_i = 0, <= 1 at a_i = C_i, == 1 in between.
inline double kkt_residual(const Matrix& gram, std::span<const int> y, std::span<const double> upper,
                           const SmoSolution& sol) {
    double worst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double f = sol.bias;
        for (std::size_t j = 0; j < y.size(); ++j) f += sol.alpha[j] * y[j] * gram(i, j);
        const double m = y[i] * f;
        if (sol.alpha[i] <= 0.0) worst = std::max(worst, 1.0 - m);
        else if (sol.alpha[i] >= upper[i]) worst = std::max(worst, m - 1.0);
        else worst = std::max(worst, std::abs(m - 1.0));
    }
    return worst;
}

/// Two classes of SPD matrices around c0 * I and c1 * I with multiplicative
/// jitter; overlapping when the centers are close.
inline TrainSet cluster_train_set(Rng& rng, std::size_t per_class, std::size_t dim, double c0, double c1,
                                  double jitter) {
    TrainSet ts;
    for (int label : {0, 1}) {
        const double c = label == 0 ? c0 : c1;
        for (std::size_t k = 0; k < per_class; ++k) {
            Matrix m = random_known_spd(rng, dim, 1.0, 1.0 + jitter).matrix() * c;
            ts.samples.push_back({SpdMatrix(std::move(m)), label, ts.samples.size()});
        }
    }
    ts.layout_count = ts.samples.size();
    ts.pair_count = 1;
    return ts;
}

}  // namespace lemsched::testing
