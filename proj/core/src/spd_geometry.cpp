#include "lemsched/spd_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lemsched/error.hpp"

namespace lemsched {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kJacobiRelTol = 1e-12;

void require_finite(const Matrix& m, const char* who) {
    for (double v : m.data())
        if (!std::isfinite(v)) throw ValidationError(std::string(who) + ": non-finite entry");
}

// U f(lambda) U^T, filled symmetrically.
Matrix spectral_map(const EigenDecomposition& e, const std::vector<double>& f) {
    const std::size_t n = e.values.size();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += e.vectors(i, k) * f[k] * e.vectors(j, k);
            out(i, j) = s;
            out(j, i) = s;
        }
    return out;
}

void check_same_dim(std::size_t a, std::size_t b, const char* who) {
    if (a != b)
        throw ValidationError(std::string(who) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                              std::to_string(b) + ")");
}

}  // namespace

Matrix EigenDecomposition::reconstruct() const { return spectral_map(*this, values); }

SymMatrix::SymMatrix(Matrix m) {
    if (!m.square() || m.rows() == 0) throw ValidationError("SymMatrix: matrix must be square and non-empty");
    require_finite(m, "SymMatrix");
    const std::size_t n = m.rows();
    const double tol = kSymmetryTolerance * std::max(1.0, m.max_abs());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > tol)
                throw ValidationError("SymMatrix: asymmetry at (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") exceeds tolerance");
            const double avg = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = avg;
            m(j, i) = avg;
        }
    m_ = std::move(m);
}

SymMatrix SymMatrix::zero(std::size_t n) { return SymMatrix(Matrix(n, n)); }

SpdMatrix::SpdMatrix(Matrix m) : SpdMatrix(SymMatrix(std::move(m))) {}

SpdMatrix::SpdMatrix(const SymMatrix& m)
    : sym_(m), eig_(std::make_shared<const EigenDecomposition>(sym_eig(m))) {
    if (!(eig_->values.back() > 0.0))
        throw ValidationError("SpdMatrix: smallest eigenvalue " + std::to_string(eig_->values.back()) +
                              " is not positive");
}

EigenDecomposition sym_eig(const SymMatrix& m) {
    const std::size_t n = m.dim();
    Matrix a = m.matrix();
    Matrix v = Matrix::identity(n);

    bool converged = false;
    for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diag += a(i, i) * a(i, i);
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        }
        if (off == 0.0 || std::sqrt(off) <= kJacobiRelTol * std::sqrt(diag)) {
            converged = true;
            break;
        }
        if (sweep == kMaxSweeps) break;

        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = a(p, k) = c * akp - s * akq;
                    a(k, q) = a(q, k) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    if (!converged) throw NumericalError("sym_eig: Jacobi iteration did not converge in 100 sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

namespace {

SymMatrix log_of(const EigenDecomposition& e) {
    std::vector<double> logs(e.values.size());
    for (std::size_t k = 0; k < logs.size(); ++k) {
        if (!(e.values[k] > 0.0))
            throw DomainError("matrix log: eigenvalue " + std::to_string(e.values[k]) + " is not positive");
        logs[k] = std::log(e.values[k]);
    }
    return SymMatrix(spectral_map(e, logs));
}

}  // namespace

SymMatrix sym_log(const SymMatrix& m) { return log_of(sym_eig(m)); }

SymMatrix spd_log(const SpdMatrix& s) { return log_of(s.eigen()); }

SpdMatrix sym_exp(const SymMatrix& m) {
    const EigenDecomposition e = sym_eig(m);
    std::vector<double> ex(e.values.size());
    std::transform(e.values.begin(), e.values.end(), ex.begin(), [](double x) { return std::exp(x); });
    return SpdMatrix(spectral_map(e, ex));
}

double frobenius_sq_diff(const SymMatrix& a, const SymMatrix& b) {
    check_same_dim(a.dim(), b.dim(), "frobenius_sq_diff");
    const auto x = a.matrix().data();
    const auto y = b.matrix().data();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

double lem_sq(const SpdMatrix& s1, const SpdMatrix& s2) {
    check_same_dim(s1.dim(), s2.dim(), "lem_sq");
    return frobenius_sq_diff(spd_log(s1), spd_log(s2));
}

void KernelParams::validate() const {
    if (!(gamma_kernel > 0.0) || !std::isfinite(gamma_kernel))
        throw ValidationError("KernelParams: gamma_kernel must be positive and finite");
}

double kernel_from_lem_sq(double lem, const KernelParams& p) {
    const double g2 = p.gamma_kernel * p.gamma_kernel;
    const double e = p.exponent == KernelExponent::squared_norm ? lem : lem * lem;
    return std::exp(-e / g2);
}

double kernel(const SpdMatrix& s1, const SpdMatrix& s2, const KernelParams& p) {
    p.validate();
    return kernel_from_lem_sq(lem_sq(s1, s2), p);
}

Matrix lem_sq_matrix(std::span<const SymMatrix> logs) {
    const std::size_t n = logs.size();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = frobenius_sq_diff(logs[i], logs[j]);
            d(i, j) = v;
            d(j, i) = v;
        }
    return d;
}

Matrix gram(std::span<const SpdMatrix> list, const KernelParams& p) {
    if (list.empty()) throw ValidationError("gram: empty matrix list");
    p.validate();
    std::vector<SymMatrix> logs;
    logs.reserve(list.size());
    for (const auto& s : list) {
        check_same_dim(s.dim(), list.front().dim(), "gram");
        logs.push_back(spd_log(s));
    }
    Matrix g = lem_sq_matrix(logs);
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = i == j ? 1.0 : kernel_from_lem_sq(g(i, j), p);
    return g;
}

}  // namespace lemsched
