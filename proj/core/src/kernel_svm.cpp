#include "lemsched/kernel_svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lemsched/baseline_schedulers.hpp"
#include "lemsched/error.hpp"
#include "lemsched/rng.hpp"

namespace lemsched {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

int to_sign(int label) { return label == 1 ? 1 : -1; }

// Logs, pairwise distances and canonical rank of every sample, computed once
// and shared by training and cross-validation.
struct SampleCache {
    std::vector<SymMatrix> logs;
    Matrix lem;
    std::vector<std::size_t> canonical;  // sample indices in canonical order

    explicit SampleCache(const TrainSet& ts) {
        logs.reserve(ts.samples.size());
        for (const auto& s : ts.samples) logs.push_back(spd_log(s.embedding));
        lem = lem_sq_matrix(logs);

        canonical.resize(ts.samples.size());
        std::iota(canonical.begin(), canonical.end(), std::size_t{0});
        std::stable_sort(canonical.begin(), canonical.end(), [&](std::size_t a, std::size_t b) {
            const auto& sa = ts.samples[a];
            const auto& sb = ts.samples[b];
            if (sa.label != sb.label) return sa.label < sb.label;
            const auto da = sa.embedding.matrix().data();
            const auto db = sb.embedding.matrix().data();
            return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end());
        });
    }
};

struct SubsetFit {
    std::vector<std::size_t> index;  // sample indices, canonical order
    std::vector<int> y;
    std::vector<double> upper;
    SmoSolution solution;
    bool constant = false;
    int constant_label = 0;
};

// `members` must already be in canonical order.
SubsetFit fit_subset(const TrainSet& ts, const SampleCache& cache, std::vector<std::size_t> members,
                     const SvmHyper& hp) {
    SubsetFit fit;
    fit.index = std::move(members);
    const std::size_t n = fit.index.size();
    fit.y.resize(n);
    for (std::size_t k = 0; k < n; ++k) fit.y[k] = to_sign(ts.samples[fit.index[k]].label);

    const bool both = std::any_of(fit.y.begin(), fit.y.end(), [](int v) { return v > 0; }) &&
                      std::any_of(fit.y.begin(), fit.y.end(), [](int v) { return v < 0; });
    if (!both) {
        fit.constant = true;
        fit.constant_label = n > 0 && fit.y.front() > 0 ? 1 : 0;
        return fit;
    }

    Matrix g(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            g(a, b) = a == b ? 1.0 : kernel_from_lem_sq(cache.lem(fit.index[a], fit.index[b]), hp.kernel);
    fit.upper = class_box_constraints(fit.y, hp.C, hp.balance_classes);
    fit.solution = solve_smo(g, fit.y, fit.upper, hp.tol, hp.max_iterations);
    return fit;
}

std::vector<std::size_t> canonical_members(const SampleCache& cache, const std::vector<bool>& keep) {
    std::vector<std::size_t> out;
    for (std::size_t idx : cache.canonical)
        if (keep[idx]) out.push_back(idx);
    return out;
}

double subset_decision(const SubsetFit& fit, const SampleCache& cache, std::size_t sample, const KernelParams& kp) {
    if (fit.constant) return fit.constant_label == 1 ? 1.0 : -1.0;
    double v = fit.solution.bias;
    for (std::size_t k = 0; k < fit.index.size(); ++k) {
        if (fit.solution.alpha[k] <= 0.0) continue;
        const std::size_t other = fit.index[k];
        const double kv = other == sample ? 1.0 : kernel_from_lem_sq(cache.lem(other, sample), kp);
        v += fit.solution.alpha[k] * fit.y[k] * kv;
    }
    return v;
}

}  // namespace

void TrainSet::validate() const {
    if (samples.empty()) throw ValidationError("TrainSet: no samples");
    const std::size_t n = samples.front().embedding.dim();
    for (const auto& s : samples) {
        if (s.embedding.dim() != n) throw ValidationError("TrainSet: embeddings differ in dimension");
        if (s.label != 0 && s.label != 1) throw ValidationError("TrainSet: labels must be 0 or 1");
    }
}

bool TrainSet::has_both_classes() const {
    bool pos = false, neg = false;
    for (const auto& s : samples) (s.label == 1 ? pos : neg) = true;
    return pos && neg;
}

void SvmHyper::validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) throw ValidationError("SvmHyper: C must be positive");
    if (!(tol > 0.0)) throw ValidationError("SvmHyper: tol must be positive");
    if (max_iterations == 0) throw ValidationError("SvmHyper: max_iterations must be positive");
    kernel.validate();
}

std::vector<double> class_box_constraints(std::span<const int> y, double C, bool balance) {
    const double n = static_cast<double>(y.size());
    const double n_pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double n_neg = n - n_pos;
    const double c_pos = balance && n_pos > 0 ? C * n / (2.0 * n_pos) : C;
    const double c_neg = balance && n_neg > 0 ? C * n / (2.0 * n_neg) : C;
    std::vector<double> upper(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) upper[i] = y[i] > 0 ? c_pos : c_neg;
    return upper;
}

SmoSolution solve_smo(const Matrix& gram, std::span<const int> y, std::span<const double> upper, double tol,
                      std::size_t max_iterations, std::vector<double>* objective_trace) {
    const std::size_t n = y.size();
    if (gram.rows() != n || gram.cols() != n || upper.size() != n)
        throw ValidationError("solve_smo: Gram, label and bound sizes disagree");

    // Minimization form f(a) = 1/2 a^T Q a - e^T a with Q_ij = y_i y_j K_ij.
    // grad holds Q a - e.
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * gram(i, j); };
    auto at_upper = [&](std::size_t i) { return alpha[i] >= upper[i]; };
    auto at_lower = [&](std::size_t i) { return alpha[i] <= 0.0; };
    auto dual_objective = [&] {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += alpha[i] * (grad[i] - 1.0);
        return -0.5 * v;
    };

    SmoSolution out;
    std::size_t iter = 0;
    for (; iter < max_iterations; ++iter) {
        // First index: maximal violation over I_up.
        double gmax = -kInf;
        std::ptrdiff_t i_sel = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0) {
                if (!at_upper(t) && -grad[t] >= gmax) gmax = -grad[t], i_sel = static_cast<std::ptrdiff_t>(t);
            } else {
                if (!at_lower(t) && grad[t] >= gmax) gmax = grad[t], i_sel = static_cast<std::ptrdiff_t>(t);
            }
        }

        // Second index: largest second-order decrease over I_low.
        double gmax2 = -kInf;
        std::ptrdiff_t j_sel = -1;
        double best_decrease = kInf;
        if (i_sel >= 0) {
            const auto i = static_cast<std::size_t>(i_sel);
            for (std::size_t t = 0; t < n; ++t) {
                double grad_diff;
                if (y[t] > 0) {
                    if (at_lower(t)) continue;
                    gmax2 = std::max(gmax2, grad[t]);
                    grad_diff = gmax + grad[t];
                } else {
                    if (at_upper(t)) continue;
                    gmax2 = std::max(gmax2, -grad[t]);
                    grad_diff = gmax - grad[t];
                }
                if (grad_diff <= 0.0) continue;
                double quad = gram(i, i) + gram(t, t) - 2.0 * gram(i, t);
                if (quad <= 0.0) quad = kTau;
                const double decrease = -(grad_diff * grad_diff) / quad;
                if (decrease <= best_decrease) {
                    best_decrease = decrease;
                    j_sel = static_cast<std::ptrdiff_t>(t);
                }
            }
        }
        if (i_sel < 0 || j_sel < 0 || gmax + gmax2 < tol) {
            out.converged = true;
            break;
        }

        const auto i = static_cast<std::size_t>(i_sel);
        const auto j = static_cast<std::size_t>(j_sel);
        const double ci = upper[i], cj = upper[j];
        const double old_ai = alpha[i], old_aj = alpha[j];
        double& ai = alpha[i];
        double& aj = alpha[j];

        if (y[i] != y[j]) {
            double quad = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) aj = 0.0, ai = diff;
            } else {
                if (ai < 0.0) ai = 0.0, aj = -diff;
            }
            if (diff > ci - cj) {
                if (ai > ci) ai = ci, aj = ci - diff;
            } else {
                if (aj > cj) aj = cj, ai = cj + diff;
            }
        } else {
            double quad = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > ci) {
                if (ai > ci) ai = ci, aj = sum - ci;
            } else {
                if (aj < 0.0) aj = 0.0, ai = sum;
            }
            if (sum > cj) {
                if (aj > cj) aj = cj, ai = sum - cj;
            } else {
                if (ai < 0.0) ai = 0.0, aj = sum;
            }
        }

        const double dai = ai - old_ai, daj = aj - old_aj;
        for (std::size_t k = 0; k < n; ++k) grad[k] += q(k, i) * dai + q(k, j) * daj;
        if (objective_trace) objective_trace->push_back(dual_objective());
    }
    out.iterations = iter;

    // Bias from free variables, or the midpoint of the feasible interval.
    double ub = kInf, lb = -kInf, sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double yg = y[i] * grad[i];
        if (at_upper(i)) {
            if (y[i] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (at_lower(i)) {
            if (y[i] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    out.bias = -rho;
    out.dual_objective = dual_objective();
    out.alpha = std::move(alpha);
    return out;
}

SvmModel::SvmModel(std::vector<SpdMatrix> support_points, std::vector<double> dual_coeffs, double bias,
                   SvmHyper hyper, double c_positive, double c_negative, bool converged, std::size_t iterations)
    : support_(std::move(support_points)),
      coeffs_(std::move(dual_coeffs)),
      bias_(bias),
      hyper_(hyper),
      c_pos_(c_positive),
      c_neg_(c_negative),
      converged_(converged),
      iterations_(iterations) {
    if (support_.size() != coeffs_.size()) throw ValidationError("SvmModel: support/coefficient count mismatch");
    if (!std::isfinite(bias_)) throw ValidationError("SvmModel: bias must be finite");
    hyper_.validate();
    support_logs_.reserve(support_.size());
    for (const auto& s : support_) {
        if (s.dim() != support_.front().dim()) throw ValidationError("SvmModel: support points differ in dimension");
        support_logs_.push_back(spd_log(s));
    }
}

SvmModel SvmModel::constant(int label, SvmHyper hyper) {
    return SvmModel({}, {}, label == 1 ? 1.0 : -1.0, hyper, hyper.C, hyper.C);
}

double SvmModel::decision_value_from_log(const SymMatrix& log_s) const {
    double v = bias_;
    for (std::size_t i = 0; i < support_logs_.size(); ++i)
        v += coeffs_[i] * kernel_from_lem_sq(frobenius_sq_diff(support_logs_[i], log_s), hyper_.kernel);
    return v;
}

double SvmModel::decision_value(const SpdMatrix& s) const {
    if (is_constant()) return bias_;
    if (s.dim() != support_.front().dim()) throw ValidationError("decision_value: dimension mismatch");
    return decision_value_from_log(spd_log(s));
}

SvmModel train(const TrainSet& ts, const SvmHyper& hp) {
    ts.validate();
    hp.validate();
    if (!ts.has_both_classes()) return SvmModel::constant(ts.samples.front().label, hp);

    const SampleCache cache(ts);
    const SubsetFit fit = fit_subset(ts, cache, cache.canonical, hp);

    std::vector<SpdMatrix> support;
    std::vector<double> coeffs;
    double c_pos = hp.C, c_neg = hp.C;
    for (std::size_t k = 0; k < fit.index.size(); ++k) {
        (fit.y[k] > 0 ? c_pos : c_neg) = fit.upper[k];
        if (fit.solution.alpha[k] > 0.0) {
            support.push_back(ts.samples[fit.index[k]].embedding);
            coeffs.push_back(fit.solution.alpha[k] * fit.y[k]);
        }
    }
    return SvmModel(std::move(support), std::move(coeffs), fit.solution.bias, hp, c_pos, c_neg,
                    fit.solution.converged, fit.solution.iterations);
}

double decision_value(const SvmModel& m, const SpdMatrix& s) { return m.decision_value(s); }

int predict_from_value(double value) { return value >= 0.0 ? 1 : 0; }

int predict(const SvmModel& m, const SpdMatrix& s) { return predict_from_value(m.decision_value(s)); }

ScheduleDecision predict_layout(const SvmModel& m, std::span<const LinkEmbedding> embeddings,
                                const ChannelRealization& ch, const SimConfig& cfg) {
    if (embeddings.size() != ch.pair_count())
        throw ValidationError("predict_layout: embedding count does not match channel size");
    ScheduleDecision d{std::vector<std::uint8_t>(embeddings.size())};
    for (std::size_t q = 0; q < embeddings.size(); ++q)
        d.d[q] = static_cast<std::uint8_t>(predict(m, embeddings[q].s_dq));
    if (d.active_count() == 0 && !d.d.empty()) return strongest_link(ch, cfg);
    return d;
}

CvReport select_bandwidth(const TrainSet& ts, const SvmHyper& hp, std::span<const double> factors,
                          std::size_t folds, std::uint64_t seed) {
    ts.validate();
    hp.validate();
    if (factors.empty()) throw ValidationError("select_bandwidth: empty factor grid");
    if (folds < 2) throw ValidationError("select_bandwidth: need at least 2 folds");

    const SampleCache cache(ts);
    const std::size_t n = ts.samples.size();

    CvReport report;
    {
        std::vector<double> upper_tri;
        upper_tri.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) upper_tri.push_back(cache.lem(i, j));
        if (!upper_tri.empty()) {
            auto mid = upper_tri.begin() + static_cast<std::ptrdiff_t>(upper_tri.size() / 2);
            std::nth_element(upper_tri.begin(), mid, upper_tri.end());
            report.median_lem_sq = *mid;
        }
    }
    report.base_gamma = report.median_lem_sq > 0.0 ? std::sqrt(report.median_lem_sq) : 1.0;

    // Whole groups go to one fold. Group ids are sorted before the seeded
    // shuffle so the assignment does not depend on sample order.
    std::vector<std::size_t> groups;
    for (const auto& s : ts.samples) groups.push_back(s.group);
    std::sort(groups.begin(), groups.end());
    groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    Rng rng(seed);
    for (std::size_t k = groups.size(); k > 1; --k) {
        const auto r = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k));
        std::swap(groups[k - 1], groups[std::min(r, k - 1)]);
    }
    report.folds = std::min(folds, groups.size());
    std::vector<std::size_t> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto pos = std::find(groups.begin(), groups.end(), ts.samples[i].group) - groups.begin();
        fold_of[i] = static_cast<std::size_t>(pos) % std::max<std::size_t>(report.folds, 1);
    }

    double best_acc = -1.0;
    for (double factor : factors) {
        SvmHyper trial = hp;
        trial.kernel.gamma_kernel = factor * report.base_gamma;
        std::size_t correct = 0, total = 0;

        // With a single group there is nothing to hold out; score on the training data.
        const std::size_t rounds = report.folds < 2 ? 1 : report.folds;
        for (std::size_t f = 0; f < rounds; ++f) {
            std::vector<bool> keep(n, true);
            if (report.folds >= 2)
                for (std::size_t i = 0; i < n; ++i) keep[i] = fold_of[i] != f;
            const SubsetFit fit = fit_subset(ts, cache, canonical_members(cache, keep), trial);
            for (std::size_t i = 0; i < n; ++i) {
                if (report.folds >= 2 && keep[i]) continue;
                correct += predict_from_value(subset_decision(fit, cache, i, trial.kernel)) == ts.samples[i].label;
                ++total;
            }
        }

        const double acc = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
        report.entries.push_back({factor, trial.kernel.gamma_kernel, acc});
        if (acc > best_acc) {
            best_acc = acc;
            report.chosen_gamma = trial.kernel.gamma_kernel;
            report.chosen_accuracy = acc;
        }
    }
    return report;
}

}  // namespace lemsched
