#pragma once

// Soft-margin SVM over SPD embeddings with the Log-Euclidean Gaussian kernel.
//
// Labels are {0, 1}; internally 1 -> y = +1 and 0 -> y = -1. Training solves
// the dual
//
//     max  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
//     s.t. sum_i a_i y_i = 0,  0 <= a_i <= C_i
//
// by SMO with second-order working-set selection on a precomputed Gram.
// C_i is the per-class box bound (see class_box_constraints).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lemsched/channel_sim.hpp"
#include "lemsched/graph_embedding.hpp"
#include "lemsched/matrix.hpp"
#include "lemsched/spd_geometry.hpp"

namespace lemsched {

struct Sample {
    SpdMatrix embedding;
    int label = 0;           // 0 or 1
    std::size_t group = 0;   // layout the sample came from; cross-validation folds split on it
};

struct TrainSet {
    std::vector<Sample> samples;
    std::size_t layout_count = 0;
    std::size_t pair_count = 0;

    void validate() const;
    bool has_both_classes() const;
};

struct SvmHyper {
    double C = 300.0;
    KernelParams kernel;
    double tol = 1e-3;
    std::size_t max_iterations = 10'000'000;
    bool balance_classes = false;

    void validate() const;
};

/// Box bounds per sample. With balancing, C+ = C N / (2 N+) and
/// C- = C N / (2 N-); otherwise every bound is C.
std::vector<double> class_box_constraints(std::span<const int> y, double C, bool balance);

struct SmoSolution {
    std::vector<double> alpha;
    double bias = 0.0;
    double dual_objective = 0.0;  // maximization form
    bool converged = false;
    std::size_t iterations = 0;
};

/// SMO on a precomputed Gram. `y` holds +-1, `upper` the box bounds. When
/// `objective_trace` is non-null the dual objective after every update is
/// appended to it.
SmoSolution solve_smo(const Matrix& gram, std::span<const int> y, std::span<const double> upper, double tol,
                      std::size_t max_iterations, std::vector<double>* objective_trace = nullptr);

class SvmModel {
public:
    SvmModel(std::vector<SpdMatrix> support_points, std::vector<double> dual_coeffs, double bias, SvmHyper hyper,
             double c_positive, double c_negative, bool converged = true, std::size_t iterations = 0);

    /// Classifier that always answers `label`.
    static SvmModel constant(int label, SvmHyper hyper);

    const std::vector<SpdMatrix>& support_points() const noexcept { return support_; }
    /// Signed coefficients a_i y_i.
    const std::vector<double>& dual_coeffs() const noexcept { return coeffs_; }
    double bias() const noexcept { return bias_; }
    const SvmHyper& hyper() const noexcept { return hyper_; }
    double c_positive() const noexcept { return c_pos_; }
    double c_negative() const noexcept { return c_neg_; }
    /// False if training hit the iteration cap before the KKT gap closed.
    bool converged() const noexcept { return converged_; }
    std::size_t iterations() const noexcept { return iterations_; }
    bool is_constant() const noexcept { return support_.empty(); }

    /// Box bound of support point i (depends on its class).
    double upper_bound(std::size_t i) const { return coeffs_.at(i) > 0.0 ? c_pos_ : c_neg_; }

    double decision_value(const SpdMatrix& s) const;
    /// Same as decision_value, for a point already mapped by spd_log.
    double decision_value_from_log(const SymMatrix& log_s) const;

private:
    std::vector<SpdMatrix> support_;
    std::vector<SymMatrix> support_logs_;
    std::vector<double> coeffs_;
    double bias_ = 0.0;
    SvmHyper hyper_;
    double c_pos_ = 0.0;
    double c_neg_ = 0.0;
    bool converged_ = true;
    std::size_t iterations_ = 0;
};

/// Trains on the samples in a canonical order (by label, then matrix
/// entries), so the model does not depend on the input order.
/// A single-class training set yields a constant classifier.
SvmModel train(const TrainSet& ts, const SvmHyper& hp);

double decision_value(const SvmModel& m, const SpdMatrix& s);

/// 1 iff value >= 0.
int predict_from_value(double value);
int predict(const SvmModel& m, const SpdMatrix& s);

/// Per-link prediction; an all-zero answer is replaced by the strongest
/// direct-SNR link so the schedule always carries traffic.
ScheduleDecision predict_layout(const SvmModel& m, std::span<const LinkEmbedding> embeddings,
                                const ChannelRealization& ch, const SimConfig& cfg);

struct CvEntry {
    double factor = 0.0;
    double gamma = 0.0;
    double accuracy = 0.0;  // fraction in [0, 1]
};

struct CvReport {
    double median_lem_sq = 0.0;
    double base_gamma = 0.0;  // sqrt(median_lem_sq)
    std::size_t folds = 0;
    std::vector<CvEntry> entries;
    double chosen_gamma = 0.0;
    double chosen_accuracy = 0.0;
};

inline constexpr double kDefaultBandwidthFactors[] = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

/// k-fold cross-validation over gamma = factor * sqrt(median pairwise
/// lem_sq). Folds are formed from whole groups (layouts). The first best
/// factor in grid order wins.
CvReport select_bandwidth(const TrainSet& ts, const SvmHyper& hp, std::span<const double> factors,
                          std::size_t folds, std::uint64_t seed);

}  // namespace lemsched
