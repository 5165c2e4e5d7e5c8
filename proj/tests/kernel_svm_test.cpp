#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lemsched/baseline_schedulers.hpp"
#include "lemsched/error.hpp"
#include "lemsched/kernel_svm.hpp"
#include "test_support.hpp"

namespace lemsched {
namespace {

using testing::cluster_train_set;
using testing::dual_value;
using testing::kkt_residual;
using testing::random_spd;
using testing::reference_dual_solve;

struct Problem {
    Matrix gram;
    std::vector<int> y;
    std::vector<double> upper;
};

Problem make_problem(const TrainSet& ts, const SvmHyper& hp) {
    std::vector<SpdMatrix> pts;
    Problem p;
    for (const auto& s : ts.samples) {
        pts.push_back(s.embedding);
        p.y.push_back(s.label == 1 ? 1 : -1);
    }
    p.gram = gram(pts, hp.kernel);
    p.upper = class_box_constraints(p.y, hp.C, hp.balance_classes);
    return p;
}

TEST(SvmHyper, Validation) {
    SvmHyper hp;
    EXPECT_NO_THROW(hp.validate());
    hp.C = 0.0;
    EXPECT_THROW(hp.validate(), ValidationError);
    hp = {};
    hp.tol = 0.0;
    EXPECT_THROW(hp.validate(), ValidationError);
    hp = {};
    hp.kernel.gamma_kernel = 0.0;
    EXPECT_THROW(hp.validate(), ValidationError);
}

TEST(TrainSet, Validation) {
    TrainSet ts;
    EXPECT_THROW(ts.validate(), ValidationError);
    ts.samples.push_back({SpdMatrix(Matrix::identity(2)), 1, 0});
    ts.samples.push_back({SpdMatrix(Matrix::identity(3)), 0, 1});
    EXPECT_THROW(ts.validate(), ValidationError);
    ts.samples.pop_back();
    ts.samples.push_back({SpdMatrix(Matrix::identity(2)), 2, 1});
    EXPECT_THROW(ts.validate(), ValidationError);
}

TEST(ClassBox, BalancedBounds) {
    const std::vector<int> y{1, 1, 1, -1};
    const auto plain = class_box_constraints(y, 10.0, false);
    for (double u : plain) EXPECT_EQ(u, 10.0);
    const auto bal = class_box_constraints(y, 10.0, true);
    EXPECT_DOUBLE_EQ(bal[0], 10.0 * 4 / 6);
    EXPECT_DOUBLE_EQ(bal[3], 10.0 * 4 / 2);
}

TEST(Train, SeparableClustersFitPerfectly) {
    Rng rng(1);
    const TrainSet ts = cluster_train_set(rng, 15, 4, 1.0, 20.0, 0.05);
    SvmHyper hp;
    hp.kernel.gamma_kernel = 4.0;
    const SvmModel m = train(ts, hp);
    EXPECT_TRUE(m.converged());
    EXPECT_FALSE(m.is_constant());
    for (const auto& s : ts.samples) EXPECT_EQ(predict(m, s.embedding), s.label);
    double balance = 0.0;
    for (std::size_t i = 0; i < m.dual_coeffs().size(); ++i) {
        balance += m.dual_coeffs()[i];
        EXPECT_LE(std::abs(m.dual_coeffs()[i]), m.upper_bound(i));
    }
    EXPECT_NEAR(balance, 0.0, 1e-6);
}

TEST(Train, SingleClassGivesConstantModel) {
    Rng rng(2);
    TrainSet ts = cluster_train_set(rng, 5, 3, 1.0, 2.0, 0.1);
    for (auto& s : ts.samples) s.label = 1;
    const SvmModel pos = train(ts, {});
    EXPECT_TRUE(pos.is_constant());
    EXPECT_TRUE(pos.support_points().empty());
    EXPECT_EQ(pos.decision_value(random_spd(rng, 3)), pos.bias());
    EXPECT_EQ(predict(pos, random_spd(rng, 3)), 1);
    for (auto& s : ts.samples) s.label = 0;
    EXPECT_EQ(predict(train(ts, {}), random_spd(rng, 3)), 0);
}

TEST(Train, KktAndDualMatchReference) {
    Rng rng(3);
    for (int trial = 0; trial < 6; ++trial) {
        const TrainSet ts = cluster_train_set(rng, 10, 4, 1.0, 1.6, 1.0);
        for (double C : {0.5, 10.0}) {
            SvmHyper hp;
            hp.C = C;
            hp.kernel.gamma_kernel = 1.0;
            hp.balance_classes = trial % 2 == 1;
            const Problem p = make_problem(ts, hp);
            const SmoSolution sol = solve_smo(p.gram, p.y, p.upper, hp.tol, hp.max_iterations);
            ASSERT_TRUE(sol.converged);
            EXPECT_LE(kkt_residual(p.gram, p.y, p.upper, sol), 5.0 * hp.tol);
            EXPECT_NEAR(sol.dual_objective, dual_value(p.gram, p.y, sol.alpha), 1e-9 * std::abs(sol.dual_objective));

            const auto ref = reference_dual_solve(p.gram, p.y, p.upper);
            const double ref_obj = dual_value(p.gram, p.y, ref);
            EXPECT_LE(std::abs(sol.dual_objective - ref_obj), 1e-4 * std::abs(ref_obj)) << "C=" << C;
            EXPECT_LE(sol.dual_objective, ref_obj + 1e-9 * std::abs(ref_obj));
        }
    }
}

TEST(Train, InteriorSupportVectorsSitOnTheMargin) {
    Rng rng(4);
    const TrainSet ts = cluster_train_set(rng, 20, 4, 1.0, 1.8, 1.0);
    SvmHyper hp;
    hp.C = 5.0;
    const SvmModel m = train(ts, hp);
    std::size_t interior = 0;
    for (std::size_t i = 0; i < m.support_points().size(); ++i) {
        const double c = m.dual_coeffs()[i];
        if (std::abs(c) >= m.upper_bound(i)) continue;
        ++interior;
        const double v = m.decision_value(m.support_points()[i]);
        EXPECT_NEAR(std::abs(v), 1.0, 5.0 * hp.tol);
        EXPECT_EQ(v > 0.0, c > 0.0);
    }
    EXPECT_GT(interior, 0u);
}

TEST(Solver, ObjectiveNeverDecreases) {
    Rng rng(5);
    const TrainSet ts = cluster_train_set(rng, 25, 4, 1.0, 1.5, 1.0);
    SvmHyper hp;
    hp.C = 3.0;
    const Problem p = make_problem(ts, hp);
    std::vector<double> trace;
    const SmoSolution sol = solve_smo(p.gram, p.y, p.upper, 1e-6, 1'000'000, &trace);
    ASSERT_GT(trace.size(), 5u);
    EXPECT_GE(trace.front(), 0.0);
    for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_GE(trace[k], trace[k - 1] - 1e-12 * std::abs(trace[k]));
    EXPECT_EQ(trace.size(), sol.iterations);
}

TEST(Solver, IterationCapIsReported) {
    Rng rng(6);
    const TrainSet ts = cluster_train_set(rng, 25, 4, 1.0, 1.5, 1.0);
    SvmHyper hp;
    const Problem p = make_problem(ts, hp);
    const SmoSolution sol = solve_smo(p.gram, p.y, p.upper, 1e-9, 2);
    EXPECT_FALSE(sol.converged);
    EXPECT_EQ(sol.iterations, 2u);
    hp.max_iterations = 2;
    hp.tol = 1e-9;
    EXPECT_FALSE(train(ts, hp).converged());
}

TEST(Solver, SizeMismatch) {
    const std::vector<int> y{1, -1};
    const std::vector<double> u{1.0, 1.0};
    EXPECT_THROW(solve_smo(Matrix::identity(3), y, u, 1e-3, 10), ValidationError);
}

TEST(Train, OrderInvariant) {
    Rng rng(7);
    TrainSet ts = cluster_train_set(rng, 15, 4, 1.0, 1.7, 1.0);
    const SvmModel a = train(ts, {});
    std::reverse(ts.samples.begin(), ts.samples.end());
    std::swap(ts.samples[3], ts.samples[11]);
    const SvmModel b = train(ts, {});
    for (int probe = 0; probe < 20; ++probe) {
        const SpdMatrix s = random_spd(rng, 4, 0.5, 3.0);
        EXPECT_NEAR(a.decision_value(s), b.decision_value(s), 1e-6);
    }
}

TEST(Train, DuplicatedSetGivesSameDecisionFunction) {
    Rng rng(8);
    const TrainSet ts = cluster_train_set(rng, 10, 4, 1.0, 6.0, 0.3);
    TrainSet twice = ts;
    for (auto s : ts.samples) {
        s.group += ts.samples.size();
        twice.samples.push_back(s);
    }
    SvmHyper hp;
    hp.tol = 1e-9;
    hp.kernel.gamma_kernel = 2.0;
    const SvmModel a = train(ts, hp), b = train(twice, hp);
    for (std::size_t i = 0; i < a.support_points().size(); ++i) ASSERT_LT(std::abs(a.dual_coeffs()[i]), a.upper_bound(i));
    for (int probe = 0; probe < 20; ++probe) {
        const SpdMatrix s = random_spd(rng, 4, 0.5, 8.0);
        EXPECT_NEAR(a.decision_value(s), b.decision_value(s), 1e-6);
    }
}

TEST(Predict, TieRule) {
    EXPECT_EQ(predict_from_value(2.0), 1);
    EXPECT_EQ(predict_from_value(-2.0), 0);
    EXPECT_EQ(predict_from_value(0.0), 1);
    EXPECT_EQ(predict_from_value(-0.0), 1);
}

TEST(Predict, DecisionValueFormula) {
    Rng rng(9);
    const SpdMatrix a = random_spd(rng, 3), b = random_spd(rng, 3), x = random_spd(rng, 3);
    SvmHyper hp;
    hp.kernel.gamma_kernel = 3.0;
    const SvmModel m({a, b}, {0.7, -0.4}, 0.1, hp, hp.C, hp.C);
    const double expect = 0.7 * kernel(a, x, hp.kernel) - 0.4 * kernel(b, x, hp.kernel) + 0.1;
    EXPECT_NEAR(decision_value(m, x), expect, 1e-14);
    EXPECT_THROW(m.decision_value(random_spd(rng, 4)), ValidationError);
    EXPECT_THROW(SvmModel({a}, {}, 0.0, hp, 1.0, 1.0), ValidationError);
}

class PredictLayout : public ::testing::Test {
protected:
    SpdMatrix near_ = SpdMatrix(Matrix::identity(2));
    SpdMatrix far_ = SpdMatrix(Matrix::identity(2) * 1e4);
    SvmHyper hp_;
    SvmModel model_ = SvmModel({near_}, {2.0}, -1.0, hp_, hp_.C, hp_.C);
    SimConfig cfg_ = [] {
        SimConfig c;
        c.K = 3;
        return c;
    }();
    ChannelRealization ch_{Matrix{{1e-10, 1e-12, 1e-12}, {1e-12, 5e-10, 1e-12}, {1e-12, 1e-12, 2e-10}}, 1e-13};

    LinkEmbedding emb(std::size_t q, bool active) const {
        const SpdMatrix& s = active ? near_ : far_;
        return {q, s, s, s, s};
    }
};

TEST_F(PredictLayout, PerLinkPredictions) {
    const std::vector<LinkEmbedding> e{emb(0, false), emb(1, true), emb(2, false)};
    EXPECT_EQ(predict_layout(model_, e, ch_, cfg_).d, (std::vector<std::uint8_t>{0, 1, 0}));
}

TEST_F(PredictLayout, AllZeroFallsBackToStrongestLink) {
    const std::vector<LinkEmbedding> e{emb(0, false), emb(1, false), emb(2, false)};
    EXPECT_EQ(predict_layout(model_, e, ch_, cfg_), strongest_link(ch_, cfg_));
    EXPECT_EQ(predict_layout(model_, e, ch_, cfg_).d, (std::vector<std::uint8_t>{0, 1, 0}));
}

TEST_F(PredictLayout, AllOne) {
    const std::vector<LinkEmbedding> e{emb(0, false), emb(1, false), emb(2, false)};
    EXPECT_EQ(predict_layout(SvmModel::constant(1, hp_), e, ch_, cfg_), all_active(3));
    EXPECT_THROW(predict_layout(model_, std::vector<LinkEmbedding>{emb(0, true)}, ch_, cfg_), ValidationError);
}

TEST(SelectBandwidth, SeparableDataScoresPerfectly) {
    Rng rng(10);
    const TrainSet ts = cluster_train_set(rng, 15, 4, 1.0, 20.0, 0.1);
    const CvReport r = select_bandwidth(ts, {}, kDefaultBandwidthFactors, 5, 1);
    EXPECT_EQ(r.entries.size(), std::size(kDefaultBandwidthFactors));
    EXPECT_EQ(r.folds, 5u);
    EXPECT_EQ(r.chosen_accuracy, 1.0);
    EXPECT_NEAR(r.base_gamma, std::sqrt(r.median_lem_sq), 1e-15);
    for (const auto& e : r.entries) EXPECT_NEAR(e.gamma, e.factor * r.base_gamma, 1e-15);
}

TEST(SelectBandwidth, MedianHeuristic) {
    // Three samples at log distance 1, 2, 3 along one axis: pairwise squared
    // distances {1, 4, 1}, median 1.
    TrainSet ts;
    for (double t : {0.0, 1.0, 2.0}) {
        Matrix m = Matrix::identity(2);
        m(0, 0) = std::exp(t);
        ts.samples.push_back({SpdMatrix(m), t > 0.5 ? 1 : 0, ts.samples.size()});
    }
    const CvReport r = select_bandwidth(ts, {}, std::vector<double>{1.0}, 2, 1);
    EXPECT_NEAR(r.median_lem_sq, 1.0, 1e-12);
    EXPECT_NEAR(r.chosen_gamma, 1.0, 1e-12);
}

TEST(SelectBandwidth, ShuffleInvariant) {
    Rng rng(11);
    TrainSet ts = cluster_train_set(rng, 20, 4, 1.0, 1.6, 1.0);
    const CvReport a = select_bandwidth(ts, {}, kDefaultBandwidthFactors, 5, 9);
    std::reverse(ts.samples.begin(), ts.samples.end());
    const CvReport b = select_bandwidth(ts, {}, kDefaultBandwidthFactors, 5, 9);
    EXPECT_EQ(a.chosen_gamma, b.chosen_gamma);
    for (std::size_t k = 0; k < a.entries.size(); ++k) EXPECT_EQ(a.entries[k].accuracy, b.entries[k].accuracy);
}

TEST(SelectBandwidth, FoldsKeepGroupsTogether) {
    // Two samples per group with opposite labels and identical matrices:
    // if a group were split, the held-out twin would be memorized wrongly.
    Rng rng(12);
    TrainSet ts;
    for (std::size_t g = 0; g < 6; ++g) {
        const SpdMatrix s = random_spd(rng, 3, 0.5, 2.0);
        ts.samples.push_back({s, 0, g});
        ts.samples.push_back({s, 1, g});
    }
    const CvReport r = select_bandwidth(ts, {}, std::vector<double>{1.0}, 3, 4);
    EXPECT_EQ(r.folds, 3u);
    EXPECT_EQ(r.entries.front().accuracy, 0.5);
}

TEST(SelectBandwidth, Errors) {
    Rng rng(13);
    const TrainSet ts = cluster_train_set(rng, 3, 2, 1.0, 5.0, 0.1);
    EXPECT_THROW(select_bandwidth(ts, {}, std::vector<double>{}, 5, 1), ValidationError);
    EXPECT_THROW(select_bandwidth(ts, {}, kDefaultBandwidthFactors, 1, 1), ValidationError);
}

}  // namespace
}  // namespace lemsched
