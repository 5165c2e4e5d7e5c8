#pragma once

// Experiment driver: dataset generation with exact labels, model training
// with bandwidth selection, paired evaluation of every scheduler, and the
// CSV / JSON files the command-line tool writes.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lemsched/channel_sim.hpp"
#include "lemsched/graph_embedding.hpp"
#include "lemsched/kernel_svm.hpp"

namespace lemsched {

enum class Split { train, test, timing };

std::string to_string(Split s);

struct ExperimentSpec {
    SimConfig sim;
    EmbeddingConfig embed;
    SvmHyper hyper;
    std::size_t n_train_layouts = 90;
    std::size_t n_test_layouts = 100;
    std::vector<double> field_lengths{350.0, 400.0, 450.0, 500.0};
    std::uint64_t master_seed = 20240101;
    bool select_bandwidth = true;
    std::vector<double> bandwidth_factors{std::begin(kDefaultBandwidthFactors), std::end(kDefaultBandwidthFactors)};
    std::size_t cv_folds = 5;
    bool pooled = false;  // one model across all field lengths
    /// Training labels are the per-link majority of the exact optimum over
    /// this many fading draws (draw 0 is the recorded realization). 1 uses
    /// the recorded realization alone. Must be odd.
    std::size_t label_fading_draws = 15;

    void validate() const;
};

/// JSON config. Missing keys keep their defaults; unknown keys are rejected.
std::string experiment_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_from_json(std::string_view text);
/// "default" (or an empty string) yields the built-in defaults; anything
/// else is a path. A missing file raises IoError.
ExperimentSpec load_experiment(const std::string& path_or_default);

/// Simulation config for one field length and split, with its derived seed.
SimConfig sim_config_for(const ExperimentSpec& spec, double field_length, Split split);

std::uint64_t fading_seed_for(const Layout& layout);

/// Seed of fading draw k for a layout whose recorded draw uses `fading_seed`.
std::uint64_t fading_draw_seed(std::uint64_t fading_seed, std::size_t draw);

/// Per-link majority of exhaustive_optimal over `draws` fading draws.
ScheduleDecision majority_label(const Layout& layout, std::uint64_t fading_seed, std::size_t draws);

/// FNV-1a over the IEEE-754 bytes of the entries.
std::uint64_t embedding_checksum(const SpdMatrix& s);

struct LabeledLayout {
    Layout layout;
    std::uint64_t fading_seed = 0;
    ScheduleDecision label;        // exact optimum on the recorded fading draw
    double best_rate = 0.0;        // its sum rate
    ScheduleDecision train_label;  // majority label used as the SVM target
    std::vector<std::uint64_t> embedding_checksums;
};

struct Dataset {
    double field_length = 0.0;
    Split split = Split::train;
    std::vector<LabeledLayout> records;

    std::size_t sample_count() const;
};

std::vector<Layout> generate_layouts(const ExperimentSpec& spec, Split split, double field_length);

/// Generates layouts, realizes one fading draw per layout, labels with the
/// exhaustive optimum and records embedding checksums. Training splits also
/// get majority labels.
Dataset build_dataset(const ExperimentSpec& spec, Split split, double field_length);
/// Same, for layouts produced earlier by generate_layouts (or read back from disk).
Dataset build_dataset(const ExperimentSpec& spec, Split split, double field_length, std::vector<Layout> layouts);

void write_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& path, const ExperimentSpec& spec, Split split);

/// Re-derives channels and embeddings from the stored records and checks
/// labels' rates (1e-9 relative) and checksums. Throws ValidationError.
void verify_dataset(const Dataset& ds, const ExperimentSpec& spec);

/// One sample per link labeled with train_label; group = layout (made
/// unique across datasets).
TrainSet make_train_set(std::span<const Dataset> datasets, const EmbeddingConfig& cfg);

struct TrainingResult {
    SvmModel model;
    std::optional<CvReport> cv;
};

TrainingResult run_training(const ExperimentSpec& spec, std::span<const Dataset> datasets);

std::string cv_report_csv(const CvReport& cv);

inline constexpr std::string_view kSchemeKernel = "gkernel";
inline constexpr std::string_view kSchemeExhaustive = "exhaustive";
inline constexpr std::string_view kSchemeGreedy = "greedy";
inline constexpr std::string_view kSchemeStrongest = "strongest_link";
inline constexpr std::string_view kSchemeRandom = "random";
inline constexpr std::string_view kSchemeAllActive = "all_active";

struct SchemeResult {
    std::string scheme;
    double mean_rate_bps = 0.0;
    double ratio_pct = 0.0;       // mean rate / mean exhaustive rate
    double activation_pct = 0.0;  // active links / all links
    double accuracy_pct = 0.0;    // per-link agreement with the exact labels
    std::optional<double> time_s;
    std::vector<double> layout_rates;
    std::vector<ScheduleDecision> decisions;
};

struct EvalReport {
    double field_length = 0.0;
    std::size_t layouts = 0;
    std::size_t pairs = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t test_seed = 0;
    double gamma_kernel = 0.0;
    std::vector<SchemeResult> schemes;

    const SchemeResult& scheme(std::string_view name) const;
};

struct EvalOptions {
    bool measure_timing = false;
    std::size_t timing_layouts = 10;
    std::size_t timing_repeats = 5;
};

/// All schemes are scored on the same (layout, fading) pairs.
EvalReport run_eval(const ExperimentSpec& spec, const SvmModel& model, const Dataset& test,
                    const EvalOptions& opts = {});

/// Median wall-clock seconds, over `repeats` runs, to embed and classify
/// `layouts` fresh layouts with the kernel model (single thread).
double measure_kernel_inference_seconds(const ExperimentSpec& spec, const SvmModel& model, double field_length,
                                        std::size_t layouts = 10, std::size_t repeats = 5);

inline constexpr std::string_view kResultsCsvHeader =
    "field_length,scheme,mean_rate_bps,ratio_pct,activation_pct,accuracy_pct,time_s";

/// Rows without the header; time_s is empty unless timing was measured.
std::string results_csv_rows(const EvalReport& report);
std::string eval_report_json(const EvalReport& report, const ExperimentSpec& spec);

/// Full pipeline for every field length. Writes datasets, models, CV tables,
/// results_<L>.csv, results.csv and report_<L>.json into `out_dir`.
std::vector<EvalReport> run_bench(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                                  const EvalOptions& opts = {});

/// File naming inside an output directory.
std::string field_tag(double field_length);
std::filesystem::path dataset_path(const std::filesystem::path& dir, Split split, double field_length);
std::filesystem::path layouts_path(const std::filesystem::path& dir, Split split, double field_length);
std::filesystem::path model_path(const std::filesystem::path& dir, std::optional<double> field_length);

}  // namespace lemsched
