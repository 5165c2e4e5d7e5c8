#include "lemsched/bench_harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lemsched/baseline_schedulers.hpp"
#include "lemsched/error.hpp"
#include "lemsched/rng.hpp"
#include "lemsched/serialization.hpp"

namespace lemsched {

using nlohmann::json;

namespace {

constexpr std::uint64_t kFadingTag = 0xFAD1;
constexpr std::uint64_t kRandomSchemeTag = 0x5EED;
constexpr std::uint64_t kGroupStride = 1'000'000;

std::uint64_t split_tag(Split s) {
    switch (s) {
        case Split::train: return 1;
        case Split::test: return 2;
        case Split::timing: return 3;
    }
    return 0;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
    if (s.size() != 16 || s.find_first_not_of("0123456789abcdef") != std::string::npos)
        throw ValidationError("dataset record: malformed checksum '" + s + "'");
    return std::stoull(s, nullptr, 16);
}

// Reads `key` into `out` if present and erases it from `obj`, so leftovers
// can be reported as unknown.
template <typename T>
void take(json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        out = it->get<T>();
        obj.erase(it);
    }
}

void reject_leftovers(const json& obj, const std::string& where) {
    if (!obj.empty()) throw ValidationError("config: unknown key '" + obj.begin().key() + "' in " + where);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::test: return "test";
        case Split::timing: return "timing";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    sim.validate();
    embed.validate();
    hyper.validate();
    if (n_train_layouts < 1) throw ValidationError("config: n_train_layouts must be >= 1");
    if (n_test_layouts < 1) throw ValidationError("config: n_test_layouts must be >= 1");
    if (field_lengths.empty()) throw ValidationError("config: field_lengths is empty");
    for (double L : field_lengths) {
        SimConfig s = sim;
        s.field_length = L;
        s.validate();
    }
    if (select_bandwidth && bandwidth_factors.empty()) throw ValidationError("config: bandwidth_factors is empty");
    for (double f : bandwidth_factors)
        if (!(f > 0.0)) throw ValidationError("config: bandwidth factors must be positive");
    if (select_bandwidth && cv_folds < 2) throw ValidationError("config: cv_folds must be >= 2");
    if (sim.K > kExhaustiveMaxPairs) throw ValidationError("config: K too large for exact labeling");
    if (label_fading_draws == 0 || label_fading_draws % 2 == 0)
        throw ValidationError("config: label_fading_draws must be odd");
}

std::string experiment_to_json(const ExperimentSpec& spec) {
    const SimConfig& s = spec.sim;
    json j;
    j["sim"] = {{"K", s.K},
                {"d_min", s.d_min},
                {"d_max", s.d_max},
                {"carrier_freq_hz", s.carrier_freq},
                {"bandwidth_hz", s.bandwidth},
                {"tx_power_dbm", s.tx_power_dbm},
                {"antenna_height_m", s.antenna_height},
                {"antenna_gain_db", s.antenna_gain_db},
                {"noise_psd_dbm_hz", s.noise_psd_dbm_hz},
                {"pathloss", to_string(s.pathloss)},
                {"alpha", s.alpha}};
    j["embedding"] = {{"gamma_reg", spec.embed.gamma_reg},
                      {"weight_normalization", spec.embed.weight_normalization == WeightNormalization::none
                                                   ? "none"
                                                   : "divide_by_field_length"},
                      {"node_order", spec.embed.node_order == NodeOrder::absolute ? "absolute" : "link_centric"}};
    j["svm"] = {{"C", spec.hyper.C},
                {"tol", spec.hyper.tol},
                {"max_iterations", spec.hyper.max_iterations},
                {"balance_classes", spec.hyper.balance_classes},
                {"gamma_kernel", spec.hyper.kernel.gamma_kernel},
                {"kernel_exponent", to_string(spec.hyper.kernel.exponent)},
                {"select_bandwidth", spec.select_bandwidth},
                {"bandwidth_factors", spec.bandwidth_factors},
                {"cv_folds", spec.cv_folds}};
    j["n_train_layouts"] = spec.n_train_layouts;
    j["n_test_layouts"] = spec.n_test_layouts;
    j["field_lengths"] = spec.field_lengths;
    j["master_seed"] = spec.master_seed;
    j["pooled"] = spec.pooled;
    j["label_fading_draws"] = spec.label_fading_draws;
    return j.dump(2) + "\n";
}

ExperimentSpec experiment_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config: top level must be an object");

    ExperimentSpec spec;
    try {
        if (auto it = j.find("sim"); it != j.end()) {
            json s = *it;
            SimConfig& c = spec.sim;
            take(s, "K", c.K);
            take(s, "d_min", c.d_min);
            take(s, "d_max", c.d_max);
            take(s, "carrier_freq_hz", c.carrier_freq);
            take(s, "bandwidth_hz", c.bandwidth);
            take(s, "tx_power_dbm", c.tx_power_dbm);
            take(s, "antenna_height_m", c.antenna_height);
            take(s, "antenna_gain_db", c.antenna_gain_db);
            take(s, "noise_psd_dbm_hz", c.noise_psd_dbm_hz);
            std::string pl = to_string(c.pathloss);
            take(s, "pathloss", pl);
            c.pathloss = pathloss_from_string(pl);
            take(s, "alpha", c.alpha);
            reject_leftovers(s, "sim");
            j.erase(it);
        }
        if (auto it = j.find("embedding"); it != j.end()) {
            json e = *it;
            take(e, "gamma_reg", spec.embed.gamma_reg);
            std::string wn = spec.embed.weight_normalization == WeightNormalization::none ? "none"
                                                                                           : "divide_by_field_length";
            take(e, "weight_normalization", wn);
            if (wn == "none") spec.embed.weight_normalization = WeightNormalization::none;
            else if (wn == "divide_by_field_length")
                spec.embed.weight_normalization = WeightNormalization::divide_by_field_length;
            else throw ValidationError("config: unknown weight_normalization '" + wn + "'");
            std::string order = spec.embed.node_order == NodeOrder::absolute ? "absolute" : "link_centric";
            take(e, "node_order", order);
            if (order == "absolute") spec.embed.node_order = NodeOrder::absolute;
            else if (order == "link_centric") spec.embed.node_order = NodeOrder::link_centric;
            else throw ValidationError("config: unknown node_order '" + order + "'");
            reject_leftovers(e, "embedding");
            j.erase(it);
        }
        if (auto it = j.find("svm"); it != j.end()) {
            json s = *it;
            take(s, "C", spec.hyper.C);
            take(s, "tol", spec.hyper.tol);
            take(s, "max_iterations", spec.hyper.max_iterations);
            take(s, "balance_classes", spec.hyper.balance_classes);
            take(s, "gamma_kernel", spec.hyper.kernel.gamma_kernel);
            std::string ke = to_string(spec.hyper.kernel.exponent);
            take(s, "kernel_exponent", ke);
            spec.hyper.kernel.exponent = kernel_exponent_from_string(ke);
            take(s, "select_bandwidth", spec.select_bandwidth);
            take(s, "bandwidth_factors", spec.bandwidth_factors);
            take(s, "cv_folds", spec.cv_folds);
            reject_leftovers(s, "svm");
            j.erase(it);
        }
        take(j, "n_train_layouts", spec.n_train_layouts);
        take(j, "n_test_layouts", spec.n_test_layouts);
        take(j, "field_lengths", spec.field_lengths);
        take(j, "master_seed", spec.master_seed);
        take(j, "pooled", spec.pooled);
        take(j, "label_fading_draws", spec.label_fading_draws);
        reject_leftovers(j, "top level");
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment(const std::string& path_or_default) {
    if (path_or_default.empty() || path_or_default == "default") return ExperimentSpec{};
    return experiment_from_json(read_text_file(path_or_default));
}

SimConfig sim_config_for(const ExperimentSpec& spec, double field_length, Split split) {
    SimConfig c = spec.sim;
    c.field_length = field_length;
    c.seed = derive_seed(derive_seed(spec.master_seed, split_tag(split)), std::bit_cast<std::uint64_t>(field_length));
    return c;
}

std::uint64_t fading_seed_for(const Layout& layout) {
    return derive_seed(layout_seed(layout.config, layout.index), kFadingTag);
}

std::uint64_t fading_draw_seed(std::uint64_t fading_seed, std::size_t draw) {
    return draw == 0 ? fading_seed : derive_seed(fading_seed, draw);
}

ScheduleDecision majority_label(const Layout& layout, std::uint64_t fading_seed, std::size_t draws) {
    if (draws == 0) throw ValidationError("majority_label: need at least one draw");
    const std::size_t K = layout.pair_count();
    std::vector<std::size_t> votes(K, 0);
    for (std::size_t k = 0; k < draws; ++k) {
        const auto best = exhaustive_optimal(realize_channel(layout, fading_draw_seed(fading_seed, k)), layout.config);
        for (std::size_t q = 0; q < K; ++q) votes[q] += best.decision.d[q];
    }
    ScheduleDecision d{std::vector<std::uint8_t>(K)};
    for (std::size_t q = 0; q < K; ++q) d.d[q] = 2 * votes[q] > draws ? 1 : 0;
    return d;
}

std::uint64_t embedding_checksum(const SpdMatrix& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : s.matrix().data()) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof v);
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::size_t Dataset::sample_count() const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.layout.pair_count();
    return n;
}

std::vector<Layout> generate_layouts(const ExperimentSpec& spec, Split split, double field_length) {
    const SimConfig cfg = sim_config_for(spec, field_length, split);
    const std::size_t count = split == Split::train ? spec.n_train_layouts : spec.n_test_layouts;
    std::vector<Layout> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(generate_layout(cfg, i));
    return out;
}

Dataset build_dataset(const ExperimentSpec& spec, Split split, double field_length) {
    return build_dataset(spec, split, field_length, generate_layouts(spec, split, field_length));
}

Dataset build_dataset(const ExperimentSpec& spec, Split split, double field_length, std::vector<Layout> layouts) {
    spec.validate();
    Dataset ds{field_length, split, {}};
    for (auto& layout : layouts) {
        if (layout.config.field_length != field_length)
            throw ValidationError("build_dataset: layout field length does not match");
        LabeledLayout rec;
        rec.fading_seed = fading_seed_for(layout);
        const ChannelRealization ch = realize_channel(layout, rec.fading_seed);
        auto best = exhaustive_optimal(ch, layout.config);
        rec.label = std::move(best.decision);
        rec.best_rate = best.rate;
        rec.train_label = split == Split::train && spec.label_fading_draws > 1
                              ? majority_label(layout, rec.fading_seed, spec.label_fading_draws)
                              : rec.label;
        for (const auto& e : embed_layout(layout, spec.embed)) rec.embedding_checksums.push_back(embedding_checksum(e.s_dq));
        rec.layout = std::move(layout);
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
    std::string text;
    for (const auto& r : ds.records) {
        json j = json::parse(layout_to_jsonl(r.layout));
        j["fading_seed"] = r.fading_seed;
        j["label"] = r.label.d;
        j["best_rate"] = r.best_rate;
        j["train_label"] = r.train_label.d;
        json sums = json::array();
        for (auto c : r.embedding_checksums) sums.push_back(hex64(c));
        j["embedding_checksums"] = std::move(sums);
        text += j.dump() + "\n";
    }
    write_text_file(path, text);
}

Dataset read_dataset(const std::filesystem::path& path, const ExperimentSpec& spec, Split split) {
    std::istringstream in(read_text_file(path));
    Dataset ds{0.0, split, {}};
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        LabeledLayout rec;
        try {
            const json j = json::parse(line);
            const double L = j.at("field_length").get<double>();
            rec.layout = layout_from_jsonl(line, sim_config_for(spec, L, split));
            rec.fading_seed = j.at("fading_seed").get<std::uint64_t>();
            rec.label.d = j.at("label").get<std::vector<std::uint8_t>>();
            rec.best_rate = j.at("best_rate").get<double>();
            rec.train_label.d = j.at("train_label").get<std::vector<std::uint8_t>>();
            for (const auto& c : j.at("embedding_checksums")) rec.embedding_checksums.push_back(parse_hex64(c.get<std::string>()));
            ds.field_length = L;
        } catch (const json::exception& e) {
            throw ValidationError("dataset '" + path.string() + "': " + e.what());
        }
        if (rec.label.size() != rec.layout.pair_count() || rec.train_label.size() != rec.layout.pair_count() ||
            rec.embedding_checksums.size() != rec.layout.pair_count())
            throw ValidationError("dataset '" + path.string() + "': record length does not match K");
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

void verify_dataset(const Dataset& ds, const ExperimentSpec& spec) {
    for (const auto& r : ds.records) {
        const ChannelRealization ch = realize_channel(r.layout, r.fading_seed);
        const double rate = sum_rate(ch, r.label, r.layout.config);
        if (std::abs(rate - r.best_rate) > 1e-9 * std::max(1.0, std::abs(r.best_rate)))
            throw ValidationError("dataset: stored rate of layout " + std::to_string(r.layout.index) + " does not reproduce");
        const auto emb = embed_layout(r.layout, spec.embed);
        for (std::size_t q = 0; q < emb.size(); ++q)
            if (embedding_checksum(emb[q].s_dq) != r.embedding_checksums[q])
                throw ValidationError("dataset: embedding checksum mismatch in layout " + std::to_string(r.layout.index));
    }
}

TrainSet make_train_set(std::span<const Dataset> datasets, const EmbeddingConfig& cfg) {
    TrainSet ts;
    for (std::size_t k = 0; k < datasets.size(); ++k)
        for (const auto& r : datasets[k].records) {
            const auto emb = embed_layout(r.layout, cfg);
            for (std::size_t q = 0; q < emb.size(); ++q)
                ts.samples.push_back({emb[q].s_dq, r.train_label.d[q], k * kGroupStride + r.layout.index});
            ++ts.layout_count;
            ts.pair_count = r.layout.pair_count();
        }
    return ts;
}

TrainingResult run_training(const ExperimentSpec& spec, std::span<const Dataset> datasets) {
    spec.validate();
    const TrainSet ts = make_train_set(datasets, spec.embed);
    ts.validate();
    SvmHyper hp = spec.hyper;
    std::optional<CvReport> cv;
    if (spec.select_bandwidth && ts.has_both_classes()) {
        cv = select_bandwidth(ts, hp, spec.bandwidth_factors, spec.cv_folds, derive_seed(spec.master_seed, 0xC5));
        hp.kernel.gamma_kernel = cv->chosen_gamma;
    }
    return {train(ts, hp), std::move(cv)};
}

std::string cv_report_csv(const CvReport& cv) {
    std::string out = "factor,gamma_kernel,cv_accuracy_pct,chosen\n";
    for (const auto& e : cv.entries)
        out += fmt("%g", e.factor) + "," + fmt("%.10g", e.gamma) + "," + fmt("%.4f", 100.0 * e.accuracy) + "," +
               (e.gamma == cv.chosen_gamma ? "1" : "0") + "\n";
    return out;
}

const SchemeResult& EvalReport::scheme(std::string_view name) const {
    for (const auto& s : schemes)
        if (s.scheme == name) return s;
    throw ValidationError("EvalReport: no scheme '" + std::string(name) + "'");
}

EvalReport run_eval(const ExperimentSpec& spec, const SvmModel& model, const Dataset& test, const EvalOptions& opts) {
    if (test.records.empty()) throw ValidationError("run_eval: empty test dataset");
    const std::vector<std::string_view> names{kSchemeKernel, kSchemeExhaustive, kSchemeGreedy,
                                              kSchemeStrongest, kSchemeRandom, kSchemeAllActive};
    EvalReport rep;
    rep.field_length = test.field_length;
    rep.layouts = test.records.size();
    rep.pairs = test.records.front().layout.pair_count();
    rep.master_seed = spec.master_seed;
    rep.test_seed = test.records.front().layout.config.seed;
    rep.gamma_kernel = model.hyper().kernel.gamma_kernel;
    for (auto n : names) {
        SchemeResult sr;
        sr.scheme = std::string(n);
        rep.schemes.push_back(std::move(sr));
    }

    std::vector<std::size_t> active(names.size(), 0), agree(names.size(), 0);
    std::size_t links = 0;
    for (const auto& r : test.records) {
        const SimConfig& cfg = r.layout.config;
        const ChannelRealization ch = realize_channel(r.layout, r.fading_seed);
        const auto emb = embed_layout(r.layout, spec.embed);
        const auto opt = exhaustive_optimal(ch, cfg);
        const std::vector<ScheduleDecision> decisions{
            predict_layout(model, emb, ch, cfg),
            opt.decision,
            greedy(ch, cfg),
            strongest_link(ch, cfg),
            random_schedule(cfg.K, derive_seed(r.fading_seed, kRandomSchemeTag)),
            all_active(cfg.K),
        };
        for (std::size_t s = 0; s < names.size(); ++s) {
            rep.schemes[s].layout_rates.push_back(sum_rate(ch, decisions[s], cfg));
            rep.schemes[s].decisions.push_back(decisions[s]);
            active[s] += decisions[s].active_count();
            for (std::size_t q = 0; q < cfg.K; ++q) agree[s] += decisions[s].d[q] == r.label.d[q];
        }
        links += cfg.K;
    }

    const double oracle_mean = mean(rep.schemes[1].layout_rates);
    for (std::size_t s = 0; s < names.size(); ++s) {
        auto& sr = rep.schemes[s];
        sr.mean_rate_bps = mean(sr.layout_rates);
        sr.ratio_pct = oracle_mean > 0.0 ? 100.0 * sr.mean_rate_bps / oracle_mean : 0.0;
        sr.activation_pct = 100.0 * static_cast<double>(active[s]) / static_cast<double>(links);
        sr.accuracy_pct = 100.0 * static_cast<double>(agree[s]) / static_cast<double>(links);
    }

    if (opts.measure_timing) {
        using clock = std::chrono::steady_clock;
        const SimConfig cfg = sim_config_for(spec, test.field_length, Split::timing);
        std::vector<Layout> layouts;
        std::vector<ChannelRealization> channels;
        for (std::size_t i = 0; i < opts.timing_layouts; ++i) {
            layouts.push_back(generate_layout(cfg, i));
            channels.push_back(realize_channel(layouts.back(), fading_seed_for(layouts.back())));
        }
        std::size_t sink = 0;
        auto time_scheme = [&](std::size_t s) {
            std::vector<double> runs;
            for (std::size_t rep_i = 0; rep_i < opts.timing_repeats; ++rep_i) {
                const auto t0 = clock::now();
                for (std::size_t i = 0; i < layouts.size(); ++i) {
                    const auto& ch = channels[i];
                    ScheduleDecision d;
                    switch (s) {
                        case 0: d = predict_layout(model, embed_layout(layouts[i], spec.embed), ch, cfg); break;
                        case 1: d = exhaustive_optimal(ch, cfg).decision; break;
                        case 2: d = greedy(ch, cfg); break;
                        case 3: d = strongest_link(ch, cfg); break;
                        case 4: d = random_schedule(cfg.K, derive_seed(fading_seed_for(layouts[i]), kRandomSchemeTag)); break;
                        default: d = all_active(cfg.K); break;
                    }
                    sink += d.active_count();
                }
                runs.push_back(std::chrono::duration<double>(clock::now() - t0).count());
            }
            (void)sink;
            return median(runs);
        };
        for (std::size_t s = 0; s < names.size(); ++s) rep.schemes[s].time_s = time_scheme(s);
    }
    return rep;
}

double measure_kernel_inference_seconds(const ExperimentSpec& spec, const SvmModel& model, double field_length,
                                        std::size_t layouts, std::size_t repeats) {
    using clock = std::chrono::steady_clock;
    const SimConfig cfg = sim_config_for(spec, field_length, Split::timing);
    std::vector<Layout> ls;
    std::vector<ChannelRealization> chs;
    for (std::size_t i = 0; i < layouts; ++i) {
        ls.push_back(generate_layout(cfg, i));
        chs.push_back(realize_channel(ls.back(), fading_seed_for(ls.back())));
    }
    std::vector<double> runs;
    std::size_t sink = 0;
    for (std::size_t r = 0; r < repeats; ++r) {
        const auto t0 = clock::now();
        for (std::size_t i = 0; i < ls.size(); ++i)
            sink += predict_layout(model, embed_layout(ls[i], spec.embed), chs[i], cfg).active_count();
        runs.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    }
    (void)sink;
    return median(runs);
}

std::string results_csv_rows(const EvalReport& report) {
    std::string out;
    for (const auto& s : report.schemes) {
        out += fmt("%g", report.field_length) + "," + s.scheme + "," + fmt("%.3f", s.mean_rate_bps) + "," +
               fmt("%.4f", s.ratio_pct) + "," + fmt("%.4f", s.activation_pct) + "," + fmt("%.4f", s.accuracy_pct) + "," +
               (s.time_s ? fmt("%.6f", *s.time_s) : std::string()) + "\n";
    }
    return out;
}

std::string eval_report_json(const EvalReport& report, const ExperimentSpec& spec) {
    json j;
    j["field_length"] = report.field_length;
    j["layouts"] = report.layouts;
    j["pairs"] = report.pairs;
    j["master_seed"] = report.master_seed;
    j["test_seed"] = report.test_seed;
    j["gamma_kernel"] = report.gamma_kernel;
    j["fading"] = "one Rayleigh realization per layout, seeded per layout";
    j["training_labels"] = "per-link majority of the exact optimum over " + std::to_string(spec.label_fading_draws) +
                           " fading draws";
    json schemes = json::array();
    for (const auto& s : report.schemes) {
        json js = {{"scheme", s.scheme},
                   {"mean_rate_bps", s.mean_rate_bps},
                   {"ratio_pct", s.ratio_pct},
                   {"activation_pct", s.activation_pct},
                   {"accuracy_pct", s.accuracy_pct}};
        if (s.time_s) js["time_s"] = *s.time_s;
        schemes.push_back(std::move(js));
    }
    j["schemes"] = std::move(schemes);
    j["config"] = json::parse(experiment_to_json(spec));
    return j.dump(2) + "\n";
}

std::string field_tag(double field_length) { return fmt("%g", field_length); }

std::filesystem::path dataset_path(const std::filesystem::path& dir, Split split, double field_length) {
    return dir / ("dataset_" + to_string(split) + "_" + field_tag(field_length) + ".jsonl");
}

std::filesystem::path layouts_path(const std::filesystem::path& dir, Split split, double field_length) {
    return dir / ("layouts_" + to_string(split) + "_" + field_tag(field_length) + ".jsonl");
}

std::filesystem::path model_path(const std::filesystem::path& dir, std::optional<double> field_length) {
    return dir / (field_length ? "model_" + field_tag(*field_length) + ".json" : std::string("model_pooled.json"));
}

std::vector<EvalReport> run_bench(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                                  const EvalOptions& opts) {
    spec.validate();
    std::vector<Dataset> train_sets, test_sets;
    for (double L : spec.field_lengths) {
        train_sets.push_back(build_dataset(spec, Split::train, L));
        test_sets.push_back(build_dataset(spec, Split::test, L));
        write_dataset(dataset_path(out_dir, Split::train, L), train_sets.back());
        write_dataset(dataset_path(out_dir, Split::test, L), test_sets.back());
    }

    std::optional<TrainingResult> pooled;
    if (spec.pooled) {
        pooled = run_training(spec, train_sets);
        save_model(pooled->model, model_path(out_dir, std::nullopt));
        if (pooled->cv) write_text_file(out_dir / "cv_pooled.csv", cv_report_csv(*pooled->cv));
    }

    std::vector<EvalReport> reports;
    std::string all = std::string(kResultsCsvHeader) + "\n";
    for (std::size_t k = 0; k < spec.field_lengths.size(); ++k) {
        const double L = spec.field_lengths[k];
        std::optional<TrainingResult> local;
        if (!pooled) {
            local = run_training(spec, std::span<const Dataset>(&train_sets[k], 1));
            save_model(local->model, model_path(out_dir, L));
            if (local->cv) write_text_file(out_dir / ("cv_" + field_tag(L) + ".csv"), cv_report_csv(*local->cv));
        }
        const SvmModel& model = pooled ? pooled->model : local->model;
        EvalReport rep = run_eval(spec, model, test_sets[k], opts);
        const std::string rows = results_csv_rows(rep);
        write_text_file(out_dir / ("results_" + field_tag(L) + ".csv"), std::string(kResultsCsvHeader) + "\n" + rows);
        write_text_file(out_dir / ("report_" + field_tag(L) + ".json"), eval_report_json(rep, spec));
        all += rows;
        reports.push_back(std::move(rep));
    }
    write_text_file(out_dir / "results.csv", all);
    return reports;
}

}  // namespace lemsched
