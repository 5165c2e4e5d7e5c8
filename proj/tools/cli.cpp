#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lemsched/bench_harness.hpp"
#include "lemsched/error.hpp"
#include "lemsched/serialization.hpp"

namespace lemsched::cli {

namespace {

struct Options {
    std::string config = "default";
    std::optional<std::uint64_t> seed;
    std::string out = "lemsched_out";
    std::optional<double> field_length;
    std::optional<std::size_t> k;
    bool pooled = false;
    bool timing = false;
};

void add_common(CLI::App* sc, Options& o) {
    sc->add_option("--config", o.config, "Experiment config (JSON file, or 'default')")->capture_default_str();
    sc->add_option("--seed", o.seed, "Master seed (overrides the config)");
    sc->add_option("--out", o.out, "Output directory")->capture_default_str();
    sc->add_option("--field-length", o.field_length, "Run a single field length in meters");
    sc->add_option("--k", o.k, "Number of D2D pairs (overrides the config)");
}

ExperimentSpec resolve(const Options& o) {
    ExperimentSpec spec = load_experiment(o.config);
    if (o.seed) spec.master_seed = *o.seed;
    if (o.k) spec.sim.K = *o.k;
    if (o.field_length) spec.field_lengths = {*o.field_length};
    if (o.pooled) spec.pooled = true;
    spec.validate();
    return spec;
}

EvalOptions eval_options(const Options& o) {
    EvalOptions e;
    e.measure_timing = o.timing;
    return e;
}

void print_results(const std::vector<EvalReport>& reports, std::ostream& out) {
    out << kResultsCsvHeader << "\n";
    for (const auto& r : reports) out << results_csv_rows(r);
}

void cmd_generate(const Options& o, std::ostream& out) {
    const ExperimentSpec spec = resolve(o);
    for (double L : spec.field_lengths)
        for (Split split : {Split::train, Split::test}) {
            const auto path = layouts_path(o.out, split, L);
            const auto layouts = generate_layouts(spec, split, L);
            write_layouts(path, layouts);
            out << "wrote " << path.string() << " (" << layouts.size() << " layouts)\n";
        }
}

void cmd_label(const Options& o, std::ostream& out) {
    const ExperimentSpec spec = resolve(o);
    for (double L : spec.field_lengths)
        for (Split split : {Split::train, Split::test}) {
            auto layouts = read_layouts(layouts_path(o.out, split, L), sim_config_for(spec, L, split));
            for (const auto& l : layouts)
                if (l.pair_count() != spec.sim.K)
                    throw ValidationError("layout file has K=" + std::to_string(l.pair_count()) + ", config has K=" +
                                          std::to_string(spec.sim.K));
            const Dataset ds = build_dataset(spec, split, L, std::move(layouts));
            const auto path = dataset_path(o.out, split, L);
            write_dataset(path, ds);
            out << "wrote " << path.string() << " (" << ds.sample_count() << " labeled links)\n";
        }
}

void report_training(const TrainingResult& r, const std::string& what, std::ostream& out) {
    out << what << ": gamma_kernel=" << r.model.hyper().kernel.gamma_kernel
        << " support_points=" << r.model.support_points().size();
    if (r.cv) out << " cv_accuracy_pct=" << 100.0 * r.cv->chosen_accuracy;
    if (!r.model.converged()) out << " (iteration cap reached)";
    out << "\n";
}

void cmd_train(const Options& o, std::ostream& out) {
    const ExperimentSpec spec = resolve(o);
    std::vector<Dataset> sets;
    for (double L : spec.field_lengths) sets.push_back(read_dataset(dataset_path(o.out, Split::train, L), spec, Split::train));
    if (spec.pooled) {
        const TrainingResult r = run_training(spec, sets);
        save_model(r.model, model_path(o.out, std::nullopt));
        if (r.cv) write_text_file(std::filesystem::path(o.out) / "cv_pooled.csv", cv_report_csv(*r.cv));
        report_training(r, "pooled", out);
        return;
    }
    for (std::size_t k = 0; k < sets.size(); ++k) {
        const double L = spec.field_lengths[k];
        const TrainingResult r = run_training(spec, std::span<const Dataset>(&sets[k], 1));
        save_model(r.model, model_path(o.out, L));
        if (r.cv) write_text_file(std::filesystem::path(o.out) / ("cv_" + field_tag(L) + ".csv"), cv_report_csv(*r.cv));
        report_training(r, field_tag(L) + " m", out);
    }
}

void cmd_eval(const Options& o, std::ostream& out) {
    const ExperimentSpec spec = resolve(o);
    const std::filesystem::path dir = o.out;
    std::vector<EvalReport> reports;
    std::string all = std::string(kResultsCsvHeader) + "\n";
    for (double L : spec.field_lengths) {
        const SvmModel model = load_model(model_path(dir, spec.pooled ? std::nullopt : std::optional<double>(L)));
        const Dataset test = read_dataset(dataset_path(dir, Split::test, L), spec, Split::test);
        verify_dataset(test, spec);
        EvalReport rep = run_eval(spec, model, test, eval_options(o));
        const std::string rows = results_csv_rows(rep);
        write_text_file(dir / ("results_" + field_tag(L) + ".csv"), std::string(kResultsCsvHeader) + "\n" + rows);
        write_text_file(dir / ("report_" + field_tag(L) + ".json"), eval_report_json(rep, spec));
        all += rows;
        reports.push_back(std::move(rep));
    }
    write_text_file(dir / "results.csv", all);
    print_results(reports, out);
}

void cmd_bench(const Options& o, std::ostream& out) {
    const ExperimentSpec spec = resolve(o);
    print_results(run_bench(spec, o.out, eval_options(o)), out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Graph-kernel D2D link scheduling: data generation, training and evaluation", "lemsched"};
    app.require_subcommand(1);

    Options o;
    std::function<void(const Options&, std::ostream&)> action;

    auto* gen = app.add_subcommand("generate", "Generate train/test layouts");
    add_common(gen, o);
    gen->callback([&] { action = cmd_generate; });

    auto* lab = app.add_subcommand("label", "Label generated layouts with the exact optimum");
    add_common(lab, o);
    lab->callback([&] { action = cmd_label; });

    auto* tr = app.add_subcommand("train", "Train kernel SVM models from labeled datasets");
    add_common(tr, o);
    tr->add_flag("--pooled", o.pooled, "Train one model across all field lengths");
    tr->callback([&] { action = cmd_train; });

    auto* ev = app.add_subcommand("eval", "Evaluate all schedulers on the test datasets");
    add_common(ev, o);
    ev->add_flag("--pooled", o.pooled, "Use the pooled model");
    ev->add_flag("--timing", o.timing, "Measure inference time (fills the time_s column)");
    ev->callback([&] { action = cmd_eval; });

    auto* be = app.add_subcommand("bench", "Full pipeline for every field length");
    add_common(be, o);
    be->add_flag("--pooled", o.pooled, "Train one model across all field lengths");
    be->add_flag("--timing", o.timing, "Measure inference time (fills the time_s column)");
    be->callback([&] { action = cmd_bench; });

    std::vector<std::string> storage{"lemsched"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto parsed = app.get_subcommands();
        err << (parsed.empty() ? app.help() : parsed.front()->help());
        return kExitValidation;
    }

    try {
        action(o, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace lemsched::cli
