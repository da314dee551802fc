#include "csonbr/harness.hpp"
#include "csonbr/nbr.hpp"
#include "csonbr/peak.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace csonbr;

namespace {

struct OptimizerFlags {
    std::size_t swarm = 100;
    std::size_t iters = 1000;
    std::size_t repeats = 10;
    bool quick = false;
    bool spso_half_swarm = false;
    bool spso_half_iters = false;
    std::size_t threads = 1;
};

void add_optimizer_flags(CLI::App& cmd, OptimizerFlags& f) {
    cmd.add_option("--swarm", f.swarm, "swarm size s");
    cmd.add_option("--iters", f.iters, "iterations t_max");
    cmd.add_option("--repeats", f.repeats, "independent runs per configuration");
    cmd.add_flag("--quick", f.quick, "CI profile: s=50, t_max=200, 3 repeats");
    cmd.add_option("--threads", f.threads, "worker threads for repeats (0 = all cores)");
}

// --quick only replaces values the user did not set explicitly.
void apply_quick(const CLI::App& cmd, OptimizerFlags& f) {
    if (!f.quick) return;
    if (cmd.count("--swarm") == 0) f.swarm = 50;
    if (cmd.count("--iters") == 0) f.iters = 200;
    if (cmd.count("--repeats") == 0) f.repeats = 3;
}

// Budget matching against CSO with the same s and t_max: halve the swarm
// (default) or, with --spso-half-iters, the iteration count.
SpsoConfig spso_from(const OptimizerFlags& f) {
    SpsoConfig c;
    c.swarm_size = f.spso_half_iters ? f.swarm : f.swarm / 2;
    c.iterations = f.spso_half_iters ? f.iters / 2 : f.iters;
    return c;
}

void print_peak_line(const char* label, double train_rmse, double test_rmse) {
    std::printf("%-8s train RMSE %8.4f   test RMSE %8.4f\n", label, train_rmse, test_rmse);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surrogate training data evolution for naive Bayes regression"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run an experiment on tabular datasets");
    std::vector<std::string> data_paths;
    std::string format = "csv";
    std::string target;
    std::string algo = "cso-nbr";
    std::vector<double> phis{0.1};
    std::vector<std::size_t> ns{10};
    std::uint64_t seed = 0;
    double split_fraction = 0.66;
    bool no_shuffle = false;
    bool no_timing = false;
    std::size_t subsample = 0;
    std::string out_dir = "results";
    OptimizerFlags run_flags;
    run->add_option("--data", data_paths, "dataset file(s)")->required();
    run->add_option("--format", format, "csv or arff")->check(CLI::IsMember({"csv", "arff"}));
    run->add_option("--target", target, "target attribute name or 0-based index (default: last column)");
    run->add_option("--algo", algo, "nbr, lr, cso-nbr or spso-nbr")
        ->check(CLI::IsMember({"nbr", "lr", "cso-nbr", "spso-nbr"}));
    run->add_option("--phi", phis, "phi values for the sweep")->delimiter(',');
    run->add_option("--n", ns, "surrogate sizes for the sweep")->delimiter(',');
    run->add_option("--seed", seed, "base seed");
    run->add_option("--split", split_fraction, "training fraction");
    run->add_flag("--no-shuffle", no_shuffle, "split without shuffling");
    run->add_flag("--no-timing", no_timing, "write zero wall times so reports are byte-stable");
    run->add_option("--fitness-subsample", subsample, "score fitness on a fixed subset of M training rows");
    run->add_option("--out", out_dir, "output directory");
    add_optimizer_flags(*run, run_flags);
    run->add_flag("--spso-half-swarm", run_flags.spso_half_swarm, "SPSO budget match: s=50, t_max=1000");
    run->add_flag("--spso-half-iters", run_flags.spso_half_iters, "SPSO budget match: s=100, t_max=500");

    // peak
    auto* peak = app.add_subcommand("peak", "synthetic peak problem with contour exports");
    std::size_t samples = 100;
    std::size_t test_samples = 100;
    std::uint64_t peak_seed = 0;
    double peak_phi = 0.1;
    std::size_t peak_n = 10;
    std::string peak_out = "peak";
    OptimizerFlags peak_flags;
    peak->add_option("--samples", samples, "training samples");
    peak->add_option("--test-samples", test_samples, "test samples");
    peak->add_option("--seed", peak_seed, "seed");
    peak->add_option("--phi", peak_phi, "CSO phi");
    peak->add_option("--n", peak_n, "surrogate size");
    peak->add_option("--out", peak_out, "output directory");
    add_optimizer_flags(*peak, peak_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            apply_quick(*run, run_flags);
            ExperimentSpec spec;
            for (const auto& p : data_paths) {
                DatasetSource src;
                src.path = p;
                src.format = format == "arff" ? FileFormat::Arff : FileFormat::Csv;
                src.target = target;
                spec.datasets.push_back(std::move(src));
            }
            spec.split_fraction = split_fraction;
            spec.shuffle = !no_shuffle;
            spec.seed = seed;
            spec.algorithm = parse_algorithm(algo);
            spec.phis = phis;
            spec.ns = ns;
            spec.threads = run_flags.threads;
            spec.record_timing = !no_timing;
            spec.pipeline.repeats = run_flags.repeats;
            if (subsample > 0) spec.pipeline.fitness_subsample = subsample;
            if (spec.algorithm == Algorithm::SpsoNbr) {
                spec.pipeline.optimizer = spso_from(run_flags);
            } else {
                CsoConfig c;
                c.swarm_size = run_flags.swarm;
                c.iterations = run_flags.iters;
                spec.pipeline.optimizer = c;
            }
            const auto results = run_experiment(spec);
            write_report(results, out_dir);
            for (const auto& r : results) std::cout << report_table(r) << "\n";
            std::cout << "reports written to " << out_dir << "\n";
            return 0;
        }

        apply_quick(*peak, peak_flags);
        PeakExperiment exp;
        exp.peak.samples = samples;
        exp.peak.seed = peak_seed;
        exp.test_samples = test_samples;
        exp.threads = peak_flags.threads;
        CsoConfig c;
        c.swarm_size = peak_flags.swarm;
        c.iterations = peak_flags.iters;
        c.phi = peak_phi;
        exp.pipeline.optimizer = c;
        exp.pipeline.rows = peak_n;
        exp.pipeline.repeats = peak_flags.repeats;
        exp.pipeline.seed = peak_seed;
        const PeakResult res = run_peak(exp);

        std::filesystem::create_directories(peak_out);
        const std::filesystem::path dir = peak_out;
        const ModeSearchConfig mode = exp.pipeline.mode;
        write_csv(res.train, dir / "train.csv");
        write_csv(res.test, dir / "test.csv");
        write_contour_csv(contour_grid([&](std::span<const double> row) { return peak_height(exp.peak, row[0], row[1]); },
                                       exp.peak),
                          dir / "contour_truth.csv");
        write_contour_csv(contour_grid([&](std::span<const double> row) { return res.lr.predict(row); }, exp.peak),
                          dir / "contour_lr.csv");
        const NbrPredictor nbr(res.nbr, mode);
        write_contour_csv(contour_grid([&](std::span<const double> row) { return nbr.predict(row); }, exp.peak),
                          dir / "contour_nbr.csv");
        const PeakRun& best = res.runs[res.best_run];
        const NbrPredictor cso(best.model, mode);
        write_contour_csv(contour_grid([&](std::span<const double> row) { return cso.predict(row); }, exp.peak),
                          dir / "contour_cso_nbr.csv");
        write_csv(best.surrogate, dir / "best_surrogate.csv");

        std::vector<double> tests, trains;
        double seconds = 0.0;
        for (const auto& r : res.runs) {
            tests.push_back(r.test_rmse);
            trains.push_back(r.train_rmse);
            seconds += r.wall_seconds;
        }
        const RunReport agg = aggregate(tests, res.nbr_test_rmse, {peak_phi, peak_n, c.swarm_size, c.iterations, peak_seed});
        nlohmann::json j;
        j["lr"] = {{"train_rmse", res.lr_train_rmse}, {"test_rmse", res.lr_test_rmse}, {"method", LinearModel::method_label}};
        j["nbr"] = {{"train_rmse", res.nbr_train_rmse}, {"test_rmse", res.nbr_test_rmse}};
        j["cso_nbr"] = {{"train_rmse", trains},         {"test_rmse", tests},
                        {"mean", agg.mean},             {"std", agg.stddev},
                        {"best", agg.best},             {"best_train_rmse", best.train_rmse},
                        {"p_value", agg.p_value ? nlohmann::json(*agg.p_value) : nlohmann::json(nullptr)},
                        {"wall_seconds_total", seconds}};
        j["config"] = {{"samples", samples}, {"test_samples", test_samples}, {"seed", peak_seed}, {"phi", peak_phi},
                       {"n", peak_n},       {"s", c.swarm_size},           {"t_max", c.iterations}, {"repeats", exp.pipeline.repeats}};
        std::ofstream(dir / "summary.json") << j.dump(2) << "\n";

        print_peak_line("LR", res.lr_train_rmse, res.lr_test_rmse);
        print_peak_line("NBR", res.nbr_train_rmse, res.nbr_test_rmse);
        print_peak_line("CSO-NBR", best.train_rmse, best.test_rmse);
        std::printf("CSO-NBR test RMSE over %zu runs: %s (best %.4f), %.2f s total\n", res.runs.size(),
                    format_mean_std(agg.mean, agg.stddev).c_str(), agg.best, seconds);
        std::cout << "contours written to " << peak_out << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
