#include "csonbr/harness.hpp"

#include "csonbr/parallel.hpp"
#include "csonbr/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace csonbr {

namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string file_safe(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')) c = '_';
    return out.empty() ? "dataset" : out;
}

std::string cell_stem(const DatasetResult& r, const RunReport& rep) {
    std::string stem = file_safe(r.dataset) + "_" + std::string(rep.algorithm);
    if (rep.config.phi) stem += "_phi" + shortest(*rep.config.phi);
    if (rep.config.n) stem += "_n" + std::to_string(rep.config.n);
    return stem;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Dataset load_source(const DatasetSource& src) {
    if (src.preloaded) return *src.preloaded;
    return load_dataset(src.path, src.format, src.target);
}

std::size_t expected_evaluations(const PipelineConfig& p) {
    if (const auto* c = std::get_if<CsoConfig>(&p.optimizer)) return c->swarm_size + c->swarm_size / 2 * c->iterations;
    const auto& s = std::get<SpsoConfig>(p.optimizer);
    return s.swarm_size * (s.iterations + 1);
}

struct RepeatOutcome {
    double test_rmse = 0.0;
    double seconds = 0.0;
    std::size_t evaluations = 0;
    Dataset surrogate;
};

std::vector<RepeatOutcome> run_repeats(const Dataset& train_data, const Dataset& test_data, PipelineConfig pipeline,
                                       std::size_t threads, bool timing,
                                       const std::function<std::uint64_t(std::size_t)>& seed_of) {
    std::vector<RepeatOutcome> out(pipeline.repeats);
    const std::size_t expected = expected_evaluations(pipeline);
    parallel_for(out.size(), threads == 0 ? default_thread_count() : threads, [&](std::size_t i) {
        PipelineConfig cfg = pipeline;
        cfg.seed = seed_of(i);
        const auto start = Clock::now();
        EvolveResult res = evolve(train_data, cfg);
        const double secs = timing ? seconds_since(start) : 0.0;
        if (res.optimization.evaluations != expected)
            throw std::logic_error("optimizer used " + std::to_string(res.optimization.evaluations) +
                                   " fitness evaluations, expected " + std::to_string(expected));
        out[i] = {rmse(res.model, test_data, cfg.mode), secs, res.optimization.evaluations, std::move(res.surrogate)};
    });
    return out;
}

Json report_to_json(const RunReport& r) {
    Json j;
    j["dataset"] = r.dataset;
    j["algo"] = r.algorithm;
    j["phi"] = r.config.phi ? Json(*r.config.phi) : Json(nullptr);
    j["n"] = r.config.n;
    j["s"] = r.config.swarm_size;
    j["t_max"] = r.config.iterations;
    j["seed"] = r.config.seed;
    j["repeats"] = r.samples.size();
    j["baseline_nbr_rmse"] = r.baseline;
    j["lr_rmse"] = r.lr_rmse ? Json(*r.lr_rmse) : Json(nullptr);
    j["samples"] = r.samples;
    j["mean"] = r.mean;
    j["std"] = r.stddev;
    j["best"] = r.best;
    j["p_value"] = r.p_value ? Json(*r.p_value) : Json(nullptr);
    j["p_degenerate"] = r.p_degenerate;
    j["wall_seconds"] = r.wall_seconds;
    j["evaluations"] = r.evaluations;
    return j;
}

RunReport report_from_json(const Json& j) {
    RunReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.algorithm = j.at("algo").get<std::string>();
    if (!j.at("phi").is_null()) r.config.phi = j.at("phi").get<double>();
    r.config.n = j.at("n").get<std::size_t>();
    r.config.swarm_size = j.at("s").get<std::size_t>();
    r.config.iterations = j.at("t_max").get<std::size_t>();
    r.config.seed = j.at("seed").get<std::uint64_t>();
    r.baseline = j.at("baseline_nbr_rmse").get<double>();
    if (!j.at("lr_rmse").is_null()) r.lr_rmse = j.at("lr_rmse").get<double>();
    r.samples = j.at("samples").get<std::vector<double>>();
    r.mean = j.at("mean").get<double>();
    r.stddev = j.at("std").get<double>();
    r.best = j.at("best").get<double>();
    if (!j.at("p_value").is_null()) r.p_value = j.at("p_value").get<double>();
    r.p_degenerate = j.value("p_degenerate", false);
    r.wall_seconds = j.at("wall_seconds").get<std::vector<double>>();
    r.evaluations = j.value("evaluations", std::vector<std::size_t>{});
    if (r.samples.size() != j.at("repeats").get<std::size_t>())
        throw std::runtime_error("report repeats does not match the sample count");
    return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Nbr: return "nbr";
        case Algorithm::Lr: return "lr";
        case Algorithm::CsoNbr: return "cso-nbr";
        case Algorithm::SpsoNbr: return "spso-nbr";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    for (Algorithm a : {Algorithm::Nbr, Algorithm::Lr, Algorithm::CsoNbr, Algorithm::SpsoNbr})
        if (algorithm_name(a) == name) return a;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
    if (datasets.empty()) throw std::invalid_argument("no datasets given");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw std::invalid_argument("split fraction must be in (0, 1)");
    if (algorithm == Algorithm::CsoNbr || algorithm == Algorithm::SpsoNbr) {
        if (ns.empty()) throw std::invalid_argument("sweep over n is empty");
        if (algorithm == Algorithm::CsoNbr && phis.empty()) throw std::invalid_argument("sweep over phi is empty");
        for (std::size_t n : ns)
            if (n == 0) throw std::invalid_argument("surrogate size n must be >= 1");
        pipeline.validate();
        if (algorithm == Algorithm::CsoNbr) {
            if (!std::holds_alternative<CsoConfig>(pipeline.optimizer))
                throw std::invalid_argument("cso-nbr needs a CSO optimizer configuration");
            CsoConfig c = std::get<CsoConfig>(pipeline.optimizer);
            c.bounds = {{0.0, 0.0}};
            for (double phi : phis) {
                c.phi = phi;
                c.validate();
            }
        } else {
            if (!std::holds_alternative<SpsoConfig>(pipeline.optimizer))
                throw std::invalid_argument("spso-nbr needs an SPSO optimizer configuration");
            SpsoConfig c = std::get<SpsoConfig>(pipeline.optimizer);
            c.bounds = {{0.0, 0.0}};
            c.validate();
        }
    }
}

std::uint64_t derived_seed(std::uint64_t seed, std::size_t cell, std::size_t repeat) {
    return seed + 1000 * static_cast<std::uint64_t>(cell) + static_cast<std::uint64_t>(repeat);
}

std::vector<DatasetResult> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<DatasetResult> results;
    for (const auto& src : spec.datasets) {
        const Dataset data = impute(load_source(src));
        const auto [train_idx, test_idx] = split_indices(data.rows(), spec.split_fraction, spec.seed, spec.shuffle);
        const Dataset train_data = data.select_rows(train_idx);
        const Dataset test_data = data.select_rows(test_idx);

        DatasetResult res;
        res.dataset = !src.name.empty() ? src.name : src.path.stem().string();
        res.train_rows = train_data.rows();
        res.test_rows = test_data.rows();
        res.test_indices = test_idx;
        res.nbr_rmse = rmse(train(train_data), test_data, spec.pipeline.mode);
        res.lr_rmse = lr_rmse(fit_ols(train_data), test_data);

        auto baseline_report = [&](double value) {
            RunReport r = aggregate(std::span<const double>(&value, 1), res.nbr_rmse, RunConfigEcho{});
            r.dataset = res.dataset;
            r.algorithm = algorithm_name(spec.algorithm);
            r.lr_rmse = res.lr_rmse;
            r.config.seed = spec.seed;
            r.wall_seconds = {0.0};
            r.evaluations = {0};
            res.cells.push_back({std::move(r), Dataset{}});
        };

        if (spec.algorithm == Algorithm::Nbr) {
            baseline_report(res.nbr_rmse);
        } else if (spec.algorithm == Algorithm::Lr) {
            baseline_report(res.lr_rmse);
        } else {
            const bool cso = spec.algorithm == Algorithm::CsoNbr;
            const std::vector<std::optional<double>> phis =
                cso ? std::vector<std::optional<double>>(spec.phis.begin(), spec.phis.end())
                    : std::vector<std::optional<double>>{std::nullopt};
            std::size_t cell = 0;
            for (const auto& phi : phis) {
                for (std::size_t n : spec.ns) {
                    PipelineConfig pipeline = spec.pipeline;
                    pipeline.rows = n;
                    RunConfigEcho echo;
                    if (cso) {
                        auto& c = std::get<CsoConfig>(pipeline.optimizer);
                        c.phi = *phi;
                        echo.swarm_size = c.swarm_size;
                        echo.iterations = c.iterations;
                    } else {
                        const auto& c = std::get<SpsoConfig>(pipeline.optimizer);
                        echo.swarm_size = c.swarm_size;
                        echo.iterations = c.iterations;
                    }
                    echo.phi = phi;
                    echo.n = n;
                    echo.seed = derived_seed(spec.seed, cell, 0);
                    const auto outcomes =
                        run_repeats(train_data, test_data, pipeline, spec.threads, spec.record_timing,
                                    [&, cell](std::size_t i) { return derived_seed(spec.seed, cell, i); });

                    std::vector<double> samples;
                    for (const auto& o : outcomes) samples.push_back(o.test_rmse);
                    RunReport report = aggregate(samples, res.nbr_rmse, echo);
                    report.dataset = res.dataset;
                    report.algorithm = algorithm_name(spec.algorithm);
                    report.lr_rmse = res.lr_rmse;
                    for (const auto& o : outcomes) {
                        report.wall_seconds.push_back(o.seconds);
                        report.evaluations.push_back(o.evaluations);
                    }
                    const auto best = std::min_element(samples.begin(), samples.end()) - samples.begin();
                    res.cells.push_back({std::move(report), outcomes[static_cast<std::size_t>(best)].surrogate});
                    ++cell;
                }
            }
        }
        results.push_back(std::move(res));
    }
    return results;
}

std::string format_mean_std(double mean, double stddev) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.4f \xC2\xB1 %.4f", mean, stddev);
    return buf;
}

std::string report_json(const DatasetResult& result) {
    Json j;
    j["dataset"] = result.dataset;
    j["train_rows"] = result.train_rows;
    j["test_rows"] = result.test_rows;
    j["test_indices"] = result.test_indices;
    j["baseline_nbr_rmse"] = result.nbr_rmse;
    j["lr_rmse"] = result.lr_rmse;
    j["lr_method"] = LinearModel::method_label;
    Json reports = Json::array();
    for (const auto& c : result.cells) reports.push_back(report_to_json(c.report));
    j["reports"] = std::move(reports);
    return j.dump(2) + "\n";
}

std::vector<RunReport> read_report_json(std::string_view text) {
    const Json j = Json::parse(text);
    std::vector<RunReport> out;
    for (const auto& r : j.at("reports")) out.push_back(report_from_json(r));
    return out;
}

std::string report_table(const DatasetResult& result) {
    std::ostringstream out;
    char line[256];
    out << "dataset: " << result.dataset << " (train " << result.train_rows << ", test " << result.test_rows << ")\n";
    std::snprintf(line, sizeof line, "NBR test RMSE: %.4f\nLR test RMSE:  %.4f  [%s]\n", result.nbr_rmse, result.lr_rmse,
                  LinearModel::method_label);
    out << line << "\n";
    std::snprintf(line, sizeof line, "%-10s %6s %4s %10s %22s %10s %10s\n", "algo", "phi", "n", "NBR", "mean \xC2\xB1 std",
                  "p", "best");
    out << line;
    for (const auto& c : result.cells) {
        const RunReport& r = c.report;
        const std::string phi = r.config.phi ? shortest(*r.config.phi) : "-";
        const std::string n = r.config.n ? std::to_string(r.config.n) : "-";
        char p[32];
        if (r.p_value)
            std::snprintf(p, sizeof p, "%.4g", *r.p_value);
        else
            std::snprintf(p, sizeof p, "-");
        std::snprintf(line, sizeof line, "%-10s %6s %4s %10.4f %21s %10s %10.4f\n", r.algorithm.c_str(), phi.c_str(),
                      n.c_str(), r.baseline, format_mean_std(r.mean, r.stddev).c_str(), p, r.best);
        out << line;
    }
    return out.str();
}

void write_report(const std::vector<DatasetResult>& results, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& res : results) {
        const std::string stem = file_safe(res.dataset);
        write_text(dir / (stem + ".json"), report_json(res));
        write_text(dir / (stem + ".txt"), report_table(res));
        for (const auto& c : res.cells)
            if (c.best_surrogate.rows() > 0) write_csv(c.best_surrogate, dir / (cell_stem(res, c.report) + "_best.csv"));
    }
}

std::uint64_t peak_test_seed(std::uint64_t train_seed) {
    return splitmix64(train_seed ^ 0x7465737473657421ULL);
}

PeakResult run_peak(const PeakExperiment& exp) {
    exp.pipeline.validate();
    PeakResult res;
    res.train = generate_peak(exp.peak);
    PeakConfig test_cfg = exp.peak;
    test_cfg.samples = exp.test_samples;
    test_cfg.seed = peak_test_seed(exp.peak.seed);
    res.test = generate_peak(test_cfg);

    res.lr = fit_ols(res.train);
    res.lr_train_rmse = lr_rmse(res.lr, res.train);
    res.lr_test_rmse = lr_rmse(res.lr, res.test);
    res.nbr = train(res.train);
    res.nbr_train_rmse = rmse(res.nbr, res.train, exp.pipeline.mode);
    res.nbr_test_rmse = rmse(res.nbr, res.test, exp.pipeline.mode);

    const std::size_t expected = expected_evaluations(exp.pipeline);
    res.runs.resize(exp.pipeline.repeats);
    parallel_for(res.runs.size(), exp.threads == 0 ? default_thread_count() : exp.threads, [&](std::size_t i) {
        PipelineConfig cfg = exp.pipeline;
        cfg.seed = exp.pipeline.seed + i;
        const auto start = Clock::now();
        EvolveResult e = evolve(res.train, cfg);
        PeakRun& run = res.runs[i];
        run.wall_seconds = seconds_since(start);
        run.evaluations = e.optimization.evaluations;
        if (run.evaluations != expected)
            throw std::logic_error("optimizer used " + std::to_string(run.evaluations) + " fitness evaluations, expected " +
                                   std::to_string(expected));
        run.train_rmse = e.optimization.best_fitness;
        run.test_rmse = rmse(e.model, res.test, cfg.mode);
        run.surrogate = std::move(e.surrogate);
        run.model = std::move(e.model);
    });
    for (std::size_t i = 1; i < res.runs.size(); ++i)
        if (res.runs[i].test_rmse < res.runs[res.best_run].test_rmse) res.best_run = i;
    return res;
}

}  // namespace csonbr
