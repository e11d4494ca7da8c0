// Command-line driver for the tamper-analysis pipeline:
// toy -> synth -> extract -> stationarity -> fit -> evaluate.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tamperlab/config.hpp"
#include "tamperlab/pipeline.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct GlobalOpts {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
};

tamperlab::RunConfig build_config(const GlobalOpts& g) {
    tamperlab::RunConfig cfg;
    if (!g.config_path.empty()) cfg = tamperlab::load_config_file(g.config_path);
    for (const std::string& kv : g.overrides) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        tamperlab::config_set(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed_set) cfg.seed = g.seed;
    cfg.validate();
    return cfg;
}

void report_error(const std::string& stage, const std::exception& e) {
    std::fprintf(stderr, "{\"error\":{\"stage\":\"%s\",\"message\":\"%s\"}}\n", stage.c_str(),
                 e.what());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Residual-based camera tamper detection analysis pipeline"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "Config file ([section] key=value)");
    app.add_option("--set", g.overrides, "Override a config key, e.g. --set run.seed=7");
    app.add_option("--out-dir", g.out_dir, "Output directory");
    app.add_option("--seed", g.seed, "Root seed (overrides config)")
        ->each([&](const std::string&) { g.seed_set = true; });
    app.add_option("--jobs", g.jobs, "Worker count (reserved; processing is deterministic)");

    auto* toy = app.add_subcommand("toy", "Generate a synthetic toy scene");

    auto* synth = app.add_subcommand("synth", "Inject scheduled tampering into a sequence");
    std::string synth_source;
    bool synth_empty = false;
    synth->add_option("source", synth_source, "Frame directory or manifest")->required();
    synth->add_flag("--empty-schedule", synth_empty, "No events; tampered set equals normal set");

    auto* extract = app.add_subcommand("extract", "Compute the ten residual features");
    std::string extract_source;
    extract->add_option("source", extract_source, "Frame directory or manifest")->required();

    auto* stationarity = app.add_subcommand("stationarity", "ADF/KPSS before and after transform");
    std::string stat_residuals;
    stationarity->add_option("residuals", stat_residuals, "residuals.csv")->required();

    auto* fit = app.add_subcommand("fit", "Per-segment ARIMA order selection and forecasting");
    std::string fit_residuals;
    fit->add_option("residuals", fit_residuals, "residuals.csv")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Robustness and detection report");
    std::string eval_residuals, eval_annotations, eval_normal, eval_fits, eval_feature;
    evaluate->add_option("residuals", eval_residuals, "tampered residuals.csv")->required();
    evaluate->add_option("annotations", eval_annotations, "annotations.csv")->required();
    evaluate->add_option("--normal", eval_normal, "paired normal residuals.csv");
    evaluate->add_option("--fits", eval_fits, "fits.json from the fit step");
    evaluate->add_option("--feature", eval_feature, "restrict the report to one feature");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    tamperlab::RunConfig cfg;
    try {
        cfg = build_config(g);
    } catch (const std::exception& e) {
        report_error("config", e);
        return kExitUsage;
    }

    namespace fs = std::filesystem;
    try {
        fs::create_directories(g.out_dir);
        if (toy->parsed()) {
            auto out = tamperlab::pipeline::run_toy(cfg, g.out_dir);
            std::printf("wrote %s\n", out.manifest.c_str());
        } else if (synth->parsed()) {
            auto out = tamperlab::pipeline::run_synth(cfg, synth_source, g.out_dir, synth_empty);
            std::printf("wrote %s\n", out.schedule_json.c_str());
        } else if (extract->parsed()) {
            auto out = tamperlab::pipeline::run_extract(
                cfg, extract_source, (fs::path(g.out_dir) / "residuals.csv").string());
            std::printf("wrote %s\n", out.c_str());
        } else if (stationarity->parsed()) {
            auto out = tamperlab::pipeline::run_stationarity(
                cfg, stat_residuals, (fs::path(g.out_dir) / "stationarity.json").string());
            std::printf("wrote %s\n", out.c_str());
        } else if (fit->parsed()) {
            auto out = tamperlab::pipeline::run_fit(
                cfg, fit_residuals, (fs::path(g.out_dir) / "fits.json").string(),
                (fs::path(g.out_dir) / "predictions.csv").string());
            std::printf("wrote %s\n", out.fits_json.c_str());
        } else if (evaluate->parsed()) {
            tamperlab::pipeline::EvaluateInputs in;
            in.tampered_residuals_csv = eval_residuals;
            in.annotations_csv = eval_annotations;
            in.normal_residuals_csv = eval_normal;
            in.fits_json = eval_fits;
            auto out = tamperlab::pipeline::run_evaluate(
                cfg, in, (fs::path(g.out_dir) / "report.json").string(), g.out_dir, eval_feature);
            std::printf("wrote %s\n", out.c_str());
        }
    } catch (const std::invalid_argument& e) {
        report_error(argv[1] ? argv[1] : "?", e);
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        report_error(argv[1] ? argv[1] : "?", e);
        return kExitData;
    } catch (const std::exception& e) {
        report_error(argv[1] ? argv[1] : "?", e);
        return kExitNumerical;
    }
    return 0;
}
