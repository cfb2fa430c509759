// Command-line harness for the e-nose front-end simulator: synthesize
// campaigns, run the single-sensor or array pipeline, and calibrate/evaluate
// the concentration-vector decoder.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <enose/enose.hpp>

namespace fs = std::filesystem;
using namespace enose;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

CircuitConfig config_from_flag(const std::string& config_path) {
    if (config_path.empty()) return default_circuit_config();
    return load_config(config_path);
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

struct RunArgs {
    std::string campaign;
    std::string config_path;
    std::string out_dir;
    unsigned jobs = 0;
    int sensor = 1;
};

void do_run(const RunArgs& args, bool array_mode) {
    const CircuitConfig config = config_from_flag(args.config_path);
    const auto trials = load_trials(args.campaign);
    if (trials.empty()) throw std::runtime_error("campaign is empty: " + args.campaign);
    for (const auto& trial : trials)
        for (const auto& trace : trial.traces)
            if (std::abs(trace.dt_s - config.dt_s) > 1e-12)
                throw std::runtime_error("campaign dt does not match config dt");

    fs::create_directories(args.out_dir);
    RunManifest manifest;
    manifest.command = array_mode ? "run-array" : "run-single";
    manifest.config_path = args.config_path.empty() ? "<builtin defaults>" : args.config_path;
    manifest.config_hash = config_hash(config);
    manifest.campaign = args.campaign;
    manifest.jobs = args.jobs;
    manifest.output_dir = args.out_dir;
    manifest.created_utc = utc_timestamp_now();
    write_manifest(manifest, args.out_dir);

    auto results = array_mode ? run_campaign_array(trials, config, args.jobs)
                              : run_campaign_single(trials, args.sensor, config, args.jobs);

    std::ostringstream results_text, summary_text;
    write_results_csv(results, results_text);
    write_summary_csv(summarize(results), summary_text);
    write_text_file(fs::path(args.out_dir) / "results.csv", results_text.str());
    write_text_file(fs::path(args.out_dir) / "summary.csv", summary_text.str());
    std::cout << "wrote " << (fs::path(args.out_dir) / "results.csv").string() << " ("
              << trials.size() << " trials)\n";
}

std::array<DeltaT, 3> parse_dt_vector(const std::string& text) {
    auto fields = split_list(text);
    if (fields.size() != 3)
        throw std::runtime_error("--dt expects three comma-separated entries, '-' for absent");
    std::array<DeltaT, 3> dt;
    for (int s = 0; s < 3; ++s)
        if (fields[s] != "-") dt[s] = parse_double(fields[s]);
    return dt;
}

void print_confusion(const std::vector<std::string>& labels,
                     const std::vector<std::vector<int>>& m) {
    std::cout << "        ";
    for (const auto& l : labels) std::printf("%8s", l.c_str());
    std::cout << "\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::printf("%8s", labels[i].c_str());
        for (std::size_t j = 0; j < labels.size(); ++j) std::printf("%8d", m[i][j]);
        std::cout << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behavioral simulator of a spike-timing gas-sensing front-end"};
    app.require_subcommand(1);

    // synth -----------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Synthesize a randomized trial campaign");
    struct {
        std::string out;
        std::uint64_t seed = 42;
        int trials = 20;
        std::string gases = "EB,Eu,IA";
        std::string levels = "1,2,3,4,5";
        double noise = 0.002;
        double dt = 1e-3;
        double t_start = -1.0;
        double t_end = 10.0;
    } sa;
    synth->add_option("--out", sa.out, "Output campaign directory")->required();
    synth->add_option("--seed", sa.seed, "Schedule seed")->envname("ENOSE_SEED");
    synth->add_option("--trials", sa.trials, "Trials per (gas, level) pair");
    synth->add_option("--gases", sa.gases, "Comma-separated gas labels");
    synth->add_option("--levels", sa.levels, "Comma-separated concentration levels (1..5)");
    synth->add_option("--noise", sa.noise, "Sensor noise sigma in volts (0 = noiseless)");
    synth->add_option("--dt", sa.dt, "Sample period in seconds");
    synth->add_option("--t-start", sa.t_start, "Trace start time in seconds");
    synth->add_option("--t-end", sa.t_end, "Trace end time in seconds");

    // run-single / run-array ------------------------------------------------
    RunArgs ra;
    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--campaign", ra.campaign, "Campaign directory or single trial file")
            ->required()
            ->envname("ENOSE_CAMPAIGN");
        cmd->add_option("--config", ra.config_path, "Circuit config file (defaults built in)")
            ->envname("ENOSE_CONFIG");
        cmd->add_option("--out", ra.out_dir, "Output directory")->required();
        cmd->add_option("--jobs", ra.jobs, "Worker threads (0 = all cores)")
            ->envname("ENOSE_JOBS");
    };
    auto* run_single = app.add_subcommand("run-single", "Run the single-sensor pipeline");
    add_run_flags(run_single);
    run_single->add_option("--sensor", ra.sensor, "Sensor to run (1..3)")
        ->check(CLI::Range(1, 3));
    auto* run_array = app.add_subcommand("run-array", "Run the 3-sensor array pipeline");
    add_run_flags(run_array);

    // calibrate -------------------------------------------------------------
    auto* calibrate_cmd = app.add_subcommand("calibrate", "Build decoder calibration from results");
    struct {
        std::string results;
        std::string config_path;
        std::string out;
        std::string campaign_id;
    } ca;
    calibrate_cmd->add_option("--results", ca.results, "results.csv from run-array")->required();
    calibrate_cmd->add_option("--config", ca.config_path, "Circuit config used for the results")
        ->envname("ENOSE_CONFIG");
    calibrate_cmd->add_option("--out", ca.out, "Calibration JSON output path")->required();
    calibrate_cmd->add_option("--campaign-id", ca.campaign_id, "Free-form campaign identifier");

    // infer -----------------------------------------------------------------
    auto* infer_cmd = app.add_subcommand("infer", "Classify one concentration vector");
    struct {
        std::string calibration;
        std::string dt;
    } ia;
    infer_cmd->add_option("--calibration", ia.calibration, "Calibration JSON")->required();
    infer_cmd->add_option("--dt", ia.dt, "Per-sensor dt in seconds, e.g. 0.25,0.4,- ('-' = absent)")
        ->required();

    // evaluate --------------------------------------------------------------
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a results table against a calibration");
    struct {
        std::string calibration;
        std::string results;
        std::string out;
    } ea;
    evaluate_cmd->add_option("--calibration", ea.calibration, "Calibration JSON")->required();
    evaluate_cmd->add_option("--results", ea.results, "results.csv with labeled trials")->required();
    evaluate_cmd->add_option("--out", ea.out, "Optional JSON report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage errors exit 1
    }

    try {
        if (synth->parsed()) {
            CampaignSpec spec;
            spec.gases.clear();
            for (auto& g : split_list(sa.gases)) spec.gases.push_back({g});
            spec.levels.clear();
            for (auto& l : split_list(sa.levels)) spec.levels.push_back(std::stoi(l));
            spec.n_trials = sa.trials;
            spec.dt_s = sa.dt;
            spec.t_start_s = sa.t_start;
            spec.t_end_s = sa.t_end;

            auto params = default_sensor_params(sa.noise);
            fs::create_directories(sa.out);
            RunManifest manifest;
            manifest.command = "synth";
            manifest.campaign = sa.out;
            manifest.seed = sa.seed;
            manifest.output_dir = sa.out;
            manifest.created_utc = utc_timestamp_now();
            write_manifest(manifest, sa.out);

            auto trials = campaign(spec, params, sa.seed);
            save_trials(trials, sa.out);
            std::cout << "wrote " << trials.size() << " trial files to " << sa.out << "\n";
        } else if (run_single->parsed() || run_array->parsed()) {
            do_run(ra, run_array->parsed());
        } else if (calibrate_cmd->parsed()) {
            std::ifstream in(ca.results);
            if (!in) throw std::runtime_error("cannot read " + ca.results);
            auto results = read_results_csv(in);
            auto cal = calibrate(labeled_vectors(results));
            cal.config_hash = config_hash(config_from_flag(ca.config_path));
            cal.campaign_id = ca.campaign_id;
            save_calibration(cal, ca.out);
            std::cout << "wrote calibration with " << cal.classes.size() << " classes to "
                      << ca.out << "\n";
        } else if (infer_cmd->parsed()) {
            auto cal = load_calibration(ia.calibration);
            ConcentrationVector v;
            v.per_sensor = parse_dt_vector(ia.dt);
            auto result = infer(v, cal);
            std::cout << "gas=" << result.gas.label << " level=" << result.level
                      << " score=" << format_double(result.score) << "\n";
        } else if (evaluate_cmd->parsed()) {
            auto cal = load_calibration(ea.calibration);
            std::ifstream in(ea.results);
            if (!in) throw std::runtime_error("cannot read " + ea.results);
            auto results = read_results_csv(in);
            auto ev = evaluate(labeled_vectors(results), cal);

            std::cout << "gas confusion (rows = truth):\n";
            print_confusion(ev.gas_labels, ev.gas_confusion);
            std::vector<std::string> level_names;
            for (int l : ev.levels) level_names.push_back("C" + std::to_string(l));
            std::cout << "level confusion (rows = truth):\n";
            print_confusion(level_names, ev.level_confusion);
            std::printf("gas accuracy: %.4f\nlevel accuracy: %.4f\njoint accuracy: %.4f\n",
                        static_cast<double>(ev.n_correct_gas) / ev.n_total,
                        static_cast<double>(ev.n_correct_level) / ev.n_total,
                        ev.joint_accuracy());

            if (!ea.out.empty()) {
                nlohmann::json doc;
                doc["gas_labels"] = ev.gas_labels;
                doc["gas_confusion"] = ev.gas_confusion;
                doc["levels"] = ev.levels;
                doc["level_confusion"] = ev.level_confusion;
                doc["n_total"] = ev.n_total;
                doc["gas_accuracy"] = static_cast<double>(ev.n_correct_gas) / ev.n_total;
                doc["level_accuracy"] = static_cast<double>(ev.n_correct_level) / ev.n_total;
                doc["joint_accuracy"] = ev.joint_accuracy();
                write_text_file(ea.out, doc.dump(2) + "\n");
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
