#include "cgad/errors.hpp"
#include "cgad/evaluation.hpp"
#include "cgad/io.hpp"
#include "cgad/pipeline.hpp"
#include "cgad/synth.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

namespace {

using cgad::Error;
using cgad::ErrorCode;
using cgad::Index;
using cgad::Json;

int default_workers() {
    if (const char* env = std::getenv("CGAD_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void print_error_json(ErrorCode code, const std::string& message) {
    Json j{{"error", Json{{"code", cgad::to_string(code)}, {"message", message}}}};
    std::cerr << j.dump() << "\n";
}

// Options shared by profile/score; config-file values fill in anything the
// command line did not set explicitly. Unknown keys are rejected.
struct RunOptions {
    cgad::PipelineConfig pipeline;
    std::string divergence_name = "shd";
    std::string config_path;
    int workers = default_workers();
};

void add_run_options(CLI::App* cmd, RunOptions& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file (flags take precedence)");
    cmd->add_option("--segment-len", opts.pipeline.segment_len, "segment length in samples")
        ->capture_default_str();
    cmd->add_option("--lag", opts.pipeline.lag, "time-lag order p")->capture_default_str();
    cmd->add_option("--lambda-w", opts.pipeline.solver.lambda_w, "intra-slice L1 weight")
        ->capture_default_str();
    cmd->add_option("--lambda-a", opts.pipeline.solver.lambda_a, "inter-slice L1 weight")
        ->capture_default_str();
    cmd->add_option("--edge-threshold", opts.pipeline.solver.edge_threshold,
                    "binarization threshold on |weight|")
        ->capture_default_str();
    cmd->add_option("--noise-sigma-scale", opts.pipeline.noise_sigma_scale,
                    "attack-data noise regularization scale")
        ->capture_default_str();
    cmd->add_option("--divergence", opts.divergence_name,
                    "graph metric: shd | jaccard | laplacian_spectral")
        ->capture_default_str();
    cmd->add_option("--shd-reversal-cost", opts.pipeline.shd_options.reversal_cost,
                    "1 or 2 (2 = literal set formula)")
        ->capture_default_str();
    cmd->add_option("--include-inter-edges", opts.pipeline.shd_options.include_inter,
                    "compare inter-slice edges too")
        ->capture_default_str();
    cmd->add_flag("--restandardize", opts.pipeline.restandardize_per_segment,
                  "recompute standardization per test segment");
    cmd->add_option("--seed", opts.pipeline.seed, "run seed")->capture_default_str();
    cmd->add_option("--workers", opts.workers,
                    "worker threads for segment scoring (env CGAD_WORKERS)")
        ->capture_default_str();
}

void apply_config_file(const CLI::App* cmd, RunOptions& opts) {
    if (opts.config_path.empty()) return;
    const Json file = cgad::read_json_file(opts.config_path);
    auto given = [&](const std::string& flag) { return cmd->count(flag) > 0; };
    for (const auto& [key, value] : file.items()) {
        try {
            if (key == "segment_len") {
                if (!given("--segment-len")) opts.pipeline.segment_len = value.get<Index>();
            } else if (key == "lag") {
                if (!given("--lag")) opts.pipeline.lag = value.get<int>();
            } else if (key == "lambda_w") {
                if (!given("--lambda-w")) opts.pipeline.solver.lambda_w = value.get<double>();
            } else if (key == "lambda_a") {
                if (!given("--lambda-a")) opts.pipeline.solver.lambda_a = value.get<double>();
            } else if (key == "edge_threshold") {
                if (!given("--edge-threshold")) {
                    opts.pipeline.solver.edge_threshold = value.get<double>();
                }
            } else if (key == "noise_sigma_scale") {
                if (!given("--noise-sigma-scale")) {
                    opts.pipeline.noise_sigma_scale = value.get<double>();
                }
            } else if (key == "divergence") {
                if (!given("--divergence")) opts.divergence_name = value.get<std::string>();
            } else if (key == "shd_reversal_cost") {
                if (!given("--shd-reversal-cost")) {
                    opts.pipeline.shd_options.reversal_cost = value.get<int>();
                }
            } else if (key == "include_inter_edges") {
                if (!given("--include-inter-edges")) {
                    opts.pipeline.shd_options.include_inter = value.get<bool>();
                }
            } else if (key == "restandardize_per_segment") {
                if (!given("--restandardize")) {
                    opts.pipeline.restandardize_per_segment = value.get<bool>();
                }
            } else if (key == "seed") {
                if (!given("--seed")) opts.pipeline.seed = value.get<std::uint64_t>();
            } else if (key == "workers") {
                if (!given("--workers")) opts.workers = value.get<int>();
            } else {
                throw Error(ErrorCode::InvalidConfig,
                            "unknown config key: " + key);
            }
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::InvalidConfig,
                        "config key '" + key + "': " + e.what());
        }
    }
}

void finalize_run_options(const CLI::App* cmd, RunOptions& opts) {
    apply_config_file(cmd, opts);
    opts.pipeline.kind = cgad::divergence_kind_from_string(opts.divergence_name);
    if (opts.workers < 1) throw Error(ErrorCode::InvalidConfig, "workers must be >= 1");
    opts.pipeline.validate();
}

std::string replace_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind(".json");
    if (dot != std::string::npos && dot == path.size() - 5) {
        return path.substr(0, dot) + suffix;
    }
    return path + suffix;
}

// ---------------------------------------------------------------------------

int cmd_profile(const CLI::App* cmd, RunOptions& opts, const std::string& train_path,
                const std::string& out_path, std::string dot_normal, std::string dot_attack) {
    finalize_run_options(cmd, opts);
    if (dot_normal.empty()) dot_normal = replace_suffix(out_path, "_normal.dot");
    if (dot_attack.empty()) dot_attack = replace_suffix(out_path, "_attack.dot");

    const cgad::MultivariateSeries series = cgad::read_series_csv(train_path);
    if (!series.point_labels) {
        throw Error(ErrorCode::IoError, "missing column: label");
    }
    const cgad::SegmentedSeries train = cgad::segment(series, opts.pipeline.segment_len);

    cgad::SolverTrace trace_normal, trace_attack;
    const cgad::CausalProfile profile = cgad::profile(train, opts.pipeline,
                                                      series.sensor_names, &trace_normal,
                                                      &trace_attack);
    cgad::write_json_file(out_path, cgad::profile_to_json(profile));
    cgad::write_text_file(dot_normal,
                          cgad::to_dot(profile.g_normal, profile.sensor_names, "g_normal"));
    cgad::write_text_file(dot_attack,
                          cgad::to_dot(profile.g_attack, profile.sensor_names, "g_attack"));

    auto summarize = [](const char* name, const cgad::SolverTrace& trace) {
        int inner_total = 0;
        for (const auto& step : trace.outer) inner_total += step.inner_iters;
        std::cout << name << ": " << trace.outer.size() << " outer iterations, "
                  << inner_total << " inner iterations, final h = " << trace.final_h()
                  << "\n";
    };
    summarize("normal", trace_normal);
    summarize("attack", trace_attack);
    std::cout << "profile written to " << out_path << "\n";
    return 0;
}

int cmd_score(const CLI::App* cmd, RunOptions& opts, const std::string& test_path,
              const std::string& profile_path, const std::string& out_path) {
    const cgad::CausalProfile profile =
        cgad::profile_from_json(cgad::read_json_file(profile_path));

    // the profile fixes the run configuration; flags may override the metric
    opts.pipeline = profile.config;
    if (cmd->count("--divergence") > 0) {
        opts.pipeline.kind = cgad::divergence_kind_from_string(opts.divergence_name);
    }
    apply_config_file(cmd, opts);
    if (opts.workers < 1) throw Error(ErrorCode::InvalidConfig, "workers must be >= 1");

    const cgad::MultivariateSeries series = cgad::read_series_csv(test_path);
    if (series.sensor_names != profile.sensor_names) {
        throw Error(ErrorCode::ShapeMismatch, "sensor mismatch between test CSV and profile");
    }
    const cgad::SegmentedSeries test = cgad::segment(series, opts.pipeline.segment_len);

    cgad::CausalProfile active = profile;
    active.config = opts.pipeline;
    const cgad::DetectionReport report =
        cgad::score_all(test, active, opts.pipeline.kind, opts.workers);
    cgad::write_json_file(out_path, cgad::report_to_json(report));
    std::cout << "scored " << report.per_segment.size() << " segments";
    if (report.f1_point_adjusted) std::cout << ", F1 = " << *report.f1_point_adjusted;
    std::cout << "\n";
    return 0;
}

int cmd_synth(cgad::GeneratorSpec spec, const std::string& perturb_name, Index normal_steps,
              Index attack_steps, Index test_normal_steps, Index test_attack_steps,
              Index segment_len, const std::string& out_train, const std::string& out_test,
              const std::string& out_truth, double edge_threshold) {
    spec.perturb_target = cgad::perturb_target_from_string(perturb_name);
    spec.validate();

    auto to_series = [&](const cgad::TwoRegimeData& data) {
        const Index k = data.normal_truth.node_count();
        const Index m = segment_len;
        cgad::Matrix values(static_cast<Index>(data.series.segments.size()) * m, k);
        std::vector<int> labels;
        Index row = 0;
        for (size_t s = 0; s < data.series.segments.size(); ++s) {
            values.middleRows(row, m) = data.series.segments[s];
            const int label = (*data.series.labels)[s];
            labels.insert(labels.end(), static_cast<size_t>(m), label);
            row += m;
        }
        return cgad::validate_series(std::move(values), data.normal_truth.sensor_names,
                                     std::move(labels));
    };

    const auto train = cgad::two_regime_dataset(spec, normal_steps, attack_steps, segment_len);
    cgad::write_series_csv(out_train, to_series(train));

    cgad::GeneratorSpec test_spec = spec;   // same regimes, different noise stream
    const auto test = cgad::two_regime_dataset(test_spec, test_normal_steps, test_attack_steps,
                                               segment_len, spec.seed * 7919 + 1);
    cgad::write_series_csv(out_test, to_series(test));

    if (!out_truth.empty()) {
        cgad::write_json_file(out_truth, cgad::ground_truth_to_json(train, edge_threshold));
    }
    std::cout << "wrote " << out_train << " (" << train.series.segments.size()
              << " segments), " << out_test << " (" << test.series.segments.size()
              << " segments)\n";
    return 0;
}

int cmd_evaluate(const std::string& report_path) {
    const cgad::DetectionReport report =
        cgad::report_from_json(cgad::read_json_file(report_path));
    if (!report.labels) {
        throw Error(ErrorCode::IoError, "report carries no labels; nothing to evaluate");
    }

    std::vector<int> predictions;
    std::vector<double> scores;
    for (const auto& s : report.per_segment) {
        predictions.push_back(s.predicted);
        scores.push_back(s.score);
    }
    const auto& labels = *report.labels;

    std::optional<double> f1, roc, prc;
    f1 = cgad::f1_point_adjusted(labels, predictions);
    try {
        roc = cgad::roc_auc(labels, scores);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateLabels) throw;
    }
    try {
        prc = cgad::prc_auc(labels, scores);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateLabels) throw;
    }

    if (f1 != report.f1_point_adjusted || roc != report.roc_auc || prc != report.prc_auc) {
        throw Error(ErrorCode::MetricMismatch,
                    "metric mismatch: stored aggregates disagree with per-segment rows");
    }

    auto show = [](const std::optional<double>& v) {
        return v ? std::to_string(*v) : std::string("n/a");
    };
    std::cout << "metric             value\n"
              << "f1_point_adjusted  " << show(f1) << "\n"
              << "roc_auc            " << show(roc) << "\n"
              << "prc_auc            " << show(prc) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CGAD: causal-graph profiling and structural-divergence anomaly detection"};
    app.require_subcommand(1);

    // profile
    auto* profile_cmd = app.add_subcommand(
        "profile", "learn normal/attack reference graphs from a labeled training CSV");
    RunOptions profile_opts;
    std::string train_path, profile_out = "profile.json", dot_normal, dot_attack;
    profile_cmd->add_option("--train", train_path, "labeled training CSV")->required();
    profile_cmd->add_option("--out", profile_out, "profile JSON path")->capture_default_str();
    profile_cmd->add_option("--dot-normal", dot_normal, "DOT path for the normal graph");
    profile_cmd->add_option("--dot-attack", dot_attack, "DOT path for the attack graph");
    add_run_options(profile_cmd, profile_opts);

    // score
    auto* score_cmd =
        app.add_subcommand("score", "score test segments against a stored profile");
    RunOptions score_opts;
    std::string test_path, profile_in, report_out = "report.json";
    score_cmd->add_option("--test", test_path, "test CSV (label column optional)")->required();
    score_cmd->add_option("--profile", profile_in, "profile JSON from 'profile'")->required();
    score_cmd->add_option("--out", report_out, "report JSON path")->capture_default_str();
    add_run_options(score_cmd, score_opts);

    // synth
    auto* synth_cmd = app.add_subcommand(
        "synth", "generate a two-regime synthetic dataset with ground-truth graphs");
    cgad::GeneratorSpec spec;
    std::string perturb_name = "both";
    Index normal_steps = 6000, attack_steps = 6000;
    Index test_normal_steps = 0, test_attack_steps = 0;
    Index synth_segment_len = 300;
    double synth_threshold = 0.1;
    std::string out_train = "train.csv", out_test = "test.csv", out_truth = "truth.json";
    synth_cmd->add_option("--nodes", spec.node_count, "sensor count K")->capture_default_str();
    synth_cmd->add_option("--lag", spec.lag, "lag order p")->capture_default_str();
    synth_cmd->add_option("--density", spec.edge_density, "edge density")->capture_default_str();
    synth_cmd->add_option("--weight-min", spec.weight_min, "")->capture_default_str();
    synth_cmd->add_option("--weight-max", spec.weight_max, "")->capture_default_str();
    synth_cmd->add_option("--noise-std", spec.noise_std, "")->capture_default_str();
    synth_cmd->add_option("--seed", spec.seed, "")->capture_default_str();
    synth_cmd->add_option("--rewired-edges", spec.rewired_edges,
                          "edges rewired between regimes")
        ->capture_default_str();
    synth_cmd->add_option("--perturb-target", perturb_name, "intra | inter | both")
        ->capture_default_str();
    synth_cmd->add_option("--normal-steps", normal_steps, "")->capture_default_str();
    synth_cmd->add_option("--attack-steps", attack_steps, "")->capture_default_str();
    synth_cmd->add_option("--test-normal-steps", test_normal_steps, "defaults to --normal-steps");
    synth_cmd->add_option("--test-attack-steps", test_attack_steps, "defaults to --attack-steps");
    synth_cmd->add_option("--segment-len", synth_segment_len, "")->capture_default_str();
    synth_cmd->add_option("--edge-threshold", synth_threshold,
                          "recorded in the ground-truth sidecar")
        ->capture_default_str();
    synth_cmd->add_option("--out-train", out_train, "")->capture_default_str();
    synth_cmd->add_option("--out-test", out_test, "")->capture_default_str();
    synth_cmd->add_option("--truth", out_truth, "ground-truth sidecar JSON")
        ->capture_default_str();

    // evaluate
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "recompute and verify the metrics of a report");
    std::string report_path;
    evaluate_cmd->add_option("--report", report_path, "report JSON from 'score'")->required();

    try {
        app.parse(argc, argv);
        if (profile_cmd->parsed()) {
            return cmd_profile(profile_cmd, profile_opts, train_path, profile_out, dot_normal,
                               dot_attack);
        }
        if (score_cmd->parsed()) {
            return cmd_score(score_cmd, score_opts, test_path, profile_in, report_out);
        }
        if (synth_cmd->parsed()) {
            if (test_normal_steps == 0) test_normal_steps = normal_steps;
            if (test_attack_steps == 0) test_attack_steps = attack_steps;
            return cmd_synth(spec, perturb_name, normal_steps, attack_steps, test_normal_steps,
                             test_attack_steps, synth_segment_len, out_train, out_test,
                             out_truth, synth_threshold);
        }
        if (evaluate_cmd->parsed()) return cmd_evaluate(report_path);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error_json(ErrorCode::InvalidConfig, e.what());
        return 2;
    } catch (const cgad::ConvergenceError& e) {
        print_error_json(e.code(), e.what());
        return 3;
    } catch (const Error& e) {
        print_error_json(e.code(), e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error_json(ErrorCode::IoError, e.what());
        return 2;
    }
}
