// sketchgait: modality construction, descriptor extraction, metric training,
// and gallery/probe evaluation for edge-based gait recognition, as a set of
// file-mediated subcommands.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <json.hpp>

#include "sketchgait/pipeline.hpp"
#include "sketchgait/synthetic.hpp"
#include "sketchgait/version.hpp"

namespace fs = std::filesystem;
using namespace sketchgait;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitExternal = 3;

RunConfig load_config(const std::string& config_path) {
    if (config_path.empty()) return RunConfig{};
    return parse_config_file(config_path);
}

void write_version_stamp(const fs::path& out_dir) {
    std::ofstream f(out_dir / "tool_version.txt", std::ios::trunc);
    f << "sketchgait " << kVersion << "\n";
}

// Machine-readable error next to the human-readable stderr text.
void write_error_json(const fs::path& out_dir, const std::string& kind, const std::string& message) {
    if (out_dir.empty()) return;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) return;
    nlohmann::json j = {{"error", kind}, {"message", message}};
    std::ofstream f(out_dir / "error.json", std::ios::trunc);
    f << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sketchgait: edge-based multimodal gait recognition pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string config_path, manifest_path, records_path, features_path, head_path, eval_path;
    std::string out_dir;
    int jobs = 0;

    auto add_common = [&](CLI::App* sub, bool with_out = true) {
        sub->add_option("--config", config_path, "run configuration file (TOML-style)");
        if (with_out) sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--jobs", jobs, "worker threads (overrides config)");
    };

    auto* synthetic_cmd =
        app.add_subcommand("synthetic", "render the articulated stick-figure benchmark dataset");
    SyntheticSpec synth;
    synthetic_cmd->add_option("--identities", synth.identities, "number of identities");
    synthetic_cmd->add_option("--conditions", synth.conditions, "conditions to render (1..3: nm, bg, cl)");
    synthetic_cmd->add_option("--sequences", synth.sequences_per_condition, "sequences per condition");
    synthetic_cmd->add_option("--frames", synth.frames, "frames per sequence");
    synthetic_cmd->add_option("--seed", synth.seed, "generator seed");
    add_common(synthetic_cmd);

    auto* build_cmd = app.add_subcommand(
        "build-modality", "construct sketch/silhouette/parsing modalities and normalized records");
    build_cmd->add_option("--manifest", manifest_path, "dataset manifest JSON")->required();
    add_common(build_cmd);

    auto* prep_cmd = app.add_subcommand(
        "prep", "package records from precomputed modality rasters (no detector runs)");
    prep_cmd->add_option("--manifest", manifest_path, "dataset manifest JSON")->required();
    add_common(prep_cmd);

    auto* extract_cmd =
        app.add_subcommand("extract", "extract multi-branch descriptors from records");
    extract_cmd->add_option("--records", records_path, "records.json from build-modality/prep")
        ->required();
    add_common(extract_cmd);

    auto* train_cmd = app.add_subcommand("train", "train the metric head on extracted features");
    train_cmd->add_option("--features", features_path, "features.json from extract")->required();
    add_common(train_cmd);

    auto* eval_cmd = app.add_subcommand("evaluate", "gallery/probe Rank-k evaluation");
    eval_cmd->add_option("--features", features_path, "features.json from extract")->required();
    eval_cmd->add_option("--head", head_path, "trained head directory (omit for the untrained head)");
    add_common(eval_cmd);

    auto* report_cmd = app.add_subcommand("report", "format an evaluation JSON as a table");
    report_cmd->add_option("--eval", eval_path, "eval.json from evaluate")->required();
    report_cmd->add_option("--out", out_dir, "optional directory for report.txt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (jobs > 0) cfg.jobs = jobs;

        if (synthetic_cmd->parsed()) {
            const fs::path manifest = generate_synthetic_dataset(out_dir, synth);
            std::cout << "wrote " << manifest.string() << "\n";
        } else if (build_cmd->parsed() || prep_cmd->parsed()) {
            const StageSummary summary =
                build_cmd->parsed() ? run_build_modality(manifest_path, cfg, out_dir)
                                    : run_prep(manifest_path, cfg, out_dir);
            write_version_stamp(out_dir);
            std::cout << "sequences: " << summary.sequences_written << "/" << summary.sequences_total
                      << ", frames: " << summary.frames_written << "/" << summary.frames_total
                      << " (" << summary.frames_skipped << " skipped)\n";
            for (const auto& f : summary.failures) std::cerr << "warning: " << f << "\n";
            if (summary.sequences_written == 0 && summary.sequences_total > 0) {
                write_error_json(out_dir, summary.any_external_failure ? "external" : "data",
                                 "no sequence produced a record");
                return summary.any_external_failure ? kExitExternal : kExitData;
            }
        } else if (extract_cmd->parsed()) {
            run_extract(records_path, cfg, out_dir);
            write_version_stamp(out_dir);
            std::cout << "wrote " << (fs::path(out_dir) / "features.json").string() << "\n";
        } else if (train_cmd->parsed()) {
            run_train(features_path, cfg, out_dir);
            write_version_stamp(out_dir);
            std::cout << "wrote " << (fs::path(out_dir) / "head").string() << "\n";
        } else if (eval_cmd->parsed()) {
            const std::optional<fs::path> head =
                head_path.empty() ? std::nullopt : std::optional<fs::path>(head_path);
            const EvalReport report = run_evaluate(features_path, head, cfg, out_dir);
            write_version_stamp(out_dir);
            std::cout << format_report_table(report);
        } else if (report_cmd->parsed()) {
            const EvalReport report = read_report_json(eval_path);
            const std::string table = format_report_table(report);
            std::cout << table;
            if (!out_dir.empty()) {
                fs::create_directories(out_dir);
                std::ofstream f(fs::path(out_dir) / "report.txt", std::ios::trunc);
                f << table;
            }
        }
        return kExitOk;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        write_error_json(out_dir, "parameter", e.what());
        return kExitUsage;
    } catch (const ExternalToolError& e) {
        std::cerr << "external tool error: " << e.what() << "\n";
        write_error_json(out_dir, "external", e.what());
        return kExitExternal;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        write_error_json(out_dir, "data", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_json(out_dir, "internal", e.what());
        return kExitData;
    }
}
