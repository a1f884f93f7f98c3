#pragma once

#include <filesystem>
#include <optional>

#include "sketchgait/config.hpp"
#include "sketchgait/eval.hpp"
#include "sketchgait/normalize.hpp"

namespace sketchgait {

// Modality construction / prep outcome, also serialized to summary.json.
struct StageSummary {
    int sequences_total = 0;
    int sequences_written = 0;
    int frames_total = 0;
    int frames_written = 0;
    int frames_skipped = 0;  // empty-mask skips
    int sketch_frames = 0;
    int silhouette_frames = 0;
    int parsing_frames = 0;
    std::vector<std::string> failures;  // human-readable, per failed frame/sequence
    bool any_external_failure = false;
};

// On-disk record set written by build-modality / prep: records/<key>.gstk(+json)
// plus records.json carrying palette, grouping, protocol, and the entry list.
struct RecordSet {
    std::map<int, std::string> palette;
    LabelGrouping grouping;
    Protocol protocol;
    NormalizeTarget target;
    std::vector<std::pair<SequenceMeta, std::filesystem::path>> records;  // meta + base path
};

RecordSet read_record_set(const std::filesystem::path& records_json);

// Extracted per-sequence branch features plus everything evaluation needs.
struct FeatureSet {
    Protocol protocol;
    std::string modality_set;
    std::vector<SequenceFeatures> features;
};

FeatureSet read_feature_set(const std::filesystem::path& features_json);

// Stage drivers. Every stage echoes the resolved config into out_dir and
// communicates with the next stage only through the documented files.
// build-modality: detectors run on RGB+mask inputs; per-frame modality PNGs,
// normalized records, records.json and summary.json are written.
StageSummary run_build_modality(const std::filesystem::path& manifest_path, const RunConfig& cfg,
                                const std::filesystem::path& out_dir);

// prep: packages records from modality PNGs that already exist (dataset
// masks/parsing plus optional precomputed sketch lists); no detector runs.
StageSummary run_prep(const std::filesystem::path& manifest_path, const RunConfig& cfg,
                      const std::filesystem::path& out_dir);

void run_extract(const std::filesystem::path& records_json, const RunConfig& cfg,
                 const std::filesystem::path& out_dir);

void run_train(const std::filesystem::path& features_json, const RunConfig& cfg,
               const std::filesystem::path& out_dir);

EvalReport run_evaluate(const std::filesystem::path& features_json,
                        const std::optional<std::filesystem::path>& head_dir, const RunConfig& cfg,
                        const std::filesystem::path& out_dir);

void write_summary(const std::filesystem::path& path, const StageSummary& summary);

}  // namespace sketchgait
