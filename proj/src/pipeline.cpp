#include "sketchgait/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sketchgait/container.hpp"
#include "sketchgait/normalize.hpp"
#include "sketchgait/png_io.hpp"
#include "sketchgait/record.hpp"

namespace sketchgait {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(jobs, int(n)));
    if (workers == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_relative() ? base / path : path;
}

std::string sanitize(const std::string& key) {
    std::string out = key;
    for (char& c : out)
        if (c == '/' || c == '\\') c = '_';
    return out;
}

json protocol_to_json(const Protocol& p) {
    return {{"gallery_conditions", p.gallery_conditions}, {"probe_conditions", p.probe_conditions}};
}

Protocol protocol_from_json(const json& j) {
    Protocol p;
    p.gallery_conditions = j.at("gallery_conditions").get<std::vector<std::string>>();
    p.probe_conditions = j.at("probe_conditions").get<std::vector<std::string>>();
    return p;
}

json load_json(const fs::path& path, const char* what) {
    if (!fs::exists(path)) throw DataError(std::string(what) + " not found: " + path.string());
    try {
        std::ifstream f(path);
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw DataError(std::string(what) + " is not valid JSON: " + std::string(e.what()));
    }
}

void dump_json(const fs::path& path, const json& j) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path.string());
    f << j.dump(2) << "\n";
}

// Shared sequence worker for build-modality and prep. `use_detector` decides
// whether the sketch channel comes from the configured detector or from a
// precomputed/parsing-derived source only.
struct SequenceOutcome {
    bool written = false;
    int frames_written = 0;
    int frames_skipped = 0;
    int sketch_frames = 0;
    int silhouette_frames = 0;
    int parsing_frames = 0;
    std::vector<std::string> failures;
    bool external_failure = false;
};

SequenceOutcome process_sequence(const SequenceMeta& meta, const fs::path& base,
                                 const DatasetIndex& index, const RunConfig& cfg,
                                 const fs::path& out_dir, bool use_detector,
                                 bool write_modality_pngs) {
    SequenceOutcome outcome;
    std::vector<ModalityStack> stacks;
    const std::string stem = sanitize(meta.key());

    const fs::path modality_dir = out_dir / "modality" / stem;
    if (write_modality_pngs) fs::create_directories(modality_dir);

    for (size_t t = 0; t < meta.frames.size(); ++t) {
        try {
            std::optional<LabelMap> labels;
            if (!meta.parsing.empty())
                labels = read_png_labels(resolve(base, meta.parsing[t]));

            // Silhouette first: it is the Eq.-1 mask and the alignment source.
            Mask silhouette;
            if (cfg.silhouette_source == SilhouetteSource::Parsing) {
                if (!labels) throw DataError("silhouette_source = parsing but entry has no parsing");
                silhouette = parsing_to_silhouette(*labels);
            } else if (!meta.masks.empty()) {
                silhouette = read_png_mask(resolve(base, meta.masks[t]));
            } else if (labels) {
                silhouette = mask_from_parsing(*labels);
            } else {
                throw DataError("no foreground source for frame");
            }

            SketchMap sketch;
            bool have_sketch = true;
            const auto precomputed = meta.modalities.find("sketch");
            if (precomputed != meta.modalities.end()) {
                const GrayImage img = read_png_gray(resolve(base, precomputed->second[t]));
                sketch.width = img.width;
                sketch.height = img.height;
                sketch.data = img.data;
            } else if (cfg.sketch_source == SketchSource::ParsingEdge) {
                if (!labels) throw DataError("sketch_source = parsing-edge but entry has no parsing");
                sketch = parsing_to_edge(*labels, cfg.parsing_edge_include_outer);
            } else if (use_detector) {
                const Frame frame = read_png_rgb(resolve(base, meta.frames[t]));
                sketch = build_sketch(frame, silhouette, cfg.detector_spec());
            } else {
                have_sketch = false;  // prep with no precomputed sketch
            }

            ModalityStack stack;
            if (have_sketch) {
                append_channel(stack, {"sketch", sketch});
                ++outcome.sketch_frames;
            }
            append_channel(stack, {"silhouette", silhouette});
            ++outcome.silhouette_frames;
            if (labels && !index.grouping.empty()) {
                append_stack(stack, parsing_to_stack(*labels, index.grouping));
                ++outcome.parsing_frames;
            }

            if (write_modality_pngs) {
                char idx[8];
                std::snprintf(idx, sizeof idx, "%03zu", t);
                if (have_sketch)
                    write_png_gray(modality_dir / ("sketch_" + std::string(idx) + ".png"), sketch);
                write_png_mask(modality_dir / ("silh_" + std::string(idx) + ".png"), silhouette);
            }

            auto normalized = normalize_frame(stack, silhouette,
                                              {cfg.target_height, cfg.target_width});
            if (!normalized) {
                ++outcome.frames_skipped;
                continue;
            }
            stacks.push_back(std::move(*normalized));
            ++outcome.frames_written;
        } catch (const ExternalToolError& e) {
            outcome.external_failure = true;
            outcome.failures.push_back(meta.key() + " frame " + std::to_string(t) + ": " + e.what());
        } catch (const std::exception& e) {
            outcome.failures.push_back(meta.key() + " frame " + std::to_string(t) + ": " + e.what());
        }
    }

    if (stacks.empty()) {
        outcome.failures.push_back(meta.key() + ": no usable frames");
        return outcome;
    }

    const SequenceRecord record = package_sequence(meta, std::move(stacks));
    write_record(out_dir / "records" / stem, record);
    outcome.written = true;
    return outcome;
}

StageSummary run_ingest(const fs::path& manifest_path, const RunConfig& cfg,
                        const fs::path& out_dir, bool use_detector, bool write_modality_pngs) {
    const DatasetIndex index = scan_manifest(manifest_path);
    const fs::path base = manifest_path.parent_path();

    fs::create_directories(out_dir / "records");
    echo_config(out_dir, cfg);

    std::vector<SequenceOutcome> outcomes(index.entries.size());
    parallel_for(index.entries.size(), cfg.jobs, [&](size_t i) {
        outcomes[i] = process_sequence(index.entries[i], base, index, cfg, out_dir, use_detector,
                                       write_modality_pngs);
    });

    StageSummary summary;
    summary.sequences_total = int(index.entries.size());
    json records = json::array();
    for (size_t i = 0; i < index.entries.size(); ++i) {
        const auto& meta = index.entries[i];
        const auto& o = outcomes[i];
        summary.frames_total += int(meta.frames.size());
        summary.frames_written += o.frames_written;
        summary.frames_skipped += o.frames_skipped;
        summary.sketch_frames += o.sketch_frames;
        summary.silhouette_frames += o.silhouette_frames;
        summary.parsing_frames += o.parsing_frames;
        summary.any_external_failure |= o.external_failure;
        summary.failures.insert(summary.failures.end(), o.failures.begin(), o.failures.end());
        if (o.written) {
            ++summary.sequences_written;
            records.push_back({{"subject", meta.subject},
                               {"condition", meta.condition},
                               {"view", meta.view},
                               {"seq", meta.seq},
                               {"base", "records/" + sanitize(meta.key())}});
        }
    }

    json root;
    json palette = json::object();
    for (const auto& [label, name] : index.palette) palette[std::to_string(label)] = name;
    root["palette"] = palette;
    json grouping = json::object();
    for (const auto& [name, labels] : index.grouping.groups) grouping[name] = labels;
    root["grouping"] = grouping;
    root["protocol"] = protocol_to_json(index.protocol);
    root["target"] = {{"height", cfg.target_height}, {"width", cfg.target_width}};
    root["records"] = records;
    dump_json(out_dir / "records.json", root);

    write_summary(out_dir / "summary.json", summary);
    return summary;
}

}  // namespace

StageSummary run_build_modality(const fs::path& manifest_path, const RunConfig& cfg,
                                const fs::path& out_dir) {
    return run_ingest(manifest_path, cfg, out_dir, true, true);
}

StageSummary run_prep(const fs::path& manifest_path, const RunConfig& cfg,
                      const fs::path& out_dir) {
    return run_ingest(manifest_path, cfg, out_dir, false, false);
}

void write_summary(const fs::path& path, const StageSummary& s) {
    json j = {{"sequences_total", s.sequences_total},
              {"sequences_written", s.sequences_written},
              {"frames_total", s.frames_total},
              {"frames_written", s.frames_written},
              {"frames_skipped", s.frames_skipped},
              {"modality_frames",
               {{"sketch", s.sketch_frames},
                {"silhouette", s.silhouette_frames},
                {"parsing", s.parsing_frames}}},
              {"failures", s.failures}};
    dump_json(path, j);
}

RecordSet read_record_set(const fs::path& records_json) {
    const json root = load_json(records_json, "records manifest");
    const fs::path base = records_json.parent_path();

    RecordSet set;
    if (root.contains("palette"))
        for (const auto& [k, v] : root["palette"].items())
            set.palette[std::stoi(k)] = v.get<std::string>();
    if (root.contains("grouping"))
        for (const auto& [name, labels] : root["grouping"].items())
            set.grouping.groups.emplace_back(name, labels.get<std::vector<int>>());
    set.protocol = protocol_from_json(root.at("protocol"));
    if (root.contains("target")) {
        set.target.height = root["target"].at("height").get<int>();
        set.target.width = root["target"].at("width").get<int>();
    }
    for (const auto& r : root.at("records")) {
        SequenceMeta meta;
        meta.subject = r.at("subject").get<std::string>();
        meta.condition = r.at("condition").get<std::string>();
        meta.view = r.at("view").get<std::string>();
        meta.seq = r.at("seq").get<int>();
        set.records.emplace_back(meta, base / r.at("base").get<std::string>());
    }
    return set;
}

void run_extract(const fs::path& records_json, const RunConfig& cfg, const fs::path& out_dir) {
    const RecordSet set = read_record_set(records_json);
    fs::create_directories(out_dir / "features");
    echo_config(out_dir, cfg);

    struct Extracted {
        SequenceFeatures features;
        std::string error;
    };
    std::vector<Extracted> results(set.records.size());
    parallel_for(set.records.size(), cfg.jobs, [&](size_t i) {
        try {
            const SequenceRecord record = read_record(set.records[i].second);
            results[i].features = sequence_features(record, cfg.descriptor);
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });

    json sequences = json::array();
    for (size_t i = 0; i < results.size(); ++i) {
        if (!results[i].error.empty())
            throw DataError("extract failed for " + set.records[i].first.key() + ": " +
                            results[i].error);
        const SequenceFeatures& f = results[i].features;
        const std::string stem = sanitize(f.meta.key());
        json branches = json::array();
        for (const auto& b : f.branches) {
            const std::string rel = "features/" + stem + "_" + b.tag + ".gstk";
            std::vector<float> data;
            data.reserve(b.parts.strips.size() * size_t(b.parts.channels));
            for (const auto& strip : b.parts.strips)
                for (double v : strip) data.push_back(float(v));
            write_tensor(out_dir / rel,
                         Tensor::from_f32({uint64_t(b.parts.strips.size()),
                                           uint64_t(b.parts.channels)},
                                          std::move(data)));
            json levels = json::array();
            for (int L : b.parts.levels) levels.push_back(L);
            branches.push_back({{"tag", b.tag},
                                {"strips", b.parts.strips.size()},
                                {"channels", b.parts.channels},
                                {"levels", levels},
                                {"path", rel}});
        }
        sequences.push_back({{"subject", f.meta.subject},
                             {"condition", f.meta.condition},
                             {"view", f.meta.view},
                             {"seq", f.meta.seq},
                             {"branches", branches}});
    }

    json root;
    root["protocol"] = protocol_to_json(set.protocol);
    root["modality_set"] = to_string(cfg.descriptor.modality_set);
    root["descriptor"] = {{"stages", cfg.descriptor.sketch_branch.stages},
                          {"orientations", cfg.descriptor.sketch_branch.orientations},
                          {"fusion", to_string(cfg.descriptor.fusion)},
                          {"hpp_levels", cfg.descriptor.hpp_levels},
                          {"embed_dim", cfg.descriptor.embed_dim}};
    root["sequences"] = sequences;
    dump_json(out_dir / "features.json", root);
}

FeatureSet read_feature_set(const fs::path& features_json) {
    const json root = load_json(features_json, "features manifest");
    const fs::path base = features_json.parent_path();

    FeatureSet set;
    set.protocol = protocol_from_json(root.at("protocol"));
    set.modality_set = root.value("modality_set", "");
    for (const auto& s : root.at("sequences")) {
        SequenceFeatures f;
        f.meta.subject = s.at("subject").get<std::string>();
        f.meta.condition = s.at("condition").get<std::string>();
        f.meta.view = s.at("view").get<std::string>();
        f.meta.seq = s.at("seq").get<int>();
        for (const auto& b : s.at("branches")) {
            BranchFeatures bf;
            bf.tag = b.at("tag").get<std::string>();
            const size_t strips = b.at("strips").get<size_t>();
            const int channels = b.at("channels").get<int>();
            bf.parts.channels = channels;
            if (b.contains("levels")) bf.parts.levels = b["levels"].get<std::vector<int>>();
            const Tensor t = read_tensor(base / b.at("path").get<std::string>());
            if (t.dtype != Dtype::F32 ||
                t.dims != std::vector<uint64_t>{uint64_t(strips), uint64_t(channels)})
                throw DataError("feature tensor shape mismatch: " + b.at("path").get<std::string>());
            for (size_t st = 0; st < strips; ++st)
                bf.parts.strips.emplace_back(t.f32.begin() + long(st * size_t(channels)),
                                             t.f32.begin() + long((st + 1) * size_t(channels)));
            f.branches.push_back(std::move(bf));
        }
        set.features.push_back(std::move(f));
    }
    return set;
}

void run_train(const fs::path& features_json, const RunConfig& cfg, const fs::path& out_dir) {
    const FeatureSet set = read_feature_set(features_json);
    if (set.features.empty()) throw DataError("train: feature set is empty");
    fs::create_directories(out_dir);
    echo_config(out_dir, cfg);

    const TrainResult result = train(set.features, cfg.train);
    save_head(out_dir / "head", result.head);
    write_loss_curve(out_dir / "loss_curve.csv", result.curve);

    json info = {{"iterations", cfg.train.iterations},
                 {"classes", result.head.class_names.size()},
                 {"sampled_with_replacement", result.sampled_with_replacement},
                 {"final_triplet_loss", result.curve.empty() ? 0.0 : result.curve.back().triplet},
                 {"final_ce_loss", result.curve.empty() ? 0.0 : result.curve.back().cross_entropy}};
    dump_json(out_dir / "train_summary.json", info);
}

EvalReport run_evaluate(const fs::path& features_json, const std::optional<fs::path>& head_dir,
                        const RunConfig& cfg, const fs::path& out_dir) {
    const FeatureSet set = read_feature_set(features_json);
    if (set.features.empty()) throw DataError("evaluate: feature set is empty");
    fs::create_directories(out_dir);
    echo_config(out_dir, cfg);

    const MetricHead head = head_dir ? load_head(*head_dir)
                                     : init_head(set.features, cfg.descriptor.embed_dim);

    EvalReport report = per_condition_report(items_from_features(set.features, head), set.protocol,
                                             cfg.distance, cfg.exclude_identical, cfg.match_log);
    report.modality_set = set.modality_set;

    write_report_json(out_dir / "eval.json", report);
    write_report_csv(out_dir / "eval.csv", report);
    return report;
}

}  // namespace sketchgait
