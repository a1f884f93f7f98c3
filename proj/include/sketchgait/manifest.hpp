#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sketchgait/modality.hpp"

namespace sketchgait {

// Identity of one gait sequence within a dataset.
struct SequenceMeta {
    std::string subject;
    std::string condition;
    std::string view;
    int seq = 0;

    std::vector<std::string> frames;   // RGB frame paths
    std::vector<std::string> masks;    // silhouette mask paths (optional)
    std::vector<std::string> parsing;  // parsing label-map paths (optional)
    std::map<std::string, std::vector<std::string>> modalities;  // precomputed, e.g. "sketch"

    std::string key() const {
        return subject + "/" + condition + "/" + view + "/" + std::to_string(seq);
    }
};

// Gallery/probe assignment by condition tag. Never hardcoded; always read
// from the manifest.
struct Protocol {
    std::vector<std::string> gallery_conditions;
    std::vector<std::string> probe_conditions;
};

struct DatasetIndex {
    std::map<int, std::string> palette;  // label -> part name; 0 is background, never listed
    LabelGrouping grouping;
    Protocol protocol;
    std::vector<SequenceMeta> entries;  // sorted by key

    std::vector<std::string> subjects() const;
};

// Loads and fully validates a manifest JSON. Errors carry a JSON pointer to
// the offending field. Checks: schema shape, per-entry path lists of equal
// length >= 1, unique (subject, condition, view, seq), referenced files
// present on disk (when check_files), and grouping restricted to palette
// labels. Entries come back sorted by key.
DatasetIndex scan_manifest(const std::filesystem::path& path, bool check_files = true);

// Serializes an index back to manifest JSON (used by pipeline stages that
// emit derived manifests).
void write_manifest(const std::filesystem::path& path, const DatasetIndex& index);

}  // namespace sketchgait
