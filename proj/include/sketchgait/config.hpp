#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sketchgait/descriptor.hpp"
#include "sketchgait/eval.hpp"
#include "sketchgait/metric.hpp"
#include "sketchgait/modality.hpp"

namespace sketchgait {

// Sketch channel source: an edge detector on the masked RGB frame, or the
// parsing boundary map (the coarse-grained variant).
enum class SketchSource { Detector, ParsingEdge };
// Silhouette channel source: the dataset mask, or the parsing foreground union.
enum class SilhouetteSource { Mask, Parsing };

// Resolved run configuration. Every field has a default; parsing rejects
// unknown keys; the resolved form is echoed into every output directory.
struct RunConfig {
    uint64_t seed = 1;
    int jobs = 1;

    // detector.*
    std::string detector_kind = "sobel";  // sobel | canny | external
    CannyParams canny;
    std::string external_command;
    double external_timeout_s = 60.0;

    // modality.*
    ModalitySet modality_set = ModalitySet::SketchParsing;
    SketchSource sketch_source = SketchSource::Detector;
    SilhouetteSource silhouette_source = SilhouetteSource::Mask;
    bool parsing_edge_include_outer = true;

    // normalize.*
    int target_height = 64;
    int target_width = 64;

    // descriptor.*
    DescriptorConfig descriptor;

    // train.*
    TrainConfig train;

    // eval.*
    Distance distance = Distance::Euclidean;
    bool exclude_identical = true;
    bool match_log = false;

    DetectorSpec detector_spec() const;
};

// Parses a TOML-style key/value file ([section] headers or dotted keys,
// strings, numbers, booleans, and flat arrays). Unknown keys raise
// ParameterError naming the key.
RunConfig parse_config_file(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// Canonical serialization of the resolved configuration.
std::string serialize_config(const RunConfig& cfg);
void echo_config(const std::filesystem::path& out_dir, const RunConfig& cfg);

}  // namespace sketchgait
