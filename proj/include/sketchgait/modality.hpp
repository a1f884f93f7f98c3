#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "sketchgait/edge.hpp"
#include "sketchgait/hook.hpp"
#include "sketchgait/raster.hpp"

namespace sketchgait {

// Which edge detector builds the sketch modality.
struct SobelDetector {};
struct CannyDetector {
    CannyParams params;
};
struct ExternalDetector {
    ExternalHookConfig hook;
};
using DetectorSpec = std::variant<SobelDetector, CannyDetector, ExternalDetector>;

// Named partition of the nonzero palette labels.
struct LabelGrouping {
    std::vector<std::pair<std::string, std::vector<int>>> groups;

    bool empty() const { return groups.empty(); }
};

// 1 wherever the label map is non-background.
Mask mask_from_parsing(const LabelMap& lm);

// Per-pixel, per-channel multiply of a frame by a binary mask.
// Throws ParameterError on dimension mismatch.
Frame masked_foreground(const Frame& frame, const Mask& mask);

// Sketch construction: mask the frame, run the detector on the masked
// foreground, then zero everything outside the mask again. Detectors with
// support wider than one pixel bleed response past the body outline; the
// second masking restores the support contract while keeping the mask
// boundary edge inside the body.
SketchMap build_sketch(const Frame& frame, const Mask& mask, const DetectorSpec& detector);

// Collapses a parsing map to a binary silhouette (same contract as
// mask_from_parsing; kept separate as a distinct modality source).
Mask parsing_to_silhouette(const LabelMap& lm);

// Binary boundary map: 1 where a 4-neighbor carries a different label.
// include_outer=false drops transitions that touch background, keeping only
// internal part boundaries.
SketchMap parsing_to_edge(const LabelMap& lm, bool include_outer = true);

// One stack channel: a sketch plane or a silhouette plane.
struct ChannelSource {
    std::string name;
    std::variant<SketchMap, Mask> map;
};

// Planar channel stack preserving input order.
// Throws ParameterError on empty list or mismatched dimensions.
ModalityStack stack_channels(const std::vector<ChannelSource>& sources);

// One binary plane per label group. Throws DataError (naming pixel and label)
// when a nonzero label is outside every group.
ModalityStack parsing_to_stack(const LabelMap& lm, const LabelGrouping& groups);

// Appends extra channels onto an existing stack (used for SketchGait++ input
// stacking and for assembling full per-frame records).
void append_channel(ModalityStack& stack, const ChannelSource& source);
void append_stack(ModalityStack& stack, const ModalityStack& more);

}  // namespace sketchgait
