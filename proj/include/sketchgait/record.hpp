#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sketchgait/manifest.hpp"
#include "sketchgait/raster.hpp"

namespace sketchgait {

// One packaged gait sequence: identity metadata plus homogeneous per-frame
// modality stacks at the canonical resolution.
struct SequenceRecord {
    SequenceMeta meta;
    std::vector<ModalityStack> frames;
};

// Validates homogeneity (same dims and channel descriptors across frames).
SequenceRecord package_sequence(SequenceMeta meta, std::vector<ModalityStack> stacks);

// A record on disk is <base>.gstk (one f32 tensor, dims [frames, channels,
// height, width]) plus <base>.json describing identity and channel layout.
void write_record(const std::filesystem::path& base, const SequenceRecord& record);
SequenceRecord read_record(const std::filesystem::path& base);

}  // namespace sketchgait
