#pragma once

#include <filesystem>

#include "sketchgait/manifest.hpp"

namespace sketchgait {

// Articulated stick-figure dataset: every identity gets its own limb
// geometry (head size, torso/leg proportions, widths, swing amplitudes,
// clothing texture frequency), so identities are separable from shape alone.
// Conditions: nm (normal), bg (a bag attached at the hip), cl (longer, wider
// coat with denser texture).
struct SyntheticSpec {
    int identities = 10;
    int conditions = 3;  // prefix of {nm, bg, cl}
    int sequences_per_condition = 2;
    int frames = 12;
    int width = 96;
    int height = 128;
    uint64_t seed = 7;
};

// Renders frames/masks/parsing PNGs under out_dir and writes manifest.json
// (palette, grouping, gallery=nm / probe=all protocol, entries).
// Returns the manifest path.
std::filesystem::path generate_synthetic_dataset(const std::filesystem::path& out_dir,
                                                 const SyntheticSpec& spec);

}  // namespace sketchgait
