#pragma once

#include <optional>

#include "sketchgait/raster.hpp"

namespace sketchgait {

struct NormalizeTarget {
    int height = 64;
    int width = 64;
};

// Foreground source priority for alignment: silhouette channel if present,
// else the union of parsing one-hot planes, else sketch thresholded at 0.1.
Mask derive_foreground(const ModalityStack& stack);

// Canonical gait normalization:
//   1. tight bounding box of the foreground rows,
//   2. bilinear rescale so the box height equals target.height,
//   3. integer shift centering the foreground center of mass column,
//   4. zero pad / crop to target.width,
//   5. silhouette channels re-binarized at 0.5.
// Returns nullopt (frame-skip signal) when the mask has no foreground pixel.
std::optional<ModalityStack> normalize_frame(const ModalityStack& stack, const Mask& fg,
                                             NormalizeTarget target = {});

// Bilinear resampling with border clamp; scale 1 is an exact copy.
GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height);

}  // namespace sketchgait
