#pragma once

#include <filesystem>

#include "sketchgait/raster.hpp"

namespace sketchgait {

// 8-bit PNG I/O. Values map linearly between [0,1] and [0,255]; label maps
// store the raw label byte. Read errors throw DataError.

void write_png_gray(const std::filesystem::path& path, const GrayImage& img);
void write_png_gray(const std::filesystem::path& path, const SketchMap& map);
void write_png_mask(const std::filesystem::path& path, const Mask& mask);
void write_png_labels(const std::filesystem::path& path, const LabelMap& lm);
void write_png_rgb(const std::filesystem::path& path, const Frame& frame);

// Requires a single-channel (grayscale, non-palette) 8-bit PNG.
GrayImage read_png_gray(const std::filesystem::path& path);
// Any nonzero byte counts as foreground.
Mask read_png_mask(const std::filesystem::path& path);
// Grayscale or palette PNG; the byte value is the label.
LabelMap read_png_labels(const std::filesystem::path& path);
// RGB or RGBA (alpha dropped) or grayscale (replicated) PNG.
Frame read_png_rgb(const std::filesystem::path& path);

// Channel count of a PNG on disk (1 = gray, 3 = rgb, ...), for validation.
int png_channels(const std::filesystem::path& path);

}  // namespace sketchgait
