#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sketchgait/error.hpp"

namespace sketchgait {

// Single-channel luminance raster, row-major, values in [0,1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0) : width(w), height(h), data(size_t(w) * h, fill) {}

    double& at(int x, int y) { return data[size_t(y) * width + x]; }
    double at(int x, int y) const { return data[size_t(y) * width + x]; }
    size_t size() const { return data.size(); }
};

// Interleaved RGB frame, row-major, values in [0,1].
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // width * height * 3

    Frame() = default;
    Frame(int w, int h, double fill = 0.0) : width(w), height(h), data(size_t(w) * h * 3, fill) {}

    double& at(int x, int y, int c) { return data[(size_t(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return data[(size_t(y) * width + x) * 3 + c]; }
};

// Binary foreground mask, values in {0,1}.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    Mask() = default;
    Mask(int w, int h, uint8_t fill = 0) : width(w), height(h), data(size_t(w) * h, fill) {}

    uint8_t& at(int x, int y) { return data[size_t(y) * width + x]; }
    uint8_t at(int x, int y) const { return data[size_t(y) * width + x]; }
};

// Per-pixel integer semantic labels; 0 is reserved for background.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<int> data;

    LabelMap() = default;
    LabelMap(int w, int h, int fill = 0) : width(w), height(h), data(size_t(w) * h, fill) {}

    int& at(int x, int y) { return data[size_t(y) * width + x]; }
    int at(int x, int y) const { return data[size_t(y) * width + x]; }
};

// Single-channel edge intensity raster in [0,1]. Binary detectors emit {0,1}.
struct SketchMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    SketchMap() = default;
    SketchMap(int w, int h, double fill = 0.0) : width(w), height(h), data(size_t(w) * h, fill) {}

    double& at(int x, int y) { return data[size_t(y) * width + x]; }
    double at(int x, int y) const { return data[size_t(y) * width + x]; }
};

enum class ChannelKind { Sketch, Silhouette, ParsingOneHotGroup };

std::string to_string(ChannelKind kind);
ChannelKind channel_kind_from_string(const std::string& s);

struct ChannelDesc {
    std::string name;
    ChannelKind kind = ChannelKind::Sketch;

    bool operator==(const ChannelDesc&) const = default;
};

// Planar multi-channel stack; plane i obeys channels[i].kind's value range.
struct ModalityStack {
    int width = 0;
    int height = 0;
    std::vector<ChannelDesc> channels;
    std::vector<double> data;  // channels.size() * height * width, planar

    ModalityStack() = default;
    ModalityStack(int w, int h) : width(w), height(h) {}

    size_t plane_size() const { return size_t(width) * height; }

    double* plane(size_t c) { return data.data() + c * plane_size(); }
    const double* plane(size_t c) const { return data.data() + c * plane_size(); }

    double& at(size_t c, int x, int y) { return data[c * plane_size() + size_t(y) * width + x]; }
    double at(size_t c, int x, int y) const { return data[c * plane_size() + size_t(y) * width + x]; }

    // Index of the first channel with the given kind, or -1.
    int find_kind(ChannelKind kind) const {
        for (size_t i = 0; i < channels.size(); ++i)
            if (channels[i].kind == kind) return int(i);
        return -1;
    }
};

// Rec.601 luminance of an RGB frame.
GrayImage luminance(const Frame& frame);

}  // namespace sketchgait
