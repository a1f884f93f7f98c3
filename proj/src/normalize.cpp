#include "sketchgait/normalize.hpp"

#include <algorithm>
#include <cmath>

namespace sketchgait {

namespace {

// Bilinear sample with border clamp; mapping src = (dst + 0.5) * scale - 0.5
// so an unchanged axis copies exactly.
std::vector<double> resize_plane(const double* src, int w, int h, int out_w, int out_h) {
    std::vector<double> out(size_t(out_w) * out_h);
    const double sx = double(w) / out_w;
    const double sy = double(h) / out_h;
    for (int y = 0; y < out_h; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        const int y0 = std::clamp(int(std::floor(fy)), 0, h - 1);
        const int y1 = std::min(y0 + 1, h - 1);
        const double wy = std::clamp(fy - std::floor(fy), 0.0, 1.0);
        for (int x = 0; x < out_w; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            const int x0 = std::clamp(int(std::floor(fx)), 0, w - 1);
            const int x1 = std::min(x0 + 1, w - 1);
            const double wx = std::clamp(fx - std::floor(fx), 0.0, 1.0);
            const double top = src[size_t(y0) * w + x0] * (1.0 - wx) + src[size_t(y0) * w + x1] * wx;
            const double bot = src[size_t(y1) * w + x0] * (1.0 - wx) + src[size_t(y1) * w + x1] * wx;
            out[size_t(y) * out_w + x] = top * (1.0 - wy) + bot * wy;
        }
    }
    return out;
}

}  // namespace

GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height) {
    if (out_width < 1 || out_height < 1)
        throw ParameterError("resize_bilinear: output dimensions must be positive");
    GrayImage out(out_width, out_height);
    out.data = resize_plane(img.data.data(), img.width, img.height, out_width, out_height);
    return out;
}

Mask derive_foreground(const ModalityStack& stack) {
    Mask fg(stack.width, stack.height);
    const size_t n = stack.plane_size();

    const int silh = stack.find_kind(ChannelKind::Silhouette);
    if (silh >= 0) {
        const double* p = stack.plane(size_t(silh));
        for (size_t i = 0; i < n; ++i) fg.data[i] = p[i] >= 0.5 ? 1 : 0;
        return fg;
    }
    bool has_parsing = false;
    for (size_t c = 0; c < stack.channels.size(); ++c) {
        if (stack.channels[c].kind != ChannelKind::ParsingOneHotGroup) continue;
        has_parsing = true;
        const double* p = stack.plane(c);
        for (size_t i = 0; i < n; ++i)
            if (p[i] >= 0.5) fg.data[i] = 1;
    }
    if (has_parsing) return fg;

    const int sketch = stack.find_kind(ChannelKind::Sketch);
    if (sketch < 0) throw ParameterError("derive_foreground: stack has no usable channel");
    const double* p = stack.plane(size_t(sketch));
    for (size_t i = 0; i < n; ++i) fg.data[i] = p[i] >= 0.1 ? 1 : 0;
    return fg;
}

std::optional<ModalityStack> normalize_frame(const ModalityStack& stack, const Mask& fg,
                                             NormalizeTarget target) {
    if (stack.width != fg.width || stack.height != fg.height)
        throw ParameterError("normalize_frame: stack and mask dimensions differ");
    if (target.width < 1 || target.height < 1)
        throw ParameterError("normalize_frame: target dimensions must be positive");

    // Tight row bounding box of the foreground.
    int r0 = stack.height, r1 = -1;
    for (int y = 0; y < stack.height; ++y) {
        for (int x = 0; x < stack.width; ++x) {
            if (fg.at(x, y)) {
                r0 = std::min(r0, y);
                r1 = std::max(r1, y);
                break;
            }
        }
    }
    if (r1 < 0) return std::nullopt;  // empty mask: skip this frame

    const int box_h = r1 - r0 + 1;
    const int out_h = target.height;
    const int out_w = target.width;
    const int mid_w = std::max(1, int(std::lround(double(stack.width) * out_h / box_h)));

    // Crop the row box and rescale every channel; the mask rides along for
    // the center-of-mass computation.
    const size_t crop_n = size_t(stack.width) * box_h;
    std::vector<double> crop(crop_n);
    auto crop_rows = [&](const double* plane) {
        std::copy(plane + size_t(r0) * stack.width, plane + size_t(r1 + 1) * stack.width, crop.begin());
        return resize_plane(crop.data(), stack.width, box_h, mid_w, out_h);
    };

    std::vector<double> mask_plane(crop_n);
    for (size_t i = 0; i < crop_n; ++i)
        mask_plane[i] = fg.data[size_t(r0) * stack.width + i] ? 1.0 : 0.0;
    const std::vector<double> mask_resized =
        resize_plane(mask_plane.data(), stack.width, box_h, mid_w, out_h);

    double com = 0.0, weight = 0.0;
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < mid_w; ++x) {
            if (mask_resized[size_t(y) * mid_w + x] >= 0.5) {
                com += x;
                weight += 1.0;
            }
        }
    }
    if (weight == 0.0) return std::nullopt;  // foreground vanished under downscale
    com /= weight;

    // Integer shift placing the center of mass on the output center column.
    // nearbyint (round half to even) keeps a second pass at shift zero.
    const int offset = int(std::nearbyint((out_w - 1) / 2.0 - com));

    ModalityStack out(out_w, out_h);
    out.channels = stack.channels;
    out.data.assign(stack.channels.size() * size_t(out_w) * out_h, 0.0);

    for (size_t c = 0; c < stack.channels.size(); ++c) {
        const std::vector<double> resized = crop_rows(stack.plane(c));
        double* dst = out.plane(c);
        const bool binarize = stack.channels[c].kind == ChannelKind::Silhouette;
        for (int y = 0; y < out_h; ++y) {
            for (int x = 0; x < out_w; ++x) {
                const int sx = x - offset;
                double v = (sx >= 0 && sx < mid_w) ? resized[size_t(y) * mid_w + sx] : 0.0;
                if (binarize) v = v >= 0.5 ? 1.0 : 0.0;
                dst[size_t(y) * out_w + x] = v;
            }
        }
    }
    return out;
}

}  // namespace sketchgait
