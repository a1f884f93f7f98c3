#include "sketchgait/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace sketchgait {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

uint8_t to_byte(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return uint8_t(std::lround(c * 255.0));
}

void write_png_bytes(const std::filesystem::path& path, int width, int height,
                     int color_type, const std::vector<uint8_t>& bytes) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw DataError("cannot open for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw DataError("libpng init failed writing " + path.string());
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataError("libpng error writing " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const int stride = width * (color_type == PNG_COLOR_TYPE_RGB ? 3 : 1);
    std::vector<png_bytep> rows(static_cast<size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[size_t(y)] = const_cast<png_bytep>(bytes.data() + size_t(y) * stride);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

struct PngData {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<uint8_t> bytes;  // interleaved, 8-bit
};

// expand_palette: palette PNGs become RGB when true, stay as index bytes when false.
PngData read_png_bytes(const std::filesystem::path& path, bool expand_palette) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw DataError("cannot open PNG: " + path.string());

    png_byte sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw DataError("not a PNG file: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("libpng init failed reading " + path.string());
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("libpng error reading " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        if (expand_palette)
            png_set_palette_to_rgb(png);
        else if (bit_depth < 8)
            png_set_packing(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS) && expand_palette) png_set_tRNS_to_alpha(png);
    png_read_update_info(png, info);

    PngData out;
    out.width = int(png_get_image_width(png, info));
    out.height = int(png_get_image_height(png, info));
    out.channels = int(png_get_channels(png, info));

    const size_t stride = png_get_rowbytes(png, info);
    out.bytes.resize(stride * size_t(out.height));
    std::vector<png_bytep> rows(static_cast<size_t>(out.height));
    for (int y = 0; y < out.height; ++y) rows[size_t(y)] = out.bytes.data() + size_t(y) * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

}  // namespace

void write_png_gray(const std::filesystem::path& path, const GrayImage& img) {
    std::vector<uint8_t> bytes(img.data.size());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_byte(img.data[i]);
    write_png_bytes(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, bytes);
}

void write_png_gray(const std::filesystem::path& path, const SketchMap& map) {
    std::vector<uint8_t> bytes(map.data.size());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_byte(map.data[i]);
    write_png_bytes(path, map.width, map.height, PNG_COLOR_TYPE_GRAY, bytes);
}

void write_png_mask(const std::filesystem::path& path, const Mask& mask) {
    std::vector<uint8_t> bytes(mask.data.size());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
    write_png_bytes(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, bytes);
}

void write_png_labels(const std::filesystem::path& path, const LabelMap& lm) {
    std::vector<uint8_t> bytes(lm.data.size());
    for (size_t i = 0; i < bytes.size(); ++i) {
        const int v = lm.data[i];
        if (v < 0 || v > 255) throw DataError("label out of 8-bit range: " + std::to_string(v));
        bytes[i] = uint8_t(v);
    }
    write_png_bytes(path, lm.width, lm.height, PNG_COLOR_TYPE_GRAY, bytes);
}

void write_png_rgb(const std::filesystem::path& path, const Frame& frame) {
    std::vector<uint8_t> bytes(frame.data.size());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_byte(frame.data[i]);
    write_png_bytes(path, frame.width, frame.height, PNG_COLOR_TYPE_RGB, bytes);
}

GrayImage read_png_gray(const std::filesystem::path& path) {
    const PngData p = read_png_bytes(path, false);
    if (p.channels != 1)
        throw DataError("expected single-channel PNG, got " + std::to_string(p.channels) +
                        " channels: " + path.string());
    GrayImage img(p.width, p.height);
    for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = p.bytes[i] / 255.0;
    return img;
}

Mask read_png_mask(const std::filesystem::path& path) {
    const PngData p = read_png_bytes(path, false);
    if (p.channels != 1)
        throw DataError("expected single-channel mask PNG: " + path.string());
    Mask mask(p.width, p.height);
    for (size_t i = 0; i < mask.data.size(); ++i) mask.data[i] = p.bytes[i] ? 1 : 0;
    return mask;
}

LabelMap read_png_labels(const std::filesystem::path& path) {
    const PngData p = read_png_bytes(path, false);
    if (p.channels != 1)
        throw DataError("expected single-channel (gray or palette) label PNG: " + path.string());
    LabelMap lm(p.width, p.height);
    for (size_t i = 0; i < lm.data.size(); ++i) lm.data[i] = p.bytes[i];
    return lm;
}

Frame read_png_rgb(const std::filesystem::path& path) {
    const PngData p = read_png_bytes(path, true);
    Frame frame(p.width, p.height);
    const size_t n = size_t(p.width) * p.height;
    if (p.channels == 1) {
        for (size_t i = 0; i < n; ++i)
            frame.data[i * 3 + 0] = frame.data[i * 3 + 1] = frame.data[i * 3 + 2] = p.bytes[i] / 255.0;
    } else if (p.channels == 3 || p.channels == 4) {
        for (size_t i = 0; i < n; ++i)
            for (int c = 0; c < 3; ++c)
                frame.data[i * 3 + c] = p.bytes[i * size_t(p.channels) + size_t(c)] / 255.0;
    } else {
        throw DataError("unsupported PNG channel count " + std::to_string(p.channels) + ": " +
                        path.string());
    }
    return frame;
}

int png_channels(const std::filesystem::path& path) {
    return read_png_bytes(path, false).channels;
}

}  // namespace sketchgait
