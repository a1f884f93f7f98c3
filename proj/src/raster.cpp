#include "sketchgait/raster.hpp"

namespace sketchgait {

std::string to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::Sketch: return "sketch";
        case ChannelKind::Silhouette: return "silhouette";
        case ChannelKind::ParsingOneHotGroup: return "parsing-onehot-group";
    }
    return "sketch";
}

ChannelKind channel_kind_from_string(const std::string& s) {
    if (s == "sketch") return ChannelKind::Sketch;
    if (s == "silhouette") return ChannelKind::Silhouette;
    if (s == "parsing-onehot-group") return ChannelKind::ParsingOneHotGroup;
    throw DataError("unknown channel kind: " + s);
}

GrayImage luminance(const Frame& frame) {
    GrayImage out(frame.width, frame.height);
    const size_t n = size_t(frame.width) * frame.height;
    for (size_t i = 0; i < n; ++i) {
        const double r = frame.data[i * 3 + 0];
        const double g = frame.data[i * 3 + 1];
        const double b = frame.data[i * 3 + 2];
        out.data[i] = 0.299 * r + 0.587 * g + 0.114 * b;
    }
    return out;
}

}  // namespace sketchgait
