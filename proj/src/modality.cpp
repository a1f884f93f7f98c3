#include "sketchgait/modality.hpp"

#include <algorithm>

namespace sketchgait {

Mask mask_from_parsing(const LabelMap& lm) {
    Mask out(lm.width, lm.height);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = lm.data[i] != 0 ? 1 : 0;
    return out;
}

Frame masked_foreground(const Frame& frame, const Mask& mask) {
    if (frame.width != mask.width || frame.height != mask.height)
        throw ParameterError("masked_foreground: frame and mask dimensions differ");
    Frame out(frame.width, frame.height);
    const size_t n = size_t(frame.width) * frame.height;
    for (size_t i = 0; i < n; ++i) {
        const double m = mask.data[i] ? 1.0 : 0.0;
        out.data[i * 3 + 0] = frame.data[i * 3 + 0] * m;
        out.data[i * 3 + 1] = frame.data[i * 3 + 1] * m;
        out.data[i * 3 + 2] = frame.data[i * 3 + 2] * m;
    }
    return out;
}

SketchMap build_sketch(const Frame& frame, const Mask& mask, const DetectorSpec& detector) {
    const Frame fg = masked_foreground(frame, mask);

    SketchMap sketch;
    if (std::holds_alternative<SobelDetector>(detector)) {
        sketch = sobel_sketch(luminance(fg));
    } else if (const auto* c = std::get_if<CannyDetector>(&detector)) {
        sketch = canny(luminance(fg), c->params.sigma, c->params.low, c->params.high);
    } else {
        sketch = run_external_detector(fg, std::get<ExternalDetector>(detector).hook);
    }

    for (size_t i = 0; i < sketch.data.size(); ++i)
        if (!mask.data[i]) sketch.data[i] = 0.0;
    return sketch;
}

Mask parsing_to_silhouette(const LabelMap& lm) { return mask_from_parsing(lm); }

SketchMap parsing_to_edge(const LabelMap& lm, bool include_outer) {
    const int w = lm.width, h = lm.height;
    SketchMap out(w, h);
    auto transition = [&](int a, int b) {
        if (a == b) return false;
        if (!include_outer && (a == 0 || b == 0)) return false;
        return true;
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int v = lm.at(x, y);
            const bool edge = (x > 0 && transition(v, lm.at(x - 1, y))) ||
                              (x + 1 < w && transition(v, lm.at(x + 1, y))) ||
                              (y > 0 && transition(v, lm.at(x, y - 1))) ||
                              (y + 1 < h && transition(v, lm.at(x, y + 1)));
            out.at(x, y) = edge ? 1.0 : 0.0;
        }
    }
    return out;
}

namespace {

void check_dims(const ModalityStack& stack, int w, int h, const std::string& name) {
    if (stack.channels.empty()) {
        return;
    }
    if (stack.width != w || stack.height != h)
        throw ParameterError("stack_channels: dimension mismatch at channel '" + name + "'");
}

}  // namespace

void append_channel(ModalityStack& stack, const ChannelSource& source) {
    if (const auto* s = std::get_if<SketchMap>(&source.map)) {
        check_dims(stack, s->width, s->height, source.name);
        if (stack.channels.empty()) {
            stack.width = s->width;
            stack.height = s->height;
        }
        stack.channels.push_back({source.name, ChannelKind::Sketch});
        stack.data.insert(stack.data.end(), s->data.begin(), s->data.end());
    } else {
        const auto& m = std::get<Mask>(source.map);
        check_dims(stack, m.width, m.height, source.name);
        if (stack.channels.empty()) {
            stack.width = m.width;
            stack.height = m.height;
        }
        stack.channels.push_back({source.name, ChannelKind::Silhouette});
        for (uint8_t v : m.data) stack.data.push_back(v ? 1.0 : 0.0);
    }
}

void append_stack(ModalityStack& stack, const ModalityStack& more) {
    if (stack.channels.empty()) {
        stack = more;
        return;
    }
    if (stack.width != more.width || stack.height != more.height)
        throw ParameterError("append_stack: dimension mismatch");
    stack.channels.insert(stack.channels.end(), more.channels.begin(), more.channels.end());
    stack.data.insert(stack.data.end(), more.data.begin(), more.data.end());
}

ModalityStack stack_channels(const std::vector<ChannelSource>& sources) {
    if (sources.empty()) throw ParameterError("stack_channels: empty channel list");
    ModalityStack stack;
    for (const auto& s : sources) append_channel(stack, s);
    return stack;
}

ModalityStack parsing_to_stack(const LabelMap& lm, const LabelGrouping& grouping) {
    if (grouping.empty()) throw ParameterError("parsing_to_stack: empty grouping");

    // label -> group index, for the labels the grouping declares
    std::map<int, size_t> group_of;
    for (size_t g = 0; g < grouping.groups.size(); ++g)
        for (int label : grouping.groups[g].second) group_of[label] = g;

    ModalityStack stack(lm.width, lm.height);
    const size_t n = size_t(lm.width) * lm.height;
    stack.data.assign(grouping.groups.size() * n, 0.0);
    for (const auto& [name, labels] : grouping.groups)
        stack.channels.push_back({name, ChannelKind::ParsingOneHotGroup});

    for (size_t i = 0; i < n; ++i) {
        const int label = lm.data[i];
        if (label == 0) continue;
        const auto it = group_of.find(label);
        if (it == group_of.end())
            throw DataError("parsing_to_stack: label " + std::to_string(label) +
                            " at pixel (" + std::to_string(i % size_t(lm.width)) + "," +
                            std::to_string(i / size_t(lm.width)) + ") is outside the palette grouping");
        stack.data[it->second * n + i] = 1.0;
    }
    return stack;
}

}  // namespace sketchgait
