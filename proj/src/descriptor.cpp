#include "sketchgait/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sketchgait {

namespace {

int reflect(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n - 2;
    i = ((i % period) + period) % period;
    return i < n ? i : period - i;
}

constexpr int kKernelRadius = 2;  // 5x5
constexpr double kGaborSigma = 1.5;
constexpr double kGaborLambda = 4.0;
constexpr double kGaborGamma = 0.8;

}  // namespace

Matrix gabor_kernel(int k, int orientations) {
    if (orientations < 2) throw ParameterError("gabor_kernel: need at least 2 orientations");
    if (k < 0 || k >= orientations) throw ParameterError("gabor_kernel: orientation index out of range");

    const double theta = double(k) * M_PI / orientations;
    const double ct = std::cos(theta), st = std::sin(theta);
    Matrix m(2 * kKernelRadius + 1, 2 * kKernelRadius + 1);
    double l1 = 0.0;
    for (int y = -kKernelRadius; y <= kKernelRadius; ++y) {
        for (int x = -kKernelRadius; x <= kKernelRadius; ++x) {
            const double xr = x * ct + y * st;
            const double yr = -x * st + y * ct;
            const double env =
                std::exp(-(xr * xr + kGaborGamma * kGaborGamma * yr * yr) / (2.0 * kGaborSigma * kGaborSigma));
            const double v = env * std::sin(2.0 * M_PI * xr / kGaborLambda);
            m.at(y + kKernelRadius, x + kKernelRadius) = v;
            l1 += std::abs(v);
        }
    }
    if (l1 > 0.0)
        for (double& v : m.data) v /= l1;
    return m;
}

FeatureMap stack_to_feature(const ModalityStack& stack) {
    FeatureMap fm(int(stack.channels.size()), stack.height, stack.width);
    fm.data = stack.data;
    return fm;
}

FeatureMap filter_bank_stage(const FeatureMap& in, int orientations) {
    if (in.channels < 1) throw ParameterError("filter_bank_stage: empty feature map");
    if (in.height < 4 || in.width < 4)
        throw ParameterError("filter_bank_stage: input too small");

    const int h = in.height, w = in.width;
    const int oh = h / 2, ow = w / 2;

    std::vector<Matrix> kernels;
    kernels.reserve(size_t(orientations));
    for (int k = 0; k < orientations; ++k) kernels.push_back(gabor_kernel(k, orientations));

    FeatureMap out(orientations, oh, ow);
    std::vector<double> response(size_t(h) * w);
    for (int k = 0; k < orientations; ++k) {
        const Matrix& kernel = kernels[size_t(k)];
        std::fill(response.begin(), response.end(), 0.0);
        // Rectified correlation per input plane, reduced by max across planes.
        for (int c = 0; c < in.channels; ++c) {
            const double* plane = in.plane(size_t(c));
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    double acc = 0.0;
                    for (int ky = -kKernelRadius; ky <= kKernelRadius; ++ky) {
                        const int sy = reflect(y + ky, h);
                        for (int kx = -kKernelRadius; kx <= kKernelRadius; ++kx) {
                            const int sx = reflect(x + kx, w);
                            acc += kernel.at(ky + kKernelRadius, kx + kKernelRadius) *
                                   plane[size_t(sy) * w + sx];
                        }
                    }
                    double& r = response[size_t(y) * w + x];
                    r = std::max(r, std::abs(acc));
                }
            }
        }
        // 2x2 max downsample, trailing odd row/column dropped.
        double* dst = out.plane(size_t(k));
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                const size_t i = size_t(2 * y) * w + 2 * x;
                dst[size_t(y) * ow + x] = std::max(std::max(response[i], response[i + 1]),
                                                   std::max(response[i + w], response[i + w + 1]));
            }
        }
    }
    return out;
}

FeatureMap filter_bank_encode(const ModalityStack& stack, int stages, int orientations) {
    if (stages < 1) throw ParameterError("filter_bank_encode: stages must be >= 1");
    if (orientations < 2) throw ParameterError("filter_bank_encode: orientations must be >= 2");
    const int need = 4 << stages;
    if (stack.width < need || stack.height < need)
        throw ParameterError("filter_bank_encode: input must be at least " + std::to_string(need) +
                             " pixels in each dimension for " + std::to_string(stages) + " stages");

    FeatureMap fm = stack_to_feature(stack);
    for (int s = 0; s < stages; ++s) fm = filter_bank_stage(fm, orientations);
    return fm;
}

FeatureMap fuse_add(const FeatureMap& a, const FeatureMap& b) {
    if (a.channels != b.channels || a.height != b.height || a.width != b.width)
        throw ParameterError("fuse_add: feature map dimensions differ");
    FeatureMap out = a;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

FeatureMap fuse_concat(const FeatureMap& a, const FeatureMap& b) {
    if (a.height != b.height || a.width != b.width)
        throw ParameterError("fuse_concat: spatial dimensions differ");
    FeatureMap out(a.channels + b.channels, a.height, a.width);
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + long(a.data.size()));
    return out;
}

FeatureMap temporal_max_pool(const std::vector<FeatureMap>& frames) {
    if (frames.empty()) throw ParameterError("temporal_max_pool: empty frame list");
    FeatureMap out = frames.front();
    for (size_t f = 1; f < frames.size(); ++f) {
        const FeatureMap& fm = frames[f];
        if (fm.channels != out.channels || fm.height != out.height || fm.width != out.width)
            throw ParameterError("temporal_max_pool: frames are not homogeneous");
        for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = std::max(out.data[i], fm.data[i]);
    }
    return out;
}

PartDescriptor hpp(const FeatureMap& fm, const std::vector<int>& levels) {
    if (levels.empty()) throw ParameterError("hpp: empty level list");
    for (int L : levels) {
        if (L < 1) throw ParameterError("hpp: levels must be positive");
        if (fm.height < L)
            throw ParameterError("hpp: feature height " + std::to_string(fm.height) +
                                 " is smaller than level " + std::to_string(L));
    }

    PartDescriptor pd;
    pd.levels = levels;
    pd.channels = fm.channels;
    for (int L : levels) {
        const int base = fm.height / L;
        for (int s = 0; s < L; ++s) {
            const int r0 = s * base;
            const int r1 = (s == L - 1) ? fm.height : (s + 1) * base;  // remainder joins the last strip
            std::vector<double> v(size_t(fm.channels));
            for (int c = 0; c < fm.channels; ++c) {
                const double* plane = fm.plane(size_t(c));
                double mx = -std::numeric_limits<double>::infinity();
                double sum = 0.0;
                for (int y = r0; y < r1; ++y) {
                    for (int x = 0; x < fm.width; ++x) {
                        const double d = plane[size_t(y) * fm.width + x];
                        mx = std::max(mx, d);
                        sum += d;
                    }
                }
                v[size_t(c)] = mx + sum / (double(r1 - r0) * fm.width);
            }
            pd.strips.push_back(std::move(v));
        }
    }
    return pd;
}

BranchProjection identity_truncated(int strips, int out_dim, int in_dim) {
    BranchProjection proj;
    Matrix m(out_dim, in_dim);
    for (int i = 0; i < std::min(out_dim, in_dim); ++i) m.at(i, i) = 1.0;
    proj.per_strip.assign(size_t(strips), m);
    return proj;
}

Embedding branch_embed(const PartDescriptor& pd, const BranchProjection& proj,
                       const std::string& tag) {
    if (proj.per_strip.size() != pd.strips.size())
        throw ParameterError("branch_embed: projection count " + std::to_string(proj.per_strip.size()) +
                             " does not match strip count " + std::to_string(pd.strips.size()));
    Embedding e;
    for (size_t s = 0; s < pd.strips.size(); ++s) {
        const Matrix& m = proj.per_strip[s];
        const auto& v = pd.strips[s];
        if (m.cols != int(v.size()))
            throw ParameterError("branch_embed: projection shape mismatch at strip " + std::to_string(s));
        for (int r = 0; r < m.rows; ++r) {
            double acc = 0.0;
            for (int c = 0; c < m.cols; ++c) acc += m.at(r, c) * v[size_t(c)];
            e.data.push_back(acc);
        }
    }
    e.spans = {{tag, e.data.size()}};
    return e;
}

Embedding concat_embeddings(const std::vector<Embedding>& branches) {
    Embedding out;
    for (const auto& b : branches) {
        out.spans.insert(out.spans.end(), b.spans.begin(), b.spans.end());
        out.data.insert(out.data.end(), b.data.begin(), b.data.end());
    }
    return out;
}

std::string to_string(ModalitySet m) {
    switch (m) {
        case ModalitySet::Sketch: return "sketch";
        case ModalitySet::Parsing: return "parsing";
        case ModalitySet::SketchParsing: return "sketch+parsing";
        case ModalitySet::SketchSilhouetteParsing: return "sketch+silhouette+parsing";
    }
    return "sketch+parsing";
}

std::string to_string(FusionOp f) {
    switch (f) {
        case FusionOp::Add: return "add";
        case FusionOp::Concat: return "concat";
        case FusionOp::None: return "none";
    }
    return "add";
}

ModalitySet modality_set_from_string(const std::string& s) {
    if (s == "sketch") return ModalitySet::Sketch;
    if (s == "parsing") return ModalitySet::Parsing;
    if (s == "sketch+parsing") return ModalitySet::SketchParsing;
    if (s == "sketch+silhouette+parsing") return ModalitySet::SketchSilhouetteParsing;
    throw ParameterError("unknown modality set: " + s);
}

FusionOp fusion_op_from_string(const std::string& s) {
    if (s == "add") return FusionOp::Add;
    if (s == "concat") return FusionOp::Concat;
    if (s == "none") return FusionOp::None;
    throw ParameterError("unknown fusion operator: " + s);
}

std::vector<std::string> DescriptorConfig::branch_tags() const {
    switch (modality_set) {
        case ModalitySet::Sketch: return {"ske"};
        case ModalitySet::Parsing: return {"par"};
        default: break;
    }
    std::vector<std::string> tags = {"ske", "par"};
    if (fusion != FusionOp::None) tags.push_back("fus");
    return tags;
}

namespace {

// Channel selections for the branch inputs.
ModalityStack select_channels(const ModalityStack& stack, ChannelKind kind) {
    ModalityStack out(stack.width, stack.height);
    for (size_t c = 0; c < stack.channels.size(); ++c) {
        if (stack.channels[c].kind != kind) continue;
        out.channels.push_back(stack.channels[c]);
        out.data.insert(out.data.end(), stack.plane(c), stack.plane(c) + stack.plane_size());
    }
    return out;
}

ModalityStack sketch_input(const ModalityStack& stack, const DescriptorConfig& cfg) {
    ModalityStack in = select_channels(stack, ChannelKind::Sketch);
    if (in.channels.empty())
        throw DataError("record stack has no sketch channel");
    if (cfg.modality_set == ModalitySet::SketchSilhouetteParsing) {
        ModalityStack silh = select_channels(stack, ChannelKind::Silhouette);
        if (silh.channels.empty())
            throw DataError("sketch+silhouette+parsing needs a silhouette channel in the record");
        append_stack(in, silh);
    }
    return in;
}

ModalityStack parsing_input(const ModalityStack& stack) {
    ModalityStack in = select_channels(stack, ChannelKind::ParsingOneHotGroup);
    if (in.channels.empty())
        throw DataError("record stack has no parsing one-hot channels");
    return in;
}

}  // namespace

SequenceFeatures sequence_features(const SequenceRecord& record, const DescriptorConfig& cfg) {
    if (record.frames.empty()) throw ParameterError("sequence_features: record has no frames");

    const bool want_sketch = cfg.modality_set != ModalitySet::Parsing;
    const bool want_parsing = cfg.modality_set != ModalitySet::Sketch;
    const bool want_fusion = want_sketch && want_parsing && cfg.fusion != FusionOp::None;
    if (want_fusion && cfg.sketch_branch.orientations != cfg.parsing_branch.orientations)
        throw ParameterError("sequence_features: fusion requires equal stage-1 orientations");

    const auto& first = record.frames.front();
    auto check_dims = [&](int stages, const char* tag) {
        const int need = 4 << stages;
        if (first.width < need || first.height < need)
            throw ParameterError(std::string("sequence_features: ") + tag + " branch needs frames of at least " +
                                 std::to_string(need) + " pixels per dimension");
    };
    if (want_sketch) check_dims(cfg.sketch_branch.stages, "sketch");
    if (want_parsing) check_dims(cfg.parsing_branch.stages, "parsing");
    if (want_fusion) check_dims(cfg.fusion_branch.stages, "fusion");

    std::vector<FeatureMap> ske_frames, par_frames, fus_frames;
    for (const auto& frame : record.frames) {
        FeatureMap ske1, par1;
        if (want_sketch)
            ske1 = filter_bank_encode(sketch_input(frame, cfg), 1, cfg.sketch_branch.orientations);
        if (want_parsing)
            par1 = filter_bank_encode(parsing_input(frame), 1, cfg.parsing_branch.orientations);

        if (want_fusion) {
            FeatureMap fus = cfg.fusion == FusionOp::Add ? fuse_add(ske1, par1) : fuse_concat(ske1, par1);
            for (int s = 1; s < cfg.fusion_branch.stages; ++s)
                fus = filter_bank_stage(fus, cfg.fusion_branch.orientations);
            fus_frames.push_back(std::move(fus));
        }
        if (want_sketch) {
            for (int s = 1; s < cfg.sketch_branch.stages; ++s)
                ske1 = filter_bank_stage(ske1, cfg.sketch_branch.orientations);
            ske_frames.push_back(std::move(ske1));
        }
        if (want_parsing) {
            for (int s = 1; s < cfg.parsing_branch.stages; ++s)
                par1 = filter_bank_stage(par1, cfg.parsing_branch.orientations);
            par_frames.push_back(std::move(par1));
        }
    }

    SequenceFeatures out;
    out.meta = record.meta;
    if (want_sketch)
        out.branches.push_back({"ske", hpp(temporal_max_pool(ske_frames), cfg.hpp_levels)});
    if (want_parsing)
        out.branches.push_back({"par", hpp(temporal_max_pool(par_frames), cfg.hpp_levels)});
    if (want_fusion)
        out.branches.push_back({"fus", hpp(temporal_max_pool(fus_frames), cfg.hpp_levels)});
    return out;
}

Embedding embed_features(const SequenceFeatures& features,
                         const std::vector<BranchProjection>& per_branch_proj) {
    if (per_branch_proj.size() != features.branches.size())
        throw ParameterError("embed_features: projection count does not match branch count");
    std::vector<Embedding> parts;
    for (size_t b = 0; b < features.branches.size(); ++b)
        parts.push_back(
            branch_embed(features.branches[b].parts, per_branch_proj[b], features.branches[b].tag));
    return concat_embeddings(parts);
}

Embedding sequence_descriptor(const SequenceRecord& record, const DescriptorConfig& cfg) {
    const SequenceFeatures features = sequence_features(record, cfg);
    std::vector<BranchProjection> projections;
    for (const auto& b : features.branches)
        projections.push_back(identity_truncated(int(b.parts.strips.size()), cfg.embed_dim,
                                                 b.parts.channels));
    return embed_features(features, projections);
}

}  // namespace sketchgait
