#pragma once

#include <string>
#include <vector>

#include "sketchgait/record.hpp"

namespace sketchgait {

// Planar feature tensor produced by the encoder stages.
struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w), data(size_t(c) * h * w, fill) {}

    size_t plane_size() const { return size_t(height) * width; }
    double* plane(size_t c) { return data.data() + c * plane_size(); }
    const double* plane(size_t c) const { return data.data() + c * plane_size(); }
    double at(size_t c, int x, int y) const { return data[c * plane_size() + size_t(y) * width + x]; }
};

// Horizontal strip pooling output: one vector (length = channels) per strip,
// level-major, top to bottom within each level.
struct PartDescriptor {
    std::vector<int> levels;
    int channels = 0;
    std::vector<std::vector<double>> strips;
};

// Dense row-major matrix.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(size_t(r) * c, fill) {}

    double& at(int r, int c) { return data[size_t(r) * cols + c]; }
    double at(int r, int c) const { return data[size_t(r) * cols + c]; }
};

// One projection matrix per HPP strip (no weight sharing across strips).
struct BranchProjection {
    std::vector<Matrix> per_strip;
};

// First out_dim rows of the identity: with out_dim == in_dim this is a copy,
// otherwise it truncates or zero-pads. Lets the pipeline run untrained.
BranchProjection identity_truncated(int strips, int out_dim, int in_dim);

// Real vector tagged with the branch spans it concatenates.
struct Embedding {
    std::vector<std::pair<std::string, size_t>> spans;
    std::vector<double> data;
};

// ---- encoder -------------------------------------------------------------

// One deterministic stage: K oriented odd-Gabor 5x5 correlations (reflect
// borders) per input plane, absolute-value rectification, max over input
// planes, then 2x2 max downsample. Output always has K channels, so branches
// with different input channel counts still meet at fusion with equal dims.
FeatureMap filter_bank_stage(const FeatureMap& in, int orientations);

// The 5x5 odd-Gabor kernel for orientation k of K, L1-normalized. The kernel
// is antisymmetric, so flat inputs produce exactly zero response.
Matrix gabor_kernel(int k, int orientations);

FeatureMap stack_to_feature(const ModalityStack& stack);

// stages >= 1, orientations >= 2; requires width and height >= 4 * 2^stages.
FeatureMap filter_bank_encode(const ModalityStack& stack, int stages, int orientations);

// ---- fusion / pooling / head ----------------------------------------------

// Elementwise sum; dims must match.
FeatureMap fuse_add(const FeatureMap& a, const FeatureMap& b);
// Channel concatenation; spatial dims must match.
FeatureMap fuse_concat(const FeatureMap& a, const FeatureMap& b);

// Per-element maximum over frames; list must be non-empty and homogeneous.
FeatureMap temporal_max_pool(const std::vector<FeatureMap>& frames);

// Horizontal pyramid pooling: per level L, rows split into L strips (the
// remainder rows join the last strip); per strip and channel the pooled value
// is max + mean.
PartDescriptor hpp(const FeatureMap& fm, const std::vector<int>& levels = {1, 2, 4, 8});

// e = concat over strips of (W_strip . strip_vector).
Embedding branch_embed(const PartDescriptor& pd, const BranchProjection& proj,
                       const std::string& tag);

// Ordered concatenation with branch-span bookkeeping.
Embedding concat_embeddings(const std::vector<Embedding>& branches);

// ---- sequence composition ---------------------------------------------------

enum class ModalitySet { Sketch, Parsing, SketchParsing, SketchSilhouetteParsing };
enum class FusionOp { Add, Concat, None };

std::string to_string(ModalitySet m);
std::string to_string(FusionOp f);
ModalitySet modality_set_from_string(const std::string& s);
FusionOp fusion_op_from_string(const std::string& s);

struct BranchParams {
    int stages = 2;
    int orientations = 8;
};

struct DescriptorConfig {
    ModalitySet modality_set = ModalitySet::SketchParsing;
    FusionOp fusion = FusionOp::Add;  // fusion joins at stage 1
    BranchParams sketch_branch;
    BranchParams parsing_branch;
    BranchParams fusion_branch;
    std::vector<int> hpp_levels = {1, 2, 4, 8};
    int embed_dim = 32;

    // Active branch tags in concatenation order ("ske", "par", "fus").
    std::vector<std::string> branch_tags() const;
};

// Strip features for one branch of one sequence.
struct BranchFeatures {
    std::string tag;
    PartDescriptor parts;
};

struct SequenceFeatures {
    SequenceMeta meta;
    std::vector<BranchFeatures> branches;
};

// Per frame: stage-1 encode each modality branch, fuse at stage 1, run the
// remaining stages per branch independently; per branch: temporal max pool
// over frames, then HPP.
SequenceFeatures sequence_features(const SequenceRecord& record, const DescriptorConfig& cfg);

// Full untrained descriptor: sequence_features followed by identity-truncated
// projections and branch concatenation.
Embedding sequence_descriptor(const SequenceRecord& record, const DescriptorConfig& cfg);

// Projection application shared by the untrained and trained paths.
Embedding embed_features(const SequenceFeatures& features,
                         const std::vector<BranchProjection>& per_branch_proj);

}  // namespace sketchgait
