#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sketchgait/descriptor.hpp"

namespace sketchgait {

// Trainable head for one branch: per-strip projections, a BNNeck over the
// branch embedding, and a bias-free identity classifier. The triplet loss
// supervises the pre-BN embedding, cross-entropy the post-BN logits.
struct BranchHead {
    std::string tag;
    int strips = 0;
    int in_dim = 0;   // strip vector length (feature channels)
    int out_dim = 0;  // per-strip embedding dim

    BranchProjection proj;
    std::vector<double> gamma, beta, running_mean, running_var;
    Matrix classifier;  // num_classes x (strips * out_dim), no bias
    double bn_eps = 1e-5;
    double bn_momentum = 0.1;

    int embed_dim() const { return strips * out_dim; }
};

struct MetricHead {
    std::vector<BranchHead> branches;
    std::vector<std::string> class_names;  // training identities, label order
};

struct TrainConfig {
    int identities_per_batch = 8;    // P
    int sequences_per_identity = 8;  // K
    double margin = 0.2;
    double lr = 0.1;
    std::vector<double> milestone_fractions = {0.4, 0.6, 0.8};
    double lr_decay = 0.1;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    int iterations = 600;
    int embed_dim = 32;
    uint64_t seed = 1;
};

// ---- sampling ---------------------------------------------------------------

struct PKBatch {
    std::vector<size_t> items;  // P*K indices into the item list
    bool sampled_with_replacement = false;
};

// Draws P identities, K items each. Identities with fewer than K items are
// sampled with replacement (flagged). Deterministic for a given rng state.
// Throws ParameterError when fewer than P identities exist or P < 2 / K < 2.
PKBatch pk_sample(const std::vector<std::string>& subject_of_item, int P, int K,
                  std::mt19937_64& rng);

// ---- losses -----------------------------------------------------------------

struct TripletResult {
    double loss = 0.0;
    Matrix grad;  // same shape as the embedding batch
};

// Batch-hard triplet on Euclidean distances: per anchor, hardest positive
// (max distance, first index wins ties) minus hardest negative (min distance,
// first index wins), hinged at the margin, averaged over anchors. The hinge
// is active only when strictly positive; zero-distance pairs contribute a
// zero subgradient. Throws ParameterError when the batch has a single
// identity or an anchor has no positive.
TripletResult batch_hard_triplet(const Matrix& embeddings, const std::vector<int>& labels,
                                 double margin);

struct CrossEntropyResult {
    double loss = 0.0;
    std::vector<double> grad;  // d loss / d logits = softmax - onehot
};

// Max-shift stabilized negative log softmax.
CrossEntropyResult cross_entropy(const std::vector<double>& logits, int label);

// ---- BNNeck -----------------------------------------------------------------

enum class BnMode { Train, Eval };

struct BnResult {
    Matrix f;  // normalized features, gamma * xhat + beta
    Matrix z;  // classifier logits
    // caches for the backward pass
    Matrix xhat;
    std::vector<double> inv_std;
};

// Train mode normalizes with batch statistics (batch >= 2) and updates the
// running estimates in place with momentum 0.1; eval mode uses the running
// statistics and leaves them untouched.
BnResult bnneck_forward(const Matrix& e, BranchHead& head, BnMode mode);

struct BnBackwardResult {
    Matrix de;  // gradient wrt pre-BN embeddings
    std::vector<double> dgamma, dbeta;
    Matrix dclassifier;
};

// Backward for train-mode bnneck_forward given d loss / d logits.
BnBackwardResult bnneck_backward(const Matrix& e, const BnResult& fwd, const BranchHead& head,
                                 const Matrix& dz);

// ---- optimizer ----------------------------------------------------------------

// v <- momentum * v + grad + wd * param;  param <- param - lr * v
void sgd_step(std::vector<double>& params, const std::vector<double>& grads,
              std::vector<double>& velocity, double lr, double momentum = 0.9,
              double weight_decay = 5e-4);

// ---- training -----------------------------------------------------------------

struct LossCurvePoint {
    int iteration = 0;
    double triplet = 0.0;
    double cross_entropy = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    MetricHead head;
    std::vector<LossCurvePoint> curve;
    bool sampled_with_replacement = false;
};

// Joint objective: per branch, batch-hard triplet on the pre-BN embedding
// plus cross-entropy on the BNNeck logits, unit weights, optimized with SGD
// with momentum; lr decays by lr_decay at the milestone fractions. Fully
// deterministic for a given (features, config) pair. Throws DataError with a
// diagnostic when the loss becomes non-finite.
TrainResult train(const std::vector<SequenceFeatures>& features, const TrainConfig& cfg);

// Initial (untrained) head for a feature layout: identity-truncated
// projections, unit gamma, zero beta/means, unit running variance, zero
// classifier.
MetricHead init_head(const std::vector<SequenceFeatures>& features, int embed_dim);

// Pre-BN concatenated embedding of one sequence under a (possibly trained)
// head. Throws ParameterError naming the branch or strip that diverges when
// the head layout does not match the features.
Embedding apply_head(const SequenceFeatures& features, const MetricHead& head);

// Head persistence: a directory holding layout.json plus one tensor file per
// parameter group.
void save_head(const std::filesystem::path& dir, const MetricHead& head);
MetricHead load_head(const std::filesystem::path& dir);

void write_loss_curve(const std::filesystem::path& path, const std::vector<LossCurvePoint>& curve);

}  // namespace sketchgait
