#include "sketchgait/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "sketchgait/container.hpp"

namespace sketchgait {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

uint64_t bounded(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

template <typename T>
void shuffle_in_place(std::vector<T>& v, std::mt19937_64& rng) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(rng, i)]);
}

}  // namespace

PKBatch pk_sample(const std::vector<std::string>& subject_of_item, int P, int K,
                  std::mt19937_64& rng) {
    if (P < 2 || K < 2)
        throw ParameterError("pk_sample: batch-hard training needs P >= 2 and K >= 2");

    std::map<std::string, std::vector<size_t>> by_subject;
    for (size_t i = 0; i < subject_of_item.size(); ++i)
        by_subject[subject_of_item[i]].push_back(i);
    if (int(by_subject.size()) < P)
        throw ParameterError("pk_sample: only " + std::to_string(by_subject.size()) +
                             " identities available, need " + std::to_string(P));

    std::vector<std::string> subjects;
    subjects.reserve(by_subject.size());
    for (const auto& [s, _] : by_subject) subjects.push_back(s);
    shuffle_in_place(subjects, rng);
    subjects.resize(size_t(P));

    PKBatch batch;
    for (const auto& s : subjects) {
        auto& pool = by_subject[s];
        if (int(pool.size()) >= K) {
            std::vector<size_t> picks = pool;
            shuffle_in_place(picks, rng);
            for (int k = 0; k < K; ++k) batch.items.push_back(picks[size_t(k)]);
        } else {
            batch.sampled_with_replacement = true;
            for (int k = 0; k < K; ++k) batch.items.push_back(pool[bounded(rng, pool.size())]);
        }
    }
    return batch;
}

TripletResult batch_hard_triplet(const Matrix& embeddings, const std::vector<int>& labels,
                                 double margin) {
    const int B = embeddings.rows, D = embeddings.cols;
    if (B != int(labels.size()))
        throw ParameterError("batch_hard_triplet: label count does not match batch size");
    if (std::set<int>(labels.begin(), labels.end()).size() < 2)
        throw ParameterError("batch_hard_triplet: batch contains a single identity");

    // Pairwise Euclidean distances.
    Matrix dist(B, B);
    for (int i = 0; i < B; ++i) {
        for (int j = i + 1; j < B; ++j) {
            double acc = 0.0;
            for (int d = 0; d < D; ++d) {
                const double diff = embeddings.at(i, d) - embeddings.at(j, d);
                acc += diff * diff;
            }
            const double v = std::sqrt(acc);
            dist.at(i, j) = v;
            dist.at(j, i) = v;
        }
    }

    TripletResult result;
    result.grad = Matrix(B, D);

    for (int a = 0; a < B; ++a) {
        int hardest_pos = -1, hardest_neg = -1;
        for (int j = 0; j < B; ++j) {
            if (j == a) continue;
            if (labels[size_t(j)] == labels[size_t(a)]) {
                if (hardest_pos < 0 || dist.at(a, j) > dist.at(a, hardest_pos)) hardest_pos = j;
            } else {
                if (hardest_neg < 0 || dist.at(a, j) < dist.at(a, hardest_neg)) hardest_neg = j;
            }
        }
        if (hardest_pos < 0)
            throw ParameterError("batch_hard_triplet: anchor " + std::to_string(a) +
                                 " has no positive");

        const double hp = dist.at(a, hardest_pos);
        const double hn = dist.at(a, hardest_neg);
        const double hinge = hp - hn + margin;
        if (hinge > 0.0) {
            result.loss += hinge;
            // d||e_a - e_x|| / d e_a = (e_a - e_x) / dist, zero at dist 0.
            if (hp > 0.0) {
                for (int d = 0; d < D; ++d) {
                    const double g = (embeddings.at(a, d) - embeddings.at(hardest_pos, d)) / hp;
                    result.grad.at(a, d) += g;
                    result.grad.at(hardest_pos, d) -= g;
                }
            }
            if (hn > 0.0) {
                for (int d = 0; d < D; ++d) {
                    const double g = (embeddings.at(a, d) - embeddings.at(hardest_neg, d)) / hn;
                    result.grad.at(a, d) -= g;
                    result.grad.at(hardest_neg, d) += g;
                }
            }
        }
    }

    result.loss /= B;
    for (double& g : result.grad.data) g /= B;
    return result;
}

CrossEntropyResult cross_entropy(const std::vector<double>& logits, int label) {
    if (label < 0 || label >= int(logits.size()))
        throw ParameterError("cross_entropy: label out of range");
    for (double v : logits)
        if (!std::isfinite(v)) throw ParameterError("cross_entropy: non-finite logit");

    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - mx);
    const double log_sum = std::log(sum);

    CrossEntropyResult r;
    r.loss = -(logits[size_t(label)] - mx - log_sum);
    r.grad.resize(logits.size());
    for (size_t i = 0; i < logits.size(); ++i) {
        r.grad[i] = std::exp(logits[i] - mx) / sum;
        if (int(i) == label) r.grad[i] -= 1.0;
    }
    return r;
}

BnResult bnneck_forward(const Matrix& e, BranchHead& head, BnMode mode) {
    const int B = e.rows, D = e.cols;
    if (D != head.embed_dim())
        throw ParameterError("bnneck_forward: embedding dim " + std::to_string(D) +
                             " does not match head dim " + std::to_string(head.embed_dim()));
    if (mode == BnMode::Train && B < 2)
        throw ParameterError("bnneck_forward: train mode needs a batch of at least 2");

    std::vector<double> mean(static_cast<size_t>(D)), var(static_cast<size_t>(D));
    if (mode == BnMode::Train) {
        for (int d = 0; d < D; ++d) {
            double m = 0.0;
            for (int i = 0; i < B; ++i) m += e.at(i, d);
            m /= B;
            double v = 0.0;
            for (int i = 0; i < B; ++i) {
                const double c = e.at(i, d) - m;
                v += c * c;
            }
            mean[size_t(d)] = m;
            var[size_t(d)] = v / B;  // biased, as used for normalization
        }
        for (int d = 0; d < D; ++d) {
            head.running_mean[size_t(d)] =
                (1.0 - head.bn_momentum) * head.running_mean[size_t(d)] + head.bn_momentum * mean[size_t(d)];
            head.running_var[size_t(d)] =
                (1.0 - head.bn_momentum) * head.running_var[size_t(d)] + head.bn_momentum * var[size_t(d)];
        }
    } else {
        mean = head.running_mean;
        var = head.running_var;
    }

    BnResult r;
    r.xhat = Matrix(B, D);
    r.f = Matrix(B, D);
    r.inv_std.resize(size_t(D));
    for (int d = 0; d < D; ++d) r.inv_std[size_t(d)] = 1.0 / std::sqrt(var[size_t(d)] + head.bn_eps);
    for (int i = 0; i < B; ++i) {
        for (int d = 0; d < D; ++d) {
            const double xh = (e.at(i, d) - mean[size_t(d)]) * r.inv_std[size_t(d)];
            r.xhat.at(i, d) = xh;
            r.f.at(i, d) = head.gamma[size_t(d)] * xh + head.beta[size_t(d)];
        }
    }

    const int N = head.classifier.rows;
    r.z = Matrix(B, N);
    for (int i = 0; i < B; ++i)
        for (int n = 0; n < N; ++n) {
            double acc = 0.0;
            for (int d = 0; d < D; ++d) acc += head.classifier.at(n, d) * r.f.at(i, d);
            r.z.at(i, n) = acc;
        }
    return r;
}

BnBackwardResult bnneck_backward(const Matrix& e, const BnResult& fwd, const BranchHead& head,
                                 const Matrix& dz) {
    const int B = e.rows, D = e.cols, N = head.classifier.rows;
    if (dz.rows != B || dz.cols != N)
        throw ParameterError("bnneck_backward: dz shape mismatch");

    BnBackwardResult r;
    r.dclassifier = Matrix(N, D);
    for (int n = 0; n < N; ++n)
        for (int d = 0; d < D; ++d) {
            double acc = 0.0;
            for (int i = 0; i < B; ++i) acc += dz.at(i, n) * fwd.f.at(i, d);
            r.dclassifier.at(n, d) = acc;
        }

    Matrix df(B, D);
    for (int i = 0; i < B; ++i)
        for (int d = 0; d < D; ++d) {
            double acc = 0.0;
            for (int n = 0; n < N; ++n) acc += dz.at(i, n) * head.classifier.at(n, d);
            df.at(i, d) = acc;
        }

    r.dgamma.assign(size_t(D), 0.0);
    r.dbeta.assign(size_t(D), 0.0);
    for (int d = 0; d < D; ++d)
        for (int i = 0; i < B; ++i) {
            r.dgamma[size_t(d)] += df.at(i, d) * fwd.xhat.at(i, d);
            r.dbeta[size_t(d)] += df.at(i, d);
        }

    // Backprop through batch statistics:
    // de = inv_std / B * (B*dxhat - sum(dxhat) - xhat * sum(dxhat*xhat))
    r.de = Matrix(B, D);
    for (int d = 0; d < D; ++d) {
        double sum_dx = 0.0, sum_dx_xhat = 0.0;
        for (int i = 0; i < B; ++i) {
            const double dxhat = df.at(i, d) * head.gamma[size_t(d)];
            sum_dx += dxhat;
            sum_dx_xhat += dxhat * fwd.xhat.at(i, d);
        }
        for (int i = 0; i < B; ++i) {
            const double dxhat = df.at(i, d) * head.gamma[size_t(d)];
            r.de.at(i, d) = fwd.inv_std[size_t(d)] / B *
                            (B * dxhat - sum_dx - fwd.xhat.at(i, d) * sum_dx_xhat);
        }
    }
    return r;
}

void sgd_step(std::vector<double>& params, const std::vector<double>& grads,
              std::vector<double>& velocity, double lr, double momentum, double weight_decay) {
    if (params.size() != grads.size() || params.size() != velocity.size())
        throw ParameterError("sgd_step: size mismatch");
    for (size_t i = 0; i < params.size(); ++i) {
        velocity[i] = momentum * velocity[i] + grads[i] + weight_decay * params[i];
        params[i] -= lr * velocity[i];
    }
}

MetricHead init_head(const std::vector<SequenceFeatures>& features, int embed_dim) {
    if (features.empty()) throw ParameterError("init_head: no features");
    if (embed_dim < 1) throw ParameterError("init_head: embed_dim must be positive");

    std::set<std::string> subjects;
    for (const auto& f : features) subjects.insert(f.meta.subject);

    MetricHead head;
    head.class_names.assign(subjects.begin(), subjects.end());
    for (const auto& branch : features.front().branches) {
        BranchHead b;
        b.tag = branch.tag;
        b.strips = int(branch.parts.strips.size());
        b.in_dim = branch.parts.channels;
        b.out_dim = embed_dim;
        b.proj = identity_truncated(b.strips, b.out_dim, b.in_dim);
        const size_t D = size_t(b.embed_dim());
        b.gamma.assign(D, 1.0);
        b.beta.assign(D, 0.0);
        b.running_mean.assign(D, 0.0);
        b.running_var.assign(D, 1.0);
        b.classifier = Matrix(int(head.class_names.size()), int(D));
        head.branches.push_back(std::move(b));
    }
    return head;
}

namespace {

// Flattened parameter/velocity bundle for one branch, fixed order.
struct BranchGrads {
    std::vector<Matrix> dproj;
    std::vector<double> dgamma, dbeta;
    Matrix dclassifier;
};

Matrix branch_forward_embed(const std::vector<SequenceFeatures>& features,
                            const std::vector<size_t>& items, size_t branch_idx,
                            const BranchHead& head) {
    const int B = int(items.size());
    Matrix e(B, head.embed_dim());
    for (int i = 0; i < B; ++i) {
        const auto& parts = features[items[size_t(i)]].branches[branch_idx].parts;
        for (int s = 0; s < head.strips; ++s) {
            const auto& v = parts.strips[size_t(s)];
            const Matrix& W = head.proj.per_strip[size_t(s)];
            for (int r = 0; r < head.out_dim; ++r) {
                double acc = 0.0;
                for (int c = 0; c < head.in_dim; ++c) acc += W.at(r, c) * v[size_t(c)];
                e.at(i, s * head.out_dim + r) = acc;
            }
        }
    }
    return e;
}

}  // namespace

TrainResult train(const std::vector<SequenceFeatures>& features, const TrainConfig& cfg) {
    if (features.empty()) throw ParameterError("train: no features");
    if (cfg.iterations < 0) throw ParameterError("train: negative iteration count");

    // Layout homogeneity across sequences.
    const auto& ref = features.front();
    for (const auto& f : features) {
        if (f.branches.size() != ref.branches.size())
            throw ParameterError("train: inconsistent branch count across sequences");
        for (size_t b = 0; b < f.branches.size(); ++b) {
            if (f.branches[b].tag != ref.branches[b].tag ||
                f.branches[b].parts.strips.size() != ref.branches[b].parts.strips.size() ||
                f.branches[b].parts.channels != ref.branches[b].parts.channels)
                throw ParameterError("train: inconsistent feature layout at branch " +
                                     f.branches[b].tag);
        }
    }

    TrainResult result;
    result.head = init_head(features, cfg.embed_dim);
    MetricHead& head = result.head;

    std::map<std::string, int> class_of;
    for (size_t i = 0; i < head.class_names.size(); ++i) class_of[head.class_names[i]] = int(i);

    std::vector<std::string> subject_of_item;
    subject_of_item.reserve(features.size());
    for (const auto& f : features) subject_of_item.push_back(f.meta.subject);

    // Velocity buffers mirror the parameter layout.
    struct BranchState {
        std::vector<std::vector<double>> v_proj;
        std::vector<double> v_gamma, v_beta, v_classifier;
    };
    std::vector<BranchState> state(head.branches.size());
    for (size_t b = 0; b < head.branches.size(); ++b) {
        auto& bh = head.branches[b];
        state[b].v_proj.assign(size_t(bh.strips), std::vector<double>(bh.proj.per_strip[0].data.size(), 0.0));
        state[b].v_gamma.assign(bh.gamma.size(), 0.0);
        state[b].v_beta.assign(bh.beta.size(), 0.0);
        state[b].v_classifier.assign(bh.classifier.data.size(), 0.0);
    }

    std::vector<int> milestones;
    for (double f : cfg.milestone_fractions)
        milestones.push_back(int(std::floor(f * cfg.iterations)));

    std::mt19937_64 rng(cfg.seed);

    for (int it = 0; it < cfg.iterations; ++it) {
        double lr = cfg.lr;
        for (int m : milestones)
            if (it >= m && m > 0) lr *= cfg.lr_decay;

        const PKBatch batch =
            pk_sample(subject_of_item, cfg.identities_per_batch, cfg.sequences_per_identity, rng);
        result.sampled_with_replacement |= batch.sampled_with_replacement;

        const int B = int(batch.items.size());
        std::vector<int> labels(static_cast<size_t>(B));
        for (int i = 0; i < B; ++i)
            labels[size_t(i)] = class_of[features[batch.items[size_t(i)]].meta.subject];

        double l_tri = 0.0, l_ce = 0.0;
        for (size_t b = 0; b < head.branches.size(); ++b) {
            BranchHead& bh = head.branches[b];
            const Matrix e = branch_forward_embed(features, batch.items, b, bh);

            const TripletResult tri = batch_hard_triplet(e, labels, cfg.margin);
            l_tri += tri.loss;

            const BnResult fwd = bnneck_forward(e, bh, BnMode::Train);
            Matrix dz(B, bh.classifier.rows);
            for (int i = 0; i < B; ++i) {
                std::vector<double> logits(size_t(bh.classifier.rows));
                for (int n = 0; n < bh.classifier.rows; ++n) logits[size_t(n)] = fwd.z.at(i, n);
                const CrossEntropyResult ce = cross_entropy(logits, labels[size_t(i)]);
                l_ce += ce.loss / B;
                for (int n = 0; n < bh.classifier.rows; ++n)
                    dz.at(i, n) = ce.grad[size_t(n)] / B;
            }

            const BnBackwardResult bnb = bnneck_backward(e, fwd, bh, dz);

            // d loss / d e = triplet grad + CE grad through BN.
            Matrix de = tri.grad;
            for (size_t i = 0; i < de.data.size(); ++i) de.data[i] += bnb.de.data[i];

            // Per-strip projection gradients: dW_s = sum_i de_i[span_s] (outer) v_s,i.
            std::vector<Matrix> dproj(size_t(bh.strips));
            for (int s = 0; s < bh.strips; ++s) dproj[size_t(s)] = Matrix(bh.out_dim, bh.in_dim);
            for (int i = 0; i < B; ++i) {
                const auto& parts = features[batch.items[size_t(i)]].branches[b].parts;
                for (int s = 0; s < bh.strips; ++s) {
                    const auto& v = parts.strips[size_t(s)];
                    Matrix& dW = dproj[size_t(s)];
                    for (int r = 0; r < bh.out_dim; ++r) {
                        const double g = de.at(i, s * bh.out_dim + r);
                        if (g == 0.0) continue;
                        for (int c = 0; c < bh.in_dim; ++c) dW.at(r, c) += g * v[size_t(c)];
                    }
                }
            }

            for (int s = 0; s < bh.strips; ++s)
                sgd_step(bh.proj.per_strip[size_t(s)].data, dproj[size_t(s)].data,
                         state[b].v_proj[size_t(s)], lr, cfg.momentum, cfg.weight_decay);
            sgd_step(bh.gamma, bnb.dgamma, state[b].v_gamma, lr, cfg.momentum, cfg.weight_decay);
            sgd_step(bh.beta, bnb.dbeta, state[b].v_beta, lr, cfg.momentum, cfg.weight_decay);
            sgd_step(bh.classifier.data, bnb.dclassifier.data, state[b].v_classifier, lr,
                     cfg.momentum, cfg.weight_decay);
        }

        if (!std::isfinite(l_tri) || !std::isfinite(l_ce))
            throw DataError("train: loss diverged at iteration " + std::to_string(it) +
                            " (triplet=" + std::to_string(l_tri) + ", ce=" + std::to_string(l_ce) +
                            "); lower the learning rate");

        result.curve.push_back({it, l_tri, l_ce, lr});
    }
    return result;
}

Embedding apply_head(const SequenceFeatures& features, const MetricHead& head) {
    if (features.branches.size() != head.branches.size())
        throw ParameterError("apply_head: head has " + std::to_string(head.branches.size()) +
                             " branches, features have " + std::to_string(features.branches.size()));
    std::vector<Embedding> parts;
    for (size_t b = 0; b < head.branches.size(); ++b) {
        const auto& bh = head.branches[b];
        const auto& bf = features.branches[b];
        if (bf.tag != bh.tag)
            throw ParameterError("apply_head: branch mismatch: head '" + bh.tag +
                                 "' vs features '" + bf.tag + "'");
        if (int(bf.parts.strips.size()) != bh.strips)
            throw ParameterError("apply_head: branch '" + bh.tag + "' strip count mismatch: head " +
                                 std::to_string(bh.strips) + " vs features " +
                                 std::to_string(bf.parts.strips.size()));
        if (bf.parts.channels != bh.in_dim)
            throw ParameterError("apply_head: branch '" + bh.tag + "' channel mismatch: head " +
                                 std::to_string(bh.in_dim) + " vs features " +
                                 std::to_string(bf.parts.channels));
        parts.push_back(branch_embed(bf.parts, bh.proj, bh.tag));
    }
    return concat_embeddings(parts);
}

void save_head(const fs::path& dir, const MetricHead& head) {
    fs::create_directories(dir);

    json layout;
    layout["class_names"] = head.class_names;
    json branches = json::array();
    for (const auto& b : head.branches) {
        branches.push_back({{"tag", b.tag},
                            {"strips", b.strips},
                            {"in_dim", b.in_dim},
                            {"out_dim", b.out_dim},
                            {"bn_eps", b.bn_eps},
                            {"bn_momentum", b.bn_momentum}});
    }
    layout["branches"] = branches;
    std::ofstream f(dir / "layout.json", std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + (dir / "layout.json").string());
    f << layout.dump(2) << "\n";

    auto write_vec = [&](const std::string& name, const std::vector<double>& v) {
        std::vector<float> data(v.begin(), v.end());
        write_tensor(dir / name, Tensor::from_f32({uint64_t(v.size())}, std::move(data)));
    };
    for (const auto& b : head.branches) {
        std::vector<float> proj;
        for (const auto& m : b.proj.per_strip)
            for (double v : m.data) proj.push_back(float(v));
        write_tensor(dir / (b.tag + "_proj.gstk"),
                     Tensor::from_f32({uint64_t(b.strips), uint64_t(b.out_dim), uint64_t(b.in_dim)},
                                      std::move(proj)));
        write_vec(b.tag + "_bn_gamma.gstk", b.gamma);
        write_vec(b.tag + "_bn_beta.gstk", b.beta);
        write_vec(b.tag + "_bn_mean.gstk", b.running_mean);
        write_vec(b.tag + "_bn_var.gstk", b.running_var);
        std::vector<float> cls(b.classifier.data.begin(), b.classifier.data.end());
        write_tensor(dir / (b.tag + "_classifier.gstk"),
                     Tensor::from_f32({uint64_t(b.classifier.rows), uint64_t(b.classifier.cols)},
                                      std::move(cls)));
    }
}

MetricHead load_head(const fs::path& dir) {
    const fs::path layout_path = dir / "layout.json";
    if (!fs::exists(layout_path)) throw DataError("head layout not found: " + layout_path.string());

    json layout;
    try {
        std::ifstream f(layout_path);
        layout = json::parse(f);
    } catch (const json::parse_error& e) {
        throw DataError("head layout is not valid JSON: " + std::string(e.what()));
    }

    MetricHead head;
    head.class_names = layout.at("class_names").get<std::vector<std::string>>();

    auto read_vec = [&](const std::string& name, size_t expect) {
        const Tensor t = read_tensor(dir / name);
        if (t.dtype != Dtype::F32 || t.f32.size() != expect)
            throw DataError("head tensor has unexpected shape: " + name);
        return std::vector<double>(t.f32.begin(), t.f32.end());
    };

    for (const auto& jb : layout.at("branches")) {
        BranchHead b;
        b.tag = jb.at("tag").get<std::string>();
        b.strips = jb.at("strips").get<int>();
        b.in_dim = jb.at("in_dim").get<int>();
        b.out_dim = jb.at("out_dim").get<int>();
        b.bn_eps = jb.at("bn_eps").get<double>();
        b.bn_momentum = jb.at("bn_momentum").get<double>();

        const Tensor proj = read_tensor(dir / (b.tag + "_proj.gstk"));
        if (proj.dims != std::vector<uint64_t>{uint64_t(b.strips), uint64_t(b.out_dim), uint64_t(b.in_dim)})
            throw DataError("head projection tensor shape mismatch for branch " + b.tag);
        const size_t per = size_t(b.out_dim) * b.in_dim;
        for (int s = 0; s < b.strips; ++s) {
            Matrix m(b.out_dim, b.in_dim);
            for (size_t i = 0; i < per; ++i) m.data[i] = proj.f32[size_t(s) * per + i];
            b.proj.per_strip.push_back(std::move(m));
        }
        const size_t D = size_t(b.embed_dim());
        b.gamma = read_vec(b.tag + "_bn_gamma.gstk", D);
        b.beta = read_vec(b.tag + "_bn_beta.gstk", D);
        b.running_mean = read_vec(b.tag + "_bn_mean.gstk", D);
        b.running_var = read_vec(b.tag + "_bn_var.gstk", D);

        const Tensor cls = read_tensor(dir / (b.tag + "_classifier.gstk"));
        if (cls.dims.size() != 2 || cls.dims[1] != D)
            throw DataError("head classifier tensor shape mismatch for branch " + b.tag);
        b.classifier = Matrix(int(cls.dims[0]), int(cls.dims[1]));
        std::copy(cls.f32.begin(), cls.f32.end(), b.classifier.data.begin());
        head.branches.push_back(std::move(b));
    }
    return head;
}

void write_loss_curve(const fs::path& path, const std::vector<LossCurvePoint>& curve) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path.string());
    f << "iteration,l_tri,l_ce,lr\n";
    f.precision(12);
    for (const auto& p : curve)
        f << p.iteration << "," << p.triplet << "," << p.cross_entropy << "," << p.lr << "\n";
}

}  // namespace sketchgait
