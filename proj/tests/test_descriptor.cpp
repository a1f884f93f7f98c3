#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sketchgait/descriptor.hpp"

using namespace sketchgait;

namespace {

FeatureMap random_feature(int c, int h, int w, std::mt19937_64& rng) {
    FeatureMap fm(c, h, w);
    for (double& v : fm.data) v = double(rng() >> 11) * (1.0 / 9007199254740992.0);
    return fm;
}

ModalityStack sketch_stack(const SketchMap& s) { return stack_channels({{"sketch", s}}); }

// Direct reimplementation of one filter-bank stage from its definition.
FeatureMap stage_direct(const FeatureMap& in, int K) {
    const int h = in.height, w = in.width;
    FeatureMap out(K, h / 2, w / 2);
    for (int k = 0; k < K; ++k) {
        const Matrix g = gabor_kernel(k, K);
        std::vector<double> resp(size_t(h) * w, 0.0);
        for (int c = 0; c < in.channels; ++c)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double acc = 0.0;
                    for (int ky = -2; ky <= 2; ++ky)
                        for (int kx = -2; kx <= 2; ++kx)
                            acc += g.at(ky + 2, kx + 2) *
                                   in.at(size_t(c), oracle::reflect(x + kx, w),
                                         oracle::reflect(y + ky, h));
                    resp[size_t(y) * w + x] = std::max(resp[size_t(y) * w + x], std::abs(acc));
                }
        for (int y = 0; y < h / 2; ++y)
            for (int x = 0; x < w / 2; ++x) {
                double m = 0.0;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx)
                        m = std::max(m, resp[size_t(2 * y + dy) * w + 2 * x + dx]);
                out.plane(size_t(k))[size_t(y) * (w / 2) + x] = m;
            }
    }
    return out;
}

}  // namespace

TEST_CASE("gabor kernels are antisymmetric and L1-normalized") {
    for (int k = 0; k < 8; ++k) {
        const Matrix g = gabor_kernel(k, 8);
        double sum = 0.0, l1 = 0.0;
        for (double v : g.data) {
            sum += v;
            l1 += std::abs(v);
        }
        CHECK(std::abs(sum) < 1e-12);  // flat input -> zero response
        CHECK(l1 == doctest::Approx(1.0).epsilon(1e-12));
        // antisymmetry g(-x,-y) = -g(x,y)
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 5; ++x)
                CHECK(g.at(y, x) == doctest::Approx(-g.at(4 - y, 4 - x)).epsilon(1e-12));
    }
}

TEST_CASE("filter_bank_encode of an all-zero stack is all zero") {
    const ModalityStack stack = sketch_stack(SketchMap(32, 32, 0.0));
    const FeatureMap fm = filter_bank_encode(stack, 2, 8);
    CHECK(fm.channels == 8);
    CHECK(fm.height == 8);
    CHECK(fm.width == 8);
    for (double v : fm.data) CHECK(v == 0.0);
}

TEST_CASE("filter_bank_encode shape contract and size precondition") {
    const ModalityStack stack = sketch_stack(SketchMap(64, 48, 0.1));
    const FeatureMap fm = filter_bank_encode(stack, 2, 6);
    CHECK(fm.channels == 6);
    CHECK(fm.height == 48 / 4);
    CHECK(fm.width == 64 / 4);

    CHECK_THROWS_AS(filter_bank_encode(sketch_stack(SketchMap(15, 64, 0.0)), 2, 8), ParameterError);
    CHECK_THROWS_AS(filter_bank_encode(stack, 0, 8), ParameterError);
    CHECK_THROWS_AS(filter_bank_encode(stack, 2, 1), ParameterError);
}

TEST_CASE("filter_bank_stage matches the direct convolution oracle") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 3; ++trial) {
        const FeatureMap in = random_feature(2, 12, 10, rng);
        const FeatureMap got = filter_bank_stage(in, 4);
        const FeatureMap want = stage_direct(in, 4);
        REQUIRE(got.data.size() == want.data.size());
        for (size_t i = 0; i < got.data.size(); ++i)
            CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-9));
    }
}

TEST_CASE("vertical line activates the vertical-orientation filter strongest") {
    SketchMap s(32, 32, 0.0);
    for (int y = 4; y < 28; ++y) s.at(16, y) = 1.0;
    const FeatureMap fm = filter_bank_encode(sketch_stack(s), 1, 8);

    // at the line's downsampled position, orientation 0 (wave along x) wins
    const int cx = 8, cy = 8;
    int best = -1;
    double best_v = -1.0;
    for (int k = 0; k < 8; ++k) {
        const double v = fm.at(size_t(k), cx, cy);
        if (v > best_v) {
            best_v = v;
            best = k;
        }
    }
    CHECK(best == 0);
    CHECK(best_v > 0.0);
}

TEST_CASE("fuse_add identity, commutativity, oracle, and errors") {
    std::mt19937_64 rng(22);
    const FeatureMap x = random_feature(3, 6, 5, rng);
    const FeatureMap zeros(3, 6, 5, 0.0);

    const FeatureMap same = fuse_add(x, zeros);
    CHECK(same.data == x.data);

    const FeatureMap y = random_feature(3, 6, 5, rng);
    CHECK(fuse_add(x, y).data == fuse_add(y, x).data);

    const FeatureMap sum = fuse_add(x, y);
    for (size_t i = 0; i < sum.data.size(); ++i)
        CHECK(sum.data[i] == doctest::Approx(x.data[i] + y.data[i]).epsilon(1e-12));

    CHECK_THROWS_AS(fuse_add(x, FeatureMap(3, 6, 4, 0.0)), ParameterError);
}

TEST_CASE("fuse_concat stacks channels") {
    std::mt19937_64 rng(23);
    const FeatureMap x = random_feature(2, 4, 4, rng);
    const FeatureMap y = random_feature(3, 4, 4, rng);
    const FeatureMap c = fuse_concat(x, y);
    CHECK(c.channels == 5);
    for (size_t i = 0; i < x.data.size(); ++i) CHECK(c.data[i] == x.data[i]);
    for (size_t i = 0; i < y.data.size(); ++i) CHECK(c.data[x.data.size() + i] == y.data[i]);
    CHECK_THROWS_AS(fuse_concat(x, FeatureMap(1, 5, 4, 0.0)), ParameterError);
}

TEST_CASE("temporal_max_pool identity, symmetry, oracle, empty error") {
    std::mt19937_64 rng(24);
    const FeatureMap a = random_feature(2, 5, 5, rng);
    CHECK(temporal_max_pool({a}).data == a.data);

    std::vector<FeatureMap> frames;
    for (int i = 0; i < 5; ++i) frames.push_back(random_feature(2, 5, 5, rng));

    const FeatureMap pooled = temporal_max_pool(frames);
    std::vector<FeatureMap> shuffled = {frames[3], frames[0], frames[4], frames[2], frames[1]};
    CHECK(temporal_max_pool(shuffled).data == pooled.data);

    for (size_t i = 0; i < pooled.data.size(); ++i) {
        double m = frames[0].data[i];
        for (const auto& f : frames) m = std::max(m, f.data[i]);
        CHECK(pooled.data[i] == m);
    }

    CHECK_THROWS_AS(temporal_max_pool({}), ParameterError);
    CHECK_THROWS_AS(temporal_max_pool({a, FeatureMap(2, 5, 4, 0.0)}), ParameterError);
}

TEST_CASE("hpp constant map gives 2c per strip and channel") {
    const FeatureMap fm(3, 16, 8, 0.35);
    const PartDescriptor pd = hpp(fm, {1, 2, 4, 8});
    CHECK(pd.strips.size() == 15);
    for (const auto& strip : pd.strips) {
        REQUIRE(strip.size() == 3);
        for (double v : strip) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
    }
}

TEST_CASE("hpp level [1] is global max plus global mean") {
    std::mt19937_64 rng(25);
    const FeatureMap fm = random_feature(2, 7, 6, rng);
    const PartDescriptor pd = hpp(fm, {1});
    REQUIRE(pd.strips.size() == 1);
    for (int c = 0; c < 2; ++c) {
        double mx = -1.0, sum = 0.0;
        const double* plane = fm.plane(size_t(c));
        for (size_t i = 0; i < fm.plane_size(); ++i) {
            mx = std::max(mx, plane[i]);
            sum += plane[i];
        }
        CHECK(pd.strips[0][size_t(c)] ==
              doctest::Approx(mx + sum / double(fm.plane_size())).epsilon(1e-12));
    }
}

TEST_CASE("hpp matches the brute-force strip pooling oracle") {
    std::mt19937_64 rng(26);
    const FeatureMap fm = random_feature(3, 19, 5, rng);  // 19 rows: remainder handling
    const std::vector<int> levels = {1, 2, 4, 8};
    const PartDescriptor pd = hpp(fm, levels);
    REQUIRE(pd.strips.size() == 15);

    size_t strip_idx = 0;
    for (int L : levels) {
        const int base = fm.height / L;
        for (int s = 0; s < L; ++s, ++strip_idx) {
            const int r0 = s * base;
            const int r1 = s == L - 1 ? fm.height : (s + 1) * base;
            for (int c = 0; c < fm.channels; ++c) {
                double mx = -1e300, sum = 0.0;
                int count = 0;
                for (int y = r0; y < r1; ++y)
                    for (int x = 0; x < fm.width; ++x) {
                        const double v = fm.at(size_t(c), x, y);
                        mx = std::max(mx, v);
                        sum += v;
                        ++count;
                    }
                CHECK(pd.strips[strip_idx][size_t(c)] ==
                      doctest::Approx(mx + sum / count).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("hpp rejects heights below the largest level") {
    const FeatureMap fm(1, 6, 6, 0.0);
    CHECK_THROWS_AS(hpp(fm, {1, 2, 4, 8}), ParameterError);
    CHECK_THROWS_AS(hpp(fm, {}), ParameterError);
}

TEST_CASE("branch_embed identity-truncated, zero, and random projections") {
    std::mt19937_64 rng(27);
    PartDescriptor pd;
    pd.levels = {1, 2};
    pd.channels = 4;
    for (int s = 0; s < 3; ++s) {
        std::vector<double> v(4);
        for (double& x : v) x = double(rng() >> 11) * (1.0 / 9007199254740992.0);
        pd.strips.push_back(v);
    }

    // identity with matching dims flattens the descriptor
    const Embedding flat = branch_embed(pd, identity_truncated(3, 4, 4), "ske");
    REQUIRE(flat.data.size() == 12);
    for (int s = 0; s < 3; ++s)
        for (int c = 0; c < 4; ++c) CHECK(flat.data[size_t(s) * 4 + c] == pd.strips[size_t(s)][size_t(c)]);
    CHECK(flat.spans.size() == 1);
    CHECK(flat.spans[0].first == "ske");
    CHECK(flat.spans[0].second == 12);

    // zero matrices produce a zero embedding
    BranchProjection zero;
    zero.per_strip.assign(3, Matrix(2, 4));
    const Embedding z = branch_embed(pd, zero, "ske");
    for (double v : z.data) CHECK(v == 0.0);

    // random projection equals the per-strip matrix-vector oracle
    BranchProjection rnd;
    for (int s = 0; s < 3; ++s) {
        Matrix m(2, 4);
        for (double& x : m.data) x = double(rng() >> 11) * (1.0 / 9007199254740992.0) - 0.5;
        rnd.per_strip.push_back(m);
    }
    const Embedding e = branch_embed(pd, rnd, "ske");
    REQUIRE(e.data.size() == 6);
    for (int s = 0; s < 3; ++s)
        for (int r = 0; r < 2; ++r) {
            double acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += rnd.per_strip[size_t(s)].at(r, c) * pd.strips[size_t(s)][size_t(c)];
            CHECK(e.data[size_t(s) * 2 + r] == doctest::Approx(acc).epsilon(1e-12));
        }

    // shape mismatch
    BranchProjection bad;
    bad.per_strip.assign(2, Matrix(2, 4));
    CHECK_THROWS_AS(branch_embed(pd, bad, "ske"), ParameterError);
}

TEST_CASE("concat_embeddings lengths, zero spans, and distance decomposition") {
    std::mt19937_64 rng(28);
    auto make = [&](const std::string& tag, size_t d, bool zero) {
        Embedding e;
        e.spans = {{tag, d}};
        e.data.resize(d);
        if (!zero)
            for (double& v : e.data) v = double(rng() >> 11) * (1.0 / 9007199254740992.0);
        return e;
    };

    const Embedding a = make("ske", 4, false), b = make("par", 4, false), c = make("fus", 4, false);
    const Embedding full = concat_embeddings({a, b, c});
    CHECK(full.data.size() == 12);
    REQUIRE(full.spans.size() == 3);
    CHECK(full.spans[1].first == "par");

    const Embedding with_zero = concat_embeddings({a, make("par", 4, true), c});
    for (size_t i = 4; i < 8; ++i) CHECK(with_zero.data[i] == 0.0);

    // squared distances decompose over spans: zeroing one branch in both
    // vectors reproduces the distance over the remaining branches
    const Embedding x = concat_embeddings({a, b, c});
    const Embedding y = concat_embeddings({make("ske", 4, false), make("par", 4, false), make("fus", 4, false)});
    auto sq = [](const std::vector<double>& u, const std::vector<double>& v, size_t from, size_t to) {
        double s = 0.0;
        for (size_t i = from; i < to; ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
        return s;
    };
    const double full_sq = sq(x.data, y.data, 0, 12);
    const double span_sum = sq(x.data, y.data, 0, 4) + sq(x.data, y.data, 4, 8) + sq(x.data, y.data, 8, 12);
    CHECK(full_sq == doctest::Approx(span_sum).epsilon(1e-12));
}

namespace {

SequenceRecord make_record(int frames, uint64_t seed, bool with_silhouette = true) {
    std::mt19937_64 rng(seed);
    std::vector<ModalityStack> stacks;
    for (int t = 0; t < frames; ++t) {
        SketchMap sketch(32, 32, 0.0);
        Mask silh(32, 32, 0);
        LabelMap lm(32, 32, 0);
        for (int y = 6; y < 26; ++y)
            for (int x = 12 + (t % 3); x < 20 + (t % 3); ++x) {
                sketch.at(x, y) = double(rng() >> 11) * (1.0 / 9007199254740992.0);
                silh.at(x, y) = 1;
                lm.at(x, y) = y < 16 ? 1 : 2;
            }
        ModalityStack stack;
        append_channel(stack, {"sketch", sketch});
        if (with_silhouette) append_channel(stack, {"silhouette", silh});
        LabelGrouping grouping;
        grouping.groups = {{"upper", {1}}, {"lower", {2}}};
        append_stack(stack, parsing_to_stack(lm, grouping));
        stacks.push_back(std::move(stack));
    }
    SequenceMeta meta;
    meta.subject = "s0";
    meta.condition = "nm";
    meta.view = "000";
    meta.seq = 0;
    return package_sequence(meta, std::move(stacks));
}

}  // namespace

TEST_CASE("sequence_descriptor single frame equals the frame-level composition") {
    const SequenceRecord record = make_record(1, 31);
    DescriptorConfig cfg;
    const Embedding got = sequence_descriptor(record, cfg);

    // manual composition on the one frame
    ModalityStack sketch_in(record.frames[0].width, record.frames[0].height);
    append_channel(sketch_in, {"sketch", [&] {
                                   SketchMap s(record.frames[0].width, record.frames[0].height);
                                   s.data.assign(record.frames[0].plane(0),
                                                 record.frames[0].plane(0) + record.frames[0].plane_size());
                                   return s;
                               }()});
    FeatureMap ske1 = filter_bank_encode(sketch_in, 1, 8);

    ModalityStack par_in(record.frames[0].width, record.frames[0].height);
    par_in.channels = {record.frames[0].channels[2], record.frames[0].channels[3]};
    par_in.data.assign(record.frames[0].plane(2),
                       record.frames[0].plane(2) + 2 * record.frames[0].plane_size());
    FeatureMap par1 = filter_bank_encode(par_in, 1, 8);

    FeatureMap fus = fuse_add(ske1, par1);
    fus = filter_bank_stage(fus, 8);
    FeatureMap ske = filter_bank_stage(ske1, 8);
    FeatureMap par = filter_bank_stage(par1, 8);

    const Embedding want = concat_embeddings(
        {branch_embed(hpp(ske, cfg.hpp_levels), identity_truncated(15, 32, 8), "ske"),
         branch_embed(hpp(par, cfg.hpp_levels), identity_truncated(15, 32, 8), "par"),
         branch_embed(hpp(fus, cfg.hpp_levels), identity_truncated(15, 32, 8), "fus")});
    REQUIRE(got.data.size() == want.data.size());
    for (size_t i = 0; i < got.data.size(); ++i)
        CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-12));
}

TEST_CASE("descriptor is invariant to frame duplication and permutation") {
    const SequenceRecord one = make_record(1, 32);
    SequenceRecord ten = one;
    for (int i = 0; i < 9; ++i) ten.frames.push_back(one.frames[0]);

    DescriptorConfig cfg;
    CHECK(sequence_descriptor(one, cfg).data == sequence_descriptor(ten, cfg).data);

    SequenceRecord multi = make_record(5, 33);
    SequenceRecord permuted = multi;
    std::swap(permuted.frames[0], permuted.frames[3]);
    std::swap(permuted.frames[1], permuted.frames[4]);
    CHECK(sequence_descriptor(multi, cfg).data == sequence_descriptor(permuted, cfg).data);
}

TEST_CASE("adding an all-zero frame never changes the descriptor") {
    const SequenceRecord record = make_record(3, 34);
    SequenceRecord padded = record;
    ModalityStack zero_frame = record.frames[0];
    std::fill(zero_frame.data.begin(), zero_frame.data.end(), 0.0);
    padded.frames.push_back(zero_frame);

    DescriptorConfig cfg;
    CHECK(sequence_descriptor(record, cfg).data == sequence_descriptor(padded, cfg).data);
}

TEST_CASE("stage-1 fusion with a zero parsing branch depends only on the sketch branch") {
    SequenceRecord record = make_record(2, 35);
    // zero the parsing planes
    for (auto& frame : record.frames) {
        std::fill(frame.plane(2), frame.plane(2) + frame.plane_size(), 0.0);
        std::fill(frame.plane(3), frame.plane(3) + frame.plane_size(), 0.0);
    }
    DescriptorConfig cfg;
    const SequenceFeatures feats = sequence_features(record, cfg);

    // with fuse_add and zero parsing input, the fusion branch equals the
    // sketch branch continued through the remaining stages
    REQUIRE(feats.branches.size() == 3);
    const auto& ske = feats.branches[0].parts;
    const auto& fus = feats.branches[2].parts;
    REQUIRE(ske.strips.size() == fus.strips.size());
    for (size_t s = 0; s < ske.strips.size(); ++s)
        for (size_t c = 0; c < ske.strips[s].size(); ++c)
            CHECK(fus.strips[s][c] == doctest::Approx(ske.strips[s][c]).epsilon(1e-12));
}

TEST_CASE("modality sets select the right branches") {
    const SequenceRecord record = make_record(2, 36);

    DescriptorConfig sketch_only;
    sketch_only.modality_set = ModalitySet::Sketch;
    const SequenceFeatures fs = sequence_features(record, sketch_only);
    REQUIRE(fs.branches.size() == 1);
    CHECK(fs.branches[0].tag == "ske");

    DescriptorConfig parsing_only;
    parsing_only.modality_set = ModalitySet::Parsing;
    const SequenceFeatures fp = sequence_features(record, parsing_only);
    REQUIRE(fp.branches.size() == 1);
    CHECK(fp.branches[0].tag == "par");

    DescriptorConfig dual;
    dual.fusion = FusionOp::None;
    const SequenceFeatures fd = sequence_features(record, dual);
    REQUIRE(fd.branches.size() == 2);

    DescriptorConfig plus;
    plus.modality_set = ModalitySet::SketchSilhouetteParsing;
    const SequenceFeatures fpp = sequence_features(record, plus);
    REQUIRE(fpp.branches.size() == 3);

    // ++ mode differs from plain sketch+parsing in the sketch branch input
    DescriptorConfig plain;
    const SequenceFeatures fplain = sequence_features(record, plain);
    bool differs = false;
    for (size_t s = 0; s < fpp.branches[0].parts.strips.size() && !differs; ++s)
        for (size_t c = 0; c < fpp.branches[0].parts.strips[s].size(); ++c)
            if (fpp.branches[0].parts.strips[s][c] != fplain.branches[0].parts.strips[s][c]) {
                differs = true;
                break;
            }
    CHECK(differs);
}

TEST_CASE("concat fusion operator runs and differs from add") {
    const SequenceRecord record = make_record(2, 37);
    DescriptorConfig add_cfg;
    DescriptorConfig cat_cfg;
    cat_cfg.fusion = FusionOp::Concat;
    const Embedding ea = sequence_descriptor(record, add_cfg);
    const Embedding ec = sequence_descriptor(record, cat_cfg);
    CHECK(ea.data.size() == ec.data.size());
    CHECK(ea.data != ec.data);
}
