#include "sketchgait/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sketchgait/png_io.hpp"

namespace sketchgait {

namespace fs = std::filesystem;

namespace {

constexpr int kLabelHead = 1;
constexpr int kLabelTorso = 2;
constexpr int kLabelArms = 3;
constexpr int kLabelLegs = 4;

struct IdentityShape {
    double head_r;
    double torso_len;
    double torso_halfwidth;
    double arm_len;
    double leg_len;
    double leg_swing;
    double arm_swing;
    double limb_thick;
    double stripe_freq;
    double color[4][3];  // per part label 1..4
};

struct Pose {
    double cx;        // horizontal center
    double y_top;     // top of the head
    double phase;     // walk cycle phase
};

// Evenly spread values with a seeded permutation, so every identity gets a
// distinct setting of every parameter.
std::vector<double> spread(std::mt19937_64& rng, int n, double lo, double hi) {
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[size_t(i)] = i;
    for (size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
    std::vector<double> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out[size_t(i)] = n > 1 ? lo + (hi - lo) * perm[size_t(i)] / double(n - 1) : (lo + hi) / 2;
    return out;
}

double uniform(std::mt19937_64& rng) { return double(rng() >> 11) * (1.0 / 9007199254740992.0); }

std::vector<IdentityShape> make_identities(int n, std::mt19937_64& rng) {
    const auto head = spread(rng, n, 5.0, 10.0);
    const auto torso = spread(rng, n, 26.0, 40.0);
    const auto halfw = spread(rng, n, 5.0, 11.0);
    const auto arm = spread(rng, n, 24.0, 36.0);
    const auto leg = spread(rng, n, 40.0, 54.0);
    const auto lsw = spread(rng, n, 0.25, 0.55);
    const auto asw = spread(rng, n, 0.20, 0.50);
    const auto thick = spread(rng, n, 2.2, 4.0);
    const auto freq = spread(rng, n, 0.12, 0.45);

    std::vector<IdentityShape> ids(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        IdentityShape& s = ids[size_t(i)];
        s.head_r = head[size_t(i)];
        s.torso_len = torso[size_t(i)];
        s.torso_halfwidth = halfw[size_t(i)];
        s.arm_len = arm[size_t(i)];
        s.leg_len = leg[size_t(i)];
        s.leg_swing = lsw[size_t(i)];
        s.arm_swing = asw[size_t(i)];
        s.limb_thick = thick[size_t(i)];
        s.stripe_freq = freq[size_t(i)];
        for (int p = 0; p < 4; ++p)
            for (int c = 0; c < 3; ++c) s.color[p][c] = 0.35 + 0.6 * uniform(rng);
    }
    return ids;
}

void draw_capsule(LabelMap& lm, double x0, double y0, double x1, double y1, double r, int label) {
    const int xa = std::max(0, int(std::floor(std::min(x0, x1) - r - 1)));
    const int xb = std::min(lm.width - 1, int(std::ceil(std::max(x0, x1) + r + 1)));
    const int ya = std::max(0, int(std::floor(std::min(y0, y1) - r - 1)));
    const int yb = std::min(lm.height - 1, int(std::ceil(std::max(y0, y1) + r + 1)));
    const double dx = x1 - x0, dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    for (int y = ya; y <= yb; ++y) {
        for (int x = xa; x <= xb; ++x) {
            double t = len2 > 0.0 ? ((x - x0) * dx + (y - y0) * dy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double px = x0 + t * dx, py = y0 + t * dy;
            const double d2 = (x - px) * (x - px) + (y - py) * (y - py);
            if (d2 <= r * r) lm.at(x, y) = label;
        }
    }
}

void draw_disk(LabelMap& lm, double cx, double cy, double r, int label) {
    draw_capsule(lm, cx, cy, cx, cy, r, label);
}

// Render the figure's parsing map for one pose + condition.
LabelMap render_labels(const IdentityShape& id, const Pose& pose, const std::string& condition,
                       int width, int height) {
    LabelMap lm(width, height, 0);

    const bool coat = condition == "cl";
    const double torso_halfwidth = id.torso_halfwidth + (coat ? 3.0 : 0.0);
    const double torso_len = id.torso_len + (coat ? 0.35 * id.leg_len : 0.0);

    const double neck = 2.0;
    const double y_head = pose.y_top + id.head_r;
    const double y_shoulder = pose.y_top + 2.0 * id.head_r + neck;
    const double y_hip = y_shoulder + id.torso_len;
    const double cx = pose.cx;

    const double lu = 0.52 * id.leg_len, ll = 0.48 * id.leg_len;
    const double au = 0.55 * id.arm_len, al = 0.45 * id.arm_len;

    auto swing_leg = [&](double sign) {
        const double a = id.leg_swing * std::sin(pose.phase + (sign > 0 ? 0.0 : M_PI));
        const double kx = cx + sign * 2.0 + lu * std::sin(a);
        const double ky = y_hip + lu * std::cos(a);
        // Shin trails the thigh slightly for a bent-knee look.
        const double b = a * 1.25;
        const double fx = kx + ll * std::sin(b);
        const double fy = ky + ll * std::cos(b);
        draw_capsule(lm, cx + sign * 2.0, y_hip, kx, ky, id.limb_thick, kLabelLegs);
        draw_capsule(lm, kx, ky, fx, fy, id.limb_thick * 0.9, kLabelLegs);
    };
    auto swing_arm = [&](double sign) {
        const double a = id.arm_swing * std::sin(pose.phase + (sign > 0 ? M_PI : 0.0));
        const double ex = cx + sign * (torso_halfwidth - 1.0) + au * std::sin(a);
        const double ey = y_shoulder + 1.0 + au * std::cos(a);
        const double b = a + 0.35;  // fixed elbow bend
        const double hx = ex + al * std::sin(b);
        const double hy = ey + al * std::cos(b);
        draw_capsule(lm, cx + sign * (torso_halfwidth - 1.0), y_shoulder + 1.0, ex, ey,
                     id.limb_thick * 0.8, kLabelArms);
        draw_capsule(lm, ex, ey, hx, hy, id.limb_thick * 0.75, kLabelArms);
    };

    // Painter's order: far arm, legs, torso, near arm, head.
    swing_arm(-1.0);
    swing_leg(-1.0);
    swing_leg(1.0);
    draw_capsule(lm, cx, y_shoulder, cx, y_shoulder + torso_len, torso_halfwidth, kLabelTorso);
    if (condition == "bg") {
        const double bag_r = 0.65 * id.torso_halfwidth + 3.0;
        draw_disk(lm, cx + torso_halfwidth + bag_r * 0.6, y_hip - 4.0, bag_r, kLabelTorso);
    }
    swing_arm(1.0);
    draw_disk(lm, cx, y_head, id.head_r, kLabelHead);
    return lm;
}

Frame render_rgb(const LabelMap& lm, const IdentityShape& id, const Pose& pose,
                 const std::string& condition, std::mt19937_64& noise_rng) {
    Frame frame(lm.width, lm.height);
    const bool coat = condition == "cl";
    const double stripe_freq = id.stripe_freq * (coat ? 1.6 : 1.0);
    const double y_shoulder = pose.y_top + 2.0 * id.head_r + 2.0;

    for (int y = 0; y < lm.height; ++y) {
        for (int x = 0; x < lm.width; ++x) {
            const int label = lm.at(x, y);
            double r, g, b;
            if (label == 0) {
                // Cluttered background the foreground mask is meant to remove.
                const double bars = 0.20 * std::sin(2.0 * M_PI * x / 17.0);
                const double n = 0.15 * uniform(noise_rng);
                r = std::clamp(0.45 + bars + n, 0.0, 1.0);
                g = std::clamp(0.40 - bars + n, 0.0, 1.0);
                b = std::clamp(0.50 + 0.5 * bars + n, 0.0, 1.0);
            } else {
                const double* base = id.color[label - 1];
                double shade = 1.0;
                if (label == kLabelTorso) {
                    // Clothing texture: horizontal stripes with an identity-
                    // specific frequency.
                    shade = 0.60 + 0.40 * std::sin(2.0 * M_PI * stripe_freq * (y - y_shoulder));
                } else if (label == kLabelLegs || label == kLabelArms) {
                    shade = 0.85 + 0.15 * std::sin(0.35 * y);
                }
                r = std::clamp(base[0] * shade, 0.0, 1.0);
                g = std::clamp(base[1] * shade, 0.0, 1.0);
                b = std::clamp(base[2] * shade, 0.0, 1.0);
            }
            frame.at(x, y, 0) = r;
            frame.at(x, y, 1) = g;
            frame.at(x, y, 2) = b;
        }
    }
    return frame;
}

}  // namespace

fs::path generate_synthetic_dataset(const fs::path& out_dir, const SyntheticSpec& spec) {
    if (spec.identities < 1) throw ParameterError("synthetic: need at least one identity");
    if (spec.conditions < 1 || spec.conditions > 3)
        throw ParameterError("synthetic: conditions must be 1..3 (nm, bg, cl)");
    if (spec.frames < 1 || spec.sequences_per_condition < 1)
        throw ParameterError("synthetic: frames and sequences must be positive");
    if (spec.width < 64 || spec.height < 96)
        throw ParameterError("synthetic: canvas must be at least 64x96");

    fs::create_directories(out_dir);

    std::mt19937_64 rng(spec.seed);
    const auto identities = make_identities(spec.identities, rng);

    const std::vector<std::string> all_conditions = {"nm", "bg", "cl"};

    DatasetIndex index;
    index.palette = {{kLabelHead, "head"}, {kLabelTorso, "torso"}, {kLabelArms, "arms"}, {kLabelLegs, "legs"}};
    index.grouping.groups = {{"head", {kLabelHead}},
                             {"torso", {kLabelTorso}},
                             {"arms", {kLabelArms}},
                             {"legs", {kLabelLegs}}};
    index.protocol.gallery_conditions = {"nm"};
    for (int c = 0; c < spec.conditions; ++c)
        index.protocol.probe_conditions.push_back(all_conditions[size_t(c)]);

    for (int i = 0; i < spec.identities; ++i) {
        char subject[16];
        std::snprintf(subject, sizeof subject, "s%03d", i);
        const IdentityShape& id = identities[size_t(i)];

        const double figure_h = 2.0 * id.head_r + 2.0 + id.torso_len + id.leg_len;
        const double y_top_base = (spec.height - figure_h) / 2.0;

        for (int c = 0; c < spec.conditions; ++c) {
            const std::string& condition = all_conditions[size_t(c)];
            for (int s = 0; s < spec.sequences_per_condition; ++s) {
                const double phase0 = 2.0 * M_PI * uniform(rng);
                const double drift = (uniform(rng) - 0.5) * 10.0;  // px over the sequence
                const double cx0 = spec.width / 2.0 + (uniform(rng) - 0.5) * 16.0;

                SequenceMeta meta;
                meta.subject = subject;
                meta.condition = condition;
                meta.view = "000";
                meta.seq = s;

                const std::string stem =
                    std::string(subject) + "_" + condition + "_000_" + std::to_string(s);
                const fs::path seq_dir = out_dir / stem;
                fs::create_directories(seq_dir);

                std::mt19937_64 noise_rng(spec.seed ^ (uint64_t(i) << 32) ^ (uint64_t(c) << 16) ^
                                          uint64_t(s));
                for (int t = 0; t < spec.frames; ++t) {
                    Pose pose;
                    pose.phase = phase0 + 2.0 * M_PI * t / spec.frames;
                    pose.cx = cx0 + drift * t / std::max(1, spec.frames - 1);
                    pose.y_top = y_top_base + 1.5 * std::fabs(std::cos(pose.phase));

                    const LabelMap labels = render_labels(id, pose, condition, spec.width, spec.height);
                    const Frame frame = render_rgb(labels, id, pose, condition, noise_rng);
                    const Mask mask = mask_from_parsing(labels);

                    char idx[8];
                    std::snprintf(idx, sizeof idx, "%03d", t);
                    const std::string frame_name = stem + "/frame_" + idx + ".png";
                    const std::string mask_name = stem + "/mask_" + idx + ".png";
                    const std::string parse_name = stem + "/parse_" + idx + ".png";
                    write_png_rgb(out_dir / frame_name, frame);
                    write_png_mask(out_dir / mask_name, mask);
                    write_png_labels(out_dir / parse_name, labels);
                    meta.frames.push_back(frame_name);
                    meta.masks.push_back(mask_name);
                    meta.parsing.push_back(parse_name);
                }
                index.entries.push_back(std::move(meta));
            }
        }
    }

    std::sort(index.entries.begin(), index.entries.end(),
              [](const SequenceMeta& a, const SequenceMeta& b) { return a.key() < b.key(); });
    const fs::path manifest_path = out_dir / "manifest.json";
    write_manifest(manifest_path, index);
    return manifest_path;
}

}  // namespace sketchgait
