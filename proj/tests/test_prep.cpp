#include <doctest.h>

#include <fstream>
#include <random>

#include "sketchgait/container.hpp"
#include "sketchgait/manifest.hpp"
#include "sketchgait/normalize.hpp"
#include "sketchgait/png_io.hpp"
#include "sketchgait/record.hpp"

using namespace sketchgait;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("sketchgait_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<uint8_t> slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::vector<uint8_t>& bytes) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

}  // namespace

TEST_CASE("tensor container f32 and u8 round-trips are exact") {
    const fs::path dir = scratch_dir("container");
    std::mt19937_64 rng(1);

    Tensor a = Tensor::from_f32({2, 3, 4}, [&] {
        std::vector<float> v(24);
        for (auto& x : v) x = float(rng()) / float(UINT64_MAX);
        return v;
    }());
    write_tensor(dir / "a.gstk", a);
    const Tensor a2 = read_tensor(dir / "a.gstk");
    CHECK(a2.dtype == Dtype::F32);
    CHECK(a2.dims == a.dims);
    CHECK(a2.f32 == a.f32);

    Tensor b = Tensor::from_u8({5, 7}, [&] {
        std::vector<uint8_t> v(35);
        for (auto& x : v) x = uint8_t(rng());
        return v;
    }());
    write_tensor(dir / "b.gstk", b);
    const Tensor b2 = read_tensor(dir / "b.gstk");
    CHECK(b2.dtype == Dtype::U8);
    CHECK(b2.dims == b.dims);
    CHECK(b2.u8 == b.u8);

    // serialize(read(write(x))) is byte-stable
    CHECK(serialize_tensor(a2) == slurp(dir / "a.gstk"));
}

TEST_CASE("tensor container rejects truncation, bad magic, and flipped bits") {
    const fs::path dir = scratch_dir("container_corrupt");
    const Tensor t = Tensor::from_f32({8}, {1, 2, 3, 4, 5, 6, 7, 8});
    write_tensor(dir / "t.gstk", t);
    const std::vector<uint8_t> good = slurp(dir / "t.gstk");

    // truncated at every prefix length: never a partial record
    for (size_t n : {size_t(0), size_t(4), size_t(9), good.size() - 5, good.size() - 1}) {
        spit(dir / "trunc.gstk", {good.begin(), good.begin() + long(n)});
        CHECK_THROWS_AS(read_tensor(dir / "trunc.gstk"), DataError);
    }

    std::vector<uint8_t> bad_magic = good;
    bad_magic[0] = 'X';
    spit(dir / "magic.gstk", bad_magic);
    CHECK_THROWS_AS(read_tensor(dir / "magic.gstk"), DataError);

    std::vector<uint8_t> flipped = good;
    flipped[good.size() / 2] ^= 0x40;
    spit(dir / "flip.gstk", flipped);
    CHECK_THROWS_AS(read_tensor(dir / "flip.gstk"), DataError);
}

TEST_CASE("tensor container rejects payload/dims mismatch") {
    CHECK_THROWS_AS(Tensor::from_f32({3}, {1.0f, 2.0f}), ParameterError);
    CHECK_THROWS_AS(Tensor::from_u8({2, 2}, {1, 2, 3}), ParameterError);
}

namespace {

// A small synthetic manifest on disk with real PNG files behind it.
struct ManifestFixture {
    fs::path dir;
    fs::path manifest;

    explicit ManifestFixture(const std::string& name, int subjects = 2, int frames = 2) {
        dir = scratch_dir(name);
        std::string entries;
        for (int s = 0; s < subjects; ++s) {
            const std::string subject = "s" + std::to_string(s);
            std::string frame_list, mask_list, parse_list;
            for (int t = 0; t < frames; ++t) {
                const std::string stem = subject + "_f" + std::to_string(t);
                Frame frame(20, 24, 0.5);
                Mask mask(20, 24, 0);
                LabelMap labels(20, 24, 0);
                for (int y = 6; y < 20; ++y)
                    for (int x = 7 + s; x < 13 + s; ++x) {
                        mask.at(x, y) = 1;
                        labels.at(x, y) = y < 12 ? 1 : 2;
                        frame.at(x, y, 0) = 0.9;
                    }
                write_png_rgb(dir / (stem + "_rgb.png"), frame);
                write_png_mask(dir / (stem + "_m.png"), mask);
                write_png_labels(dir / (stem + "_p.png"), labels);
                frame_list += (t ? "," : "") + ("\"" + stem + "_rgb.png\"");
                mask_list += (t ? "," : "") + ("\"" + stem + "_m.png\"");
                parse_list += (t ? "," : "") + ("\"" + stem + "_p.png\"");
            }
            entries += std::string(s ? "," : "") + "{\"subject\":\"" + subject +
                       "\",\"condition\":\"nm\",\"view\":\"000\",\"seq\":0,\"frames\":[" +
                       frame_list + "],\"masks\":[" + mask_list + "],\"parsing\":[" + parse_list +
                       "]}";
        }
        const std::string text =
            "{\"palette\":{\"1\":\"upper\",\"2\":\"lower\"},"
            "\"grouping\":{\"upper\":[1],\"lower\":[2]},"
            "\"protocol\":{\"gallery_conditions\":[\"nm\"],\"probe_conditions\":[\"nm\"]},"
            "\"entries\":[" +
            entries + "]}";
        manifest = dir / "manifest.json";
        std::ofstream f(manifest);
        f << text;
    }
};

}  // namespace

TEST_CASE("scan_manifest accepts a valid synthetic manifest") {
    ManifestFixture fix("manifest_ok", 10, 1);
    const DatasetIndex index = scan_manifest(fix.manifest);
    CHECK(index.entries.size() == 10);
    CHECK(index.subjects().size() == 10);
    CHECK(index.palette.size() == 2);
    CHECK(index.grouping.groups.size() == 2);
    CHECK(index.protocol.gallery_conditions == std::vector<std::string>{"nm"});

    // deterministic and order-stable
    const DatasetIndex again = scan_manifest(fix.manifest);
    REQUIRE(again.entries.size() == index.entries.size());
    for (size_t i = 0; i < index.entries.size(); ++i)
        CHECK(again.entries[i].key() == index.entries[i].key());
}

TEST_CASE("scan_manifest accepts an empty entries list") {
    const fs::path dir = scratch_dir("manifest_empty");
    std::ofstream(dir / "m.json") << R"({"entries": []})";
    const DatasetIndex index = scan_manifest(dir / "m.json");
    CHECK(index.entries.empty());
}

TEST_CASE("scan_manifest rejects short modality lists with a JSON pointer") {
    ManifestFixture fix("manifest_short", 1, 2);
    // rewrite with a sketch list shorter than frames
    std::string text;
    {
        std::ifstream f(fix.manifest);
        text.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    }
    const std::string needle = "\"masks\":[";
    text.insert(text.find(needle), "\"modalities\":{\"sketch\":[\"s0_f0_m.png\"]},");
    std::ofstream(fix.manifest, std::ios::trunc) << text;
    try {
        scan_manifest(fix.manifest);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("/entries/0/modalities/sketch") != std::string::npos);
    }
}

TEST_CASE("scan_manifest rejects duplicates, missing files, palette violations") {
    const fs::path dir = scratch_dir("manifest_bad");
    Mask m(8, 8, 1);
    write_png_mask(dir / "m.png", m);

    auto write = [&](const std::string& body) {
        std::ofstream(dir / "m.json", std::ios::trunc) << body;
    };

    // duplicate key
    write(R"({"entries":[
      {"subject":"a","condition":"nm","view":"0","seq":0,"frames":["m.png"],"masks":["m.png"]},
      {"subject":"a","condition":"nm","view":"0","seq":0,"frames":["m.png"],"masks":["m.png"]}]})");
    CHECK_THROWS_AS(scan_manifest(dir / "m.json"), DataError);

    // missing file
    write(R"({"entries":[
      {"subject":"a","condition":"nm","view":"0","seq":0,"frames":["gone.png"],"masks":["m.png"]}]})");
    CHECK_THROWS_AS(scan_manifest(dir / "m.json"), DataError);

    // grouping references a label outside the palette
    write(R"({"palette":{"1":"x"},"grouping":{"x":[1,2]},"entries":[]})");
    CHECK_THROWS_AS(scan_manifest(dir / "m.json"), DataError);

    // palette label not covered by any group
    write(R"({"palette":{"1":"x","2":"y"},"grouping":{"x":[1]},"entries":[]})");
    CHECK_THROWS_AS(scan_manifest(dir / "m.json"), DataError);

    // mask/frames length mismatch names the entry
    write(R"({"entries":[
      {"subject":"a","condition":"nm","view":"0","seq":0,"frames":["m.png"],"masks":["m.png","m.png"]}]})");
    try {
        scan_manifest(dir / "m.json");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("/entries/0/masks") != std::string::npos);
    }
}

namespace {

ModalityStack figure_stack(int w, int h, int x0, int x1, int y0, int y1) {
    SketchMap sketch(w, h, 0.0);
    Mask silh(w, h, 0);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            silh.at(x, y) = 1;
            sketch.at(x, y) = (x == x0 || x == x1 || y == y0 || y == y1) ? 1.0 : 0.2;
        }
    return stack_channels({{"sketch", sketch}, {"silhouette", silh}});
}

}  // namespace

TEST_CASE("normalize_frame on a full-height centered subject is a pure resize") {
    const int w = 32, h = 48;
    const ModalityStack stack = figure_stack(w, h, 12, 19, 0, h - 1);
    const Mask fg = derive_foreground(stack);
    const auto out = normalize_frame(stack, fg, {32, 32});
    REQUIRE(out.has_value());
    CHECK(out->width == 32);
    CHECK(out->height == 32);
    // silhouette stays binary
    const int silh = out->find_kind(ChannelKind::Silhouette);
    REQUIRE(silh >= 0);
    for (size_t i = 0; i < out->plane_size(); ++i) {
        const double v = out->plane(size_t(silh))[i];
        CHECK((v == 0.0 || v == 1.0));
    }
}

TEST_CASE("normalize_frame is shift-equivariant for integer shifts") {
    const int w = 48, h = 40;
    const ModalityStack a = figure_stack(w, h, 8, 17, 4, 35);
    const ModalityStack b = figure_stack(w, h, 18, 27, 4, 35);  // shifted 10 px right
    const auto na = normalize_frame(a, derive_foreground(a), {32, 32});
    const auto nb = normalize_frame(b, derive_foreground(b), {32, 32});
    REQUIRE(na.has_value());
    REQUIRE(nb.has_value());
    REQUIRE(na->data.size() == nb->data.size());
    for (size_t i = 0; i < na->data.size(); ++i)
        CHECK(std::abs(na->data[i] - nb->data[i]) <= 1.0 / 255.0);
}

TEST_CASE("normalize_frame skips empty masks") {
    const ModalityStack stack = figure_stack(16, 16, 4, 8, 4, 8);
    const Mask empty(16, 16, 0);
    CHECK_FALSE(normalize_frame(stack, empty, {16, 16}).has_value());
}

TEST_CASE("normalize_frame is idempotent within 1/255") {
    const ModalityStack stack = figure_stack(40, 56, 10, 24, 6, 49);
    const auto once = normalize_frame(stack, derive_foreground(stack), {64, 64});
    REQUIRE(once.has_value());
    const auto twice = normalize_frame(*once, derive_foreground(*once), {64, 64});
    REQUIRE(twice.has_value());
    REQUIRE(once->data.size() == twice->data.size());
    for (size_t i = 0; i < once->data.size(); ++i)
        CHECK(std::abs(once->data[i] - twice->data[i]) <= 1.0 / 255.0);
}

TEST_CASE("derive_foreground priority") {
    // silhouette channel wins
    ModalityStack with_silh = figure_stack(12, 12, 3, 8, 2, 9);
    const Mask a = derive_foreground(with_silh);
    CHECK(a.at(5, 5) == 1);
    CHECK(a.at(0, 0) == 0);

    // parsing union when no silhouette
    SketchMap sk(8, 8, 0.0);
    ModalityStack parsing;
    append_channel(parsing, {"sketch", sk});
    LabelMap lm(8, 8, 0);
    lm.at(3, 3) = 1;
    lm.at(4, 4) = 2;
    LabelGrouping grouping;
    grouping.groups = {{"a", {1}}, {"b", {2}}};
    append_stack(parsing, parsing_to_stack(lm, grouping));
    const Mask b = derive_foreground(parsing);
    CHECK(b.at(3, 3) == 1);
    CHECK(b.at(4, 4) == 1);
    CHECK(b.at(1, 1) == 0);

    // sketch threshold at 0.1 as the last resort
    SketchMap soft(8, 8, 0.0);
    soft.at(2, 2) = 0.5;
    soft.at(3, 3) = 0.05;
    ModalityStack sketch_only;
    append_channel(sketch_only, {"sketch", soft});
    const Mask c = derive_foreground(sketch_only);
    CHECK(c.at(2, 2) == 1);
    CHECK(c.at(3, 3) == 0);
}

TEST_CASE("record round-trip is byte-identical") {
    const fs::path dir = scratch_dir("records");

    for (int frames : {1, 30}) {
        std::vector<ModalityStack> stacks;
        for (int t = 0; t < frames; ++t)
            stacks.push_back(figure_stack(16, 16, 3, 10, 2, 13));
        SequenceMeta meta;
        meta.subject = "s1";
        meta.condition = "nm";
        meta.view = "000";
        meta.seq = frames;  // distinct keys
        const SequenceRecord record = package_sequence(meta, std::move(stacks));

        const fs::path base = dir / ("r" + std::to_string(frames));
        write_record(base, record);
        const SequenceRecord back = read_record(base);
        CHECK(back.meta.subject == "s1");
        REQUIRE(back.frames.size() == record.frames.size());

        // write what was read: files must match byte for byte
        const fs::path base2 = dir / ("r" + std::to_string(frames) + "_again");
        write_record(base2, back);
        CHECK(slurp(fs::path(base.string() + ".gstk")) == slurp(fs::path(base2.string() + ".gstk")));
        CHECK(slurp(fs::path(base.string() + ".json")) == slurp(fs::path(base2.string() + ".json")));
    }
}

TEST_CASE("truncated record is a corruption error, never a partial record") {
    const fs::path dir = scratch_dir("records_trunc");
    SequenceMeta meta;
    meta.subject = "s";
    meta.condition = "nm";
    meta.view = "0";
    meta.seq = 0;
    const SequenceRecord record = package_sequence(meta, {figure_stack(16, 16, 3, 10, 2, 13)});
    write_record(dir / "r", record);

    auto bytes = slurp(dir / "r.gstk");
    bytes.resize(bytes.size() / 2);
    spit(dir / "r.gstk", bytes);
    CHECK_THROWS_AS(read_record(dir / "r"), DataError);
}

TEST_CASE("package_sequence rejects inhomogeneous frames") {
    SequenceMeta meta;
    CHECK_THROWS_AS(package_sequence(meta, {}), ParameterError);
    CHECK_THROWS_AS(
        package_sequence(meta, {figure_stack(16, 16, 3, 10, 2, 13), figure_stack(16, 18, 3, 10, 2, 13)}),
        ParameterError);
}
