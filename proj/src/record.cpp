#include "sketchgait/record.hpp"

#include <fstream>

#include <json.hpp>

#include "sketchgait/container.hpp"

namespace sketchgait {

using nlohmann::json;
namespace fs = std::filesystem;

SequenceRecord package_sequence(SequenceMeta meta, std::vector<ModalityStack> stacks) {
    if (stacks.empty()) throw ParameterError("package_sequence: no frames");
    const auto& first = stacks.front();
    for (const auto& s : stacks) {
        if (s.width != first.width || s.height != first.height || s.channels != first.channels)
            throw ParameterError("package_sequence: frames are not homogeneous");
    }
    return SequenceRecord{std::move(meta), std::move(stacks)};
}

void write_record(const fs::path& base, const SequenceRecord& record) {
    if (record.frames.empty()) throw ParameterError("write_record: empty record");
    const auto& f0 = record.frames.front();
    const uint64_t T = record.frames.size();
    const uint64_t C = f0.channels.size();
    const uint64_t H = f0.height;
    const uint64_t W = f0.width;

    std::vector<float> payload;
    payload.reserve(size_t(T * C * H * W));
    for (const auto& frame : record.frames)
        for (double v : frame.data) payload.push_back(float(v));

    write_tensor(fs::path(base.string() + ".gstk"), Tensor::from_f32({T, C, H, W}, std::move(payload)));

    json meta = {{"subject", record.meta.subject},
                 {"condition", record.meta.condition},
                 {"view", record.meta.view},
                 {"seq", record.meta.seq}};
    json channels = json::array();
    for (const auto& c : f0.channels)
        channels.push_back({{"name", c.name}, {"kind", to_string(c.kind)}});
    meta["channels"] = channels;

    std::ofstream out(base.string() + ".json", std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + base.string() + ".json");
    out << meta.dump(2) << "\n";
}

SequenceRecord read_record(const fs::path& base) {
    const fs::path tensor_path(base.string() + ".gstk");
    const fs::path meta_path(base.string() + ".json");
    if (!fs::exists(meta_path)) throw DataError("record sidecar not found: " + meta_path.string());

    json meta;
    try {
        std::ifstream f(meta_path);
        meta = json::parse(f);
    } catch (const json::parse_error& e) {
        throw DataError("record sidecar is not valid JSON: " + std::string(e.what()));
    }

    SequenceRecord record;
    record.meta.subject = meta.at("subject").get<std::string>();
    record.meta.condition = meta.at("condition").get<std::string>();
    record.meta.view = meta.at("view").get<std::string>();
    record.meta.seq = meta.at("seq").get<int>();

    std::vector<ChannelDesc> channels;
    for (const auto& c : meta.at("channels"))
        channels.push_back({c.at("name").get<std::string>(),
                            channel_kind_from_string(c.at("kind").get<std::string>())});

    const Tensor t = read_tensor(tensor_path);
    if (t.dtype != Dtype::F32 || t.dims.size() != 4)
        throw DataError("record tensor must be a 4D f32 tensor: " + tensor_path.string());
    const uint64_t T = t.dims[0], C = t.dims[1], H = t.dims[2], W = t.dims[3];
    if (C != channels.size())
        throw DataError("record channel count disagrees with sidecar: " + tensor_path.string());

    const size_t per_frame = size_t(C * H * W);
    for (uint64_t i = 0; i < T; ++i) {
        ModalityStack stack(static_cast<int>(W), static_cast<int>(H));
        stack.channels = channels;
        stack.data.assign(t.f32.begin() + long(i * per_frame),
                          t.f32.begin() + long((i + 1) * per_frame));
        record.frames.push_back(std::move(stack));
    }
    if (record.frames.empty()) throw DataError("record has no frames: " + tensor_path.string());
    return record;
}

}  // namespace sketchgait
