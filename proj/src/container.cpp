#include "sketchgait/container.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>

namespace sketchgait {

static_assert(std::endian::native == std::endian::little,
              "container serialization assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'G', 'S', 'T', 'K', '0', '0', '0', '1'};
constexpr uint64_t kMaxDims = 8;

size_t dtype_size(Dtype d) { return d == Dtype::F32 ? 4 : 1; }

template <typename T>
void append_raw(std::vector<uint8_t>& out, const T& value) {
    const auto* p = reinterpret_cast<const uint8_t*>(&value);
    out.insert(out.end(), p, p + sizeof(T));
}

uint32_t crc_of(const uint8_t* data, size_t n) {
    return uint32_t(crc32(0L, data, uInt(n)));
}

}  // namespace

Tensor Tensor::from_f32(std::vector<uint64_t> dims, std::vector<float> values) {
    Tensor t;
    t.dtype = Dtype::F32;
    t.dims = std::move(dims);
    t.f32 = std::move(values);
    if (t.f32.size() != t.element_count())
        throw ParameterError("Tensor::from_f32: payload length does not match dims");
    return t;
}

Tensor Tensor::from_u8(std::vector<uint64_t> dims, std::vector<uint8_t> values) {
    Tensor t;
    t.dtype = Dtype::U8;
    t.dims = std::move(dims);
    t.u8 = std::move(values);
    if (t.u8.size() != t.element_count())
        throw ParameterError("Tensor::from_u8: payload length does not match dims");
    return t;
}

std::vector<uint8_t> serialize_tensor(const Tensor& t) {
    if (t.dims.size() > kMaxDims)
        throw ParameterError("serialize_tensor: too many dimensions");
    const uint64_t count = t.element_count();
    const size_t expect = (t.dtype == Dtype::F32) ? t.f32.size() : t.u8.size();
    if (expect != count)
        throw ParameterError("serialize_tensor: payload length does not match dims");

    std::vector<uint8_t> out;
    out.reserve(8 + 2 + t.dims.size() * 8 + count * dtype_size(t.dtype) + 4);
    out.insert(out.end(), kMagic, kMagic + 8);
    out.push_back(uint8_t(t.dtype));
    out.push_back(uint8_t(t.dims.size()));
    for (uint64_t d : t.dims) append_raw(out, d);
    if (t.dtype == Dtype::F32) {
        const auto* p = reinterpret_cast<const uint8_t*>(t.f32.data());
        out.insert(out.end(), p, p + t.f32.size() * 4);
    } else {
        out.insert(out.end(), t.u8.begin(), t.u8.end());
    }
    append_raw(out, crc_of(out.data(), out.size()));
    return out;
}

Tensor deserialize_tensor(const std::vector<uint8_t>& bytes) {
    auto fail = [](const std::string& why) -> Tensor {
        throw DataError("tensor container corrupt: " + why);
    };

    size_t off = 0;
    auto need = [&](size_t n) {
        if (bytes.size() - off < n) fail("truncated file");
    };

    need(8);
    if (std::memcmp(bytes.data(), kMagic, 8) != 0) fail("bad magic");
    off = 8;

    need(2);
    const uint8_t dtype_code = bytes[off++];
    const uint8_t ndim = bytes[off++];
    if (dtype_code > 1) fail("unknown dtype code " + std::to_string(dtype_code));
    if (ndim > kMaxDims) fail("ndim " + std::to_string(ndim) + " exceeds limit");

    Tensor t;
    t.dtype = Dtype(dtype_code);
    need(size_t(ndim) * 8);
    uint64_t count = 1;
    for (int i = 0; i < ndim; ++i) {
        uint64_t d;
        std::memcpy(&d, bytes.data() + off, 8);
        off += 8;
        t.dims.push_back(d);
        if (d != 0 && count > UINT64_MAX / d) fail("dimension overflow");
        count *= d;
    }

    const size_t payload = size_t(count) * dtype_size(t.dtype);
    need(payload + 4);
    if (bytes.size() - off != payload + 4) fail("payload length does not match dims");

    uint32_t stored_crc;
    std::memcpy(&stored_crc, bytes.data() + bytes.size() - 4, 4);
    if (crc_of(bytes.data(), bytes.size() - 4) != stored_crc) fail("checksum mismatch");

    if (t.dtype == Dtype::F32) {
        t.f32.resize(size_t(count));
        std::memcpy(t.f32.data(), bytes.data() + off, payload);
    } else {
        t.u8.assign(bytes.begin() + long(off), bytes.begin() + long(off + payload));
    }
    return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
    const auto bytes = serialize_tensor(t);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!f) throw DataError("write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw DataError("cannot open: " + path.string());
    const auto size = f.tellg();
    f.seekg(0);
    std::vector<uint8_t> bytes(static_cast<size_t>(size));
    f.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!f) throw DataError("read failed: " + path.string());
    return deserialize_tensor(bytes);
}

}  // namespace sketchgait
