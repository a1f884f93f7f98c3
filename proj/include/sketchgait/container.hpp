#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sketchgait/error.hpp"

namespace sketchgait {

// On-disk tensor container, little-endian throughout:
//   magic "GSTK0001" (8 bytes)
//   dtype (1 byte: 0 = f32, 1 = u8)
//   ndim  (1 byte)
//   dims  (ndim x u64)
//   payload, row-major (product(dims) x element size)
//   crc32 (u32) over everything above
enum class Dtype : uint8_t { F32 = 0, U8 = 1 };

struct Tensor {
    Dtype dtype = Dtype::F32;
    std::vector<uint64_t> dims;
    std::vector<float> f32;
    std::vector<uint8_t> u8;

    uint64_t element_count() const {
        uint64_t n = 1;
        for (uint64_t d : dims) n *= d;
        return n;
    }

    static Tensor from_f32(std::vector<uint64_t> dims, std::vector<float> values);
    static Tensor from_u8(std::vector<uint64_t> dims, std::vector<uint8_t> values);
};

// Serialization is exact: read_tensor(write_tensor(t)) == t bit for bit.
// Truncation, bad magic, and checksum mismatches throw DataError.
void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

std::vector<uint8_t> serialize_tensor(const Tensor& t);
Tensor deserialize_tensor(const std::vector<uint8_t>& bytes);

}  // namespace sketchgait
