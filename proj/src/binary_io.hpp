// SPDX-License-Identifier: Apache-2.0
// Little-endian float32 planes and small file helpers shared by the loaders.
#pragma once

#include "sonotrack/common.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace sonotrack::detail {

inline std::uint32_t to_little(std::uint32_t v)
{
    if constexpr (std::endian::native == std::endian::little)
        return v;
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

inline std::vector<char> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(fmt::format("cannot open {}", path.string()));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::span<const char> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(fmt::format("cannot write {}", path.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(fmt::format("short write to {}", path.string()));
}

inline std::vector<float> decode_f32le(std::span<const char> bytes)
{
    std::vector<float> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint32_t raw;
        std::memcpy(&raw, bytes.data() + 4 * i, 4);
        out[i] = std::bit_cast<float>(to_little(raw));
    }
    return out;
}

inline void append_f32le(std::vector<char>& buf, float v)
{
    const std::uint32_t raw = to_little(std::bit_cast<std::uint32_t>(v));
    char b[4];
    std::memcpy(b, &raw, 4);
    buf.insert(buf.end(), b, b + 4);
}

inline std::vector<float> read_f32le_file(const std::filesystem::path& path)
{
    const auto bytes = read_file(path);
    if (bytes.size() % 4 != 0)
        throw Error(fmt::format("{}: size {} is not a multiple of 4 bytes", path.string(), bytes.size()));
    return decode_f32le(bytes);
}

template <typename T>
void write_f32le_file(const std::filesystem::path& path, std::span<const T> values)
{
    std::vector<char> buf;
    buf.reserve(values.size() * 4);
    for (const T v : values)
        append_f32le(buf, static_cast<float>(v));
    write_file(path, buf);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    write_file(path, std::span<const char>(text.data(), text.size()));
}

} // namespace sonotrack::detail
