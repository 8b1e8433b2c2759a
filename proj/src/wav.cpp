// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/audio.hpp"

#include "binary_io.hpp"
#include "sonotrack/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string_view>

#include <fmt/format.h>

namespace sonotrack {

namespace fs = std::filesystem;

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t get_u32(const char* p)
{
    const auto* b = reinterpret_cast<const unsigned char*>(p);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t get_u16(const char* p)
{
    const auto* b = reinterpret_cast<const unsigned char*>(p);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void put_u32(std::vector<char>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::vector<char>& out, std::uint16_t v)
{
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

void put_tag(std::vector<char>& out, std::string_view tag) { out.insert(out.end(), tag.begin(), tag.end()); }

void check_finite(const std::vector<double>& x, const char* what)
{
    for (const double v : x)
        if (!std::isfinite(v))
            throw Error(fmt::format("{} contains non-finite samples", what));
}

} // namespace

void MonoAudio::validate() const
{
    if (sample_rate <= 0)
        throw Error("sample rate must be positive");
    check_finite(samples, "mono audio");
}

void BinauralAudio::validate() const
{
    if (sample_rate <= 0)
        throw Error("sample rate must be positive");
    if (left.size() != right.size())
        throw Error(fmt::format("binaural channels differ in length ({} vs {})", left.size(),
                                right.size()));
    check_finite(left, "left channel");
    check_finite(right, "right channel");
}

WavData read_wav(const fs::path& path)
{
    const auto bytes = detail::read_file(path);
    const std::string name = path.string();
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw Error(fmt::format("{}: not a RIFF/WAVE file", name));

    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t rate = 0;
    std::uint16_t bits = 0;
    const char* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* chunk = bytes.data() + pos;
        const std::size_t size = get_u32(chunk + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size() && std::memcmp(chunk, "data", 4) != 0)
            throw Error(fmt::format("{}: truncated chunk", name));
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16)
                throw Error(fmt::format("{}: short fmt chunk", name));
            format = get_u16(chunk + 8);
            channels = get_u16(chunk + 10);
            rate = get_u32(chunk + 12);
            bits = get_u16(chunk + 22);
            if (format == kFormatExtensible) {
                if (size < 40)
                    throw Error(fmt::format("{}: short extensible fmt chunk", name));
                format = get_u16(chunk + 32);
            }
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = chunk + 8;
            data_size = std::min(size, bytes.size() - body);
        }
        pos = body + size + (size & 1);
    }
    if (channels == 0 || rate == 0)
        throw Error(fmt::format("{}: missing fmt chunk", name));
    if (!data)
        throw Error(fmt::format("{}: missing data chunk", name));

    WavData out;
    out.sample_rate = static_cast<int>(rate);
    out.channels.assign(channels, {});
    const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
    const std::size_t frames = frame_bytes ? data_size / frame_bytes : 0;
    for (auto& ch : out.channels)
        ch.resize(frames);

    if (format == kFormatPcm && bits == 16) {
        out.format = SampleFormat::pcm16;
        for (std::size_t f = 0; f < frames; ++f)
            for (std::size_t c = 0; c < channels; ++c) {
                const auto raw = static_cast<std::int16_t>(get_u16(data + f * frame_bytes + 2 * c));
                out.channels[c][f] = raw / 32768.0;
            }
    } else if (format == kFormatFloat && bits == 32) {
        out.format = SampleFormat::float32;
        const auto decoded = detail::decode_f32le(std::span(data, frames * frame_bytes));
        for (std::size_t f = 0; f < frames; ++f)
            for (std::size_t c = 0; c < channels; ++c)
                out.channels[c][f] = decoded[f * channels + c];
    } else {
        throw Error(fmt::format("{}: unsupported encoding (format {}, {} bits)", name, format, bits));
    }
    return out;
}

void write_wav(const fs::path& path, const std::vector<std::vector<double>>& channels,
               int sample_rate, SampleFormat format)
{
    if (channels.empty())
        throw Error("WAV needs at least one channel");
    if (sample_rate <= 0)
        throw Error("sample rate must be positive");
    const std::size_t frames = channels.front().size();
    for (const auto& ch : channels) {
        if (ch.size() != frames)
            throw Error("WAV channels differ in length");
        check_finite(ch, "WAV channel");
    }

    const auto n_ch = static_cast<std::uint16_t>(channels.size());
    const std::uint16_t bits = format == SampleFormat::pcm16 ? 16 : 32;
    const std::uint16_t block = n_ch * bits / 8;
    const auto data_size = static_cast<std::uint32_t>(frames * block);

    std::vector<char> out;
    out.reserve(44 + data_size);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_size);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, format == SampleFormat::pcm16 ? kFormatPcm : kFormatFloat);
    put_u16(out, n_ch);
    put_u32(out, static_cast<std::uint32_t>(sample_rate));
    put_u32(out, static_cast<std::uint32_t>(sample_rate) * block);
    put_u16(out, block);
    put_u16(out, bits);
    put_tag(out, "data");
    put_u32(out, data_size);
    for (std::size_t f = 0; f < frames; ++f) {
        for (const auto& ch : channels) {
            if (format == SampleFormat::pcm16) {
                const long q = std::clamp(std::lround(ch[f] * 32768.0), -32768L, 32767L);
                put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
            } else {
                detail::append_f32le(out, static_cast<float>(ch[f]));
            }
        }
    }
    detail::write_file(path, out);
}

MonoAudio read_mono_wav(const fs::path& path)
{
    WavData wav = read_wav(path);
    MonoAudio mono{std::move(wav.channels.front()), wav.sample_rate};
    if (wav.channels.size() > 1) {
        for (std::size_t c = 1; c < wav.channels.size(); ++c)
            for (std::size_t i = 0; i < mono.samples.size(); ++i)
                mono.samples[i] += wav.channels[c][i];
        for (double& s : mono.samples)
            s /= static_cast<double>(wav.channels.size());
    }
    return mono;
}

BinauralAudio read_binaural_wav(const fs::path& path)
{
    WavData wav = read_wav(path);
    if (wav.channels.size() != 2)
        throw Error(fmt::format("{}: expected 2 channels, found {}", path.string(),
                                wav.channels.size()));
    return {std::move(wav.channels[0]), std::move(wav.channels[1]), wav.sample_rate};
}

void write_mono_wav(const fs::path& path, const MonoAudio& audio, SampleFormat format)
{
    write_wav(path, {audio.samples}, audio.sample_rate, format);
}

void write_binaural_wav(const fs::path& path, const BinauralAudio& audio, SampleFormat format)
{
    audio.validate();
    write_wav(path, {audio.left, audio.right}, audio.sample_rate, format);
}

} // namespace sonotrack
