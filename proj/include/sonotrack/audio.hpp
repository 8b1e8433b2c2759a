// SPDX-License-Identifier: Apache-2.0
//
// Sample buffers and RIFF/WAVE I/O (16-bit PCM and 32-bit IEEE float,
// mono or stereo). Sample rates are carried through untouched.
#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace sonotrack {

struct MonoAudio {
    std::vector<double> samples;
    int sample_rate = 0;

    std::size_t size() const { return samples.size(); }
    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }
    void validate() const;
};

struct BinauralAudio {
    std::vector<double> left;
    std::vector<double> right;
    int sample_rate = 0;

    std::size_t size() const { return left.size(); }
    double duration_s() const { return static_cast<double>(left.size()) / sample_rate; }
    void validate() const;
};

enum class SampleFormat { pcm16, float32 };

/// Decoded WAV: one vector per channel.
struct WavData {
    std::vector<std::vector<double>> channels;
    int sample_rate = 0;
    SampleFormat format = SampleFormat::float32;
};

WavData read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const std::vector<std::vector<double>>& channels,
               int sample_rate, SampleFormat format);

/// Mono file; multi-channel input is averaged across channels.
MonoAudio read_mono_wav(const std::filesystem::path& path);
BinauralAudio read_binaural_wav(const std::filesystem::path& path);
void write_mono_wav(const std::filesystem::path& path, const MonoAudio& audio,
                    SampleFormat format = SampleFormat::float32);
void write_binaural_wav(const std::filesystem::path& path, const BinauralAudio& audio,
                        SampleFormat format = SampleFormat::float32);

} // namespace sonotrack
