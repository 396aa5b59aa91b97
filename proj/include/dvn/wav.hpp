#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dvn {

enum class WavEncoding { pcm16, pcm24, float32 };

struct AudioFile {
    double sample_rate = 48000.0;
    std::size_t channels = 1;
    std::vector<double> samples;  // interleaved, normalized to [-1, 1]
    WavEncoding source_encoding = WavEncoding::float32;

    std::size_t num_frames() const { return channels ? samples.size() / channels : 0; }
    std::vector<double> channel(std::size_t index) const;
};

AudioFile read_wav(const std::string& path);
void write_wav(const std::string& path, const AudioFile& audio, WavEncoding encoding);

}  // namespace dvn
