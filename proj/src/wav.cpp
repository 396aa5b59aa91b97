#include "dvn/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dvn/errors.hpp"

namespace dvn {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(x & 0xFF);
    v.push_back((x >> 8) & 0xFF);
    v.push_back((x >> 16) & 0xFF);
    v.push_back((x >> 24) & 0xFF);
}

void put_u16(std::vector<unsigned char>& v, std::uint16_t x) {
    v.push_back(x & 0xFF);
    v.push_back((x >> 8) & 0xFF);
}

void put_tag(std::vector<unsigned char>& v, const char* tag) {
    v.insert(v.end(), tag, tag + 4);
}

}  // namespace

std::vector<double> AudioFile::channel(std::size_t index) const {
    if (index >= channels) throw std::invalid_argument("AudioFile::channel: index out of range");
    std::vector<double> out(num_frames());
    for (std::size_t f = 0; f < out.size(); ++f) out[f] = samples[f * channels + index];
    return out;
}

AudioFile read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("read_wav: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw io_error("read_wav: malformed RIFF/WAVE header in " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    bool have_fmt = false;
    std::size_t data_offset = 0, data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        std::uint32_t size = read_u32(chunk + 4);
        std::size_t body = pos + 8;
        if (body + size > bytes.size()) {
            if (std::memcmp(chunk, "data", 4) == 0)
                throw io_error("read_wav: truncated data chunk in " + path);
            break;
        }
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16) throw io_error("read_wav: short fmt chunk in " + path);
            format = read_u16(chunk + 8);
            channels = read_u16(chunk + 10);
            sample_rate = read_u32(chunk + 12);
            bits = read_u16(chunk + 22);
            if (format == kFormatExtensible && size >= 40)
                format = read_u16(chunk + 32);  // first two bytes of the sub-format GUID
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data_offset = body;
            data_size = size;
        }
        pos = body + size + (size & 1);
    }
    if (!have_fmt || data_offset == 0)
        throw io_error("read_wav: missing fmt or data chunk in " + path);
    if (channels == 0 || sample_rate == 0)
        throw io_error("read_wav: invalid fmt chunk in " + path);

    AudioFile audio;
    audio.sample_rate = sample_rate;
    audio.channels = channels;

    const unsigned char* d = bytes.data() + data_offset;
    if (format == kFormatPcm && bits == 16) {
        audio.source_encoding = WavEncoding::pcm16;
        std::size_t count = data_size / 2;
        audio.samples.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            auto v = static_cast<std::int16_t>(read_u16(d + 2 * i));
            audio.samples[i] = static_cast<double>(v) / 32768.0;
        }
    } else if (format == kFormatPcm && bits == 24) {
        audio.source_encoding = WavEncoding::pcm24;
        std::size_t count = data_size / 3;
        audio.samples.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            const unsigned char* p = d + 3 * i;
            std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
            if (v & 0x800000) v |= ~0xFFFFFF;
            audio.samples[i] = static_cast<double>(v) / 8388608.0;
        }
    } else if (format == kFormatFloat && bits == 32) {
        audio.source_encoding = WavEncoding::float32;
        std::size_t count = data_size / 4;
        audio.samples.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t u = read_u32(d + 4 * i);
            float f;
            std::memcpy(&f, &u, 4);
            audio.samples[i] = f;
        }
    } else {
        throw io_error("read_wav: unsupported codec (format " + std::to_string(format) + ", " +
                       std::to_string(bits) + " bits) in " + path);
    }
    return audio;
}

void write_wav(const std::string& path, const AudioFile& audio, WavEncoding encoding) {
    std::size_t bytes_per_sample = encoding == WavEncoding::pcm16   ? 2
                                   : encoding == WavEncoding::pcm24 ? 3
                                                                    : 4;
    std::uint16_t format = encoding == WavEncoding::float32 ? kFormatFloat : kFormatPcm;
    std::uint32_t data_size = static_cast<std::uint32_t>(audio.samples.size() * bytes_per_sample);

    std::vector<unsigned char> out;
    out.reserve(44 + data_size);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_size);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, format);
    put_u16(out, static_cast<std::uint16_t>(audio.channels));
    put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
    std::uint32_t byte_rate = static_cast<std::uint32_t>(
        audio.sample_rate * static_cast<double>(audio.channels * bytes_per_sample));
    put_u32(out, byte_rate);
    put_u16(out, static_cast<std::uint16_t>(audio.channels * bytes_per_sample));
    put_u16(out, static_cast<std::uint16_t>(bytes_per_sample * 8));
    put_tag(out, "data");
    put_u32(out, data_size);

    for (double s : audio.samples) {
        double clamped = std::clamp(s, -1.0, 1.0);
        if (encoding == WavEncoding::pcm16) {
            auto q = static_cast<std::int32_t>(
                std::clamp<long>(std::lround(clamped * 32768.0), -32768, 32767));
            put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
        } else if (encoding == WavEncoding::pcm24) {
            auto q = static_cast<std::int32_t>(
                std::clamp<long long>(std::llround(clamped * 8388608.0), -8388608, 8388607));
            out.push_back(q & 0xFF);
            out.push_back((q >> 8) & 0xFF);
            out.push_back((q >> 16) & 0xFF);
        } else {
            auto f = static_cast<float>(s);
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            put_u32(out, u);
        }
    }

    std::ofstream file(path, std::ios::binary);
    if (!file) throw io_error("write_wav: cannot open " + path);
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!file) throw io_error("write_wav: write failed for " + path);
}

}  // namespace dvn
