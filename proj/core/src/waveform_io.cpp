#include "comblink/waveform_io.hpp"

#include <cstring>
#include <fstream>

namespace comblink {

namespace {

constexpr char kMagic[8] = {'C', 'L', 'W', 'A', 'V', 'E', '0', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 64;

struct Header {
    char magic[8];
    std::uint32_t version;
    std::uint32_t pol_count;
    std::uint64_t sample_count;
    double sample_rate;
    double t0;
};
static_assert(sizeof(Header) <= kHeaderSize);

[[noreturn]] void truncated(const std::string& path, std::size_t offset) {
    throw parse_error("waveform file '" + path + "' truncated at byte offset " +
                      std::to_string(offset));
}

}  // namespace

void export_waveform(const Frame& frame, const std::string& path) {
    frame.check();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw parse_error("cannot open '" + path + "' for writing");

    char hdr[kHeaderSize] = {};
    Header h{};
    std::memcpy(h.magic, kMagic, 8);
    h.version = kVersion;
    h.pol_count = static_cast<std::uint32_t>(frame.pol_count());
    h.sample_count = frame.size();
    h.sample_rate = frame.sample_rate;
    h.t0 = frame.t0;
    std::memcpy(hdr, &h, sizeof(h));
    f.write(hdr, kHeaderSize);

    std::vector<float> buf(frame.size() * 2);
    for (int p = 0; p < frame.pol_count(); ++p) {
        const auto& v = frame.pol(p);
        for (std::size_t i = 0; i < v.size(); ++i) {
            buf[2 * i] = static_cast<float>(v[i].real());
            buf[2 * i + 1] = static_cast<float>(v[i].imag());
        }
        f.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
    if (!f) throw parse_error("write failed for '" + path + "'");
}

Frame import_waveform(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw parse_error("cannot open '" + path + "'");

    char hdr[kHeaderSize];
    f.read(hdr, kHeaderSize);
    if (f.gcount() != static_cast<std::streamsize>(kHeaderSize))
        truncated(path, static_cast<std::size_t>(f.gcount()));
    Header h{};
    std::memcpy(&h, hdr, sizeof(h));
    if (std::memcmp(h.magic, kMagic, 8) != 0)
        throw parse_error("waveform file '" + path + "': bad magic");
    if (h.version != kVersion)
        throw parse_error("waveform file '" + path + "': unsupported version " +
                          std::to_string(h.version));
    if (h.pol_count != 1 && h.pol_count != 2)
        throw parse_error("waveform file '" + path + "': bad polarization count");

    Frame frame;
    frame.sample_rate = h.sample_rate;
    frame.t0 = h.t0;
    std::vector<float> buf(h.sample_count * 2);
    for (std::uint32_t p = 0; p < h.pol_count; ++p) {
        const std::size_t bytes = buf.size() * sizeof(float);
        f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
        if (f.gcount() != static_cast<std::streamsize>(bytes))
            truncated(path, kHeaderSize + p * bytes + static_cast<std::size_t>(f.gcount()));
        auto& v = frame.pol(static_cast<int>(p));
        v.resize(h.sample_count);
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = cplx(buf[2 * i], buf[2 * i + 1]);
    }
    frame.check();
    return frame;
}

}  // namespace comblink
