#pragma once

// Binary transport format (all integers big-endian):
//   magic "ZOPS" | version u8=1 | name block: u32 count, per name u16 len + UTF-8
// followed by records until EOF, each:
//   u64 timestamp-nanos | u16 tag-string len + "k1=v1,k2=v2" | N x f64 (IEEE-754)
// where N is the header's name count. One header block per stream.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "zerops/sample.hpp"

namespace zerops {

inline constexpr char kBinaryMagic[4] = {'Z', 'O', 'P', 'S'};
inline constexpr uint8_t kBinaryVersion = 1;

// Writes the header block on construction, then one record per write().
class BinaryWriter {
public:
    BinaryWriter(std::ostream& out, MetricHeader header);

    void write(const Sample& sample);
    uint64_t samples_written() const { return count_; }
    const MetricHeader& header() const { return header_; }

private:
    std::ostream& out_;
    MetricHeader header_;
    uint64_t count_ = 0;
};

// Incremental decoder; works for files, sockets, and pipes alike. Byte
// offsets in errors are absolute positions from the start of the stream.
class BinaryReader {
public:
    explicit BinaryReader(std::istream& in);

    const MetricHeader& header() const { return header_; }
    // Next sample, or nullopt at a clean end of stream (record boundary).
    std::optional<Sample> next();
    uint64_t offset() const { return offset_; }

private:
    std::string read_exact(size_t n, const char* what);

    std::istream& in_;
    MetricHeader header_;
    uint64_t offset_ = 0;
};

std::vector<uint8_t> encode_binary(const MetricHeader& header, std::span<const Sample> samples);
std::pair<MetricHeader, std::vector<Sample>> decode_binary(std::span<const uint8_t> bytes);

}  // namespace zerops
