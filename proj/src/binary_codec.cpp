#include "zerops/binary_codec.hpp"

#include <cstring>
#include <limits>
#include <sstream>

#include "zerops/errors.hpp"
#include "zerops/wire.hpp"

namespace zerops {

namespace {

void append_header_block(std::vector<uint8_t>& out, const MetricHeader& header) {
    wire::put_bytes(out, std::string_view(kBinaryMagic, 4));
    wire::put_u8(out, kBinaryVersion);
    wire::put_u32(out, static_cast<uint32_t>(header.names.size()));
    for (const auto& name : header.names) {
        if (name.size() > std::numeric_limits<uint16_t>::max())
            throw CodecError("metric name longer than 65535 bytes: " + name.substr(0, 32));
        wire::put_u16(out, static_cast<uint16_t>(name.size()));
        wire::put_bytes(out, name);
    }
}

void append_record(std::vector<uint8_t>& out, const Sample& sample, size_t dim,
                   size_t sample_index) {
    if (sample.values.size() != dim)
        throw CodecError("sample " + std::to_string(sample_index) + " has " +
                         std::to_string(sample.values.size()) + " values, header expects " +
                         std::to_string(dim));
    validate_tags(sample.tags);
    wire::put_u64(out, sample.timestamp_ns);
    std::string tags = format_tags(sample.tags);
    if (tags.size() > std::numeric_limits<uint16_t>::max())
        throw CodecError("tag string longer than 65535 bytes at sample " +
                         std::to_string(sample_index));
    wire::put_u16(out, static_cast<uint16_t>(tags.size()));
    wire::put_bytes(out, tags);
    for (double v : sample.values) wire::put_f64(out, v);
}

}  // namespace

BinaryWriter::BinaryWriter(std::ostream& out, MetricHeader header)
    : out_(out), header_(std::move(header)) {
    validate_header(header_);
    std::vector<uint8_t> buf;
    append_header_block(buf, header_);
    out_.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out_) throw TransportError("failed to write stream header");
}

void BinaryWriter::write(const Sample& sample) {
    std::vector<uint8_t> buf;
    append_record(buf, sample, header_.size(), count_);
    out_.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out_) throw TransportError("failed to write sample record");
    ++count_;
}

BinaryReader::BinaryReader(std::istream& in) : in_(in) {
    std::string magic = read_exact(4, "magic");
    if (std::memcmp(magic.data(), kBinaryMagic, 4) != 0)
        throw CodecError("bad magic: expected \"ZOPS\"", 0);
    std::string version = read_exact(1, "format version");
    if (static_cast<uint8_t>(version[0]) != kBinaryVersion)
        throw CodecError("unsupported format version " +
                             std::to_string(static_cast<uint8_t>(version[0])),
                         4);
    std::string count_bytes = read_exact(4, "name count");
    uint32_t count = 0;
    for (char c : count_bytes) count = count << 8 | static_cast<uint8_t>(c);
    header_.names.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        std::string len_bytes = read_exact(2, "name length");
        uint16_t len = static_cast<uint16_t>(static_cast<uint8_t>(len_bytes[0]) << 8 |
                                             static_cast<uint8_t>(len_bytes[1]));
        header_.names.push_back(read_exact(len, "name bytes"));
    }
    validate_header(header_);
}

std::string BinaryReader::read_exact(size_t n, const char* what) {
    std::string buf(n, '\0');
    in_.read(buf.data(), static_cast<std::streamsize>(n));
    size_t got = static_cast<size_t>(in_.gcount());
    if (got != n)
        throw CodecError("truncated stream while reading " + std::string(what) + " at offset " +
                             std::to_string(offset_),
                         offset_);
    offset_ += n;
    return buf;
}

std::optional<Sample> BinaryReader::next() {
    // A record boundary is the only legal place for the stream to end.
    in_.peek();
    if (in_.eof()) return std::nullopt;

    Sample sample;
    std::string ts = read_exact(8, "timestamp");
    uint64_t t = 0;
    for (char c : ts) t = t << 8 | static_cast<uint8_t>(c);
    sample.timestamp_ns = t;

    uint64_t tag_field = offset_;
    std::string len_bytes = read_exact(2, "tag length");
    uint16_t tag_len = static_cast<uint16_t>(static_cast<uint8_t>(len_bytes[0]) << 8 |
                                             static_cast<uint8_t>(len_bytes[1]));
    std::string tag_str = read_exact(tag_len, "tag string");
    try {
        sample.tags = parse_tags(tag_str);
    } catch (const CodecError& e) {
        throw CodecError(std::string(e.what()) + " at offset " + std::to_string(tag_field),
                         tag_field);
    }

    sample.values.resize(header_.size());
    for (size_t i = 0; i < header_.size(); ++i) {
        std::string bits = read_exact(8, "metric value");
        uint64_t u = 0;
        for (char c : bits) u = u << 8 | static_cast<uint8_t>(c);
        sample.values[i] = std::bit_cast<double>(u);
    }
    return sample;
}

std::vector<uint8_t> encode_binary(const MetricHeader& header, std::span<const Sample> samples) {
    validate_header(header);
    std::vector<uint8_t> out;
    append_header_block(out, header);
    for (size_t i = 0; i < samples.size(); ++i) append_record(out, samples[i], header.size(), i);
    return out;
}

std::pair<MetricHeader, std::vector<Sample>> decode_binary(std::span<const uint8_t> bytes) {
    std::istringstream in(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    BinaryReader reader(in);
    std::vector<Sample> samples;
    while (auto s = reader.next()) samples.push_back(std::move(*s));
    return {reader.header(), std::move(samples)};
}

}  // namespace zerops
