#include "zerops/model_blob.hpp"

#include <zlib.h>

#include <cstring>

#include "zerops/errors.hpp"
#include "zerops/wire.hpp"

namespace zerops {

const char* to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::birch: return "birch";
        case DetectorKind::arima: return "arima";
        case DetectorKind::rnn: return "rnn";
    }
    return "unknown";
}

DetectorKind detector_kind_from_string(const std::string& name) {
    if (name == "birch") return DetectorKind::birch;
    if (name == "arima") return DetectorKind::arima;
    if (name == "rnn" || name == "lstm") return DetectorKind::rnn;
    throw ConfigError("unknown detector type: '" + name + "'");
}

uint32_t crc32_of(std::span<const uint8_t> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
    return static_cast<uint32_t>(crc);
}

std::vector<uint8_t> ModelBlob::encode() const {
    std::vector<uint8_t> out;
    out.reserve(payload.size() + 14);
    wire::put_bytes(out, std::string_view(kModelMagic, 4));
    wire::put_u8(out, kModelFormatVersion);
    wire::put_u8(out, static_cast<uint8_t>(detector_type));
    wire::put_u32(out, version);
    out.insert(out.end(), payload.begin(), payload.end());
    wire::put_u32(out, crc32_of(out));
    return out;
}

ModelBlob ModelBlob::decode(std::span<const uint8_t> bytes) {
    if (bytes.size() < 14) throw RepoError("model blob too short to be valid");
    const uint32_t stored_crc = (static_cast<uint32_t>(bytes[bytes.size() - 4]) << 24) |
                                (static_cast<uint32_t>(bytes[bytes.size() - 3]) << 16) |
                                (static_cast<uint32_t>(bytes[bytes.size() - 2]) << 8) |
                                static_cast<uint32_t>(bytes[bytes.size() - 1]);
    const auto body = bytes.subspan(0, bytes.size() - 4);
    if (crc32_of(body) != stored_crc) throw RepoError("model blob CRC mismatch");

    wire::Reader reader(body);
    const std::string magic = reader.bytes(4);
    if (std::memcmp(magic.data(), kModelMagic, 4) != 0)
        throw RepoError("model blob has bad magic, expected \"ZMDL\"");
    const uint8_t format = reader.u8();
    if (format != kModelFormatVersion)
        throw RepoError("unsupported model blob format version " + std::to_string(format));
    ModelBlob blob;
    const uint8_t tag = reader.u8();
    if (tag < 1 || tag > 3) throw RepoError("unknown detector type tag " + std::to_string(tag));
    blob.detector_type = static_cast<DetectorKind>(tag);
    blob.version = reader.u32();
    blob.payload.assign(body.begin() + static_cast<ptrdiff_t>(reader.offset()), body.end());
    return blob;
}

}  // namespace zerops
