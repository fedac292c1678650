#pragma once

// Serialized detector model container:
//   magic "ZMDL" | format version u8=1 | detector-type tag u8 |
//   version u32 (big-endian, assigned by the repository) | payload |
//   trailing CRC32 (big-endian) over all preceding bytes.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace zerops {

inline constexpr char kModelMagic[4] = {'Z', 'M', 'D', 'L'};
inline constexpr uint8_t kModelFormatVersion = 1;

enum class DetectorKind : uint8_t { birch = 1, arima = 2, rnn = 3 };

const char* to_string(DetectorKind kind);
DetectorKind detector_kind_from_string(const std::string& name);

struct ModelBlob {
    DetectorKind detector_type = DetectorKind::birch;
    uint32_t version = 0;  // 0 until assigned by the repository
    std::vector<uint8_t> payload;

    std::vector<uint8_t> encode() const;
    // Verifies magic, format version, and CRC; throws RepoError otherwise.
    static ModelBlob decode(std::span<const uint8_t> bytes);
};

uint32_t crc32_of(std::span<const uint8_t> bytes);

}  // namespace zerops
