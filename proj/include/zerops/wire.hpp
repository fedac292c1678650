#pragma once

// Big-endian fixed-width primitives shared by the sample transport format,
// model blobs, and detector state serialization.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zerops/errors.hpp"

namespace zerops::wire {

inline void put_u8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8)
        out.push_back(static_cast<uint8_t>(v >> shift));
}

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
        out.push_back(static_cast<uint8_t>(v >> shift));
}

inline void put_f64(std::vector<uint8_t>& out, double v) {
    put_u64(out, std::bit_cast<uint64_t>(v));
}

inline void put_bytes(std::vector<uint8_t>& out, std::string_view s) {
    out.insert(out.end(), s.begin(), s.end());
}

// Bounds-checked sequential reader over a byte span. Throws CodecError with
// the absolute byte offset of the first missing byte on truncation.
class Reader {
public:
    explicit Reader(std::span<const uint8_t> data) : data_(data) {}

    uint64_t offset() const { return pos_; }
    size_t remaining() const { return data_.size() - pos_; }
    bool at_end() const { return pos_ == data_.size(); }

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_ + i];
        pos_ += 4;
        return v;
    }

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | data_[pos_ + i];
        pos_ += 8;
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::string bytes(size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }

private:
    void need(size_t n) const {
        if (data_.size() - pos_ < n)
            throw CodecError("truncated input: need " + std::to_string(n) + " byte(s) at offset " +
                                 std::to_string(pos_),
                             pos_);
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

}  // namespace zerops::wire
