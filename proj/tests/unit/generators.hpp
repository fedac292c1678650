#pragma once

// Seeded random generators shared by the property tests.

#include <bit>
#include <cstdint>
#include <random>
#include <string>

#include "zerops/sample.hpp"

namespace testgen {

inline std::string random_name(std::mt19937_64& rng) {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789._";
    std::uniform_int_distribution<size_t> len(1, 12);
    std::uniform_int_distribution<size_t> pick(0, sizeof alphabet - 2);
    std::string s;
    const size_t n = len(rng);
    for (size_t i = 0; i < n; ++i) s += alphabet[pick(rng)];
    return s;
}

// Mixes ordinary values with special IEEE-754 bit patterns.
inline double random_value(std::mt19937_64& rng, bool finite_only = false) {
    std::uniform_int_distribution<int> kind(0, finite_only ? 3 : 7);
    std::normal_distribution<double> normal(0.0, 100.0);
    switch (kind(rng)) {
        case 4: return std::numeric_limits<double>::quiet_NaN();
        case 5: return -std::numeric_limits<double>::infinity();
        case 6: return std::bit_cast<double>(0x7ff8dead'beef0001ull);  // NaN payload
        case 7: return -0.0;
        case 0: return 0.0;
        default: return normal(rng);
    }
}

inline zerops::MetricHeader random_header(std::mt19937_64& rng, size_t max_metrics = 8) {
    zerops::MetricHeader header;
    std::uniform_int_distribution<size_t> count(0, max_metrics);
    const size_t n = count(rng);
    while (header.names.size() < n) {
        std::string name = random_name(rng);
        bool duplicate = false;
        for (const auto& existing : header.names) duplicate |= existing == name;
        if (!duplicate) header.names.push_back(std::move(name));
    }
    return header;
}

inline zerops::TagList random_tags(std::mt19937_64& rng) {
    zerops::TagList tags;
    std::uniform_int_distribution<size_t> count(0, 3);
    const size_t n = count(rng);
    while (tags.size() < n) {
        std::string key = random_name(rng);
        bool duplicate = false;
        for (const auto& [k, _] : tags) duplicate |= k == key;
        if (!duplicate) tags.emplace_back(std::move(key), random_name(rng));
    }
    return tags;
}

inline std::vector<zerops::Sample> random_samples(std::mt19937_64& rng,
                                                  const zerops::MetricHeader& header, size_t count,
                                                  bool finite_only = false) {
    std::vector<zerops::Sample> samples;
    uint64_t ts = 1'700'000'000ull * 1'000'000'000ull;
    std::uniform_int_distribution<uint64_t> advance(0, 2'000'000'000ull);
    for (size_t i = 0; i < count; ++i) {
        zerops::Sample s;
        ts += advance(rng);
        s.timestamp_ns = ts;
        s.tags = random_tags(rng);
        for (size_t m = 0; m < header.size(); ++m)
            s.values.push_back(random_value(rng, finite_only));
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace testgen
