#pragma once

// Human-inspectable CSV interchange. First row "time,tags,<name1>,...,<nameN>";
// timestamps RFC3339 with nanoseconds ("2020-01-01T00:00:00.000000000Z");
// floats as shortest round-trip decimals; the tags field holds space-separated
// k=v pairs (tag values cannot contain spaces or commas).

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zerops/sample.hpp"

namespace zerops {

std::string format_rfc3339_ns(uint64_t epoch_ns);
uint64_t parse_rfc3339_ns(const std::string& text);

// Shortest decimal that round-trips the exact double (std::to_chars).
std::string format_double(double v);
double parse_double(const std::string& text);

void encode_csv(const MetricHeader& header, std::span<const Sample> samples, std::ostream& out);
std::pair<MetricHeader, std::vector<Sample>> decode_csv(std::istream& in);

}  // namespace zerops
