#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace zerops {

// Ordered, unique list of metric names. Fixed for a stream's lifetime; the
// name count is the value dimension of every sample on the stream.
struct MetricHeader {
    std::vector<std::string> names;

    size_t size() const { return names.size(); }
    bool operator==(const MetricHeader&) const = default;
};

using TagList = std::vector<std::pair<std::string, std::string>>;

// One timestamped vector of metric values plus string tags. Tag order is
// significant; keys are unique. Value equality is on IEEE-754 bit patterns,
// so NaN payloads and -0.0 compare exactly.
struct Sample {
    uint64_t timestamp_ns = 0;
    TagList tags;
    std::vector<double> values;

    bool operator==(const Sample& other) const {
        if (timestamp_ns != other.timestamp_ns || tags != other.tags ||
            values.size() != other.values.size())
            return false;
        for (size_t i = 0; i < values.size(); ++i)
            if (std::bit_cast<uint64_t>(values[i]) != std::bit_cast<uint64_t>(other.values[i]))
                return false;
        return true;
    }
};

// Validates header invariants: names present, non-empty, unique.
void validate_header(const MetricHeader& header);

// Validates tag invariants for transport: unique keys; keys without
// '=', ',', whitespace; values without ',', whitespace. The restriction keeps
// both the joined binary tag string and the CSV tags field unambiguous.
void validate_tags(const TagList& tags);

// "k1=v1,k2=v2" <-> tag list (binary transport form). Empty string for no tags.
std::string format_tags(const TagList& tags);
TagList parse_tags(const std::string& joined);

// Component identity for a sample: the "component" tag if present, else the
// "host" tag, else the full joined tag string, else "unknown".
std::string component_id(const Sample& sample);

}  // namespace zerops
