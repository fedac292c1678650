#include "zerops/sample.hpp"

#include <unordered_set>

#include "zerops/errors.hpp"

namespace zerops {

void validate_header(const MetricHeader& header) {
    std::unordered_set<std::string> seen;
    for (const auto& name : header.names) {
        if (name.empty()) throw CodecError("metric name must not be empty");
        if (!seen.insert(name).second) throw CodecError("duplicate metric name: " + name);
    }
}

namespace {

bool forbidden_in_key(char c) {
    return c == '=' || c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool forbidden_in_value(char c) {
    return c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

}  // namespace

void validate_tags(const TagList& tags) {
    std::unordered_set<std::string> seen;
    for (const auto& [key, value] : tags) {
        if (key.empty()) throw CodecError("tag key must not be empty");
        if (!seen.insert(key).second) throw CodecError("duplicate tag key: " + key);
        for (char c : key)
            if (forbidden_in_key(c))
                throw CodecError("tag key '" + key + "' contains forbidden character");
        for (char c : value)
            if (forbidden_in_value(c))
                throw CodecError("tag value for '" + key + "' contains forbidden character");
    }
}

std::string format_tags(const TagList& tags) {
    std::string out;
    for (const auto& [key, value] : tags) {
        if (!out.empty()) out += ',';
        out += key;
        out += '=';
        out += value;
    }
    return out;
}

TagList parse_tags(const std::string& joined) {
    TagList tags;
    if (joined.empty()) return tags;
    size_t start = 0;
    while (start <= joined.size()) {
        size_t end = joined.find(',', start);
        if (end == std::string::npos) end = joined.size();
        std::string pair = joined.substr(start, end - start);
        size_t eq = pair.find('=');
        if (eq == std::string::npos) throw CodecError("malformed tag pair: '" + pair + "'");
        tags.emplace_back(pair.substr(0, eq), pair.substr(eq + 1));
        if (end == joined.size()) break;
        start = end + 1;
    }
    validate_tags(tags);
    return tags;
}

std::string component_id(const Sample& sample) {
    for (const auto& [key, value] : sample.tags)
        if (key == "component") return value;
    for (const auto& [key, value] : sample.tags)
        if (key == "host") return value;
    if (!sample.tags.empty()) return format_tags(sample.tags);
    return "unknown";
}

}  // namespace zerops
