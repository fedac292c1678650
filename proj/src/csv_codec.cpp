#include "zerops/csv_codec.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <string_view>

#include "zerops/errors.hpp"

namespace zerops {

namespace {

constexpr uint64_t kNsPerSec = 1'000'000'000ull;

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string format_csv_tags(const TagList& tags) {
    std::string out;
    for (const auto& [key, value] : tags) {
        if (!out.empty()) out += ' ';
        out += key;
        out += '=';
        out += value;
    }
    return out;
}

TagList parse_csv_tags(const std::string& field, uint64_t line_no) {
    TagList tags;
    if (field.empty()) return tags;
    size_t start = 0;
    while (start < field.size()) {
        size_t end = field.find(' ', start);
        if (end == std::string::npos) end = field.size();
        std::string pair = field.substr(start, end - start);
        size_t eq = pair.find('=');
        if (eq == std::string::npos)
            throw CodecError("malformed tag pair '" + pair + "'", CodecError::npos, line_no);
        tags.emplace_back(pair.substr(0, eq), pair.substr(eq + 1));
        start = end + 1;
    }
    validate_tags(tags);
    return tags;
}

}  // namespace

std::string format_rfc3339_ns(uint64_t epoch_ns) {
    time_t secs = static_cast<time_t>(epoch_ns / kNsPerSec);
    uint64_t nanos = epoch_ns % kNsPerSec;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%09" PRIu64 "Z",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  nanos);
    return buf;
}

uint64_t parse_rfc3339_ns(const std::string& text) {
    std::tm tm{};
    unsigned long nanos = 0;
    char zone = '\0';
    int consumed = 0;
    int n = std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%9lu%c%n", &tm.tm_year, &tm.tm_mon,
                        &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &nanos, &zone, &consumed);
    if (n != 8 || zone != 'Z' || consumed != static_cast<int>(text.size()))
        throw CodecError("unparsable RFC3339 timestamp: '" + text + "'");
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    time_t secs = timegm(&tm);
    if (secs < 0) throw CodecError("timestamp before epoch: '" + text + "'");
    return static_cast<uint64_t>(secs) * kNsPerSec + nanos;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw CodecError("failed to format double");
    return std::string(buf, ptr);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw CodecError("unparsable float: '" + text + "'");
    return v;
}

void encode_csv(const MetricHeader& header, std::span<const Sample> samples, std::ostream& out) {
    validate_header(header);
    for (const auto& name : header.names)
        for (char c : name)
            if (c == ',' || c == '\n' || c == '\r')
                throw CodecError("metric name '" + name + "' not representable in CSV");
    out << "time,tags";
    for (const auto& name : header.names) out << ',' << name;
    out << '\n';
    for (size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        if (s.values.size() != header.size())
            throw CodecError("sample " + std::to_string(i) + " has " +
                             std::to_string(s.values.size()) + " values, header expects " +
                             std::to_string(header.size()));
        validate_tags(s.tags);
        out << format_rfc3339_ns(s.timestamp_ns) << ',' << format_csv_tags(s.tags);
        for (double v : s.values) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw TransportError("failed to write CSV stream");
}

std::pair<MetricHeader, std::vector<Sample>> decode_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CodecError("empty CSV input, missing header row", 0, 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_fields(line);
    if (fields.size() < 2 || fields[0] != "time" || fields[1] != "tags")
        throw CodecError("CSV header must start with \"time,tags\"", CodecError::npos, 1);

    MetricHeader header;
    header.names.assign(fields.begin() + 2, fields.end());
    validate_header(header);

    std::vector<Sample> samples;
    uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto row = split_fields(line);
        if (row.size() != 2 + header.size())
            throw CodecError("ragged row: expected " + std::to_string(2 + header.size()) +
                                 " fields, found " + std::to_string(row.size()),
                             CodecError::npos, line_no);
        Sample s;
        try {
            s.timestamp_ns = parse_rfc3339_ns(row[0]);
            s.tags = parse_csv_tags(row[1], line_no);
            s.values.reserve(header.size());
            for (size_t i = 0; i < header.size(); ++i) s.values.push_back(parse_double(row[2 + i]));
        } catch (const CodecError& e) {
            throw CodecError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")",
                             CodecError::npos, line_no);
        }
        samples.push_back(std::move(s));
    }
    return {std::move(header), std::move(samples)};
}

}  // namespace zerops
