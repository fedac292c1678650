#pragma once

// Stream endpoints carrying the binary transport format: files, TCP sockets
// (one header block per connection), and stdio. One producer and one consumer
// per stream; handles may move between threads but are not shareable.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "zerops/sample.hpp"

namespace zerops {

struct StreamEndpoint {
    enum class Kind { file, tcp_listen, tcp_connect, stdio };

    Kind kind = Kind::file;
    std::string address;  // path for file, "host:port" for tcp, empty for stdio

    // Parses "file:PATH", "tcp-listen:HOST:PORT", "tcp-connect:HOST:PORT",
    // "stdio". A bare path with no scheme is treated as a file.
    static StreamEndpoint parse(const std::string& text);
    std::string to_string() const;
};

class SampleSource {
public:
    virtual ~SampleSource() = default;
    virtual const MetricHeader& header() = 0;
    virtual std::optional<Sample> next() = 0;
};

class SampleSink {
public:
    virtual ~SampleSink() = default;
    virtual void write(const Sample& sample) = 0;
    virtual void close() = 0;
};

std::unique_ptr<SampleSource> open_source(const StreamEndpoint& endpoint);
std::unique_ptr<SampleSink> open_sink(const StreamEndpoint& endpoint, const MetricHeader& header);

// Listening endpoints exposed concretely so callers can bind port 0 and
// discover the chosen port before the peer connects.
class TcpListenSource final : public SampleSource {
public:
    explicit TcpListenSource(const std::string& address);
    ~TcpListenSource() override;

    uint16_t port() const { return port_; }
    const MetricHeader& header() override;
    std::optional<Sample> next() override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    uint16_t port_ = 0;
};

class TcpListenSink final : public SampleSink {
public:
    TcpListenSink(const std::string& address, MetricHeader header);
    ~TcpListenSink() override;

    uint16_t port() const { return port_; }
    void write(const Sample& sample) override;
    void close() override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    MetricHeader header_;
    uint16_t port_ = 0;
};

}  // namespace zerops
