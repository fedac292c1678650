#include "zerops/endpoints.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <streambuf>

#include "zerops/binary_codec.hpp"
#include "zerops/errors.hpp"

namespace zerops {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw TransportError(what + ": " + std::strerror(errno));
}

// Minimal stream buffer over a socket fd so both codecs work unchanged on TCP.
class FdStreamBuf final : public std::streambuf {
public:
    explicit FdStreamBuf(int fd) : fd_(fd) { setg(in_, in_, in_); }

    ~FdStreamBuf() override {
        sync();
        if (fd_ >= 0) ::close(fd_);
    }

    int fd() const { return fd_; }

protected:
    int underflow() override {
        if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
        ssize_t n;
        do {
            n = ::read(fd_, in_, sizeof in_);
        } while (n < 0 && errno == EINTR);
        if (n <= 0) return traits_type::eof();
        setg(in_, in_, in_ + n);
        return traits_type::to_int_type(*gptr());
    }

    int overflow(int_type ch) override {
        if (ch == traits_type::eof()) return sync() == 0 ? 0 : traits_type::eof();
        char c = traits_type::to_char_type(ch);
        return write_all(&c, 1) ? ch : traits_type::eof();
    }

    std::streamsize xsputn(const char* data, std::streamsize n) override {
        return write_all(data, static_cast<size_t>(n)) ? n : 0;
    }

    int sync() override { return 0; }

private:
    bool write_all(const char* data, size_t n) {
        while (n > 0) {
            ssize_t written = ::write(fd_, data, n);
            if (written < 0) {
                if (errno == EINTR) continue;
                return false;
            }
            data += written;
            n -= static_cast<size_t>(written);
        }
        return true;
    }

    int fd_;
    char in_[8192];
};

std::pair<std::string, uint16_t> split_host_port(const std::string& address) {
    size_t colon = address.rfind(':');
    std::string host = colon == std::string::npos ? "" : address.substr(0, colon);
    std::string port_str = colon == std::string::npos ? address : address.substr(colon + 1);
    if (host.empty()) host = "0.0.0.0";
    int port = 0;
    try {
        port = std::stoi(port_str);
    } catch (...) {
        throw TransportError("invalid port in address '" + address + "'");
    }
    if (port < 0 || port > 65535) throw TransportError("port out of range in '" + address + "'");
    return {host, static_cast<uint16_t>(port)};
}

int tcp_connect(const std::string& address) {
    auto [host, port] = split_host_port(address);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    std::string port_str = std::to_string(port);
    int rc = ::getaddrinfo(host.c_str(), port_str.c_str(), &hints, &result);
    if (rc != 0) throw TransportError("cannot resolve '" + host + "': " + gai_strerror(rc));
    int fd = -1;
    for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(result);
    if (fd < 0) throw TransportError("connection to " + address + " refused");
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

class FileSource final : public SampleSource {
public:
    explicit FileSource(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw TransportError("cannot open file source: " + path);
        reader_.emplace(in_);
    }

    const MetricHeader& header() override { return reader_->header(); }
    std::optional<Sample> next() override { return reader_->next(); }

private:
    std::ifstream in_;
    std::optional<BinaryReader> reader_;
};

class FileSink final : public SampleSink {
public:
    FileSink(const std::string& path, const MetricHeader& header)
        : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw TransportError("cannot open file sink: " + path);
        writer_.emplace(out_, header);
    }

    void write(const Sample& sample) override { writer_->write(sample); }

    void close() override {
        out_.flush();
        out_.close();
    }

private:
    std::ofstream out_;
    std::optional<BinaryWriter> writer_;
};

class SocketSource final : public SampleSource {
public:
    explicit SocketSource(int fd) : buf_(fd), in_(&buf_), reader_(in_) {}

    const MetricHeader& header() override { return reader_.header(); }
    std::optional<Sample> next() override { return reader_.next(); }

private:
    FdStreamBuf buf_;
    std::istream in_;
    BinaryReader reader_;
};

class SocketSink final : public SampleSink {
public:
    SocketSink(int fd, const MetricHeader& header) : buf_(fd), out_(&buf_), writer_(out_, header) {}

    void write(const Sample& sample) override {
        writer_.write(sample);
        if (!out_) throw TransportError("socket sink write failed");
    }

    void close() override { out_.flush(); }

private:
    FdStreamBuf buf_;
    std::ostream out_;
    BinaryWriter writer_;
};

class StdioSource final : public SampleSource {
public:
    StdioSource() : reader_(std::cin) {}
    const MetricHeader& header() override { return reader_.header(); }
    std::optional<Sample> next() override { return reader_.next(); }

private:
    BinaryReader reader_;
};

class StdioSink final : public SampleSink {
public:
    explicit StdioSink(const MetricHeader& header) : writer_(std::cout, header) {}
    void write(const Sample& sample) override { writer_.write(sample); }
    void close() override { std::cout.flush(); }

private:
    BinaryWriter writer_;
};

int listen_on(const std::string& address, uint16_t* bound_port) {
    auto [host, port] = split_host_port(address);
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket");
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        if (host == "localhost")
            ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
        else
            addr.sin_addr.s_addr = INADDR_ANY;
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(fd);
        throw_errno("bind " + address);
    }
    if (::listen(fd, 1) != 0) {
        ::close(fd);
        throw_errno("listen " + address);
    }
    sockaddr_in actual{};
    socklen_t len = sizeof actual;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&actual), &len);
    if (bound_port) *bound_port = ntohs(actual.sin_port);
    return fd;
}

int accept_one(int listen_fd) {
    int fd;
    do {
        fd = ::accept(listen_fd, nullptr, nullptr);
    } while (fd < 0 && errno == EINTR);
    if (fd < 0) throw_errno("accept");
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

}  // namespace

struct TcpListenSource::Impl {
    int listen_fd = -1;
    std::unique_ptr<SocketSource> source;

    ~Impl() {
        if (listen_fd >= 0) ::close(listen_fd);
    }

    SocketSource& connected() {
        if (!source) {
            int fd = accept_one(listen_fd);
            source = std::make_unique<SocketSource>(fd);
        }
        return *source;
    }
};

TcpListenSource::TcpListenSource(const std::string& address) : impl_(std::make_unique<Impl>()) {
    impl_->listen_fd = listen_on(address, &port_);
}

TcpListenSource::~TcpListenSource() = default;

const MetricHeader& TcpListenSource::header() { return impl_->connected().header(); }

std::optional<Sample> TcpListenSource::next() { return impl_->connected().next(); }

// Accepts one consumer connection on first write, then streams records to it.
struct TcpListenSink::Impl {
    int listen_fd = -1;
    std::unique_ptr<SocketSink> sink;

    ~Impl() {
        if (listen_fd >= 0) ::close(listen_fd);
    }
};

TcpListenSink::TcpListenSink(const std::string& address, MetricHeader header)
    : impl_(std::make_unique<Impl>()), header_(std::move(header)) {
    impl_->listen_fd = listen_on(address, &port_);
}

TcpListenSink::~TcpListenSink() = default;

void TcpListenSink::write(const Sample& sample) {
    if (!impl_->sink)
        impl_->sink = std::make_unique<SocketSink>(accept_one(impl_->listen_fd), header_);
    impl_->sink->write(sample);
}

void TcpListenSink::close() {
    if (impl_->sink) impl_->sink->close();
    if (impl_->listen_fd >= 0) {
        ::close(impl_->listen_fd);
        impl_->listen_fd = -1;
    }
}

StreamEndpoint StreamEndpoint::parse(const std::string& text) {
    StreamEndpoint ep;
    if (text == "stdio" || text == "-") {
        ep.kind = Kind::stdio;
        return ep;
    }
    if (text.rfind("file:", 0) == 0) {
        ep.kind = Kind::file;
        ep.address = text.substr(5);
    } else if (text.rfind("tcp-listen:", 0) == 0) {
        ep.kind = Kind::tcp_listen;
        ep.address = text.substr(11);
    } else if (text.rfind("tcp-connect:", 0) == 0) {
        ep.kind = Kind::tcp_connect;
        ep.address = text.substr(12);
    } else {
        ep.kind = Kind::file;
        ep.address = text;
    }
    if (ep.kind != Kind::stdio && ep.address.empty())
        throw TransportError("endpoint '" + text + "' has an empty address");
    if (ep.kind == Kind::tcp_listen || ep.kind == Kind::tcp_connect)
        split_host_port(ep.address);  // validates
    return ep;
}

std::string StreamEndpoint::to_string() const {
    switch (kind) {
        case Kind::file: return "file:" + address;
        case Kind::tcp_listen: return "tcp-listen:" + address;
        case Kind::tcp_connect: return "tcp-connect:" + address;
        case Kind::stdio: return "stdio";
    }
    return {};
}

std::unique_ptr<SampleSource> open_source(const StreamEndpoint& endpoint) {
    switch (endpoint.kind) {
        case StreamEndpoint::Kind::file: return std::make_unique<FileSource>(endpoint.address);
        case StreamEndpoint::Kind::tcp_listen:
            return std::make_unique<TcpListenSource>(endpoint.address);
        case StreamEndpoint::Kind::tcp_connect:
            return std::make_unique<SocketSource>(tcp_connect(endpoint.address));
        case StreamEndpoint::Kind::stdio: return std::make_unique<StdioSource>();
    }
    throw TransportError("unknown endpoint kind");
}

std::unique_ptr<SampleSink> open_sink(const StreamEndpoint& endpoint, const MetricHeader& header) {
    switch (endpoint.kind) {
        case StreamEndpoint::Kind::file:
            return std::make_unique<FileSink>(endpoint.address, header);
        case StreamEndpoint::Kind::tcp_listen:
            return std::make_unique<TcpListenSink>(endpoint.address, header);
        case StreamEndpoint::Kind::tcp_connect:
            return std::make_unique<SocketSink>(tcp_connect(endpoint.address), header);
        case StreamEndpoint::Kind::stdio: return std::make_unique<StdioSink>(header);
    }
    throw TransportError("unknown endpoint kind");
}

}  // namespace zerops
