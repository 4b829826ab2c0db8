#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace minetrace::pool {

/// Blocking TCP stream exchanging newline-terminated messages.
/// Failures raise ConnectFailure.
class LineSocket {
public:
    LineSocket() = default;
    explicit LineSocket(int fd) : fd_(fd) {}
    ~LineSocket();
    LineSocket(LineSocket&& other) noexcept;
    LineSocket& operator=(LineSocket&& other) noexcept;
    LineSocket(const LineSocket&) = delete;
    LineSocket& operator=(const LineSocket&) = delete;

    static LineSocket connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout);

    /// Appends '\n'.
    void send_line(std::string_view line);

    /// Next line without its terminator, or nullopt once the deadline has
    /// passed. Throws ConnectFailure when the peer closes or on I/O errors.
    std::optional<std::string> read_line(std::chrono::steady_clock::time_point deadline);

    /// Wakes a reader blocked in read_line on another thread.
    void shutdown() noexcept;
    void close() noexcept;
    bool is_open() const noexcept { return fd_ >= 0; }

private:
    int fd_ = -1;
    std::string buffer_;
};

class TcpListener {
public:
    /// Port 0 picks a free port.
    TcpListener(const std::string& host, std::uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const noexcept { return port_; }

    /// Nullopt on timeout or after shutdown().
    std::optional<LineSocket> accept(std::chrono::milliseconds timeout);
    void shutdown() noexcept;

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

}  // namespace minetrace::pool
