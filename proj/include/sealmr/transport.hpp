#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "sealmr/common.hpp"

namespace sealmr::transport {

struct ConnClosed : std::runtime_error {
    explicit ConnClosed(const std::string &what) : std::runtime_error(what) {}
};

/// Observer invoked with every frame body as it is written to a socket.
/// Test and bench hook for wire captures; not part of the protocol.
void set_frame_tap(std::function<void(const Bytes &)> tap);
void clear_frame_tap();

/// Stream connection carrying length-prefixed frames
/// ([4-byte BE body length][body]). Writes are buffered until flush().
class Conn {
  public:
    explicit Conn(int fd);
    static Conn connect(const std::string &host, uint16_t port);  // throws RouterUnreachable
    ~Conn();
    Conn(Conn &&other) noexcept;
    Conn &operator=(Conn &&other) noexcept;
    Conn(const Conn &) = delete;
    Conn &operator=(const Conn &) = delete;

    void write_frame(const Bytes &body);  // buffered
    void flush();                         // throws ConnClosed on broken peer

    Bytes read_frame();  // blocking; throws ConnClosed on EOF
    std::optional<Bytes> read_frame_timeout(int timeout_ms);  // nullopt on timeout

    /// Non-blocking path for poll loops: fill() drains the socket into the rx
    /// buffer (returns false once the peer closed), try_pop_frame() yields
    /// complete frames.
    void set_nonblocking();
    bool fill();
    std::optional<Bytes> try_pop_frame();
    bool has_buffered_output() const { return !out_.empty(); }

    int fd() const { return fd_; }
    void shutdown_both();  // wakes a blocked reader on another thread
    uint64_t tx_bytes() const { return tx_bytes_; }
    uint64_t rx_bytes() const { return rx_bytes_; }

  private:
    void read_exact(uint8_t *dst, size_t n);

    int fd_ = -1;
    Bytes out_;
    Bytes in_;
    size_t in_pos_ = 0;
    uint64_t tx_bytes_ = 0;
    uint64_t rx_bytes_ = 0;
};

class Listener {
  public:
    Listener(const std::string &host, uint16_t port);  // port 0 picks a free one
    ~Listener();
    Listener(const Listener &) = delete;
    Listener &operator=(const Listener &) = delete;

    uint16_t port() const { return port_; }
    int fd() const { return fd_; }
    Conn accept();
    void close();

  private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

}  // namespace sealmr::transport
