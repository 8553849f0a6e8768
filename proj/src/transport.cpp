#include "sealmr/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

namespace sealmr::transport {

namespace {
std::mutex g_tap_mutex;
std::function<void(const Bytes &)> g_tap;

void tap_frame(const Bytes &body) {
    std::lock_guard<std::mutex> lock(g_tap_mutex);
    if (g_tap)
        g_tap(body);
}

bool tap_active() {
    std::lock_guard<std::mutex> lock(g_tap_mutex);
    return static_cast<bool>(g_tap);
}
}  // namespace

void set_frame_tap(std::function<void(const Bytes &)> tap) {
    std::lock_guard<std::mutex> lock(g_tap_mutex);
    g_tap = std::move(tap);
}

void clear_frame_tap() {
    std::lock_guard<std::mutex> lock(g_tap_mutex);
    g_tap = nullptr;
}

Conn::Conn(int fd) : fd_(fd) {
    int one = 1;
    setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

Conn Conn::connect(const std::string &host, uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0)
        throw RouterUnreachable("socket: " + std::string(strerror(errno)));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw RouterUnreachable("bad address: " + host);
    }
    if (::connect(fd, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) != 0) {
        int err = errno;
        ::close(fd);
        throw RouterUnreachable(host + ":" + std::to_string(port) + ": " + strerror(err));
    }
    return Conn(fd);
}

Conn::~Conn() {
    if (fd_ >= 0)
        ::close(fd_);
}

Conn::Conn(Conn &&other) noexcept { *this = std::move(other); }

Conn &Conn::operator=(Conn &&other) noexcept {
    if (this != &other) {
        if (fd_ >= 0)
            ::close(fd_);
        fd_ = other.fd_;
        other.fd_ = -1;
        out_ = std::move(other.out_);
        in_ = std::move(other.in_);
        in_pos_ = other.in_pos_;
        tx_bytes_ = other.tx_bytes_;
        rx_bytes_ = other.rx_bytes_;
    }
    return *this;
}

void Conn::write_frame(const Bytes &body) {
    if (tap_active())
        tap_frame(body);
    uint32_t len = static_cast<uint32_t>(body.size());
    out_.push_back(static_cast<uint8_t>(len >> 24));
    out_.push_back(static_cast<uint8_t>(len >> 16));
    out_.push_back(static_cast<uint8_t>(len >> 8));
    out_.push_back(static_cast<uint8_t>(len));
    out_.insert(out_.end(), body.begin(), body.end());
    tx_bytes_ += body.size() + 4;
    if (out_.size() >= 1 << 20)
        flush();
}

void Conn::flush() {
    size_t off = 0;
    while (off < out_.size()) {
        ssize_t n = ::send(fd_, out_.data() + off, out_.size() - off, MSG_NOSIGNAL);
        if (n > 0) {
            off += static_cast<size_t>(n);
            continue;
        }
        if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
            pollfd p{fd_, POLLOUT, 0};
            ::poll(&p, 1, 1000);
            continue;
        }
        if (n < 0 && errno == EINTR)
            continue;
        out_.clear();
        throw ConnClosed("send: " + std::string(strerror(errno)));
    }
    out_.clear();
}

void Conn::read_exact(uint8_t *dst, size_t n) {
    size_t off = 0;
    // drain anything already buffered by the non-blocking path
    while (off < n && in_pos_ < in_.size())
        dst[off++] = in_[in_pos_++];
    if (in_pos_ == in_.size()) {
        in_.clear();
        in_pos_ = 0;
    }
    while (off < n) {
        ssize_t r = ::recv(fd_, dst + off, n - off, 0);
        if (r > 0) {
            off += static_cast<size_t>(r);
        } else if (r == 0) {
            throw ConnClosed("peer closed");
        } else if (errno == EINTR || errno == EAGAIN || errno == EWOULDBLOCK) {
            pollfd p{fd_, POLLIN, 0};
            ::poll(&p, 1, 1000);
        } else {
            throw ConnClosed("recv: " + std::string(strerror(errno)));
        }
    }
}

Bytes Conn::read_frame() {
    uint8_t lenbuf[4];
    read_exact(lenbuf, 4);
    uint32_t len = static_cast<uint32_t>(lenbuf[0]) << 24 | static_cast<uint32_t>(lenbuf[1]) << 16 |
                   static_cast<uint32_t>(lenbuf[2]) << 8 | lenbuf[3];
    if (len > (64u << 20))
        throw ParseFailure("frame too large");
    Bytes body(len);
    read_exact(body.data(), len);
    rx_bytes_ += len + 4;
    return body;
}

std::optional<Bytes> Conn::read_frame_timeout(int timeout_ms) {
    if (auto f = try_pop_frame())
        return f;
    pollfd p{fd_, POLLIN, 0};
    int rc = ::poll(&p, 1, timeout_ms);
    if (rc <= 0)
        return std::nullopt;
    return read_frame();
}

void Conn::set_nonblocking() {
    int flags = fcntl(fd_, F_GETFL, 0);
    fcntl(fd_, F_SETFL, flags | O_NONBLOCK);
}

bool Conn::fill() {
    uint8_t buf[65536];
    for (;;) {
        ssize_t r = ::recv(fd_, buf, sizeof(buf), MSG_DONTWAIT);
        if (r > 0) {
            in_.insert(in_.end(), buf, buf + r);
            if (static_cast<size_t>(r) < sizeof(buf))
                return true;
        } else if (r == 0) {
            return false;
        } else if (errno == EAGAIN || errno == EWOULDBLOCK) {
            return true;
        } else if (errno == EINTR) {
            continue;
        } else {
            return false;
        }
    }
}

std::optional<Bytes> Conn::try_pop_frame() {
    size_t avail = in_.size() - in_pos_;
    if (avail < 4)
        return std::nullopt;
    const uint8_t *p = in_.data() + in_pos_;
    uint32_t len = static_cast<uint32_t>(p[0]) << 24 | static_cast<uint32_t>(p[1]) << 16 |
                   static_cast<uint32_t>(p[2]) << 8 | p[3];
    if (len > (64u << 20))
        throw ParseFailure("frame too large");
    if (avail < 4 + static_cast<size_t>(len))
        return std::nullopt;
    Bytes body(p + 4, p + 4 + len);
    in_pos_ += 4 + len;
    rx_bytes_ += len + 4;
    if (in_pos_ == in_.size()) {
        in_.clear();
        in_pos_ = 0;
    } else if (in_pos_ > (1 << 20)) {
        in_.erase(in_.begin(), in_.begin() + static_cast<long>(in_pos_));
        in_pos_ = 0;
    }
    return body;
}

void Conn::shutdown_both() {
    if (fd_ >= 0)
        ::shutdown(fd_, SHUT_RDWR);
}

Listener::Listener(const std::string &host, uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0)
        throw std::runtime_error("socket: " + std::string(strerror(errno)));
    int one = 1;
    setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw std::runtime_error("bad listen address: " + host);
    }
    if (::bind(fd_, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) != 0 ||
        ::listen(fd_, 64) != 0) {
        int err = errno;
        ::close(fd_);
        throw std::runtime_error("bind/listen: " + std::string(strerror(err)));
    }
    socklen_t alen = sizeof(addr);
    getsockname(fd_, reinterpret_cast<sockaddr *>(&addr), &alen);
    port_ = ntohs(addr.sin_port);
}

Listener::~Listener() { close(); }

Conn Listener::accept() {
    int cfd = ::accept(fd_, nullptr, nullptr);
    if (cfd < 0)
        throw std::runtime_error("accept: " + std::string(strerror(errno)));
    return Conn(cfd);
}

void Listener::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

}  // namespace sealmr::transport
