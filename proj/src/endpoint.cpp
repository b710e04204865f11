#include "dske/endpoint.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace dske {

static Error transport_error(const std::string& what) {
  return Error(errc::transport, what + ": " + std::strerror(errno));
}

FdStream::~FdStream() {
  if (fd_ >= 0) ::close(fd_);
}

std::size_t FdStream::read_some(std::uint8_t* buf, std::size_t len) {
  for (;;) {
    ssize_t n = ::recv(fd_, buf, len, 0);
    if (n >= 0) return static_cast<std::size_t>(n);
    if (errno == EINTR) continue;
    if (errno == EAGAIN || errno == EWOULDBLOCK)
      throw Error(errc::transport, "read timed out");
    throw transport_error("recv failed");
  }
}

void FdStream::write_all(const std::uint8_t* buf, std::size_t len) {
  std::size_t sent = 0;
  while (sent < len) {
    ssize_t n = ::send(fd_, buf + sent, len - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw transport_error("send failed");
    }
    sent += static_cast<std::size_t>(n);
  }
}

static void set_io_timeout(int fd, int timeout_ms) {
  timeval tv{};
  tv.tv_sec = timeout_ms / 1000;
  tv.tv_usec = (timeout_ms % 1000) * 1000;
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

std::pair<FdStream, FdStream> socketpair_streams() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0)
    throw transport_error("socketpair failed");
  set_io_timeout(fds[0], 10000);
  set_io_timeout(fds[1], 10000);
  return {FdStream(fds[0]), FdStream(fds[1])};
}

FdStream tcp_connect(const std::string& host, std::uint16_t port,
                     int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res);
  if (rc != 0)
    throw Error(errc::transport,
                "cannot resolve " + host + ": " + gai_strerror(rc));
  int fd = -1;
  int saved_errno = 0;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    saved_errno = errno;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) {
    errno = saved_errno;
    throw transport_error("cannot connect to " + host + ":" + service);
  }
  set_io_timeout(fd, timeout_ms);
  return FdStream(fd);
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(),
                         service.c_str(), &hints, &res);
  if (rc != 0)
    throw Error(errc::transport,
                "cannot resolve " + host + ": " + gai_strerror(rc));
  int saved_errno = 0;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd_ < 0) continue;
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd_, ai->ai_addr, ai->ai_addrlen) == 0 &&
        ::listen(fd_, 16) == 0)
      break;
    saved_errno = errno;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) {
    errno = saved_errno;
    throw transport_error("cannot listen on " + host + ":" + service);
  }
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) == 0) {
    if (addr.ss_family == AF_INET)
      port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    else if (addr.ss_family == AF_INET6)
      port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

FdStream TcpListener::accept_one(int session_timeout_ms, int accept_timeout_ms) {
  if (accept_timeout_ms >= 0) {
    pollfd pfd{fd_, POLLIN, 0};
    int rc;
    do {
      rc = ::poll(&pfd, 1, accept_timeout_ms);
    } while (rc < 0 && errno == EINTR);
    if (rc == 0) throw Error(errc::transport, "accept timed out");
    if (rc < 0) throw transport_error("poll failed");
  }
  for (;;) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      set_io_timeout(fd, session_timeout_ms);
      return FdStream(fd);
    }
    if (errno != EINTR) throw transport_error("accept failed");
  }
}

// ---- handshake ------------------------------------------------------------

static void send_frame(ByteStream& stream, const WireFrame& frame,
                       SessionTranscript* tap) {
  const std::vector<std::uint8_t> bytes = encode_frame(frame);
  stream.write_all(bytes.data(), bytes.size());
  if (tap) tap->frames.push_back(frame);
}

static WireFrame recv_frame(ByteStream& stream, FrameReader& reader,
                            SessionTranscript* tap) {
  for (;;) {
    if (auto frame = reader.next()) {
      if (tap) tap->frames.push_back(*frame);
      return *frame;
    }
    std::uint8_t buf[4096];
    std::size_t n = stream.read_some(buf, sizeof(buf));
    if (n == 0) throw Error(errc::transport, "peer closed the connection");
    reader.feed({buf, n});
  }
}

// Raises peer Error frames as peer_error.
static WireFrame expect_frame(ByteStream& stream, FrameReader& reader,
                              SessionTranscript* tap, FrameType want) {
  WireFrame frame = recv_frame(stream, reader, tap);
  if (frame.type == FrameType::error)
    throw Error(errc::peer_error,
                "peer reported error code " +
                    std::to_string(static_cast<int>(parse_error(frame))));
  if (frame.type != want)
    throw Error(errc::malformed_payload, "unexpected frame type");
  return frame;
}

SessionKey run_initiator(ByteStream& stream, const SessionConfig& config,
                         std::uint64_t nonce, const IndexSource& draw,
                         SessionTranscript* tap) {
  SessionState state(Role::initiator, config, nonce);
  FrameReader reader;
  send_frame(stream, make_hello(nonce, static_cast<std::uint8_t>(config.key_len)),
             tap);
  const std::vector<Label> labels = state.pick_key(draw);
  send_frame(stream, make_labels(labels), tap);

  WireFrame confirm = expect_frame(stream, reader, tap, FrameType::confirm);
  if (!state.verify_confirm(parse_labels(confirm))) {
    send_frame(stream, make_error(ErrorCode::confirm_mismatch), tap);
    throw Error(errc::confirm_mismatch, "confirmation does not match");
  }
  return state.key();
}

SessionKey run_responder(ByteStream& stream, const SessionConfig& config,
                         SessionTranscript* tap) {
  FrameReader reader;
  WireFrame hello_frame = expect_frame(stream, reader, tap, FrameType::hello);
  HelloFields hello = parse_hello(hello_frame);
  if (hello.key_len < 1 || hello.key_len > kMaxKeyLen) {
    send_frame(stream, make_error(ErrorCode::protocol), tap);
    throw Error(errc::malformed_payload, "hello key length out of range");
  }

  SessionConfig session_config = config;
  session_config.key_len = hello.key_len;
  SessionState state(Role::responder, session_config, hello.nonce);

  WireFrame labels_frame = expect_frame(stream, reader, tap, FrameType::labels);
  std::vector<Label> labels = parse_labels(labels_frame);
  if (labels.size() != static_cast<std::size_t>(hello.key_len)) {
    send_frame(stream, make_error(ErrorCode::protocol), tap);
    throw Error(errc::malformed_payload, "label count does not match hello");
  }
  try {
    std::vector<Label> confirm = state.receive(labels);
    send_frame(stream, make_confirm(confirm), tap);
  } catch (const Error& e) {
    if (e.code() == errc::label_not_in_window)
      send_frame(stream, make_error(ErrorCode::label_not_in_window), tap);
    throw;
  }
  return state.key();
}

SessionKey run_initiator(const std::string& host, std::uint16_t port,
                         const SessionConfig& config, std::uint64_t nonce,
                         const IndexSource& draw, SessionTranscript* tap) {
  FdStream stream = tcp_connect(host, port);
  return run_initiator(stream, config, nonce, draw, tap);
}

SessionKey run_responder(const std::string& bind_host, std::uint16_t port,
                         const SessionConfig& config, SessionTranscript* tap) {
  TcpListener listener(bind_host, port);
  FdStream stream = listener.accept_one();
  return run_responder(stream, config, tap);
}

}  // namespace dske
