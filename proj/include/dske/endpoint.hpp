// Blocking initiator/responder endpoints over a reliable byte stream. One
// session per connection; the connection closes after Confirm or Error.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "dske/session.hpp"
#include "dske/wire.hpp"

namespace dske {

inline constexpr std::uint16_t kDefaultPort = 4529;

class ByteStream {
 public:
  virtual ~ByteStream() = default;
  // Returns the number of bytes read; 0 means end of stream.
  virtual std::size_t read_some(std::uint8_t* buf, std::size_t len) = 0;
  virtual void write_all(const std::uint8_t* buf, std::size_t len) = 0;
};

// Stream over a connected socket descriptor; owns and closes it.
class FdStream : public ByteStream {
 public:
  explicit FdStream(int fd) : fd_(fd) {}
  FdStream(FdStream&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  FdStream& operator=(FdStream&&) = delete;
  FdStream(const FdStream&) = delete;
  ~FdStream() override;

  std::size_t read_some(std::uint8_t* buf, std::size_t len) override;
  void write_all(const std::uint8_t* buf, std::size_t len) override;

  int fd() const { return fd_; }

 private:
  int fd_;
};

// Connected AF_UNIX pair for in-process loopback runs.
std::pair<FdStream, FdStream> socketpair_streams();

FdStream tcp_connect(const std::string& host, std::uint16_t port,
                     int timeout_ms = 10000);

class TcpListener {
 public:
  // Binds and listens; port 0 picks an ephemeral port (see port()).
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;

  // accept_timeout_ms < 0 blocks indefinitely; otherwise an idle wait longer
  // than that raises errc::transport instead of blocking forever.
  FdStream accept_one(int session_timeout_ms = 10000, int accept_timeout_ms = -1);
  std::uint16_t port() const { return port_; }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

// Runs the full handshake as initiator: Hello, Labels, await Confirm, verify
// the reversal. Frames are mirrored into *tap when given, in wire order.
// Throws errc::transport / confirm_mismatch / peer_error on failure.
SessionKey run_initiator(ByteStream& stream, const SessionConfig& config,
                         std::uint64_t nonce, const IndexSource& draw,
                         SessionTranscript* tap = nullptr);

// Accepts one session as responder: Hello, Labels, reply Confirm.
// Throws errc::transport / label_not_in_window / malformed_payload / ...
SessionKey run_responder(ByteStream& stream, const SessionConfig& config,
                         SessionTranscript* tap = nullptr);

// Address-level wrappers: dial the responder, or bind and serve one session.
SessionKey run_initiator(const std::string& host, std::uint16_t port,
                         const SessionConfig& config, std::uint64_t nonce,
                         const IndexSource& draw,
                         SessionTranscript* tap = nullptr);
SessionKey run_responder(const std::string& bind_host, std::uint16_t port,
                         const SessionConfig& config,
                         SessionTranscript* tap = nullptr);

}  // namespace dske
