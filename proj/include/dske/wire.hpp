// Bit-exact frame codec. Every frame is
//   magic "DSKE" | version 0x01 | type | length (u16 BE) | payload
// with Hello = 8-byte BE nonce + 1-byte key length, Labels/Confirm = the
// ASCII label bytes, Error = one code byte.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dske/error.hpp"
#include "dske/sbox.hpp"

namespace dske {

inline constexpr std::array<std::uint8_t, 4> kWireMagic{0x44, 0x53, 0x4B, 0x45};
inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::size_t kMaxPayload = 65535;
inline constexpr std::size_t kHeaderSize = 8;  // magic + version + type + len

enum class FrameType : std::uint8_t {
  hello = 0x01,
  labels = 0x02,
  confirm = 0x03,
  error = 0x04,
};

// Error-frame code byte values.
enum class ErrorCode : std::uint8_t {
  protocol = 0x01,
  label_not_in_window = 0x02,
  confirm_mismatch = 0x03,
  bad_params = 0x04,
};

struct WireFrame {
  FrameType type = FrameType::hello;
  std::vector<std::uint8_t> payload;

  bool operator==(const WireFrame&) const = default;
};

// Framing without the per-type shape check; the adversary harness uses this
// to craft arbitrary frames. Throws errc::payload_too_large.
std::vector<std::uint8_t> encode_raw_frame(std::uint8_t type,
                                           std::span<const std::uint8_t> payload);

// Shape-checked encoding: Hello payload must be 9 bytes, Error 1 byte,
// Labels/Confirm an even number of bytes. Throws errc::malformed_payload /
// errc::payload_too_large.
std::vector<std::uint8_t> encode_frame(const WireFrame& frame);

enum class DecodeStatus {
  ok,
  need_more,  // truncated: feed more bytes and retry
  bad_magic,
  bad_version,
  unknown_type,
};

struct DecodeResult {
  DecodeStatus status = DecodeStatus::need_more;
  WireFrame frame;
  std::size_t consumed = 0;  // bytes to drop from the front on ok
};

// Parses one frame from the front of data. Strict on magic and version;
// payload shape is interpreted by the callers that know the type.
DecodeResult decode_frame(std::span<const std::uint8_t> data);

// Incremental decoder over a byte stream split at arbitrary boundaries.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> data);

  // Next complete frame, or nullopt if more bytes are needed. Throws
  // errc::bad_magic / unsupported_version / unknown_type on garbage.
  std::optional<WireFrame> next();

  bool buffer_empty() const { return buffer_.empty(); }

 private:
  std::vector<std::uint8_t> buffer_;
};

// Ordered wire frames of one session as an eavesdropper records them.
struct SessionTranscript {
  std::vector<WireFrame> frames;
};

// ---- payload builders / parsers ------------------------------------------

struct HelloFields {
  std::uint64_t nonce = 0;
  std::uint8_t key_len = 0;
};

WireFrame make_hello(std::uint64_t nonce, std::uint8_t key_len);
WireFrame make_labels(const std::vector<Label>& labels);
WireFrame make_confirm(const std::vector<Label>& labels);
WireFrame make_error(ErrorCode code);

// Throw errc::malformed_payload when the frame type or shape is wrong.
HelloFields parse_hello(const WireFrame& frame);
std::vector<Label> parse_labels(const WireFrame& frame);
ErrorCode parse_error(const WireFrame& frame);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace dske
