#include "dske/wire.hpp"

#include <algorithm>

namespace dske {

std::vector<std::uint8_t> encode_raw_frame(std::uint8_t type,
                                           std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxPayload)
    throw Error(errc::payload_too_large, "payload exceeds 65535 bytes");
  std::vector<std::uint8_t> out(kHeaderSize + payload.size());
  std::copy(kWireMagic.begin(), kWireMagic.end(), out.begin());
  out[4] = kWireVersion;
  out[5] = type;
  out[6] = static_cast<std::uint8_t>(payload.size() >> 8);
  out[7] = static_cast<std::uint8_t>(payload.size() & 0xFF);
  std::copy(payload.begin(), payload.end(), out.begin() + kHeaderSize);
  return out;
}

static void check_shape(const WireFrame& frame) {
  switch (frame.type) {
    case FrameType::hello:
      if (frame.payload.size() != 9)
        throw Error(errc::malformed_payload, "hello payload must be 9 bytes");
      break;
    case FrameType::labels:
    case FrameType::confirm:
      if (frame.payload.size() % 2 != 0)
        throw Error(errc::malformed_payload,
                    "label payload must hold two-byte labels");
      break;
    case FrameType::error:
      if (frame.payload.size() != 1)
        throw Error(errc::malformed_payload, "error payload must be 1 byte");
      break;
    default:
      throw Error(errc::unknown_type, "unknown frame type");
  }
}

std::vector<std::uint8_t> encode_frame(const WireFrame& frame) {
  check_shape(frame);
  return encode_raw_frame(static_cast<std::uint8_t>(frame.type), frame.payload);
}

DecodeResult decode_frame(std::span<const std::uint8_t> data) {
  DecodeResult res;
  if (data.size() < kWireMagic.size()) {
    // Flag garbage as soon as the prefix cannot be a magic.
    if (!std::equal(data.begin(), data.end(), kWireMagic.begin())) {
      res.status = DecodeStatus::bad_magic;
      return res;
    }
    res.status = DecodeStatus::need_more;
    return res;
  }
  if (!std::equal(kWireMagic.begin(), kWireMagic.end(), data.begin())) {
    res.status = DecodeStatus::bad_magic;
    return res;
  }
  if (data.size() < 5) {
    res.status = DecodeStatus::need_more;
    return res;
  }
  if (data[4] != kWireVersion) {
    res.status = DecodeStatus::bad_version;
    return res;
  }
  if (data.size() < kHeaderSize) {
    res.status = DecodeStatus::need_more;
    return res;
  }
  const std::uint8_t type = data[5];
  if (type < 0x01 || type > 0x04) {
    res.status = DecodeStatus::unknown_type;
    return res;
  }
  const std::size_t len = (static_cast<std::size_t>(data[6]) << 8) | data[7];
  if (data.size() < kHeaderSize + len) {
    res.status = DecodeStatus::need_more;
    return res;
  }
  res.status = DecodeStatus::ok;
  res.frame.type = static_cast<FrameType>(type);
  res.frame.payload.assign(data.begin() + kHeaderSize,
                           data.begin() + kHeaderSize + len);
  res.consumed = kHeaderSize + len;
  return res;
}

void FrameReader::feed(std::span<const std::uint8_t> data) {
  buffer_.insert(buffer_.end(), data.begin(), data.end());
}

std::optional<WireFrame> FrameReader::next() {
  if (buffer_.empty()) return std::nullopt;
  DecodeResult res = decode_frame(buffer_);
  switch (res.status) {
    case DecodeStatus::ok:
      buffer_.erase(buffer_.begin(), buffer_.begin() + res.consumed);
      return res.frame;
    case DecodeStatus::need_more:
      return std::nullopt;
    case DecodeStatus::bad_magic:
      throw Error(errc::bad_magic, "bad frame magic");
    case DecodeStatus::bad_version:
      throw Error(errc::unsupported_version, "unsupported frame version");
    case DecodeStatus::unknown_type:
      throw Error(errc::unknown_type, "unknown frame type");
  }
  return std::nullopt;
}

WireFrame make_hello(std::uint64_t nonce, std::uint8_t key_len) {
  WireFrame f;
  f.type = FrameType::hello;
  f.payload.reserve(9);
  for (int shift = 56; shift >= 0; shift -= 8)
    f.payload.push_back(static_cast<std::uint8_t>(nonce >> shift));
  f.payload.push_back(key_len);
  return f;
}

static WireFrame label_frame(FrameType type, const std::vector<Label>& labels) {
  WireFrame f;
  f.type = type;
  f.payload.reserve(labels.size() * 2);
  for (Label l : labels) {
    f.payload.push_back(static_cast<std::uint8_t>(l.first));
    f.payload.push_back(static_cast<std::uint8_t>(l.second));
  }
  return f;
}

WireFrame make_labels(const std::vector<Label>& labels) {
  return label_frame(FrameType::labels, labels);
}

WireFrame make_confirm(const std::vector<Label>& labels) {
  return label_frame(FrameType::confirm, labels);
}

WireFrame make_error(ErrorCode code) {
  WireFrame f;
  f.type = FrameType::error;
  f.payload.push_back(static_cast<std::uint8_t>(code));
  return f;
}

HelloFields parse_hello(const WireFrame& frame) {
  if (frame.type != FrameType::hello || frame.payload.size() != 9)
    throw Error(errc::malformed_payload, "not a well-formed hello frame");
  HelloFields h;
  for (int i = 0; i < 8; ++i) h.nonce = (h.nonce << 8) | frame.payload[i];
  h.key_len = frame.payload[8];
  return h;
}

std::vector<Label> parse_labels(const WireFrame& frame) {
  if ((frame.type != FrameType::labels && frame.type != FrameType::confirm) ||
      frame.payload.size() % 2 != 0)
    throw Error(errc::malformed_payload, "not a well-formed label frame");
  std::vector<Label> labels;
  labels.reserve(frame.payload.size() / 2);
  for (std::size_t i = 0; i < frame.payload.size(); i += 2)
    labels.push_back(Label{static_cast<char>(frame.payload[i]),
                           static_cast<char>(frame.payload[i + 1])});
  return labels;
}

ErrorCode parse_error(const WireFrame& frame) {
  if (frame.type != FrameType::error || frame.payload.size() != 1)
    throw Error(errc::malformed_payload, "not a well-formed error frame");
  return static_cast<ErrorCode>(frame.payload[0]);
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

}  // namespace dske
