#include "optbundle/wire.hpp"

#include <string>

#include "optbundle/error.hpp"

namespace optbundle {

namespace {

class Writer {
 public:
  explicit Writer(std::size_t size) { out_.reserve(size); }

  template <typename T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void put_time(Duration d) {
    if (d < Duration::zero()) throw Error(Errc::InvalidArgument, "negative timestamp cannot be encoded");
    put(static_cast<std::uint64_t>(d.count()));
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
  T get() {
    if (in_.size() - pos_ < sizeof(T)) {
      throw Error(Errc::DecodeError, "truncated message at byte " + std::to_string(pos_));
    }
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(in_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  Duration get_time() {
    const auto raw = get<std::uint64_t>();
    if (raw > static_cast<std::uint64_t>(INT64_MAX)) throw Error(Errc::DecodeError, "timestamp out of range");
    return Duration{static_cast<std::int64_t>(raw)};
  }

  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t encoded_size(const BundledMessage& msg) {
  return kHeaderBytes + kSyncBytes + msg.entries.size() * kEntryBytes;
}

std::vector<std::uint8_t> encode(const BundledMessage& msg) {
  if (msg.entries.empty() || msg.entries.size() > kMaxEntries) {
    throw Error(Errc::InvalidArgument, "a bundled message carries 1..255 entries, got " +
                                           std::to_string(msg.entries.size()));
  }
  Writer w(encoded_size(msg));
  w.put<std::uint16_t>(msg.sender);
  w.put<std::uint16_t>(msg.parent);
  w.put<std::uint16_t>(msg.seq);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(msg.entries.size()));
  w.put_time(msg.sync.t1);
  w.put_time(msg.sync.t2);
  w.put_time(msg.sync.t3);
  for (const auto& e : msg.entries) {
    w.put<std::uint16_t>(e.origin);
    w.put<std::uint16_t>(e.seq);
    w.put_time(e.t_meas);
    w.put<std::uint16_t>(e.value);
  }
  return w.take();
}

BundledMessage decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  BundledMessage msg;
  msg.sender = r.get<std::uint16_t>();
  msg.parent = r.get<std::uint16_t>();
  msg.seq = r.get<std::uint16_t>();
  const auto count = r.get<std::uint8_t>();
  if (count == 0) throw Error(Errc::DecodeError, "message declares zero entries");
  msg.sync.t1 = r.get_time();
  msg.sync.t2 = r.get_time();
  msg.sync.t3 = r.get_time();
  msg.entries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    MeasurementRecord e;
    e.origin = r.get<std::uint16_t>();
    e.seq = r.get<std::uint16_t>();
    e.t_meas = r.get_time();
    e.value = r.get<std::uint16_t>();
    msg.entries.push_back(e);
  }
  if (r.remaining() != 0) {
    throw Error(Errc::DecodeError, std::to_string(r.remaining()) + " trailing bytes after message");
  }
  return msg;
}

}  // namespace optbundle
