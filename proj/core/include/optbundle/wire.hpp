#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "optbundle/sync.hpp"
#include "optbundle/units.hpp"

namespace optbundle {

struct MeasurementRecord {
  NodeId origin = 0;
  std::uint16_t seq = 0;
  Duration t_meas{0};  // on the clock of the node that last transmitted the entry
  std::uint16_t value = 0;

  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

// A bundled data report: topology fields, the sender's sync timestamps and
// up to 255 measurement entries.
struct BundledMessage {
  NodeId sender = 0;
  NodeId parent = 0;
  std::uint16_t seq = 0;
  SyncSample sync;
  std::vector<MeasurementRecord> entries;

  std::size_t count() const { return entries.size(); }

  friend bool operator==(const BundledMessage&, const BundledMessage&) = default;
};

inline constexpr std::size_t kMaxEntries = 255;
inline constexpr std::size_t kHeaderBytes = 2 + 2 + 2 + 1;
inline constexpr std::size_t kSyncBytes = 3 * 8;
inline constexpr std::size_t kEntryBytes = 2 + 2 + 8 + 2;

std::size_t encoded_size(const BundledMessage& msg);

// Little-endian layout:
//   sender u16 | parent u16 | seq u16 | count u8
//   t1 u64 | t2 u64 | t3 u64                      (microsecond ticks)
//   count x (origin u16 | seq u16 | t_meas u64 | value u16)
// Throws InvalidArgument for 0 or >255 entries or negative timestamps.
std::vector<std::uint8_t> encode(const BundledMessage& msg);

// Throws DecodeError on truncated or oversized buffers and zero counts.
BundledMessage decode(std::span<const std::uint8_t> bytes);

}  // namespace optbundle
