#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "optbundle/units.hpp"

namespace optbundle {

// One row of an empirical synchronization-interval -> accuracy table.
struct AccuracyRow {
  Duration si;
  double mae_s;                  // mean absolute error, seconds
  std::optional<double> mse_s;   // carried through, never used for decisions
};

// Empirical relation between synchronization interval and achieved accuracy.
// Rows are sorted by si (strictly increasing) and mae is non-decreasing in si.
class AccuracyTable {
 public:
  // Throws InvalidArgument if rows are empty, unsorted, or mae decreases.
  explicit AccuracyTable(std::vector<AccuracyRow> rows);

  // Replaces each mae by the worst mae seen at or below its si before
  // validating, so a table whose accuracy improves with longer intervals is
  // never credited with that improvement.
  static AccuracyTable conservative(std::vector<AccuracyRow> rows);

  const std::vector<AccuracyRow>& rows() const { return rows_; }
  double best_mae() const { return rows_.front().mae_s; }

 private:
  std::vector<AccuracyRow> rows_;
};

// Practical-evaluation rows for the multi-hop head-centralized scheme (default).
AccuracyTable ahts_table();
// Simulation rows for the single-hop scheme; built with conservative().
AccuracyTable ee_ascfr_table();

// CSV with header `si_seconds,mae_seconds` and an optional `mse_seconds`
// column. Throws ConfigError with the offending line number.
AccuracyTable load_accuracy_csv(const std::filesystem::path& file, bool conservative = false);

// Largest tabulated si whose mae <= sa_min_s. Throws UnsatisfiableAccuracy
// when sa_min_s is below every tabulated mae.
Duration accuracy_to_si(double sa_min_s, const AccuracyTable& table);

// Linear drifting clock with optional sinusoidal frequency wander (thermal
// cycling) and tick quantization:
//   local = offset + dt*(1 + drift*1e-6) + wander term,  dt = true - epoch
// floored to a multiple of tick.
struct ClockState {
  double drift_ppm = 0.0;
  Duration offset{0};
  Duration epoch{0};
  Duration tick{1};
  double wander_ppm = 0.0;          // amplitude of the frequency wander
  Duration wander_period{3600s};
  double wander_phase = 0.0;        // radians

  // Throws InvalidArgument when |drift| + |wander| > 200 ppm or tick <= 0.
  void validate() const;
};

// Unquantized local reading in microseconds.
long double local_time_exact(const ClockState& clock, Duration true_time);
// Quantized local reading. Requires true_time >= epoch.
Duration local_time(const ClockState& clock, Duration true_time);
// Earliest whole-microsecond true time at which local_time() reaches `local`.
Duration true_time_at(const ClockState& clock, Duration local);

// Timestamps piggybacked on a bundled message. t1 is on the head clock;
// t2 and t3 are on the node clock. Head-side estimation pairs t1 with t3 as
// one instant seen by both clocks.
struct SyncSample {
  Duration t1{0};
  Duration t2{0};
  Duration t3{0};

  friend bool operator==(const SyncSample&, const SyncSample&) = default;
};

// Head-side view of one node clock: node ticks per head tick, anchored at a
// (head, node) timestamp pair.
struct SkewEstimate {
  double ratio = 1.0;
  Duration anchor_head{0};
  Duration anchor_node{0};
  Duration valid_from{0};

  Duration offset() const { return anchor_node - anchor_head; }
};

// Two-point frequency-ratio estimator over consecutive samples. Without a
// previous sample the ratio carries over from `prev` (1 if none) and only the
// anchor moves. Throws DegenerateInterval when s.t1 == s_prev.t1.
SkewEstimate update_skew(const std::optional<SkewEstimate>& prev, const SyncSample& s,
                         const std::optional<SyncSample>& s_prev);

// Head-clock equivalent of a node timestamp, rounded to the nearest microsecond.
Duration translate_timestamp(const SkewEstimate& est, Duration node_ts);
long double translate_timestamp_exact(const SkewEstimate& est, Duration node_ts);

// |translate(local_time(clock, t)) - t| in seconds; the head clock is the
// reference (true) time.
double sync_error(const SkewEstimate& est, const ClockState& clock, Duration true_time);

// Standalone study of head-side translation error for a given
// synchronization interval, over several seeded clocks.
struct SyncStudyConfig {
  Duration si{10s};
  Duration duration{3600s};
  std::uint32_t seeds = 20;
  std::uint64_t base_seed = 1;
  double max_drift_ppm = 40.0;
  Duration tick{1};
  double wander_ppm = 0.0;
  Duration wander_period{3600s};
  // evaluation instants per second of run time (uniformly jittered)
  std::uint32_t evals_per_second = 1;
};

struct SyncStudyResult {
  std::vector<double> errors_s;  // converged samples only (ratio from two syncs)
  double median_s = 0.0;
  double p95_s = 0.0;
  double max_s = 0.0;
};

SyncStudyResult run_sync_study(const SyncStudyConfig& cfg);

}  // namespace optbundle
