#include "optbundle/sync.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "optbundle/error.hpp"

namespace optbundle {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size() || !std::isfinite(v)) {
    throw Error(Errc::ConfigError, where + ": not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace

AccuracyTable::AccuracyTable(std::vector<AccuracyRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw Error(Errc::InvalidArgument, "accuracy table is empty");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (r.si <= Duration::zero()) throw Error(Errc::InvalidArgument, "accuracy table si must be positive");
    if (!(r.mae_s >= 0.0) || !std::isfinite(r.mae_s)) {
      throw Error(Errc::InvalidArgument, "accuracy table mae must be finite and >= 0");
    }
    if (i > 0 && r.si <= rows_[i - 1].si) {
      throw Error(Errc::InvalidArgument, "accuracy table si values must be strictly increasing");
    }
    if (i > 0 && r.mae_s < rows_[i - 1].mae_s) {
      throw Error(Errc::InvalidArgument, "accuracy table mae must be non-decreasing in si");
    }
  }
}

AccuracyTable AccuracyTable::conservative(std::vector<AccuracyRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.si < b.si; });
  double worst = 0.0;
  for (auto& r : rows) {
    worst = std::max(worst, r.mae_s);
    r.mae_s = worst;
  }
  return AccuracyTable(std::move(rows));
}

AccuracyTable ahts_table() {
  return AccuracyTable({
      {1s, 1.8166e-06, 5.2094e-12},
      {10s, 2.3385e-06, 9.1694e-12},
      {100s, 8.4225e-06, 1.2524e-10},
  });
}

AccuracyTable ee_ascfr_table() {
  return AccuracyTable::conservative({
      {10ms, 1.0887e-24, 4.7684e-19},
      {1s, 9.1748e-25, 5.4210e-19},
      {100s, 8.8811e-25, 5.8990e-19},
  });
}

AccuracyTable load_accuracy_csv(const std::filesystem::path& file, bool conservative) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::ConfigError, "cannot open accuracy table " + file.string());

  std::vector<AccuracyRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  bool has_mse = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = file.string() + ":" + std::to_string(lineno);
    auto cells = split_csv(line);
    if (!header_seen) {
      if (cells == std::vector<std::string>{"si_seconds", "mae_seconds"}) {
        has_mse = false;
      } else if (cells == std::vector<std::string>{"si_seconds", "mae_seconds", "mse_seconds"}) {
        has_mse = true;
      } else {
        throw Error(Errc::ConfigError, where + ": expected header 'si_seconds,mae_seconds'");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != (has_mse ? 3u : 2u)) {
      throw Error(Errc::ConfigError, where + ": wrong number of columns");
    }
    AccuracyRow row{from_seconds(parse_number(cells[0], where)), parse_number(cells[1], where), std::nullopt};
    if (has_mse) row.mse_s = parse_number(cells[2], where);
    rows.push_back(row);
  }
  if (!header_seen) throw Error(Errc::ConfigError, file.string() + ": empty accuracy table");
  try {
    return conservative ? AccuracyTable::conservative(std::move(rows)) : AccuracyTable(std::move(rows));
  } catch (const Error& e) {
    throw Error(Errc::ConfigError, file.string() + ": " + e.what());
  }
}

Duration accuracy_to_si(double sa_min_s, const AccuracyTable& table) {
  std::optional<Duration> best;
  for (const auto& r : table.rows()) {
    if (r.mae_s <= sa_min_s) best = r.si;
  }
  if (!best) {
    std::ostringstream msg;
    msg << "accuracy " << sa_min_s << " s is below the best tabulated accuracy " << table.best_mae() << " s";
    throw Error(Errc::UnsatisfiableAccuracy, msg.str());
  }
  return *best;
}

void ClockState::validate() const {
  if (std::abs(drift_ppm) + std::abs(wander_ppm) > 200.0) {
    throw Error(Errc::InvalidArgument, "clock frequency error beyond 200 ppm");
  }
  if (tick <= Duration::zero()) throw Error(Errc::InvalidArgument, "clock tick must be positive");
  if (wander_ppm != 0.0 && wander_period <= Duration::zero()) {
    throw Error(Errc::InvalidArgument, "wander period must be positive");
  }
}

long double local_time_exact(const ClockState& clock, Duration true_time) {
  const long double dt = static_cast<long double>((true_time - clock.epoch).count());
  // dt * drift / 1e6 keeps integer-ppm cases exact (40 ppm over 10 s is 400 us)
  long double local = static_cast<long double>(clock.offset.count()) + dt +
                      dt * static_cast<long double>(clock.drift_ppm) / 1e6L;
  if (clock.wander_ppm != 0.0) {
    const long double omega = 2.0L * std::numbers::pi_v<long double> /
                              (static_cast<long double>(clock.wander_period.count()) / 1e6L);
    const long double tau = dt / 1e6L;
    local += static_cast<long double>(clock.wander_ppm) *
             (std::sin(omega * tau + clock.wander_phase) - std::sin(static_cast<long double>(clock.wander_phase))) /
             omega;
  }
  return local;
}

Duration local_time(const ClockState& clock, Duration true_time) {
  if (true_time < clock.epoch) throw Error(Errc::InvalidArgument, "true time precedes clock epoch");
  const long double tick = static_cast<long double>(clock.tick.count());
  const long double ticks = std::floor(local_time_exact(clock, true_time) / tick + 1e-9L);
  return Duration{static_cast<std::int64_t>(ticks) * clock.tick.count()};
}

Duration true_time_at(const ClockState& clock, Duration local) {
  const long double rate = 1.0L + static_cast<long double>(clock.drift_ppm) / 1e6L;
  long double t = static_cast<long double>(clock.epoch.count()) +
                  static_cast<long double>((local - clock.offset).count()) / rate;
  for (int i = 0; i < 3 && clock.wander_ppm != 0.0; ++i) {
    const Duration probe{static_cast<std::int64_t>(std::llround(std::max(t, (long double)clock.epoch.count())))};
    t -= (local_time_exact(clock, probe) - static_cast<long double>(local.count())) / rate;
  }
  Duration guess{std::max<std::int64_t>(clock.epoch.count(), std::llround(t) - 2)};
  while (local_time(clock, guess) < local) guess += Duration{1};
  while (guess > clock.epoch && local_time(clock, guess - Duration{1}) >= local) guess -= Duration{1};
  return guess;
}

SkewEstimate update_skew(const std::optional<SkewEstimate>& prev, const SyncSample& s,
                         const std::optional<SyncSample>& s_prev) {
  SkewEstimate est;
  est.ratio = prev ? prev->ratio : 1.0;
  if (s_prev) {
    if (s.t1 == s_prev->t1) throw Error(Errc::DegenerateInterval, "consecutive sync samples share t1");
    const long double node_span = static_cast<long double>((s.t3 - s_prev->t3).count());
    const long double head_span = static_cast<long double>((s.t1 - s_prev->t1).count());
    const long double ratio = node_span / head_span;
    if (!(ratio > 0.0L)) throw Error(Errc::InvalidArgument, "sync samples imply a non-positive clock ratio");
    est.ratio = static_cast<double>(ratio);
  }
  est.anchor_head = s.t1;
  est.anchor_node = s.t3;
  est.valid_from = s.t1;
  return est;
}

long double translate_timestamp_exact(const SkewEstimate& est, Duration node_ts) {
  return static_cast<long double>(est.anchor_head.count()) +
         static_cast<long double>((node_ts - est.anchor_node).count()) / static_cast<long double>(est.ratio);
}

Duration translate_timestamp(const SkewEstimate& est, Duration node_ts) {
  return Duration{std::llround(translate_timestamp_exact(est, node_ts))};
}

double sync_error(const SkewEstimate& est, const ClockState& clock, Duration true_time) {
  const long double head = translate_timestamp_exact(est, local_time(clock, true_time));
  return static_cast<double>(std::abs(head - static_cast<long double>(true_time.count())) / 1e6L);
}

SyncStudyResult run_sync_study(const SyncStudyConfig& cfg) {
  if (cfg.si <= Duration::zero() || cfg.duration <= Duration::zero() || cfg.evals_per_second == 0) {
    throw Error(Errc::InvalidArgument, "sync study needs positive si, duration and evaluation rate");
  }
  SyncStudyResult result;
  for (std::uint32_t k = 0; k < cfg.seeds; ++k) {
    std::seed_seq seq{cfg.base_seed, static_cast<std::uint64_t>(k)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> drift(-cfg.max_drift_ppm, cfg.max_drift_ppm);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<std::int64_t> offset(0, 1000 * 1'000'000LL);
    std::uniform_int_distribution<std::int64_t> first(0, cfg.si.count() - 1);

    ClockState clock;
    clock.drift_ppm = drift(rng);
    clock.offset = Duration{offset(rng)};
    clock.tick = cfg.tick;
    clock.wander_ppm = cfg.wander_ppm;
    clock.wander_period = cfg.wander_period;
    clock.wander_phase = phase(rng);
    clock.validate();

    const Duration slot = Duration{1'000'000 / cfg.evals_per_second};
    std::uniform_int_distribution<std::int64_t> jitter(0, slot.count() - 1);

    std::optional<SkewEstimate> est;
    std::optional<SyncSample> last;
    int samples = 0;
    Duration next_sync{first(rng)};
    for (Duration slot_start{0}; slot_start < cfg.duration; slot_start += slot) {
      const Duration t = slot_start + Duration{jitter(rng)};
      while (next_sync <= t) {
        const Duration node = local_time(clock, next_sync);
        const SyncSample s{next_sync, node, node};
        est = update_skew(est, s, last);
        last = s;
        ++samples;
        next_sync += cfg.si;
      }
      if (samples >= 2) result.errors_s.push_back(sync_error(*est, clock, t));
    }
  }

  if (!result.errors_s.empty()) {
    std::vector<double> sorted = result.errors_s;
    std::sort(sorted.begin(), sorted.end());
    const auto at = [&](double q) {
      return sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1) + 0.5)];
    };
    result.median_s = at(0.5);
    result.p95_s = at(0.95);
    result.max_s = sorted.back();
  }
  return result;
}

}  // namespace optbundle
