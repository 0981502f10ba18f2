#include "optbundle/simulator.hpp"

#include <deque>
#include <memory>
#include <numbers>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>

#include "optbundle/error.hpp"
#include "optbundle/wire.hpp"

namespace optbundle {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

}  // namespace

std::uint32_t ScenarioConfig::initial_gamma() const {
  if (initial_plan) return *initial_plan;
  if (!schedule.empty()) return schedule.front().req.chi_max;
  return 1;
}

void ScenarioConfig::validate() const {
  Topology topo;
  try {
    topo = validate_topology(topology);
  } catch (const Error& e) {
    config_error(std::string("topology: ") + e.what());
  }
  try {
    service.validate();
  } catch (const Error& e) {
    config_error("service: " + e.detail());
  }
  if (duration <= Duration::zero()) config_error("duration must be positive");
  if (i_meas <= Duration::zero()) config_error("i_meas must be positive");
  if (d_prop < Duration::zero()) config_error("propagation delay cannot be negative");
  if (optimize && schedule.empty()) config_error("an optimizing run needs at least one requirement");
  if (initial_plan && *initial_plan == 0) config_error("initial_plan must be at least 1");

  std::uint32_t max_fan = 1;
  for (NodeId id : topo.sensor_nodes()) max_fan = std::max(max_fan, 1 + topo.offspring(id));
  const auto check_gamma = [&](std::uint32_t gamma, const std::string& what) {
    if (static_cast<std::uint64_t>(gamma) * max_fan > kMaxEntries) {
      config_error(what + " = " + std::to_string(gamma) + " times " + std::to_string(max_fan) +
                   " streams exceeds the 255-entry message limit");
    }
  };
  check_gamma(initial_gamma(), "initial_plan");

  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const auto& s = schedule[k];
    const std::string where = "requirement_schedule[" + std::to_string(k) + "]";
    if (s.at < Duration::zero() || s.at >= duration) config_error(where + ": activation outside the run");
    if (k > 0 && s.at <= schedule[k - 1].at) config_error(where + ": activation times must strictly increase");
    if (s.req.i_meas != i_meas) config_error(where + ": i_meas differs from the scenario");
    try {
      s.req.validate();
      accuracy_to_si(s.req.sa_min_s, accuracy);
    } catch (const Error& e) {
      config_error(where + ": " + e.what());
    }
    check_gamma(s.req.chi_max, where + ".chi_max");
  }

  for (const auto& [id, ppm] : drifts_ppm) {
    if (!topo.is_sensor(id)) config_error("drifts_ppm: node " + std::to_string(id) + " is not in the topology");
    ClockState c;
    c.drift_ppm = ppm;
    c.wander_ppm = wander_ppm;
    c.wander_period = wander_period;
    try {
      c.validate();
    } catch (const Error& e) {
      config_error("drifts_ppm: node " + std::to_string(id) + ": " + e.what());
    }
  }
  if (wander_ppm < 0 || wander_period <= Duration::zero()) config_error("invalid clock wander");
}

ScenarioConfig no_bundling_baseline(ScenarioConfig cfg) {
  cfg.initial_plan = 1;
  cfg.mode = BundlingMode::SelfData;
  cfg.optimize = false;
  return cfg;
}

namespace {

enum class Kind : std::uint8_t { Requirement, Arrival, Beacon, Tick };

struct Event {
  Duration at;
  NodeId node;
  Kind kind;
  std::uint64_t seq;
  std::uint64_t payload;

  auto key() const { return std::tie(at, node, kind, seq); }
  bool operator>(const Event& o) const { return key() > o.key(); }
};

struct InFlight {
  std::vector<std::uint8_t> bytes;
  NodeId from;
};

struct SharedPlan {
  std::uint64_t revision = 0;
  std::shared_ptr<const BundlingPlan> plan;
};

struct Node {
  NodeId id = 0;
  NodeId parent = 0;
  std::vector<NodeId> children;
  ClockState clock;
  Duration tick_local{0};    // local time of the next measurement tick
  Duration beacon_local{0};  // local time of the next beacon

  std::uint32_t gamma = 1;
  std::optional<std::pair<std::uint32_t, std::uint64_t>> pending;  // (gamma, revision)
  SharedPlan known;

  std::deque<MeasurementRecord> own;
  std::deque<MeasurementRecord> offspring;
  std::optional<MeasurementRecord> sampling;  // enters the queue at the next tick
  std::uint16_t next_seq = 0;
  std::uint16_t next_msg = 0;
  std::set<std::pair<NodeId, NodeId>> seen_headers;

  Duration t1_echo{0};
  Duration t2{0};
  EnergyCounts counts;
};

class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& cfg)
      : cfg_(cfg),
        topo_(validate_topology(cfg.topology)),
        hop_(service_delay_simplified(cfg.service) + cfg.d_prop),
        head_(cfg.accuracy, cfg.i_meas) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::int64_t> offset_dist(1'000'000, 11'000'000);
    std::uniform_int_distribution<std::int64_t> phase_dist(0, cfg.i_meas.count() - 1);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

    push(Duration{phase_dist(rng)}, kHead, Kind::Beacon);

    const std::uint32_t gamma0 = cfg.initial_gamma();
    BundlingPlan initial;
    for (NodeId id : topo_.sensor_nodes()) initial.set(id, gamma0);
    current_ = {0, std::make_shared<const BundlingPlan>(initial)};
    trace_.plans.push_back({Duration::zero(), 0, initial});

    for (NodeId id : topo_.sensor_nodes()) {
      Node n;
      n.id = id;
      n.parent = topo_.parent(id);
      n.children = topo_.children(id);
      auto drift = cfg.drifts_ppm.find(id);
      n.clock.drift_ppm = drift == cfg.drifts_ppm.end() ? 0.0 : drift->second;
      n.clock.offset = Duration{offset_dist(rng)};
      n.clock.wander_ppm = cfg.wander_ppm;
      n.clock.wander_period = cfg.wander_period;
      n.clock.wander_phase = angle(rng);
      const Duration start = local_time(n.clock, Duration::zero());
      n.tick_local = start + Duration{phase_dist(rng)};
      n.beacon_local = start + Duration{phase_dist(rng)};
      n.gamma = gamma0;
      n.known = current_;
      push(true_time_at(n.clock, n.tick_local), id, Kind::Tick);
      push(true_time_at(n.clock, n.beacon_local), id, Kind::Beacon);
      trace_.counts[id] = {};
      trace_.generated[id] = 0;
      trace_.delivered[id] = {};
      nodes_.emplace(id, std::move(n));
    }
    for (std::size_t k = 0; k < cfg.schedule.size(); ++k) push(cfg.schedule[k].at, kHead, Kind::Requirement, k);

    trace_.topology = topo_;
    trace_.schedule = cfg.schedule;
    trace_.i_meas = cfg.i_meas;
    trace_.duration = cfg.duration;
    trace_.mode = cfg.mode;
    trace_.energy = cfg.energy;
  }

  TraceSet run() {
    while (!queue_.empty() && queue_.top().at < cfg_.duration) {
      const Event ev = queue_.top();
      queue_.pop();
      switch (ev.kind) {
        case Kind::Requirement: on_requirement(ev.payload, ev.at); break;
        case Kind::Arrival: on_arrival(ev.node, ev.payload, ev.at); break;
        case Kind::Beacon: on_beacon(ev.node, ev.at); break;
        case Kind::Tick: on_tick(nodes_.at(ev.node), ev.at); break;
      }
    }
    for (auto& [id, n] : nodes_) trace_.counts[id] = n.counts;
    trace_.head_events = head_.events();
    return std::move(trace_);
  }

 private:
  void push(Duration at, NodeId node, Kind kind, std::uint64_t payload = 0) {
    queue_.push({at, node, kind, next_event_++, payload});
  }

  void on_requirement(std::uint64_t index, Duration now) {
    if (!cfg_.optimize) return;
    auto decision = head_.set_requirement(cfg_.schedule[index].req, now);
    if (decision) adopt(*decision, now);
  }

  void adopt(const PerformanceMaintainer::Decision& d, Duration now) {
    const std::uint64_t rev = current_.revision + 1;
    current_ = {rev, std::make_shared<const BundlingPlan>(d.plan)};
    trace_.plans.push_back({now, rev, d.plan});
  }

  void on_beacon(NodeId id, Duration now) {
    if (id == kHead) {
      for (NodeId c : topo_.children(kHead)) deliver_beacon(nodes_.at(c), current_, now, now);
      push(now + cfg_.i_meas, kHead, Kind::Beacon);
      return;
    }
    Node& n = nodes_.at(id);
    for (NodeId c : n.children) deliver_beacon(nodes_.at(c), n.known, n.t1_echo, now);
    n.beacon_local += cfg_.i_meas;
    push(true_time_at(n.clock, n.beacon_local), id, Kind::Beacon);
  }

  void deliver_beacon(Node& n, const SharedPlan& plan, Duration t1, Duration now) {
    n.t1_echo = t1;
    n.t2 = local_time(n.clock, now);
    if (plan.revision <= n.known.revision) return;
    n.known = plan;
    if (plan.plan->contains(n.id)) n.pending = {{plan.plan->at(n.id), plan.revision}};
  }

  void on_tick(Node& n, Duration now) {
    if (n.sampling) n.own.push_back(*n.sampling);
    send_check(n, now);
    const std::uint16_t seq = n.next_seq++;
    n.sampling = MeasurementRecord{n.id, seq, local_time(n.clock, now),
                                   static_cast<std::uint16_t>(seq * 40503u + n.id * 257u)};
    ++trace_.generated[n.id];
    n.tick_local += cfg_.i_meas;
    push(true_time_at(n.clock, n.tick_local), n.id, Kind::Tick);
  }

  std::size_t occupancy(const Node& n) const { return n.own.size() + n.offspring.size(); }

  void send_check(Node& n, Duration now) {
    if (n.pending) {
      n.gamma = n.pending->first;
      trace_.applications.push_back({now, n.id, n.gamma, n.pending->second});
      n.pending.reset();
      // The bundle that was filling goes out whole rather than being split.
      if (occupancy(n) >= n.gamma) originate(n, std::min(occupancy(n), kMaxEntries), now);
    }
    while (occupancy(n) >= n.gamma) originate(n, n.gamma, now);
  }

  void originate(Node& n, std::size_t count, Duration now) {
    BundledMessage msg;
    msg.sender = n.id;
    msg.parent = n.parent;
    msg.seq = n.next_msg++;
    msg.entries.reserve(count);
    std::uint64_t own = 0;
    while (msg.entries.size() < count && !n.own.empty()) {
      msg.entries.push_back(n.own.front());
      n.own.pop_front();
      ++own;
    }
    while (msg.entries.size() < count && !n.offspring.empty()) {
      msg.entries.push_back(n.offspring.front());
      n.offspring.pop_front();
    }
    n.counts.alpha += own;
    ++n.counts.delta;
    transmit(n, std::move(msg), now, false);
  }

  void transmit(Node& n, BundledMessage msg, Duration now, bool forwarded) {
    msg.sync = {n.t1_echo, n.t2, local_time(n.clock, now)};
    const auto count = static_cast<std::uint16_t>(msg.entries.size());
    trace_.messages.push_back({now, n.id, Direction::Tx, count, forwarded});
    auto& origins = trace_.origins_sent[n.id];
    for (const auto& e : msg.entries) origins.insert(e.origin);
    const std::uint64_t key = next_payload_++;
    in_flight_.emplace(key, InFlight{encode(msg), n.id});
    push(now + hop_, n.parent, Kind::Arrival, key);
  }

  void on_arrival(NodeId to, std::uint64_t key, Duration now) {
    auto node = in_flight_.extract(key);
    InFlight& f = node.mapped();
    BundledMessage msg = decode(f.bytes);
    trace_.messages.push_back({now, to, Direction::Rx, static_cast<std::uint16_t>(msg.entries.size()), false});
    if (to == kHead) {
      on_head_arrival(msg, f.from, now);
      return;
    }

    Node& n = nodes_.at(to);
    // Carry entry timestamps over to this node's clock using the time they
    // spent at the sender.
    const Duration sent_here = local_time(n.clock, now) - hop_;
    for (auto& e : msg.entries) e.t_meas = sent_here - (msg.sync.t3 - e.t_meas);

    const bool first_contact = n.seen_headers.insert({msg.sender, msg.parent}).second;
    if (cfg_.mode == BundlingMode::SelfData || first_contact) {
      ++n.counts.gamma_fwd;
      transmit(n, std::move(msg), now, true);
      return;
    }
    for (const auto& e : msg.entries) n.offspring.push_back(e);
    send_check(n, now);
  }

  void on_head_arrival(const BundledMessage& msg, NodeId from, Duration now) {
    for (const auto& e : msg.entries) trace_.delivered[e.origin].push_back(e.seq);

    auto est = estimates_.find(from);
    if (est != estimates_.end()) {
      for (const auto& s : delay_calculator(now, msg, &est->second)) {
        trace_.delays.push_back(s);
        head_.observe_sample(s);
      }
    }

    if (msg.sender == from) {
      const SyncSample sample{now - hop_, msg.sync.t2, msg.sync.t3};
      auto prev = last_sync_.find(from);
      if (prev == last_sync_.end()) {
        estimates_[from] = update_skew(std::nullopt, sample, std::nullopt);
        last_sync_[from] = sample;
      } else if (sample.t1 != prev->second.t1) {
        estimates_[from] = update_skew(estimates_.at(from), sample, prev->second);
        prev->second = sample;
      }
    }

    if (!cfg_.optimize) return;
    auto decision = head_.observe_message(msg, now);
    if (decision) adopt(*decision, now);
  }

  const ScenarioConfig& cfg_;
  Topology topo_;
  Duration hop_;
  PerformanceMaintainer head_;
  SharedPlan current_;
  std::map<NodeId, Node> nodes_;
  std::map<NodeId, SkewEstimate> estimates_;
  std::map<NodeId, SyncSample> last_sync_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_event_ = 0;
  std::uint64_t next_payload_ = 0;
  std::unordered_map<std::uint64_t, InFlight> in_flight_;
  TraceSet trace_;
};

}  // namespace

TraceSet run(const ScenarioConfig& cfg) {
  cfg.validate();
  return Simulation(cfg).run();
}

}  // namespace optbundle
