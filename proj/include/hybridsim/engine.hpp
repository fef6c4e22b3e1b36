#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "hybridsim/virtual_time.hpp"

namespace hybridsim {

enum class EventKind : std::uint8_t {
  FlowStart,
  FlowStop,
  RateRecompute,
  ControlMessageDelivery,
  StatsPoll,
  QuiescenceCheck,
  MeasurementSample,
  ControlTimer,  // protocol timers (MRAI flushes); never counted as control activity
};
inline constexpr std::size_t kEventKindCount = 8;

std::string_view to_string(EventKind kind);

/// Total order over scheduled events: timestamp first, then scheduling sequence.
struct EventKey {
  VirtualTime time;
  std::uint64_t sequence = 0;
  auto operator<=>(const EventKey&) const = default;
};

class EventHandle {
 public:
  EventHandle() = default;
  explicit EventHandle(EventKey key) : key_(key) {}
  bool valid() const { return key_.has_value(); }
  const EventKey& key() const { return *key_; }
  bool operator==(const EventHandle&) const = default;

 private:
  std::optional<EventKey> key_;
};

struct Event {
  EventKey key;
  EventKind kind{};
  std::function<void()> action;
};

/// Pending events ordered by EventKey. Sequence numbers are assigned on push and
/// never reused, so keys are unique for the lifetime of the queue.
class EventQueue {
 public:
  EventKey push(VirtualTime at, EventKind kind, std::function<void()> action);
  bool erase(const EventKey& key);
  bool contains(const EventKey& key) const { return events_.count(key) != 0; }
  std::optional<EventKey> next_key() const;
  Event pop();

  bool empty() const { return events_.empty(); }
  std::size_t size() const { return events_.size(); }

 private:
  struct Pending {
    EventKind kind;
    std::function<void()> action;
  };
  std::map<EventKey, Pending> events_;
  std::uint64_t next_sequence_ = 0;
};

enum class Mode : std::uint8_t { Des, Fti };
std::string_view to_string(Mode mode);

enum class ModeTransition : std::uint8_t { None, DesToFti };

enum class StepOutcome : std::uint8_t {
  Idle,          // nothing left to do before the horizon
  ExecutedEvent, // DES: one event popped and executed
  FtiStep,       // FTI: clock advanced by one increment, due events drained
};

struct ModeChange {
  VirtualTime time;
  Mode mode{};
  bool operator==(const ModeChange&) const = default;
};

/// Hybrid clock state. While in FTI, `wall_anchor` and `virtual_anchor` pin the
/// wall-clock instant that corresponds to a virtual instant; every FTI step is
/// paced against that pair.
struct ModeController {
  Mode mode = Mode::Des;
  Duration fti_step = Duration::milliseconds(1);
  Duration quiescence_timeout = Duration::seconds(2);
  std::optional<VirtualTime> last_control_activity;
  std::chrono::steady_clock::time_point wall_anchor{};
  VirtualTime virtual_anchor;
};

/// Source of wall-clock time used for FTI pacing. Replaceable in tests.
class WallClock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  virtual ~WallClock() = default;
  virtual time_point now() = 0;
  virtual void sleep_until(time_point deadline) = 0;
};

class SteadyWallClock final : public WallClock {
 public:
  time_point now() override;
  void sleep_until(time_point deadline) override;
};

struct EngineConfig {
  Duration fti_step = Duration::milliseconds(1);
  Duration quiescence_timeout = Duration::seconds(2);
  // When false, FTI steps are not paced against the wall clock. Mode logic and
  // event order are unaffected.
  bool realtime = true;
  bool record_trace = false;
  bool check_invariants = false;
};

struct RunBounds {
  VirtualTime end;
};

struct TraceEntry {
  VirtualTime time;
  std::uint64_t sequence = 0;
  EventKind kind{};
  bool operator==(const TraceEntry&) const = default;
};

struct EngineReport {
  VirtualTime final_clock;
  std::chrono::nanoseconds wall_total{0};
  Duration virtual_des;
  Duration virtual_fti;
  // Wall time spent in FTI phases, each timed from its DES->FTI transition to
  // the wall instant DES resumes; the rest of wall_total is DES.
  std::chrono::nanoseconds wall_des{0};
  std::chrono::nanoseconds wall_fti{0};
  std::uint64_t events_executed = 0;
  std::array<std::uint64_t, kEventKindCount> events_by_kind{};
  std::uint64_t fti_steps = 0;
  std::uint64_t lag_steps = 0;
  std::chrono::nanoseconds lag_total{0};
  std::chrono::nanoseconds max_lag{0};
  std::uint64_t trace_digest = 0;
  std::vector<ModeChange> mode_trace;
};

/// Thread-safe queue of work submitted from outside the engine loop. The loop
/// drains it, in submission order, at every step boundary.
class ActivityInbox {
 public:
  void post(std::function<void()> work);
  std::vector<std::function<void()>> take_all();

 private:
  std::mutex mutex_;
  std::deque<std::function<void()>> pending_;
};

/// Single-threaded discrete-event core with a hybrid clock.
///
/// In DES mode the clock jumps to the timestamp of each executed event. In FTI
/// mode the clock advances by `fti_step` per step, each step paced so that virtual
/// time tracks wall time from the anchor set at the DES->FTI transition; all
/// events due within a step run as one batch, with the clock set to each event's
/// timestamp while it executes. Any control activity enters (or keeps) FTI; a
/// QuiescenceCheck firing `quiescence_timeout` after the latest activity returns
/// the engine to DES.
class Engine {
 public:
  explicit Engine(EngineConfig config = {}, std::shared_ptr<WallClock> wall = nullptr);

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  VirtualTime now() const { return clock_; }
  Mode mode() const { return modes_.mode; }
  const ModeController& mode_controller() const { return modes_; }
  const EngineConfig& config() const { return config_; }

  EventHandle schedule(VirtualTime at, EventKind kind, std::function<void()> action);
  EventHandle schedule_in(Duration delay, EventKind kind, std::function<void()> action) {
    return schedule(clock_ + delay, kind, std::move(action));
  }
  bool cancel(const EventHandle& handle);
  bool pending(const EventHandle& handle) const;
  std::size_t pending_count() const { return queue_.size(); }

  ModeTransition notify_control_activity(VirtualTime now);
  std::uint64_t activity_notifications() const { return activity_notifications_; }
  bool quiescence_check_pending() const { return pending(quiescence_check_); }

  StepOutcome step(VirtualTime horizon = VirtualTime::max());
  EngineReport run(const RunBounds& bounds);

  /// Snapshot of statistics so far. run() returns the same thing.
  EngineReport report() const;
  const std::vector<TraceEntry>& trace() const { return trace_; }
  const std::vector<ModeChange>& mode_trace() const { return mode_trace_; }

  ActivityInbox& inbox() { return inbox_; }

  /// Throws std::logic_error if the mode invariants are violated at the current clock.
  void check_mode_invariants() const;

 private:
  void execute(Event event);
  void drain_inbox();
  void record_mode(VirtualTime at, Mode mode);
  void on_quiescence_check();

  EngineConfig config_;
  std::shared_ptr<WallClock> wall_;
  EventQueue queue_;
  VirtualTime clock_;
  ModeController modes_;
  EventHandle quiescence_check_;
  ActivityInbox inbox_;

  std::uint64_t activity_notifications_ = 0;
  std::uint64_t events_executed_ = 0;
  std::array<std::uint64_t, kEventKindCount> events_by_kind_{};
  std::uint64_t fti_steps_ = 0;
  std::uint64_t lag_steps_ = 0;
  std::chrono::nanoseconds lag_total_{0};
  std::chrono::nanoseconds max_lag_{0};
  std::chrono::nanoseconds behind_{0};
  std::chrono::steady_clock::time_point fti_wall_start_{};  // open FTI stretch inside run()
  std::chrono::nanoseconds wall_fti_{0};
  std::chrono::nanoseconds wall_total_{0};
  std::uint64_t trace_digest_ = 0xcbf29ce484222325ULL;
  std::vector<TraceEntry> trace_;
  std::vector<ModeChange> mode_trace_;
};

/// Virtual time spent in each mode over [0, end], from a mode trace.
std::pair<Duration, Duration> mode_durations(const std::vector<ModeChange>& trace, VirtualTime end);

}  // namespace hybridsim
