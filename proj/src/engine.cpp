#include "hybridsim/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "hybridsim/errors.hpp"

namespace hybridsim {

Duration Duration::from_seconds(double s) { return Duration(static_cast<std::int64_t>(std::llround(s * 1e9))); }

std::string format_seconds(VirtualTime t) {
  std::int64_t ns = t.ns();
  std::string sign;
  if (ns < 0) {
    sign = "-";
    ns = -ns;
  }
  std::int64_t whole = ns / 1'000'000'000;
  std::int64_t frac = ns % 1'000'000'000;
  if (frac == 0) return fmt::format("{}{}", sign, whole);
  std::string digits = fmt::format("{:09d}", frac);
  while (!digits.empty() && digits.back() == '0') digits.pop_back();
  return fmt::format("{}{}.{}", sign, whole, digits);
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::FlowStart: return "FlowStart";
    case EventKind::FlowStop: return "FlowStop";
    case EventKind::RateRecompute: return "RateRecompute";
    case EventKind::ControlMessageDelivery: return "ControlMessageDelivery";
    case EventKind::StatsPoll: return "StatsPoll";
    case EventKind::QuiescenceCheck: return "QuiescenceCheck";
    case EventKind::MeasurementSample: return "MeasurementSample";
    case EventKind::ControlTimer: return "ControlTimer";
  }
  return "?";
}

std::string_view to_string(Mode mode) { return mode == Mode::Des ? "DES" : "FTI"; }

// ---------------------------------------------------------------------------

EventKey EventQueue::push(VirtualTime at, EventKind kind, std::function<void()> action) {
  EventKey key{at, next_sequence_++};
  events_.emplace(key, Pending{kind, std::move(action)});
  return key;
}

bool EventQueue::erase(const EventKey& key) { return events_.erase(key) != 0; }

std::optional<EventKey> EventQueue::next_key() const {
  if (events_.empty()) return std::nullopt;
  return events_.begin()->first;
}

Event EventQueue::pop() {
  auto node = events_.extract(events_.begin());
  return Event{node.key(), node.mapped().kind, std::move(node.mapped().action)};
}

// ---------------------------------------------------------------------------

WallClock::time_point SteadyWallClock::now() { return std::chrono::steady_clock::now(); }

void SteadyWallClock::sleep_until(time_point deadline) { std::this_thread::sleep_until(deadline); }

void ActivityInbox::post(std::function<void()> work) {
  std::lock_guard lock(mutex_);
  pending_.push_back(std::move(work));
}

std::vector<std::function<void()>> ActivityInbox::take_all() {
  std::lock_guard lock(mutex_);
  std::vector<std::function<void()>> out(std::make_move_iterator(pending_.begin()),
                                         std::make_move_iterator(pending_.end()));
  pending_.clear();
  return out;
}

// ---------------------------------------------------------------------------

Engine::Engine(EngineConfig config, std::shared_ptr<WallClock> wall)
    : config_(config), wall_(wall ? std::move(wall) : std::make_shared<SteadyWallClock>()) {
  if (config_.fti_step <= Duration()) throw std::invalid_argument("fti_step must be positive");
  if (config_.quiescence_timeout <= Duration()) throw std::invalid_argument("quiescence_timeout must be positive");
  modes_.fti_step = config_.fti_step;
  modes_.quiescence_timeout = config_.quiescence_timeout;
  mode_trace_.push_back({VirtualTime::zero(), Mode::Des});
}

EventHandle Engine::schedule(VirtualTime at, EventKind kind, std::function<void()> action) {
  if (at < clock_) {
    throw SchedulingInPast(fmt::format("cannot schedule {} at {}s, clock is {}s", to_string(kind),
                                       format_seconds(at), format_seconds(clock_)));
  }
  return EventHandle(queue_.push(at, kind, std::move(action)));
}

bool Engine::cancel(const EventHandle& handle) { return handle.valid() && queue_.erase(handle.key()); }

bool Engine::pending(const EventHandle& handle) const { return handle.valid() && queue_.contains(handle.key()); }

ModeTransition Engine::notify_control_activity(VirtualTime now) {
  if (now < clock_) {
    throw SchedulingInPast(fmt::format("control activity at {}s precedes clock {}s", format_seconds(now),
                                       format_seconds(clock_)));
  }
  ++activity_notifications_;
  modes_.last_control_activity = now;

  ModeTransition transition = ModeTransition::None;
  if (modes_.mode == Mode::Des) {
    modes_.mode = Mode::Fti;
    modes_.wall_anchor = wall_->now();
    modes_.virtual_anchor = now;
    fti_wall_start_ = modes_.wall_anchor;
    behind_ = std::chrono::nanoseconds(0);
    record_mode(now, Mode::Fti);
    transition = ModeTransition::DesToFti;
  }

  cancel(quiescence_check_);
  quiescence_check_ = schedule(now + modes_.quiescence_timeout, EventKind::QuiescenceCheck,
                               [this] { on_quiescence_check(); });
  return transition;
}

void Engine::on_quiescence_check() {
  // Stale checks are cancelled on every notification, but guard anyway: only a
  // check due exactly one timeout after the latest activity ends the FTI phase.
  if (modes_.mode != Mode::Fti || !modes_.last_control_activity) return;
  if (clock_ != *modes_.last_control_activity + modes_.quiescence_timeout) return;
  modes_.mode = Mode::Des;
  wall_fti_ += wall_->now() - fti_wall_start_;
  record_mode(clock_, Mode::Des);
}

void Engine::record_mode(VirtualTime at, Mode mode) {
  // Zero-length phases collapse, so the trace is exactly the union of
  // half-open FTI intervals.
  if (!mode_trace_.empty() && mode_trace_.back().time == at) {
    mode_trace_.back().mode = mode;
    if (mode_trace_.size() >= 2 && mode_trace_[mode_trace_.size() - 2].mode == mode) mode_trace_.pop_back();
    return;
  }
  if (!mode_trace_.empty() && mode_trace_.back().mode == mode) return;
  mode_trace_.push_back({at, mode});
}

void Engine::execute(Event event) {
  clock_ = event.key.time;
  ++events_executed_;
  ++events_by_kind_[static_cast<std::size_t>(event.kind)];
  for (std::uint64_t word : {static_cast<std::uint64_t>(event.key.time.ns()), event.key.sequence,
                             static_cast<std::uint64_t>(event.kind)}) {
    trace_digest_ ^= word;
    trace_digest_ *= 0x100000001b3ULL;
  }
  if (config_.record_trace) trace_.push_back({event.key.time, event.key.sequence, event.kind});
  if (event.action) event.action();
}

void Engine::drain_inbox() {
  for (auto& work : inbox_.take_all()) work();
}

void Engine::check_mode_invariants() const {
  if (modes_.mode == Mode::Fti) {
    if (!modes_.last_control_activity) throw std::logic_error("FTI mode without control activity");
    if (clock_ - *modes_.last_control_activity >= modes_.quiescence_timeout)
      throw std::logic_error(fmt::format("FTI mode at {}s after quiescence", format_seconds(clock_)));
  } else if (modes_.last_control_activity &&
             clock_ - *modes_.last_control_activity < modes_.quiescence_timeout) {
    throw std::logic_error(fmt::format("DES mode at {}s within quiescence timeout", format_seconds(clock_)));
  }
}

StepOutcome Engine::step(VirtualTime horizon) {
  drain_inbox();
  if (config_.check_invariants) check_mode_invariants();

  const auto wall_start = wall_->now();
  if (modes_.mode == Mode::Des) {
    auto next = queue_.next_key();
    if (!next || next->time > horizon) return StepOutcome::Idle;
    execute(queue_.pop());
    return StepOutcome::ExecutedEvent;
  }

  if (clock_ >= horizon) return StepOutcome::Idle;
  const VirtualTime target = std::min(clock_ + modes_.fti_step, horizon);
  if (config_.realtime) {
    const auto deadline = modes_.wall_anchor + std::chrono::nanoseconds((target - modes_.virtual_anchor).ns());
    const auto behind = std::max(std::chrono::nanoseconds(0), wall_start - deadline);
    if (behind > std::chrono::nanoseconds(0)) {
      ++lag_steps_;
      max_lag_ = std::max(max_lag_, behind);
      if (behind > behind_) lag_total_ += behind - behind_;
    } else {
      wall_->sleep_until(deadline);
    }
    behind_ = behind;
  }
  ++fti_steps_;
  while (auto next = queue_.next_key()) {
    if (next->time > target) break;
    execute(queue_.pop());
  }
  clock_ = target;
  return StepOutcome::FtiStep;
}

EngineReport Engine::run(const RunBounds& bounds) {
  const auto wall_start = wall_->now();
  if (modes_.mode == Mode::Fti) fti_wall_start_ = wall_start;
  while (step(bounds.end) != StepOutcome::Idle) {
  }
  if (clock_ < bounds.end) clock_ = bounds.end;
  const auto wall_end = wall_->now();
  if (modes_.mode == Mode::Fti) wall_fti_ += wall_end - fti_wall_start_;
  wall_total_ += wall_end - wall_start;
  return report();
}

EngineReport Engine::report() const {
  EngineReport r;
  r.final_clock = clock_;
  r.wall_total = wall_total_;
  std::tie(r.virtual_des, r.virtual_fti) = mode_durations(mode_trace_, clock_);
  r.wall_des = wall_total_ - wall_fti_;
  r.wall_fti = wall_fti_;
  r.events_executed = events_executed_;
  r.events_by_kind = events_by_kind_;
  r.fti_steps = fti_steps_;
  r.lag_steps = lag_steps_;
  r.lag_total = lag_total_;
  r.max_lag = max_lag_;
  r.trace_digest = trace_digest_;
  r.mode_trace = mode_trace_;
  return r;
}

std::pair<Duration, Duration> mode_durations(const std::vector<ModeChange>& trace, VirtualTime end) {
  Duration des, fti;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].time >= end) break;
    VirtualTime until = (i + 1 < trace.size()) ? std::min(trace[i + 1].time, end) : end;
    (trace[i].mode == Mode::Des ? des : fti) += until - trace[i].time;
  }
  return {des, fti};
}

}  // namespace hybridsim
