#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace hybridsim {

/// Simulated duration in nanoseconds. Signed so that differences are well defined.
class Duration {
 public:
  constexpr Duration() = default;
  constexpr explicit Duration(std::int64_t ns) : ns_(ns) {}

  static constexpr Duration nanoseconds(std::int64_t ns) { return Duration(ns); }
  static constexpr Duration milliseconds(std::int64_t ms) { return Duration(ms * 1'000'000); }
  static constexpr Duration seconds(std::int64_t s) { return Duration(s * 1'000'000'000); }
  // Rounds to the nearest nanosecond.
  static Duration from_seconds(double s);

  constexpr std::int64_t ns() const { return ns_; }
  constexpr double to_seconds() const { return static_cast<double>(ns_) * 1e-9; }

  constexpr auto operator<=>(const Duration&) const = default;
  constexpr Duration operator+(Duration o) const { return Duration(ns_ + o.ns_); }
  constexpr Duration operator-(Duration o) const { return Duration(ns_ - o.ns_); }
  constexpr Duration operator*(std::int64_t k) const { return Duration(ns_ * k); }
  constexpr Duration& operator+=(Duration o) {
    ns_ += o.ns_;
    return *this;
  }

 private:
  std::int64_t ns_ = 0;
};

/// Point on the experiment's virtual clock, nanoseconds since experiment start.
///
/// 64-bit nanoseconds cover roughly 292 years, far beyond any experiment length.
class VirtualTime {
 public:
  constexpr VirtualTime() = default;
  constexpr explicit VirtualTime(std::int64_t ns) : ns_(ns) {}

  static constexpr VirtualTime zero() { return VirtualTime(0); }
  static constexpr VirtualTime max() { return VirtualTime(std::numeric_limits<std::int64_t>::max()); }
  static VirtualTime from_seconds(double s) { return VirtualTime(Duration::from_seconds(s).ns()); }

  constexpr std::int64_t ns() const { return ns_; }
  constexpr double to_seconds() const { return static_cast<double>(ns_) * 1e-9; }

  constexpr auto operator<=>(const VirtualTime&) const = default;
  constexpr VirtualTime operator+(Duration d) const { return VirtualTime(ns_ + d.ns()); }
  constexpr VirtualTime operator-(Duration d) const { return VirtualTime(ns_ - d.ns()); }
  constexpr Duration operator-(VirtualTime o) const { return Duration(ns_ - o.ns_); }

 private:
  std::int64_t ns_ = 0;
};

/// Exact decimal seconds with trailing zeros trimmed ("1.5", "30", "0.001").
std::string format_seconds(VirtualTime t);

}  // namespace hybridsim
