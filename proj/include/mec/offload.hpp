#pragma once

// Application-driven dynamic task offloading: task classification,
// destination determination from monitored response times, periodic
// notification and terminal-side application of the decision.

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mec/int_codec.hpp"
#include "mec/task_model.hpp"

namespace mec::offload {

enum class AppAction : std::uint8_t { Attack, ItemUse, MonsterSelect, Custom };

struct TaskDescriptor {
  AppAction action = AppAction::Attack;
  std::optional<TaskClass> custom_class_hint;
};

// Attack -> Firm, ItemUse -> Soft, MonsterSelect -> NonRealTime, Custom ->
// its hint. Throws std::invalid_argument for Custom without a hint.
TaskClass classify(const TaskDescriptor& descriptor);

// NonRealTime work headed for an idle edge server runs as Soft.
TaskClass reclassify_nonrt(bool edge_idle, TaskClass task_class);

// Idle means fewer arrivals in the last second than idle_fraction of capacity.
bool edge_is_idle(std::uint64_t arrivals_last_second, std::uint64_t capacity_tasks_per_s,
                  double idle_fraction = 0.1);

struct Routes {
  SwitchPath edge;
  SwitchPath cloud;

  const SwitchPath& path(Destination d) const { return d == Destination::Edge ? edge : cloud; }
};

// Sliding window over the most recent edge-path response times.
class RtEstimator {
 public:
  static constexpr std::size_t kDefaultWindow = 10;

  explicit RtEstimator(std::size_t window = kDefaultWindow);

  void add(Nanos response_time_ns);
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return window_; }
  double mean_ns() const;
  // Exact integer form of mean <= threshold.
  bool mean_at_most(Nanos threshold_ns) const;

 private:
  std::size_t window_;
  std::deque<Nanos> samples_;
  unsigned __int128 sum_ = 0;
};

// Edge when the estimator is empty or its mean is at most the threshold.
Destination threshold_destination(const RtEstimator& estimator, Nanos threshold_ns);

class OffloadPolicy {
 public:
  virtual ~OffloadPolicy() = default;
  virtual Destination choose(const RtEstimator& estimator, Destination current) const = 0;
};

// The threshold rule. With a low threshold set, a Cloud decision returns to
// Edge only once the mean falls to the low threshold.
class ThresholdPolicy final : public OffloadPolicy {
 public:
  explicit ThresholdPolicy(Nanos threshold_ns, std::optional<Nanos> low_threshold_ns = std::nullopt);
  Destination choose(const RtEstimator& estimator, Destination current) const override;

 private:
  Nanos threshold_;
  std::optional<Nanos> low_;
};

struct OffloadDecision {
  Destination soft_destination = Destination::Edge;
  SwitchPath route;
  Nanos decided_at_ns = 0;
  std::uint64_t sequence_no = 0;

  friend bool operator==(const OffloadDecision&, const OffloadDecision&) = default;
};

// Owns the decision sequence counter on the edge side.
class DestinationController {
 public:
  DestinationController(Routes routes, std::unique_ptr<OffloadPolicy> policy);

  OffloadDecision decide(const RtEstimator& estimator, Nanos now_ns);
  // Used while dynamic offloading is switched off.
  OffloadDecision force(Destination destination, Nanos now_ns);

  const OffloadDecision& current() const { return current_; }
  const Routes& routes() const { return routes_; }

 private:
  OffloadDecision issue(Destination destination, Nanos now_ns);

  Routes routes_;
  std::unique_ptr<OffloadPolicy> policy_;
  OffloadDecision current_;
};

// Single-shot form of the threshold decision.
OffloadDecision decide(const RtEstimator& estimator, Nanos threshold_ns, const Routes& routes,
                       std::uint64_t previous_sequence_no, Nanos now_ns);

// Firm always runs at the edge, NonRealTime always in the cloud, Soft follows
// the active decision.
Destination route_for(Destination active_soft_destination, TaskClass task_class);

struct NotifyBody {
  Destination destination = Destination::Edge;
  std::uint64_t sequence_no = 0;

  friend bool operator==(const NotifyBody&, const NotifyBody&) = default;
};

constexpr std::size_t kNotifyBodyBytes = 9;
constexpr std::uint32_t kDefaultNotifyBits = 1000;

std::array<std::uint8_t, kNotifyBodyBytes> encode_notify_body(const NotifyBody& body);
NotifyBody decode_notify_body(std::span<const std::uint8_t> bytes);

// A Notify packet plus the body bytes its payload carries.
struct NotifyMessage {
  int_codec::WirePacket packet;
  std::vector<std::uint8_t> body;
};

NotifyMessage make_notification(const OffloadDecision& decision,
                                std::uint32_t notify_bits = kDefaultNotifyBits);

struct TerminalPolicyState {
  OffloadDecision active_decision;
  Nanos last_notify_at_ns = 0;
};

TerminalPolicyState initial_terminal_state(const Routes& routes);

// Adopts the carried decision only when its sequence number is newer. Throws
// std::invalid_argument for anything but a Notify packet.
TerminalPolicyState apply_notification(TerminalPolicyState state, const NotifyMessage& message,
                                       const Routes& routes, Nanos now_ns);

}  // namespace mec::offload
