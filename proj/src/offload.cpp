#include "mec/offload.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace mec::offload {

TaskClass classify(const TaskDescriptor& descriptor) {
  switch (descriptor.action) {
    case AppAction::Attack: return TaskClass::Firm;
    case AppAction::ItemUse: return TaskClass::Soft;
    case AppAction::MonsterSelect: return TaskClass::NonRealTime;
    case AppAction::Custom:
      if (!descriptor.custom_class_hint) {
        throw std::invalid_argument("custom task descriptor requires a class hint");
      }
      return *descriptor.custom_class_hint;
  }
  throw std::invalid_argument("unknown application action");
}

TaskClass reclassify_nonrt(bool edge_idle, TaskClass task_class) {
  return edge_idle && task_class == TaskClass::NonRealTime ? TaskClass::Soft : task_class;
}

bool edge_is_idle(std::uint64_t arrivals_last_second, std::uint64_t capacity_tasks_per_s,
                  double idle_fraction) {
  return static_cast<double>(arrivals_last_second) <
         idle_fraction * static_cast<double>(capacity_tasks_per_s);
}

RtEstimator::RtEstimator(std::size_t window) : window_(window) {
  if (window == 0) throw std::invalid_argument("estimator window must be positive");
}

void RtEstimator::add(Nanos response_time_ns) {
  samples_.push_back(response_time_ns);
  sum_ += response_time_ns;
  if (samples_.size() > window_) {
    sum_ -= samples_.front();
    samples_.pop_front();
  }
}

double RtEstimator::mean_ns() const {
  if (samples_.empty()) return 0.0;
  return static_cast<double>(sum_) / static_cast<double>(samples_.size());
}

bool RtEstimator::mean_at_most(Nanos threshold_ns) const {
  return sum_ <= static_cast<unsigned __int128>(threshold_ns) * samples_.size();
}

Destination threshold_destination(const RtEstimator& estimator, Nanos threshold_ns) {
  if (threshold_ns == 0) throw std::invalid_argument("threshold must be positive");
  if (estimator.empty() || estimator.mean_at_most(threshold_ns)) return Destination::Edge;
  return Destination::Cloud;
}

ThresholdPolicy::ThresholdPolicy(Nanos threshold_ns, std::optional<Nanos> low_threshold_ns)
    : threshold_(threshold_ns), low_(low_threshold_ns) {
  if (threshold_ns == 0) throw std::invalid_argument("threshold must be positive");
  if (low_ && *low_ > threshold_) {
    throw std::invalid_argument("low threshold exceeds threshold");
  }
}

Destination ThresholdPolicy::choose(const RtEstimator& estimator, Destination current) const {
  const Destination plain = threshold_destination(estimator, threshold_);
  if (low_ && current == Destination::Cloud && plain == Destination::Edge && !estimator.empty() &&
      !estimator.mean_at_most(*low_)) {
    return Destination::Cloud;
  }
  return plain;
}

DestinationController::DestinationController(Routes routes, std::unique_ptr<OffloadPolicy> policy)
    : routes_(std::move(routes)), policy_(std::move(policy)) {
  current_.soft_destination = Destination::Edge;
  current_.route = routes_.edge;
}

OffloadDecision DestinationController::issue(Destination destination, Nanos now_ns) {
  current_ = {destination, routes_.path(destination), now_ns, current_.sequence_no + 1};
  return current_;
}

OffloadDecision DestinationController::decide(const RtEstimator& estimator, Nanos now_ns) {
  return issue(policy_->choose(estimator, current_.soft_destination), now_ns);
}

OffloadDecision DestinationController::force(Destination destination, Nanos now_ns) {
  return issue(destination, now_ns);
}

OffloadDecision decide(const RtEstimator& estimator, Nanos threshold_ns, const Routes& routes,
                       std::uint64_t previous_sequence_no, Nanos now_ns) {
  const Destination d = threshold_destination(estimator, threshold_ns);
  return {d, routes.path(d), now_ns, previous_sequence_no + 1};
}

Destination route_for(Destination active_soft_destination, TaskClass task_class) {
  switch (task_class) {
    case TaskClass::Firm: return Destination::Edge;
    case TaskClass::NonRealTime: return Destination::Cloud;
    case TaskClass::Soft: return active_soft_destination;
  }
  return active_soft_destination;
}

std::array<std::uint8_t, kNotifyBodyBytes> encode_notify_body(const NotifyBody& body) {
  std::array<std::uint8_t, kNotifyBodyBytes> out{};
  out[0] = body.destination == Destination::Edge ? 0 : 1;
  for (int i = 0; i < 8; ++i) {
    out[1 + i] = static_cast<std::uint8_t>(body.sequence_no >> (56 - 8 * i));
  }
  return out;
}

NotifyBody decode_notify_body(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kNotifyBodyBytes) {
    throw std::invalid_argument(fmt::format("notify body is {} bytes, expected {}", bytes.size(),
                                            kNotifyBodyBytes));
  }
  if (bytes[0] > 1) throw std::invalid_argument(fmt::format("bad destination code {}", bytes[0]));
  NotifyBody body;
  body.destination = bytes[0] == 0 ? Destination::Edge : Destination::Cloud;
  for (int i = 0; i < 8; ++i) body.sequence_no = (body.sequence_no << 8) | bytes[1 + i];
  return body;
}

NotifyMessage make_notification(const OffloadDecision& decision, std::uint32_t notify_bits) {
  NotifyMessage m;
  m.packet.kind = PacketKind::Notify;
  m.packet.payload_bits = notify_bits;
  const auto body = encode_notify_body({decision.soft_destination, decision.sequence_no});
  m.body.assign(body.begin(), body.end());
  return m;
}

TerminalPolicyState initial_terminal_state(const Routes& routes) {
  TerminalPolicyState s;
  s.active_decision.soft_destination = Destination::Edge;
  s.active_decision.route = routes.edge;
  return s;
}

TerminalPolicyState apply_notification(TerminalPolicyState state, const NotifyMessage& message,
                                       const Routes& routes, Nanos now_ns) {
  if (message.packet.kind != PacketKind::Notify) {
    throw std::invalid_argument(
        fmt::format("cannot apply a {} packet as a notification", to_string(message.packet.kind)));
  }
  const NotifyBody body = decode_notify_body(message.body);
  state.last_notify_at_ns = now_ns;
  if (body.sequence_no > state.active_decision.sequence_no) {
    state.active_decision = {body.destination, routes.path(body.destination), now_ns,
                             body.sequence_no};
  }
  return state;
}

}  // namespace mec::offload
