#include "mec/traffic_model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace mec::traffic {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

Rational Rational::from_decimal(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite rational");
  constexpr std::int64_t kScale = 1'000'000;
  return {std::llround(value * kScale), kScale};
}

std::string Rational::to_string() const {
  if (den_ == 1) return fmt::format("{}", num_);
  if (1000 % den_ == 0) {
    const std::int64_t scaled = num_ * (1000 / den_);
    const std::int64_t whole = scaled / 1000;
    const std::int64_t frac = std::abs(scaled % 1000);
    std::string s = fmt::format("{}{}.{:03}", scaled < 0 && whole == 0 ? "-" : "", whole, frac);
    while (s.back() == '0') s.pop_back();
    return s;
  }
  return fmt::format("{:.3f}", to_double());
}

Rational operator+(Rational a, Rational b) {
  const std::int64_t g = std::lcm(a.den_, b.den_);
  return {a.num_ * (g / a.den_) + b.num_ * (g / b.den_), g};
}

Rational operator-(Rational a, Rational b) { return a + Rational(-b.num_, b.den_); }

Rational operator*(Rational a, Rational b) {
  const std::int64_t g1 = std::gcd(a.num_, b.den_);
  const std::int64_t g2 = std::gcd(b.num_, a.den_);
  const std::int64_t d1 = g1 ? g1 : 1;
  const std::int64_t d2 = g2 ? g2 : 1;
  return {(a.num_ / d1) * (b.num_ / d2), (a.den_ / d2) * (b.den_ / d1)};
}

Rational operator/(Rational a, Rational b) {
  if (b.num_ == 0) throw std::domain_error("division by zero rational");
  return a * Rational(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
}

Rational min(Rational a, Rational b) { return b < a ? b : a; }
Rational max(Rational a, Rational b) { return a < b ? b : a; }

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Dynamic: return "dynamic";
    case Strategy::CloudOnly: return "cloud_only";
    case Strategy::NoOffloading: return "no_offloading";
  }
  return "?";
}

void TrafficParams::validate() const {
  if (capacity_tasks_per_s < Rational(1)) throw std::invalid_argument("capacity_tasks_per_s must be >= 1");
  if (task_bits <= Rational(0)) throw std::invalid_argument("task_bits must be positive");
  if (sync_period_s <= Rational(0)) throw std::invalid_argument("sync_period_s must be positive");
  if (sync_bits < Rational(0)) throw std::invalid_argument("sync_bits must be non-negative");
  if (ratio < Rational(0)) throw std::invalid_argument("ratio must be non-negative");
}

Rational cloud_bound_soft_rate(Rational firm_rate, const TrafficParams& p) {
  if (firm_rate < Rational(0)) throw std::invalid_argument("firm rate must be non-negative");
  const Rational soft = p.ratio * firm_rate;
  return min(soft, max(Rational(0), firm_rate + soft - p.capacity_tasks_per_s));
}

Rational metro_core_traffic(Strategy strategy, Rational firm_rate, const TrafficParams& p) {
  if (firm_rate < Rational(0)) throw std::invalid_argument("firm rate must be non-negative");
  const Rational kbit(1000);
  switch (strategy) {
    case Strategy::CloudOnly:
      return (firm_rate + p.ratio * firm_rate) * p.task_bits / kbit;
    case Strategy::Dynamic:
      return (cloud_bound_soft_rate(firm_rate, p) * p.task_bits + p.sync_bits / p.sync_period_s) / kbit;
    case Strategy::NoOffloading:
      return Rational(0);
  }
  throw std::invalid_argument("unknown strategy");
}

std::vector<SweepRow> sweep(Strategy strategy, const std::vector<Rational>& firm_rates,
                            const TrafficParams& p) {
  if (firm_rates.empty()) throw std::invalid_argument("empty firm-rate range");
  std::vector<SweepRow> rows;
  rows.reserve(firm_rates.size());
  for (std::size_t i = 0; i < firm_rates.size(); ++i) {
    if (i && firm_rates[i] <= firm_rates[i - 1]) {
      throw std::invalid_argument("firm-rate range must be ascending");
    }
    rows.push_back({firm_rates[i], metro_core_traffic(strategy, firm_rates[i], p), strategy, p.ratio});
  }
  return rows;
}

}  // namespace mec::traffic
