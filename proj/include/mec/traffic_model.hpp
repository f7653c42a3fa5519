#pragma once

// Closed-form metro/core traffic versus firm-task rate for three offloading
// strategies. Arithmetic is exact over rationals.

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace mec::traffic {

class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  // Exact for decimals with at most six fractional digits.
  static Rational from_decimal(double value);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  // Decimal rendering; exact when the denominator divides 10^3, otherwise
  // rounded to three places.
  std::string to_string() const;

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational min(Rational a, Rational b);
Rational max(Rational a, Rational b);

enum class Strategy : std::uint8_t { Dynamic, CloudOnly, NoOffloading };

std::string to_string(Strategy s);

struct TrafficParams {
  Rational capacity_tasks_per_s{100};
  Rational task_bits{10'000};
  Rational sync_period_s{1, 2};
  Rational sync_bits{10'000};
  Rational ratio{1};

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Soft tasks per second diverted to the cloud once firm plus soft demand
// exceeds edge capacity. Firm tasks never spill.
Rational cloud_bound_soft_rate(Rational firm_rate, const TrafficParams& p);

// Kbits per second crossing the metro/core segment.
Rational metro_core_traffic(Strategy strategy, Rational firm_rate, const TrafficParams& p);

struct SweepRow {
  Rational firm_rate;
  Rational traffic_kbits_per_s;
  Strategy strategy;
  Rational ratio;
};

std::vector<SweepRow> sweep(Strategy strategy, const std::vector<Rational>& firm_rates,
                            const TrafficParams& p);

}  // namespace mec::traffic
