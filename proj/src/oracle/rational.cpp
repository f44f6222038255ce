#include <algorithm>
#include <cmath>
#include <numeric>

#include "coplan/oracle.hpp"

namespace coplan::oracle {

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const auto g = std::gcd(n, d);
  num_ = g ? n / g : 0;
  den_ = g ? d / g : 1;
}

Rational Rational::from_decimal(double x) {
  std::int64_t den = 1;
  for (int digits = 0; digits <= 9; ++digits, den *= 10) {
    const double scaled = x * static_cast<double>(den);
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) < 1e-9 * std::max(1.0, std::abs(scaled))) {
      return Rational(static_cast<std::int64_t>(rounded), den);
    }
  }
  throw std::invalid_argument("parameter " + std::to_string(x) + " is not a short decimal");
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

Rational operator-(const Rational& a, const Rational& b) {
  return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
}

Rational operator*(const Rational& a, const Rational& b) { return {a.num_ * b.num_, a.den_ * b.den_}; }

Rational operator/(const Rational& a, const Rational& b) { return {a.num_ * b.den_, a.den_ * b.num_}; }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return a.num_ * b.den_ <=> b.num_ * a.den_;
}

bool matches(double value, const Rational& exact) {
  return std::abs(value - exact.to_double()) <= 1e-9 * std::max(1.0, std::abs(exact.to_double()));
}

Rational exact_tdc(const FlightPlan& plan, const FlightRequest& request, const Rational& alpha) {
  return alpha * Rational(plan.arrival() - request.arrival) +
         (Rational(1) - alpha) * Rational(plan.departure - request.departure);
}

Rational exact_fairness(std::span<const FlightPlan> before, std::span<const FlightPlan> after) {
  if (before.size() != after.size()) throw std::invalid_argument("fairness: plan lists differ in size");
  std::optional<Rational> hi, lo;
  for (const auto& a : after) {
    const FlightPlan* b = nullptr;
    for (const auto& p : before) {
      if (p.flight == a.flight) b = &p;
    }
    if (!b) throw std::invalid_argument("fairness: flight " + std::to_string(a.flight) + " has no proposal");
    const Rational rho(path_length(a), path_length(*b));
    if (!hi || rho > *hi) hi = rho;
    if (!lo || rho < *lo) lo = rho;
  }
  return hi ? *hi - *lo : Rational(0);
}

}  // namespace coplan::oracle
