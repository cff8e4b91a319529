#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ptg {

/// Exact rational number. Expression templates are disabled so that `auto`
/// always yields a value.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses "n", "n/d", or a decimal literal such as "0.25" or "1e-9" into an
/// exact rational. Throws DomainError on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Renders as "num/den" (denominator always present, e.g. "2/1").
std::string to_fraction_string(const Rational& r);

/// "1", "-3", "5/6": the denominator only when it is not 1.
std::string to_short_string(const Rational& r);

/// Decimal rendering for presentation only.
std::string to_decimal_string(const Rational& r, int digits = 12);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

Integer floor_of(const Rational& r);

/// Largest integer <= r, as an int. Precondition: fits in int.
int floor_int(const Rational& r);

/// Value in nonnegative rationals extended with +infinity.
class ExtendedRational {
 public:
  ExtendedRational() = default;
  ExtendedRational(Rational v) : value_(std::move(v)) {}  // NOLINT(implicit)
  static ExtendedRational infinity() {
    ExtendedRational e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }
  const Rational& value() const {
    if (infinite_) throw std::logic_error("value() on infinite ExtendedRational");
    return value_;
  }

  friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

  std::string to_string() const { return infinite_ ? "inf" : to_fraction_string(value_); }

 private:
  Rational value_{0};
  bool infinite_ = false;
};

}  // namespace ptg
