// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dehn
{

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an evaluator or a violated precondition.
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// A constructed object failed one of its invariants.
class InvariantError : public Error
{
  public:
    using Error::Error;
};

/// A formula hit a vanishing denominator.
class SingularityError : public Error
{
  public:
    SingularityError(const std::string& what, double location)
        : Error(what), location_(location)
    {
    }
    double location() const noexcept { return location_; }

  private:
    double location_;
};

/// Numerical procedure failed (integrator underflow, ambiguous rank, ...).
class NumericalError : public Error
{
  public:
    using Error::Error;
};

/// Formats a double with 17 significant digits (round-trip exact).
inline std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Exact half-integer: stores twice the value.
class HalfInt
{
  public:
    constexpr HalfInt() = default;
    static constexpr HalfInt fromTwice(int twice) { return HalfInt(twice); }
    static constexpr HalfInt fromInt(int v) { return HalfInt(2 * v); }

    constexpr int twice() const { return twice_; }
    constexpr bool isInteger() const { return twice_ % 2 == 0; }
    int toInt() const
    {
        if (!isInteger())
            throw DomainError("half-integer " + str() + " is not an integer");
        return twice_ / 2;
    }
    constexpr double value() const { return 0.5 * twice_; }
    std::string str() const
    {
        if (isInteger())
            return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

    constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
    constexpr HalfInt operator-() const { return HalfInt(-twice_); }
    constexpr HalfInt& operator+=(HalfInt o)
    {
        twice_ += o.twice_;
        return *this;
    }
    constexpr bool operator==(const HalfInt&) const = default;

  private:
    constexpr explicit HalfInt(int twice) : twice_(twice) {}
    int twice_ = 0;
};

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

} // namespace dehn
