#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace harmonic {

/// Exact fraction with a positive, reduced denominator.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den)
    {
        if (den_ == 0) {
            throw std::invalid_argument("Rational: zero denominator");
        }
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        auto g = std::gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }

    constexpr double to_double() const
    {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    std::string to_string() const
    {
        if (den_ == 1) {
            return std::to_string(num_);
        }
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend constexpr Rational operator+(Rational a, Rational b)
    {
        auto l = std::lcm(a.den_, b.den_);
        return {a.num_ * (l / a.den_) + b.num_ * (l / b.den_), l};
    }

    friend constexpr Rational operator*(Rational a, Rational b)
    {
        return {a.num_ * b.num_, a.den_ * b.den_};
    }

    friend constexpr bool operator==(Rational a, Rational b) = default;

    friend constexpr std::strong_ordering operator<=>(Rational a, Rational b)
    {
        // Denominators are positive, so cross multiplication keeps the order.
        return a.num_ * b.den_ <=> b.num_ * a.den_;
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace harmonic
