#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace i3kit {

/// Exact rational number. Quantiles are multiples of 1/(10*N) for a stratum of
/// size N, so they are kept as reduced int64 fractions and only converted to
/// double at output boundaries.
class Fraction {
public:
    constexpr Fraction() = default;

    Fraction(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0)
            throw std::invalid_argument("Fraction: zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    static Fraction whole(std::int64_t n) { return Fraction(n, 1); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Fraction operator+(const Fraction& o) const {
        const std::int64_t g = std::gcd(den_, o.den_);
        const __int128 lcm = static_cast<__int128>(den_ / g) * o.den_;
        const __int128 s = static_cast<__int128>(num_) * (o.den_ / g) +
                           static_cast<__int128>(o.num_) * (den_ / g);
        return reduce128(s, lcm);
    }

    Fraction operator-(const Fraction& o) const { return *this + Fraction(-o.num_, o.den_); }

    Fraction& operator+=(const Fraction& o) { return *this = *this + o; }

    friend bool operator==(const Fraction& a, const Fraction& b) = default;

    std::strong_ordering operator<=>(const Fraction& o) const {
        const __int128 lhs = static_cast<__int128>(num_) * o.den_;
        const __int128 rhs = static_cast<__int128>(o.num_) * den_;
        if (lhs < rhs)
            return std::strong_ordering::less;
        if (lhs > rhs)
            return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    static Fraction reduce128(__int128 num, __int128 den) {
        __int128 a = num < 0 ? -num : num;
        __int128 b = den;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            num /= a;
            den /= a;
        }
        constexpr __int128 lo = INT64_MIN;
        constexpr __int128 hi = INT64_MAX;
        if (num < lo || num > hi || den > hi)
            throw std::overflow_error("Fraction: overflow");
        Fraction f;
        f.num_ = static_cast<std::int64_t>(num);
        f.den_ = static_cast<std::int64_t>(den);
        return f;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace i3kit
