#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace msl {

/// Exact half-integer, stored as its doubled value. All index arithmetic in
/// the library goes through this type so equality tests are exact.
class HalfInt {
public:
    constexpr HalfInt() = default;
    constexpr explicit HalfInt(long long whole) : doubled_(2 * whole) {}

    static constexpr HalfInt from_doubled(long long d) {
        HalfInt h;
        h.doubled_ = d;
        return h;
    }

    constexpr long long doubled() const { return doubled_; }
    constexpr bool is_integer() const { return doubled_ % 2 == 0; }

    /// Integer value; throws if the value is a strict half-integer.
    constexpr long long integer() const {
        if (!is_integer()) throw std::logic_error("HalfInt: not an integer");
        return doubled_ / 2;
    }

    double value() const { return 0.5 * static_cast<double>(doubled_); }

    constexpr HalfInt operator-() const { return from_doubled(-doubled_); }
    constexpr HalfInt operator+(HalfInt o) const { return from_doubled(doubled_ + o.doubled_); }
    constexpr HalfInt operator-(HalfInt o) const { return from_doubled(doubled_ - o.doubled_); }
    constexpr HalfInt& operator+=(HalfInt o) {
        doubled_ += o.doubled_;
        return *this;
    }
    constexpr HalfInt& operator-=(HalfInt o) {
        doubled_ -= o.doubled_;
        return *this;
    }
    constexpr HalfInt operator*(long long k) const { return from_doubled(doubled_ * k); }

    constexpr auto operator<=>(const HalfInt&) const = default;

    HalfInt abs() const { return from_doubled(doubled_ < 0 ? -doubled_ : doubled_); }

    std::string str() const {
        if (is_integer()) return std::to_string(doubled_ / 2);
        return std::to_string(doubled_) + "/2";
    }

private:
    long long doubled_ = 0;
};

inline HalfInt half(long long doubled) { return HalfInt::from_doubled(doubled); }

} // namespace msl
