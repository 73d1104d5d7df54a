#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace submaslov {

/// Exact half-integer arithmetic (values k/2, k ∈ ℤ).
///
/// Maslov indices are half-integers; storing twice the value keeps all
/// comparisons and sums exact, with no float round-off ambiguity.
class HalfInt {
public:
    constexpr HalfInt() = default;
    static constexpr HalfInt from_twice(std::int64_t twice) { return HalfInt(twice); }
    static constexpr HalfInt whole(std::int64_t k) { return HalfInt(2 * k); }

    constexpr std::int64_t twice() const { return twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    constexpr double value() const { return 0.5 * static_cast<double>(twice_); }

    /// Numerator/denominator in lowest terms (denominator 1 or 2).
    constexpr std::int64_t numerator() const { return is_integer() ? twice_ / 2 : twice_; }
    constexpr std::int64_t denominator() const { return is_integer() ? 1 : 2; }

    constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
    constexpr HalfInt operator-() const { return HalfInt(-twice_); }
    constexpr HalfInt& operator+=(HalfInt o) { twice_ += o.twice_; return *this; }
    constexpr HalfInt& operator-=(HalfInt o) { twice_ -= o.twice_; return *this; }
    constexpr bool operator==(const HalfInt&) const = default;
    constexpr auto operator<=>(const HalfInt&) const = default;

    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

private:
    explicit constexpr HalfInt(std::int64_t twice) : twice_(twice) {}
    std::int64_t twice_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, HalfInt h) { return os << h.str(); }

} // namespace submaslov
