// rational.hpp — arbitrary-precision integers and exact rationals.
// Every probability in the exact engine is a Rational; there is no rounding
// anywhere outside the simulators.
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace enlab {

class BigInt {
public:
    BigInt() = default;
    BigInt(long long v);

    static BigInt from_string(std::string_view s);
    std::string to_string() const;

    int signum() const { return sign_; }
    bool is_zero() const { return sign_ == 0; }

    friend BigInt operator+(const BigInt& a, const BigInt& b);
    friend BigInt operator-(const BigInt& a, const BigInt& b);
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    BigInt operator-() const;

    // truncated division: q = a/b toward zero, r has the sign of a, |r| < |b|
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
    friend BigInt operator/(const BigInt& a, const BigInt& b);
    friend BigInt operator%(const BigInt& a, const BigInt& b);

    static BigInt gcd(BigInt a, BigInt b);   // non-negative

    bool operator==(const BigInt& o) const { return sign_ == o.sign_ && mag_ == o.mag_; }
    std::strong_ordering operator<=>(const BigInt& o) const;

    double to_double() const;

private:
    int sign_ = 0;                  // -1, 0, +1
    std::vector<uint32_t> mag_;     // little-endian base 2^32, no leading zeros

    void trim();
    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
};

// Normalized fraction: den > 0, gcd(num, den) = 1, 0 represented as 0/1.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d);
    Rational(BigInt n, BigInt d);

    // accepts "p", "-p", "p/q" with optional sign on p
    static Rational parse(std::string_view s);
    std::string to_string() const;      // "p" when den == 1, else "p/q"

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    int signum() const { return num_.signum(); }
    bool is_zero() const { return num_.is_zero(); }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const;
    Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
    Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
    Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    std::strong_ordering operator<=>(const Rational& o) const;

    Rational abs() const { return signum() < 0 ? -*this : *this; }
    double to_double() const;

private:
    BigInt num_, den_;
    void normalize();
};

inline Rational rat(long long n, long long d = 1) { return Rational(n, d); }

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

} // namespace enlab
