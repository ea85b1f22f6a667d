#include "enlab/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace enlab {

// --- BigInt -----------------------------------------------------------------

BigInt::BigInt(long long v) {
    if (v == 0) return;
    sign_ = v > 0 ? 1 : -1;
    unsigned long long m = v > 0 ? (unsigned long long)v : 0ULL - (unsigned long long)v;
    while (m) { mag_.push_back((uint32_t)(m & 0xffffffffULL)); m >>= 32; }
}

void BigInt::trim() {
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
    if (mag_.empty()) sign_ = 0;
}

int BigInt::cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
}

std::vector<uint32_t> BigInt::add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    const auto& lo = a.size() < b.size() ? a : b;
    const auto& hi = a.size() < b.size() ? b : a;
    std::vector<uint32_t> r(hi.size() + 1, 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < hi.size(); ++i) {
        uint64_t s = carry + hi[i] + (i < lo.size() ? lo[i] : 0);
        r[i] = (uint32_t)s;
        carry = s >> 32;
    }
    r[hi.size()] = (uint32_t)carry;
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

// requires |a| >= |b|
std::vector<uint32_t> BigInt::sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r(a.size(), 0);
    int64_t borrow = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        int64_t s = (int64_t)a[i] - borrow - (i < b.size() ? (int64_t)b[i] : 0);
        if (s < 0) { s += ((int64_t)1 << 32); borrow = 1; } else borrow = 0;
        r[i] = (uint32_t)s;
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

std::vector<uint32_t> BigInt::mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<uint32_t> r(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < b.size(); ++j) {
            uint64_t cur = (uint64_t)a[i] * b[j] + r[i + j] + carry;
            r[i + j] = (uint32_t)cur;
            carry = cur >> 32;
        }
        size_t k = i + b.size();
        while (carry) {
            uint64_t cur = r[k] + carry;
            r[k] = (uint32_t)cur;
            carry = cur >> 32;
            ++k;
        }
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    BigInt r;
    if (a.sign_ == b.sign_) {
        r.sign_ = a.sign_;
        r.mag_ = BigInt::add_mag(a.mag_, b.mag_);
    } else {
        int c = BigInt::cmp_mag(a.mag_, b.mag_);
        if (c == 0) return BigInt();
        if (c > 0) { r.sign_ = a.sign_; r.mag_ = BigInt::sub_mag(a.mag_, b.mag_); }
        else       { r.sign_ = b.sign_; r.mag_ = BigInt::sub_mag(b.mag_, a.mag_); }
    }
    return r;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    r.sign_ = -r.sign_;
    return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.sign_ == 0 || b.sign_ == 0) return r;
    r.sign_ = a.sign_ * b.sign_;
    r.mag_ = BigInt::mul_mag(a.mag_, b.mag_);
    return r;
}

// shift-subtract long division on magnitudes
void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.sign_ == 0) throw std::domain_error("BigInt division by zero");
    q = BigInt(); r = BigInt();
    if (a.sign_ == 0) return;
    if (cmp_mag(a.mag_, b.mag_) < 0) { r = a; return; }

    size_t nbits = a.mag_.size() * 32;
    std::vector<uint32_t> rem, quo(a.mag_.size(), 0);
    rem.reserve(b.mag_.size() + 1);
    for (size_t i = nbits; i-- > 0;) {
        // rem = rem << 1 | bit_i(a)
        uint32_t carry = (a.mag_[i / 32] >> (i % 32)) & 1u;
        for (size_t k = 0; k < rem.size(); ++k) {
            uint32_t nc = rem[k] >> 31;
            rem[k] = (rem[k] << 1) | carry;
            carry = nc;
        }
        if (carry) rem.push_back(carry);
        if (cmp_mag(rem, b.mag_) >= 0) {
            rem = sub_mag(rem, b.mag_);
            quo[i / 32] |= (1u << (i % 32));
        }
    }
    q.mag_ = std::move(quo);
    q.sign_ = 1;
    q.trim();
    r.mag_ = std::move(rem);
    r.sign_ = 1;
    r.trim();
    q.sign_ = q.mag_.empty() ? 0 : a.sign_ * b.sign_;
    r.sign_ = r.mag_.empty() ? 0 : a.sign_;
}

BigInt operator/(const BigInt& a, const BigInt& b) { BigInt q, r; BigInt::divmod(a, b, q, r); return q; }
BigInt operator%(const BigInt& a, const BigInt& b) { BigInt q, r; BigInt::divmod(a, b, q, r); return r; }

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a.sign_ = a.mag_.empty() ? 0 : 1;
    b.sign_ = b.mag_.empty() ? 0 : 1;
    while (!b.is_zero()) {
        BigInt q, r;
        divmod(a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

std::strong_ordering BigInt::operator<=>(const BigInt& o) const {
    if (sign_ != o.sign_) return sign_ <=> o.sign_;
    int c = cmp_mag(mag_, o.mag_) * (sign_ < 0 ? -1 : 1);
    return c <=> 0;
}

BigInt BigInt::from_string(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer literal");
    bool neg = false;
    size_t i = 0;
    if (s[0] == '-' || s[0] == '+') { neg = s[0] == '-'; i = 1; }
    if (i == s.size()) throw std::invalid_argument("empty integer literal");
    BigInt r;
    BigInt ten(10);
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("bad digit in integer literal");
        r = r * ten + BigInt(s[i] - '0');
    }
    if (neg) r.sign_ = -r.sign_;
    return r;
}

std::string BigInt::to_string() const {
    if (sign_ == 0) return "0";
    BigInt v = *this;
    v.sign_ = 1;
    const BigInt chunk(1000000000);
    std::vector<uint32_t> groups;
    while (!v.is_zero()) {
        BigInt q, r;
        divmod(v, chunk, q, r);
        uint64_t g = 0;
        for (size_t i = r.mag_.size(); i-- > 0;) g = (g << 32) | r.mag_[i];
        groups.push_back((uint32_t)g);
        v = std::move(q);
    }
    std::string out = sign_ < 0 ? "-" : "";
    out += std::to_string(groups.back());
    char buf[16];
    for (size_t i = groups.size() - 1; i-- > 0;) {
        snprintf(buf, sizeof buf, "%09u", groups[i]);
        out += buf;
    }
    return out;
}

double BigInt::to_double() const {
    if (sign_ == 0) return 0.0;
    double d = 0.0;
    int extra_exp = 0;
    size_t start = mag_.size();
    // accumulate at most the top 3 limbs, track the rest as an exponent
    size_t lo = mag_.size() > 3 ? mag_.size() - 3 : 0;
    extra_exp = (int)(lo * 32);
    for (size_t i = start; i-- > lo;) d = d * 4294967296.0 + (double)mag_[i];
    d = std::ldexp(d, extra_exp);
    return sign_ < 0 ? -d : d;
}

// --- Rational ---------------------------------------------------------------

Rational::Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }
Rational::Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

void Rational::normalize() {
    if (den_.is_zero()) throw std::domain_error("Rational with zero denominator");
    if (den_.signum() < 0) { num_ = -num_; den_ = -den_; }
    if (num_.is_zero()) { den_ = BigInt(1); return; }
    BigInt g = BigInt::gcd(num_, den_);
    if (!(g == BigInt(1))) { num_ = num_ / g; den_ = den_ / g; }
}

Rational Rational::parse(std::string_view s) {
    size_t slash = s.find('/');
    if (slash == std::string_view::npos)
        return Rational(BigInt::from_string(s), BigInt(1));
    return Rational(BigInt::from_string(s.substr(0, slash)),
                    BigInt::from_string(s.substr(slash + 1)));
}

std::string Rational::to_string() const {
    if (den_ == BigInt(1)) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
}
Rational Rational::operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
    return (num_ * o.den_) <=> (o.num_ * den_);
}

double Rational::to_double() const { return num_.to_double() / den_.to_double(); }

Rational min(const Rational& a, const Rational& b) { return a <= b ? a : b; }
Rational max(const Rational& a, const Rational& b) { return a >= b ? a : b; }

} // namespace enlab
