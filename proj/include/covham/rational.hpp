#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace covham {

struct OverflowError : std::runtime_error {
  OverflowError() : std::runtime_error("rational overflow") {}
};

// Exact rational over 64-bit integers, normalized with positive denominator.
class Rat {
public:
  constexpr Rat() = default;
  Rat(long long n) : num_(n), den_(1) {}
  Rat(long long n, long long d) : num_(n), den_(d) { reduce(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool isZero() const { return num_ == 0; }
  bool isOne() const { return num_ == 1 && den_ == 1; }
  bool isInt() const { return den_ == 1; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return Rat(checked(i128(a.num_) * b.den_ + i128(b.num_) * a.den_),
               checked(i128(a.den_) * b.den_));
  }
  friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
  friend Rat operator-(const Rat& a) { return Rat(-a.num_, a.den_); }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return Rat(checked(i128(a.num_) * b.num_), checked(i128(a.den_) * b.den_));
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::runtime_error("rational division by zero");
    return Rat(checked(i128(a.num_) * b.den_), checked(i128(a.den_) * b.num_));
  }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }

  double toDouble() const { return double(num_) / double(den_); }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

private:
  using i128 = __int128;
  static long long checked(i128 v) {
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN)) throw OverflowError();
    return (long long)v;
  }
  void reduce() {
    if (den_ == 0) throw std::runtime_error("rational with zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
    if (num_ == 0) den_ = 1;
  }

  long long num_ = 0;
  long long den_ = 1;
};

// Gaussian rational a + b*i: the coefficient field of all expressions.
struct Q {
  Rat re, im;

  constexpr Q() = default;
  Q(long long n) : re(n) {}
  Q(Rat r) : re(r) {}
  Q(Rat r, Rat i) : re(r), im(i) {}

  static Q I() { return Q(Rat(0), Rat(1)); }

  bool isZero() const { return re.isZero() && im.isZero(); }
  bool isOne() const { return re.isOne() && im.isZero(); }
  bool isReal() const { return im.isZero(); }

  friend Q operator+(const Q& a, const Q& b) { return Q(a.re + b.re, a.im + b.im); }
  friend Q operator-(const Q& a, const Q& b) { return Q(a.re - b.re, a.im - b.im); }
  friend Q operator-(const Q& a) { return Q(-a.re, -a.im); }
  friend Q operator*(const Q& a, const Q& b) {
    return Q(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend Q operator/(const Q& a, const Q& b) {
    Rat n = b.re * b.re + b.im * b.im;
    if (n.isZero()) throw std::runtime_error("division by zero");
    return Q((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
  }
  Q& operator+=(const Q& o) { return *this = *this + o; }
  Q& operator*=(const Q& o) { return *this = *this * o; }

  Q conj() const { return Q(re, -im); }

  friend bool operator==(const Q& a, const Q& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Q& a, const Q& b) { return !(a == b); }
  friend bool operator<(const Q& a, const Q& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  }

  std::string str() const {
    if (im.isZero()) return re.str();
    if (re.isZero()) return im.isOne() ? "i" : (im == Rat(-1) ? "-i" : im.str() + "*i");
    return "(" + re.str() + (im < Rat(0) ? "" : "+") +
           (im == Rat(-1) ? "-" : im.isOne() ? "" : im.str() + "*") + "i)";
  }
};

inline Q qi() { return Q::I(); }
inline Q qr(long long n, long long d = 1) { return Q(Rat(n, d)); }

}  // namespace covham
