#pragma once

#include <cmath>
#include <limits>

namespace grushin {

// A real number stored as sign and natural log of its magnitude.
struct SignedLogValue {
    int sign = 0;
    double log_magnitude = -std::numeric_limits<double>::infinity();

    static SignedLogValue zero() { return {}; }
    static SignedLogValue from_log(int s, double log_mag) {
        if (s == 0 || log_mag == -std::numeric_limits<double>::infinity()) return {};
        return {s > 0 ? 1 : -1, log_mag};
    }
    static SignedLogValue from_double(double v) {
        if (v == 0.0) return {};
        return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
    }

    bool is_zero() const { return sign == 0; }
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }

    SignedLogValue operator*(const SignedLogValue& o) const {
        if (sign == 0 || o.sign == 0) return {};
        return {sign * o.sign, log_magnitude + o.log_magnitude};
    }
    SignedLogValue operator/(const SignedLogValue& o) const {
        if (sign == 0) return {};
        return {sign * o.sign, log_magnitude - o.log_magnitude};
    }
    SignedLogValue operator-() const { return {-sign, log_magnitude}; }
    SignedLogValue scaled_log(double log_factor) const {
        if (sign == 0) return {};
        return {sign, log_magnitude + log_factor};
    }
};

// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// log(exp(a) - exp(b)) for a >= b.
inline double log_sub_exp(double a, double b) {
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (b >= a) return -std::numeric_limits<double>::infinity();
    return a + std::log1p(-std::exp(b - a));
}

// Running sum of exp(x_i) held in log form.
class LogSumExp {
public:
    void add(double log_term) {
        if (log_term == -std::numeric_limits<double>::infinity()) return;
        if (log_term > max_) {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        } else {
            sum_ += std::exp(log_term - max_);
        }
    }
    double value() const {
        if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

inline SignedLogValue operator+(const SignedLogValue& x, const SignedLogValue& y) {
    if (x.sign == 0) return y;
    if (y.sign == 0) return x;
    if (x.sign == y.sign) return {x.sign, log_add_exp(x.log_magnitude, y.log_magnitude)};
    if (x.log_magnitude == y.log_magnitude) return {};
    if (x.log_magnitude > y.log_magnitude)
        return {x.sign, log_sub_exp(x.log_magnitude, y.log_magnitude)};
    return {y.sign, log_sub_exp(y.log_magnitude, x.log_magnitude)};
}

}  // namespace grushin
