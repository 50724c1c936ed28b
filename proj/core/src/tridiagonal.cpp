#include "grushin/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grushin/errors.hpp"
#include "grushin/signed_log.hpp"

namespace grushin::tridiag {

namespace {

constexpr double kPivMin = 1e-290;

double guard(double q) { return std::fabs(q) < kPivMin ? -kPivMin : q; }

}  // namespace

int sturm_count(const SymTridiag& t, double lambda) {
    const int n = t.size();
    int count = 0;
    double q = guard(t.d[0] - lambda);
    if (q < 0) ++count;
    for (int i = 1; i < n; ++i) {
        q = guard(t.d[i] - lambda - t.e[i - 1] * t.e[i - 1] / q);
        if (q < 0) ++count;
    }
    return count;
}

std::vector<double> lowest_eigenvalues(const SymTridiag& t, int count) {
    const int n = t.size();
    if (count > n || count < 0) throw ConvergenceError("spectrum", "requested more eigenvalues than matrix size");
    double glo = std::numeric_limits<double>::infinity();
    double ghi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::fabs(t.e[i - 1]) : 0.0) + (i + 1 < n ? std::fabs(t.e[i]) : 0.0);
        glo = std::min(glo, t.d[i] - r);
        ghi = std::max(ghi, t.d[i] + r);
    }
    if (!std::isfinite(glo) || !std::isfinite(ghi))
        throw ConvergenceError("spectrum", "non-finite matrix entries");
    const double pad = 1e-14 * std::max(std::fabs(glo), std::fabs(ghi)) + kPivMin;
    glo -= pad;
    ghi += pad;

    std::vector<double> out(count);
    double lower = glo;
    for (int k = 0; k < count; ++k) {
        double lo = lower, hi = ghi;
        // Shrink the upper end quickly: the target is usually far below ghi.
        double probe = std::max(lo + 1.0, 2.0 * std::fabs(lo));
        while (probe < hi && sturm_count(t, probe) < k + 1) probe = lo + 4.0 * (probe - lo);
        if (probe < hi) hi = probe;
        int it = 0;
        while (hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(lo), std::fabs(hi)) &&
               hi - lo > kPivMin) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (sturm_count(t, mid) >= k + 1)
                hi = mid;
            else
                lo = mid;
            if (++it > 2000) throw ConvergenceError("spectrum", "bisection did not converge");
        }
        if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConvergenceError("spectrum", "bisection produced NaN");
        out[k] = 0.5 * (lo + hi);
        lower = lo;
    }
    return out;
}

LogVector eigenvector(const SymTridiag& t, double lambda) {
    const int n = t.size();
    std::vector<double> dp(n), dm(n);
    dp[0] = guard(t.d[0] - lambda);
    for (int i = 1; i < n; ++i) dp[i] = guard(t.d[i] - lambda - t.e[i - 1] * t.e[i - 1] / dp[i - 1]);
    dm[n - 1] = guard(t.d[n - 1] - lambda);
    for (int i = n - 2; i >= 0; --i) dm[i] = guard(t.d[i] - lambda - t.e[i] * t.e[i] / dm[i + 1]);

    int r = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double g = std::fabs(dp[i] + dm[i] - (t.d[i] - lambda));
        if (g < best) {
            best = g;
            r = i;
        }
    }

    LogVector v;
    v.sign.assign(n, 1);
    v.log_abs.assign(n, 0.0);
    for (int i = r - 1; i >= 0; --i) {
        // z_i = -(e_i / D+_i) z_{i+1}
        const double ratio = -t.e[i] / dp[i];
        if (ratio == 0.0) {
            v.sign[i] = 0;
            v.log_abs[i] = -std::numeric_limits<double>::infinity();
            continue;
        }
        v.sign[i] = v.sign[i + 1] * (ratio > 0 ? 1 : -1);
        v.log_abs[i] = v.log_abs[i + 1] + std::log(std::fabs(ratio));
    }
    for (int i = r + 1; i < n; ++i) {
        const double ratio = -t.e[i - 1] / dm[i];
        if (ratio == 0.0) {
            v.sign[i] = 0;
            v.log_abs[i] = -std::numeric_limits<double>::infinity();
            continue;
        }
        v.sign[i] = v.sign[i - 1] * (ratio > 0 ? 1 : -1);
        v.log_abs[i] = v.log_abs[i - 1] + std::log(std::fabs(ratio));
    }
    LogSumExp acc;
    for (int i = 0; i < n; ++i) acc.add(2.0 * v.log_abs[i]);
    const double half = 0.5 * acc.value();
    for (auto& l : v.log_abs) l -= half;
    // Sign convention: largest component positive.
    const int imax = static_cast<int>(std::max_element(v.log_abs.begin(), v.log_abs.end()) - v.log_abs.begin());
    if (v.sign[imax] < 0)
        for (auto& s : v.sign) s = -s;
    return v;
}

std::vector<double> multiply(const SymTridiag& t, const std::vector<double>& x) {
    const int n = t.size();
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        double s = t.d[i] * x[i];
        if (i > 0) s += t.e[i - 1] * x[i - 1];
        if (i + 1 < n) s += t.e[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

}  // namespace grushin::tridiag
