#include "rial/stats.hpp"

#include <cmath>
#include <limits>

#include "rial/errors.hpp"

namespace rial {

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxTerms = 1000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxTerms; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0))
        throw NumericError("regularized_incomplete_beta: argument out of domain");
    if (x == 0.0 || x == 1.0)
        return x;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (std::isinf(t))
        return t > 0 ? 1.0 : 0.0;
    const double tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return t > 0 ? 1.0 - tail : tail;
}

double PairedTTest::p_greater() const {
    if (std::isinf(t))
        return t > 0 ? 0.0 : 1.0;
    return 1.0 - student_t_cdf(t, df);
}

double PairedTTest::p_less() const {
    if (std::isinf(t))
        return t < 0 ? 0.0 : 1.0;
    return student_t_cdf(t, df);
}

PairedTTest paired_t_stats(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DataError("paired t-test: samples differ in length");
    if (a.size() < 2)
        throw DataError("paired t-test: need at least two pairs");
    const double n = static_cast<double>(a.size());

    double mean = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        mean += a[i] - b[i];
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double dev = (a[i] - b[i]) - mean;
        ss += dev * dev;
    }
    const double sd = std::sqrt(ss / (n - 1.0));

    PairedTTest out;
    out.mean_diff = mean;
    out.df = n - 1.0;
    // Spread below rounding noise of the mean counts as zero variance.
    if (sd <= 1e-14 * std::max(1.0, std::abs(mean))) {
        if (mean == 0.0) {
            out.t = 0.0;
            out.p_two_sided = 1.0;
        } else {
            out.t = mean > 0 ? INFINITY : -INFINITY;
            out.p_two_sided = 0.0;
        }
        return out;
    }
    out.t = mean / (sd / std::sqrt(n));
    out.p_two_sided = regularized_incomplete_beta(out.df / 2.0, 0.5, out.df / (out.df + out.t * out.t));
    return out;
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::win: return "win";
        case Outcome::tie: return "tie";
        case Outcome::loss: return "loss";
    }
    return "?";
}

Outcome paired_t_test(std::span<const double> a, std::span<const double> b, double significance) {
    const auto st = paired_t_stats(a, b);
    if (st.p_two_sided < significance) {
        if (st.mean_diff > 0)
            return Outcome::win;
        if (st.mean_diff < 0)
            return Outcome::loss;
    }
    return Outcome::tie;
}

}  // namespace rial
