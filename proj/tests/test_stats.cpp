#include <cmath>
#include <random>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "doctest.h"
#include "rial/errors.hpp"
#include "rial/stats.hpp"
#include "ttest_reference.hpp"

using namespace rial;

TEST_CASE("regularized incomplete beta against Boost") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> shape(0.1, 40.0), unit(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const double a = shape(rng), b = shape(rng), x = unit(rng);
        const double ref = boost::math::ibeta(a, b, x);
        CHECK(regularized_incomplete_beta(a, b, x) == doctest::Approx(ref).epsilon(1e-10));
    }
    CHECK(regularized_incomplete_beta(2, 3, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2, 3, 1.0) == 1.0);
    CHECK_THROWS_AS(regularized_incomplete_beta(-1, 3, 0.5), NumericError);
    CHECK_THROWS_AS(regularized_incomplete_beta(1, 3, 1.5), NumericError);
}

TEST_CASE("student t CDF against Boost") {
    for (double df : {1.0, 2.0, 4.0, 9.0, 29.0, 200.0}) {
        const boost::math::students_t dist(df);
        for (double t = -8.0; t <= 8.0; t += 0.37) {
            const double ref = boost::math::cdf(dist, t);
            CHECK(std::abs(student_t_cdf(t, df) - ref) <= 1e-10 * std::max(ref, 1e-300) + 1e-15);
        }
    }
    CHECK(student_t_cdf(0.0, 5.0) == doctest::Approx(0.5));
}

TEST_CASE("paired t statistics match scipy reference values") {
    for (const auto& c : reference::ttest_cases()) {
        const auto st = paired_t_stats(c.a, c.b);
        CHECK(st.t == doctest::Approx(c.t).epsilon(1e-10));
        CHECK(std::abs(st.p_two_sided - c.p) < 1e-10);
    }
}

TEST_CASE("paired_t_test examples") {
    const std::vector<double> a{0.3, 0.5, 0.9};
    CHECK(paired_t_test(a, a) == Outcome::tie);

    const std::vector<double> hi{0.9, 0.91, 0.92, 0.93}, lo{0.5, 0.51, 0.52, 0.53};
    CHECK(paired_t_test(hi, lo) == Outcome::win);
    CHECK(paired_t_test(lo, hi) == Outcome::loss);

    const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 1, 4, 3, 6};
    const auto st = paired_t_stats(x, y);
    CHECK(st.t == doctest::Approx(-0.4082482905));
    CHECK(paired_t_test(x, y) == Outcome::tie);

    const auto& strong = reference::ttest_cases()[7];
    CHECK(paired_t_test(strong.a, strong.b) == Outcome::win);
    CHECK(paired_t_test(strong.b, strong.a) == Outcome::loss);

    CHECK(to_string(Outcome::win) == "win");
    CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{2.0}), DataError);
    CHECK_THROWS_AS(paired_t_test(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), DataError);
}

TEST_CASE("one-sided p-values split the two-sided one") {
    for (const auto& c : reference::ttest_cases()) {
        const auto st = paired_t_stats(c.a, c.b);
        const double smaller = std::min(st.p_greater(), st.p_less());
        CHECK(smaller == doctest::Approx(st.p_two_sided / 2).epsilon(1e-9));
        CHECK(st.p_greater() + st.p_less() == doctest::Approx(1.0));
    }
}

TEST_CASE("t-test symmetry on random pairs") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> shift(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t len = 2 + trial % 12;
        const double s = shift(rng);
        std::vector<double> a(len), b(len);
        for (std::size_t i = 0; i < len; ++i) {
            a[i] = n(rng);
            b[i] = a[i] + s + 0.3 * n(rng);
        }
        const auto ab = paired_t_test(a, b), ba = paired_t_test(b, a);
        CHECK((ab == Outcome::win) == (ba == Outcome::loss));
        CHECK((ab == Outcome::tie) == (ba == Outcome::tie));
    }
}
