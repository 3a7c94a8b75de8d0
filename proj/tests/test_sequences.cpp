#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "qa/sequences.hpp"

namespace {

// partial harmonic sum oracle used by the degree anchors
double harmonic(long lo, long hi) {
    double s = 0.0;
    for (long j = lo; j <= hi; ++j) s += 1.0 / static_cast<double>(j);
    return s;
}

}  // namespace

TEST_CASE("from_generator builds the expected majorants") {
    SECTION("A(s) = s gives factorials") {
        const auto seq = qa::from_generator(qa::Generator::analytic(1.0), 4);
        REQUIRE(seq.size() == 4);
        CHECK(seq.value_at(0) == 1.0);
        CHECK(seq.value_at(1) == Catch::Approx(1.0));
        CHECK(seq.value_at(2) == Catch::Approx(2.0));
        CHECK(seq.value_at(3) == Catch::Approx(6.0));
        CHECK(seq.normalized());
        CHECK_FALSE(seq.finite_tail());
    }
    SECTION("constant ratio gives a geometric sequence") {
        const double pi = 3.14159265358979323846;
        const auto seq = qa::from_generator(qa::Generator::constant_ratio(pi), 3);
        CHECK(seq.value_at(1) == Catch::Approx(pi));
        CHECK(seq.value_at(2) == Catch::Approx(pi * pi));
    }
    SECTION("logarithmic generator at j = 1") {
        const auto seq = qa::from_generator(qa::Generator::logarithmic(1.0, 1.0), 2);
        // s log(s+e) at s = 1
        CHECK(seq.value_at(1) == Catch::Approx(1.3132616875182228).epsilon(1e-14));
    }
    SECTION("tabulated range error") {
        const auto gen = qa::Generator::tabulated({1.0, 2.0, 3.0});
        CHECK_NOTHROW(qa::from_generator(gen, 4));
        CHECK_THROWS_AS(qa::from_generator(gen, 5), std::out_of_range);
        CHECK(qa::from_generator(gen, 4).finite_tail());
    }
    SECTION("generator validation") {
        CHECK_THROWS_AS(qa::Generator::analytic(0.0), std::invalid_argument);
        CHECK_THROWS_AS(qa::Generator::tabulated({2.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(qa::Generator::tabulated({}), std::invalid_argument);
    }
}

TEST_CASE("is_log_convex") {
    CHECK(qa::is_log_convex(std::vector<double>{1.0, 1.0, 2.0, 6.0}, 1e-12));
    CHECK_FALSE(qa::is_log_convex(std::vector<double>{1.0, 3.0, 4.0}, 1e-12));
    CHECK_THROWS_AS(qa::is_log_convex(std::vector<double>{1.0, 0.0, 2.0}, 1e-12),
                    std::domain_error);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> cdist(0.01, 100.0);
    for (int t = 0; t < 50; ++t) {
        const double c = cdist(rng);
        CHECK(qa::is_log_convex(std::vector<double>{1.0, c, c * c}, 1e-12));
    }
}

TEST_CASE("quasianalytic_sum") {
    const auto factorial = qa::from_generator(qa::Generator::analytic(1.0), 201);
    SECTION("factorial ratios are harmonic numbers") {
        CHECK(qa::quasianalytic_sum(factorial, 1, 8) == Catch::Approx(harmonic(1, 8)).epsilon(1e-14));
        CHECK(qa::quasianalytic_sum(factorial, 1, 8) == Catch::Approx(2.717857142857143).epsilon(1e-13));
    }
    SECTION("constant ratio") {
        const double pi = 3.14159265358979323846;
        const auto seq = qa::from_generator(qa::Generator::constant_ratio(pi), 6);
        CHECK(qa::quasianalytic_sum(seq, 1, 5) == Catch::Approx(5.0 / pi).epsilon(1e-13));
    }
    SECTION("single unit term") {
        const auto seq = qa::from_generator(qa::Generator::tabulated({1.0}), 2);
        CHECK(qa::quasianalytic_sum(seq, 1, 1) == 1.0);
    }
    SECTION("adjacent ranges add up") {
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<long> mid_dist(1, 199);
        for (int t = 0; t < 20; ++t) {
            const long mid = mid_dist(rng);
            const double split = qa::quasianalytic_sum(factorial, 1, mid) +
                                 (mid < 200 ? qa::quasianalytic_sum(factorial, mid + 1, 200) : 0.0);
            const double whole = qa::quasianalytic_sum(factorial, 1, 200);
            CHECK(split == Catch::Approx(whole).margin(1e-13));
        }
    }
    SECTION("range errors") {
        CHECK_THROWS_AS(qa::quasianalytic_sum(factorial, 0, 5), std::out_of_range);
        CHECK_THROWS_AS(qa::quasianalytic_sum(factorial, 1, 500), std::out_of_range);
    }
}

TEST_CASE("log_convex_minorant") {
    SECTION("already log-convex input is its own minorant") {
        const std::vector<double> v{1.0, 1.0, 2.0, 6.0};
        const auto mr = qa::log_convex_minorant(v);
        REQUIRE(mr.contact_set == std::vector<long>{0, 1, 2, 3});
        for (long j = 0; j < 4; ++j)
            CHECK(mr.minorant.value_at(j) == Catch::Approx(v[static_cast<std::size_t>(j)]));
    }
    SECTION("hump gets bridged") {
        const auto mr = qa::log_convex_minorant(std::vector<double>{1.0, 10.0, 10.0, 1000.0});
        REQUIRE(mr.contact_set == std::vector<long>{0, 2, 3});
        CHECK(mr.minorant.value_at(1) == Catch::Approx(std::sqrt(10.0)).epsilon(1e-13));
        CHECK(mr.minorant.value_at(0) == Catch::Approx(1.0));
        CHECK(mr.minorant.value_at(3) == Catch::Approx(1000.0).epsilon(1e-13));
    }
    SECTION("singleton") {
        const auto mr = qa::log_convex_minorant(std::vector<double>{5.0});
        REQUIRE(mr.contact_set == std::vector<long>{0});
        CHECK(mr.minorant.value_at(0) == Catch::Approx(5.0));
    }
    SECTION("errors") {
        CHECK_THROWS_AS(qa::log_convex_minorant(std::vector<double>{}), std::invalid_argument);
        CHECK_THROWS_AS(qa::log_convex_minorant(std::vector<double>{1.0, -2.0}), std::domain_error);
    }
    SECTION("idempotent and below the input") {
        std::mt19937_64 rng(23);
        std::uniform_int_distribution<int> len(1, 12);
        std::uniform_real_distribution<double> lv(-5.0, 5.0);
        for (int t = 0; t < 200; ++t) {
            const int m = len(rng);
            std::vector<double> v(static_cast<std::size_t>(m));
            for (double& x : v) x = std::exp(lv(rng));
            const auto mr = qa::log_convex_minorant(v);
            std::vector<double> mv(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                mv[i] = mr.minorant.value_at(static_cast<long>(i));
                CHECK(mr.minorant.log_at(static_cast<long>(i)) <= std::log(v[i]) + 1e-12);
            }
            const auto again = qa::log_convex_minorant(mv);
            for (std::size_t i = 0; i < v.size(); ++i)
                CHECK(again.minorant.log_at(static_cast<long>(i)) ==
                      Catch::Approx(mr.minorant.log_at(static_cast<long>(i))).margin(1e-12));
            CHECK(mr.contact_set.front() == 0);
            CHECK(mr.contact_set.back() == static_cast<long>(v.size()) - 1);
        }
    }
}

TEST_CASE("gamma_sup and big_gamma") {
    SECTION("closed-form kinds") {
        CHECK(qa::gamma_sup(qa::Generator::analytic(3.0), 10.0) == 1.0);
        CHECK(qa::gamma_sup(qa::Generator::constant_ratio(2.0), 10.0) == 0.0);
    }
    SECTION("logarithmic class has an interior maximum near s = 5.83") {
        // dense-scan oracle value: 1 + max_s s/((s+e) log(s+e))
        const double g50 = qa::gamma_sup(qa::Generator::logarithmic(1.0, 1.0), 50.0);
        CHECK(g50 == Catch::Approx(1.3178444328993727).margin(1e-9));
        CHECK(qa::gamma_global(qa::Generator::logarithmic(1.0, 1.0)) ==
              Catch::Approx(1.3178444328993727).margin(1e-9));
    }
    SECTION("non-decreasing in n") {
        const auto gen = qa::Generator::logarithmic(1.0, 1.0);
        double prev = 0.0;
        for (double n = 1.0; n <= 20.0; n += 0.5) {
            const double g = qa::gamma_sup(gen, n);
            CHECK(g >= prev - 1e-12);
            prev = g;
        }
    }
    SECTION("tabulated left derivative") {
        // a linear table A(j) = j behaves like the analytic kind
        const auto gen = qa::Generator::tabulated({1.0, 2.0, 3.0, 4.0});
        CHECK(qa::gamma_sup(gen, 4.0) == Catch::Approx(1.0).margin(1e-6));
        const auto flat = qa::Generator::tabulated({2.0, 2.0, 2.0});
        CHECK(qa::gamma_sup(flat, 3.0) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("big gamma values") {
        CHECK(qa::big_gamma(0.0) == Catch::Approx(218.39260013257696).epsilon(1e-13));
        CHECK(qa::big_gamma(1.0) == Catch::Approx(593.6526364103064).epsilon(1e-13));
        CHECK(qa::big_gamma(1.0, qa::GammaVariant::two_over_e) ==
              Catch::Approx(455.79960192778686).epsilon(1e-13));
        CHECK_THROWS_AS(qa::big_gamma(-0.5), std::domain_error);
    }
}

TEST_CASE("factorial_normalized") {
    SECTION("factorial sequence collapses to ones") {
        const auto seq = qa::from_generator(qa::Generator::analytic(1.0), 30);
        for (double lm : qa::factorial_normalized(seq))
            CHECK(lm == Catch::Approx(0.0).margin(1e-11));
    }
    SECTION("explicit small case on a raw sequence") {
        const std::vector<double> logs = {std::log(1.0), std::log(10.0), std::log(10.0),
                                          std::log(1000.0)};
        const auto m = qa::factorial_normalized_logs(logs);
        CHECK(std::exp(m[0]) == Catch::Approx(1.0));
        CHECK(std::exp(m[1]) == Catch::Approx(10.0));
        CHECK(std::exp(m[2]) == Catch::Approx(5.0));
        CHECK(std::exp(m[3]) == Catch::Approx(1000.0 / 6.0).epsilon(1e-13));
    }
}

TEST_CASE("LogConvexSequence invariants") {
    CHECK_THROWS_AS(qa::LogConvexSequence::from_values(std::vector<double>{1.0, 3.0, 4.0}),
                    std::invalid_argument);
    const auto seq = qa::from_generator(qa::Generator::analytic(1.0), 180);
    CHECK(qa::is_log_convex_logs(seq.log_values(), 1e-12));
    CHECK_THROWS_AS(seq.ratio(0), std::out_of_range);
    CHECK_THROWS_AS(seq.ratio(200), std::out_of_range);

    SECTION("every generator kind produces log-convex output") {
        const std::vector<qa::Generator> gens = {
            qa::Generator::analytic(0.5),
            qa::Generator::logarithmic(2.0, 1.5),
            qa::Generator::constant_ratio(0.3),
            qa::Generator::tabulated({0.5, 0.5, 1.0, 4.0, 4.0, 9.0}),
        };
        for (const auto& g : gens) {
            const long count = g.finite_smoothness() ? 7 : 150;
            const auto s = qa::from_generator(g, count);
            CHECK(qa::is_log_convex_logs(s.log_values(), 1e-12));
        }
    }
}
