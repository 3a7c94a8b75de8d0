#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "qa/bang.hpp"

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const double kE = std::exp(1.0);
}  // namespace

TEST_CASE("bang_norm") {
    const auto factorial = qa::from_generator(qa::Generator::analytic(1.0), 201);
    SECTION("constant one saturates the zeroth term") {
        CHECK(qa::bang_norm(qa::FunctionModel{qa::Polynomial{{1.0}}}, factorial, 0.3) == 1.0);
    }
    SECTION("identity at the origin") {
        CHECK(qa::bang_norm(qa::FunctionModel{qa::Polynomial{{0.0, 1.0}}}, factorial, 0.0) ==
              Catch::Approx(1.0 / kE).epsilon(1e-14));
    }
    SECTION("sinusoid at the origin, term by term") {
        const auto seq = qa::from_generator(qa::Generator::constant_ratio(kPi), 201);
        const qa::FunctionModel f{qa::Sinusoid{1, 1.0}};
        // j = 1 gives pi/(e pi) = 1/e; every higher odd term is e^{-j}
        CHECK(qa::bang_norm(f, seq, 0.0) == Catch::Approx(1.0 / kE).epsilon(1e-14));
    }
    SECTION("full scan agrees with the early-stopped scan for members") {
        const auto seq = qa::from_generator(qa::Generator::constant_ratio(2.0 * kPi), 201);
        const qa::FunctionModel f{qa::Sinusoid{2, 1.0}};
        for (double x : {0.0, 0.1, 0.37, 0.5, 1.0})
            CHECK(qa::bang_norm(f, seq, x) ==
                  Catch::Approx(qa::bang_norm(f, seq, x, false)).epsilon(1e-14));
    }
    SECTION("monotone domination: a larger class gives a smaller norm") {
        const auto bigger = qa::from_generator(qa::Generator::analytic(2.0), 201);
        const qa::FunctionModel f{qa::Polynomial{{0.1, 0.5, -0.3}}};
        for (double x : {0.0, 0.2, 0.5, 0.8, 1.0})
            CHECK(qa::bang_norm(f, bigger, x) <= qa::bang_norm(f, factorial, x) + 1e-15);
    }
    SECTION("domain") {
        CHECK_THROWS_AS(qa::bang_norm(qa::FunctionModel{qa::Polynomial{{1.0}}}, factorial, -0.1),
                        std::domain_error);
    }
}

TEST_CASE("remainder_norm") {
    const auto factorial = qa::from_generator(qa::Generator::analytic(1.0), 201);
    const auto pi_seq = qa::from_generator(qa::Generator::constant_ratio(kPi), 201);
    const qa::FunctionModel sin1{qa::Sinusoid{1, 1.0}};
    SECTION("order zero is the norm itself") {
        for (double x : {0.0, 0.25, 0.5, 1.0})
            CHECK(qa::remainder_norm(sin1, pi_seq, 0, x) ==
                  Catch::Approx(qa::bang_norm(sin1, pi_seq, x)).epsilon(1e-14));
    }
    SECTION("polynomials have vanishing high remainders") {
        const qa::FunctionModel f{qa::Polynomial{{0.0, 1.0}}};
        CHECK(qa::remainder_norm(f, factorial, 2, 0.5) == 0.0);
    }
    SECTION("chain: bounded by e^{-n}, non-increasing, glued at derivative zeros") {
        for (long n = 0; n <= 10; ++n) {
            for (double x : {0.0, 0.1, 0.3, 0.55, 0.9}) {
                const double bn = qa::remainder_norm(sin1, pi_seq, n, x);
                CHECK(bn <= std::exp(-static_cast<double>(n)) * (1.0 + 1e-12));
                CHECK(bn >= qa::remainder_norm(sin1, pi_seq, n + 1, x) - 1e-15);
            }
        }
        // f(0) = 0, so the n = 0 and n = 1 remainder norms agree at 0
        CHECK(qa::remainder_norm(sin1, pi_seq, 0, 0.0) ==
              Catch::Approx(qa::remainder_norm(sin1, pi_seq, 1, 0.0)).epsilon(1e-14));
        // f'(1/2) = 0: orders 1 and 2 agree there
        CHECK(qa::remainder_norm(sin1, pi_seq, 1, 0.5) ==
              Catch::Approx(qa::remainder_norm(sin1, pi_seq, 2, 0.5)).epsilon(1e-14));
    }
}

TEST_CASE("log_norm") {
    CHECK(qa::log_norm(1.0) == 0.0);
    CHECK(qa::log_norm(1.0 / kE) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(std::isinf(qa::log_norm(0.0)));
    CHECK_THROWS_AS(qa::log_norm(-0.1), std::domain_error);
}

TEST_CASE("one_sided_norm") {
    const auto factorial = qa::from_generator(qa::Generator::analytic(1.0), 201);
    CHECK(qa::one_sided_norm(qa::FunctionModel{qa::Polynomial{{0.0, 1.0}}}, factorial, 0.0) == 0.0);
    CHECK(qa::one_sided_norm(qa::FunctionModel{qa::Polynomial{{0.0, -1.0}}}, factorial, 0.0) ==
          Catch::Approx(1.0 / kE).epsilon(1e-14));
    CHECK(qa::one_sided_norm(qa::FunctionModel{qa::Polynomial{{-1.0}}}, factorial, 0.7) == 1.0);
}

TEST_CASE("bang_degree") {
    const auto factorial = qa::from_generator(qa::Generator::analytic(1.0), 201);
    SECTION("factorial class at sup norm 1") {
        const qa::BangDegree d = qa::bang_degree(factorial, 1.0);
        CHECK_FALSE(d.unbounded);
        CHECK(d.value == 8);
        CHECK(d.threshold == 0);
        // partial harmonic sum H_8
        CHECK(d.partial_sum == Catch::Approx(2.717857142857143).epsilon(1e-14));
        CHECK(d.partial_sum < kE);
        CHECK(d.partial_sum + factorial.ratio(9) >= kE);
    }
    SECTION("factorial class at sup norm e^{-2}") {
        const qa::BangDegree d = qa::bang_degree(factorial, std::exp(-2.0));
        CHECK(d.value == 37);
        CHECK(d.threshold == 2);
        CHECK(d.partial_sum == Catch::Approx(2.7015862238216661).epsilon(1e-12));
    }
    SECTION("constant ratio pi at sup norm 1: N < e pi") {
        const auto seq = qa::from_generator(qa::Generator::constant_ratio(kPi), 201);
        CHECK(qa::bang_degree(seq, 1.0).value == 8);
    }
    SECTION("non-increasing in the sup norm") {
        // decreasing sup norms start the summation later, so the degree grows
        long prev = -1;
        for (double s : {1.0, 0.8, 0.5, 0.2, 0.05, 0.01, 0.001}) {
            const long v = qa::bang_degree(factorial, s).value;
            CHECK(v >= prev);
            prev = v;
        }
    }
    SECTION("finite table can be unbounded") {
        const auto seq = qa::from_generator(qa::Generator::tabulated({1.0, 1.0}), 3);
        const qa::BangDegree d = qa::bang_degree(seq, 1.0);
        CHECK(d.unbounded);
        CHECK(d.partial_sum == Catch::Approx(2.0));
    }
    SECTION("preconditions") {
        CHECK_THROWS_AS(qa::bang_degree(factorial, 0.0), std::domain_error);
        CHECK_THROWS_AS(qa::bang_degree(factorial, 1.5), std::domain_error);
        const auto shifted = qa::LogConvexSequence::from_values(std::vector<double>{2.0, 2.0, 4.0});
        CHECK_THROWS_AS(qa::bang_degree(shifted, 1.0), std::invalid_argument);
    }
}

TEST_CASE("original_bang_norm") {
    const std::vector<double> bumpy{1.0, 10.0, 10.0, 1000.0};
    SECTION("constant one") {
        CHECK(qa::original_bang_norm(qa::FunctionModel{qa::Polynomial{{1.0}}}, bumpy, 0.5) == 1.0);
    }
    SECTION("zero function sees only the level terms") {
        CHECK(qa::original_bang_norm(qa::FunctionModel{qa::Polynomial{{0.0}}}, bumpy, 0.5) ==
              Catch::Approx(std::exp(-3.0)).epsilon(1e-14));
    }
    SECTION("identity with factorial majorants") {
        const std::vector<double> fact{1.0, 1.0, 2.0, 6.0, 24.0};
        CHECK(qa::original_bang_norm(qa::FunctionModel{qa::Polynomial{{0.0, 1.0}}}, fact, 0.0) ==
              Catch::Approx(1.0 / kE).epsilon(1e-14));
    }
    SECTION("matches a direct loop over the contact set") {
        std::mt19937_64 rng(91);
        std::uniform_real_distribution<double> lv(-3.0, 3.0);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        for (int t = 0; t < 100; ++t) {
            std::vector<double> raw(8);
            for (double& v : raw) v = std::exp(lv(rng));
            std::vector<double> c(4);
            for (double& v : c) v = coef(rng);
            const qa::FunctionModel f{qa::Polynomial{c}};
            const double x = 0.5 * (1.0 + coef(rng));
            const auto mr = qa::log_convex_minorant(raw);
            double expected = qa::kInf;
            for (long p : mr.contact_set) {
                double inner = std::exp(-static_cast<double>(p));
                for (long j = 0; j <= p; ++j) {
                    const double term = std::fabs(qa::derivative_at(f, j, x)) /
                                        std::exp(static_cast<double>(j) + mr.minorant.log_at(j));
                    inner = std::max(inner, term);
                }
                expected = std::min(expected, inner);
            }
            CHECK(qa::original_bang_norm(f, raw, x) == Catch::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("flat_zero_envelope") {
    SECTION("geometric ratios 2^{-j}") {
        std::vector<double> table;
        for (int j = 1; j <= 64; ++j) table.push_back(std::pow(2.0, j));
        const auto seq = qa::from_generator(qa::Generator::tabulated(table), 65);
        // e c = 1/4: tails 2^{-n} reach strictly below 1/4 first at n = 3
        CHECK(qa::flat_zero_envelope(seq, 0.25 / kE) == std::exp(-3.0));
        // e c above the whole sum: vacuous constraint
        CHECK(qa::flat_zero_envelope(seq, 1.0) == 1.0);
    }
    SECTION("quasianalytic sequences give zero") {
        const auto factorial = qa::from_generator(qa::Generator::analytic(1.0), 201);
        CHECK(qa::flat_zero_envelope(factorial, 1.0) == 0.0);
        CHECK(qa::flat_zero_envelope(factorial, 0.01) == 0.0);
    }
    SECTION("domain") {
        const auto seq = qa::from_generator(qa::Generator::tabulated({2.0}), 2);
        CHECK_THROWS_AS(qa::flat_zero_envelope(seq, 0.0), std::domain_error);
        CHECK_THROWS_AS(qa::flat_zero_envelope(seq, 1.5), std::domain_error);
    }
}

TEST_CASE("verify_fundamental") {
    const auto factorial = qa::from_generator(qa::Generator::analytic(1.0), 201);
    SECTION("constant one is always safe") {
        const qa::FundamentalResiduals r =
            qa::verify_fundamental(qa::FunctionModel{qa::Polynomial{{1.0}}}, factorial, 0.3, 0.1, 5);
        CHECK(r.fundamental >= 0.0);
        CHECK(r.min_residual() >= 0.0);
    }
    SECTION("sinusoid grid") {
        const auto seq = qa::from_generator(qa::Generator::constant_ratio(kPi), 201);
        const qa::FunctionModel f{qa::Sinusoid{1, 1.0}};
        for (double x = 0.0; x <= 1.0 + 1e-12; x += 0.1) {
            for (double h : {0.01, -0.01, 0.05, -0.05}) {
                if (x + h < 0.0 || x + h > 1.0) continue;
                for (long q : {1L, 3L, 10L, 30L}) {
                    const qa::FundamentalResiduals r = qa::verify_fundamental(f, seq, x, h, q);
                    CHECK(r.fundamental >= -1e-12);
                    REQUIRE(r.remainder_form.has_value());
                    CHECK(*r.remainder_form >= -1e-12);
                    REQUIRE(r.log_form.has_value());
                    CHECK(*r.log_form >= -1e-12);
                }
            }
        }
    }
    SECTION("vanishing norm skips the log form") {
        const qa::FundamentalResiduals r =
            qa::verify_fundamental(qa::FunctionModel{qa::Polynomial{{0.0}}}, factorial, 0.2, 0.1, 3);
        CHECK_FALSE(r.log_form.has_value());
        CHECK(r.fundamental >= 0.0);
    }
    SECTION("range checks") {
        CHECK_THROWS_AS(qa::verify_fundamental(qa::FunctionModel{qa::Polynomial{{1.0}}}, factorial,
                                               0.95, 0.1, 3),
                        std::domain_error);
        CHECK_THROWS_AS(qa::verify_fundamental(qa::FunctionModel{qa::Polynomial{{1.0}}}, factorial,
                                               0.5, 0.1, 0),
                        std::out_of_range);
    }
}

TEST_CASE("verify_level_crossing") {
    SECTION("constant one: empty level range") {
        const auto factorial = qa::from_generator(qa::Generator::analytic(1.0), 201);
        const qa::LevelCrossingReport r = qa::verify_level_crossing(
            qa::FunctionModel{qa::Polynomial{{1.0}}}, qa::Generator::analytic(1.0), factorial, 0.01);
        CHECK(r.level_low == 0);
        CHECK_FALSE(r.n_unbounded);
        CHECK(r.level_high == 0);
        CHECK(r.ratio_sum == 0.0);
        CHECK(r.sum_ok);
        CHECK(r.integral == 0.0);
        CHECK(r.integral_ok);
    }
    SECTION("sinusoid passes with margin") {
        const auto gen = qa::Generator::constant_ratio(kPi);
        const auto seq = qa::from_generator(gen, 201);
        const qa::LevelCrossingReport r =
            qa::verify_level_crossing(qa::FunctionModel{qa::Sinusoid{1, 1.0}}, gen, seq, 0.01);
        CHECK(r.sum_ok);
        CHECK(r.integral_ok);
        CHECK(r.ratio_sum < kE);
    }
    SECTION("integral matches the closed form for A(s) = s") {
        const auto gen = qa::Generator::analytic(1.0);
        const auto seq = qa::from_generator(gen, 201);
        const qa::FunctionModel f{qa::Polynomial{{0.0, 1.0}}};
        const qa::LevelCrossingReport r = qa::verify_level_crossing(f, gen, seq, 0.01);
        const double l_star = qa::log_norm(r.max_b);
        const double l_top = qa::log_norm(r.min_b);
        const double closed = std::log((l_top + 1.0) / (l_star + 1.0));
        CHECK(r.integral == Catch::Approx(closed).margin(1e-9));
    }
}

TEST_CASE("bang profile") {
    const auto factorial = qa::from_generator(qa::Generator::analytic(1.0), 201);
    const qa::BangProfile p =
        qa::compute_profile(qa::FunctionModel{qa::Polynomial{{0.0, 1.0}}}, factorial, 11);
    REQUIRE(p.grid.size() == 11);
    CHECK(p.grid.front() == 0.0);
    CHECK(p.grid.back() == 1.0);
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        CHECK(p.b_values[i] == Catch::Approx(std::max(p.grid[i], 1.0 / kE)).epsilon(1e-13));
        CHECK(p.l_values[i] == Catch::Approx(-std::log(p.b_values[i])).margin(1e-13));
    }
}

TEST_CASE("zero count never exceeds the degree for certified members") {
    // the central counting property on a few concrete members
    struct Member {
        qa::FunctionModel f;
        qa::Generator gen;
    };
    std::vector<Member> members;
    for (int k = 1; k <= 5; ++k)
        members.push_back({qa::FunctionModel{qa::Sinusoid{k, 1.0}},
                           qa::Generator::constant_ratio(static_cast<double>(k) * kPi)});
    members.push_back({qa::FunctionModel{qa::Polynomial{{0.0, 1.0}}}, qa::Generator::analytic(1.0)});
    members.push_back({qa::FunctionModel{qa::Polynomial{{0.0, 1.0, -1.0}}}, qa::Generator::analytic(1.0)});
    for (const auto& m : members) {
        const auto seq = qa::from_generator(m.gen, 201);
        REQUIRE(qa::fits_class(m.f, seq, 0.01).fits);
        const qa::SupNorm sn = qa::sup_norm(m.f, qa::full_interval_set(), 1e-3);
        const double sup = std::min(1.0, sn.estimate);
        const qa::BangDegree d = qa::bang_degree(seq, sup);
        const qa::ZeroCount z = qa::count_zeros(m.f, qa::Interval{0.0, 1.0});
        REQUIRE_FALSE(d.unbounded);
        CHECK(z.count <= d.value);
    }
}
