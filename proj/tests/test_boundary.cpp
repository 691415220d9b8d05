#include <doctest.h>

#include <cmath>

#include <cstdio>
#include <fstream>
#include <numbers>

#include "aet/boundary.hpp"

using namespace aet;

namespace {

constexpr double pi = std::numbers::pi;

// Index of the mean-subtracted arc (cos t, sin t) - c on [0, ell] in closed form.
// c lies inside the unit disk, so the argument of eta(t) - c increases steadily and
// the sweep is the counterclockwise angle from gamma(0) to gamma(ell).
double cutoff_index_oracle(double ell) {
    if (ell >= 2 * pi) return 1.0;
    const double c1 = std::sin(ell) / ell;
    const double c2 = (1 - std::cos(ell)) / ell;
    const double ax = 1 - c1, ay = -c2;                               // gamma(0)
    const double bx = std::cos(ell) - c1, by = std::sin(ell) - c2;    // gamma(ell)
    double swept = std::atan2(ax * by - ay * bx, ax * bx + ay * by);
    if (swept < 0) swept += 2 * pi;
    return swept / (2 * pi);
}

// Dense-sampling oracle for the argument increments, independent of the library.
bool dense_monotone(double (*f1)(double), double (*f2)(double), double ell, int n) {
    double prev = std::atan2(f2(0), f1(0));
    int sign = 0;
    for (int k = 1; k <= n; ++k) {
        const double t = ell * k / n;
        const double a = std::atan2(f2(t), f1(t));
        const double d = std::remainder(a - prev, 2 * pi);
        prev = a;
        if (std::abs(d) < 1e-12) continue;
        const int s = d > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        if (s != sign) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("adapted pairs") {
    for (int i = 1; i <= 8; ++i) {
        CAPTURE(i);
        const auto p = adapted_pair(i);
        CHECK(p.ell == doctest::Approx(i * pi / 4));
        CHECK(p.f1(0.0) == 1.0);
        CHECK(p.f2(0.0) == 0.0);
        CHECK(winding_index(p) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(argument_monotone(p));
        CHECK(p.t.size() >= 1025);
        CHECK((p.t[1] - p.t[0]) <= p.ell / 1024 + 1e-15);
        const auto [r1, r2] = zero_mean_residual(p);
        CHECK(std::abs(r1) < 1e-8);
        CHECK(std::abs(r2) < 1e-8);
        CHECK(check_admissibility(p).admissible);
    }
    const auto p1 = adapted_pair(1);
    CHECK(p1.f1(0.1) == doctest::Approx(std::cos(0.8)));
    CHECK(p1.f2(0.1) == doctest::Approx(std::sin(0.8)));
    const auto p8 = adapted_pair(8);
    CHECK(p8.f1(1.3) == doctest::Approx(std::cos(1.3)));
    CHECK(p8.ell == doctest::Approx(2 * pi));
    CHECK_THROWS_AS(adapted_pair(0), std::invalid_argument);
    CHECK_THROWS_AS(adapted_pair(9), std::invalid_argument);
}

TEST_CASE("cut-off pairs") {
    SUBCASE("arc-mean constants") {
        const auto p1 = cutoff_pair(1);
        const double c1 = 2 * std::sqrt(2.0) / pi;
        const double c2 = (4 - 2 * std::sqrt(2.0)) / pi;
        CHECK(c1 == doctest::Approx(std::sin(pi / 4) / (pi / 4)));
        CHECK(p1.f1(0.3) == doctest::Approx(std::cos(0.3) - c1));
        CHECK(p1.f2(0.3) == doctest::Approx(std::sin(0.3) - c2));

        const auto p4 = cutoff_pair(4);
        CHECK(p4.f1(0.7) == doctest::Approx(std::cos(0.7)));
        CHECK(p4.f2(0.7) == doctest::Approx(std::sin(0.7) - 2 / pi));

        const auto p8 = cutoff_pair(8);
        CHECK(p8.f1(2.0) == std::cos(2.0));
        CHECK(p8.f2(2.0) == std::sin(2.0));
    }
    SUBCASE("zero-mean residual") {
        const auto [r1, r2] = zero_mean_residual(cutoff_pair(2));
        CHECK(std::abs(r1) < 1e-8);
        CHECK(std::abs(r2) < 1e-8);
    }
    SUBCASE("winding index follows the chord-angle closed form") {
        const double expected[8] = {0.5419, 0.5849, 0.6305, 0.6805, 0.7373, 0.8052, 0.8900, 1.0};
        for (int i = 1; i <= 8; ++i) {
            CAPTURE(i);
            const auto p = cutoff_pair(i);
            const double oracle = cutoff_index_oracle(i * pi / 4);
            CHECK(oracle == doctest::Approx(expected[i - 1]).epsilon(1e-4));
            CHECK(winding_index(p) == doctest::Approx(oracle).epsilon(1e-6));
            const auto rep = check_admissibility(p);
            CHECK(rep.admissible);
            CHECK(rep.monotone);
        }
    }
}

TEST_CASE("winding index properties") {
    SUBCASE("constant curve") {
        const auto p = make_pair(1.0, [](double) { return 1.0; }, [](double) { return 0.0; });
        CHECK(winding_index(p) == 0.0);
        CHECK(argument_monotone(p));
    }
    SUBCASE("circle family omega L / 2pi") {
        for (double omega : {0.5, 1.0, 3.0, 7.5}) {
            for (double len : {0.4, 1.7, 2 * pi}) {
                const auto p = make_pair(len, [omega](double t) { return std::cos(omega * t); },
                                         [omega](double t) { return std::sin(omega * t); });
                CHECK(winding_index(p) == doctest::Approx(omega * len / (2 * pi)).epsilon(1e-6));
            }
        }
    }
    SUBCASE("scaling and reflection") {
        const auto base = cutoff_pair(3);
        const auto scaled = make_pair(base.ell, [&](double t) { return 4.0 * base.f1(t); },
                                      [&](double t) { return 4.0 * base.f2(t); });
        CHECK(std::abs(winding_index(scaled) - winding_index(base)) < 1e-9);
        const auto reflected = make_pair(base.ell, base.f1, [&](double t) { return -base.f2(t); });
        CHECK(winding_index(reflected) == -winding_index(base));
    }
    SUBCASE("curve through the origin has no index") {
        const auto p = make_pair(pi, [](double t) { return std::cos(t); }, [](double) { return 0.0; });
        CHECK_THROWS_AS(winding_index(p), std::domain_error);
        CHECK_FALSE(check_admissibility(p).admissible);
    }
}

TEST_CASE("argument monotonicity") {
    CHECK(argument_monotone(adapted_pair(3)));
    // (2 + cos 3t, sin 3t) circles around (2, 0) without enclosing the origin, so its argument swings back.
    auto c = [](double t) { return 2 + std::cos(3 * t); };
    auto s3 = [](double t) { return std::sin(3 * t); };
    const bool oracle = dense_monotone(c, s3, pi, 200000);
    CHECK_FALSE(oracle);
    const auto p = make_pair(pi, c, s3);
    CHECK(argument_monotone(p) == oracle);
    CHECK(max_backward_step(p) > 0.0);
}

TEST_CASE("zero-mean residual of a constant component") {
    const auto p = make_pair(pi, [](double) { return 1.0; }, [](double t) { return std::sin(t); });
    CHECK(zero_mean_residual(p).first == doctest::Approx(pi).epsilon(1e-12));
}

TEST_CASE("admissibility rejections") {
    SUBCASE("winding too often") {
        const auto p = make_pair(2 * pi, [](double t) { return std::cos(16 * t); },
                                 [](double t) { return std::sin(16 * t); });
        const auto rep = check_admissibility(p);
        CHECK_FALSE(rep.admissible);
        CHECK(rep.index == doctest::Approx(16.0).epsilon(1e-6));
        CHECK_FALSE(rep.failure_summary().empty());
    }
    SUBCASE("nonzero mean") {
        const auto p = make_pair(pi, [](double t) { return std::cos(t) + 1.0; }, [](double t) { return std::sin(t); });
        CHECK_FALSE(check_admissibility(p).admissible);
    }
    SUBCASE("linearly dependent pair") {
        const auto p = make_pair(2 * pi, [](double t) { return std::cos(t); }, [](double t) { return 2 * std::cos(t); });
        const auto rep = check_admissibility(p);
        CHECK_FALSE(rep.admissible);
        CHECK_FALSE(rep.linearly_independent);
    }
    CHECK(AdmissibilityReport::csv_header().find("admissible") != std::string::npos);
}

TEST_CASE("custom pairs from samples and CSV") {
    std::vector<double> t, f1, f2;
    for (int k = 0; k <= 400; ++k) {
        const double s = 2 * pi * k / 400;
        t.push_back(s);
        f1.push_back(std::cos(s));
        f2.push_back(std::sin(s));
    }
    const auto p = pair_from_samples(t, f1, f2);
    CHECK(p.ell == doctest::Approx(2 * pi));
    CHECK(winding_index(p) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(check_admissibility(p).admissible);
    CHECK_THROWS(pair_from_samples({0.0, 1.0, 0.5}, {1, 1, 1}, {0, 0, 0}));
    CHECK_THROWS(pair_from_samples({0.1, 1.0}, {1, 1}, {0, 0}));

    const std::string path = "aet_test_pair.csv";
    {
        std::ofstream out(path);
        out << "# custom pair\nt,f1,f2\n";
        for (std::size_t k = 0; k < t.size(); ++k) out << t[k] << ',' << f1[k] << ',' << f2[k] << '\n';
    }
    const auto q = pair_from_csv(path);
    CHECK(q.ell == doctest::Approx(2 * pi).epsilon(1e-5));
    CHECK(winding_index(q) == doctest::Approx(1.0).epsilon(1e-5));
    std::remove(path.c_str());
}

TEST_CASE("family names") {
    CHECK(family_from_name("adapted") == PairFamily::adapted);
    CHECK(family_from_name("cutoff") == PairFamily::cutoff);
    CHECK(to_string(PairFamily::cutoff) == "cutoff");
    CHECK_THROWS(family_from_name("spiral"));
}
