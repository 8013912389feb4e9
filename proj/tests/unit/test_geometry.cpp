#include <doctest.h>

#include <liesym/errors.hpp>
#include <liesym/geometry.hpp>

#include <cmath>
#include <numeric>

using namespace liesym;

TEST_CASE("default domains") {
    const Domain h = Domain::heat_default();
    CHECK(h.x_min == 0.0);
    CHECK(h.x_max == 1.0);
    CHECK(h.t_min == 0.0);
    CHECK(h.t_max == doctest::Approx(0.1));
    const Domain w = Domain::wave_default();
    CHECK(w.t_max == 1.0);
    CHECK_THROWS_AS((Domain{1.0, 0.0, 0.0, 1.0}).validate(), ConfigError);
    CHECK_THROWS_AS((Domain{0.0, 1.0, 0.5, 0.5}).validate(), ConfigError);
}

TEST_CASE("heat problem has the initial line and two constant edges") {
    const auto p = build_problem(PdeKind::Heat, IcProfile::defaults(ProfileKind::Sine),
                                 Domain::heat_default());
    REQUIRE(p.components.size() == 3);
    CHECK(p.components[0].id == ComponentId::InitialLine);
    const auto& left = p.component(ComponentId::LeftEdge);
    CHECK(left.start.x == 0.0);
    CHECK(left.end.t == doctest::Approx(0.1));
    CHECK(left.target(0.0, 0.05) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(p.component(ComponentId::InitialVelocityLine), ConfigError);
}

TEST_CASE("heat edge targets follow u0 at the ends") {
    IcProfile prof{ProfileKind::Polynomial, {0.3, 1.0}};
    const auto p = build_problem(PdeKind::Heat, prof, Domain::heat_default());
    CHECK(p.component(ComponentId::LeftEdge).target(0.0, 0.07) == doctest::Approx(0.3));
    CHECK(p.component(ComponentId::RightEdge).target(1.0, 0.02) == doctest::Approx(1.3));
}

TEST_CASE("wave problem adds a zero-velocity line") {
    const auto p = build_problem(PdeKind::Wave, IcProfile::defaults(ProfileKind::Sine),
                                 Domain::wave_default());
    REQUIRE(p.components.size() == 4);
    const auto& v = p.component(ComponentId::InitialVelocityLine);
    CHECK(v.condition == ConditionKind::TimeDerivative);
    CHECK(v.target(0.3, 0.0) == 0.0);
    for (const auto& c : p.components) {
        if (c.id != ComponentId::InitialVelocityLine) CHECK(c.condition == ConditionKind::Value);
    }
}

TEST_CASE("wave rejects a profile that does not vanish at the ends") {
    IcProfile prof{ProfileKind::Gaussian, {1.0, 0.0, 0.2}};
    CHECK_THROWS_AS(build_problem(PdeKind::Wave, prof, Domain::wave_default()), ConfigError);
}

TEST_CASE("profiles") {
    CHECK(eval_profile(IcProfile::defaults(ProfileKind::Sine), 0.5) == doctest::Approx(1.0));
    CHECK(eval_profile(IcProfile::defaults(ProfileKind::Gaussian), 0.5) == doctest::Approx(1.0));

    SUBCASE("step takes the left limit at each jump") {
        const auto step = IcProfile::defaults(ProfileKind::Step);
        CHECK(eval_profile(step, 0.25) == 0.0);
        CHECK(eval_profile(step, 0.2500001) == 1.0);
        CHECK(eval_profile(step, 0.75) == 1.0);
        CHECK(eval_profile(step, 0.7500001) == 0.0);
        CHECK(step.jumps() == std::vector<double>{0.25, 0.75});
    }

    SUBCASE("polynomial default vanishes at both ends and peaks at one") {
        const auto poly = IcProfile::defaults(ProfileKind::Polynomial);
        CHECK(eval_profile(poly, 0.0) == 0.0);
        CHECK(std::abs(eval_profile(poly, 1.0)) < 1e-15);
        // Peak of x(1-x)(x+1/2) from the derivative's root, by hand.
        const double xs = (1.0 + std::sqrt(7.0)) / 6.0;
        CHECK(eval_profile(poly, xs) == doctest::Approx(1.0).epsilon(1e-12));
        double worst = 0.0;
        for (int i = 0; i <= 10000; ++i) worst = std::max(worst, eval_profile(poly, i / 10000.0));
        CHECK(worst <= 1.0 + 1e-12);
    }

    SUBCASE("invalid layouts") {
        CHECK_THROWS_AS((IcProfile{ProfileKind::Sine, {1.0}}).validate(), ConfigError);
        CHECK_THROWS_AS((IcProfile{ProfileKind::Gaussian, {1.0, 0.5, 0.0}}).validate(), ConfigError);
        CHECK_THROWS_AS((IcProfile{ProfileKind::Step, {1.0, 0.8, 0.2}}).validate(), ConfigError);
        CHECK_THROWS_AS(parse_profile_kind("square"), ConfigError);
    }
}

TEST_CASE("allocation") {
    const auto heat = build_problem(PdeKind::Heat, IcProfile::defaults(ProfileKind::Sine),
                                    Domain::heat_default());
    const auto fr = default_allocation(heat);
    const auto counts = allocate_counts(3000, fr);
    CHECK(counts == std::vector<std::size_t>{1500, 750, 750});

    const auto odd = allocate_counts(7, std::vector<double>{0.5, 0.25, 0.25});
    CHECK(std::accumulate(odd.begin(), odd.end(), std::size_t{0}) == 7);
    CHECK(odd == std::vector<std::size_t>{3, 2, 2});
}

TEST_CASE("training set sampling") {
    const auto wave = build_problem(PdeKind::Wave, IcProfile::defaults(ProfileKind::SineMix),
                                    Domain::wave_default());
    const auto fr = default_allocation(wave);
    const auto a = sample_training_set(wave, 3000, fr, 11);
    const auto b = sample_training_set(wave, 3000, fr, 11);
    const auto c = sample_training_set(wave, 3000, fr, 12);
    REQUIRE(a.size() == 3000);
    CHECK(a.x == b.x);
    CHECK(a.t == b.t);
    CHECK(a.x != c.x);
    CHECK(a.count(ComponentId::InitialLine) == 1125);
    CHECK(a.count(ComponentId::InitialVelocityLine) == 375);
    CHECK(a.has_derivative_rows());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& comp = wave.component(a.components[i]);
        CHECK(comp.contains({a.x[i], a.t[i]}));
        CHECK(a.targets[i] == comp.target(a.x[i], a.t[i]));
        CHECK((a.kinds[i] == ConditionKind::TimeDerivative) ==
              (a.components[i] == ComponentId::InitialVelocityLine));
        if (a.components[i] == ComponentId::LeftEdge) CHECK(a.x[i] == 0.0);
        if (a.components[i] == ComponentId::InitialLine) CHECK(a.t[i] == 0.0);
    }

    CHECK_THROWS_AS(sample_training_set(wave, 3000, std::vector<double>{0.5, 0.5}, 1), ConfigError);
    CHECK_THROWS_AS(sample_training_set(wave, 3000, std::vector<double>{0.5, 0.5, 0.5, -0.5}, 1),
                    ConfigError);
    CHECK_THROWS_AS(sample_training_set(wave, 2, fr, 1), ConfigError);
}
