#include <doctest.h>

#include <vector>

#include "qnav/simulator.hpp"
#include "qnav/synthesis.hpp"
#include "support.hpp"

using namespace qnav;
using testsup::aligned_distance;
using testsup::iterated_depletion;
using testsup::make_rng;
using testsup::max_abs_diff;
using testsup::random_density;
using testsup::random_probabilities;

namespace {

DensityMatrix run_analytic(const NavigationPlan& plan, const DensityMatrix& rho0) {
  return execute_plan(plan, rho0, ExecutionMode::Analytic).final_state;
}

}  // namespace

TEST_SUITE("incoherent maps") {
  TEST_CASE("dephasing keeps populations and kills every coherence") {
    auto rng = make_rng(301);
    const DensityMatrix rho = random_density(rng, 4);
    const DensityMatrix out = apply_dephasing_map(rho);

    CHECK((out.populations() - rho.populations()).cwiseAbs().maxCoeff() <
          1e-14);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j)
        if (i != j) CHECK(std::abs(out.matrix()(i, j)) == 0.0);
    CHECK(std::abs(out.matrix().trace().real() - 1.0) < 1e-14);
  }

  TEST_CASE("dephasing a diagonal matrix is a no-op") {
    RealVector pops(3);
    pops << 0.5, 0.2, 0.3;
    const DensityMatrix rho = DensityMatrix::diagonal(pops);
    CHECK(max_abs_diff(apply_dephasing_map(rho).matrix(), rho.matrix()) == 0.0);
  }

  TEST_CASE("dephasing the engineering superposition leaves its populations") {
    const DensityMatrix carrier(testsup::ref::carrier_rho(), 1e-9);
    const DensityMatrix out = apply_dephasing_map(carrier);
    CHECK((out.populations() - testsup::ref::dephased_populations())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }

  TEST_CASE("short-pulse map: driven level loses 2px/3, others gain px/3") {
    const DensityMatrix start = DensityMatrix::basis(3, 0);
    const double p = 0.37;
    const DensityMatrix out = apply_short_pulse_decay_map(start, 0, p);
    CHECK(out.populations()(0) == doctest::Approx(1.0 - 2.0 * p / 3.0));
    CHECK(out.populations()(1) == doctest::Approx(p / 3.0));
    CHECK(out.populations()(2) == doctest::Approx(p / 3.0));
  }

  TEST_CASE("short-pulse map worked example on a partially filled level") {
    RealVector pops(3);
    pops << 0.5, 0.5, 0.0;
    const DensityMatrix out =
        apply_short_pulse_decay_map(DensityMatrix::diagonal(pops), 1, 0.6);
    CHECK(out.populations()(0) == doctest::Approx(0.6));
    CHECK(out.populations()(1) == doctest::Approx(0.3));
    CHECK(out.populations()(2) == doctest::Approx(0.1));
  }

  TEST_CASE("short-pulse map: p = 0 is a no-op; bad inputs are rejected") {
    auto rng = make_rng(302);
    RealVector pops = random_probabilities(rng, 3);
    const DensityMatrix rho = DensityMatrix::diagonal(pops);
    CHECK(max_abs_diff(apply_short_pulse_decay_map(rho, 1, 0.0).matrix(),
                       rho.matrix()) < 1e-15);

    CHECK_THROWS_AS(apply_short_pulse_decay_map(rho, 0, 1.5), ValidationError);
    CHECK_THROWS_AS(apply_short_pulse_decay_map(rho, 0, -0.1), ValidationError);
    CHECK_THROWS_AS(apply_short_pulse_decay_map(rho, 5, 0.5), ValidationError);

    const DensityMatrix coherent = random_density(rng, 3);
    CHECK_THROWS_AS(apply_short_pulse_decay_map(coherent, 0, 0.5),
                    ValidationError);
  }

  TEST_CASE("long depletion empties the level, half to each neighbor") {
    const double p1 = 0.4;
    RealVector pops(3);
    pops << 1.0 - 2.0 * p1 / 3.0, p1 / 3.0, p1 / 3.0;
    const DensityMatrix out =
        apply_long_depletion_map(DensityMatrix::diagonal(pops), 2);
    CHECK(out.populations()(0) == doctest::Approx(1.0 - p1 / 2.0));
    CHECK(out.populations()(1) == doctest::Approx(p1 / 2.0));
    CHECK(out.populations()(2) == doctest::Approx(0.0));
  }

  TEST_CASE("long depletion matches the iterated pump-and-decay oracle") {
    auto rng = make_rng(303);
    for (int rep = 0; rep < 30; ++rep) {
      RealVector pops = random_probabilities(rng, 3);
      const Eigen::Index level = static_cast<Eigen::Index>(rep % 3);
      const DensityMatrix out =
          apply_long_depletion_map(DensityMatrix::diagonal(pops), level);
      const RealVector oracle = iterated_depletion(pops, level);
      CHECK((out.populations() - oracle).cwiseAbs().maxCoeff() < 1e-13);
    }

    RealVector fixed(3);
    fixed << 0.2, 0.3, 0.5;
    const DensityMatrix out =
        apply_long_depletion_map(DensityMatrix::diagonal(fixed), 2);
    CHECK(out.populations()(0) == doctest::Approx(0.45));
    CHECK(out.populations()(1) == doctest::Approx(0.55));
  }

  TEST_CASE("long depletion of an empty level is a no-op") {
    RealVector pops(3);
    pops << 0.7, 0.3, 0.0;
    const DensityMatrix rho = DensityMatrix::diagonal(pops);
    CHECK(max_abs_diff(apply_long_depletion_map(rho, 2).matrix(), rho.matrix()) <
          1e-15);
  }

  TEST_CASE("all incoherent maps preserve trace and positivity") {
    auto rng = make_rng(304);
    for (int rep = 0; rep < 20; ++rep) {
      RealVector pops = random_probabilities(rng, 3);
      const DensityMatrix rho = DensityMatrix::diagonal(pops);
      for (const DensityMatrix& out :
           {apply_short_pulse_decay_map(rho, rep % 3, 0.3 + 0.1 * (rep % 5)),
            apply_long_depletion_map(rho, rep % 3)}) {
        CHECK(std::abs(out.matrix().trace().real() - 1.0) < 1e-14);
        CHECK(out.populations().minCoeff() >= 0.0);
      }
    }
  }
}

TEST_SUITE("sculpting probabilities") {
  TEST_CASE("worked spectrum (0.6, 0.3, 0.1)") {
    RealVector r(3);
    r << 0.6, 0.3, 0.1;
    const auto [p1, p2] = spontaneous_probabilities(r);
    CHECK(p1 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(p2 == doctest::Approx(0.375).epsilon(1e-12));
  }

  TEST_CASE("pure spectrum needs no pulses; flat spectrum needs a full one") {
    RealVector pure(3), flat(3);
    pure << 1.0, 0.0, 0.0;
    flat << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
    const auto [a1, a2] = spontaneous_probabilities(pure);
    CHECK(a1 == 0.0);
    CHECK(a2 == 0.0);
    const auto [b1, b2] = spontaneous_probabilities(flat);
    CHECK(b1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(b2 == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("composite map sends (1,0,0) to the requested spectrum") {
    auto rng = make_rng(305);
    for (int rep = 0; rep < 200; ++rep) {
      RealVector r = random_probabilities(rng, 3);
      std::sort(r.data(), r.data() + 3, std::greater<>());
      const auto [p1, p2] = spontaneous_probabilities(r);
      CHECK(p1 >= 0.0);
      CHECK(p1 <= 1.0);
      CHECK(p2 >= 0.0);
      CHECK(p2 <= 1.0);

      DensityMatrix state = DensityMatrix::basis(3, 0);
      state = apply_short_pulse_decay_map(state, 0, p1);
      state = apply_long_depletion_map(state, 2);
      state = apply_short_pulse_decay_map(state, 0, p2);
      CHECK((state.populations() - r).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("unsorted spectra are rejected") {
    RealVector r(3);
    r << 0.3, 0.6, 0.1;
    CHECK_THROWS_AS(spontaneous_probabilities(r), ValidationError);
  }
}

TEST_SUITE("dephasing route") {
  TEST_CASE("plan shape: lift reflection, dephase, coherent tail") {
    auto rng = make_rng(306);
    const DensityMatrix target = random_density(rng, 3);
    const NavigationPlan plan = plan_dephasing_route(0, target);

    REQUIRE(plan.size() >= 2);
    CHECK(std::holds_alternative<Reflection>(plan.steps[0]));
    CHECK(std::holds_alternative<Dephase>(plan.steps[1]));
    CHECK(max_abs_diff(run_analytic(plan, DensityMatrix::basis(3, 0)).matrix(),
                       target.matrix()) < 1e-10);
  }

  TEST_CASE("the lift reflection carries the start into the spectrum weights") {
    auto rng = make_rng(307);
    const DensityMatrix target = random_density(rng, 3);
    const NavigationPlan plan = plan_dephasing_route(0, target);
    const RealVector r = spectrum(target).eigenvalues;

    const Reflection& lift = std::get<Reflection>(plan.steps[0]);
    const Vector mapped =
        lift.matrix() * QuantumState::basis(3, 0).amplitudes();
    for (Eigen::Index i = 0; i < 3; ++i)
      CHECK(std::norm(mapped(i)) == doctest::Approx(r(i)).epsilon(1e-10));
  }

  TEST_CASE("random targets are reached exactly in analytic execution") {
    auto rng = make_rng(308);
    for (const Variant variant : {Variant::Standard, Variant::Generalized}) {
      for (int rep = 0; rep < 25; ++rep) {
        const DensityMatrix target = random_density(rng, 3);
        const NavigationPlan plan = plan_dephasing_route(0, target, 2.0, variant);
        CHECK(max_abs_diff(
                  run_analytic(plan, DensityMatrix::basis(3, 0)).matrix(),
                  target.matrix()) < 1e-10);
      }
    }
  }

  TEST_CASE("works from any start level and for larger systems") {
    auto rng = make_rng(309);
    for (Eigen::Index start : {0, 1, 2, 3}) {
      const DensityMatrix target = random_density(rng, 4);
      const NavigationPlan plan = plan_dephasing_route(start, target);
      CHECK(max_abs_diff(
                run_analytic(plan, DensityMatrix::basis(4, start)).matrix(),
                target.matrix()) < 1e-10);
    }
  }

  TEST_CASE("pure target equal to the start needs no steps") {
    CHECK(plan_dephasing_route(0, DensityMatrix::basis(3, 0)).empty());
  }

  TEST_CASE("maximally mixed target: lift and dephase, no coherent tail") {
    const DensityMatrix target(Matrix::Identity(3, 3) / 3.0);
    const NavigationPlan plan = plan_dephasing_route(0, target);
    REQUIRE(plan.size() == 2);
    CHECK(std::holds_alternative<Reflection>(plan.steps[0]));
    CHECK(std::holds_alternative<Dephase>(plan.steps[1]));

    // The lift lands on the uniform real-positive superposition.
    const Reflection& lift = std::get<Reflection>(plan.steps[0]);
    const Vector mapped =
        lift.matrix() * QuantumState::basis(3, 0).amplitudes();
    CHECK(aligned_distance(mapped, testsup::ref::uniform_target()) < 1e-10);
    CHECK(max_abs_diff(run_analytic(plan, DensityMatrix::basis(3, 0)).matrix(),
                       target.matrix()) < 1e-12);
  }

  TEST_CASE("invalid arguments are rejected") {
    auto rng = make_rng(310);
    const DensityMatrix target = random_density(rng, 3);
    CHECK_THROWS_AS(plan_dephasing_route(5, target), ValidationError);
    CHECK_THROWS_AS(plan_dephasing_route(0, target, -1.0), ValidationError);
  }
}

TEST_SUITE("spontaneous-emission route") {
  TEST_CASE("plan shape: sculpting block then coherent tail") {
    auto rng = make_rng(311);
    const DensityMatrix target = random_density(rng, 3);
    const NavigationPlan plan = plan_spontaneous_route(0, target);

    REQUIRE(plan.size() >= 3);
    CHECK(std::holds_alternative<ShortPulseDecay>(plan.steps[0]));
    CHECK(std::holds_alternative<LongDepletion>(plan.steps[1]));
    CHECK(std::holds_alternative<ShortPulseDecay>(plan.steps[2]));
    CHECK(max_abs_diff(run_analytic(plan, DensityMatrix::basis(3, 0)).matrix(),
                       target.matrix()) < 1e-10);
  }

  TEST_CASE("random targets are reached exactly in analytic execution") {
    auto rng = make_rng(312);
    for (const Variant variant : {Variant::Standard, Variant::Generalized}) {
      for (int rep = 0; rep < 25; ++rep) {
        const DensityMatrix target = random_density(rng, 3);
        const NavigationPlan plan = plan_spontaneous_route(0, target, variant);
        CHECK(max_abs_diff(
                  run_analytic(plan, DensityMatrix::basis(3, 0)).matrix(),
                  target.matrix()) < 1e-10);
      }
    }
  }

  TEST_CASE("sorted diagonal target needs no coherent tail") {
    RealVector pops(3);
    pops << 0.6, 0.3, 0.1;
    const NavigationPlan plan =
        plan_spontaneous_route(0, DensityMatrix::diagonal(pops));
    for (const auto& s : plan.steps) CHECK(!is_coherent(s));
    CHECK(max_abs_diff(run_analytic(plan, DensityMatrix::basis(3, 0)).matrix(),
                       DensityMatrix::diagonal(pops).matrix()) < 1e-12);
  }

  TEST_CASE("pure target equal to the start is a no-op plan") {
    const NavigationPlan plan =
        plan_spontaneous_route(0, DensityMatrix::basis(3, 0));
    CHECK(plan.empty());
  }

  TEST_CASE("starting away from level 1 inserts a relabeling reflection") {
    auto rng = make_rng(313);
    const DensityMatrix target = random_density(rng, 3);
    const NavigationPlan plan = plan_spontaneous_route(1, target);
    REQUIRE(!plan.empty());
    CHECK(std::holds_alternative<Reflection>(plan.steps[0]));
    CHECK(max_abs_diff(run_analytic(plan, DensityMatrix::basis(3, 1)).matrix(),
                       target.matrix()) < 1e-10);
  }

  TEST_CASE("only qutrits are supported") {
    auto rng = make_rng(314);
    const DensityMatrix target = random_density(rng, 4);
    CHECK_THROWS_AS(plan_spontaneous_route(0, target), ValidationError);
  }

  TEST_CASE("incoherent block changes the spectrum to the target's") {
    auto rng = make_rng(315);
    const DensityMatrix target = random_density(rng, 3);
    const NavigationPlan plan = plan_spontaneous_route(0, target);

    // Execute only the incoherent prefix.
    NavigationPlan prefix = plan;
    prefix.steps.clear();
    for (const auto& s : plan.steps)
      if (!is_coherent(s)) prefix.steps.emplace_back(s);
    prefix.target = StateDescriptor();

    const DensityMatrix mid = run_analytic(prefix, DensityMatrix::basis(3, 0));
    const RealVector target_r = spectrum(target).eigenvalues;
    const RealVector mid_r = spectrum(mid).eigenvalues;
    CHECK((mid_r - target_r).cwiseAbs().maxCoeff() < 1e-10);
  }
}
