#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "wallmem/dynamics.hpp"
#include "wallmem/error.hpp"

using namespace wallmem;

namespace {

RingSpec ring(int n, double j = 1.0) {
    RingSpec s;
    s.n = n;
    s.j_programmed = j;
    return validated(s);
}

BackendConfig exact_cfg(double dt = 0.01) {
    BackendConfig c;
    c.dt_ns = dt;
    return c;
}

std::uint64_t flip_index(std::uint64_t idx, int n) { return idx ^ ((std::uint64_t{1} << n) - 1); }

}  // namespace

TEST_CASE("bessel sequence matches high-precision values") {
    // J_k(x) evaluated with mpmath at 30 digits.
    struct Row {
        double x;
        double j0, j1, j5, j30;
    };
    const Row rows[] = {
        {0.5, 0.938469807240812904, 0.242268457674873886, 8.05362724135747409e-6, 3.26335682891397850e-51},
        {7.3, 0.288216947635014399, 0.0825704304932578311, 0.313706170897309077, 1.80804283098016634e-16},
        {120.0, 0.0718234158291561276, -0.0118052114330018911, -0.00457184603396049551, 0.0662870027915712481},
    };
    for (const auto& r : rows) {
        const auto j = bessel_j_sequence(r.x, 40);
        CHECK(j[0] == doctest::Approx(r.j0).epsilon(1e-12));
        CHECK(j[1] == doctest::Approx(r.j1).epsilon(1e-11));
        CHECK(j[5] == doctest::Approx(r.j5).epsilon(1e-11));
        CHECK(j[30] == doctest::Approx(r.j30).epsilon(1e-9));
    }
    CHECK(bessel_j_sequence(0.0, 3)[0] == 1.0);
    CHECK(bessel_j_sequence(0.0, 3)[2] == 0.0);
}

TEST_CASE("matrix-free Hamiltonian agrees with the dense Kronecker build") {
    for (int n : {3, 5, 7}) {
        const RingHamiltonian h(n);
        const RingCoefficients c{0.7, 1.3};
        const Eigen::MatrixXd dense = dense_ring_hamiltonian(n, c.gamma_ghz, c.zz_ghz);
        Eigen::VectorXcd x = Eigen::VectorXcd::Random(h.dim());
        Eigen::VectorXcd y;
        h.apply(c, x, y);
        CHECK((y - dense.cast<std::complex<double>>() * x).norm() < 1e-12);

        const auto [centre, half] = h.spectral_interval(c);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
        CHECK(eig.eigenvalues().minCoeff() >= centre - half - 1e-12);
        CHECK(eig.eigenvalues().maxCoeff() <= centre + half + 1e-12);
    }
}

TEST_CASE("A = 0 leaves the initial basis state in place") {
    const auto spec = ring(3);
    const auto w = build_reverse_waveform(1.0, 0.01, 0.01);
    const auto psi = evolve_exact(spec, ScheduleTable::synthetic_default(), w, exact_cfg());
    const auto idx = initial_state(spec).to_index();
    CHECK(std::norm(psi.amplitudes[static_cast<Eigen::Index>(idx)]) == doctest::Approx(1.0).epsilon(1e-12));
    Rng rng(1);
    for (const auto& c : measure_z(psi, 100, rng)) CHECK(c == initial_state(spec));
}

TEST_CASE("with A identically zero both backends reproduce the diagonal phase") {
    // B linear in s and s linear in t: the phase integral is exact trapezoid.
    const ScheduleTable table("no-field", {{0.0, 0.0, 2.0}, {1.0, 0.0, 10.0}});
    const auto spec = ring(5, 0.5);
    const double sp = 0.3, ramp_ns = 8.0, hold_ns = 5.0;
    const auto w = build_reverse_waveform(sp, ramp_ns / 1000.0, hold_ns / 1000.0);
    const double b_pause = 2.0 + 8.0 * sp;
    const double integral = ramp_ns * (10.0 + b_pause) + hold_ns * b_pause;  // GHz ns
    const double zz_sum = 2.0 - spec.n;  // one aligned edge
    const double phase = -2.0 * std::numbers::pi * 0.5 * spec.j_programmed * zz_sum * integral;
    const std::complex<double> expected = std::polar(1.0, phase);
    const auto idx = static_cast<Eigen::Index>(initial_state(spec).to_index());

    const auto exact = evolve_exact(spec, table, w, exact_cfg(0.5));
    const auto oracle = evolve_oracle(spec, table, w, 50);
    CHECK(std::abs(exact.amplitudes[idx] - expected) < 1e-10);
    CHECK(std::abs(oracle.amplitudes[idx] - expected) < 1e-10);
}

TEST_CASE("exact backend matches the dense oracle on n = 3") {
    const auto spec = ring(3);
    const auto table = ScheduleTable::synthetic_default();
    for (double sp : {0.1, 0.5, 0.9}) {
        const auto w = build_reverse_waveform(sp, 0.01, 0.01);
        const auto e = evolve_exact(spec, table, w, exact_cfg(0.01));
        const auto o = evolve_oracle(spec, table, w, 4000);
        CHECK((e.probabilities() - o.probabilities()).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("oracle converges under slice doubling") {
    const auto spec = ring(3);
    const auto table = ScheduleTable::synthetic_default();
    const auto w = build_reverse_waveform(0.5, 0.002, 0.002);
    const auto a = evolve_oracle(spec, table, w, 2000);
    const auto b = evolve_oracle(spec, table, w, 4000);
    CHECK((a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("exact backend refines at fourth order") {
    // Two knots, so one smooth piece per ramp and the step size alone sets the error.
    const auto spec = ring(5);
    const ScheduleTable table("linear", {{0.0, 6.0, 0.0}, {1.0, 0.0, 10.0}});
    const auto w = build_reverse_waveform(0.4, 0.05, 0.02);
    const auto ref = evolve_exact(spec, table, w, exact_cfg(0.003125));
    const double e1 = (evolve_exact(spec, table, w, exact_cfg(0.025)).amplitudes - ref.amplitudes).norm();
    const double e2 = (evolve_exact(spec, table, w, exact_cfg(0.0125)).amplitudes - ref.amplitudes).norm();
    CHECK(e2 < e1 / 10.0);
}

TEST_CASE("norm is conserved along a waveform") {
    ExactStats stats;
    const auto psi = evolve_exact(ring(7), ScheduleTable::synthetic_default(),
                                  build_reverse_waveform(0.3, 0.05, 0.1), exact_cfg(0.2), &stats);
    CHECK(stats.max_norm_drift < 1e-6);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stats.matvecs > 0);
}

TEST_CASE("energy is conserved during a hold") {
    const RingHamiltonian h(7);
    const auto c = ring_coefficients(ScheduleTable::synthetic_default(), 0.4, 1.0);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Random(h.dim());
    psi.normalize();
    const double before = h.energy(c, psi);
    propagate_constant(h, c, 1000.0, psi);
    CHECK(std::abs(h.energy(c, psi) - before) < 1e-6);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("global spin flip maps outcome distributions onto each other") {
    const auto table = ScheduleTable::synthetic_default();
    for (int n : {3, 5}) {
        const auto start = initial_state(ring(n));
        const auto w = build_reverse_waveform(0.4, 0.02, 0.03);
        const auto a = evolve_exact(start, 1.0, table, w, exact_cfg(0.05)).probabilities();
        const auto b = evolve_exact(global_flip(start), 1.0, table, w, exact_cfg(0.05)).probabilities();
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            CHECK(std::abs(a[i] - b[static_cast<Eigen::Index>(flip_index(static_cast<std::uint64_t>(i), n))]) < 1e-10);
        }
    }
}

TEST_CASE("backend size guards") {
    const auto w = build_reverse_waveform(0.5, 0.01, 0.0);
    CHECK_THROWS_AS(evolve_exact(ring(17), ScheduleTable::synthetic_default(), w, exact_cfg()), Error);
    CHECK_THROWS_AS(evolve_oracle(ring(9), ScheduleTable::synthetic_default(), w, 10), Error);
    BackendConfig bad;
    bad.dt_ns = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = {};
    bad.sweeps_per_us = 0.5;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = {};
    bad.temperature_mk = -1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("measure_z samples the Born distribution") {
    Rng rng(5);
    const auto basis = QuantumState::basis(SpinConfig::parse("+-+"));
    for (const auto& c : measure_z(basis, 50, rng)) CHECK(c.to_string() == "+-+");

    QuantumState uniform{3, Eigen::VectorXcd::Constant(8, 1.0 / std::sqrt(8.0))};
    std::map<std::string, int> freq;
    const int shots = 80000;
    for (const auto& c : measure_z(uniform, shots, rng)) ++freq[c.to_string()];
    CHECK(freq.size() == 8);
    for (const auto& [cfg, count] : freq) CHECK(std::abs(count / double(shots) - 0.125) < 0.005);

    QuantumState bell{3, Eigen::VectorXcd::Zero(8)};
    bell.amplitudes[1] = 1.0 / std::sqrt(2.0);
    bell.amplitudes[6] = std::complex<double>(0.0, 1.0 / std::sqrt(2.0));
    std::map<std::uint64_t, int> support;
    for (const auto& c : measure_z(bell, 2000, rng)) ++support[c.to_index()];
    CHECK(support.size() == 2);
    CHECK(support.count(1) == 1);
    CHECK(support.count(6) == 1);

    Rng r1(9), r2(9);
    const auto s1 = measure_z(uniform, 100, r1);
    const auto s2 = measure_z(uniform, 100, r2);
    CHECK(s1 == s2);
}

TEST_CASE("svmc with no transverse field at zero temperature is the identity") {
    BackendConfig cfg;
    cfg.kind = BackendKind::svmc;
    cfg.temperature_mk = 0.0;
    const auto spec = ring(11);
    Rng rng(2);
    const auto w = build_reverse_waveform(1.0, 0.5, 2.0);
    for (int k = 0; k < 20; ++k) {
        CHECK(evolve_svmc(spec, ScheduleTable::synthetic_default(), w, cfg, rng) == initial_state(spec));
    }
}

TEST_CASE("svmc is deterministic given the seed") {
    BackendConfig cfg;
    cfg.kind = BackendKind::svmc;
    const auto spec = ring(21);
    const auto w = build_reverse_waveform(0.3, 0.5, 1.0);
    Rng a(77), b(77);
    for (int k = 0; k < 5; ++k) {
        CHECK(evolve_svmc(spec, ScheduleTable::synthetic_default(), w, cfg, a) ==
              evolve_svmc(spec, ScheduleTable::synthetic_default(), w, cfg, b));
    }
}

TEST_CASE("svmc at s = 0 forgets the initial wall") {
    BackendConfig cfg;
    cfg.kind = BackendKind::svmc;
    const auto spec = ring(5);
    const auto w = build_reverse_waveform(0.0, 0.5, 1.0);
    Rng rng(123);
    const int samples = 8000;
    Eigen::VectorXd walls = Eigen::VectorXd::Zero(5);  // samples with a wall on edge e
    Eigen::VectorXd ups = Eigen::VectorXd::Zero(5);
    RotorState rotors;
    for (int k = 0; k < samples; ++k) {
        const auto c = evolve_svmc(initial_state(spec), 1.0, ScheduleTable::synthetic_default(), w, cfg, rng, &rotors);
        for (double theta : rotors.angles) REQUIRE((theta >= 0.0 && theta <= std::numbers::pi));
        for (int i = 0; i < 5; ++i) ups[i] += c[i] > 0;
        for (const auto& wall : detect_walls(c)) walls[wall.edge] += 1.0;
    }
    // 99.9% two-sided binomial bands on independent samples.
    const double coin = 3.29 * std::sqrt(0.25 / samples);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(ups[i] / samples - 0.5) < coin);
    // Every edge, the initial one included, carries a wall equally often.
    const double mu = walls.mean() / samples;
    const double band = 3.29 * std::sqrt(mu * (1 - mu) / samples);
    for (int e = 0; e < 5; ++e) CHECK(std::abs(walls[e] / samples - mu) < band);
}
