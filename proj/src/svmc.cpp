#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wallmem/dynamics.hpp"
#include "wallmem/error.hpp"

namespace wallmem {

SpinConfig evolve_svmc(const RingSpec& spec, const ScheduleTable& table,
                       const Waveform& waveform, const BackendConfig& cfg, Rng& rng) {
    return evolve_svmc(initial_state(spec), spec.j_programmed, table, waveform, cfg, rng);
}

SpinConfig evolve_svmc(const SpinConfig& initial, double j_programmed,
                       const ScheduleTable& table, const Waveform& waveform,
                       const BackendConfig& cfg, Rng& rng, RotorState* final_rotors) {
    validate(cfg);
    constexpr double pi = std::numbers::pi;
    const int n = initial.size();
    Eigen::VectorXd theta(n), cos_t(n), sin_t(n);
    for (int i = 0; i < n; ++i) {
        theta[i] = initial[i] > 0 ? 0.0 : pi;
        cos_t[i] = initial[i] > 0 ? 1.0 : -1.0;
        sin_t[i] = 0.0;
    }

    const double kt_ghz = kBoltzmannGHzPerK * cfg.temperature_mk * 1e-3;
    const double total_us = waveform.duration_us();
    const auto sweeps = std::max<long long>(1, std::llround(cfg.sweeps_per_us * total_us));

    for (long long sweep = 0; sweep < sweeps; ++sweep) {
        const double t = (static_cast<double>(sweep) + 0.5) * total_us / static_cast<double>(sweeps);
        const auto c = ring_coefficients(table, std::clamp(s_at(waveform, t), 0.0, 1.0), j_programmed);
        const double window = c.zz_ghz > 0.0 ? std::min(1.0, c.gamma_ghz / c.zz_ghz) : 1.0;
        if (window == 0.0) continue;  // no proposal can change an angle

        for (int i = 0; i < n; ++i) {
            double proposal;
            if (window >= 1.0) {
                proposal = pi * uniform01(rng);
            } else {
                proposal = theta[i] + window * pi * (2.0 * uniform01(rng) - 1.0);
                if (proposal < 0.0) proposal = -proposal;
                if (proposal > pi) proposal = 2.0 * pi - proposal;
            }
            const double cp = std::cos(proposal);
            const double sp = std::sin(proposal);
            const double neighbours = cos_t[(i + n - 1) % n] + cos_t[(i + 1) % n];
            const double delta = c.zz_ghz * (cp - cos_t[i]) * neighbours - c.gamma_ghz * (sp - sin_t[i]);
            bool accept = delta < 0.0;
            if (!accept && kt_ghz > 0.0) accept = uniform01(rng) < std::exp(-delta / kt_ghz);
            if (accept) {
                theta[i] = proposal;
                cos_t[i] = cp;
                sin_t[i] = sp;
            }
        }
    }

    std::vector<std::int8_t> spins(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::int8_t v;
        if (cos_t[i] > 0.0) {
            v = 1;
        } else if (cos_t[i] < 0.0) {
            v = -1;
        } else {
            v = fair_coin(rng) ? 1 : -1;
        }
        spins[static_cast<std::size_t>(i)] = v;
    }
    if (final_rotors) final_rotors->angles = theta;
    return SpinConfig(std::move(spins));
}

}  // namespace wallmem
