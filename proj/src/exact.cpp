#include <cmath>
#include <complex>
#include <numbers>

#include "wallmem/dynamics.hpp"
#include "wallmem/error.hpp"
#include "wallmem/hamiltonian.hpp"
#include "wallmem/text.hpp"

namespace wallmem {

namespace {

// Largest Chebyshev phase 2 pi tau W handled in one expansion. Longer
// propagations are split into equal chunks sharing one coefficient set.
constexpr double kMaxChunkPhase = 250.0;
constexpr double kCoefficientCutoff = 1e-17;
constexpr double kNormDriftLimit = 1e-6;

// Fourth-order commutator-free Magnus nodes and weights.
const double kSqrt3 = std::sqrt(3.0);
const double kNode1 = 0.5 - kSqrt3 / 6.0;
const double kNode2 = 0.5 + kSqrt3 / 6.0;
const double kWeight1 = 0.25 - kSqrt3 / 6.0;
const double kWeight2 = 0.25 + kSqrt3 / 6.0;

std::vector<std::complex<double>> chebyshev_coefficients(double phase) {
    const int kmax = static_cast<int>(phase + 15.0 * std::cbrt(phase) + 30.0);
    const auto bessel = bessel_j_sequence(phase, kmax);
    int last = kmax;
    while (last > 0 && std::abs(bessel[static_cast<std::size_t>(last)]) < kCoefficientCutoff) --last;
    std::vector<std::complex<double>> coeffs(static_cast<std::size_t>(last + 1));
    std::complex<double> minus_i_pow{1.0, 0.0};
    for (int k = 0; k <= last; ++k) {
        const double scale = (k == 0) ? 1.0 : 2.0;
        coeffs[static_cast<std::size_t>(k)] = scale * bessel[static_cast<std::size_t>(k)] * minus_i_pow;
        minus_i_pow *= std::complex<double>{0.0, -1.0};
    }
    return coeffs;
}

class Propagator {
public:
    Propagator(const RingHamiltonian& hamiltonian) : h_(hamiltonian) {
        const auto d = h_.dim();
        prev_.resize(d);
        cur_.resize(d);
        acc_.resize(d);
    }

    long long run(const RingCoefficients& c, double tau_ns, Eigen::VectorXcd& psi) {
        using cd = std::complex<double>;
        const auto [centre, half_width] = h_.spectral_interval(c);
        if (tau_ns == 0.0) return 0;
        const double two_pi_tau = 2.0 * std::numbers::pi * tau_ns;
        const cd centre_phase = std::polar(1.0, -two_pi_tau * centre);
        if (half_width == 0.0) {
            psi *= centre_phase;
            return 0;
        }
        // exp(-i 2 pi tau H) = exp(-i 2 pi tau c) exp(-i x S), S = (H - c) / w, x = 2 pi tau w.
        const double total_phase = two_pi_tau * half_width;
        const int chunks = std::max(1, static_cast<int>(std::ceil(total_phase / kMaxChunkPhase)));
        auto coeffs = chebyshev_coefficients(total_phase / chunks);
        const cd chunk_phase = std::polar(1.0, -two_pi_tau * centre / chunks);
        for (auto& a : coeffs) a *= chunk_phase;
        const double inv_w = 1.0 / half_width;

        long long matvecs = 0;
        for (int chunk = 0; chunk < chunks; ++chunk) {
            prev_ = psi;
            acc_ = coeffs[0] * prev_;
            if (coeffs.size() > 1) {
                h_.apply_affine(c, centre, inv_w, prev_, 0.0, prev_, cur_);
                ++matvecs;
                acc_ += coeffs[1] * cur_;
            }
            for (std::size_t k = 2; k < coeffs.size(); ++k) {
                // T_{k} = 2 S T_{k-1} - T_{k-2}, written over the T_{k-2} buffer.
                h_.apply_affine(c, centre, 2.0 * inv_w, cur_, -1.0, prev_, prev_);
                ++matvecs;
                acc_ += coeffs[k] * prev_;
                prev_.swap(cur_);
            }
            psi = acc_;
        }
        return matvecs;
    }

private:
    const RingHamiltonian& h_;
    Eigen::VectorXcd prev_, cur_, acc_;
};

void renormalize(Eigen::VectorXcd& psi, ExactStats& stats) {
    const double norm = psi.norm();
    const double drift = std::abs(norm - 1.0);
    stats.max_norm_drift = std::max(stats.max_norm_drift, drift);
    if (drift > kNormDriftLimit) {
        throw Error("exact backend: norm drift " + format_double(stats.max_norm_drift) +
                    " exceeds " + format_double(kNormDriftLimit));
    }
    psi /= norm;
}

}  // namespace

std::vector<double> bessel_j_sequence(double x, int kmax) {
    if (kmax < 0) throw Error("bessel_j_sequence: negative order");
    std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double top = std::max(static_cast<double>(kmax), std::abs(x));
    int start = static_cast<int>(top + 20.0 + std::sqrt(40.0 * top));
    start += start % 2;
    std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
    j[static_cast<std::size_t>(start)] = 1e-300;
    for (int k = start; k >= 1; --k) {
        const auto ku = static_cast<std::size_t>(k);
        j[ku - 1] = (2.0 * k / x) * j[ku] - j[ku + 1];
        if (std::abs(j[ku - 1]) > 1e250) {
            for (std::size_t m = ku - 1; m <= static_cast<std::size_t>(start); ++m) j[m] *= 1e-250;
        }
    }
    double norm = j[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * j[static_cast<std::size_t>(k)];
    for (int k = 0; k <= kmax; ++k) out[static_cast<std::size_t>(k)] = j[static_cast<std::size_t>(k)] / norm;
    return out;
}

long long propagate_constant(const RingHamiltonian& hamiltonian, const RingCoefficients& c,
                             double duration_ns, Eigen::VectorXcd& psi) {
    Propagator prop(hamiltonian);
    return prop.run(c, duration_ns, psi);
}

QuantumState evolve_exact(const RingSpec& spec, const ScheduleTable& table,
                          const Waveform& waveform, const BackendConfig& cfg, ExactStats* stats) {
    return evolve_exact(initial_state(spec), spec.j_programmed, table, waveform, cfg, stats);
}

QuantumState evolve_exact(const SpinConfig& initial, double j_programmed,
                          const ScheduleTable& table, const Waveform& waveform,
                          const BackendConfig& cfg, ExactStats* stats) {
    validate(cfg);
    const int n = initial.size();
    if (n > kMaxExactSites) {
        throw Error("exact backend supports at most " + std::to_string(kMaxExactSites) +
                    " spins, got " + std::to_string(n));
    }
    const RingHamiltonian hamiltonian(n);
    Propagator prop(hamiltonian);
    QuantumState state = QuantumState::basis(initial);
    ExactStats local;

    // Within each smooth piece the coefficients are affine in t, which keeps
    // the Magnus step at full order.
    const auto bounds = smooth_piece_bounds(table, waveform);
    for (std::size_t piece = 0; piece + 1 < bounds.size(); ++piece) {
        const double t0 = bounds[piece] * 1000.0;
        const double t1 = bounds[piece + 1] * 1000.0;
        const double mid_us = 0.5 * (bounds[piece] + bounds[piece + 1]);
        const double s0 = std::clamp(s_at(waveform, bounds[piece]), 0.0, 1.0);
        const double s1 = std::clamp(s_at(waveform, bounds[piece + 1]), 0.0, 1.0);
        if (s0 == s1 && s_at(waveform, mid_us) == s0) {
            local.matvecs += prop.run(ring_coefficients(table, s0, j_programmed), t1 - t0,
                                      state.amplitudes);
            renormalize(state.amplitudes, local);
            continue;
        }
        const auto c0 = ring_coefficients(table, s0, j_programmed);
        const auto c1 = ring_coefficients(table, s1, j_programmed);
        const auto coeffs_at = [&](double t) {
            const double w = (t - t0) / (t1 - t0);
            return blend(c0, 1.0 - w, c1, w);
        };
        const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil((t1 - t0) / cfg.dt_ns - 1e-9)));
        const double h = (t1 - t0) / static_cast<double>(steps);
        for (long long m = 0; m < steps; ++m) {
            const double t = t0 + static_cast<double>(m) * h;
            const auto ca = coeffs_at(t + kNode1 * h);
            const auto cb = coeffs_at(t + kNode2 * h);
            // The factor leaning on the earlier node acts first. Each carries total
            // weight 1/2, folded into the duration.
            local.matvecs += prop.run(blend(ca, 2.0 * kWeight2, cb, 2.0 * kWeight1), 0.5 * h,
                                      state.amplitudes);
            local.matvecs += prop.run(blend(ca, 2.0 * kWeight1, cb, 2.0 * kWeight2), 0.5 * h,
                                      state.amplitudes);
            renormalize(state.amplitudes, local);
        }
    }
    if (stats) *stats = local;
    return state;
}

}  // namespace wallmem
