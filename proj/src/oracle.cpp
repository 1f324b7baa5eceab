#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "wallmem/dynamics.hpp"
#include "wallmem/error.hpp"

namespace wallmem {

namespace {

Eigen::MatrixXd site_operator(int n, int site, const Eigen::Matrix2d& op) {
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(1, 1);
    // Most significant factor first, so `site` ends up on bit `site`.
    for (int k = n - 1; k >= 0; --k) {
        const Eigen::Matrix2d factor = (k == site) ? op : Eigen::Matrix2d::Identity();
        Eigen::MatrixXd next = Eigen::kroneckerProduct(result, factor);
        result.swap(next);
    }
    return result;
}

Eigen::MatrixXcd unitary_step(const Eigen::MatrixXcd& h, double dt_ns) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw Error("oracle: eigendecomposition failed");
    const Eigen::VectorXcd phases =
        (std::complex<double>(0.0, -2.0 * std::numbers::pi * dt_ns) * es.eigenvalues().cast<std::complex<double>>())
            .array()
            .exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

Eigen::MatrixXd dense_ring_hamiltonian(int n, double gamma_ghz, double zz_ghz) {
    if (n < 2 || n > kMaxOracleSites) {
        throw Error("oracle supports 2.." + std::to_string(kMaxOracleSites) + " spins, got " +
                    std::to_string(n));
    }
    Eigen::Matrix2d sx, sz;
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
        h += zz_ghz * site_operator(n, i, sz) * site_operator(n, (i + 1) % n, sz);
        h -= gamma_ghz * site_operator(n, i, sx);
    }
    return h;
}

QuantumState evolve_oracle(const RingSpec& spec, const ScheduleTable& table,
                           const Waveform& waveform, int slices, OracleRule rule) {
    return evolve_oracle(initial_state(spec), spec.j_programmed, table, waveform, slices, rule);
}

QuantumState evolve_oracle(const SpinConfig& initial, double j_programmed,
                           const ScheduleTable& table, const Waveform& waveform, int slices,
                           OracleRule rule) {
    const int n = initial.size();
    if (n > kMaxOracleSites) {
        throw Error("oracle backend supports at most " + std::to_string(kMaxOracleSites) +
                    " spins, got " + std::to_string(n));
    }
    if (slices < 1) throw Error("oracle: slices must be >= 1");
    const Eigen::MatrixXcd h_zz = dense_ring_hamiltonian(n, 0.0, 1.0).cast<std::complex<double>>();
    const Eigen::MatrixXcd h_x = dense_ring_hamiltonian(n, 1.0, 0.0).cast<std::complex<double>>();
    const auto h_at = [&](double t_ns) -> Eigen::MatrixXcd {
        const double s = std::clamp(s_at(waveform, t_ns / 1000.0), 0.0, 1.0);
        const auto c = ring_coefficients(table, s, j_programmed);
        return c.zz_ghz * h_zz + c.gamma_ghz * h_x;
    };
    const double offset = std::sqrt(3.0) / 6.0;
    const auto gauss_step = [&](double t, double dt) -> Eigen::MatrixXcd {
        const Eigen::MatrixXcd h1 = h_at(t + (0.5 - offset) * dt);
        const Eigen::MatrixXcd h2 = h_at(t + (0.5 + offset) * dt);
        const Eigen::MatrixXcd comm = h2 * h1 - h1 * h2;
        const Eigen::MatrixXcd h_eff =
            0.5 * (h1 + h2) -
            std::complex<double>(0.0, std::sqrt(3.0) / 6.0 * std::numbers::pi * dt) * comm;
        return unitary_step(h_eff, dt);
    };

    // The Gauss rule loses its order across kinks of H(t), so slices that
    // contain a kink are split there.
    std::vector<double> kinks;
    if (rule == OracleRule::gauss4) {
        for (double t_us : smooth_piece_bounds(table, waveform)) kinks.push_back(t_us * 1000.0);
    }

    QuantumState state = QuantumState::basis(initial);
    const double total_ns = waveform.duration_us() * 1000.0;
    const double dt = total_ns / slices;
    auto next_kink = kinks.begin();
    for (int k = 0; k < slices; ++k) {
        const double t = k * dt;
        const double t_end = (k + 1 == slices) ? total_ns : t + dt;
        if (rule == OracleRule::midpoint) {
            state.amplitudes = unitary_step(h_at(t + 0.5 * dt), dt) * state.amplitudes;
            continue;
        }
        double cursor = t;
        while (next_kink != kinks.end() && *next_kink <= cursor) ++next_kink;
        while (next_kink != kinks.end() && *next_kink < t_end) {
            state.amplitudes = gauss_step(cursor, *next_kink - cursor) * state.amplitudes;
            cursor = *next_kink;
            ++next_kink;
        }
        state.amplitudes = gauss_step(cursor, t_end - cursor) * state.amplitudes;
    }
    return state;
}

}  // namespace wallmem
