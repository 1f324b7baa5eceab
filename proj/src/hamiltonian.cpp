#include "wallmem/hamiltonian.hpp"

#include <cmath>

#include "wallmem/error.hpp"

namespace wallmem {

RingCoefficients ring_coefficients(const ScheduleTable& table, double s, double j_programmed) {
    const auto [a, b] = interpolate(table, s);
    return {a / 2.0, b * j_programmed / 2.0};
}

RingHamiltonian::RingHamiltonian(int n) : n_(n) {
    if (n < 2 || n > 26) throw Error("RingHamiltonian: unsupported ring size " + std::to_string(n));
    const Eigen::Index d = Eigen::Index{1} << n;
    zz_.resize(d);
    for (Eigen::Index idx = 0; idx < d; ++idx) {
        int aligned = 0;
        for (int i = 0; i < n; ++i) {
            const int j = (i + 1) % n;
            aligned += (((idx >> i) ^ (idx >> j)) & 1) == 0;
        }
        zz_[idx] = 2.0 * aligned - n;
    }
    zz_min_ = zz_.minCoeff();
    zz_max_ = zz_.maxCoeff();
}

RingHamiltonian::SpectralInterval RingHamiltonian::spectral_interval(const RingCoefficients& c) const {
    const double lo = c.zz_ghz >= 0.0 ? c.zz_ghz * zz_min_ : c.zz_ghz * zz_max_;
    const double hi = c.zz_ghz >= 0.0 ? c.zz_ghz * zz_max_ : c.zz_ghz * zz_min_;
    return {0.5 * (lo + hi), 0.5 * (hi - lo) + n_ * std::abs(c.gamma_ghz)};
}

double RingHamiltonian::spectral_bound(const RingCoefficients& c) const {
    return n_ * (std::abs(c.gamma_ghz) + std::abs(c.zz_ghz));
}

double RingHamiltonian::energy(const RingCoefficients& c, const Eigen::VectorXcd& psi) const {
    Eigen::VectorXcd h_psi(psi.size());
    apply(c, psi, h_psi);
    return psi.dot(h_psi).real();
}

}  // namespace wallmem
