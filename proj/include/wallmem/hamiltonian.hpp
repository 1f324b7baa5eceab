#pragma once

#include <type_traits>

#include <Eigen/Dense>

#include "wallmem/schedule.hpp"

namespace wallmem {

/// Energies of the ring Hamiltonian H = zz_ghz * sum_i sz_i sz_{i+1} - gamma_ghz * sum_i sx_i.
struct RingCoefficients {
    double gamma_ghz = 0.0;
    double zz_ghz = 0.0;
};

/// gamma = A(s)/2, zz = B(s) J / 2.
RingCoefficients ring_coefficients(const ScheduleTable& table, double s, double j_programmed);

inline RingCoefficients blend(const RingCoefficients& a, double wa, const RingCoefficients& b,
                              double wb) {
    return {wa * a.gamma_ghz + wb * b.gamma_ghz, wa * a.zz_ghz + wb * b.zz_ghz};
}

/// Matrix-free transverse-field Ising ring on 2^n Z-basis states. Bit i of a
/// basis index set means spin i is down.
class RingHamiltonian {
public:
    explicit RingHamiltonian(int n);

    int sites() const { return n_; }
    Eigen::Index dim() const { return zz_.size(); }

    /// sum_i sz_i sz_{i+1} for every basis state.
    const Eigen::VectorXd& zz_diagonal() const { return zz_; }

    /// out = alpha * (H - shift) in + beta * other. `out` must not alias
    /// `in`; it may alias `other`.
    template <typename Scalar>
    void apply_affine(const RingCoefficients& c, double shift, double alpha,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& in, double beta,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& other,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& out) const {
        using Real = typename Eigen::NumTraits<Scalar>::Real;
        static_assert(std::is_same_v<Real, double>);
        constexpr Eigen::Index lanes = sizeof(Scalar) / sizeof(Real);

        const Eigen::Index d = dim();
        out.resize(d);
        const double* diag = zz_.data();
        const Scalar* x = in.data();
        const Scalar* y = other.data();
        Scalar* z = out.data();
        for (Eigen::Index i = 0; i < d; ++i) {
            z[i] = (alpha * (c.zz_ghz * diag[i] - shift)) * x[i] + beta * y[i];
        }
        // Flipping spin q pairs blocks of 2^q consecutive states; on the
        // interleaved real view these are contiguous runs that vectorize.
        // Spins are taken two at a time to halve the passes over memory.
        const double flip = -alpha * c.gamma_ghz;
        const double* xr = reinterpret_cast<const double*>(x);
        double* zr = reinterpret_cast<double*>(z);
        const Eigen::Index total = d * lanes;
        int q = 0;
        for (; q + 1 < n_; q += 2) {
            const Eigen::Index h = (Eigen::Index{1} << q) * lanes;
            for (Eigen::Index base = 0; base < total; base += 4 * h) {
                double* za = zr + base;
                double* zb = za + h;
                double* zc = zb + h;
                double* zd = zc + h;
                const double* xa = xr + base;
                const double* xb = xa + h;
                const double* xc = xb + h;
                const double* xd = xc + h;
                for (Eigen::Index j = 0; j < h; ++j) {
                    const double bc = flip * (xb[j] + xc[j]);
                    const double ad = flip * (xa[j] + xd[j]);
                    za[j] += bc;
                    zd[j] += bc;
                    zb[j] += ad;
                    zc[j] += ad;
                }
            }
        }
        for (; q < n_; ++q) {
            const Eigen::Index h = (Eigen::Index{1} << q) * lanes;
            for (Eigen::Index base = 0; base < total; base += 2 * h) {
                double* lo = zr + base;
                double* hi = lo + h;
                const double* xlo = xr + base;
                const double* xhi = xlo + h;
                for (Eigen::Index j = 0; j < h; ++j) {
                    lo[j] += flip * xhi[j];
                    hi[j] += flip * xlo[j];
                }
            }
        }
    }

    /// out = H in. `in` and `out` must not alias.
    template <typename Scalar>
    void apply(const RingCoefficients& c, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& in,
               Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& out) const {
        apply_affine(c, 0.0, 1.0, in, 0.0, in, out);
    }

    /// Interval [centre - half_width, centre + half_width] containing the
    /// spectrum of H.
    struct SpectralInterval {
        double centre;
        double half_width;
    };
    SpectralInterval spectral_interval(const RingCoefficients& c) const;

    /// Gershgorin bound on the spectral radius.
    double spectral_bound(const RingCoefficients& c) const;

    /// <psi|H|psi> in GHz.
    double energy(const RingCoefficients& c, const Eigen::VectorXcd& psi) const;

private:
    int n_;
    Eigen::VectorXd zz_;
    double zz_min_ = 0.0;
    double zz_max_ = 0.0;
};

}  // namespace wallmem
