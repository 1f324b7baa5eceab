#include <algorithm>
#include <cmath>

#include "wallmem/dynamics.hpp"
#include "wallmem/error.hpp"

namespace wallmem {

std::vector<SpinConfig> measure_z(const QuantumState& state, int shots, Rng& rng) {
    if (shots < 0) throw Error("measure_z: negative shot count");
    const Eigen::Index dim = state.amplitudes.size();
    if (dim != (Eigen::Index{1} << state.n)) throw Error("measure_z: amplitude vector has wrong size");
    std::vector<double> cdf(static_cast<std::size_t>(dim));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        acc += std::norm(state.amplitudes[i]);
        cdf[static_cast<std::size_t>(i)] = acc;
    }
    if (!(acc > 0.0)) throw Error("measure_z: zero state");

    std::vector<SpinConfig> out;
    out.reserve(static_cast<std::size_t>(shots));
    for (int k = 0; k < shots; ++k) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        // upper_bound never lands on a zero-probability state.
        const auto idx = static_cast<std::uint64_t>(it - cdf.begin());
        out.push_back(SpinConfig::from_index(idx, state.n));
    }
    return out;
}

}  // namespace wallmem
