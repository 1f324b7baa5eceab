#include "wallmem/dynamics.hpp"
#include "wallmem/error.hpp"
#include "wallmem/text.hpp"

namespace wallmem {

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::exact: return "exact";
        case BackendKind::svmc: return "svmc";
        case BackendKind::oracle: return "oracle";
    }
    return "?";
}

BackendKind parse_backend_kind(const std::string& text) {
    if (text == "exact") return BackendKind::exact;
    if (text == "svmc") return BackendKind::svmc;
    if (text == "oracle") return BackendKind::oracle;
    throw ConfigError("unknown backend '" + text + "' (expected exact, svmc or oracle)");
}

std::string to_string(OracleRule rule) {
    return rule == OracleRule::midpoint ? "midpoint" : "gauss4";
}

OracleRule parse_oracle_rule(const std::string& text) {
    if (text == "midpoint") return OracleRule::midpoint;
    if (text == "gauss4") return OracleRule::gauss4;
    throw ConfigError("unknown oracle rule '" + text + "' (expected midpoint or gauss4)");
}

void validate(const BackendConfig& cfg) {
    if (!(cfg.dt_ns > 0.0)) throw ConfigError("dt_ns must be positive, got " + format_double(cfg.dt_ns));
    if (!(cfg.sweeps_per_us >= 1.0)) {
        throw ConfigError("sweeps_per_us must be >= 1, got " + format_double(cfg.sweeps_per_us));
    }
    if (!(cfg.temperature_mk >= 0.0)) {
        throw ConfigError("temperature_mk must be >= 0, got " + format_double(cfg.temperature_mk));
    }
    if (cfg.oracle_slices < 1) throw ConfigError("oracle_slices must be >= 1");
}

QuantumState QuantumState::basis(const SpinConfig& cfg) {
    if (cfg.size() > 30) throw Error("state vector for " + std::to_string(cfg.size()) + " spins is too large");
    QuantumState st;
    st.n = cfg.size();
    st.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index{1} << st.n);
    st.amplitudes[static_cast<Eigen::Index>(cfg.to_index())] = 1.0;
    return st;
}

}  // namespace wallmem
