#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mfg/coupling.hpp"
#include "mfg/model.hpp"

namespace mfg {

/// Monte Carlo cross-check knobs.
struct ValidationConfig {
    std::size_t particles = 100000;
    int substeps = 4;
    std::uint64_t seed = 42;
    std::size_t chunk_size = 8192;
};

/// Everything one run needs. Default-constructed, this reproduces the
/// baseline experiment: constant price 0.2 on a Gaussian initial crowd.
struct RunConfig {
    ModelParams model;
    PriceSchedule schedule = ConstantPrice{};
    InitialDensity initial = TruncatedNormal{};
    SolverConfig solver;
    ValidationConfig validation;
};

/// Parse INI-style text: [model], [solver], [schedule], [initial_density],
/// and [validation] sections, ';' or '#' comments, key = value lines.
/// An entirely empty file yields the defaults; any non-empty file must carry
/// a [model] section. Unknown sections or keys, unparsable values, and
/// values rejected by the semantic checks all raise ConfigError naming the
/// offender.
RunConfig parse_config(const std::string& text);

/// parse_config over the file's contents; a missing file raises ConfigError.
RunConfig load_config(const std::filesystem::path& path);

} // namespace mfg
