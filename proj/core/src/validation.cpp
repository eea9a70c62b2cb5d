#include "mfg/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "mfg/log.hpp"

namespace mfg {

double l1_distance(std::span<const double> a, std::span<const double> b, const SpaceGrid& grid) {
    if (a.size() != grid.num_nodes() || b.size() != grid.num_nodes())
        throw std::invalid_argument("l1_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += grid.cell_widths[i] * std::abs(a[i] - b[i]);
    return s;
}

double mass_below(std::span<const double> m, double threshold, const SpaceGrid& grid) {
    if (m.size() != grid.num_nodes()) throw std::invalid_argument("mass_below: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (grid.nodes[i] < threshold) s += grid.cell_widths[i] * m[i];
    return s;
}

ConvergenceReport convergence_study(int exp_min, int exp_max, int exp_ref,
                                    const SolverConfig& base, const ModelParams& params,
                                    const PriceSchedule& schedule, const InitialDensity& initial) {
    if (exp_min < 1 || exp_min > exp_max || exp_max >= exp_ref)
        throw std::invalid_argument("convergence_study: need 1 <= exp_min <= exp_max < exp_ref");
    if (exp_ref > 20) throw std::invalid_argument("convergence_study: reference exponent too large");

    const auto run = [&](int exponent) {
        SolverConfig cfg = base;
        cfg.n_space = std::size_t{1} << exponent;
        cfg.n_time = std::size_t{1} << exponent;
        return solve_equilibrium(cfg, params, schedule, initial);
    };

    ConvergenceReport report;
    report.reference_exponent = exp_ref;

    const EquilibriumSolution ref = run(exp_ref);
    const bool ref_ok = ref.converged();
    if (!ref_ok) log::info("convergence_study: reference level failed to converge");

    bool all_ok = ref_ok;
    for (int n = exp_min; n <= exp_max; ++n) {
        ConvergenceLevel level;
        level.exponent = n;
        level.intervals = std::size_t{1} << n;
        level.h = (params.e_max - params.e_min) / static_cast<double>(level.intervals);
        const EquilibriumSolution sol = run(n);
        level.converged = sol.converged();
        all_ok = all_ok && level.converged;
        if (level.converged && ref_ok) {
            // Sup-norm error of the value surface at t = 0 against the fine
            // reference. Nested dyadic grids: coarse node i coincides with
            // fine node i * stride, so the reference restricts exactly.
            const std::size_t stride = std::size_t{1} << (exp_ref - n);
            const std::size_t last = sol.v.num_levels() - 1;
            const auto coarse = sol.v.level(last);
            const auto fine = ref.v.level(ref.v.num_levels() - 1);
            double err = 0.0;
            for (std::size_t i = 0; i <= level.intervals; ++i)
                err = std::max(err, std::abs(coarse[i] - fine[i * stride]));
            level.error = err;
        } else {
            level.error = std::numeric_limits<double>::quiet_NaN();
        }
        report.levels.push_back(level);
        log::info("convergence_study: n=%d error=%.6e converged=%d", n, level.error,
                  level.converged ? 1 : 0);
    }
    report.all_converged = all_ok;

    // Least-squares slope of log2(error) against the exponent, over usable levels.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (const auto& level : report.levels) {
        if (!level.converged || !(level.error > 0.0) || !std::isfinite(level.error)) continue;
        const double x = level.exponent;
        const double y = std::log2(level.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count >= 2) {
        const double denom = count * sxx - sx * sx;
        report.fitted_order = -(count * sxy - sx * sy) / denom;
    } else {
        report.fitted_order = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

namespace {

/// Tiny splittable generator: the splitmix64 sequence, one independent
/// stream per particle, cheap enough to construct per trajectory.
struct SplitMix64 {
    using result_type = std::uint64_t;
    std::uint64_t state;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

McResult simulate_particles(const Field& tau, const InitialDensity& initial,
                            std::size_t particles, int substeps_per_level, std::uint64_t seed,
                            const SpaceGrid& grid, const TimeGrid& times,
                            const ModelParams& params, const McOptions& options) {
    const std::size_t n = grid.num_intervals();
    const std::size_t k_steps = times.num_steps();
    if (particles == 0) throw std::invalid_argument("simulate_particles: need at least one particle");
    if (substeps_per_level < 1)
        throw std::invalid_argument("simulate_particles: need at least one substep per level");
    if (tau.num_levels() != k_steps + 1 || tau.num_nodes() != n + 1)
        throw std::invalid_argument("simulate_particles: control field does not match the grids");
    if (params.sigma < 0.0) throw std::invalid_argument("simulate_particles: sigma must be nonnegative");

    const double lo = grid.lower();
    const double hi = grid.upper();
    const double h = grid.steps.front(); // uniform mesh

    // Cumulative cell masses of the discrete initial density, for inverse
    // transform sampling of the starting positions.
    const std::vector<double> m0 = sample_initial_density(initial, grid);
    std::vector<double> cdf(n + 2, 0.0);
    for (std::size_t i = 0; i <= n; ++i) cdf[i + 1] = cdf[i] + grid.cell_widths[i] * m0[i];
    const double total = cdf.back();
    for (double& c : cdf) c /= total;
    cdf.back() = 1.0;

    const std::size_t chunk = std::max<std::size_t>(1, options.chunk_size);
    const std::size_t num_chunks = (particles + chunk - 1) / chunk;
    const unsigned jobs = std::max(1u, options.jobs);

    const auto interpolate_tau = [&](std::span<const double> row, double e) {
        std::size_t idx = static_cast<std::size_t>(
            std::clamp((e - lo) / h, 0.0, static_cast<double>(n - 1)));
        idx = std::min(idx, n - 1);
        const double frac = (e - grid.nodes[idx]) / h;
        return (1.0 - frac) * row[idx] + frac * row[idx + 1];
    };

    const auto run_chunk = [&](std::size_t chunk_index, std::vector<long long>& counts) {
        const std::size_t begin = chunk_index * chunk;
        const std::size_t end = std::min(begin + chunk, particles);
        for (std::size_t p = begin; p < end; ++p) {
            SplitMix64 rng{mix64(seed + 0x9e3779b97f4a7c15ull * (p + 1))};
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            std::normal_distribution<double> normal(0.0, 1.0);

            // Starting position: pick a dual cell by its mass, then a
            // uniform point inside it.
            const double u = uniform(rng);
            const std::size_t cell =
                static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end() - 1, u) -
                                         cdf.begin()) -
                1;
            double e = grid.edges[cell] + uniform(rng) * grid.cell_widths[cell];

            // March from t = 0 (level k_steps) to the horizon (level 0),
            // holding the control of the level at each step's start.
            for (std::size_t level = k_steps; level-- > 0;) {
                const auto row = tau.level(level + 1);
                const double dt =
                    (times.levels[level] - times.levels[level + 1]) / substeps_per_level;
                const double noise_scale = params.sigma * std::sqrt(dt);
                for (int s = 0; s < substeps_per_level; ++s) {
                    const double drift = -interpolate_tau(row, e);
                    e += drift * dt + noise_scale * normal(rng);
                    while (e < lo || e > hi) {
                        if (e < lo) e = 2.0 * lo - e;
                        if (e > hi) e = 2.0 * hi - e;
                    }
                }
            }
            ++counts[grid.cell_index(e)];
        }
    };

    std::vector<long long> counts(n + 1, 0);
    if (jobs == 1 || num_chunks == 1) {
        for (std::size_t c = 0; c < num_chunks; ++c) run_chunk(c, counts);
    } else {
        std::vector<std::vector<long long>> partial(jobs, std::vector<long long>(n + 1, 0));
        std::vector<std::thread> workers;
        workers.reserve(jobs);
        for (unsigned t = 0; t < jobs; ++t)
            workers.emplace_back([&, t] {
                for (std::size_t c = t; c < num_chunks; c += jobs) run_chunk(c, partial[t]);
            });
        for (auto& w : workers) w.join();
        // Integer merge: addition order cannot change the result.
        for (const auto& part : partial)
            for (std::size_t i = 0; i <= n; ++i) counts[i] += part[i];
    }

    McResult result;
    result.counts = std::move(counts);
    result.particles = particles;
    result.seed = seed;
    result.substeps = substeps_per_level;
    result.density.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        result.density[i] = static_cast<double>(result.counts[i]) /
                            (static_cast<double>(particles) * grid.cell_widths[i]);
    return result;
}

double discounted_payoff(const Field& m, const Field& tau_nodes, const PriceSchedule& schedule,
                         const SpaceGrid& grid, const TimeGrid& times, const ModelParams& params) {
    const std::size_t n = grid.num_intervals();
    const std::size_t k_steps = times.num_steps();
    if (m.num_levels() != k_steps + 1 || m.num_nodes() != n + 1 ||
        tau_nodes.num_levels() != k_steps + 1 || tau_nodes.num_nodes() != n + 1)
        throw std::invalid_argument("discounted_payoff: fields do not match the grids");

    std::vector<double> flow(k_steps + 1);
    for (std::size_t k = 0; k <= k_steps; ++k) {
        const double t = times.levels[k];
        const double s = price_at(schedule, t, times.horizon());
        const auto mk = m.level(k);
        const auto tk = tau_nodes.level(k);
        double sum = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            sum += grid.cell_widths[i] * running_payoff(grid.nodes[i], tk[i], mk[i], s, params) * mk[i];
        flow[k] = std::exp(-params.rate * t) * sum;
    }
    double j = 0.0;
    for (std::size_t k = 0; k < k_steps; ++k)
        j += 0.5 * (times.levels[k] - times.levels[k + 1]) * (flow[k] + flow[k + 1]);
    return j;
}

} // namespace mfg
