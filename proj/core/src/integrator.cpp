#include "landau/integrator.hpp"

#include "landau/errors.hpp"
#include "landau/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace landau {

std::uint32_t SimConfig::total_steps() const
{
    double const steps = horizon * static_cast<double>(steps_per_unit);
    return static_cast<std::uint32_t>(std::llround(steps));
}

void SimConfig::validate() const
{
    kernel.validate();
    if (law.dim() != kernel.dim)
        throw DomainError("initial law dimension " + std::to_string(law.dim()) + " differs from kernel dimension " +
                          std::to_string(kernel.dim));
    if (n < 1)
        throw DomainError("n must be >= 1");
    if (steps_per_unit < 1)
        throw DomainError("N must be >= 1");
    if (steps_per_unit > kMaxStreamTag)
        throw DomainError("N exceeds the noise stream limit");
    if (!(horizon >= 0))
        throw DomainError("T must be >= 0");
    double const steps = horizon * static_cast<double>(steps_per_unit);
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        throw DomainError("T * N must be an integer (T = " + std::to_string(horizon) +
                          ", N = " + std::to_string(steps_per_unit) + ")");
    if (self_exclusion() && n < 2)
        throw DomainError("self-exclusion requires n >= 2");
    if (kernel.is_soft() && !self_exclusion())
        throw DomainError("soft kernel without cutoff requires self-exclusion");
    if (replicates < 1)
        throw DomainError("replicates must be >= 1");
    if (stride < 1)
        throw DomainError("stride must be >= 1");
    if (evaluator == Evaluator::kMoments && !kernel.is_maxwell())
        throw DomainError("moment evaluator requires the maxwell kernel");
}

void apply_sqrt(PsdMatrix const &a, SqrtMethod method, std::span<double const> xi, std::span<double> out)
{
    if (method == SqrtMethod::kCholesky)
        cholesky_psd(a).multiply(xi, out);
    else
        sym_sqrt(a).matrix().multiply(xi, out);
}

Ensemble step(CoefficientField &field, Ensemble const &ens, double dt, std::span<double const> noise,
              StepOptions const &options, std::uint64_t *floor_events)
{
    auto const n = ens.size();
    auto const d = ens.dim();
    if (noise.size() != n * d)
        throw SizeMismatch("step: noise must hold n x d increments");

    field.bind(ens);
    Ensemble next = ens;
    next.step_index = ens.step_index + 1;
    next.time = static_cast<double>(next.step_index) * dt;

    unsigned const workers = std::max(1u, options.workers);
    std::vector<std::uint64_t> events(workers, 0);
    parallel_for(n, workers, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
        Vec kick(d);
        for (std::size_t i = begin; i < end; ++i) {
            auto const x = ens.state(i);
            auto const value = field.evaluate(i, x);
            events[chunk] += value.floor_events;
            apply_sqrt(value.a, options.sqrt_method, noise.subspan(i * d, d), as_span(kick));
            auto y = next.state(i);
            for (std::size_t k = 0; k < d; ++k)
                y[k] = x[k] + kick[k] + value.b[k] * dt;
        }
    });
    if (floor_events)
        for (auto e : events)
            *floor_events += e;
    next.check_finite();
    return next;
}

Ensemble step(KernelSpec const &spec, Ensemble const &ens, double dt, std::span<double const> noise, bool exclusion,
              SqrtMethod method)
{
    auto field = make_empirical_field(spec, exclusion);
    return step(*field, ens, dt, noise, StepOptions{method, 1});
}

void fill_noise(NoisePlan const &plan, Ensemble const &ens, std::uint32_t step_index, std::span<double> out,
                unsigned workers)
{
    auto const d = ens.dim();
    parallel_for(ens.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i)
            plan.increment(ens.replicate, ens.key(i), step_index, out.subspan(i * d, d));
    });
}

namespace {

using Clock = std::chrono::steady_clock;

bool snapshot_due(std::uint32_t done, std::uint32_t total, std::uint32_t stride)
{
    return done % stride == 0 || done == total;
}

std::uint64_t pair_count(CoefficientField const &field, std::size_t n, bool exclusion)
{
    if (dynamic_cast<PairwiseField const *>(&field) == nullptr)
        return 0;
    return static_cast<std::uint64_t>(n) * (exclusion ? n - 1 : n);
}

} // namespace

Trajectory simulate_with_field(SimConfig const &config, CoefficientField &field, std::uint32_t replicate)
{
    config.validate();
    auto const total = config.total_steps();
    auto const d = config.kernel.dim;
    NoisePlan const plan{config.seed, config.steps_per_unit, 1};
    StepOptions const options{config.sqrt_method, config.workers};

    Trajectory traj;
    Ensemble ens = sample_initial(config.law, config.n, config.seed, replicate);
    traj.snapshots.push_back({ens, 0});

    std::uint64_t const pairs = pair_count(field, config.n, config.self_exclusion());
    std::vector<double> noise(config.n * d);
    auto const start = Clock::now();
    for (std::uint32_t s = 0; s < total; ++s) {
        fill_noise(plan, ens, s, noise, config.workers);
        ens = step(field, ens, config.dt(), noise, options, &traj.floor_events);
        traj.interactions += pairs;
        if (snapshot_due(s + 1, total, config.stride))
            traj.snapshots.push_back({ens, traj.floor_events});
    }
    if (total > 0)
        traj.seconds_per_step = std::chrono::duration<double>(Clock::now() - start).count() / total;
    return traj;
}

Trajectory simulate(SimConfig const &config, std::uint32_t replicate)
{
    auto field = make_empirical_field(config.kernel, config.self_exclusion(), config.evaluator);
    return simulate_with_field(config, *field, replicate);
}

namespace {

void require_maxwell(SimConfig const &config, char const *what)
{
    if (!config.kernel.is_maxwell())
        throw DomainError(std::string(what) + " requires the maxwell kernel");
}

} // namespace

Trajectory simulate_mckean_reference(SimConfig const &config, MomentFlow const &flow, std::uint32_t replicate)
{
    require_maxwell(config, "simulate_mckean_reference");
    if (flow.dim != config.kernel.dim)
        throw SizeMismatch("simulate_mckean_reference: flow dimension differs from kernel dimension");
    ReferenceField field(flow);
    // Validate centering before any work.
    Vec const origin(flow.dim, 0.0);
    (void)mckean_coefficients(flow, as_span(origin), 0.0);
    return simulate_with_field(config, field, replicate);
}

CoupledRefinement coupled_time_refinement(SimConfig const &config, std::uint32_t refinement, std::uint32_t replicate)
{
    if (!config.kernel.is_lipschitz())
        throw DomainError("coupled_time_refinement requires a maxwell or pseudo_maxwell kernel");
    auto coarse_field = make_empirical_field(config.kernel, config.self_exclusion(), config.evaluator);
    auto fine_field = make_empirical_field(config.kernel, config.self_exclusion(), config.evaluator);
    return coupled_time_refinement(config, refinement, *coarse_field, *fine_field, replicate);
}

CoupledRefinement coupled_time_refinement(SimConfig const &config, std::uint32_t refinement,
                                          CoefficientField &coarse_field, CoefficientField &fine_field,
                                          std::uint32_t replicate)
{
    config.validate();
    if (refinement < 1)
        throw DomainError("refinement factor must be >= 1");
    std::uint64_t const fine_res = static_cast<std::uint64_t>(config.steps_per_unit) * refinement;
    if (fine_res > kMaxStreamTag)
        throw DomainError("fine resolution exceeds the noise stream limit");

    auto const total = config.total_steps();
    auto const d = config.kernel.dim;
    auto const n = config.n;
    NoisePlan const coarse_plan{config.seed, static_cast<std::uint32_t>(fine_res), refinement};
    NoisePlan const fine_plan{config.seed, static_cast<std::uint32_t>(fine_res), 1};
    StepOptions const options{config.sqrt_method, config.workers};
    double const coarse_dt = coarse_plan.coarse_dt();
    double const fine_dt = fine_plan.coarse_dt();

    CoupledRefinement out;
    Ensemble coarse = sample_initial(config.law, n, config.seed, replicate);
    Ensemble fine = coarse;
    out.coarse.snapshots.push_back({coarse, 0});
    out.fine.snapshots.push_back({fine, 0});
    out.sup_gap_sq.assign(n, 0.0);

    std::vector<double> noise(n * d);
    for (std::uint32_t s = 0; s < total; ++s) {
        fill_noise(coarse_plan, coarse, s, noise, config.workers);
        coarse = step(coarse_field, coarse, coarse_dt, noise, options);
        for (std::uint32_t j = 0; j < refinement; ++j) {
            fill_noise(fine_plan, fine, s * refinement + j, noise, config.workers);
            fine = step(fine_field, fine, fine_dt, noise, options);
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto const x = coarse.state(i);
            auto const y = fine.state(i);
            double g = 0;
            for (std::size_t k = 0; k < d; ++k)
                g += (x[k] - y[k]) * (x[k] - y[k]);
            out.sup_gap_sq[i] = std::max(out.sup_gap_sq[i], g);
        }
        if (snapshot_due(s + 1, total, config.stride)) {
            out.coarse.snapshots.push_back({coarse, 0});
            out.fine.snapshots.push_back({fine, 0});
        }
    }
    return out;
}

std::vector<double> coupled_sup_gap(SimConfig const &config, CoefficientField &first, CoefficientField &second,
                                    std::uint32_t replicate)
{
    config.validate();
    auto const total = config.total_steps();
    auto const d = config.kernel.dim;
    auto const n = config.n;
    NoisePlan const plan{config.seed, config.steps_per_unit, 1};
    StepOptions const options{config.sqrt_method, config.workers};

    Ensemble x = sample_initial(config.law, n, config.seed, replicate);
    Ensemble y = x;
    std::vector<double> sup(n, 0.0);
    std::vector<double> noise(n * d);
    for (std::uint32_t s = 0; s < total; ++s) {
        fill_noise(plan, x, s, noise, config.workers);
        x = step(first, x, config.dt(), noise, options);
        y = step(second, y, config.dt(), noise, options);
        for (std::size_t i = 0; i < n; ++i) {
            auto const a = x.state(i);
            auto const b = y.state(i);
            double g = 0;
            for (std::size_t k = 0; k < d; ++k)
                g += (a[k] - b[k]) * (a[k] - b[k]);
            sup[i] = std::max(sup[i], g);
        }
    }
    return sup;
}

namespace {

double average(std::vector<double> const &v)
{
    double s = 0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace

std::vector<double> coupled_particle_vs_reference(SimConfig const &config)
{
    require_maxwell(config, "coupled_particle_vs_reference");
    auto const flow = MomentFlow::from_law(config.law);
    Vec const origin(flow.dim, 0.0);
    (void)mckean_coefficients(flow, as_span(origin), 0.0);
    std::vector<double> estimates;
    estimates.reserve(config.replicates);
    for (std::uint32_t r = 0; r < config.replicates; ++r) {
        auto particles = make_empirical_field(config.kernel, config.self_exclusion(), config.evaluator);
        ReferenceField reference(flow);
        estimates.push_back(average(coupled_sup_gap(config, *particles, reference, r)));
    }
    return estimates;
}

std::vector<double> refinement_gap_estimates(SimConfig const &config, std::uint32_t refinement)
{
    std::vector<double> estimates;
    estimates.reserve(config.replicates);
    for (std::uint32_t r = 0; r < config.replicates; ++r)
        estimates.push_back(average(coupled_time_refinement(config, refinement, r).sup_gap_sq));
    return estimates;
}

std::uint32_t n_floor_steps(std::size_t n, double horizon)
{
    auto const first = static_cast<std::uint32_t>(std::ceil(std::max(500.0, 8.0 * std::sqrt(static_cast<double>(n)))));
    for (std::uint32_t steps = first; steps < first + 1000000; ++steps) {
        double const total = horizon * steps;
        if (std::abs(total - std::round(total)) <= 1e-9 * std::max(1.0, total))
            return steps;
    }
    throw DomainError("no step count near N_floor makes T * N an integer (T = " + std::to_string(horizon) + ")");
}

} // namespace landau
