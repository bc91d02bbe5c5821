#include "landau/harness/experiments.hpp"

#include "landau/errors.hpp"
#include "landau/harness/csv.hpp"
#include "landau/maxwell_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace landau::harness {

namespace fs = std::filesystem;

SymMatrix MomentRow::covariance() const
{
    auto c = m2;
    for (std::size_t i = 0; i < c.dim(); ++i)
        for (std::size_t j = i; j < c.dim(); ++j)
            c.at(i, j) -= mean[i] * mean[j];
    return c;
}

std::vector<double> MomentRow::values() const
{
    std::vector<double> out(mean.begin(), mean.end());
    auto const packed = m2.packed();
    out.insert(out.end(), packed.begin(), packed.end());
    out.push_back(energy);
    out.push_back(min_field_eig);
    return out;
}

std::vector<std::string> moment_columns(std::size_t d)
{
    std::vector<std::string> cols{"t"};
    for (std::size_t i = 1; i <= d; ++i)
        cols.push_back("mean_" + std::to_string(i));
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t j = i; j <= d; ++j)
            cols.push_back("m2_" + std::to_string(i) + std::to_string(j));
    cols.emplace_back("energy");
    cols.emplace_back("min_field_eig");
    return cols;
}

namespace {

bool same_time(double a, double b)
{
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

MomentRow reduce(Ensemble const &ens)
{
    MomentRow row;
    row.t = ens.time;
    row.mean = mean(ens);
    row.m2 = second_moments(ens);
    row.energy = row.m2.trace();
    return row;
}

void ensure_dir(fs::path const &dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
}

RunManifest start_manifest(RunConfig const &config, std::string command)
{
    RunManifest m;
    m.command = std::move(command);
    m.version = version_string();
    m.seed = config.sim.seed;
    m.workers = config.sim.workers;
    m.config = config.entries;
    m.started = utc_timestamp();
    return m;
}

void finish(CommandOutcome &outcome)
{
    outcome.manifest.finished = utc_timestamp();
    write_manifest(outcome.dir, outcome.manifest);
}

void warn(RunManifest &m, std::ostream &log, std::string message)
{
    log << "WARN: " << message << '\n';
    m.warnings.push_back(std::move(message));
}

// Soft runs with too many floored near-collisions are flagged, not failed.
void check_floor_fraction(RunManifest &m, std::ostream &log)
{
    if (m.interactions == 0)
        return;
    double const fraction = static_cast<double>(m.floor_events) / static_cast<double>(m.interactions);
    if (fraction > kFloorWarnFraction) {
        std::ostringstream os;
        os << "floored interactions " << m.floor_events << " of " << m.interactions << " ("
           << fraction * 100 << "%) exceed " << kFloorWarnFraction * 100 << "%";
        warn(m, log, os.str());
    }
}

std::vector<ReplicateResult> run_all(RunConfig const &config, std::span<double const> keep, std::ostream &log)
{
    std::vector<ReplicateResult> runs;
    bool const monitor = monitor_enabled(config);
    for (std::uint32_t r = 0; r < config.sim.replicates; ++r) {
        runs.push_back(run_replicate(config.sim, r, monitor, r == 0 ? keep : std::span<double const>{}));
        log << "replicate " << r + 1 << "/" << config.sim.replicates << " done ("
            << runs.back().seconds_per_step << " s/step)" << std::endl;
    }
    return runs;
}

std::vector<double> reachable_times(RunConfig const &config, RunManifest &m, std::ostream &log)
{
    std::vector<double> out;
    for (double t : config.hist.times) {
        if (t < 0 || t > config.sim.horizon + 1e-12) {
            warn(m, log, "histogram time " + format_double(t) + " lies outside [0, T]; skipped");
            continue;
        }
        out.push_back(t);
    }
    return out;
}

double histogram_l1(Histogram const &h, double mu, double var)
{
    return l1_distance(h, [&](double x) { return gaussian_density(mu, var, x); });
}

void write_histogram(fs::path const &path, Histogram const &h)
{
    CsvWriter w(path, {"bin_left", "bin_right", "density"});
    for (std::size_t k = 0; k < h.density.size(); ++k) {
        double const row[] = {h.bin_left(k), h.bin_left(k) + h.bin_width(), h.density[k]};
        w.row(row);
    }
    w.close();
}

void write_rate(fs::path const &dir, std::string const &stem, RateSeries const &series, RunManifest &m)
{
    CsvWriter w(dir / (stem + ".csv"), {"abscissa", "mse", "stderr"});
    for (auto const &p : series.points) {
        double const row[] = {p.abscissa, p.mse(), p.standard_error()};
        w.row(row);
    }
    w.close();
    m.outputs.push_back(stem + ".csv");
}

void record_fit(RateFit const &fit, RunManifest &m, std::ostream &log)
{
    m.results.emplace_back("slope", fit.slope);
    m.results.emplace_back("intercept", fit.intercept);
    m.results.emplace_back("slope_ci_low", fit.ci_low);
    m.results.emplace_back("slope_ci_high", fit.ci_high);
    log << "fitted slope " << fit.slope << " (95% bootstrap CI [" << fit.ci_low << ", " << fit.ci_high << "])\n";
}

} // namespace

bool monitor_enabled(RunConfig const &config)
{
    if (config.monitor)
        return *config.monitor;
    auto const &sim = config.sim;
    return sim.kernel.is_maxwell() && sim.evaluator != Evaluator::kPairwise;
}

ReplicateResult run_replicate(SimConfig const &sim, std::uint32_t replicate, bool monitor,
                              std::span<double const> keep_times)
{
    auto const traj = simulate(sim, replicate);
    ReplicateResult out;
    out.floor_events = traj.floor_events;
    out.interactions = traj.interactions;
    out.seconds_per_step = traj.seconds_per_step;

    std::unique_ptr<CoefficientField> field;
    if (monitor)
        field = make_empirical_field(sim.kernel, sim.self_exclusion(), sim.evaluator);
    for (auto const &snap : traj.snapshots) {
        auto row = reduce(snap.state);
        if (field)
            row.min_field_eig = min_field_eigenvalue(*field, snap.state);
        out.rows.push_back(std::move(row));
    }
    for (double t : keep_times) {
        auto it = std::find_if(traj.snapshots.begin(), traj.snapshots.end(),
                               [&](Snapshot const &s) { return same_time(s.state.time, t); });
        if (it == traj.snapshots.end())
            throw DomainError("time " + format_double(t) + " is not a snapshot time (check run.stride)");
        out.kept.push_back(it->state);
    }
    return out;
}

namespace {

MomentSummary summarize_with(std::vector<ReplicateResult> const &runs,
                             std::vector<double> (*extract)(MomentRow const &))
{
    MomentSummary s;
    if (runs.empty())
        return s;
    auto const rows = runs.front().rows.size();
    for (std::size_t k = 0; k < rows; ++k) {
        s.times.push_back(runs.front().rows[k].t);
        std::vector<std::vector<double>> columns;
        for (auto const &run : runs) {
            if (run.rows.size() != rows)
                throw SizeMismatch("replicates have different snapshot counts");
            auto const v = extract(run.rows[k]);
            columns.resize(v.size());
            for (std::size_t c = 0; c < v.size(); ++c)
                columns[c].push_back(v[c]);
        }
        std::vector<SampleSummary> cells;
        for (auto const &col : columns)
            cells.push_back(summarize(col));
        s.cells.push_back(std::move(cells));
    }
    return s;
}

} // namespace

MomentSummary summarize_moments(std::vector<ReplicateResult> const &runs)
{
    return summarize_with(runs, [](MomentRow const &r) { return r.values(); });
}

MomentSummary summarize_covariance(std::vector<ReplicateResult> const &runs)
{
    return summarize_with(runs, [](MomentRow const &r) {
        auto const c = r.covariance();
        return std::vector<double>(c.packed().begin(), c.packed().end());
    });
}

double equilibrium_variance(InitialLaw const &law)
{
    auto const m = law.mean();
    double centered_energy = law.second_moments().trace();
    for (double v : m)
        centered_energy -= v * v;
    return centered_energy / static_cast<double>(law.dim());
}

std::uint32_t rate_n_steps(RunConfig const &config, std::size_t n)
{
    return std::max(config.sim.steps_per_unit, n_floor_steps(n, config.sim.horizon));
}

RateSeries rate_in_n(RunConfig const &config, std::ostream *log)
{
    if (!config.sim.kernel.is_maxwell())
        throw ConfigError("kernel.family", "rate-n needs the maxwell kernel (the reference process is exact only there)");
    RateSeries series;
    for (auto n : config.rate.n_values) {
        auto sim = config.sim;
        sim.law = sim.law.centered();
        sim.n = n;
        sim.steps_per_unit = rate_n_steps(config, n);
        RatePoint p;
        p.abscissa = static_cast<double>(n);
        p.replicates = coupled_particle_vs_reference(sim);
        if (log)
            *log << "n = " << n << ", N = " << sim.steps_per_unit << ": mse " << p.mse() << " +- "
                 << p.standard_error() << '\n';
        series.points.push_back(std::move(p));
    }
    return series;
}

RateSeries rate_in_N(RunConfig const &config, std::ostream *log)
{
    if (!config.sim.kernel.is_lipschitz())
        throw ConfigError("kernel.family", "rate-N needs the maxwell or pseudo_maxwell kernel");
    RateSeries series;
    for (auto N : config.rate.N_values) {
        auto sim = config.sim;
        sim.steps_per_unit = N;
        try {
            sim.validate();
        } catch (DomainError const &e) {
            throw ConfigError("rate.N_values", e.what());
        }
        RatePoint p;
        p.abscissa = N;
        p.replicates = refinement_gap_estimates(sim, config.rate.refinement);
        if (log)
            *log << "N = " << N << ": mse " << p.mse() << " +- " << p.standard_error() << '\n';
        series.points.push_back(std::move(p));
    }
    return series;
}

CommandOutcome cmd_simulate(RunConfig const &config, std::ostream &log)
{
    CommandOutcome outcome;
    outcome.dir = output_dir(config);
    ensure_dir(outcome.dir);
    auto &m = outcome.manifest;
    m = start_manifest(config, "simulate");

    auto const &sim = config.sim;
    auto const d = sim.kernel.dim;
    auto const keep = reachable_times(config, m, log);
    std::vector<ReplicateResult> runs;
    try {
        runs = run_all(config, keep, log);
    } catch (DomainError const &e) {
        throw ConfigError("hist.times", e.what());
    }

    for (auto const &run : runs) {
        m.floor_events += run.floor_events;
        m.interactions += run.interactions;
        m.seconds_per_step += run.seconds_per_step / static_cast<double>(runs.size());
    }
    check_floor_fraction(m, log);

    auto const summary = summarize_moments(runs);
    {
        CsvWriter means(outcome.dir / "moments.csv", moment_columns(d));
        CsvWriter errors(outcome.dir / "moments_stderr.csv", moment_columns(d));
        for (std::size_t k = 0; k < summary.times.size(); ++k) {
            std::vector<double> mrow{summary.times[k]};
            std::vector<double> erow{summary.times[k]};
            for (auto const &cell : summary.cells[k]) {
                mrow.push_back(cell.mean);
                erow.push_back(cell.std_error);
            }
            means.row(mrow);
            errors.row(erow);
        }
        means.close();
        errors.close();
        m.outputs.emplace_back("moments.csv");
        m.outputs.emplace_back("moments_stderr.csv");
    }

    if (monitor_enabled(config)) {
        std::optional<MomentFlow> flow;
        if (sim.kernel.is_maxwell())
            flow = MomentFlow::from_law(sim.law.centered());
        CsvWriter w(outcome.dir / "ellipticity.csv", {"t", "min_field_eig", "oracle_bound"});
        for (std::size_t k = 0; k < summary.times.size(); ++k) {
            double worst = std::numeric_limits<double>::infinity();
            for (auto const &run : runs)
                worst = std::min(worst, run.rows[k].min_field_eig);
            double const t = summary.times[k];
            double const row[] = {t, worst,
                                  flow ? ellipticity_lower_bound(*flow, t) : std::numeric_limits<double>::quiet_NaN()};
            w.row(row);
        }
        w.close();
        m.outputs.emplace_back("ellipticity.csv");
    }

    if (!runs.empty()) {
        auto const coord = config.hist.coord - 1;
        double const mu = sim.law.mean()[coord];
        double const var = equilibrium_variance(sim.law);
        for (std::size_t k = 0; k < keep.size(); ++k) {
            auto const h = histogram(coordinate(runs.front().kept[k], coord), config.hist.bins, config.hist.lo,
                                     config.hist.hi);
            auto const name = "hist_t" + format_double(keep[k]) + ".csv";
            write_histogram(outcome.dir / name, h);
            m.outputs.push_back(name);
            m.results.emplace_back("l1_equilibrium_t" + format_double(keep[k]), histogram_l1(h, mu, var));
            m.results.emplace_back("in_range_mass_t" + format_double(keep[k]), h.in_range_mass());
        }
    }
    finish(outcome);
    return outcome;
}

CommandOutcome cmd_rate_n(RunConfig const &config, std::ostream &log)
{
    CommandOutcome outcome;
    outcome.dir = output_dir(config);
    ensure_dir(outcome.dir);
    auto &m = outcome.manifest;
    m = start_manifest(config, "rate-n");
    if (config.sim.replicates < 16)
        warn(m, log, "fewer than 16 replicates; the fitted slope will be noisy");
    if (config.sim.kernel.is_maxwell()) {
        auto const flow = MomentFlow::from_law(config.sim.law.centered());
        if (!(ellipticity_lower_bound(flow, 0) > 0))
            warn(m, log, "initial field is singular; the n^-1 rate is not expected");
    }
    auto const series = rate_in_n(config, &log);
    write_rate(outcome.dir, "rate_n", series, m);
    record_fit(fit_rate(series, config.rate.bootstrap, config.sim.seed), m, log);
    finish(outcome);
    return outcome;
}

CommandOutcome cmd_rate_N(RunConfig const &config, std::ostream &log)
{
    CommandOutcome outcome;
    outcome.dir = output_dir(config);
    ensure_dir(outcome.dir);
    auto &m = outcome.manifest;
    m = start_manifest(config, "rate-N");
    if (config.sim.replicates < 16)
        warn(m, log, "fewer than 16 replicates; the fitted slope will be noisy");
    auto const series = rate_in_N(config, &log);
    write_rate(outcome.dir, "rate_N", series, m);
    record_fit(fit_rate(series, config.rate.bootstrap, config.sim.seed), m, log);
    finish(outcome);
    return outcome;
}

CommandOutcome cmd_lemmas(RunConfig const &config, std::ostream &log, SqrtFunction const &sqrt_fn)
{
    CommandOutcome outcome;
    outcome.dir = output_dir(config);
    ensure_dir(outcome.dir);
    auto &m = outcome.manifest;
    m = start_manifest(config, "lemmas");
    m.seed = config.lemmas.seed;

    LemmaOptions options;
    options.trials = config.lemmas.trials;
    options.seed = config.lemmas.seed;
    auto const results = run_lemma_suites(options, sqrt_fn);
    for (auto const &r : results) {
        log << (r.passed() ? "PASS " : "FAIL ") << r.name << ": " << r.trials << " trials, " << r.violations
            << " violations, worst lhs - rhs = " << r.worst_excess << '\n';
        if (!r.passed()) {
            log << "counterexample:\n" << r.counterexample;
            outcome.exit_code = kExitProperty;
        }
        m.results.emplace_back(r.name + "_violations", static_cast<double>(r.violations));
    }
    finish(outcome);
    return outcome;
}

CommandOutcome cmd_hist(RunConfig const &config, std::ostream &log)
{
    CommandOutcome outcome;
    outcome.dir = output_dir(config);
    ensure_dir(outcome.dir);
    auto &m = outcome.manifest;
    m = start_manifest(config, "hist");

    auto const keep = reachable_times(config, m, log);
    auto const coord = config.hist.coord - 1;
    double const mu = config.sim.law.mean()[coord];
    double const var = equilibrium_variance(config.sim.law);

    CsvWriter summary(outcome.dir / "hist_summary.csv", {"gamma", "t", "l1_equilibrium", "in_range_mass"});
    for (double gamma : config.hist.gammas) {
        auto sim = config.sim;
        sim.kernel.family = gamma == 0 ? KernelFamily{Maxwell{}} : KernelFamily{Soft{gamma}};
        if (gamma < 0)
            sim.exclusion = true;
        ReplicateResult run;
        try {
            run = run_replicate(sim, 0, false, keep);
        } catch (DomainError const &e) {
            throw ConfigError("hist.times", e.what());
        }
        m.floor_events += run.floor_events;
        m.interactions += run.interactions;
        log << "gamma = " << gamma << " done (" << run.seconds_per_step << " s/step)" << std::endl;
        for (std::size_t k = 0; k < keep.size(); ++k) {
            auto const h = histogram(coordinate(run.kept[k], coord), config.hist.bins, config.hist.lo, config.hist.hi);
            auto const name = "hist_g" + format_double(gamma) + "_t" + format_double(keep[k]) + ".csv";
            write_histogram(outcome.dir / name, h);
            m.outputs.push_back(name);
            double const row[] = {gamma, keep[k], histogram_l1(h, mu, var), h.in_range_mass()};
            summary.row(row);
        }
    }
    summary.close();
    m.outputs.emplace_back("hist_summary.csv");
    check_floor_fraction(m, log);
    finish(outcome);
    return outcome;
}

} // namespace landau::harness
