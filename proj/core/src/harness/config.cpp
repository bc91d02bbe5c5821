#include "landau/harness/config.hpp"

#include "landau/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace landau::harness {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key)
{
    if (key.empty() || key.front() == '.' || key.back() == '.')
        return false;
    return std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    });
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto const pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

// Typed access that remembers which keys were read.
class Reader {
public:
    explicit Reader(ConfigEntries const &entries) : entries_(entries) {}

    [[nodiscard]] bool has(std::string const &key) const { return entries_.contains(key); }

    [[nodiscard]] std::string const *raw(std::string const &key)
    {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return nullptr;
        used_.insert(key);
        return &it->second.value;
    }

    [[noreturn]] void fail(std::string const &key, std::string const &message) const
    {
        auto it = entries_.find(key);
        throw ConfigError(key, message, it == entries_.end() ? 0 : it->second.line);
    }

    template <class T>
    T number(std::string const &key, T fallback)
    {
        auto const *v = raw(key);
        if (!v)
            return fallback;
        return parse_number<T>(key, *v);
    }

    template <class T>
    T parse_number(std::string const &key, std::string_view text) const
    {
        T out{};
        if constexpr (std::is_unsigned_v<T>) {
            if (!text.empty() && text.front() == '-')
                fail(key, "expected a nonnegative integer, got '" + std::string(text) + "'");
        }
        auto const *first = text.data();
        auto const *last = text.data() + text.size();
        if (!text.empty() && text.front() == '+')
            ++first;
        auto const [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc{} || ptr != last || first == last)
            fail(key, std::string("expected ") + (std::is_floating_point_v<T> ? "a number" : "an integer") +
                          ", got '" + std::string(text) + "'");
        return out;
    }

    template <class T>
    std::vector<T> list(std::string const &key, std::vector<T> fallback)
    {
        auto const *v = raw(key);
        if (!v)
            return fallback;
        std::vector<T> out;
        for (auto part : split(*v, ','))
            out.push_back(parse_number<T>(key, part));
        return out;
    }

    std::string word(std::string const &key, std::string fallback)
    {
        auto const *v = raw(key);
        return v ? *v : fallback;
    }

    void reject_unused() const
    {
        for (auto const &[key, entry] : entries_)
            if (!used_.contains(key))
                throw ConfigError(key, "unknown key", entry.line);
    }

private:
    ConfigEntries const &entries_;
    std::set<std::string> used_;
};

KernelSpec read_kernel(Reader &r)
{
    KernelSpec spec;
    spec.dim = r.number<std::size_t>("kernel.dim", 2);
    auto const family = r.word("kernel.family", "maxwell");
    if (family == "maxwell") {
        spec.family = Maxwell{};
    } else if (family == "pseudo_maxwell") {
        PseudoMaxwell p;
        p.lambda_floor = r.number("kernel.lambda_floor", p.lambda_floor);
        p.r0 = r.number("kernel.r0", p.r0);
        p.r1 = r.number("kernel.r1", p.r1);
        spec.family = p;
    } else if (family == "soft") {
        Soft s;
        s.gamma = r.number("kernel.gamma", s.gamma);
        spec.family = s;
    } else if (family == "soft_cutoff") {
        SoftCutoff s;
        s.gamma = r.number("kernel.gamma", s.gamma);
        s.epsilon = r.number("kernel.epsilon", s.epsilon);
        spec.family = s;
    } else {
        r.fail("kernel.family",
               "unknown kernel family '" + family + "' (expected maxwell, pseudo_maxwell, soft or soft_cutoff)");
    }
    try {
        spec.validate();
    } catch (DomainError const &e) {
        r.fail("kernel.family", e.what());
    }
    return spec;
}

// "gaussian mean=0 std=0.1" or "mixture2 center=1 std=0.1 mean=0"
LawComponent read_component(Reader &r, std::string const &key, std::string_view text)
{
    auto const words = split(text, ' ');
    std::vector<std::string_view> parts;
    for (auto w : words)
        if (!w.empty())
            parts.push_back(w);
    if (parts.empty())
        r.fail(key, "empty law description");
    double mean = 0, stdev = 1, center = 1;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        auto const eq = parts[i].find('=');
        if (eq == std::string_view::npos)
            r.fail(key, "expected name=value, got '" + std::string(parts[i]) + "'");
        auto const name = parts[i].substr(0, eq);
        double const v = r.parse_number<double>(key, parts[i].substr(eq + 1));
        if (name == "mean")
            mean = v;
        else if (name == "std")
            stdev = v;
        else if (name == "center")
            center = v;
        else
            r.fail(key, "unknown law parameter '" + std::string(name) + "'");
    }
    if (!(stdev >= 0))
        r.fail(key, "std must be >= 0");
    if (parts[0] == "gaussian")
        return GaussianComponent{mean, stdev};
    if (parts[0] == "mixture2")
        return Mixture2Component{mean, center, stdev};
    r.fail(key, "unknown law '" + std::string(parts[0]) + "' (expected gaussian or mixture2)");
}

InitialLaw read_law(Reader &r, std::size_t dim)
{
    bool const has_preset = r.has("init.preset");
    bool const has_law = r.has("init.law");
    if (has_preset && has_law)
        r.fail("init.law", "give either init.preset or init.law, not both");
    if (!has_law) {
        auto const preset = r.word("init.preset", "paper_sec5");
        if (preset != "paper_sec5")
            r.fail("init.preset", "unknown preset '" + preset + "'");
        if (dim != 2)
            r.fail("init.preset", "preset paper_sec5 is two-dimensional but kernel.dim = " + std::to_string(dim));
        return InitialLaw::paper_sec5();
    }
    auto const law = r.word("init.law", "");
    if (law == "gaussian") {
        GaussianComponent g;
        g.mean = r.number("init.mean", 0.0);
        g.std = r.number("init.std", 1.0);
        if (!(g.std >= 0))
            r.fail("init.std", "std must be >= 0");
        return InitialLaw::isotropic(dim, g);
    }
    if (law == "mixture2") {
        Mixture2Component m;
        m.mean = r.number("init.mean", 0.0);
        m.center = r.number("init.center", 1.0);
        m.std = r.number("init.std", 1.0);
        if (!(m.std >= 0))
            r.fail("init.std", "std must be >= 0");
        return InitialLaw::isotropic(dim, m);
    }
    if (law == "product") {
        InitialLaw out;
        for (std::size_t k = 1; k <= dim; ++k) {
            auto const key = "init.coord." + std::to_string(k);
            auto const *text = r.raw(key);
            if (!text)
                r.fail(key, "product law needs one entry per coordinate");
            out.coords.push_back(read_component(r, key, *text));
        }
        return out;
    }
    r.fail("init.law", "unknown law '" + law + "' (expected gaussian, mixture2 or product)");
}

bool read_switch(Reader &r, std::string const &key, std::optional<bool> &out)
{
    auto const *v = r.raw(key);
    if (!v)
        return false;
    if (*v == "on" || *v == "true" || *v == "1")
        out = true;
    else if (*v == "off" || *v == "false" || *v == "0")
        out = false;
    else if (*v == "auto")
        out.reset();
    else
        r.fail(key, "expected on, off or auto, got '" + *v + "'");
    return true;
}

} // namespace

namespace {

// Keys that start with a top-level table name are taken as written, whatever
// section they appear in.
bool top_level(std::string_view key)
{
    auto const head = key.substr(0, key.find('.'));
    if (head.size() == key.size())
        return false;
    for (std::string_view t : {"kernel", "init", "run", "out", "rate", "hist", "lemmas"})
        if (head == t)
            return true;
    return false;
}

} // namespace

ConfigEntries parse_entries(std::string_view text)
{
    ConfigEntries entries;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto const end = std::min(text.find('\n', pos), text.size());
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto const hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size())
                break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("", "unterminated section header", line_no);
            auto const name = trim(line.substr(1, line.size() - 2));
            if (!name.empty() && !valid_key(name))
                throw ConfigError(std::string(name), "invalid section name", line_no);
            section = std::string(name);
            continue;
        }
        auto const eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", "expected 'key = value'", line_no);
        auto const key_part = trim(line.substr(0, eq));
        auto const value = trim(line.substr(eq + 1));
        if (!valid_key(key_part))
            throw ConfigError(std::string(key_part), "invalid key", line_no);
        std::string key = section.empty() || top_level(key_part) ? std::string(key_part)
                                                                 : section + "." + std::string(key_part);
        if (value.empty())
            throw ConfigError(key, "missing value", line_no);
        if (entries.contains(key))
            throw ConfigError(key, "repeated key (first set on line " + std::to_string(entries[key].line) + ")",
                              line_no);
        entries[key] = ConfigEntry{std::string(value), line_no};
        if (end == text.size())
            break;
    }
    return entries;
}

RunConfig build_config(ConfigEntries entries)
{
    RunConfig out;
    Reader r(entries);
    auto &sim = out.sim;
    sim.kernel = read_kernel(r);
    sim.law = read_law(r, sim.kernel.dim);

    sim.n = r.number("run.n", sim.n);
    sim.steps_per_unit = r.number("run.N", sim.steps_per_unit);
    sim.horizon = r.number("run.T", sim.horizon);
    sim.seed = r.number("run.seed", sim.seed);
    sim.replicates = r.number("run.replicates", sim.replicates);
    read_switch(r, "run.exclusion", sim.exclusion);
    auto const method = r.word("run.sqrt_method", "cholesky");
    if (method == "cholesky")
        sim.sqrt_method = SqrtMethod::kCholesky;
    else if (method == "sym_sqrt")
        sim.sqrt_method = SqrtMethod::kSymSqrt;
    else
        r.fail("run.sqrt_method", "expected cholesky or sym_sqrt, got '" + method + "'");
    auto const evaluator = r.word("run.evaluator", "auto");
    if (evaluator == "auto")
        sim.evaluator = Evaluator::kAuto;
    else if (evaluator == "pairwise")
        sim.evaluator = Evaluator::kPairwise;
    else if (evaluator == "moments")
        sim.evaluator = Evaluator::kMoments;
    else
        r.fail("run.evaluator", "expected auto, pairwise or moments, got '" + evaluator + "'");
    read_switch(r, "run.monitor", out.monitor);
    sim.stride = r.number("run.stride", sim.stride);
    sim.workers = r.number("run.workers", sim.workers);
    sim.out_dir = r.word("out.dir", "out");

    auto &rate = out.rate;
    rate.n_values = r.list("rate.n_values", rate.n_values);
    rate.N_values = r.list("rate.N_values", rate.N_values);
    rate.refinement = r.number("rate.refinement", rate.refinement);
    rate.bootstrap = r.number("rate.bootstrap", rate.bootstrap);
    if (rate.refinement < 2)
        r.fail("rate.refinement", "refinement factor must be >= 2");

    auto &hist = out.hist;
    hist.bins = r.number("hist.bins", hist.bins);
    hist.lo = r.number("hist.lo", hist.lo);
    hist.hi = r.number("hist.hi", hist.hi);
    hist.coord = r.number("hist.coord", hist.coord);
    hist.times = r.list("hist.times", hist.times);
    hist.gammas = r.list("hist.gammas", hist.gammas);
    if (hist.bins < 1)
        r.fail("hist.bins", "need at least one bin");
    if (!(hist.hi > hist.lo))
        r.fail("hist.hi", "hist.hi must exceed hist.lo");
    if (hist.coord < 1 || hist.coord > sim.kernel.dim)
        r.fail("hist.coord", "coordinate must be in 1.." + std::to_string(sim.kernel.dim));
    for (double g : hist.gammas)
        if (!(g <= 0 && g >= -3))
            r.fail("hist.gammas", "exponents must lie in [-3, 0]");

    out.lemmas.trials = r.number("lemmas.trials", out.lemmas.trials);
    out.lemmas.seed = r.number("lemmas.seed", out.lemmas.seed);
    if (out.lemmas.trials == 0)
        r.fail("lemmas.trials", "trial count must be positive");

    r.reject_unused();

    try {
        sim.validate();
    } catch (DomainError const &e) {
        throw ConfigError("run", e.what());
    }
    out.entries = std::move(entries);
    return out;
}

RunConfig parse_config(std::string_view text)
{
    return build_config(parse_entries(text));
}

RunConfig load_config(std::filesystem::path const &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("", "cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto const text = buf.str();
    auto const first = text.find_first_not_of(" \t\r\n");
    RunConfig config;
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(text);
        } catch (nlohmann::json::exception const &e) {
            throw ConfigError("", std::string("manifest is not valid JSON: ") + e.what());
        }
        if (!manifest.contains("config") || !manifest["config"].is_object())
            throw ConfigError("config", "manifest has no config object");
        ConfigEntries entries;
        for (auto const &[key, value] : manifest["config"].items()) {
            if (!value.is_string())
                throw ConfigError(key, "manifest config values must be strings");
            entries[key] = ConfigEntry{value.get<std::string>(), 0};
        }
        config = build_config(std::move(entries));
    } else {
        config = parse_config(text);
    }
    return config;
}

void override_entry(RunConfig &config, std::string const &key, std::string const &value)
{
    auto entries = config.entries;
    entries[key] = ConfigEntry{value, 0};
    config = build_config(std::move(entries));
}

std::filesystem::path output_dir(RunConfig const &config)
{
    if (char const *env = std::getenv(kOutDirEnv); env && *env)
        return env;
    return config.sim.out_dir;
}

} // namespace landau::harness
