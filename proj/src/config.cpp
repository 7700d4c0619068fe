#include "whitham/config.hpp"

#include "whitham/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>

namespace whitham {

using json = nlohmann::ordered_json;

const char* to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::gaussian: return "gaussian";
        case InitialKind::cosine: return "cosine";
        case InitialKind::random: return "random";
        case InitialKind::file: return "file";
    }
    return "unknown";
}

const char* to_string(VelocityProfile profile) {
    return profile == VelocityProfile::zero ? "zero" : "right_moving";
}

const char* to_string(StudyKind kind) {
    switch (kind) {
        case StudyKind::energy_growth: return "energy_growth";
        case StudyKind::timescale: return "timescale";
        case StudyKind::stability: return "stability";
        case StudyKind::mu_scaling: return "mu_scaling";
        case StudyKind::convergence: return "convergence";
    }
    return "unknown";
}

static const char* scheme_name(Scheme s) { return s == Scheme::rk4 ? "rk4" : "picard_reference"; }

RunConfig RunConfig::defaults(int dim) {
    RunConfig c;
    c.dim = dim;
    c.s = 0.5 * dim + 1.51;
    c.t0 = default_t0(dim);
    return c;
}

// ------------------------------------------------------------------ reading

namespace {

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

/// Walks one JSON object, records type errors and rejects unknown keys.
class Reader {
public:
    Reader(const json& obj, std::string prefix, std::vector<Violation>& out)
        : obj_(obj), prefix_(std::move(prefix)), out_(out) {
        if (!obj_.is_object()) fail(prefix_.empty() ? "config" : prefix_, "must be an object");
    }

    bool has(const std::string& key) const { return obj_.is_object() && obj_.contains(key); }

    const json* take(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) return nullptr;
        return &obj_.at(key);
    }

    void number(const std::string& key, double& dst) {
        if (const json* v = take(key)) {
            if (v->is_number()) dst = v->get<double>();
            else fail(join(prefix_, key), "must be a number");
        }
    }

    void optional_number(const std::string& key, std::optional<double>& dst) {
        if (const json* v = take(key)) {
            if (v->is_null()) dst.reset();
            else if (v->is_number()) dst = v->get<double>();
            else fail(join(prefix_, key), "must be a number or null");
        }
    }

    void integer(const std::string& key, int& dst) {
        if (const json* v = take(key)) {
            if (v->is_number_integer() && v->get<long long>() >= INT32_MIN && v->get<long long>() <= INT32_MAX)
                dst = v->get<int>();
            else fail(join(prefix_, key), "must be an integer");
        }
    }

    void unsigned_integer(const std::string& key, std::uint64_t& dst) {
        if (const json* v = take(key)) {
            if (v->is_number_unsigned()) dst = v->get<std::uint64_t>();
            else fail(join(prefix_, key), "must be a non-negative integer");
        }
    }

    void string(const std::string& key, std::string& dst) {
        if (const json* v = take(key)) {
            if (v->is_string()) dst = v->get<std::string>();
            else fail(join(prefix_, key), "must be a string");
        }
    }

    void numbers(const std::string& key, std::vector<double>& dst) {
        if (const json* v = take(key)) {
            if (v->is_array() && std::all_of(v->begin(), v->end(), [](const json& x) { return x.is_number(); }))
                dst = v->get<std::vector<double>>();
            else fail(join(prefix_, key), "must be an array of numbers");
        }
    }

    void integers(const std::string& key, std::vector<int>& dst) {
        if (const json* v = take(key)) {
            if (v->is_array() &&
                std::all_of(v->begin(), v->end(), [](const json& x) { return x.is_number_integer(); }))
                dst = v->get<std::vector<int>>();
            else fail(join(prefix_, key), "must be an array of integers");
        }
    }

    template <class E>
    void choice(const std::string& key, E& dst, const std::vector<std::pair<std::string, E>>& options) {
        const json* v = take(key);
        if (!v) return;
        if (v->is_string()) {
            for (const auto& [name, value] : options)
                if (name == v->get<std::string>()) {
                    dst = value;
                    return;
                }
        }
        std::string allowed;
        for (const auto& o : options) allowed += (allowed.empty() ? "" : ", ") + o.first;
        fail(join(prefix_, key), "must be one of: " + allowed);
    }

    /// Sub-object reader, or nullopt when the key is absent.
    std::optional<Reader> object(const std::string& key) {
        const json* v = take(key);
        if (!v) return std::nullopt;
        return Reader(*v, join(prefix_, key), out_);
    }

    void finish() {
        if (!obj_.is_object()) return;
        for (const auto& item : obj_.items())
            if (!seen_.count(item.key())) fail(join(prefix_, item.key()), "unknown key");
    }

    void fail(const std::string& field, const std::string& reason) { out_.push_back({field, reason}); }
    const std::string& prefix() const { return prefix_; }

private:
    const json& obj_;
    std::string prefix_;
    std::vector<Violation>& out_;
    std::set<std::string> seen_;
};

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + end, '\n'));
        std::string what = e.what();
        // drop the library prefix "[json.exception.parse_error.101] "
        if (const auto p = what.find("] "); p != std::string::npos) what = what.substr(p + 2);
        throw ConfigParseError(line, what);
    }
}

const std::vector<std::pair<std::string, SymbolKind>>& symbol_kinds() {
    static const std::vector<std::pair<std::string, SymbolKind>> kinds = [] {
        std::vector<std::pair<std::string, SymbolKind>> out;
        for (auto k : {SymbolKind::identity, SymbolKind::sqrt_tanh_ratio, SymbolKind::tanh_ratio,
                       SymbolKind::inv_helmholtz, SymbolKind::bcs_boussinesq, SymbolKind::custom_table})
            out.emplace_back(to_string(k), k);
        return out;
    }();
    return kinds;
}

SymbolSpec read_symbol(Reader r) {
    SymbolSpec s;
    if (!r.has("kind")) r.fail(join(r.prefix(), "kind"), "is required");
    r.choice("kind", s.kind, symbol_kinds());
    r.number("a", s.a);
    r.number("b", s.b);
    r.number("scale", s.scale);
    r.numbers("table", s.table);
    r.number("table_max", s.table_max);
    r.finish();
    return s;
}

void read_model(Reader& top, ModelSpec& m) {
    const json* v = top.take("model");
    if (!v) return;
    if (v->is_string()) {
        m.preset = v->get<std::string>();
        return;
    }
    if (!v->is_object()) {
        top.fail("model", "must be a preset name or an object");
        return;
    }
    std::vector<Violation> scratch;
    Reader r(*v, "model", scratch);
    r.string("preset", m.preset);
    r.number("a", m.a);
    r.number("b", m.b);
    auto g1 = r.object("g1");
    auto g2 = r.object("g2");
    if (g1 && g2) m.custom = MultiplierPair{read_symbol(*g1), read_symbol(*g2)};
    else if (g1 || g2) r.fail("model", "g1 and g2 must be given together");
    r.finish();
    for (auto& x : scratch) top.fail(x.field, x.reason);
}

void read_stepper(Reader r, StepperConfig& s) {
    r.number("cfl", s.cfl);
    r.optional_number("dt_override", s.dt_override);
    r.choice("scheme", s.scheme, {{"rk4", Scheme::rk4}, {"picard_reference", Scheme::picard_reference}});
    r.number("alpha", s.alpha);
    r.number("picard_tol", s.picard_tol);
    r.integer("picard_max_iter", s.picard_max_iter);
    r.finish();
}

void read_initial(Reader r, InitialSpec& s) {
    r.choice("kind", s.kind,
             {{"gaussian", InitialKind::gaussian},
              {"cosine", InitialKind::cosine},
              {"random", InitialKind::random},
              {"file", InitialKind::file}});
    r.number("amplitude", s.amplitude);
    r.numbers("center", s.center);
    r.number("width", s.width);
    r.integer("mode", s.mode);
    r.number("decay", s.decay);
    r.choice("velocity", s.velocity, {{"zero", VelocityProfile::zero}, {"right_moving", VelocityProfile::right_moving}});
    r.optional_number("target_norm", s.target_norm);
    r.string("path", s.path);
    r.finish();
}

void read_output(Reader r, OutputSpec& s) {
    r.string("dir", s.dir);
    r.integer("csv_cadence", s.csv_cadence);
    r.integer("snapshot_cadence", s.snapshot_cadence);
    r.number("blowup_factor", s.blowup_factor);
    r.finish();
}

RunConfig read_run_config(const json& doc, const std::string& prefix, std::vector<Violation>& violations) {
    Reader r(doc, prefix, violations);
    int dim = 1;
    r.integer("dim", dim);
    RunConfig c = RunConfig::defaults(dim == 2 ? 2 : 1);
    c.dim = dim;
    read_model(r, c.model);
    r.integer("N", c.N);
    r.number("L", c.L);
    r.number("mu", c.mu);
    r.number("epsilon", c.epsilon);
    r.number("h_min", c.h_min);
    r.number("s", c.s);
    r.number("t0", c.t0);
    r.number("t_end_over_eps", c.t_end_over_eps);
    if (auto s = r.object("stepper")) read_stepper(*s, c.stepper);
    if (auto s = r.object("initial")) read_initial(*s, c.initial);
    r.unsigned_integer("seed", c.seed);
    if (auto s = r.object("output")) read_output(*s, c.output);
    r.finish();
    return c;
}

// ------------------------------------------------------------------ writing

json symbol_json(const SymbolSpec& s) {
    json j;
    j["kind"] = to_string(s.kind);
    j["a"] = s.a;
    j["b"] = s.b;
    j["scale"] = s.scale;
    j["table"] = s.table;
    j["table_max"] = s.table_max;
    return j;
}

json run_config_json(const RunConfig& c) {
    json j;
    json model;
    model["preset"] = c.model.preset;
    model["a"] = c.model.a;
    model["b"] = c.model.b;
    if (c.model.custom) {
        model["g1"] = symbol_json(c.model.custom->g1);
        model["g2"] = symbol_json(c.model.custom->g2);
    }
    j["model"] = model;
    j["dim"] = c.dim;
    j["N"] = c.N;
    j["L"] = c.L;
    j["mu"] = c.mu;
    j["epsilon"] = c.epsilon;
    j["h_min"] = c.h_min;
    j["s"] = c.s;
    j["t0"] = c.t0;
    j["t_end_over_eps"] = c.t_end_over_eps;

    json st;
    st["cfl"] = c.stepper.cfl;
    st["dt_override"] = c.stepper.dt_override ? json(*c.stepper.dt_override) : json(nullptr);
    st["scheme"] = scheme_name(c.stepper.scheme);
    st["alpha"] = c.stepper.alpha;
    st["picard_tol"] = c.stepper.picard_tol;
    st["picard_max_iter"] = c.stepper.picard_max_iter;
    j["stepper"] = st;

    json in;
    in["kind"] = to_string(c.initial.kind);
    in["amplitude"] = c.initial.amplitude;
    in["center"] = c.initial.center;
    in["width"] = c.initial.width;
    in["mode"] = c.initial.mode;
    in["decay"] = c.initial.decay;
    in["velocity"] = to_string(c.initial.velocity);
    in["target_norm"] = c.initial.target_norm ? json(*c.initial.target_norm) : json(nullptr);
    in["path"] = c.initial.path;
    j["initial"] = in;

    j["seed"] = c.seed;
    json out;
    out["dir"] = c.output.dir;
    out["csv_cadence"] = c.output.csv_cadence;
    out["snapshot_cadence"] = c.output.snapshot_cadence;
    out["blowup_factor"] = c.output.blowup_factor;
    j["output"] = out;
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    const json doc = parse_json(text);
    std::vector<Violation> violations;
    RunConfig c = read_run_config(doc, "", violations);
    if (!violations.empty()) throw ConfigValidationError(std::move(violations));
    return c;
}

RunConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigValidationError(std::vector<Violation>{{"path", e.what()}});
    }
    RunConfig c = parse_config(text);
    const auto report = validate(c);
    if (!report.ok()) throw ConfigValidationError(report.violations);
    return c;
}

std::string to_json(const RunConfig& config) { return run_config_json(config).dump(2) + "\n"; }

void save_config(const RunConfig& config, const std::string& path) { write_file_atomic(path, to_json(config)); }

// --------------------------------------------------------------- validation

MultiplierPair resolve_pair(const ModelSpec& spec) {
    if (spec.custom) return *spec.custom;
    return preset(spec.preset, spec.a, spec.b).pair;
}

GridPtr build_grid(const RunConfig& c) { return make_grid(c.dim, static_cast<std::size_t>(c.N), c.L); }

ModelParams model_params(const RunConfig& c) { return {resolve_pair(c.model), c.epsilon, c.mu, c.h_min}; }

namespace {

// Gaussian summed over the neighbouring periods so the field is smooth on the torus.
double periodic_gaussian(double x, double c, double w, double length) {
    double sum = 0.0;
    for (int n = -2; n <= 2; ++n) {
        const double d = x - c + n * length;
        sum += std::exp(-d * d / (w * w));
    }
    return sum;
}

}  // namespace

State initial_state(const RunConfig& c, const Model& model) {
    const GridPtr grid = model.grid_ptr();
    const InitialSpec& in = c.initial;
    State u(grid);
    switch (in.kind) {
        case InitialKind::gaussian: {
            std::array<double, 2> centre = {0.5 * c.L, 0.5 * c.L};
            for (std::size_t i = 0; i < in.center.size() && i < 2; ++i) centre[i] = in.center[i];
            u.zeta = ScalarField::sample(grid, [&](const Vec2& x) {
                double z = in.amplitude * periodic_gaussian(x[0], centre[0], in.width, c.L);
                if (c.dim == 2) z *= periodic_gaussian(x[1], centre[1], in.width, c.L);
                return z;
            });
            break;
        }
        case InitialKind::cosine: {
            const double k = 2.0 * std::numbers::pi * in.mode / c.L;
            u.zeta = ScalarField::sample(grid, [&](const Vec2& x) { return in.amplitude * std::cos(k * x[0]); });
            break;
        }
        case InitialKind::random: {
            ScalarField f = random_field(grid, c.seed, in.decay);
            const double m = max_abs(f);
            if (m > 0.0) f *= in.amplitude / m;
            u.zeta = std::move(f);
            break;
        }
        case InitialKind::file: {
            Snapshot snap = read_snapshot(in.path);
            const auto& g = snap.state.grid();
            if (g.dim() != c.dim || g.points_per_dim() != static_cast<std::size_t>(c.N) || g.length() != c.L)
                throw std::invalid_argument("snapshot grid does not match the config grid");
            u = State(ScalarField(grid), VectorField(static_cast<std::size_t>(c.dim), ScalarField(grid)), snap.state.time);
            std::copy(snap.state.zeta.values().begin(), snap.state.zeta.values().end(), u.zeta.values().begin());
            for (int i = 0; i < c.dim; ++i)
                std::copy(snap.state.v[i].values().begin(), snap.state.v[i].values().end(), u.v[i].values().begin());
            break;
        }
    }
    if (in.kind != InitialKind::file && in.velocity == VelocityProfile::right_moving) u.v[0] = u.zeta;
    if (in.target_norm) {
        const double n = model.x_norm(u, c.s);
        if (n > 0.0) u *= *in.target_norm / n;
    }
    return u;
}

StepperConfig stepper_config(const RunConfig& c) {
    StepperConfig s = c.stepper;
    s.t_end = c.epsilon > 0.0 ? c.t_end_over_eps / c.epsilon : c.t_end_over_eps;
    return s;
}

RunControl run_control(const RunConfig& c) {
    RunControl ctl;
    ctl.ladder = {c.t0, c.s};
    ctl.blowup_factor = c.output.blowup_factor;
    ctl.report_cadence = c.output.csv_cadence;
    ctl.state_cadence = c.output.snapshot_cadence;
    return ctl;
}

ValidationReport validate(const RunConfig& c) {
    ValidationReport rep;
    auto bad = [&rep](const std::string& field, const std::string& reason) { rep.violations.push_back({field, reason}); };
    auto finite = [](double x) { return std::isfinite(x); };

    bool pair_known = true;
    if (!c.model.custom) {
        const auto names = preset_names();
        if (std::find(names.begin(), names.end(), c.model.preset) == names.end()) {
            bad("model", "unknown preset '" + c.model.preset + "'");
            pair_known = false;
        }
        if (c.model.preset == "abcd" && !(c.model.a >= 0.0 && c.model.b > 0.0)) {
            bad("model", "abcd needs a >= 0 and b > 0");
            pair_known = false;
        }
    } else {
        for (const SymbolSpec* s : {&c.model.custom->g1, &c.model.custom->g2})
            if (s->kind == SymbolKind::custom_table && (s->table.size() < 2 || !(s->table_max > 0.0))) {
                bad("model", "custom_table needs at least two samples and table_max > 0");
                pair_known = false;
            }
    }

    const bool grid_ok = (c.dim == 1 || c.dim == 2) && c.N >= 4 && c.N % 2 == 0 && c.N <= (c.dim == 1 ? 8192 : 1024) &&
                         c.L > 0.0 && finite(c.L);
    if (c.dim != 1 && c.dim != 2) bad("dim", "must be 1 or 2");
    if (!(c.N >= 4 && c.N % 2 == 0)) bad("N", "must be an even integer >= 4");
    else if (c.N > (c.dim == 1 ? 8192 : 1024)) bad("N", "too large");
    if (!(c.L > 0.0 && finite(c.L))) bad("L", "must be positive");
    const bool mu_ok = c.mu > 0.0 && c.mu <= 1.0;
    const bool eps_ok = c.epsilon > 0.0 && c.epsilon <= 1.0;
    const bool hmin_ok = c.h_min > 0.0 && c.h_min <= 1.0;
    if (!mu_ok) bad("mu", "must lie in (0,1]");
    if (!eps_ok) bad("epsilon", "must lie in (0,1]");
    if (!hmin_ok) bad("h_min", "must lie in (0,1]");
    if (!(c.t0 > 0.5 * c.dim && finite(c.t0))) bad("t0", "must exceed d/2");
    if (!(c.s >= 0.0 && finite(c.s))) bad("s", "must be non-negative");
    else if (c.s <= 0.5 * c.dim + 1.0) rep.warnings.push_back("s <= d/2 + 1: below the regularity of the existence theory");
    if (!(c.t_end_over_eps >= 0.0 && finite(c.t_end_over_eps))) bad("t_end_over_eps", "must be non-negative");

    const auto& st = c.stepper;
    if (!(st.cfl > 0.0 && st.cfl <= 1.0)) bad("stepper.cfl", "must lie in (0,1]");
    if (st.dt_override && !(*st.dt_override > 0.0 && finite(*st.dt_override))) bad("stepper.dt_override", "must be positive");
    if (!(st.alpha >= 0.0 && st.alpha <= 1.0)) bad("stepper.alpha", "must lie in [0,1]");
    if (!(st.picard_tol > 0.0)) bad("stepper.picard_tol", "must be positive");
    if (st.picard_max_iter < 1) bad("stepper.picard_max_iter", "must be at least 1");
    if (st.scheme == Scheme::picard_reference && (c.dim != 1 || c.N > 64))
        bad("stepper.scheme", "picard_reference needs dim = 1 and N <= 64");

    const auto& in = c.initial;
    if (!finite(in.amplitude)) bad("initial.amplitude", "must be finite");
    if (!in.center.empty() && in.center.size() != static_cast<std::size_t>(c.dim))
        bad("initial.center", "must have one entry per axis");
    if (!(in.width > 0.0)) bad("initial.width", "must be positive");
    if (in.mode < 0 || (grid_ok && 2 * in.mode >= c.N)) bad("initial.mode", "must lie in [0, N/2)");
    if (!(in.decay > 0.0)) bad("initial.decay", "must be positive");
    if (in.target_norm && !(*in.target_norm > 0.0)) bad("initial.target_norm", "must be positive");
    if (in.kind == InitialKind::file && in.path.empty()) bad("initial.path", "required for kind = file");

    if (c.output.dir.empty()) bad("output.dir", "must not be empty");
    if (c.output.csv_cadence < 1) bad("output.csv_cadence", "must be at least 1");
    if (c.output.snapshot_cadence < 0) bad("output.snapshot_cadence", "must be non-negative");
    if (!(c.output.blowup_factor > 1.0)) bad("output.blowup_factor", "must exceed 1");

    if (!pair_known || !grid_ok || !mu_ok || !eps_ok || !hmin_ok) return rep;

    const GridPtr grid = build_grid(c);
    try {
        rep.admissibility = validate_admissible(resolve_pair(c.model), c.mu, admissibility_range(*grid));
    } catch (const std::exception& e) {
        bad("model", std::string("symbol cannot be evaluated on the grid: ") + e.what());
        return rep;
    }
    if (!rep.admissibility->pass()) {
        std::string clauses;
        for (const auto& v : rep.admissibility->violations) clauses += (clauses.empty() ? "" : ", ") + v;
        bad("model", "pair is not admissible (violated: " + clauses + ")");
        return rep;
    }
    if (!rep.violations.empty()) return rep;

    try {
        const Model model(grid, model_params(c));
        const State u = initial_state(c, model);
        rep.non_cavitation = check_non_cavitation(u.zeta, c.epsilon, c.h_min);
        if (!rep.non_cavitation->ok) {
            std::ostringstream msg;
            msg << "non-cavitation violated: min(1 + eps zeta) = " << rep.non_cavitation->min_depth << " < h_min = "
                << c.h_min;
            bad("initial", msg.str());
        }
    } catch (const std::exception& e) {
        bad("initial", e.what());
    }
    return rep;
}

// ------------------------------------------------------------------ studies

StudySpec parse_study(const std::string& text) {
    const json doc = parse_json(text);
    std::vector<Violation> violations;
    StudySpec spec;
    Reader r(doc, "", violations);
    if (!r.has("study")) r.fail("study", "is required");
    r.choice("study", spec.kind,
             {{"energy_growth", StudyKind::energy_growth},
              {"timescale", StudyKind::timescale},
              {"stability", StudyKind::stability},
              {"mu_scaling", StudyKind::mu_scaling},
              {"convergence", StudyKind::convergence}});
    if (const json* base = r.take("base")) spec.base = read_run_config(*base, "base", violations);
    r.numbers("epsilons", spec.epsilons);
    r.numbers("mus", spec.mus);
    r.integers("grid_sizes", spec.grid_sizes);
    r.numbers("dts", spec.dts);
    r.string("compare_model", spec.compare_model);
    r.number("t_target", spec.t_target);
    if (auto f = r.object("fit")) {
        f->number("lower", spec.fit.lower);
        f->number("upper", spec.fit.upper);
        f->finish();
    }
    r.finish();
    if (!violations.empty()) throw ConfigValidationError(std::move(violations));
    return spec;
}

StudySpec load_study(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigValidationError(std::vector<Violation>{{"path", e.what()}});
    }
    StudySpec spec = parse_study(text);
    std::vector<Violation> v;
    const auto base = validate(spec.base);
    for (const auto& x : base.violations) v.push_back({"base." + x.field, x.reason});
    switch (spec.kind) {
        case StudyKind::energy_growth:
            if (spec.epsilons.size() < 3) v.push_back({"epsilons", "needs at least three values"});
            break;
        case StudyKind::timescale:
            if (spec.epsilons.empty()) v.push_back({"epsilons", "must not be empty"});
            if (spec.mus.empty()) v.push_back({"mus", "must not be empty"});
            if (!(spec.t_target > 0.0)) v.push_back({"t_target", "must be positive"});
            break;
        case StudyKind::stability:
        case StudyKind::mu_scaling:
            if (spec.mus.size() < 2) v.push_back({"mus", "needs at least two values"});
            break;
        case StudyKind::convergence:
            if (spec.dts.size() < 2) v.push_back({"dts", "needs at least two values"});
            if (spec.grid_sizes.size() < 2) v.push_back({"grid_sizes", "needs at least two values"});
            break;
    }
    for (double e : spec.epsilons)
        if (!(e >= 0.0 && e <= 1.0)) v.push_back({"epsilons", "values must lie in [0,1]"});
    for (double m : spec.mus)
        if (!(m > 0.0 && m <= 1.0)) v.push_back({"mus", "values must lie in (0,1]"});
    for (double d : spec.dts)
        if (!(d > 0.0)) v.push_back({"dts", "values must be positive"});
    for (int n : spec.grid_sizes)
        if (n < 4 || n % 2) v.push_back({"grid_sizes", "values must be even and >= 4"});
    if (!(spec.fit.lower > 1.0 && spec.fit.upper > spec.fit.lower)) v.push_back({"fit", "needs 1 < lower < upper"});
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), spec.compare_model) == names.end())
        v.push_back({"compare_model", "unknown preset '" + spec.compare_model + "'"});
    if (!v.empty()) throw ConfigValidationError(std::move(v));
    return spec;
}

std::string to_json(const StudySpec& spec) {
    json j;
    j["study"] = to_string(spec.kind);
    j["base"] = run_config_json(spec.base);
    j["epsilons"] = spec.epsilons;
    j["mus"] = spec.mus;
    j["grid_sizes"] = spec.grid_sizes;
    j["dts"] = spec.dts;
    j["compare_model"] = spec.compare_model;
    j["t_target"] = spec.t_target;
    j["fit"] = {{"lower", spec.fit.lower}, {"upper", spec.fit.upper}};
    return j.dump(2) + "\n";
}

}  // namespace whitham
