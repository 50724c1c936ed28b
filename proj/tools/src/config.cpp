#include "grushin_lab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "grushin/errors.hpp"

namespace grushin::lab {

using nlohmann::json;

std::string ConfigError::diagnostic() const {
    std::ostringstream os;
    os << "config error";
    if (line_ > 0) os << " (line " << line_ << ")";
    if (!field_.empty()) os << ": field \"" << field_ << "\"";
    os << ": " << what();
    return os.str();
}

const std::vector<ExperimentInfo>& experiment_catalog() {
    static const std::vector<ExperimentInfo> catalog = {
        {"eigs", "interval eigenvalues: Kummer roots vs FD oracle, localization gap"},
        {"kernel", "half-line heat kernel: closed form vs truncated Mehler sum"},
        {"agmon", "ground-state mass decay on the window vs Agmon distance"},
        {"obs-sweep", "observability ratio per mode, growth fit and classification"},
        {"carleman-boundary", "boundary observability cost inequality margins"},
        {"carleman-interior", "interior observability cost margins and weight checks"},
        {"gamma-scaling", "ground eigenvalue scaling exponent for gamma > 1"},
        {"generalized-gap", "eigenvalue deviation for a general q, transition time"},
        {"radial-check", "radial d-dimensional oracle vs reduced 1D problem"},
    };
    return catalog;
}

namespace {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "must be an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const {
        used_.insert(key);
        return j_.contains(key);
    }
    const json& raw(const std::string& key) const {
        used_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(field(key), "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
        return d;
    }
    long long integer(const std::string& key, long long fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (v.is_number_integer()) return v.get<long long>();
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<long long>(d);
        }
        throw ConfigError(field(key), "must be an integer");
    }
    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(field(key), "must be true or false");
        return v.get<bool>();
    }
    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(field(key), "must be a string");
        return v.get<std::string>();
    }
    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        if (!has(key)) return out;
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(field(key), "must be an array of numbers");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "must be a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    void reject_unknown() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    mutable std::set<std::string> used_;
};

void require(bool ok, const std::string& field, const std::string& msg) {
    if (!ok) throw ConfigError(field, msg);
}

OperatorConfig parse_operator(const Reader& r) {
    OperatorConfig op;
    op.nu = r.number("nu", op.nu);
    op.L = r.number("L", op.L);
    op.gamma = r.number("gamma", op.gamma);
    op.dim = static_cast<int>(r.integer("dim", op.dim));
    op.q = r.string("q", op.gamma == 1.0 ? "x" : "power");
    r.reject_unknown();

    require(op.nu > 0.0, r.field("nu"), "nu must be > 0 (got " + std::to_string(op.nu) + ")");
    require(op.L > 0.0, r.field("L"), "L must be > 0");
    require(op.gamma >= 1.0, r.field("gamma"), "gamma must be >= 1");
    require(op.gamma == std::round(op.gamma), r.field("gamma"), "gamma must be an integer");
    require(op.dim == 1 || op.dim >= 3, r.field("dim"), "dim must be 1 or >= 3");
    require(op.q == "x" || op.q == "sin" || op.q == "x+x^3" || op.q == "power", r.field("q"),
            "q must be one of \"x\", \"sin\", \"x+x^3\", \"power\"");
    require(op.q == "power" || op.gamma == 1.0, r.field("gamma"), "gamma != 1 requires q = \"power\"");
    require(op.q == "x" || op.q == "power" || op.dim == 1, r.field("dim"), "a general q requires dim = 1");
    if (op.q == "sin") require(op.L < M_PI, r.field("L"), "q = sin needs L < pi so that q > 0 on (0, L]");
    return op;
}

std::vector<long long> expand_n(const Reader& r) {
    std::vector<long long> out;
    int sources = 0;
    if (r.has("n_list")) {
        ++sources;
        for (double v : r.numbers("n_list")) {
            require(v >= 1 && v == std::floor(v), r.field("n_list"), "entries must be integers >= 1");
            out.push_back(static_cast<long long>(v));
        }
    }
    if (r.has("n_range")) {
        ++sources;
        const auto v = r.numbers("n_range");
        require(v.size() == 2, r.field("n_range"), "must be [lo, hi]");
        require(v[0] >= 1 && v[0] == std::floor(v[0]) && v[1] == std::floor(v[1]) && v[1] >= v[0],
                r.field("n_range"), "must be integers with 1 <= lo <= hi");
        require(v[1] - v[0] < 100000, r.field("n_range"), "range too long");
        for (long long n = static_cast<long long>(v[0]); n <= static_cast<long long>(v[1]); ++n) out.push_back(n);
    }
    if (r.has("n_geometric")) {
        ++sources;
        Reader g(r.raw("n_geometric"), r.field("n_geometric"));
        const double lo = g.number("from", 0), hi = g.number("to", 0);
        const long long count = g.integer("count", 12);
        g.reject_unknown();
        require(lo >= 1, g.field("from"), "must be >= 1");
        require(hi > lo, g.field("to"), "must exceed from");
        require(count >= 2 && count <= 1000, g.field("count"), "must be in [2, 1000]");
        for (long long i = 0; i < count; ++i)
            out.push_back(std::llround(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1))));
    }
    require(sources <= 1, r.field("n_list"), "give only one of n_list, n_range, n_geometric");
    std::sort(out.begin(), out.end());
    require(std::adjacent_find(out.begin(), out.end()) == out.end(), r.field("n_list"), "mode numbers must be distinct");
    return out;
}

void check_experiment(const ExperimentConfig& c) {
    const std::string& e = c.experiment;
    auto need_xi = [&](std::size_t min_count) {
        require(c.modes.xi_list.size() >= min_count, "modes.xi_list",
                "experiment \"" + e + "\" needs at least " + std::to_string(min_count) + " xi values");
    };
    auto need_window = [&] { require(c.window.has_value(), "window", "experiment \"" + e + "\" needs a window [a, b]"); };
    auto need_dim1 = [&] { require(c.op.dim == 1, "operator.dim", "experiment \"" + e + "\" needs dim = 1"); };
    auto need_classical = [&] {
        require(c.op.q == "x", "operator.q", "experiment \"" + e + "\" needs q = \"x\" (gamma = 1)");
    };

    if (e == "eigs") {
        need_xi(1);
        need_dim1();
        require(c.modes.k_max >= 0 && c.modes.k_max <= 20, "modes.k_max", "must be in [0, 20]");
    } else if (e == "kernel") {
        need_xi(1);
        need_window();
        need_classical();
        need_dim1();
        require(c.window->a > 0.0, "window", "a must be > 0");
        require(!c.times.empty(), "time", "kernel needs at least one time");
    } else if (e == "agmon") {
        need_xi(3);
        need_window();
        need_dim1();
        require(c.window->a > 0.0, "window", "a must be > 0");
    } else if (e == "obs-sweep") {
        need_window();
        need_dim1();
        require(c.window->a > 0.0, "window", "a must be > 0");
        require(!c.times.empty(), "time", "obs-sweep needs at least one time");
        require(c.modes.n_list.size() >= 8, "modes.n_range", "obs-sweep needs at least 8 mode numbers");
    } else if (e == "carleman-boundary" || e == "carleman-interior") {
        need_xi(1);
        need_dim1();
        require(c.times.size() == 1, "time", "needs exactly one time T");
        require(c.times[0] <= 3.0, "time", "T must be <= 3 for the away weight");
        for (double xi : c.modes.xi_list)
            require(xi == std::floor(xi), "modes.xi_list", "Fourier modes need integer xi");
        require(c.tolerances.reference_xi == std::floor(c.tolerances.reference_xi), "tolerances.reference_xi",
                "must be an integer mode");
        require(c.modes.datum == "ground" || c.modes.datum == "random" || c.modes.datum == "both", "modes.datum",
                "must be \"ground\", \"random\" or \"both\"");
        if (e == "carleman-interior") {
            need_window();
            require(c.window->a > 0.0 && c.window->b < c.op.L, "window", "needs 0 < a < b < L");
        }
    } else if (e == "gamma-scaling") {
        need_xi(4);
        require(std::is_sorted(c.modes.xi_list.begin(), c.modes.xi_list.end()) &&
                    std::adjacent_find(c.modes.xi_list.begin(), c.modes.xi_list.end()) == c.modes.xi_list.end(),
                "modes.xi_list", "must be strictly increasing");
        require(c.op.q == "power" || c.op.q == "x", "operator.q", "gamma-scaling needs a power-law q");
        need_dim1();
    } else if (e == "generalized-gap") {
        need_xi(3);
        need_dim1();
        if (!c.modes.n_list.empty()) {
            need_window();
            require(c.modes.n_list.size() >= 8, "modes.n_range", "transition search needs at least 8 mode numbers");
        }
    } else if (e == "radial-check") {
        need_xi(1);
        require(c.op.dim >= 3, "operator.dim", "radial-check needs dim >= 3");
        require(c.modes.k_max >= 0 && c.modes.k_max <= 10, "modes.k_max", "must be in [0, 10]");
    }
}

}  // namespace

OperatorSpec OperatorConfig::build() const {
    if (q == "x" || q == "power") return OperatorSpec::make_power_law(nu, L, gamma, dim);
    return OperatorSpec::make_generalized(nu, L, QProfile::from_name(q, gamma));
}

ExperimentConfig parse_config(const json& j) {
    Reader top(j, "");
    ExperimentConfig c;

    require(top.has("experiment"), "experiment", "missing");
    c.experiment = top.string("experiment", "");
    const auto& cat = experiment_catalog();
    require(std::any_of(cat.begin(), cat.end(), [&](const ExperimentInfo& i) { return c.experiment == i.name; }),
            "experiment", "unknown experiment \"" + c.experiment + "\" (see list-experiments)");

    if (top.has("operator")) c.op = parse_operator(Reader(top.raw("operator"), "operator"));

    if (top.has("window")) {
        const auto w = top.numbers("window");
        require(w.size() == 2, "window", "must be [a, b]");
        require(w[0] >= 0.0 && w[0] < w[1] && w[1] <= c.op.L, "window", "needs 0 <= a < b <= L");
        c.window = Interval{w[0], w[1]};
    }

    if (top.has("time")) {
        const json& t = top.raw("time");
        if (t.is_number()) c.times = {t.get<double>()};
        else c.times = top.numbers("time");
        require(!c.times.empty(), "time", "must not be empty");
        for (double v : c.times) require(std::isfinite(v) && v > 0.0, "time", "times must be > 0");
    }

    if (top.has("modes")) {
        Reader m(top.raw("modes"), "modes");
        c.modes.xi_list = m.numbers("xi_list");
        for (double v : c.modes.xi_list) require(std::isfinite(v) && v > 0.0, "modes.xi_list", "xi must be > 0");
        c.modes.n_list = expand_n(m);
        c.modes.k_max = static_cast<int>(m.integer("k_max", c.modes.k_max));
        c.modes.datum = m.string("datum", c.modes.datum);
        c.modes.coefficients = static_cast<int>(m.integer("coefficients", c.modes.coefficients));
        m.reject_unknown();
    }

    if (top.has("resolution")) {
        Reader r(top.raw("resolution"), "resolution");
        auto& s = c.resolution;
        s.n_cells = static_cast<int>(r.integer("n_cells", s.n_cells));
        s.trunc_dim = static_cast<int>(r.integer("trunc_dim", s.trunc_dim));
        s.grading = r.number("grading", s.grading);
        s.shooting_eta = r.number("shooting_eta", s.shooting_eta);
        s.points = static_cast<int>(r.integer("points", s.points));
        s.mehler_terms = static_cast<int>(r.integer("mehler_terms", s.mehler_terms));
        s.stability_check = r.boolean("stability_check", s.stability_check);
        s.gramian = r.boolean("gramian", s.gramian);
        r.reject_unknown();
        require(s.n_cells >= 64 && s.n_cells <= 400000, "resolution.n_cells", "must be in [64, 400000]");
        require(s.trunc_dim >= 1 && s.trunc_dim <= 64, "resolution.trunc_dim", "must be in [1, 64]");
        require(s.grading >= 1.0 && s.grading <= 6.0, "resolution.grading", "must be in [1, 6]");
        require(s.shooting_eta > 0.0 && s.shooting_eta <= 0.05, "resolution.shooting_eta", "must be in (0, 0.05]");
        require(s.points >= 2 && s.points <= 200, "resolution.points", "must be in [2, 200]");
        require(s.mehler_terms >= 1 && s.mehler_terms <= 5000, "resolution.mehler_terms", "must be in [1, 5000]");
    }
    require(c.modes.coefficients >= 1 && c.modes.coefficients <= c.resolution.trunc_dim, "modes.coefficients",
            "must be in [1, resolution.trunc_dim]");

    if (top.has("tolerances")) {
        Reader r(top.raw("tolerances"), "tolerances");
        auto& t = c.tolerances;
        t.rel_tol = r.number("rel_tol", t.rel_tol);
        t.r2_min = r.number("r2_min", t.r2_min);
        t.sigma_margin = r.number("sigma_margin", t.sigma_margin);
        t.bound_tol = r.number("bound_tol", t.bound_tol);
        t.delta = r.number("delta", t.delta);
        t.eps = r.number("eps", t.eps);
        t.reference_xi = r.number("reference_xi", t.reference_xi);
        t.weight_A = r.number("weight_A", t.weight_A);
        r.reject_unknown();
        require(t.rel_tol > 0.0, "tolerances.rel_tol", "must be > 0");
        require(t.r2_min >= 0.0 && t.r2_min <= 1.0, "tolerances.r2_min", "must be in [0, 1]");
        require(t.sigma_margin >= 0.0, "tolerances.sigma_margin", "must be >= 0");
        require(t.bound_tol >= 0.0, "tolerances.bound_tol", "must be >= 0");
        require(t.delta > 0.0 && t.delta < 2.0 / 3.0, "tolerances.delta", "must be in (0, 2/3)");
        require(t.eps > 0.0 && t.eps < 1.0, "tolerances.eps", "must be in (0, 1)");
        require(t.reference_xi > 0.0, "tolerances.reference_xi", "must be > 0");
        require(t.weight_A > 0.0, "tolerances.weight_A", "must be > 0");
    }

    if (top.has("seed")) {
        const json& s = top.raw("seed");
        require(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0), "seed",
                "must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    c.output_dir = top.string("output_dir", c.output_dir);
    require(!c.output_dir.empty(), "output_dir", "must not be empty");
    top.reject_unknown();

    check_experiment(c);
    try {
        (void)c.op.build();
    } catch (const Error& e) {
        throw ConfigError("operator", e.what());
    }
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
        throw ConfigError("", std::string("malformed JSON: ") + e.what(), line);
    }
    return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

json ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["operator"] = {{"nu", op.nu}, {"L", op.L}, {"gamma", op.gamma}, {"dim", op.dim}, {"q", op.q}};
    if (window) j["window"] = {window->a, window->b};
    j["time"] = times;
    j["modes"] = {{"xi_list", modes.xi_list}, {"n_list", modes.n_list}, {"k_max", modes.k_max},
                  {"datum", modes.datum}, {"coefficients", modes.coefficients}};
    const auto& r = resolution;
    j["resolution"] = {{"n_cells", r.n_cells},         {"trunc_dim", r.trunc_dim},
                       {"grading", r.grading},         {"shooting_eta", r.shooting_eta},
                       {"points", r.points},           {"mehler_terms", r.mehler_terms},
                       {"stability_check", r.stability_check}, {"gramian", r.gramian}};
    const auto& t = tolerances;
    j["tolerances"] = {{"rel_tol", t.rel_tol},   {"r2_min", t.r2_min}, {"sigma_margin", t.sigma_margin},
                       {"bound_tol", t.bound_tol}, {"delta", t.delta},   {"eps", t.eps},
                       {"reference_xi", t.reference_xi}, {"weight_A", t.weight_A}};
    j["seed"] = seed;
    return j;
}

}  // namespace grushin::lab
