#include "submaslov/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace submaslov {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& value, int line) {
    std::vector<double> out;
    std::istringstream is(value);
    std::string tok;
    while (is >> tok) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("expected a number, got '" + tok + "'", line);
        }
    }
    if (out.empty()) throw ConfigError("expected at least one number", line);
    return out;
}

double parse_one_number(const std::string& value, int line) {
    const auto v = parse_numbers(value, line);
    if (v.size() != 1) throw ConfigError("expected a single number", line);
    return v[0];
}

Vector to_vector(const std::vector<double>& v) {
    Vector out(std::ptrdiff_t(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(std::ptrdiff_t(i)) = v[i];
    return out;
}

// "g[i][j]" → (i, j)
bool parse_indexed(const std::string& key, const std::string& prefix, int& i, int& j) {
    if (key.rfind(prefix + "[", 0) != 0) return false;
    int a = -1, b = -1;
    if (std::sscanf(key.c_str() + prefix.size(), "[%d][%d]", &a, &b) != 2) return false;
    i = a;
    j = b;
    return true;
}

bool parse_indexed1(const std::string& key, const std::string& prefix, int& i) {
    if (key.rfind(prefix + "[", 0) != 0) return false;
    int a = -1;
    char tail = 0;
    if (std::sscanf(key.c_str() + prefix.size(), "[%d%c", &a, &tail) != 2 || tail != ']')
        return false;
    i = a;
    return true;
}

} // namespace

SubmersionSpec CustomSpec::build() const {
    SubmersionSpec spec;
    const int n = total_dim, m = base_dim;
    spec.total.dim = n;
    spec.total.index = total_index;
    auto g_exprs = g;
    spec.total.eval = [g_exprs, n](const Vector& x) {
        Matrix out(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out(i, j) = g_exprs[std::size_t(i)][std::size_t(j)].eval(x);
        return Matrix(0.5 * (out + out.transpose()));
    };
    spec.base.dim = m;
    spec.base.index = base_index;
    auto h_exprs = h;
    spec.base.eval = [h_exprs, m](const Vector& x) {
        Matrix out(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                out(i, j) = h_exprs[std::size_t(i)][std::size_t(j)].eval(x);
        return Matrix(0.5 * (out + out.transpose()));
    };
    auto proj_exprs = proj;
    spec.proj = [proj_exprs, m](const Vector& x) {
        Vector out(m);
        for (int i = 0; i < m; ++i) out(i) = proj_exprs[std::size_t(i)].eval(x);
        return out;
    };
    return spec;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line = 0;
    bool saw_scenario = false;

    struct CustomRaw {
        int total_dim = -1, base_dim = -1, total_index = 0, base_index = 0;
        std::map<std::pair<int, int>, std::pair<std::string, int>> g, h;
        std::map<int, std::pair<std::string, int>> proj;
    } craw;
    bool has_custom_section = false;

    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("malformed section header", line);
            section = trim(s.substr(1, s.size() - 2));
            if (section != "seed" && section != "boundary" && section != "tolerances" &&
                section != "output" && section != "custom" && section != "fuzz")
                throw ConfigError("unknown section [" + section + "]", line);
            if (section == "custom") has_custom_section = true;
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (value.empty()) throw ConfigError("empty value for '" + key + "'", line);

        if (section.empty()) {
            if (key == "scenario") {
                cfg.scenario = value;
                saw_scenario = true;
            } else {
                throw ConfigError("unknown top-level key '" + key + "'", line);
            }
        } else if (section == "seed") {
            if (key == "point") cfg.point = to_vector(parse_numbers(value, line));
            else if (key == "velocity") cfg.velocity = to_vector(parse_numbers(value, line));
            else if (key == "interval") {
                const auto v = parse_numbers(value, line);
                if (v.size() != 2 || !(v[0] < v[1]))
                    throw ConfigError("interval must be 'a b' with a < b", line);
                cfg.interval = {v[0], v[1]};
            } else if (key == "steps") {
                cfg.steps = int(parse_one_number(value, line));
                if (cfg.steps < 8) throw ConfigError("steps must be at least 8", line);
            } else {
                throw ConfigError("unknown [seed] key '" + key + "'", line);
            }
        } else if (section == "boundary") {
            int bi = 0;
            if (key == "type") {
                if (value != "point" && value != "frame")
                    throw ConfigError("boundary type must be 'point' or 'frame'", line);
                cfg.boundary_type = value;
            } else if (parse_indexed1(key, "tangent", bi)) {
                const auto v = parse_numbers(value, line);
                if (cfg.boundary_tangent.cols() <= bi) {
                    Matrix grown = Matrix::Zero(std::ptrdiff_t(v.size()), bi + 1);
                    grown.leftCols(cfg.boundary_tangent.cols()) = cfg.boundary_tangent;
                    cfg.boundary_tangent = grown;
                }
                if (cfg.boundary_tangent.rows() != std::ptrdiff_t(v.size()))
                    throw ConfigError("tangent vectors must share a dimension", line);
                cfg.boundary_tangent.col(bi) = to_vector(v);
            } else if (key == "shape") {
                const auto v = parse_numbers(value, line);
                const int q = int(std::lround(std::sqrt(double(v.size()))));
                if (q * q != int(v.size()))
                    throw ConfigError("shape must be a square matrix, row-major", line);
                cfg.boundary_shape = Matrix(q, q);
                for (int i = 0; i < q; ++i)
                    for (int j = 0; j < q; ++j)
                        cfg.boundary_shape(i, j) = v[std::size_t(i * q + j)];
            } else {
                throw ConfigError("unknown [boundary] key '" + key + "'", line);
            }
        } else if (section == "tolerances") {
            const double v = parse_one_number(value, line);
            if (v <= 0) throw ConfigError("tolerances must be positive", line);
            if (key == "horizontality_tol") cfg.verify.horizontality_tol = v;
            else if (key == "projected_residual_tol") cfg.verify.projected_residual_tol = v;
            else if (key == "flow_drift_tol") cfg.verify.flow_drift_tol = v;
            else if (key == "instant_match_tol") cfg.verify.instant_match_tol = v;
            else if (key == "crossing_sigma") cfg.verify.qopts.crossing_sigma = v;
            else if (key == "t_tol_factor") cfg.verify.qopts.t_tol_factor = v;
            else throw ConfigError("unknown [tolerances] key '" + key + "'", line);
        } else if (section == "output") {
            if (key == "csv") cfg.csv_path = value;
            else if (key == "summary") cfg.summary_path = value;
            else if (key == "json") cfg.json_path = value;
            else throw ConfigError("unknown [output] key '" + key + "'", line);
        } else if (section == "fuzz") {
            if (key == "case_seed") cfg.fuzz_case_seed = std::uint64_t(parse_one_number(value, line));
            else if (key == "steps") cfg.fuzz_steps = int(parse_one_number(value, line));
            else throw ConfigError("unknown [fuzz] key '" + key + "'", line);
        } else if (section == "custom") {
            int i = 0, j = 0;
            if (key == "total_dim") craw.total_dim = int(parse_one_number(value, line));
            else if (key == "base_dim") craw.base_dim = int(parse_one_number(value, line));
            else if (key == "total_index") craw.total_index = int(parse_one_number(value, line));
            else if (key == "base_index") craw.base_index = int(parse_one_number(value, line));
            else if (parse_indexed(key, "g", i, j)) craw.g[{i, j}] = {value, line};
            else if (parse_indexed(key, "h", i, j)) craw.h[{i, j}] = {value, line};
            else if (parse_indexed1(key, "proj", i)) craw.proj[i] = {value, line};
            else throw ConfigError("unknown [custom] key '" + key + "'", line);
        }
    }

    if (!saw_scenario) throw ConfigError("missing 'scenario' key");
    if (cfg.scenario == "custom") {
        if (!has_custom_section) throw ConfigError("scenario 'custom' needs a [custom] section");
        if (craw.total_dim < 1 || craw.base_dim < 1 || craw.base_dim >= craw.total_dim)
            throw ConfigError("custom: need 1 <= base_dim < total_dim");
        CustomSpec cs;
        cs.total_dim = craw.total_dim;
        cs.base_dim = craw.base_dim;
        cs.total_index = craw.total_index;
        cs.base_index = craw.base_index;
        auto fetch = [&](auto& store, int i, int j, const char* what, int dim) {
            auto it = store.find(std::make_pair(std::min(i, j), std::max(i, j)));
            if (it == store.end()) it = store.find(std::make_pair(i, j));
            if (it == store.end())
                throw ConfigError(std::string("custom: missing ") + what + "[" +
                                  std::to_string(std::min(i, j)) + "][" +
                                  std::to_string(std::max(i, j)) + "]");
            return Expression::parse(it->second.first, dim);
        };
        cs.g.resize(std::size_t(cs.total_dim));
        for (int i = 0; i < cs.total_dim; ++i)
            for (int j = 0; j < cs.total_dim; ++j)
                cs.g[std::size_t(i)].push_back(fetch(craw.g, i, j, "g", cs.total_dim));
        cs.h.resize(std::size_t(cs.base_dim));
        for (int i = 0; i < cs.base_dim; ++i)
            for (int j = 0; j < cs.base_dim; ++j)
                cs.h[std::size_t(i)].push_back(fetch(craw.h, i, j, "h", cs.base_dim));
        for (int i = 0; i < cs.base_dim; ++i) {
            auto it = craw.proj.find(i);
            if (it == craw.proj.end())
                throw ConfigError("custom: missing proj[" + std::to_string(i) + "]");
            cs.proj.push_back(Expression::parse(it->second.first, cs.total_dim));
        }
        cfg.custom = std::move(cs);
        if (!cfg.point || !cfg.velocity || !cfg.interval)
            throw ConfigError("custom scenario needs [seed] point, velocity and interval");
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

Scenario RunConfig::instantiate() const {
    Scenario sc;
    if (custom) {
        sc.name = "custom";
        sc.spec = custom->build();
        sc.seed.x0 = *point;
        sc.seed.v0 = *velocity;
        sc.seed.a = interval->first;
        sc.seed.b = interval->second;
        sc.seed.steps = steps;
        sc.base_P.point = sc.spec.proj(sc.seed.x0);
        sc.base_P.tangent_frame = Matrix(sc.spec.base.dim, 0);
        sc.base_P.shape_form = Matrix(0, 0);
    } else if (scenario == "fuzz-stationary") {
        sc = random_stationary_scenario(fuzz_case_seed, fuzz_steps);
    } else {
        sc = builtin_scenario(scenario, steps);
        if (point) sc.seed.x0 = *point;
        if (velocity) sc.seed.v0 = *velocity;
        if (interval) {
            sc.seed.a = interval->first;
            sc.seed.b = interval->second;
        }
        sc.seed.steps = steps;
        if (point) {
            sc.base_P.point = sc.spec.proj(sc.seed.x0);
        }
    }
    if (sc.seed.x0.size() != sc.spec.total.dim || sc.seed.v0.size() != sc.spec.total.dim)
        throw ConfigError("seed dimension does not match the scenario (expected " +
                          std::to_string(sc.spec.total.dim) + " coordinates)");
    if (boundary_type == "frame") {
        if (boundary_tangent.rows() != sc.spec.base.dim)
            throw ConfigError("boundary tangent vectors must live in the base (dimension " +
                              std::to_string(sc.spec.base.dim) + ")");
        const int q = int(boundary_tangent.cols());
        if (boundary_shape.rows() != q)
            throw ConfigError("boundary shape must be " + std::to_string(q) + "x" +
                              std::to_string(q));
        sc.base_P.tangent_frame = boundary_tangent;
        sc.base_P.shape_form = boundary_shape;
    }
    // expressions must evaluate at the seed point
    if (custom) {
        try {
            sc.spec.total.at(sc.seed.x0);
            sc.spec.base.at(sc.spec.proj(sc.seed.x0));
        } catch (const Error& e) {
            throw ConfigError(std::string("custom metric invalid at the seed point: ") + e.what());
        }
    }
    return sc;
}

void apply_env_overrides(RunConfig& cfg) {
    auto get = [](const char* name) -> std::optional<double> {
        const char* v = std::getenv(name);
        if (!v) return std::nullopt;
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw ConfigError(std::string("environment variable ") + name + " is not a number");
        }
    };
    if (auto v = get("SUBMASLOV_HORIZONTALITY_TOL")) cfg.verify.horizontality_tol = *v;
    if (auto v = get("SUBMASLOV_PROJECTED_RESIDUAL_TOL")) cfg.verify.projected_residual_tol = *v;
    if (auto v = get("SUBMASLOV_FLOW_DRIFT_TOL")) cfg.verify.flow_drift_tol = *v;
    if (auto v = get("SUBMASLOV_INSTANT_MATCH_TOL")) cfg.verify.instant_match_tol = *v;
    if (auto v = get("SUBMASLOV_CROSSING_SIGMA")) cfg.verify.qopts.crossing_sigma = *v;
    if (auto v = get("SUBMASLOV_T_TOL_FACTOR")) cfg.verify.qopts.t_tol_factor = *v;
}

} // namespace submaslov
