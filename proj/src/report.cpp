#include "submaslov/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace submaslov {

std::string format_significant(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::string instant_flags(const FocalInstant& in) {
    std::string f;
    auto add = [&](const char* name) {
        if (!f.empty()) f += ';';
        f += name;
    };
    if (in.degenerate) add("degenerate");
    if (in.endpoint) add("endpoint");
    if (in.cluster) add("unresolved-cluster");
    return f;
}

struct Row {
    double t;
    int kernel;
    std::int64_t num, den;
    std::string level, flags;
};

std::vector<Row> collect_rows(const ScenarioResult& result) {
    std::vector<Row> rows;
    auto take = [&](const FocalReport& rep, const char* level) {
        for (const auto& in : rep.instants)
            rows.push_back({in.t, in.kernel_dim, in.contribution.numerator(),
                            in.contribution.denominator(), level, instant_flags(in)});
    };
    take(result.report_base, "base");
    take(result.report_total, "total");
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.level != b.level ? a.level < b.level : a.t < b.t;
    });
    return rows;
}

} // namespace

std::string render_csv(const ScenarioResult& result) {
    std::string out = "t_focal,kernel_dim,contribution_num,contribution_den,level,flags\n";
    for (const auto& r : collect_rows(result)) {
        out += format_significant(r.t);
        out += ',' + std::to_string(r.kernel);
        out += ',' + std::to_string(r.num);
        out += ',' + std::to_string(r.den);
        out += ',' + r.level;
        out += ',' + r.flags;
        out += '\n';
    }
    return out;
}

std::string render_summary(const ScenarioResult& result) {
    std::ostringstream os;
    os << "scenario: " << result.name << "\n";
    os << "mu_Q(gamma) = " << result.mu_total.str() << "\n";
    os << "mu_P(x)     = " << result.mu_base.str() << "\n";
    os << "max verticality of the velocity: " << format_significant(result.max_verticality)
       << "\n";
    os << "projected geodesic residual:     " << format_significant(result.projected_residual)
       << "\n";
    if (result.interval_shortened)
        os << "note: interval shortened to end " << format_significant(result.effective_end)
           << " (patch exit)\n";
    auto list = [&](const char* level, const FocalReport& rep) {
        os << level << " focal instants (" << rep.instants.size() << ")";
        os << ", skipped initial " << format_significant(rep.start_skip) << ":\n";
        for (const auto& in : rep.instants) {
            os << "  t = " << format_significant(in.t) << "  kernel " << in.kernel_dim
               << "  contribution " << in.contribution.str();
            const std::string f = instant_flags(in);
            if (!f.empty()) os << "  [" << f << "]";
            os << "\n";
        }
    };
    list("base", result.report_base);
    list("total", result.report_total);
    if (result.i_base >= 0) {
        os << "causal indices: i(x) = " << result.i_base << ", i(gamma) = " << result.i_total
           << ", omega_n = " << result.counts.omega_n << "\n";
    }
    os << "checks:\n";
    for (const auto& c : result.checks) {
        os << "  " << (c.pass ? "PASS" : "FAIL") << "  " << c.name << " (value "
           << format_significant(c.value) << ", threshold " << format_significant(c.threshold)
           << ")\n";
    }
    os << (result.pass ? "RESULT: PASS" : "RESULT: FAIL") << "\n";
    return os.str();
}

std::string render_json(const ScenarioResult& result) {
    nlohmann::ordered_json j;
    j["scenario"] = result.name;
    j["mu_total"] = {{"num", result.mu_total.numerator()},
                     {"den", result.mu_total.denominator()}};
    j["mu_base"] = {{"num", result.mu_base.numerator()}, {"den", result.mu_base.denominator()}};
    j["max_verticality"] = result.max_verticality;
    j["projected_residual"] = result.projected_residual;
    j["interval_shortened"] = result.interval_shortened;
    j["effective_end"] = result.effective_end;
    auto focal = [&](const FocalReport& rep) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& in : rep.instants) {
            nlohmann::ordered_json o;
            o["t"] = in.t;
            o["kernel_dim"] = in.kernel_dim;
            o["contribution_num"] = in.contribution.numerator();
            o["contribution_den"] = in.contribution.denominator();
            o["flags"] = instant_flags(in);
            arr.push_back(o);
        }
        return arr;
    };
    j["focal_base"] = focal(result.report_base);
    j["focal_total"] = focal(result.report_total);
    if (result.i_base >= 0) {
        j["i_base"] = result.i_base;
        j["i_total"] = result.i_total;
        j["omega"] = result.counts.omega;
        j["omega_delta"] = result.counts.omega_delta;
        j["omega_n"] = result.counts.omega_n;
    }
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : result.checks)
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"value", c.value},
                          {"threshold", c.threshold}});
    j["checks"] = checks;
    j["pass"] = result.pass;
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out) throw Error("short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("cannot rename '" + tmp + "' to '" + path + "'");
}

} // namespace submaslov
