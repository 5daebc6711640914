#include "mesoncp/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace mesoncp {

std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::vector<std::string> builtin_dataset_names() { return {"kaon", "Bs", "D"}; }

namespace {

ParticleDataset make_kaon() {
    ParticleDataset ds;
    ds.name = "kaon";
    ds.time_unit = "s";
    const double tau_s = 8.92e-11;
    const double tau_l = 5.17e-8;
    ds.params.gamma_short = 1.0 / tau_s;
    ds.params.gamma_long = 1.0 / tau_l;
    ds.params.m_short = 0.0;
    ds.params.m_long = 0.5 / tau_s;  // delta_m * tau_S = 0.5
    ds.reference_values = {
        {"eps_exp_mod", {2.232e-3, 0.007e-3, "PDG kaon average (2008)"}},
        {"eps_exp_arg_deg", {43.5, 0.7, "PDG kaon average (2008)"}},
        {"eps_th_mod", {1.82 / std::sqrt(2.0) * 1e-3, 0.13e-3, "model prediction (renormalized)"}},
        {"eps_th_arg_deg", {46.77, 2.5, "model prediction (renormalized)"}},
        {"eps_th_over_exp", {0.6, 0.04, "model prediction vs PDG"}},
    };
    return ds;
}

ParticleDataset make_bs() {
    ParticleDataset ds;
    ds.name = "Bs";
    ds.time_unit = "ps";
    const double gamma = 1.0 / 1.470;  // mean width, 1/ps
    const double y = 0.069;            // dGamma / (2 Gamma)
    ds.params.gamma_short = gamma * (1.0 + y);
    ds.params.gamma_long = gamma * (1.0 - y);
    ds.params.m_short = 0.0;
    ds.params.m_long = 17.7;  // delta_m, 1/ps
    ds.reference_values = {
        {"q_over_p_exp", {1.0002, 0.0028, "HFAG/PDG B_s average (2008)"}},
        {"a_sl_exp", {-0.4e-3, 5.6e-3, "HFAG/PDG B_s average (2008)"}},
        {"q_over_p_th", {0.96, 0.01, "model prediction (renormalized)"}},
        {"re_eps_th", {0.018, 0.003, "model prediction (renormalized)"}},
    };
    return ds;
}

ParticleDataset make_d() {
    ParticleDataset ds;
    ds.name = "D";
    ds.time_unit = "ps";
    const double gamma = 1.0 / 0.4101;  // mean width, 1/ps
    const double y = 0.37;
    ds.params.gamma_short = gamma * (1.0 + y);
    ds.params.gamma_long = gamma * (1.0 - y);
    ds.params.m_short = 0.0;
    ds.params.m_long = 0.81 * gamma;
    ds.reference_values = {
        {"q_over_p_exp", {0.86, 0.30, "Belle D0 -> KS pi+ pi- (2007)"}},
        {"phi_exp_deg", {-14.0, 18.0, "Belle D0 -> KS pi+ pi- (2007)"}},
        {"q_over_p_th", {0.86, 0.005, "model prediction (renormalized)"}},
        {"phi_th_deg", {-4.02, 0.05, "model prediction (renormalized)"}},
        {"eps_th_re", {0.077, 0.0005, "reference model evaluation"}},
        {"eps_th_im", {0.035, 0.0005, "reference model evaluation"}},
    };
    return ds;
}

}  // namespace

ParticleDataset builtin_dataset(const std::string& name) {
    if (name == "kaon") return make_kaon();
    if (name == "Bs") return make_bs();
    if (name == "D") return make_d();
    std::string names;
    for (const auto& n : builtin_dataset_names()) names += (names.empty() ? "" : ", ") + n;
    throw LookupError("unknown dataset '" + name + "'; available: " + names);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& msg) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& path, int line, const std::string& key,
                    const std::string& token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || token.empty() || !std::isfinite(v))
        parse_fail(path, line, "non-numeric value for key '" + key + "'");
    return v;
}

// A trailing unit annotation must agree with the declared base unit:
// "s"/"ps" on lifetimes, "1/s", "s^-1" etc. on rates.
void check_unit_token(const std::string& path, int line, const std::string& key,
                      const std::string& token, const std::string& base, bool inverse) {
    const std::string plain = base;
    const std::vector<std::string> inv = {"1/" + base, base + "^-1"};
    if (!inverse) {
        if (token != plain) parse_fail(path, line, "unknown unit '" + token + "' for key '" + key + "'");
    } else {
        if (token != inv[0] && token != inv[1])
            parse_fail(path, line, "unknown unit '" + token + "' for key '" + key + "'");
    }
}

}  // namespace

ParticleDataset load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open parameter file '" + path + "'");

    std::map<std::string, std::pair<std::string, int>> raw;          // key -> (value token, line)
    std::map<std::string, std::pair<std::string, int>> unit_tokens;  // key -> (unit token, line)

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(path, lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        std::istringstream rhs(line.substr(eq + 1));
        std::string value, unit, extra;
        rhs >> value >> unit >> extra;
        if (key.empty() || value.empty()) parse_fail(path, lineno, "expected 'key = value'");
        if (!extra.empty()) parse_fail(path, lineno, "trailing tokens after value for key '" + key + "'");
        if (raw.count(key)) parse_fail(path, lineno, "duplicate key '" + key + "'");
        raw[key] = {value, lineno};
        if (!unit.empty()) unit_tokens[key] = {unit, lineno};
    }

    static const std::vector<std::string> known = {
        "particle", "units", "tau_S", "gamma_S", "tau_L", "gamma_L", "delta_m",
        "delta_m_times_tau_S"};
    for (const auto& [key, v] : raw)
        if (std::find(known.begin(), known.end(), key) == known.end())
            parse_fail(path, v.second, "unknown key '" + key + "'");

    auto need = [&](const std::string& key) -> std::pair<std::string, int> {
        auto it = raw.find(key);
        if (it == raw.end()) throw ParseError(path + ": missing required key '" + key + "'");
        return it->second;
    };

    const std::string particle = need("particle").first;
    bool known_particle = false;
    for (const auto& n : builtin_dataset_names()) known_particle |= (n == particle);
    if (!known_particle)
        parse_fail(path, need("particle").second, "unknown particle '" + particle + "'");

    const std::string units = need("units").first;
    if (units != "s" && units != "ps")
        parse_fail(path, need("units").second, "unknown unit '" + units + "' for key 'units'");

    if (unit_tokens.count("particle") || unit_tokens.count("units") ||
        unit_tokens.count("delta_m_times_tau_S")) {
        for (const auto& k : {"particle", "units", "delta_m_times_tau_S"})
            if (unit_tokens.count(k))
                parse_fail(path, unit_tokens[k].second, std::string("unexpected unit on key '") + k + "'");
    }
    for (const auto& [key, tok] : unit_tokens) {
        if (key == "tau_S" || key == "tau_L")
            check_unit_token(path, tok.second, key, tok.first, units, false);
        else if (key == "gamma_S" || key == "gamma_L" || key == "delta_m")
            check_unit_token(path, tok.second, key, tok.first, units, true);
    }

    auto positive_rate = [&](const std::string& rate_key, const std::string& tau_key) {
        const bool has_rate = raw.count(rate_key) != 0;
        const bool has_tau = raw.count(tau_key) != 0;
        if (has_rate == has_tau)
            throw ParseError(path + ": provide exactly one of '" + rate_key + "' and '" + tau_key + "'");
        const auto& [token, lineno2] = has_rate ? raw[rate_key] : raw[tau_key];
        const std::string key = has_rate ? rate_key : tau_key;
        const double v = parse_number(path, lineno2, key, token);
        if (!(v > 0.0)) parse_fail(path, lineno2, key + " must be positive");
        return has_rate ? v : 1.0 / v;
    };

    ParticleDataset ds;
    ds.name = particle;
    ds.time_unit = units;
    ds.params.gamma_short = positive_rate("gamma_S", "tau_S");
    ds.params.gamma_long = positive_rate("gamma_L", "tau_L");

    const bool has_dm = raw.count("delta_m") != 0;
    const bool has_ratio = raw.count("delta_m_times_tau_S") != 0;
    if (has_dm == has_ratio)
        throw ParseError(path + ": provide exactly one of 'delta_m' and 'delta_m_times_tau_S'");
    double dm;
    if (has_dm) {
        const auto& [token, l] = raw["delta_m"];
        dm = parse_number(path, l, "delta_m", token);
        if (dm < 0.0) parse_fail(path, l, "delta_m must be non-negative");
    } else {
        const auto& [token, l] = raw["delta_m_times_tau_S"];
        const double ratio = parse_number(path, l, "delta_m_times_tau_S", token);
        if (ratio < 0.0) parse_fail(path, l, "delta_m_times_tau_S must be non-negative");
        dm = ratio * ds.params.gamma_short;
    }
    ds.params.m_short = 0.0;
    ds.params.m_long = dm;
    ds.params.validate();
    ds.reference_values = builtin_dataset(particle).reference_values;
    return ds;
}

void save_params(const std::string& path, const ParticleDataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    const std::string inv = "1/" + ds.time_unit;
    out << "particle = " << ds.name << "\n";
    out << "units = " << ds.time_unit << "\n";
    out << "gamma_S = " << format_double(ds.params.gamma_short) << " " << inv << "\n";
    out << "gamma_L = " << format_double(ds.params.gamma_long) << " " << inv << "\n";
    out << "delta_m = " << format_double(ds.params.delta_m()) << " " << inv << "\n";
    if (!out) throw ParseError("write failed for '" + path + "'");
}

void save_series(const std::string& path, const IntensitySeries& series) {
    series.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    const bool with_errors = !series.errors.empty();
    out << (with_errors ? "t,value,stderr\n" : "t,value\n");
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        out << format_double(series.times[k]) << "," << format_double(series.values[k]);
        if (with_errors) out << "," << format_double(series.errors[k]);
        out << "\n";
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

IntensitySeries load_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open series file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    bool with_errors;
    if (trim(line) == "t,value")
        with_errors = false;
    else if (trim(line) == "t,value,stderr")
        with_errors = true;
    else
        throw ParseError(path + ":1: expected header 't,value[,stderr]'");

    IntensitySeries s;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cols = split_csv(line);
        if (cols.size() != (with_errors ? 3u : 2u))
            parse_fail(path, lineno, "wrong number of columns");
        s.times.push_back(parse_number(path, lineno, "t", trim(cols[0])));
        s.values.push_back(parse_number(path, lineno, "value", trim(cols[1])));
        if (with_errors) s.errors.push_back(parse_number(path, lineno, "stderr", trim(cols[2])));
    }
    s.validate();
    return s;
}

void save_sample(const std::string& path, const DecaySample& sample) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "t,sector\n";
    for (std::size_t k = 0; k < sample.times.size(); ++k)
        out << format_double(sample.times[k]) << "," << sample.sectors[k] << "\n";
    if (!out) throw ParseError("write failed for '" + path + "'");
}

DecaySample load_sample(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sample file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != "t,sector")
        throw ParseError(path + ":1: expected header 't,sector'");
    DecaySample s;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cols = split_csv(line);
        if (cols.size() != 2) parse_fail(path, lineno, "wrong number of columns");
        const double t = parse_number(path, lineno, "t", trim(cols[0]));
        const std::string sec = trim(cols[1]);
        if (sec != "1" && sec != "+1" && sec != "-1")
            parse_fail(path, lineno, "sector must be +1 or -1");
        if (t < 0.0 || !std::isfinite(t)) parse_fail(path, lineno, "t must be finite and non-negative");
        s.times.push_back(t);
        s.sectors.push_back(sec == "-1" ? -1 : 1);
    }
    return s;
}

}  // namespace mesoncp
