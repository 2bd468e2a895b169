#include "nes/io.hpp"

#include "nes/version.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nes {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_file(const std::string& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("invalid JSON in " + path + ": " + e.what());
    }
}

double want_number(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_number())
        throw std::invalid_argument(path + ": missing numeric field '" + key + "'");
    return j[key].get<double>();
}

std::vector<std::string> split_csv_line(const std::string& line) {
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

double parse_field(const std::string& s, const std::string& what, size_t lineno) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("quotes CSV line " + std::to_string(lineno) + ": bad " +
                                    what + " value '" + s + "'");
    }
}

}  // namespace

std::vector<OptionQuote> read_quotes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty quotes file");
    auto header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "expiry_T" || header[1] != "strike" ||
        header[2] != "kind" || header[3] != "mid")
        throw std::invalid_argument(path +
                                    ": expected header expiry_T,strike,kind,mid[,implied_vol]");
    std::vector<OptionQuote> quotes;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() < 4)
            throw std::invalid_argument("quotes CSV line " + std::to_string(lineno) +
                                        ": expected at least 4 fields");
        OptionQuote q;
        q.expiry_T = parse_field(f[0], "expiry_T", lineno);
        q.strike = parse_field(f[1], "strike", lineno);
        if (f[2] == "call")
            q.kind = OptionKind::call;
        else if (f[2] == "put")
            q.kind = OptionKind::put;
        else
            throw std::invalid_argument("quotes CSV line " + std::to_string(lineno) +
                                        ": kind must be 'call' or 'put', got '" + f[2] + "'");
        q.mid = parse_field(f[3], "mid", lineno);
        if (f.size() >= 5 && !f[4].empty()) q.implied_vol = parse_field(f[4], "implied_vol", lineno);
        quotes.push_back(q);
    }
    return quotes;
}

void write_quotes_csv(const std::string& path, const std::vector<OptionQuote>& quotes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << "expiry_T,strike,kind,mid,implied_vol\n";
    for (const auto& q : quotes) {
        out << fmt17(q.expiry_T) << ',' << fmt17(q.strike) << ','
            << (q.kind == OptionKind::call ? "call" : "put") << ',' << fmt17(q.mid) << ',';
        if (q.implied_vol) out << fmt17(*q.implied_vol);
        out << '\n';
    }
}

MarketInput read_market_json(const std::string& path) {
    const json j = parse_json_file(path);
    MarketInput m;
    m.env.spot = want_number(j, "spot", path);
    m.env.r_f = want_number(j, "r_f", path);
    m.env.q_div = want_number(j, "q_div", path);
    if (j.contains("y0")) m.y0 = want_number(j, "y0", path);
    validate_market(m.env);
    return m;
}

NesParams read_params_json(const std::string& path) {
    const json j = parse_json_file(path);
    NesParams p;
    if (j.contains("mu")) {
        p.mu1 = want_number(j, "mu", path);
        p.mu2 = -p.mu1;
    } else {
        p.mu1 = want_number(j, "mu1", path);
        p.mu2 = want_number(j, "mu2", path);
    }
    p.sigma1 = want_number(j, "sigma1", path);
    p.sigma2 = want_number(j, "sigma2", path);
    p.a = want_number(j, "a", path);
    p.h = want_number(j, "h", path);
    p.T = j.contains("T") ? want_number(j, "T", path) : 1.0;
    validate_params(p);
    return p;
}

void write_curve_csv(const std::string& path, const std::vector<std::string>& headers,
                     const std::vector<std::vector<double>>& columns) {
    if (headers.size() != columns.size() || columns.empty())
        throw std::invalid_argument("write_curve_csv: header/column mismatch");
    for (const auto& c : columns)
        if (c.size() != columns.front().size())
            throw std::invalid_argument("write_curve_csv: ragged columns");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    for (size_t j = 0; j < headers.size(); ++j)
        out << headers[j] << (j + 1 < headers.size() ? ',' : '\n');
    for (size_t i = 0; i < columns.front().size(); ++i)
        for (size_t j = 0; j < columns.size(); ++j)
            out << fmt17(columns[j][i]) << (j + 1 < columns.size() ? ',' : '\n');
}

namespace {

json params_to_json(const NesParams& p) {
    return json{{"mu1", p.mu1},       {"mu2", p.mu2}, {"sigma1", p.sigma1},
                {"sigma2", p.sigma2}, {"a", p.a},     {"h", p.h},
                {"T", p.T}};
}

}  // namespace

void write_calibration_json(const std::string& path, const CalibrationResult& result) {
    json j;
    j["params"] = params_to_json(result.params);
    j["xi_prime"] = result.xi_prime;
    j["loss"] = result.loss;
    j["mape"] = result.mape;
    j["mape_rel"] = result.mape_rel;
    j["per_quote_errors"] = result.per_quote_errors;
    j["converged"] = result.converged;
    j["starts_summary"] = result.starts_summary;
    j["warnings"] = result.warnings;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

void write_manifest(const std::string& path, const RunManifest& m) {
    json j;
    j["command"] = m.command;
    json inputs = json::object();
    for (const auto& kv : m.inputs) inputs[kv.first] = kv.second;
    j["inputs"] = inputs;
    j["tool_version"] = m.tool_version.empty() ? std::string(NES_VERSION_STRING) : m.tool_version;
    j["seed"] = m.seed;
    j["outputs"] = m.outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace nes
