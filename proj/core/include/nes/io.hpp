#pragma once

// File formats shared by the CLI and tests: quote CSV, market/params JSON,
// curve CSV writers, and the run manifest.

#include "nes/calibrate.hpp"
#include "nes/market.hpp"
#include "nes/params.hpp"
#include "nes/pricing.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nes {

// shortest representation that round-trips a double (17 significant digits)
std::string fmt17(double x);

struct MarketInput {
    MarketEnv env;
    double y0 = 0.0;
};

// header: expiry_T,strike,kind,mid,implied_vol  (implied_vol may be empty)
std::vector<OptionQuote> read_quotes_csv(const std::string& path);
void write_quotes_csv(const std::string& path, const std::vector<OptionQuote>& quotes);

// {"spot": ..., "r_f": ..., "q_div": ..., "y0": ...}; y0 defaults to 0
MarketInput read_market_json(const std::string& path);

// {"mu": ...} or {"mu1": ..., "mu2": ...}, plus sigma1, sigma2, a, h, T (T
// defaults to 1)
NesParams read_params_json(const std::string& path);

// columns written side by side under the given header names
void write_curve_csv(const std::string& path, const std::vector<std::string>& headers,
                     const std::vector<std::vector<double>>& columns);

void write_calibration_json(const std::string& path, const CalibrationResult& result);

struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;  // label -> resolved path/value
    std::string tool_version;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
};

// the manifest is the completion marker: callers write every other output
// first and this last
void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace nes
