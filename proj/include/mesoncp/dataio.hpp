// Built-in particle datasets, flat key-value parameter files, and CSV I/O.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "mesoncp/model.hpp"
#include "mesoncp/montecarlo.hpp"
#include "mesoncp/temporal.hpp"

namespace mesoncp {

// A reference observable with its tolerance and the source it was taken from.
struct RefValue {
    double value = 0.0;
    double tolerance = 0.0;
    std::string provenance;
};

struct ParticleDataset {
    std::string name;        // one of "kaon", "Bs", "D"
    MesonParams params;      // m_short = 0, m_long = delta_m (only differences matter)
    std::string time_unit;   // "s" or "ps"; widths/delta_m are in 1/unit
    std::map<std::string, RefValue> reference_values;
};

std::vector<std::string> builtin_dataset_names();

// Hard-coded datasets: kaon (seconds; tau_S = 8.92e-11, tau_L = 5.17e-8,
// delta_m * tau_S = 0.5), Bs and D (picoseconds; from mean width, delta_m and
// the width-splitting fraction y = dGamma/2Gamma, with gamma_short = G(1+y)
// and gamma_long = G(1-y)).
ParticleDataset builtin_dataset(const std::string& name);

// Parameter file: UTF-8 text, one `key = value [unit]` per line, `#` comments.
// Keys: particle, units (s|ps), tau_S|gamma_S, tau_L|gamma_L,
// delta_m|delta_m_times_tau_S. Errors name the offending key and line.
ParticleDataset load_params(const std::string& path);
void save_params(const std::string& path, const ParticleDataset& ds);

// CSV with header `t,value` or `t,value,stderr`, LF endings, shortest
// round-trip float formatting.
void save_series(const std::string& path, const IntensitySeries& series);
IntensitySeries load_series(const std::string& path);

// Event CSV with header `t,sector`.
void save_sample(const std::string& path, const DecaySample& sample);
DecaySample load_sample(const std::string& path);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace mesoncp
