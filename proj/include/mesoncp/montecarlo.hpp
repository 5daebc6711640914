// Monte Carlo event generation from the decay-time densities, and histogram
// estimation of binned densities from event samples.
#pragma once

#include <cstdint>
#include <vector>

#include "mesoncp/temporal.hpp"

namespace mesoncp {

// Decay events: one (time, CP sector) pair per event. Reproducible from the
// stored seed. `proposals` counts rejection-sampler draws (diagnostics).
struct DecaySample {
    std::vector<double> times;
    std::vector<int> sectors;  // +1 or -1 per event
    std::uint64_t seed = 0;
    std::uint64_t proposals = 0;

    double acceptance_rate() const {
        return proposals == 0 ? 1.0 : static_cast<double>(times.size()) / static_cast<double>(proposals);
    }
};

// Draw n i.i.d. events from the joint density p(t, sector) = |psi_sector(t)|^2:
// the sector comes first from the integrated weights, then the time from the
// conditional density by rejection under a two-exponential envelope whose
// domination follows from the triangle inequality on the amplitudes.
DecaySample sample_decays(const TemporalWaveFunction& w, std::size_t n, std::uint64_t seed);

// Draw n CP=+1 detection times from the normalized standard intensity
// |psi1(t)|^2 (two-pole amplitude with weights (1, eps)); all sectors are +1.
// Same envelope construction and determinism contract as sample_decays.
DecaySample sample_intensity(const MesonParams& p, const Epsilon& e, std::size_t n,
                             std::uint64_t seed);

enum class SectorFilter { All, CpPlus, CpMinus };

// Histogram of event times as a density estimate: count/(n_total * width) per
// bin, with Poisson standard errors (count floored at 1 for the error bar).
// Events outside the edge range land in `n_overflow`, never dropped silently.
struct BinnedDensity {
    IntensitySeries series;  // times = bin centers
    std::vector<double> edges;
    std::size_t n_total = 0;     // events in the input sample (after filtering: n_used)
    std::size_t n_used = 0;      // events inside the edge range
    std::size_t n_overflow = 0;  // events outside the edge range
};

BinnedDensity histogram(const DecaySample& s, SectorFilter filter,
                        const std::vector<double>& bin_edges);

}  // namespace mesoncp
