#pragma once

#include "nanosim/drift.hpp"
#include "nanosim/events.hpp"
#include "nanosim/filters.hpp"
#include "nanosim/noise.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nanosim {

/// Optional component columns of the signal CSV, after Time and Current.
struct OutputColumns {
    bool clean = false;
    bool filtered = false;
    bool drift = false;
    bool noise = false;
};

/// Every knob of one generation run. Noise is off when all of its components
/// are disabled; drift is off unless one of the drifters is enabled.
struct GenerationConfig {
    EventConfig events;
    PlacementConfig placement;
    NoiseConfig noise;
    FilterConfig filters;
    DriftConfig drift;
    double vshift = 0.0;        ///< nA, open-pore baseline
    double sampfreq = 250.0e3;  ///< Hz
    OutputColumns columns;
    std::uint64_t seed = 0;
    std::string name = "signal";

    void validate() const;
};

/// All arrays share one length; final = filtered + noise + drift + vshift.
struct SignalBundle {
    double sampfreq = 0.0;
    std::vector<double> time;
    std::vector<double> final;
    std::vector<double> clean;
    std::vector<double> filtered;
    std::vector<double> drift;
    std::vector<double> noise;

    std::size_t size() const { return final.size(); }
};

struct GenerationResult {
    SignalBundle bundle;
    std::vector<EventRecord> records;
    std::vector<std::string> labels;
};

/// Stream indices for derive_seed(); each stage draws from its own generator so
/// toggling one stage leaves the others' random draws unchanged.
enum class Stream : std::uint64_t { events = 1, noise = 2, drift = 3 };

/// events -> RC -> Gaussian low-pass, then noise, drift and vshift are added.
GenerationResult assemble(const GenerationConfig& cfg);

struct GenerationFiles {
    std::filesystem::path signal;
    std::filesystem::path details;
    std::filesystem::path params;
};

GenerationFiles output_paths(const std::filesystem::path& dir, const std::string& name);

/// assemble() followed by the three writers. Shared by the CLI and the service.
GenerationFiles run_generation(const GenerationConfig& cfg, const std::filesystem::path& dir,
                               GenerationResult* result_out = nullptr);

}  // namespace nanosim
