#pragma once

#include "nanosim/rng.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace nanosim {

/// Number of per-level columns carried by an event record.
inline constexpr std::size_t kMaxLevels = 4;

/// One blockade level: a current drop of `depth` nA held for `width` samples.
struct LevelSpec {
    double depth = 0.0;
    std::int64_t width = 1;
    std::string label;
};

struct EventSpec {
    std::vector<LevelSpec> levels;

    std::int64_t total_width() const;
    bool multilevel() const { return levels.size() > 1; }
};

/// Ground truth for one placed event. Samples occupy [start_index, end_index).
/// Currents are absolute (baseline minus depth).
struct EventRecord {
    std::int64_t start_index = 0;
    std::int64_t end_index = 0;
    std::int64_t width = 0;
    double mean_current = 0.0;
    std::array<double, kMaxLevels> level_currents{};
    std::array<std::int64_t, kMaxLevels> level_widths{};

    bool operator==(const EventRecord&) const = default;
};

enum class EventMode { single, multi, mixed };
enum class GapDistribution { exponential, logistic, uniform };

struct EventConfig {
    std::int64_t numpulses = 100;
    double mincurr = 1.0;  ///< nA, minimum depth
    double maxcurr = 5.0;  ///< nA, maximum depth
    std::int64_t minpwd = 10;
    std::int64_t maxpwd = 100;
    EventMode mode = EventMode::single;
    double mixratio = 0.31;
    /// Explicit multilevel layout; all non-empty lists must have equal length.
    std::vector<std::string> sequence;
    std::vector<double> currents;
    std::vector<std::int64_t> pulsewidths;
    bool shuffle = false;
    /// Upper bound on the level count of randomly drawn multilevel events.
    std::int64_t max_levels = 4;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

struct PlacementConfig {
    GapDistribution dist = GapDistribution::exponential;
    /// Percent of all samples occupied by events, in (0, 100].
    double event_density_factor = 5.0;

    void validate() const;
};

/// Number of events drawn as multilevel in mixed mode (round half up).
std::int64_t multilevel_count(double mixratio, std::int64_t numpulses);

std::vector<EventSpec> sample_event_shapes(const EventConfig& cfg, Rng& rng);

/// Trace length implied by the density law l = round(n * 100 / d).
std::int64_t trace_length(std::int64_t event_points, double density);

struct CleanSignal {
    std::vector<double> samples;  ///< zero baseline, events at -depth
    std::vector<EventRecord> records;
    std::vector<std::string> labels;  ///< concatenated level labels per event
};

/// Lays events on a zero baseline. `baseline` only shifts the reported record
/// currents; the returned samples stay on the zero baseline.
CleanSignal place_events(const std::vector<EventSpec>& events, const PlacementConfig& placement, Rng& rng,
                         double baseline = 0.0);

CleanSignal gen_events(const EventConfig& cfg, const PlacementConfig& placement, Rng& rng, double baseline = 0.0);

/// Depth of an event relative to `baseline` (width-weighted mean blockade).
inline double record_amplitude(const EventRecord& r, double baseline) { return baseline - r.mean_current; }

const char* to_string(EventMode m);
const char* to_string(GapDistribution d);
EventMode parse_event_mode(const std::string& s);
GapDistribution parse_gap_distribution(const std::string& s);

}  // namespace nanosim
