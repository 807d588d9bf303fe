#include "nanosim/events.hpp"

#include "nanosim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace nanosim {

std::int64_t EventSpec::total_width() const {
    std::int64_t w = 0;
    for (const auto& level : levels) w += level.width;
    return w;
}

void EventConfig::validate() const {
    if (numpulses < 1) throw ConfigError("numpulses", "must be >= 1");
    if (!(mincurr >= 0.0)) throw ConfigError("mincurr", "must be >= 0");
    if (!(mincurr <= maxcurr)) throw ConfigError("mincurr", "must not exceed maxcurr");
    if (minpwd < 1) throw ConfigError("minpwd", "must be >= 1");
    if (minpwd > maxpwd) throw ConfigError("minpwd", "must not exceed maxpwd");
    if (!(mixratio >= 0.0 && mixratio <= 1.0)) throw ConfigError("mixratio", "must lie in [0, 1]");
    if (max_levels < 2 || max_levels > static_cast<std::int64_t>(kMaxLevels))
        throw ConfigError("max_levels", "must lie in [2, 4]");
    if (currents.size() != pulsewidths.size())
        throw ConfigError("currents", "currents and pulsewidths must have the same length");
    if (!sequence.empty() && sequence.size() != currents.size())
        throw ConfigError("sequence", "sequence must match the length of currents");
    if (currents.size() > kMaxLevels) throw ConfigError("currents", "at most 4 levels are supported");
    if (currents.size() == 1) throw ConfigError("currents", "a multilevel layout needs >= 2 levels");
    for (double c : currents)
        if (!(c >= 0.0)) throw ConfigError("currents", "level depths must be >= 0");
    for (auto w : pulsewidths)
        if (w < 1) throw ConfigError("pulsewidths", "level widths must be >= 1");
}

void PlacementConfig::validate() const {
    if (!(event_density_factor > 0.0 && event_density_factor <= 100.0))
        throw ConfigError("event_density_factor", "must lie in (0, 100]");
}

std::int64_t multilevel_count(double mixratio, std::int64_t numpulses) {
    return static_cast<std::int64_t>(std::floor(mixratio * static_cast<double>(numpulses) + 0.5));
}

namespace {

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(v[i - 1], v[j]);
    }
}

EventSpec single_level(const EventConfig& cfg, Rng& rng) {
    LevelSpec level;
    level.depth = rng.uniform(cfg.mincurr, cfg.maxcurr);
    level.width = rng.uniform_int(cfg.minpwd, cfg.maxpwd);
    return EventSpec{{std::move(level)}};
}

EventSpec multi_level(const EventConfig& cfg, Rng& rng) {
    EventSpec ev;
    if (!cfg.currents.empty()) {
        for (std::size_t i = 0; i < cfg.currents.size(); ++i) {
            ev.levels.push_back({cfg.currents[i], cfg.pulsewidths[i], cfg.sequence.empty() ? "" : cfg.sequence[i]});
        }
        if (cfg.shuffle) shuffle_in_place(ev.levels, rng);
        return ev;
    }
    const auto count = rng.uniform_int(2, cfg.max_levels);
    for (std::int64_t i = 0; i < count; ++i) {
        LevelSpec level;
        level.depth = rng.uniform(cfg.mincurr, cfg.maxcurr);
        level.width = rng.uniform_int(cfg.minpwd, cfg.maxpwd);
        if (static_cast<std::size_t>(i) < cfg.sequence.size()) level.label = cfg.sequence[i];
        ev.levels.push_back(std::move(level));
    }
    return ev;
}

double draw_gap(GapDistribution dist, Rng& rng) {
    switch (dist) {
        case GapDistribution::exponential:
            return rng.exponential(1.0);
        case GapDistribution::logistic: {
            // Logistic centred on the unit mean gap with scale mean/4, truncated at 0.
            double g;
            do {
                g = rng.logistic(1.0, 0.25);
            } while (g < 0.0);
            return g;
        }
        case GapDistribution::uniform:
            return rng.uniform(0.0, 2.0);
    }
    return 1.0;
}

EventRecord make_record(const EventSpec& ev, std::int64_t start, double baseline) {
    EventRecord r;
    r.start_index = start;
    r.width = ev.total_width();
    r.end_index = start + r.width;
    double weighted = 0.0;
    for (std::size_t k = 0; k < kMaxLevels; ++k) {
        if (k < ev.levels.size()) {
            r.level_currents[k] = baseline - ev.levels[k].depth;
            r.level_widths[k] = ev.levels[k].width;
            // Offsets from the first level keep a single-level mean bit-identical to its level.
            weighted += (ev.levels[k].depth - ev.levels[0].depth) * static_cast<double>(ev.levels[k].width);
        } else {
            r.level_currents[k] = r.level_currents[k - 1];
            r.level_widths[k] = 0;
        }
    }
    r.mean_current = r.level_currents[0] - weighted / static_cast<double>(r.width);
    return r;
}

}  // namespace

std::vector<EventSpec> sample_event_shapes(const EventConfig& cfg, Rng& rng) {
    cfg.validate();
    std::vector<bool> is_multi(static_cast<std::size_t>(cfg.numpulses), false);
    switch (cfg.mode) {
        case EventMode::single:
            break;
        case EventMode::multi:
            std::fill(is_multi.begin(), is_multi.end(), true);
            break;
        case EventMode::mixed: {
            const auto m = multilevel_count(cfg.mixratio, cfg.numpulses);
            for (std::int64_t i = 0; i < m; ++i) is_multi[static_cast<std::size_t>(i)] = true;
            shuffle_in_place(is_multi, rng);
            break;
        }
    }
    std::vector<EventSpec> events;
    events.reserve(is_multi.size());
    for (bool multi : is_multi) events.push_back(multi ? multi_level(cfg, rng) : single_level(cfg, rng));
    return events;
}

std::int64_t trace_length(std::int64_t event_points, double density) {
    return std::llround(static_cast<double>(event_points) * 100.0 / density);
}

CleanSignal place_events(const std::vector<EventSpec>& events, const PlacementConfig& placement, Rng& rng,
                         double baseline) {
    placement.validate();
    if (events.empty()) throw ConfigError("numpulses", "must be >= 1");
    std::int64_t n = 0;
    for (const auto& ev : events) {
        if (ev.levels.empty() || ev.levels.size() > kMaxLevels)
            throw ConfigError("levels", "each event needs between 1 and 4 levels");
        for (const auto& level : ev.levels) {
            if (level.width < 1) throw ConfigError("pulsewidths", "level widths must be >= 1");
            if (!(level.depth >= 0.0)) throw ConfigError("currents", "level depths must be >= 0");
        }
        n += ev.total_width();
    }
    const auto count = static_cast<std::int64_t>(events.size());
    const std::int64_t length = trace_length(n, placement.event_density_factor);
    // Consecutive events are kept at least one sample apart.
    const std::int64_t spare = length - n - (count - 1);
    if (spare < 0)
        throw ConfigError("event_density_factor",
                          "trace of " + std::to_string(length) + " samples cannot hold " + std::to_string(count) +
                              " separated events totalling " + std::to_string(n) + " points");

    std::vector<double> raw(static_cast<std::size_t>(count) + 1);
    for (double& g : raw) g = draw_gap(placement.dist, rng);
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);

    // Cumulative rounding keeps every gap non-negative and the sum exact.
    std::vector<std::int64_t> gaps(raw.size());
    double cumulative = 0.0;
    std::int64_t placed = 0;
    for (std::size_t j = 0; j < raw.size(); ++j) {
        cumulative += raw[j];
        std::int64_t target = spare;
        if (j + 1 < raw.size())
            target = total > 0.0 ? std::llround(static_cast<double>(spare) * cumulative / total) : 0;
        target = std::clamp(target, placed, spare);
        gaps[j] = target - placed;
        placed = target;
    }
    for (std::size_t j = 1; j + 1 < gaps.size(); ++j) gaps[j] += 1;

    CleanSignal out;
    out.samples.assign(static_cast<std::size_t>(length), 0.0);
    out.records.reserve(events.size());
    out.labels.reserve(events.size());
    std::int64_t pos = gaps[0];
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& ev = events[i];
        out.records.push_back(make_record(ev, pos, baseline));
        std::string label;
        for (const auto& level : ev.levels) {
            label += level.label;
            for (std::int64_t k = 0; k < level.width; ++k) out.samples[static_cast<std::size_t>(pos++)] = -level.depth;
        }
        out.labels.push_back(std::move(label));
        pos += gaps[i + 1];
    }
    return out;
}

CleanSignal gen_events(const EventConfig& cfg, const PlacementConfig& placement, Rng& rng, double baseline) {
    placement.validate();
    return place_events(sample_event_shapes(cfg, rng), placement, rng, baseline);
}

const char* to_string(EventMode m) {
    switch (m) {
        case EventMode::single: return "single";
        case EventMode::multi: return "multi";
        case EventMode::mixed: return "mixed";
    }
    return "single";
}

const char* to_string(GapDistribution d) {
    switch (d) {
        case GapDistribution::exponential: return "exponential";
        case GapDistribution::logistic: return "logistic";
        case GapDistribution::uniform: return "uniform";
    }
    return "exponential";
}

EventMode parse_event_mode(const std::string& s) {
    if (s == "single") return EventMode::single;
    if (s == "multi") return EventMode::multi;
    if (s == "mixed") return EventMode::mixed;
    throw ConfigError("multilevel", "expected single, multi or mixed, got '" + s + "'");
}

GapDistribution parse_gap_distribution(const std::string& s) {
    if (s == "exponential" || s == "expon") return GapDistribution::exponential;
    if (s == "logistic" || s == "log") return GapDistribution::logistic;
    if (s == "uniform" || s == "uni") return GapDistribution::uniform;
    throw ConfigError("dist", "expected exponential, logistic or uniform, got '" + s + "'");
}

}  // namespace nanosim
