#include "nanosim/pipeline.hpp"

#include "nanosim/csv_io.hpp"
#include "nanosim/errors.hpp"

#include <cmath>
#include <system_error>

namespace nanosim {

void GenerationConfig::validate() const {
    if (!(sampfreq > 0.0) || !std::isfinite(sampfreq)) throw ConfigError("sampfreq", "must be > 0");
    if (!std::isfinite(vshift)) throw ConfigError("vshift", "must be finite");
    if (name.empty() || name.find_first_of("/\\") != std::string::npos)
        throw ConfigError("name", "must be a non-empty file stem without path separators");
    events.validate();
    placement.validate();
    if (noise.any_enabled()) {
        noise.validate();
        if (noise.ac && !(sampfreq > 2.0 * kMainsFrequency * noise.n_harmonics))
            throw ConfigError("sampfreq", "must exceed the Nyquist rate of the highest AC harmonic");
    }
    filters.validate(sampfreq);
    drift.validate();
}

GenerationResult assemble(const GenerationConfig& cfg) {
    cfg.validate();
    GenerationResult result;
    auto& b = result.bundle;
    b.sampfreq = cfg.sampfreq;

    Rng event_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(Stream::events)));
    auto clean = gen_events(cfg.events, cfg.placement, event_rng, cfg.vshift);
    result.records = std::move(clean.records);
    result.labels = std::move(clean.labels);
    b.clean = std::move(clean.samples);
    const std::size_t n = b.clean.size();

    b.filtered = cfg.filters.rc_enabled
                     ? rc_filter(b.clean, cfg.filters.resistance, cfg.filters.capacitance, cfg.sampfreq)
                     : b.clean;
    if (cfg.filters.lpf_enabled) b.filtered = gaussian_lowpass(b.filtered, cfg.filters.cutoff, cfg.sampfreq);

    if (cfg.noise.any_enabled()) {
        std::vector<double> amplitudes;
        amplitudes.reserve(result.records.size());
        for (const auto& r : result.records) amplitudes.push_back(record_amplitude(r, cfg.vshift));
        Rng noise_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(Stream::noise)));
        b.noise = compose_noise(b.clean, cfg.noise, amplitudes, cfg.sampfreq, noise_rng);
    } else {
        b.noise.assign(n, 0.0);
    }

    b.drift.assign(n, 0.0);
    Rng drift_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(Stream::drift)));
    if (cfg.drift.sinusoidal) {
        const auto s = sinusoidal_drift(n, cfg.drift.numconcs, cfg.drift.maxamp, drift_rng, cfg.drift.max_harmonic);
        for (std::size_t i = 0; i < n; ++i) b.drift[i] += s[i];
    }
    if (cfg.drift.abrupt) {
        const auto a = abrupt_drift(n, cfg.drift.nstepwins, cfg.drift.driftmaxmag, cfg.drift.maxnsteps, drift_rng);
        for (std::size_t i = 0; i < n; ++i) b.drift[i] += a[i];
    }

    b.time.resize(n);
    b.final.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        b.time[i] = static_cast<double>(i) / cfg.sampfreq;
        b.final[i] = b.filtered[i] + b.noise[i] + b.drift[i] + cfg.vshift;
    }
    return result;
}

GenerationFiles output_paths(const std::filesystem::path& dir, const std::string& name) {
    return {dir / (name + ".csv"), dir / (name + "-details.csv"), dir / (name + "-params.txt")};
}

GenerationFiles run_generation(const GenerationConfig& cfg, const std::filesystem::path& dir,
                               GenerationResult* result_out) {
    auto result = assemble(cfg);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());
    const auto files = output_paths(dir, cfg.name);
    write_signal_csv(result.bundle, cfg.columns, files.signal);
    write_event_details_csv(result.records, files.details);
    write_param_log(cfg, files.params);
    if (result_out) *result_out = std::move(result);
    return files;
}

}  // namespace nanosim
