#pragma once

#include "nanosim/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nanosim {

inline constexpr std::size_t kSegmentLength = 1024;

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Bounds from which each training segment's source signal is drawn. Amplitude
/// and width bounds are themselves randomised sub-ranges of these intervals.
struct MlRangeSpec {
    Range depth{0.5, 5.0};      ///< nA
    Range width{5.0, 200.0};    ///< samples
    Range density{0.5, 10.0};   ///< percent
    Range nsigma{2.0, 10.0};
    Range vshift{0.0, 40.0};    ///< nA
    std::int64_t min_events = 2;
    std::int64_t max_events = 8;
    EventMode mode = EventMode::mixed;
    double mixratio = 0.31;
    double sampfreq = 250.0e3;
    bool drift = true;
    double max_drift = 0.5;  ///< nA, sinusoidal drift bound
    /// Source signals drawn per segment before these ranges are declared unsatisfiable.
    int max_attempts = 64;

    void validate() const;
};

struct Segment {
    std::vector<double> current;
    std::vector<double> clean;  ///< zero baseline, events negative
    int label = 0;
    std::uint64_t seed = 0;
    GenerationConfig source;             ///< configuration of the signal the window was cut from
    std::int64_t source_offset = 0;      ///< window start within that signal
    std::vector<EventRecord> events;     ///< source events overlapping the window, source coordinates
};

/// Cuts one window with the requested label out of freshly generated source
/// signals. Label 1 iff the window overlaps at least one event.
Segment make_segment(const MlRangeSpec& spec, int target_label, std::uint64_t seed,
                     std::size_t segment_length = kSegmentLength);

struct SegmentEntry {
    std::string file;
    int label = 0;
    std::uint64_t seed = 0;
};

struct SegmentDatasetManifest {
    std::size_t segment_length = kSegmentLength;
    std::uint64_t seed = 0;
    std::vector<SegmentEntry> entries;
};

/// Balanced label schedule: floor(count / 2) positives, shuffled.
std::vector<int> label_schedule(std::size_t count, std::uint64_t seed);

/// Writes `count` segment CSVs (Time, Current, Clean) and manifest.csv
/// (file,label,seed,segment_length) into `dir`.
SegmentDatasetManifest generate_ml_dataset(const MlRangeSpec& spec, std::size_t count, std::uint64_t seed,
                                           const std::filesystem::path& dir,
                                           std::size_t segment_length = kSegmentLength);

SegmentDatasetManifest read_segment_manifest(const std::filesystem::path& path);

/// Reference benchmark grid.
struct CorpusSpec {
    std::vector<double> densities{0.1, 0.5, 1.0, 5.0, 10.0};
    std::vector<double> nsigmas{3.0, 5.0, 7.0};
    std::vector<double> vshifts{10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0};
    std::int64_t numpulses = 100;
    double depth = 3.0;           ///< nA
    double sampfreq = 250.0e3;
    double rc_coefficient = 0.25; ///< dt / (RC)
    double cutoff = 10.0e3;       ///< Hz
    /// Densities at or above this use the long-width range.
    double long_width_density = 10.0;
    Range short_widths{10, 100};
    Range long_widths{100, 1000};
    OutputColumns columns{false, false, false, true};
    unsigned jobs = 0;  ///< worker threads; 0 = hardware concurrency
};

struct CorpusEntry {
    std::string file;  ///< file stem; signal is <file>.csv
    double density = 0.0;
    double nsigma = 0.0;
    double vshift = 0.0;
    std::uint64_t seed = 0;
};

struct CorpusManifest {
    std::uint64_t seed = 0;
    std::vector<CorpusEntry> entries;
};

std::string corpus_file_stem(double density, double nsigma, double vshift);

/// Generation config of one grid point. Index order is density-major, then
/// nsigma, then vshift; the file seed is derive_seed(master, index).
GenerationConfig corpus_file_config(const CorpusSpec& spec, const CorpusEntry& entry);

/// Grid entries with their derived seeds, in index order.
std::vector<CorpusEntry> corpus_entries(const CorpusSpec& spec, std::uint64_t seed);

/// Writes every signal triple, manifest.csv (file,density,nsigma,vshift,seed)
/// and corpus-settings.txt into `dir`.
CorpusManifest build_benchmark_corpus(const std::filesystem::path& dir, std::uint64_t seed,
                                      const CorpusSpec& spec = {});

CorpusManifest read_corpus_manifest(const std::filesystem::path& path);

}  // namespace nanosim
