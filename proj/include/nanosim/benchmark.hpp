#pragma once

#include "nanosim/events.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace nanosim {

/// One event reported by a detector, [start, end) in samples.
struct DetectionRecord {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::int64_t width = 0;
    std::optional<double> amplitude;  ///< nA, depth below baseline

    bool operator==(const DetectionRecord&) const = default;
};

inline constexpr std::int64_t kDefaultTolerance = 10;
inline constexpr std::int64_t kDefaultBinSize = 1024;

struct MatchPair {
    std::size_t truth;
    std::size_t detection;
};

struct MatchResult {
    std::vector<MatchPair> pairs;
    std::vector<std::size_t> unmatched_detections;
    std::vector<std::size_t> missed_truths;
};

/// True when both boundaries of `d` lie within `tol` samples of `t`'s.
bool within_tolerance(const EventRecord& t, const DetectionRecord& d, std::int64_t tol);

/// One-to-one matching under the start/end tolerance rule.
///
/// Truths are visited in increasing start order and take the free compatible
/// detection with the nearest start (then nearest end, then lowest index).
/// Truths left unmatched then try augmenting paths, so the final cardinality is
/// a maximum matching even where tolerance windows of neighbours overlap.
MatchResult match_events(std::span<const EventRecord> truth, std::span<const DetectionRecord> detections,
                         std::int64_t tol = kDefaultTolerance);

struct DetectionRates {
    double true_pct = 0.0;   ///< matched / truth count
    double false_pct = 0.0;  ///< unmatched detections / detection count
    bool no_detections = false;
    bool no_truth = false;
};

DetectionRates detection_rates(const MatchResult& match, std::size_t truth_count, std::size_t detection_count);

/// Indices b of every bin [b*bin_size, (b+1)*bin_size) overlapped by a record.
std::set<std::int64_t> bin_spans(std::span<const EventRecord> records, std::int64_t bin_size = kDefaultBinSize);
std::set<std::int64_t> bin_spans(std::span<const DetectionRecord> records, std::int64_t bin_size = kDefaultBinSize);

struct BinRates {
    double true_pct = 0.0;             ///< truth bins that were predicted
    double false_pct = 0.0;            ///< predicted bins without truth (precision complement)
    double false_positive_rate = 0.0;  ///< predicted bins without truth / all truth-free bins
};

BinRates bin_rates(const std::set<std::int64_t>& truth_bins, const std::set<std::int64_t>& predicted_bins,
                   std::int64_t total_bins);

enum class MpeField { width, amplitude };

/// Mean over matched pairs of 100 |estimate - truth| / |truth|. Truth amplitude
/// is `baseline - mean_current`. Empty when no pair carries the field.
std::optional<double> mean_percent_error(const MatchResult& match, std::span<const EventRecord> truth,
                                         std::span<const DetectionRecord> detections, MpeField field,
                                         double baseline = 0.0);

/// runtimes[program][file] in seconds. Each file's times are divided by that
/// file's fastest program, then averaged per program.
std::map<std::string, double> scaled_runtimes(const std::map<std::string, std::map<std::string, double>>& runtimes);

/// Ground truth expressed as detections, amplitude relative to `baseline`.
std::vector<DetectionRecord> detections_from_truth(std::span<const EventRecord> truth, double baseline);

/// How to read a third-party detections table.
struct ColumnMap {
    std::string start = "start";
    std::string end = "end";
    std::optional<std::string> width;
    std::optional<std::string> amplitude;
    /// When set, the amplitude column holds absolute current and the depth is
    /// baseline - value.
    std::optional<double> amplitude_baseline;
    /// The end column marks the last event sample rather than one past it.
    bool inclusive_end = false;
};

/// Column map that reads an event-details CSV back as detections.
ColumnMap details_column_map(double baseline);

std::vector<DetectionRecord> read_detections_csv(const std::filesystem::path& path, const ColumnMap& map);
void write_detections_csv(std::span<const DetectionRecord> records, const std::filesystem::path& path);

struct FileScore {
    std::string file;
    std::size_t truth_count = 0;
    std::size_t detection_count = 0;
    std::size_t matched = 0;
    DetectionRates rates;
    std::optional<double> mpe_width;
    std::optional<double> mpe_amplitude;
    std::optional<double> runtime_s;
    /// Bin-level scoring only: predicted bins without truth over all truth-free bins.
    std::optional<double> bin_fpr;
};

FileScore score_file(std::string file, std::span<const EventRecord> truth, std::span<const DetectionRecord> detections,
                     double baseline, std::int64_t tol = kDefaultTolerance);

/// Bin-level score for detectors that emit per-bin decisions. Counts are bins,
/// true_pct is bin recall and false_pct the precision complement.
FileScore score_bins(std::string file, std::span<const EventRecord> truth, const std::set<std::int64_t>& predicted_bins,
                     std::int64_t total_bins, std::int64_t bin_size = kDefaultBinSize);

/// Reads a `bin_index,probability` table and keeps bins with probability >= threshold.
/// Without a probability column every listed bin counts as positive.
std::set<std::int64_t> read_detected_bins_csv(const std::filesystem::path& path, double threshold = 0.5);

struct BenchmarkReport {
    std::string program;
    std::vector<FileScore> files;
    double mean_true_pct = 0.0;
    double mean_false_pct = 0.0;
    std::optional<double> mean_mpe_width;
    std::optional<double> mean_mpe_amplitude;
    std::optional<double> mean_runtime_s;
    std::optional<double> mean_scaled_runtime;
    std::optional<double> mean_bin_fpr;
};

/// Fills the aggregate fields from `files`.
BenchmarkReport summarize(std::string program, std::vector<FileScore> files);

nlohmann::json report_to_json(const BenchmarkReport& report);
void write_report_csv(const BenchmarkReport& report, const std::filesystem::path& path);
void write_report_json(const BenchmarkReport& report, const std::filesystem::path& path);
void print_report(const BenchmarkReport& report, std::ostream& os);

}  // namespace nanosim
