#include "nanosim/benchmark.hpp"

#include "nanosim/csv_io.hpp"
#include "nanosim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numeric>

namespace nanosim {

bool within_tolerance(const EventRecord& t, const DetectionRecord& d, std::int64_t tol) {
    return std::llabs(d.start - t.start_index) <= tol && std::llabs(d.end - t.end_index) <= tol;
}

namespace {

template <typename T, typename Key>
std::vector<std::size_t> order_by(std::span<const T> items, Key key) {
    std::vector<std::size_t> idx(items.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(items[a]) < key(items[b]); });
    return idx;
}

struct Matcher {
    std::vector<std::vector<std::size_t>> candidates;  // per truth, detection indices in preference order
    std::vector<long> truth_of;                        // per detection, matched truth or -1
    std::vector<long> detection_of;                    // per truth
    std::vector<char> visited;

    bool augment(std::size_t t) {
        for (std::size_t d : candidates[t]) {
            if (visited[d]) continue;
            visited[d] = 1;
            if (truth_of[d] < 0 || augment(static_cast<std::size_t>(truth_of[d]))) {
                truth_of[d] = static_cast<long>(t);
                detection_of[t] = static_cast<long>(d);
                return true;
            }
        }
        return false;
    }
};

}  // namespace

MatchResult match_events(std::span<const EventRecord> truth, std::span<const DetectionRecord> detections,
                         std::int64_t tol) {
    const auto truth_order = order_by(truth, [](const EventRecord& r) { return r.start_index; });
    const auto det_order = order_by(detections, [](const DetectionRecord& d) { return d.start; });
    std::vector<std::int64_t> det_starts;
    det_starts.reserve(det_order.size());
    for (auto i : det_order) det_starts.push_back(detections[i].start);

    Matcher m;
    m.candidates.resize(truth.size());
    m.truth_of.assign(detections.size(), -1);
    m.detection_of.assign(truth.size(), -1);
    for (std::size_t t = 0; t < truth.size(); ++t) {
        const auto& tr = truth[t];
        auto lo = std::lower_bound(det_starts.begin(), det_starts.end(), tr.start_index - tol);
        auto hi = std::upper_bound(det_starts.begin(), det_starts.end(), tr.start_index + tol);
        auto& cands = m.candidates[t];
        for (auto it = lo; it != hi; ++it) {
            const auto d = det_order[static_cast<std::size_t>(it - det_starts.begin())];
            if (within_tolerance(tr, detections[d], tol)) cands.push_back(d);
        }
        std::sort(cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
            const auto ka = std::make_tuple(std::llabs(detections[a].start - tr.start_index),
                                            std::llabs(detections[a].end - tr.end_index), a);
            const auto kb = std::make_tuple(std::llabs(detections[b].start - tr.start_index),
                                            std::llabs(detections[b].end - tr.end_index), b);
            return ka < kb;
        });
    }

    // Greedy pass.
    for (auto t : truth_order) {
        for (auto d : m.candidates[t]) {
            if (m.truth_of[d] < 0) {
                m.truth_of[d] = static_cast<long>(t);
                m.detection_of[t] = static_cast<long>(d);
                break;
            }
        }
    }
    // Augmenting-path repair (Kuhn); each free truth needs one attempt.
    m.visited.assign(detections.size(), 0);
    for (auto t : truth_order) {
        if (m.detection_of[t] >= 0 || m.candidates[t].empty()) continue;
        std::fill(m.visited.begin(), m.visited.end(), 0);
        m.augment(t);
    }

    MatchResult result;
    for (auto t : truth_order) {
        if (m.detection_of[t] >= 0)
            result.pairs.push_back({t, static_cast<std::size_t>(m.detection_of[t])});
        else
            result.missed_truths.push_back(t);
    }
    for (auto d : det_order)
        if (m.truth_of[d] < 0) result.unmatched_detections.push_back(d);
    return result;
}

DetectionRates detection_rates(const MatchResult& match, std::size_t truth_count, std::size_t detection_count) {
    DetectionRates r;
    r.no_truth = truth_count == 0;
    r.no_detections = detection_count == 0;
    r.true_pct = r.no_truth ? 0.0 : 100.0 * static_cast<double>(match.pairs.size()) / static_cast<double>(truth_count);
    r.false_pct = r.no_detections ? 0.0
                                  : 100.0 * static_cast<double>(match.unmatched_detections.size()) /
                                        static_cast<double>(detection_count);
    return r;
}

namespace {

void add_bins(std::set<std::int64_t>& bins, std::int64_t start, std::int64_t end, std::int64_t bin_size) {
    if (end <= start) return;
    const auto floor_div = [](std::int64_t a, std::int64_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
    const auto first = floor_div(start, bin_size);
    const auto last = floor_div(end - 1, bin_size);
    for (auto b = first; b <= last; ++b) bins.insert(b);
}

}  // namespace

std::set<std::int64_t> bin_spans(std::span<const EventRecord> records, std::int64_t bin_size) {
    if (bin_size < 1) throw ConfigError("bin_size", "must be >= 1");
    std::set<std::int64_t> bins;
    for (const auto& r : records) add_bins(bins, r.start_index, r.end_index, bin_size);
    return bins;
}

std::set<std::int64_t> bin_spans(std::span<const DetectionRecord> records, std::int64_t bin_size) {
    if (bin_size < 1) throw ConfigError("bin_size", "must be >= 1");
    std::set<std::int64_t> bins;
    for (const auto& r : records) add_bins(bins, r.start, r.end, bin_size);
    return bins;
}

BinRates bin_rates(const std::set<std::int64_t>& truth_bins, const std::set<std::int64_t>& predicted_bins,
                   std::int64_t total_bins) {
    std::size_t hit = 0;
    for (auto b : predicted_bins) hit += truth_bins.count(b);
    const std::size_t false_bins = predicted_bins.size() - hit;
    BinRates r;
    if (!truth_bins.empty()) r.true_pct = 100.0 * static_cast<double>(hit) / static_cast<double>(truth_bins.size());
    if (!predicted_bins.empty())
        r.false_pct = 100.0 * static_cast<double>(false_bins) / static_cast<double>(predicted_bins.size());
    const auto negatives = total_bins - static_cast<std::int64_t>(truth_bins.size());
    if (negatives > 0) r.false_positive_rate = 100.0 * static_cast<double>(false_bins) / static_cast<double>(negatives);
    return r;
}

std::optional<double> mean_percent_error(const MatchResult& match, std::span<const EventRecord> truth,
                                         std::span<const DetectionRecord> detections, MpeField field,
                                         double baseline) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& p : match.pairs) {
        const auto& t = truth[p.truth];
        const auto& d = detections[p.detection];
        double expected, estimate;
        if (field == MpeField::width) {
            expected = static_cast<double>(t.width);
            estimate = static_cast<double>(d.width);
        } else {
            if (!d.amplitude) continue;
            expected = record_amplitude(t, baseline);
            estimate = *d.amplitude;
        }
        if (expected == 0.0) continue;
        sum += 100.0 * std::fabs(estimate - expected) / std::fabs(expected);
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

std::map<std::string, double> scaled_runtimes(
    const std::map<std::string, std::map<std::string, double>>& runtimes) {
    std::set<std::string> files;
    for (const auto& [program, per_file] : runtimes)
        for (const auto& [file, t] : per_file) files.insert(file);
    std::string missing;
    for (const auto& [program, per_file] : runtimes)
        for (const auto& file : files)
            if (!per_file.count(file)) missing += (missing.empty() ? "" : ", ") + program + "/" + file;
    if (!missing.empty()) throw ConfigError("runtimes", "missing runtime entries: " + missing);

    std::map<std::string, double> result;
    if (files.empty()) return result;
    for (const auto& [program, per_file] : runtimes) result[program] = 0.0;
    for (const auto& file : files) {
        double fastest = std::numeric_limits<double>::infinity();
        for (const auto& [program, per_file] : runtimes) fastest = std::min(fastest, per_file.at(file));
        if (!(fastest > 0.0)) throw ConfigError("runtimes", "non-positive runtime for file " + file);
        for (const auto& [program, per_file] : runtimes) result[program] += per_file.at(file) / fastest;
    }
    for (auto& [program, total] : result) total /= static_cast<double>(files.size());
    return result;
}

std::vector<DetectionRecord> detections_from_truth(std::span<const EventRecord> truth, double baseline) {
    std::vector<DetectionRecord> out;
    out.reserve(truth.size());
    for (const auto& t : truth) out.push_back({t.start_index, t.end_index, t.width, record_amplitude(t, baseline)});
    return out;
}

ColumnMap details_column_map(double baseline) {
    ColumnMap map;
    map.start = std::string(kDetailsHeader[0]);
    map.end = std::string(kDetailsHeader[1]);
    map.width = std::string(kDetailsHeader[2]);
    map.amplitude = std::string(kDetailsHeader[3]);
    map.amplitude_baseline = baseline;
    return map;
}

std::vector<DetectionRecord> read_detections_csv(const std::filesystem::path& path, const ColumnMap& map) {
    const auto table = read_csv(path);
    auto require = [&](const std::string& name) {
        const int idx = table.find(name);
        if (idx < 0) throw ParseError(path.string() + ": cannot map column '" + name + "'");
        return static_cast<std::size_t>(idx);
    };
    const auto start_col = require(map.start);
    const auto end_col = require(map.end);
    const std::optional<std::size_t> width_col = map.width ? std::optional(require(*map.width)) : std::nullopt;
    const std::optional<std::size_t> amp_col = map.amplitude ? std::optional(require(*map.amplitude)) : std::nullopt;

    std::vector<DetectionRecord> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto row_error = [&](const std::string& what) {
            return ParseError(path.string() + ": row " + std::to_string(i + 1) + ": " + what);
        };
        auto integral = [&](std::size_t col, const std::string& name) {
            const auto v = parse_number(row[col]);
            if (!v || *v != std::floor(*v)) throw row_error("malformed " + name + " '" + row[col] + "'");
            return static_cast<std::int64_t>(*v);
        };
        DetectionRecord d;
        d.start = integral(start_col, "start");
        d.end = integral(end_col, "end");
        if (map.inclusive_end) d.end += 1;
        d.width = width_col ? integral(*width_col, "width") : d.end - d.start;
        if (amp_col) {
            const auto v = parse_number(row[*amp_col]);
            if (!v) throw row_error("malformed amplitude '" + row[*amp_col] + "'");
            d.amplitude = map.amplitude_baseline ? *map.amplitude_baseline - *v : *v;
        }
        if (d.end < d.start) throw row_error("end precedes start");
        if (d.width <= 0) throw row_error("width must be positive");
        out.push_back(d);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    return out;
}

void write_detections_csv(std::span<const DetectionRecord> records, const std::filesystem::path& path) {
    TextWriter out(path);
    out.put("start,end,width,amplitude\n");
    for (const auto& d : records) {
        out.put_integer(d.start).put(',').put_integer(d.end).put(',').put_integer(d.width).put(',');
        if (d.amplitude) out.put_number(*d.amplitude);
        out.put('\n');
    }
    out.close();
}

FileScore score_file(std::string file, std::span<const EventRecord> truth, std::span<const DetectionRecord> detections,
                     double baseline, std::int64_t tol) {
    const auto match = match_events(truth, detections, tol);
    FileScore s;
    s.file = std::move(file);
    s.truth_count = truth.size();
    s.detection_count = detections.size();
    s.matched = match.pairs.size();
    s.rates = detection_rates(match, truth.size(), detections.size());
    s.mpe_width = mean_percent_error(match, truth, detections, MpeField::width, baseline);
    s.mpe_amplitude = mean_percent_error(match, truth, detections, MpeField::amplitude, baseline);
    return s;
}

FileScore score_bins(std::string file, std::span<const EventRecord> truth, const std::set<std::int64_t>& predicted_bins,
                     std::int64_t total_bins, std::int64_t bin_size) {
    const auto truth_bins = bin_spans(truth, bin_size);
    const auto rates = bin_rates(truth_bins, predicted_bins, total_bins);
    FileScore s;
    s.file = std::move(file);
    s.truth_count = truth_bins.size();
    s.detection_count = predicted_bins.size();
    for (auto b : predicted_bins) s.matched += truth_bins.count(b);
    s.rates.true_pct = rates.true_pct;
    s.rates.false_pct = rates.false_pct;
    s.rates.no_detections = predicted_bins.empty();
    s.rates.no_truth = truth_bins.empty();
    s.bin_fpr = rates.false_positive_rate;
    return s;
}

std::set<std::int64_t> read_detected_bins_csv(const std::filesystem::path& path, double threshold) {
    const auto table = read_numeric_csv(path);
    const int idx = table.find("bin_index");
    if (idx < 0) throw ParseError(path.string() + ": missing column 'bin_index'");
    const int prob = table.find("probability");
    std::set<std::int64_t> bins;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const double b = table.columns[static_cast<std::size_t>(idx)][r];
        if (b < 0.0 || b != std::floor(b))
            throw ParseError(path.string() + ": row " + std::to_string(r + 1) + ": bin_index must be a non-negative integer");
        if (prob >= 0 && table.columns[static_cast<std::size_t>(prob)][r] < threshold) continue;
        bins.insert(static_cast<std::int64_t>(b));
    }
    return bins;
}

namespace {

std::optional<double> mean_of(const std::vector<FileScore>& files, std::optional<double> FileScore::*field) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& f : files)
        if (f.*field) {
            sum += *(f.*field);
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

nlohmann::json opt(std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string cell(std::optional<double> v) { return v ? format_number(*v) : std::string(); }

}  // namespace

BenchmarkReport summarize(std::string program, std::vector<FileScore> files) {
    BenchmarkReport r;
    r.program = std::move(program);
    r.files = std::move(files);
    if (!r.files.empty()) {
        for (const auto& f : r.files) {
            r.mean_true_pct += f.rates.true_pct;
            r.mean_false_pct += f.rates.false_pct;
        }
        r.mean_true_pct /= static_cast<double>(r.files.size());
        r.mean_false_pct /= static_cast<double>(r.files.size());
    }
    r.mean_mpe_width = mean_of(r.files, &FileScore::mpe_width);
    r.mean_mpe_amplitude = mean_of(r.files, &FileScore::mpe_amplitude);
    r.mean_runtime_s = mean_of(r.files, &FileScore::runtime_s);
    r.mean_bin_fpr = mean_of(r.files, &FileScore::bin_fpr);
    return r;
}

nlohmann::json report_to_json(const BenchmarkReport& report) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : report.files) {
        files.push_back({{"file", f.file},
                         {"truth_count", f.truth_count},
                         {"detection_count", f.detection_count},
                         {"matched", f.matched},
                         {"true_pct", f.rates.true_pct},
                         {"false_pct", f.rates.false_pct},
                         {"no_detections", f.rates.no_detections},
                         {"mpe_width_pct", opt(f.mpe_width)},
                         {"mpe_amplitude_pct", opt(f.mpe_amplitude)},
                         {"runtime_s", opt(f.runtime_s)},
                         {"bin_fpr_pct", opt(f.bin_fpr)}});
    }
    return {{"program", report.program},
            {"files", files},
            {"aggregate",
             {{"mean_true_pct", report.mean_true_pct},
              {"mean_false_pct", report.mean_false_pct},
              {"mean_mpe_width_pct", opt(report.mean_mpe_width)},
              {"mean_mpe_amplitude_pct", opt(report.mean_mpe_amplitude)},
              {"mean_runtime_s", opt(report.mean_runtime_s)},
              {"mean_scaled_runtime", opt(report.mean_scaled_runtime)},
              {"mean_bin_fpr_pct", opt(report.mean_bin_fpr)}}}};
}

void write_report_csv(const BenchmarkReport& report, const std::filesystem::path& path) {
    TextWriter out(path);
    out.put("program,file,truth_count,detection_count,matched,true_pct,false_pct,mpe_width_pct,mpe_amplitude_pct,"
            "runtime_s,bin_fpr_pct\n");
    for (const auto& f : report.files) {
        out.put(report.program).put(',').put(f.file).put(',');
        out.put_integer(static_cast<std::int64_t>(f.truth_count)).put(',');
        out.put_integer(static_cast<std::int64_t>(f.detection_count)).put(',');
        out.put_integer(static_cast<std::int64_t>(f.matched)).put(',');
        out.put_number(f.rates.true_pct).put(',').put_number(f.rates.false_pct).put(',');
        out.put(cell(f.mpe_width)).put(',').put(cell(f.mpe_amplitude)).put(',').put(cell(f.runtime_s)).put(',');
        out.put(cell(f.bin_fpr)).put('\n');
    }
    out.close();
}

void write_report_json(const BenchmarkReport& report, const std::filesystem::path& path) {
    TextWriter out(path);
    out.put(report_to_json(report).dump(2)).put('\n');
    out.close();
}

void print_report(const BenchmarkReport& report, std::ostream& os) {
    const auto flags = os.flags();
    os << std::fixed << std::setprecision(2);
    os << "program: " << report.program << "\n";
    os << std::left << std::setw(36) << "file" << std::right << std::setw(8) << "truth" << std::setw(8) << "det"
       << std::setw(10) << "true%" << std::setw(10) << "false%" << std::setw(12) << "mpe_w%" << std::setw(12)
       << "mpe_a%" << std::setw(12) << "time_s" << "\n";
    auto show = [&](std::optional<double> v) {
        if (v)
            os << std::setw(12) << *v;
        else
            os << std::setw(12) << "-";
    };
    for (const auto& f : report.files) {
        os << std::left << std::setw(36) << f.file << std::right << std::setw(8) << f.truth_count << std::setw(8)
           << f.detection_count << std::setw(10) << f.rates.true_pct << std::setw(10) << f.rates.false_pct;
        show(f.mpe_width);
        show(f.mpe_amplitude);
        show(f.runtime_s);
        os << "\n";
    }
    os << "mean true%: " << report.mean_true_pct << "  mean false%: " << report.mean_false_pct;
    if (report.mean_mpe_width) os << "  MPE width%: " << *report.mean_mpe_width;
    if (report.mean_mpe_amplitude) os << "  MPE amplitude%: " << *report.mean_mpe_amplitude;
    if (report.mean_runtime_s) os << "  mean runtime s: " << *report.mean_runtime_s;
    if (report.mean_scaled_runtime) os << "  scaled runtime: " << *report.mean_scaled_runtime;
    if (report.mean_bin_fpr) os << "  bin FPR%: " << *report.mean_bin_fpr;
    os << "\n";
    os.flags(flags);
}

}  // namespace nanosim
