#include "nanosim/dataset.hpp"

#include "nanosim/csv_io.hpp"
#include "nanosim/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <mutex>
#include <thread>

namespace nanosim {

namespace {

void check_range(const Range& r, const char* field, double floor_value, bool strict_floor) {
    const bool floor_ok = strict_floor ? r.lo > floor_value : r.lo >= floor_value;
    if (!(r.lo <= r.hi) || !floor_ok) throw ConfigError(field, "invalid range");
}

std::pair<double, double> sorted_pair(double a, double b) { return a <= b ? std::pair{a, b} : std::pair{b, a}; }

std::uint64_t parse_seed(const std::string& s, const std::string& where) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError(where + ": malformed seed '" + s + "'");
    return v;
}

GenerationConfig draw_source(const MlRangeSpec& spec, Rng& rng) {
    GenerationConfig cfg;
    cfg.name = "segment";
    cfg.seed = rng.next_u64();
    cfg.sampfreq = spec.sampfreq;
    cfg.events.numpulses = rng.uniform_int(spec.min_events, spec.max_events);
    std::tie(cfg.events.mincurr, cfg.events.maxcurr) =
        sorted_pair(rng.uniform(spec.depth.lo, spec.depth.hi), rng.uniform(spec.depth.lo, spec.depth.hi));
    const auto wlo = static_cast<std::int64_t>(std::ceil(spec.width.lo));
    const auto whi = static_cast<std::int64_t>(std::floor(spec.width.hi));
    const auto [w1, w2] = sorted_pair(static_cast<double>(rng.uniform_int(wlo, whi)),
                                      static_cast<double>(rng.uniform_int(wlo, whi)));
    cfg.events.minpwd = static_cast<std::int64_t>(w1);
    cfg.events.maxpwd = static_cast<std::int64_t>(w2);
    cfg.events.mode = spec.mode;
    cfg.events.mixratio = spec.mixratio;
    cfg.placement.event_density_factor = rng.uniform(spec.density.lo, spec.density.hi);
    cfg.noise.nsigma = rng.uniform(spec.nsigma.lo, spec.nsigma.hi);
    cfg.vshift = rng.uniform(spec.vshift.lo, spec.vshift.hi);
    cfg.filters.capacitance = 1.0e-11;
    cfg.filters.resistance = 1.0 / (rng.uniform(0.1, 1.0) * spec.sampfreq * cfg.filters.capacitance);
    cfg.filters.cutoff = rng.uniform(0.02, 0.2) * spec.sampfreq;
    if (spec.drift) {
        cfg.drift.sinusoidal = true;
        cfg.drift.numconcs = rng.uniform_int(1, 4);
        cfg.drift.maxamp = spec.max_drift;
    }
    return cfg;
}

}  // namespace

void MlRangeSpec::validate() const {
    check_range(depth, "depth", 0.0, true);
    check_range(width, "width", 1.0, false);
    if (std::ceil(width.lo) > std::floor(width.hi)) throw ConfigError("width", "range holds no integer width");
    check_range(density, "density", 0.0, true);
    if (density.hi > 100.0) throw ConfigError("density", "must not exceed 100");
    check_range(nsigma, "nsigma", 0.0, true);
    check_range(vshift, "vshift", -1.0e300, false);
    if (min_events < 1 || min_events > max_events) throw ConfigError("min_events", "invalid event-count range");
    if (!(mixratio >= 0.0 && mixratio <= 1.0)) throw ConfigError("mixratio", "must lie in [0, 1]");
    if (!(sampfreq > 2.0 * kMainsFrequency * 3)) throw ConfigError("sampfreq", "too low for the AC harmonics");
    if (!(max_drift >= 0.0)) throw ConfigError("max_drift", "must be >= 0");
    if (max_attempts < 1) throw ConfigError("max_attempts", "must be >= 1");
}

Segment make_segment(const MlRangeSpec& spec, int target_label, std::uint64_t seed, std::size_t segment_length) {
    spec.validate();
    if (segment_length < 1) throw ConfigError("segment_length", "must be >= 1");
    const auto len = static_cast<std::int64_t>(segment_length);
    Rng rng(seed);
    for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
        const auto cfg = draw_source(spec, rng);
        GenerationResult gen;
        try {
            gen = assemble(cfg);
        } catch (const ConfigError&) {
            continue;  // e.g. a density too high for the drawn widths
        }
        const auto n = static_cast<std::int64_t>(gen.bundle.size());
        if (n < len) continue;

        std::int64_t offset = -1;
        if (target_label == 1) {
            const auto& ev = gen.records[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(gen.records.size()) - 1))];
            const auto lo = std::max<std::int64_t>(0, ev.start_index - len + 1);
            const auto hi = std::min(ev.end_index - 1, n - len);
            if (lo > hi) continue;
            offset = rng.uniform_int(lo, hi);
        } else {
            // Windows [s, s + len) that fit entirely inside an event-free gap.
            std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
            std::int64_t prev_end = 0;
            std::int64_t total = 0;
            auto add_gap = [&](std::int64_t from, std::int64_t to) {
                if (to - from >= len) {
                    ranges.emplace_back(from, to - len);
                    total += to - len - from + 1;
                }
            };
            for (const auto& r : gen.records) {
                add_gap(prev_end, r.start_index);
                prev_end = r.end_index;
            }
            add_gap(prev_end, n);
            if (total == 0) continue;
            auto pick = rng.uniform_int(0, total - 1);
            for (const auto& [from, to] : ranges) {
                const auto size = to - from + 1;
                if (pick < size) {
                    offset = from + pick;
                    break;
                }
                pick -= size;
            }
        }

        Segment seg;
        seg.seed = seed;
        seg.source = cfg;
        seg.source_offset = offset;
        const auto first = gen.bundle.final.begin() + offset;
        seg.current.assign(first, first + len);
        const auto cfirst = gen.bundle.clean.begin() + offset;
        seg.clean.assign(cfirst, cfirst + len);
        for (const auto& r : gen.records)
            if (r.end_index > offset && r.start_index < offset + len) seg.events.push_back(r);
        seg.label = seg.events.empty() ? 0 : 1;
        return seg;
    }
    throw ConfigError("range", "could not cut a label-" + std::to_string(target_label) + " segment after " +
                                   std::to_string(spec.max_attempts) + " source signals");
}

std::vector<int> label_schedule(std::size_t count, std::uint64_t seed) {
    std::vector<int> labels(count, 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(count / 2), 1);
    Rng rng(derive_seed(seed, 0xAB));
    for (std::size_t i = labels.size(); i > 1; --i)
        std::swap(labels[i - 1], labels[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    return labels;
}

namespace {

std::string segment_file_name(std::size_t index) {
    std::string digits = std::to_string(index);
    if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
    return "segment_" + digits + ".csv";
}

}  // namespace

SegmentDatasetManifest generate_ml_dataset(const MlRangeSpec& spec, std::size_t count, std::uint64_t seed,
                                           const std::filesystem::path& dir, std::size_t segment_length) {
    if (count < 1) throw ConfigError("count", "must be >= 1");
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());

    SegmentDatasetManifest manifest;
    manifest.segment_length = segment_length;
    manifest.seed = seed;
    const auto labels = label_schedule(count, seed);
    for (std::size_t i = 0; i < count; ++i) {
        const auto seg_seed = derive_seed(seed, i);
        const auto seg = make_segment(spec, labels[i], seg_seed, segment_length);
        const auto name = segment_file_name(i);
        TextWriter out(dir / name);
        out.put("Time,Current,Clean\n");
        for (std::size_t j = 0; j < seg.current.size(); ++j) {
            out.put_number(static_cast<double>(j) / spec.sampfreq).put(',');
            out.put_number(seg.current[j]).put(',').put_number(seg.clean[j]).put('\n');
        }
        out.close();
        manifest.entries.push_back({name, seg.label, seg_seed});
    }

    TextWriter out(dir / "manifest.csv");
    out.put("file,label,seed,segment_length\n");
    for (const auto& e : manifest.entries) {
        out.put(e.file).put(',').put_integer(e.label).put(',').put(std::to_string(e.seed)).put(',');
        out.put_integer(static_cast<std::int64_t>(segment_length)).put('\n');
    }
    out.close();
    return manifest;
}

SegmentDatasetManifest read_segment_manifest(const std::filesystem::path& path) {
    const auto table = read_csv(path);
    const int file = table.find("file"), label = table.find("label"), seed = table.find("seed"),
              seglen = table.find("segment_length");
    if (file < 0 || label < 0 || seed < 0 || seglen < 0) throw ParseError(path.string() + ": missing manifest columns");
    SegmentDatasetManifest m;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto where = path.string() + ": row " + std::to_string(i + 1);
        const auto lab = parse_number(row[static_cast<std::size_t>(label)]);
        if (!lab || (*lab != 0.0 && *lab != 1.0)) throw ParseError(where + ": label must be 0 or 1");
        const auto sl = parse_number(row[static_cast<std::size_t>(seglen)]);
        if (!sl || *sl < 1) throw ParseError(where + ": malformed segment_length");
        m.segment_length = static_cast<std::size_t>(*sl);
        m.entries.push_back({row[static_cast<std::size_t>(file)], static_cast<int>(*lab),
                             parse_seed(row[static_cast<std::size_t>(seed)], where)});
    }
    return m;
}

std::string corpus_file_stem(double density, double nsigma, double vshift) {
    return "corpus_d" + format_number(density) + "_n" + format_number(nsigma) + "_v" + format_number(vshift);
}

std::vector<CorpusEntry> corpus_entries(const CorpusSpec& spec, std::uint64_t seed) {
    std::vector<CorpusEntry> entries;
    std::uint64_t index = 0;
    for (double d : spec.densities)
        for (double ns : spec.nsigmas)
            for (double v : spec.vshifts) entries.push_back({corpus_file_stem(d, ns, v), d, ns, v, derive_seed(seed, index++)});
    return entries;
}

GenerationConfig corpus_file_config(const CorpusSpec& spec, const CorpusEntry& entry) {
    GenerationConfig cfg;
    cfg.name = entry.file;
    cfg.seed = entry.seed;
    cfg.sampfreq = spec.sampfreq;
    cfg.vshift = entry.vshift;
    cfg.events.numpulses = spec.numpulses;
    cfg.events.mincurr = cfg.events.maxcurr = spec.depth;
    cfg.events.mode = EventMode::single;
    const auto& widths = entry.density >= spec.long_width_density ? spec.long_widths : spec.short_widths;
    cfg.events.minpwd = static_cast<std::int64_t>(widths.lo);
    cfg.events.maxpwd = static_cast<std::int64_t>(widths.hi);
    cfg.placement.dist = GapDistribution::exponential;
    cfg.placement.event_density_factor = entry.density;
    cfg.noise.nsigma = entry.nsigma;
    cfg.noise.strategy = AmplitudeStrategy::min_amplitude;
    cfg.filters.rc_enabled = true;
    cfg.filters.capacitance = 1.0e-11;
    cfg.filters.resistance = 1.0 / (spec.rc_coefficient * spec.sampfreq * cfg.filters.capacitance);
    cfg.filters.lpf_enabled = true;
    cfg.filters.cutoff = spec.cutoff;
    cfg.columns = spec.columns;
    return cfg;
}

CorpusManifest build_benchmark_corpus(const std::filesystem::path& dir, std::uint64_t seed, const CorpusSpec& spec) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());

    CorpusManifest manifest;
    manifest.seed = seed;
    manifest.entries = corpus_entries(spec, seed);
    for (const auto& e : manifest.entries) corpus_file_config(spec, e).validate();

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned jobs = std::min<unsigned>(spec.jobs ? spec.jobs : hw, static_cast<unsigned>(manifest.entries.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < manifest.entries.size(); i = next++) {
            try {
                run_generation(corpus_file_config(spec, manifest.entries[i]), dir);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = manifest.entries.size();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    TextWriter out(dir / "manifest.csv");
    out.put("file,density,nsigma,vshift,seed\n");
    for (const auto& e : manifest.entries) {
        out.put(e.file).put(',').put_number(e.density).put(',').put_number(e.nsigma).put(',');
        out.put_number(e.vshift).put(',').put(std::to_string(e.seed)).put('\n');
    }
    out.close();

    TextWriter settings(dir / "corpus-settings.txt");
    settings.put("seed=").put(std::to_string(seed)).put('\n');
    settings.put("files=").put_integer(static_cast<std::int64_t>(manifest.entries.size())).put('\n');
    settings.put("numpulses=").put_integer(spec.numpulses).put('\n');
    settings.put("depth=").put_number(spec.depth).put('\n');
    settings.put("sampfreq=").put_number(spec.sampfreq).put('\n');
    settings.put("rc_coefficient=").put_number(spec.rc_coefficient).put('\n');
    settings.put("lpf_cutoff=").put_number(spec.cutoff).put('\n');
    settings.put("short_widths=").put_number(spec.short_widths.lo).put(':').put_number(spec.short_widths.hi).put('\n');
    settings.put("long_widths=").put_number(spec.long_widths.lo).put(':').put_number(spec.long_widths.hi).put('\n');
    settings.put("long_width_density=").put_number(spec.long_width_density).put('\n');
    settings.close();
    return manifest;
}

CorpusManifest read_corpus_manifest(const std::filesystem::path& path) {
    const auto table = read_csv(path);
    const int file = table.find("file"), density = table.find("density"), nsigma = table.find("nsigma"),
              vshift = table.find("vshift"), seed = table.find("seed");
    if (file < 0 || density < 0 || nsigma < 0 || vshift < 0 || seed < 0)
        throw ParseError(path.string() + ": missing manifest columns");
    CorpusManifest m;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto where = path.string() + ": row " + std::to_string(i + 1);
        auto num = [&](int col) {
            const auto v = parse_number(row[static_cast<std::size_t>(col)]);
            if (!v) throw ParseError(where + ": malformed number '" + row[static_cast<std::size_t>(col)] + "'");
            return *v;
        };
        m.entries.push_back({row[static_cast<std::size_t>(file)], num(density), num(nsigma), num(vshift),
                             parse_seed(row[static_cast<std::size_t>(seed)], where)});
    }
    return m;
}

}  // namespace nanosim
