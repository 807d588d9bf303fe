// nanosim: generate synthetic nanopore traces, build datasets and score detectors.

#include "nanosim/benchmark.hpp"
#include "nanosim/config_json.hpp"
#include "nanosim/csv_io.hpp"
#include "nanosim/dataset.hpp"
#include "nanosim/detector.hpp"
#include "nanosim/errors.hpp"
#include "nanosim/pipeline.hpp"
#include "nanosim/service.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using nlohmann::json;

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;

std::string flag_for(const std::string& field) {
    std::string flag = "--" + field;
    std::replace(flag.begin(), flag.end(), '_', '-');
    return flag;
}

/// Options that override one key of the JSON config when given.
struct Overrides {
    json doc = json::object();
    std::vector<std::function<void()>> apply;

    template <typename T>
    void add(CLI::App* app, const std::string& section, const std::string& key, const std::string& help) {
        auto value = std::make_shared<T>();
        auto* opt = app->add_option(flag_for(key), *value, help);
        if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<std::int64_t>> ||
                      std::is_same_v<T, std::vector<std::string>>)
            opt->delimiter(',');
        apply.emplace_back([this, value, opt, section, key] {
            if (opt->count() == 0) return;
            if (section.empty())
                doc[key] = *value;
            else
                doc[section][key] = *value;
        });
    }

    void toggle(CLI::App* app, const std::string& flag, const std::string& section, const std::string& key, bool value,
                const std::string& help) {
        auto* opt = app->add_flag(flag, help);
        apply.emplace_back([this, opt, section, key, value] {
            if (opt->count() > 0) doc[section][key] = value;
        });
    }

    json finish() {
        for (auto& f : apply) f();
        return doc;
    }
};

void add_generation_flags(CLI::App* app, Overrides& o) {
    o.add<std::string>(app, "", "name", "file stem of the three outputs");
    o.add<double>(app, "", "sampfreq", "sampling frequency in Hz");
    o.add<double>(app, "", "vshift", "open-pore baseline current in nA");
    o.add<std::int64_t>(app, "events", "numpulses", "number of events");
    o.add<double>(app, "events", "mincurr", "minimum event depth (nA)");
    o.add<double>(app, "events", "maxcurr", "maximum event depth (nA)");
    o.add<std::int64_t>(app, "events", "minpwd", "minimum event width (points)");
    o.add<std::int64_t>(app, "events", "maxpwd", "maximum event width (points)");
    o.add<std::string>(app, "events", "multilevel", "single | multi | mixed");
    o.add<double>(app, "events", "mixratio", "fraction of multilevel events in mixed mode");
    o.add<std::vector<std::string>>(app, "events", "sequence", "level names, comma separated");
    o.add<std::vector<double>>(app, "events", "currents", "explicit level depths (nA), comma separated");
    o.add<std::vector<std::int64_t>>(app, "events", "pulsewidths", "explicit level widths, comma separated");
    o.add<bool>(app, "events", "shuffle", "shuffle explicit levels per event");
    o.add<std::int64_t>(app, "events", "max_levels", "max levels of random multilevel events");
    o.add<std::string>(app, "placement", "dist", "exponential | logistic | uniform");
    o.add<double>(app, "placement", "event_density_factor", "percent of samples inside events");
    o.add<double>(app, "noise", "nsigma", "reference amplitude / noise std");
    o.add<std::string>(app, "noise", "strategy", "min | max | mean");
    o.add<std::vector<double>>(app, "noise", "beta", "colored-noise exponents, comma separated");
    o.add<int>(app, "noise", "n_harmonics", "AC harmonics (1-3)");
    o.add<double>(app, "noise", "ac_base_amp", "pre-mix AC amplitude (nA)");
    o.toggle(app, "--no-white", "noise", "white", false, "disable white noise");
    o.toggle(app, "--no-ac", "noise", "ac", false, "disable AC noise");
    o.toggle(app, "--no-colored", "noise", "colored", false, "disable colored noise");
    o.add<double>(app, "filters", "resistance", "RC filter resistance (ohm)");
    o.add<double>(app, "filters", "capacitance", "RC filter capacitance (F)");
    o.add<double>(app, "filters", "cutoff", "Gaussian low-pass cutoff (Hz)");
    o.toggle(app, "--no-rc", "filters", "rc", false, "disable the RC filter");
    o.toggle(app, "--no-lpf", "filters", "lpf", false, "disable the Gaussian low-pass");
    o.toggle(app, "--sinusoidal-drift", "drift", "sinusoidal", true, "enable sinusoidal drift");
    o.add<std::int64_t>(app, "drift", "numconcs", "concatenated drift sinusoids");
    o.add<double>(app, "drift", "maxamp", "maximum sinusoidal drift amplitude (nA)");
    o.add<int>(app, "drift", "max_harmonic", "highest sinusoidal drift harmonic");
    o.toggle(app, "--abrupt-drift", "drift", "abrupt", true, "enable abrupt drift");
    o.add<std::int64_t>(app, "drift", "nstepwins", "abrupt drift windows");
    o.add<double>(app, "drift", "driftmaxmag", "abrupt drift magnitude bound (nA)");
    o.add<std::int64_t>(app, "drift", "maxnsteps", "sublevels per abrupt window");
    o.toggle(app, "--with-clean", "columns", "clean", true, "add the Clean column");
    o.toggle(app, "--with-filtered", "columns", "filtered", true, "add the Filtered column");
    o.toggle(app, "--with-drift", "columns", "drift", true, "add the Drift column");
    o.toggle(app, "--with-noise", "columns", "noise", true, "add the Noise column");
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nanosim::IoError(path, "cannot open config");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw nanosim::ConfigError("config", path + ": " + e.what());
    }
}

nanosim::GenerationConfig build_config(const std::string& config_path, Overrides& o, std::uint64_t seed,
                                       bool no_noise) {
    json doc = config_path.empty() ? json::object() : load_json_file(config_path);
    const json flags = o.finish();
    doc.merge_patch(flags);
    doc["seed"] = seed;
    if (no_noise) doc["noise"].merge_patch({{"white", false}, {"ac", false}, {"colored", false}});
    return nanosim::config_from_json(doc);
}

std::vector<double> parse_pair(const std::vector<double>& v, const char* flag) {
    if (v.size() != 2) throw nanosim::ConfigError(std::string(flag).substr(2), "expects two values lo,hi");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app("Synthetic nanopore signal generator and detector benchmark");
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate one signal plus its event details and parameter log");
    Overrides gen_over;
    std::string gen_config, gen_out = ".";
    std::uint64_t gen_seed = 0;
    bool gen_no_noise = false;
    gen->add_option("--config", gen_config, "JSON config; flags override its keys");
    gen->add_option("--seed", gen_seed, "random seed")->required();
    gen->add_option("--out", gen_out, "output directory");
    gen->add_flag("--no-noise", gen_no_noise, "disable every noise component");
    add_generation_flags(gen, gen_over);

    // dataset
    auto* ds = app.add_subcommand("dataset", "generate labelled fixed-length segments for classifier training");
    std::string ds_out;
    std::size_t ds_count = 0, ds_len = nanosim::kSegmentLength;
    std::uint64_t ds_seed = 0;
    nanosim::MlRangeSpec ds_spec;
    std::vector<double> ds_depth, ds_width, ds_density, ds_nsigma, ds_vshift;
    bool ds_no_drift = false;
    ds->add_option("--out", ds_out, "output directory")->required();
    ds->add_option("--count", ds_count, "number of segments")->required();
    ds->add_option("--seed", ds_seed, "random seed")->required();
    ds->add_option("--segment-length", ds_len, "samples per segment");
    ds->add_option("--depth", ds_depth, "depth range lo,hi (nA)")->delimiter(',');
    ds->add_option("--width", ds_width, "width range lo,hi (points)")->delimiter(',');
    ds->add_option("--density", ds_density, "density range lo,hi (%)")->delimiter(',');
    ds->add_option("--nsigma", ds_nsigma, "nsigma range lo,hi")->delimiter(',');
    ds->add_option("--vshift", ds_vshift, "baseline range lo,hi (nA)")->delimiter(',');
    ds->add_option("--min-events", ds_spec.min_events, "minimum events per source signal");
    ds->add_option("--max-events", ds_spec.max_events, "maximum events per source signal");
    ds->add_flag("--no-drift", ds_no_drift, "disable sinusoidal drift");

    // corpus
    auto* corpus = app.add_subcommand("corpus", "build the 105-file benchmark corpus");
    std::string corpus_out;
    std::uint64_t corpus_seed = 0;
    unsigned corpus_jobs = 0;
    corpus->add_option("--out", corpus_out, "output directory")->required();
    corpus->add_option("--seed", corpus_seed, "master seed")->required();
    corpus->add_option("--jobs", corpus_jobs, "worker threads (0 = all cores)");

    // detect
    auto* det = app.add_subcommand("detect", "run the threshold detector on a signal CSV");
    std::string det_signal, det_out, det_column = "Current";
    std::size_t det_window = nanosim::kDefaultDetectorWindow;
    double det_k = 5.0;
    det->add_option("--signal", det_signal, "signal CSV")->required();
    det->add_option("--out", det_out, "detections CSV to write")->required();
    det->add_option("--column", det_column, "signal column");
    det->add_option("--window", det_window, "baseline window (points)");
    det->add_option("--k", det_k, "threshold in robust sigmas");

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "score detections against corpus ground truth");
    std::string b_corpus, b_detections, b_suffix = ".csv", b_program = "detector", b_runtimes, b_csv, b_json;
    std::string b_detector;
    bool b_self = false, b_absolute = false, b_inclusive = false;
    std::int64_t b_tol = nanosim::kDefaultTolerance;
    std::size_t b_window = nanosim::kDefaultDetectorWindow;
    double b_k = 5.0;
    nanosim::ColumnMap b_map;
    std::string b_map_width, b_map_amp;
    bench->add_option("--corpus", b_corpus, "corpus directory holding manifest.csv")->required();
    bench->add_option("--detections", b_detections, "directory of <file><suffix> detection tables");
    bench->add_option("--suffix", b_suffix, "detections file suffix");
    bench->add_flag("--self", b_self, "score the ground truth against itself");
    std::string b_bins, b_bins_suffix = "-bins.csv";
    double b_bin_threshold = 0.5;
    bench->add_option("--bins", b_bins, "directory of <file><bins-suffix> per-bin predictions (bin_index,probability)");
    bench->add_option("--bins-suffix", b_bins_suffix, "per-bin predictions file suffix");
    bench->add_option("--bin-threshold", b_bin_threshold, "probability at which a bin counts as detected");
    bench->add_option("--detector", b_detector, "run a bundled detector instead (threshold)");
    bench->add_option("--window", b_window, "threshold detector window");
    bench->add_option("--k", b_k, "threshold detector sigma multiplier");
    bench->add_option("--program", b_program, "program name in the report");
    bench->add_option("--tol", b_tol, "start/end matching tolerance (points)");
    bench->add_option("--map-start", b_map.start, "start column name");
    bench->add_option("--map-end", b_map.end, "end column name");
    bench->add_option("--map-width", b_map_width, "width column name");
    bench->add_option("--map-amplitude", b_map_amp, "amplitude column name");
    bench->add_flag("--absolute-amplitude", b_absolute, "amplitude column holds absolute current");
    bench->add_flag("--inclusive-end", b_inclusive, "end column is the last event sample");
    bench->add_option("--runtimes", b_runtimes, "CSV program,file,seconds for scaled runtimes");
    bench->add_option("--report-csv", b_csv, "write the per-file report CSV");
    bench->add_option("--report-json", b_json, "write the report JSON");

    // serve
    auto* srv = app.add_subcommand("serve", "run the local HTTP service");
    int srv_port = 8080;
    std::string srv_host = "127.0.0.1", srv_out;
    srv->add_option("--port", srv_port, "TCP port");
    srv->add_option("--host", srv_host, "bind address");
    srv->add_option("--out", srv_out, std::string("output directory (default $") + nanosim::kOutputDirEnv + ")");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (gen->parsed()) {
            const auto cfg = build_config(gen_config, gen_over, gen_seed, gen_no_noise);
            nanosim::GenerationResult result;
            const auto files = nanosim::run_generation(cfg, gen_out, &result);
            std::cout << "generated " << result.bundle.size() << " samples, " << result.records.size()
                      << " events (seed " << cfg.seed << ")\n"
                      << "  " << files.signal.string() << "\n  " << files.details.string() << "\n  "
                      << files.params.string() << "\n";
        } else if (ds->parsed()) {
            if (!ds_depth.empty()) { auto v = parse_pair(ds_depth, "--depth"); ds_spec.depth = {v[0], v[1]}; }
            if (!ds_width.empty()) { auto v = parse_pair(ds_width, "--width"); ds_spec.width = {v[0], v[1]}; }
            if (!ds_density.empty()) { auto v = parse_pair(ds_density, "--density"); ds_spec.density = {v[0], v[1]}; }
            if (!ds_nsigma.empty()) { auto v = parse_pair(ds_nsigma, "--nsigma"); ds_spec.nsigma = {v[0], v[1]}; }
            if (!ds_vshift.empty()) { auto v = parse_pair(ds_vshift, "--vshift"); ds_spec.vshift = {v[0], v[1]}; }
            ds_spec.drift = !ds_no_drift;
            const auto m = nanosim::generate_ml_dataset(ds_spec, ds_count, ds_seed, ds_out, ds_len);
            std::size_t positives = 0;
            for (const auto& e : m.entries) positives += static_cast<std::size_t>(e.label);
            std::cout << "wrote " << m.entries.size() << " segments (" << positives << " with events) to " << ds_out
                      << "\n";
        } else if (corpus->parsed()) {
            nanosim::CorpusSpec spec;
            spec.jobs = corpus_jobs;
            const auto t0 = std::chrono::steady_clock::now();
            const auto m = nanosim::build_benchmark_corpus(corpus_out, corpus_seed, spec);
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            std::cout << "wrote " << m.entries.size() << " corpus signals to " << corpus_out << " in " << dt.count()
                      << " s\n";
        } else if (det->parsed()) {
            const auto table = nanosim::read_numeric_csv(det_signal);
            const auto& signal = table.column(det_column);
            const auto t0 = std::chrono::steady_clock::now();
            const auto found = nanosim::threshold_detector(signal, det_window, det_k);
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            nanosim::write_detections_csv(found, det_out);
            std::cout << "detected " << found.size() << " events in " << dt.count() << " s -> " << det_out << "\n";
        } else if (bench->parsed()) {
            const std::filesystem::path dir = b_corpus;
            const auto manifest = nanosim::read_corpus_manifest(dir / "manifest.csv");
            const int sources = (b_self ? 1 : 0) + (b_detector.empty() ? 0 : 1) + (b_detections.empty() ? 0 : 1) +
                                (b_bins.empty() ? 0 : 1);
            if (sources != 1)
                throw nanosim::ConfigError("detections", "give exactly one of --detections, --bins, --self, --detector");
            if (!b_detector.empty() && b_detector != "threshold")
                throw nanosim::ConfigError("detector", "only 'threshold' is bundled");
            if (!b_map_width.empty()) b_map.width = b_map_width;
            if (!b_map_amp.empty()) b_map.amplitude = b_map_amp;
            b_map.inclusive_end = b_inclusive;
            if (b_self) b_program = "ground-truth";
            if (!b_detector.empty() && b_program == "detector") b_program = b_detector;

            std::vector<nanosim::FileScore> scores;
            std::map<std::string, std::map<std::string, double>> runtimes;
            for (const auto& e : manifest.entries) {
                const auto files = nanosim::output_paths(dir, e.file);
                const auto truth = nanosim::read_event_details_csv(files.details);
                if (!b_bins.empty()) {
                    const auto predicted = nanosim::read_detected_bins_csv(
                        std::filesystem::path(b_bins) / (e.file + b_bins_suffix), b_bin_threshold);
                    const auto rows = static_cast<std::int64_t>(nanosim::count_data_rows(files.signal));
                    const auto total_bins = (rows + nanosim::kDefaultBinSize - 1) / nanosim::kDefaultBinSize;
                    scores.push_back(nanosim::score_bins(e.file, truth, predicted, total_bins));
                    continue;
                }
                std::vector<nanosim::DetectionRecord> found;
                std::optional<double> runtime;
                if (b_self) {
                    found = nanosim::read_detections_csv(files.details, nanosim::details_column_map(e.vshift));
                } else if (!b_detector.empty()) {
                    const auto table = nanosim::read_numeric_csv(files.signal);
                    const auto t0 = std::chrono::steady_clock::now();
                    found = nanosim::threshold_detector(table.column("Current"), b_window, b_k);
                    runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                } else {
                    auto map = b_map;
                    if (b_absolute) map.amplitude_baseline = e.vshift;
                    found = nanosim::read_detections_csv(std::filesystem::path(b_detections) / (e.file + b_suffix), map);
                }
                auto s = nanosim::score_file(e.file, truth, found, e.vshift, b_tol);
                s.runtime_s = runtime;
                if (runtime) runtimes[b_program][e.file] = *runtime;
                scores.push_back(std::move(s));
            }
            if (!b_runtimes.empty()) {
                const auto table = nanosim::read_csv(b_runtimes);
                const int p = table.find("program"), f = table.find("file"), t = table.find("seconds");
                if (p < 0 || f < 0 || t < 0)
                    throw nanosim::ParseError(b_runtimes + ": expected columns program,file,seconds");
                for (std::size_t i = 0; i < table.rows.size(); ++i) {
                    const auto v = nanosim::parse_number(table.rows[i][static_cast<std::size_t>(t)]);
                    if (!v) throw nanosim::ParseError(b_runtimes + ": row " + std::to_string(i + 1) + ": bad seconds");
                    runtimes[table.rows[i][static_cast<std::size_t>(p)]][table.rows[i][static_cast<std::size_t>(f)]] = *v;
                }
            }
            auto report = nanosim::summarize(b_program, std::move(scores));
            if (!runtimes.empty()) {
                const auto scaled = nanosim::scaled_runtimes(runtimes);
                if (scaled.count(b_program)) report.mean_scaled_runtime = scaled.at(b_program);
                for (const auto& [program, value] : scaled)
                    std::cout << "scaled runtime " << program << ": " << value << "\n";
            }
            nanosim::print_report(report, std::cout);
            if (!b_csv.empty()) nanosim::write_report_csv(report, b_csv);
            if (!b_json.empty()) nanosim::write_report_json(report, b_json);
        } else if (srv->parsed()) {
            std::string out = srv_out;
            if (out.empty()) {
                const char* env = std::getenv(nanosim::kOutputDirEnv);
                out = env ? env : "nanosim-jobs";
            }
            return nanosim::serve(out, srv_host, srv_port);
        }
    } catch (const nanosim::ConfigError& e) {
        if (e.field().empty())
            std::cerr << "error: " << e.message() << "\n";
        else
            std::cerr << "error: " << flag_for(e.field()) << ": " << e.message() << "\n";
        return kExitConfig;
    } catch (const nanosim::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const nanosim::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
