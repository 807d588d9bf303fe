#include <doctest.h>

#include "support.hpp"

#include "nanosim/benchmark.hpp"
#include "nanosim/csv_io.hpp"
#include "nanosim/errors.hpp"
#include "nanosim/rng.hpp"

#include <algorithm>
#include <sstream>

using namespace nanosim;
using testing::TempDir;

namespace {

EventRecord truth_event(std::int64_t start, std::int64_t width, double mean_current = -3.0) {
    EventRecord r;
    r.start_index = start;
    r.end_index = start + width;
    r.width = width;
    r.mean_current = mean_current;
    r.level_currents.fill(mean_current);
    r.level_widths = {width, 0, 0, 0};
    return r;
}

DetectionRecord detection(std::int64_t start, std::int64_t end, std::optional<double> amp = std::nullopt) {
    return {start, end, end - start, amp};
}

// Maximum bipartite matching by exhaustive search over detection subsets.
std::size_t brute_force_matching(const std::vector<EventRecord>& truth, const std::vector<DetectionRecord>& det,
                                 std::int64_t tol) {
    std::vector<std::vector<int>> best(truth.size() + 1, std::vector<int>(1u << det.size(), 0));
    for (std::size_t t = truth.size(); t-- > 0;) {
        for (unsigned used = 0; used < (1u << det.size()); ++used) {
            int v = best[t + 1][used];
            for (std::size_t d = 0; d < det.size(); ++d)
                if (!(used & (1u << d)) && within_tolerance(truth[t], det[d], tol))
                    v = std::max(v, 1 + best[t + 1][used | (1u << d)]);
            best[t][used] = v;
        }
    }
    return static_cast<std::size_t>(best[0][0]);
}

bool overlaps_bin_by_scan(std::int64_t start, std::int64_t end, std::int64_t bin, std::int64_t size) {
    for (auto i = start; i < end; ++i)
        if (i >= bin * size && i < (bin + 1) * size) return true;
    return false;
}

}  // namespace

TEST_CASE("matching agrees with exhaustive maximum matching on crowded instances") {
    Rng rng(42);
    for (int instance = 0; instance < 1000; ++instance) {
        const auto nt = static_cast<std::size_t>(rng.uniform_int(0, 8));
        const auto nd = static_cast<std::size_t>(rng.uniform_int(0, 8));
        std::vector<EventRecord> truth;
        for (std::size_t i = 0; i < nt; ++i) truth.push_back(truth_event(rng.uniform_int(0, 60), rng.uniform_int(1, 30)));
        std::vector<DetectionRecord> det;
        for (std::size_t i = 0; i < nd; ++i) {
            const auto s = rng.uniform_int(-5, 70);
            det.push_back(detection(s, s + rng.uniform_int(1, 35)));
        }
        const auto m = match_events(truth, det, 10);
        REQUIRE(m.pairs.size() == brute_force_matching(truth, det, 10));
        REQUIRE(m.pairs.size() + m.missed_truths.size() == nt);
        REQUIRE(m.pairs.size() + m.unmatched_detections.size() == nd);
        std::vector<char> used_t(nt, 0), used_d(nd, 0);
        for (const auto& p : m.pairs) {
            REQUIRE(within_tolerance(truth[p.truth], det[p.detection], 10));
            REQUIRE(!used_t[p.truth]++);
            REQUIRE(!used_d[p.detection]++);
        }
    }
}

TEST_CASE("nearest start wins when two detections compete") {
    const std::vector<EventRecord> truth{truth_event(100, 50)};
    const std::vector<DetectionRecord> det{detection(108, 150), detection(101, 152), detection(95, 150)};
    const auto m = match_events(truth, det, 10);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].detection == 1);
    CHECK(m.unmatched_detections.size() == 2);
}

TEST_CASE("tolerance boundary: ten points match, eleven do not") {
    std::vector<EventRecord> truth;
    for (int i = 0; i < 100; ++i) truth.push_back(truth_event(1000 * i, 40));
    auto shifted = [&](std::int64_t by) {
        std::vector<DetectionRecord> d;
        for (const auto& t : truth) d.push_back(detection(t.start_index + by, t.end_index + by));
        return d;
    };
    CHECK(detection_rates(match_events(truth, shifted(10)), 100, 100).true_pct == 100.0);
    CHECK(detection_rates(match_events(truth, shifted(-10)), 100, 100).true_pct == 100.0);
    const auto far = detection_rates(match_events(truth, shifted(11)), 100, 100);
    CHECK(far.true_pct == 0.0);
    CHECK(far.false_pct == 100.0);

    // true_pct never drops as the tolerance widens.
    const auto d = shifted(7);
    double last = -1.0;
    for (std::int64_t tol = 0; tol <= 20; ++tol) {
        const double now = detection_rates(match_events(truth, d, tol), 100, 100).true_pct;
        CHECK(now >= last);
        last = now;
    }
}

TEST_CASE("rate examples") {
    std::vector<EventRecord> truth;
    std::vector<DetectionRecord> det;
    for (int i = 0; i < 100; ++i) {
        truth.push_back(truth_event(500 * i, 30));
        const std::int64_t off = i < 80 ? 3 : 40;
        det.push_back(detection(500 * i + off, 500 * i + 30 + off));
    }
    auto r = detection_rates(match_events(truth, det), truth.size(), det.size());
    CHECK(r.true_pct == 80.0);
    CHECK(r.false_pct == 20.0);

    det.resize(50);
    for (int i = 0; i < 50; ++i) det[static_cast<std::size_t>(i)] = detection(500 * i, 500 * i + 30);
    r = detection_rates(match_events(truth, det), truth.size(), det.size());
    CHECK(r.true_pct == 50.0);
    CHECK(r.false_pct == 0.0);

    r = detection_rates(match_events(truth, {}), truth.size(), 0);
    CHECK(r.false_pct == 0.0);
    CHECK(r.no_detections);
}

TEST_CASE("bin spans follow the overlap rule") {
    const std::vector<EventRecord> one{truth_event(1020, 10)};
    CHECK(bin_spans(one) == std::set<std::int64_t>{0, 1});
    CHECK(bin_spans(std::vector<EventRecord>{}).empty());
    CHECK(bin_spans(std::vector<EventRecord>{truth_event(2048, 1024)}) == std::set<std::int64_t>{2});
    CHECK_THROWS_AS(bin_spans(one, 0), ConfigError);

    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const auto size = rng.uniform_int(1, 64);
        std::vector<EventRecord> recs;
        for (int i = 0; i < 5; ++i) recs.push_back(truth_event(rng.uniform_int(0, 500), rng.uniform_int(1, 80)));
        std::set<std::int64_t> scan;
        for (std::int64_t b = 0; b < 600 / size + 2; ++b)
            for (const auto& r : recs)
                if (overlaps_bin_by_scan(r.start_index, r.end_index, b, size)) scan.insert(b);
        REQUIRE(bin_spans(recs, size) == scan);

        // Splitting a record at a bin boundary leaves the bin set unchanged.
        const auto& r = recs[0];
        const auto cut = (r.start_index / size + 1) * size;
        if (cut < r.end_index) {
            auto split = recs;
            split[0] = truth_event(r.start_index, cut - r.start_index);
            split.push_back(truth_event(cut, r.end_index - cut));
            REQUIRE(bin_spans(split, size).size() == bin_spans(recs, size).size());
        }
    }
}

TEST_CASE("bin rates report recall, precision complement and FPR") {
    const std::set<std::int64_t> truth{1, 2, 3, 4}, pred{3, 4, 5, 6};
    const auto r = bin_rates(truth, pred, 20);
    CHECK(r.true_pct == 50.0);
    CHECK(r.false_pct == 50.0);
    CHECK(r.false_positive_rate == doctest::Approx(100.0 * 2.0 / 16.0));

    const std::vector<EventRecord> events{truth_event(1024, 4096)};
    const auto s = score_bins("f", events, {1, 2, 9}, 10);
    CHECK(s.truth_count == 4);
    CHECK(s.matched == 2);
    CHECK(s.rates.true_pct == 50.0);
    CHECK(s.rates.false_pct == doctest::Approx(100.0 / 3.0));
    CHECK(*s.bin_fpr == doctest::Approx(100.0 / 6.0));
}

TEST_CASE("mean percent error examples") {
    std::vector<EventRecord> truth;
    std::vector<DetectionRecord> det;
    for (int i = 0; i < 10; ++i) {
        truth.push_back(truth_event(1000 * i, 100, 17.0));  // 20 nA baseline, 3 nA deep
        det.push_back(detection(1000 * i, 1000 * i + 105, 2.7));
    }
    const auto m = match_events(truth, det);
    CHECK(*mean_percent_error(m, truth, det, MpeField::width) == doctest::Approx(5.0));
    CHECK(*mean_percent_error(m, truth, det, MpeField::amplitude, 20.0) == doctest::Approx(10.0));

    const auto exact = detections_from_truth(truth, 20.0);
    const auto me = match_events(truth, exact);
    CHECK(*mean_percent_error(me, truth, exact, MpeField::width) == 0.0);
    CHECK(*mean_percent_error(me, truth, exact, MpeField::amplitude, 20.0) == 0.0);

    CHECK_FALSE(mean_percent_error(match_events(truth, {}), truth, {}, MpeField::width).has_value());
    std::vector<DetectionRecord> no_amp{detection(0, 100)};
    CHECK_FALSE(mean_percent_error(match_events(truth, no_amp), truth, no_amp, MpeField::amplitude, 20.0).has_value());
}

TEST_CASE("scaled runtimes divide by the fastest program per file") {
    auto s = scaled_runtimes({{"a", {{"f1", 2.0}}}, {"b", {{"f1", 4.0}}}});
    CHECK(s.at("a") == 1.0);
    CHECK(s.at("b") == 2.0);
    s = scaled_runtimes({{"solo", {{"f1", 0.3}, {"f2", 7.0}}}});
    CHECK(s.at("solo") == 1.0);
    s = scaled_runtimes({{"a", {{"f1", 1.0}, {"f2", 6.0}}}, {"b", {{"f1", 3.0}, {"f2", 2.0}}}});
    CHECK(s.at("a") == doctest::Approx((1.0 + 3.0) / 2.0));
    CHECK(s.at("b") == doctest::Approx((3.0 + 1.0) / 2.0));
    try {
        scaled_runtimes({{"a", {{"f1", 1.0}, {"f2", 1.0}}}, {"b", {{"f1", 1.0}}}});
        FAIL("expected missing entries to be reported");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("b/f2") != std::string::npos);
    }
}

TEST_CASE("details CSV read back as detections equals the ground truth") {
    TempDir dir("detections");
    std::vector<EventRecord> truth;
    for (int i = 0; i < 20; ++i) truth.push_back(truth_event(300 * i + 7, 20 + i, 30.0 - 0.1 * i));
    write_event_details_csv(truth, dir / "d.csv");
    const auto det = read_detections_csv(dir / "d.csv", details_column_map(33.0));
    const auto expected = detections_from_truth(truth, 33.0);
    REQUIRE(det.size() == expected.size());
    for (std::size_t i = 0; i < det.size(); ++i) {
        CHECK(det[i].start == expected[i].start);
        CHECK(det[i].end == expected[i].end);
        CHECK(det[i].width == expected[i].width);
        CHECK(*det[i].amplitude == doctest::Approx(*expected[i].amplitude));
    }
    const auto score = score_file("d", truth, det, 33.0);
    CHECK(score.rates.true_pct == 100.0);
    CHECK(score.rates.false_pct == 0.0);
    CHECK(*score.mpe_width == 0.0);
    CHECK(*score.mpe_amplitude == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("third-party tables: derived widths, inclusive ends and bad rows") {
    TempDir dir("thirdparty");
    testing::write_file(dir / "t.csv", "begin\tfinish\tdepth\n500\t529\t2.5\n100\t119\t3\n");
    ColumnMap map;
    map.start = "begin";
    map.end = "finish";
    map.amplitude = "depth";
    map.inclusive_end = true;
    const auto det = read_detections_csv(dir / "t.csv", map);
    REQUIRE(det.size() == 2);
    CHECK(det[0] == DetectionRecord{100, 120, 20, 3.0});
    CHECK(det[1] == DetectionRecord{500, 530, 30, 2.5});

    testing::write_file(dir / "bad.csv", "start,end\n1,5\n9,oops\n");
    try {
        read_detections_csv(dir / "bad.csv", {});
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    ColumnMap missing;
    missing.width = "len";
    testing::write_file(dir / "nowidth.csv", "start,end\n1,5\n");
    CHECK_THROWS_AS(read_detections_csv(dir / "nowidth.csv", missing), ParseError);
}

TEST_CASE("detections CSV and per-bin tables round-trip") {
    TempDir dir("roundtrip");
    const std::vector<DetectionRecord> det{detection(3, 10, 1.25), detection(40, 41)};
    write_detections_csv(det, dir / "d.csv");
    ColumnMap map;
    map.width = "width";
    map.amplitude = "amplitude";
    CHECK_THROWS_AS(read_detections_csv(dir / "d.csv", map), ParseError);  // empty amplitude cell
    map.amplitude.reset();
    const auto back = read_detections_csv(dir / "d.csv", map);
    CHECK(back[0].end == 10);
    CHECK(back[1].width == 1);

    testing::write_file(dir / "bins.csv", "bin_index,probability\n0,0.9\n1,0.2\n4,0.5\n");
    CHECK(read_detected_bins_csv(dir / "bins.csv") == std::set<std::int64_t>{0, 4});
    CHECK(read_detected_bins_csv(dir / "bins.csv", 0.1) == std::set<std::int64_t>{0, 1, 4});
    testing::write_file(dir / "plain.csv", "bin_index\n7\n");
    CHECK(read_detected_bins_csv(dir / "plain.csv") == std::set<std::int64_t>{7});
    testing::write_file(dir / "frac.csv", "bin_index\n1.5\n");
    CHECK_THROWS_AS(read_detected_bins_csv(dir / "frac.csv"), ParseError);
}

TEST_CASE("report summary, CSV, JSON and table") {
    TempDir dir("report");
    FileScore a;
    a.file = "a";
    a.rates = {100.0, 0.0};
    a.mpe_width = 1.0;
    a.runtime_s = 0.5;
    FileScore b;
    b.file = "b";
    b.rates = {50.0, 10.0};
    b.mpe_width = 3.0;
    auto report = summarize("prog", {a, b});
    CHECK(report.mean_true_pct == 75.0);
    CHECK(report.mean_false_pct == 5.0);
    CHECK(*report.mean_mpe_width == 2.0);
    CHECK_FALSE(report.mean_mpe_amplitude.has_value());
    CHECK(*report.mean_runtime_s == 0.5);

    write_report_csv(report, dir / "r.csv");
    const auto table = read_csv(dir / "r.csv");
    CHECK(table.rows.size() == 2);
    CHECK(table.rows[1][static_cast<std::size_t>(table.find("true_pct"))] == "50");
    write_report_json(report, dir / "r.json");
    const auto j = nlohmann::json::parse(testing::read_file(dir / "r.json"));
    CHECK(j["aggregate"]["mean_true_pct"] == 75.0);
    CHECK(j["files"][1]["mpe_amplitude_pct"].is_null());

    std::ostringstream os;
    print_report(report, os);
    CHECK(os.str().find("mean true%: 75.00") != std::string::npos);
}
