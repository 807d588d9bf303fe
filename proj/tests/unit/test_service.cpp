#include <doctest.h>

#include "support.hpp"

#include "nanosim/config_json.hpp"
#include "nanosim/csv_io.hpp"
#include "nanosim/pipeline.hpp"
#include "nanosim/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <thread>

using namespace nanosim;
using nlohmann::json;

namespace {

json small_config(std::uint64_t seed) {
    return {{"seed", seed}, {"events", {{"numpulses", 12}}}, {"noise", {{"nsigma", 6.0}}}, {"vshift", 20.0}};
}

}  // namespace

TEST_CASE("min/max decimation keeps extremes and respects the point budget") {
    std::vector<double> t(100000), v(100000);
    for (std::size_t i = 0; i < v.size(); ++i) {
        t[i] = static_cast<double>(i) * 1e-5;
        v[i] = std::sin(0.001 * static_cast<double>(i));
    }
    v[31337] = -9.0;  // a single-sample spike must survive
    v[77777] = 4.0;
    const auto p = decimate_minmax(t, v, 4096);
    CHECK(p.current.size() <= 4096);
    CHECK(p.time.size() == p.current.size());
    CHECK(*std::min_element(p.current.begin(), p.current.end()) == -9.0);
    CHECK(*std::max_element(p.current.begin(), p.current.end()) == 4.0);
    CHECK(std::is_sorted(p.time.begin(), p.time.end()));

    // Every bucket's own extremes appear.
    const std::size_t buckets = 2048;
    for (std::size_t b = 0; b < buckets; b += 101) {
        const std::size_t lo = b * v.size() / buckets, hi = (b + 1) * v.size() / buckets;
        const auto [mn, mx] = std::minmax_element(v.begin() + static_cast<std::ptrdiff_t>(lo),
                                                  v.begin() + static_cast<std::ptrdiff_t>(hi));
        CHECK(std::find(p.current.begin(), p.current.end(), *mn) != p.current.end());
        CHECK(std::find(p.current.begin(), p.current.end(), *mx) != p.current.end());
    }

    const std::vector<double> st{0, 1, 2}, sv{5, 6, 7};
    const auto small = decimate_minmax(st, sv, 4096);
    CHECK(small.current == sv);
}

TEST_CASE("generate stores a job that psd and events can look up") {
    testing::TempDir dir("svc");
    Service service(dir.path(), 1000);
    const auto r = service.generate(json{{"config", small_config(5)}, {"preview", true}}.dump());
    REQUIRE(r.status == 200);
    const auto id = r.body["job_id"].get<std::string>();
    CHECK(id == "job-000001");
    for (const char* k : {"signal", "details", "params"})
        CHECK(std::filesystem::exists(r.body["files"][k].get<std::string>()));
    CHECK(r.body["event_count"] == 12);
    CHECK(r.body["preview"]["current"].size() <= 1000);
    CHECK(r.body["preview"]["time"].size() == r.body["preview"]["current"].size());

    const auto psd = service.psd(id);
    CHECK(psd.status == 200);
    CHECK(psd.body["frequency"].size() == psd.body["power"].size());
    CHECK(psd.body["frequency"].size() > 10);

    // Event table agrees with the details CSV on disk.
    const auto ev = service.events(id);
    REQUIRE(ev.status == 200);
    const auto on_disk = read_event_details_csv(r.body["files"]["details"].get<std::string>());
    REQUIRE(ev.body["rows"].size() == on_disk.size());
    for (std::size_t i = 0; i < on_disk.size(); ++i) {
        const auto& row = ev.body["rows"][i];
        CHECK(row[0].get<std::int64_t>() == on_disk[i].start_index);
        CHECK(row[1].get<std::int64_t>() == on_disk[i].end_index);
        CHECK(row[2].get<std::int64_t>() == on_disk[i].width);
        CHECK(row[3].get<double>() == on_disk[i].mean_current);
    }
    CHECK(ev.body["columns"].size() == kDetailsHeader.size());

    const auto second = service.generate(json{{"config", small_config(6)}, {"preview", false}}.dump());
    REQUIRE(second.status == 200);
    CHECK(second.body["job_id"] == "job-000002");
    CHECK_FALSE(second.body.contains("preview"));
}

TEST_CASE("service error statuses") {
    testing::TempDir dir("svc-err");
    Service service(dir.path());
    CHECK(service.psd("job-999999").status == 404);
    CHECK(service.events("nope").status == 404);

    const auto bad = service.generate(R"({"config": {"noise": {"nsigma": 0}}})");
    CHECK(bad.status == 400);
    CHECK(bad.body["field"] == "nsigma");

    const auto bounds = service.generate(R"({"config": {"events": {"mincurr": 9, "maxcurr": 2}}})");
    CHECK(bounds.status == 400);
    CHECK(bounds.body["field"] == "mincurr");

    const auto unknown = service.generate(R"({"config": {}, "colour": 1})");
    CHECK(unknown.status == 400);
    CHECK(unknown.body["field"] == "colour");

    CHECK(service.generate("{not json").status == 400);
    CHECK(service.generate("[1,2]").status == 400);
    CHECK(service.generate(R"({"preview": "yes"})").status == 400);

    // No job directory is left behind by rejected requests.
    CHECK_FALSE(std::filesystem::exists(dir.path() / "job-000001"));
}

TEST_CASE("defaults round-trip into the default configuration") {
    testing::TempDir dir("svc-def");
    Service service(dir.path());
    const auto d = service.defaults();
    CHECK(d.status == 200);
    CHECK(config_to_json(config_from_json(d.body)) == d.body);
    CHECK(d.body == config_to_json(GenerationConfig{}));
}

TEST_CASE("service files are byte-identical to a direct run") {
    testing::TempDir dir("svc-eq");
    Service service(dir.path() / "svc");
    const auto r = service.generate(json{{"config", small_config(42)}}.dump());
    REQUIRE(r.status == 200);
    const auto cfg = config_from_json(small_config(42));
    const auto direct = run_generation(cfg, dir.path() / "direct");
    CHECK(testing::read_file(direct.signal) == testing::read_file(r.body["files"]["signal"].get<std::string>()));
    CHECK(testing::read_file(direct.details) == testing::read_file(r.body["files"]["details"].get<std::string>()));
    CHECK(testing::read_file(direct.params) == testing::read_file(r.body["files"]["params"].get<std::string>()));
}

TEST_CASE("HTTP endpoints over a loopback socket") {
    testing::TempDir dir("svc-http");
    Service service(dir.path());
    httplib::Server server;
    service.mount(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(60, 0);

    auto res = client.Post("/api/generate", json{{"config", small_config(9)}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto body = json::parse(res->body);
    const auto id = body["job_id"].get<std::string>();
    CHECK(body["preview"]["time"].size() > 0);

    auto psd = client.Get("/api/jobs/" + id + "/psd");
    REQUIRE(psd);
    CHECK(psd->status == 200);
    CHECK(json::parse(psd->body)["power"].size() > 0);

    auto ev = client.Get("/api/jobs/" + id + "/events");
    REQUIRE(ev);
    CHECK(ev->status == 200);
    CHECK(json::parse(ev->body)["rows"].size() == 12);

    auto missing = client.Get("/api/jobs/job-424242/events");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto invalid = client.Post("/api/generate", R"({"config": {"noise": {"nsigma": 0}}})", "application/json");
    REQUIRE(invalid);
    CHECK(invalid->status == 400);

    auto defaults = client.Get("/api/defaults");
    REQUIRE(defaults);
    CHECK(defaults->status == 200);
    CHECK(json::parse(defaults->body).contains("events"));

    server.stop();
    worker.join();
}

TEST_CASE("concurrent generate requests get distinct jobs") {
    testing::TempDir dir("svc-conc");
    Service service(dir.path());
    std::vector<ServiceResponse> out(4);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < out.size(); ++i)
        threads.emplace_back([&, i] { out[i] = service.generate(json{{"config", small_config(100 + i)}}.dump()); });
    for (auto& t : threads) t.join();
    std::set<std::string> ids;
    for (const auto& r : out) {
        REQUIRE(r.status == 200);
        ids.insert(r.body["job_id"].get<std::string>());
    }
    CHECK(ids.size() == out.size());
    for (const auto& id : ids) CHECK(service.events(id).status == 200);
}
