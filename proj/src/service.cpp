#include "nanosim/service.hpp"

#include "nanosim/config_json.hpp"
#include "nanosim/csv_io.hpp"
#include "nanosim/errors.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdio>
#include <iostream>

namespace nanosim {

using nlohmann::json;

Preview decimate_minmax(std::span<const double> time, std::span<const double> values, std::size_t max_points) {
    Preview p;
    const std::size_t n = values.size();
    if (n <= max_points || max_points < 2) {
        p.time.assign(time.begin(), time.end());
        p.current.assign(values.begin(), values.end());
        return p;
    }
    const std::size_t buckets = max_points / 2;
    p.time.reserve(2 * buckets);
    p.current.reserve(2 * buckets);
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t lo = b * n / buckets;
        const std::size_t hi = (b + 1) * n / buckets;
        const auto first = values.begin() + static_cast<std::ptrdiff_t>(lo);
        const auto last = values.begin() + static_cast<std::ptrdiff_t>(hi);
        const auto [mn, mx] = std::minmax_element(first, last);
        auto i = static_cast<std::size_t>(mn - values.begin());
        auto j = static_cast<std::size_t>(mx - values.begin());
        if (j < i) std::swap(i, j);
        p.time.push_back(time[i]);
        p.current.push_back(values[i]);
        p.time.push_back(time[j]);
        p.current.push_back(values[j]);
    }
    return p;
}

Psd job_psd(std::span<const double> signal, double sampfreq) {
    if (signal.size() < 2) return {};
    std::size_t seg = 1;
    while (seg * 2 <= std::min<std::size_t>(signal.size(), 4096)) seg *= 2;
    return welch_psd(signal, sampfreq, seg, seg / 2);
}

json events_to_json(std::span<const EventRecord> records) {
    json columns = json::array();
    for (auto h : kDetailsHeader) columns.push_back(std::string(h));
    json rows = json::array();
    for (const auto& r : records) {
        json row = {r.start_index, r.end_index, r.width, r.mean_current};
        for (double c : r.level_currents) row.push_back(c);
        for (auto w : r.level_widths) row.push_back(w);
        rows.push_back(std::move(row));
    }
    return {{"columns", columns}, {"rows", rows}};
}

Service::Service(std::filesystem::path output_dir, std::size_t preview_points)
    : output_dir_(std::move(output_dir)), preview_points_(preview_points) {}

ServiceResponse Service::generate(const std::string& request_body) {
    json request;
    try {
        request = request_body.empty() ? json::object() : json::parse(request_body);
    } catch (const json::parse_error& e) {
        return {400, {{"error", std::string("malformed JSON: ") + e.what()}}};
    }
    if (!request.is_object()) return {400, {{"error", "request body must be a JSON object"}}};
    for (const auto& [key, value] : request.items())
        if (key != "config" && key != "preview") return {400, {{"error", "unknown request key '" + key + "'"}, {"field", key}}};

    if (request.contains("preview") && !request["preview"].is_boolean())
        return {400, {{"error", "preview must be a boolean"}, {"field", "preview"}}};

    std::string id;
    try {
        const auto cfg = config_from_json(request.value("config", json::object()));
        const bool preview = request.value("preview", true);
        {
            std::lock_guard lock(mutex_);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "job-%06llu", static_cast<unsigned long long>(next_id_++));
            id = buf;
        }
        // Generation runs outside the registry lock.
        GenerationResult result;
        const auto files = run_generation(cfg, output_dir_ / id, &result);
        auto job = std::make_shared<Job>();
        job->id = id;
        job->files = files;
        job->psd = job_psd(result.bundle.final, cfg.sampfreq);
        job->records = result.records;

        json body = {{"job_id", id},
                     {"files",
                      {{"signal", files.signal.string()},
                       {"details", files.details.string()},
                       {"params", files.params.string()}}},
                     {"length", result.bundle.size()},
                     {"event_count", result.records.size()},
                     {"config", config_to_json(cfg)},
                     {"psd", {{"frequency", job->psd.frequency}, {"power", job->psd.power}}},
                     {"events", events_to_json(job->records)}};
        if (preview) {
            const auto p = decimate_minmax(result.bundle.time, result.bundle.final, preview_points_);
            body["preview"] = {{"time", p.time}, {"current", p.current}};
        }
        {
            std::lock_guard lock(mutex_);
            jobs_[id] = std::move(job);
        }
        return {200, std::move(body)};
    } catch (const ConfigError& e) {
        return {400, {{"error", e.what()}, {"field", e.field()}}};
    } catch (const std::exception& e) {
        return {500, {{"error", "generation failed"}, {"job_id", id}, {"log", e.what()}}};
    }
}

std::shared_ptr<const Service::Job> Service::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = jobs_.find(id);
    return it == jobs_.end() ? nullptr : it->second;
}

ServiceResponse Service::psd(const std::string& job_id) const {
    const auto job = find(job_id);
    if (!job) return {404, {{"error", "unknown job '" + job_id + "'"}}};
    return {200, {{"job_id", job_id}, {"frequency", job->psd.frequency}, {"power", job->psd.power}}};
}

ServiceResponse Service::events(const std::string& job_id) const {
    const auto job = find(job_id);
    if (!job) return {404, {{"error", "unknown job '" + job_id + "'"}}};
    auto body = events_to_json(job->records);
    body["job_id"] = job_id;
    return {200, std::move(body)};
}

ServiceResponse Service::defaults() const { return {200, config_to_json(GenerationConfig{})}; }

void Service::mount(httplib::Server& server) {
    auto reply = [](httplib::Response& res, const ServiceResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.Post("/api/generate", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, generate(req.body));
    });
    server.Get(R"(/api/jobs/([^/]+)/psd)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, psd(req.matches[1]));
    });
    server.Get(R"(/api/jobs/([^/]+)/events)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, events(req.matches[1]));
    });
    server.Get("/api/defaults",
               [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, defaults()); });
}

int serve(const std::filesystem::path& output_dir, const std::string& host, int port) {
    httplib::Server server;
    Service service(output_dir);
    service.mount(server);
    std::cerr << "nanosim: serving on http://" << host << ":" << port << " (output " << output_dir.string() << ")\n";
    if (!server.listen(host, port)) {
        std::cerr << "nanosim: cannot listen on " << host << ":" << port << "\n";
        return 1;
    }
    return 0;
}

}  // namespace nanosim
