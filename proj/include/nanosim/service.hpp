#pragma once

#include "nanosim/events.hpp"
#include "nanosim/pipeline.hpp"
#include "nanosim/spectrum.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace nanosim {

/// Environment variable naming the service's output directory.
inline constexpr const char* kOutputDirEnv = "NANOSIM_OUTPUT_DIR";

struct Preview {
    std::vector<double> time;
    std::vector<double> current;
};

/// Min/max decimation: the series is cut into max_points/2 buckets and each
/// bucket contributes its minimum and maximum sample in time order. Series of
/// at most `max_points` samples are returned unchanged.
Preview decimate_minmax(std::span<const double> time, std::span<const double> values, std::size_t max_points = 4096);

/// PSD served for a job: Welch with the largest power-of-two segment <= min(n, 4096), half overlap.
Psd job_psd(std::span<const double> signal, double sampfreq);

/// Event table in the details-CSV layout: {"columns": [...], "rows": [[...], ...]}.
nlohmann::json events_to_json(std::span<const EventRecord> records);

struct ServiceResponse {
    int status = 200;
    nlohmann::json body;
};

/// Job registry and request handlers. Handlers are callable directly, which is
/// how the tests drive them; `mount` wires them onto an HTTP server.
class Service {
public:
    explicit Service(std::filesystem::path output_dir, std::size_t preview_points = 4096);

    ServiceResponse generate(const std::string& request_body);
    ServiceResponse psd(const std::string& job_id) const;
    ServiceResponse events(const std::string& job_id) const;
    ServiceResponse defaults() const;

    void mount(httplib::Server& server);

    const std::filesystem::path& output_dir() const { return output_dir_; }

private:
    struct Job {
        std::string id;
        GenerationFiles files;
        Psd psd;
        std::vector<EventRecord> records;
    };

    std::shared_ptr<const Job> find(const std::string& id) const;

    std::filesystem::path output_dir_;
    std::size_t preview_points_;
    mutable std::mutex mutex_;
    std::uint64_t next_id_ = 1;
    std::map<std::string, std::shared_ptr<const Job>> jobs_;
};

/// Blocks serving on host:port until the process is stopped.
int serve(const std::filesystem::path& output_dir, const std::string& host, int port);

}  // namespace nanosim
