#pragma once

#include "nanosim/events.hpp"
#include "nanosim/pipeline.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nanosim {

/// Event-details header, in column order.
inline constexpr std::array<std::string_view, 12> kDetailsHeader{
    "Event Start Points",      "Event End Points",        "Event Width",
    "Event Mean Current (nA)", "Level 0 Current (nA)",    "Level 1 Current (nA)",
    "Level 2 Current (nA)",    "Level 3 Current (nA)",    "Level 0 Width (dPoints)",
    "Level 1 Width (dPoints)", "Level 2 Width (dPoints)", "Level 3 Width (dPoints)"};

/// Shortest decimal string that parses back to exactly `v`.
std::string format_number(double v);

/// Strict full-string numeric parse; nullopt on trailing garbage or empty input.
std::optional<double> parse_number(std::string_view s);

/// Columns: Time, Current, then Clean / Filtered / Drift / Noise when selected.
void write_signal_csv(const SignalBundle& bundle, const OutputColumns& columns, const std::filesystem::path& path);

void write_event_details_csv(std::span<const EventRecord> records, const std::filesystem::path& path);
std::vector<EventRecord> read_event_details_csv(const std::filesystem::path& path);

/// Flat `key=value` lines, dotted keys, one per configuration field.
void write_param_log(const GenerationConfig& cfg, const std::filesystem::path& path);
std::map<std::string, std::string> read_param_log(const std::filesystem::path& path);

/// Header plus string cells; the delimiter (comma or tab) is taken from the header line.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name` in the header, or -1.
    int find(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Numeric CSV, column-major. Throws ParseError naming the 1-based data row.
struct NumericTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    const std::vector<double>& column(std::string_view name) const;
    /// Index of `name` in the header, or -1.
    int find(std::string_view name) const;
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

NumericTable read_numeric_csv(const std::filesystem::path& path);

/// Number of non-empty lines after the header, without parsing them.
std::size_t count_data_rows(const std::filesystem::path& path);

/// Line-buffered text sink over stdio; errors surface as IoError with the path.
class TextWriter {
public:
    explicit TextWriter(const std::filesystem::path& path);
    ~TextWriter();
    TextWriter(const TextWriter&) = delete;
    TextWriter& operator=(const TextWriter&) = delete;

    TextWriter& put(std::string_view s);
    TextWriter& put(char c);
    TextWriter& put_number(double v);
    TextWriter& put_integer(std::int64_t v);
    void close();

private:
    void flush_buffer();

    std::filesystem::path path_;
    std::FILE* file_ = nullptr;
    std::string buffer_;
};

}  // namespace nanosim
