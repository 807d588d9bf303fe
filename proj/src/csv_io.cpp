#include "nanosim/csv_io.hpp"

#include "nanosim/config_json.hpp"
#include "nanosim/errors.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nanosim {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

TextWriter::TextWriter(const std::filesystem::path& path) : path_(path) {
    file_ = std::fopen(path.c_str(), "wb");
    if (!file_) throw IoError(path.string(), std::string("cannot open for writing: ") + std::strerror(errno));
    buffer_.reserve(1 << 20);
}

TextWriter::~TextWriter() {
    if (file_) {
        try {
            close();
        } catch (...) {
        }
    }
}

void TextWriter::flush_buffer() {
    if (buffer_.empty()) return;
    if (std::fwrite(buffer_.data(), 1, buffer_.size(), file_) != buffer_.size())
        throw IoError(path_.string(), "write failed");
    buffer_.clear();
}

TextWriter& TextWriter::put(std::string_view s) {
    buffer_.append(s);
    if (buffer_.size() >= (1 << 20)) flush_buffer();
    return *this;
}

TextWriter& TextWriter::put(char c) {
    buffer_.push_back(c);
    if (buffer_.size() >= (1 << 20)) flush_buffer();
    return *this;
}

TextWriter& TextWriter::put_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return put(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

TextWriter& TextWriter::put_integer(std::int64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return put(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

void TextWriter::close() {
    if (!file_) return;
    std::FILE* f = file_;
    file_ = nullptr;
    bool ok = true;
    if (!buffer_.empty()) ok = std::fwrite(buffer_.data(), 1, buffer_.size(), f) == buffer_.size();
    buffer_.clear();
    ok = (std::fclose(f) == 0) && ok;
    if (!ok) throw IoError(path_.string(), "write failed");
}

void write_signal_csv(const SignalBundle& bundle, const OutputColumns& columns, const std::filesystem::path& path) {
    std::vector<std::pair<std::string_view, const std::vector<double>*>> cols{{"Time", &bundle.time},
                                                                             {"Current", &bundle.final}};
    if (columns.clean) cols.emplace_back("Clean", &bundle.clean);
    if (columns.filtered) cols.emplace_back("Filtered", &bundle.filtered);
    if (columns.drift) cols.emplace_back("Drift", &bundle.drift);
    if (columns.noise) cols.emplace_back("Noise", &bundle.noise);
    for (const auto& [name, data] : cols)
        if (data->size() != bundle.size())
            throw std::logic_error("signal bundle column '" + std::string(name) + "' has the wrong length");

    TextWriter out(path);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out.put(',');
        out.put(cols[c].first);
    }
    out.put('\n');
    for (std::size_t i = 0; i < bundle.size(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out.put(',');
            out.put_number((*cols[c].second)[i]);
        }
        out.put('\n');
    }
    out.close();
}

void write_event_details_csv(std::span<const EventRecord> records, const std::filesystem::path& path) {
    TextWriter out(path);
    for (std::size_t c = 0; c < kDetailsHeader.size(); ++c) {
        if (c) out.put(',');
        out.put(kDetailsHeader[c]);
    }
    out.put('\n');
    for (const auto& r : records) {
        out.put_integer(r.start_index).put(',').put_integer(r.end_index).put(',').put_integer(r.width).put(',');
        out.put_number(r.mean_current);
        for (double c : r.level_currents) out.put(',').put_number(c);
        for (auto w : r.level_widths) out.put(',').put_integer(w);
        out.put('\n');
    }
    out.close();
}

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError(path.string(), "read failed");
    return std::move(ss).str();
}

char detect_delimiter(std::string_view header_line) {
    return header_line.find('\t') != std::string_view::npos && header_line.find(',') == std::string_view::npos ? '\t'
                                                                                                             : ',';
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '"' || s.front() == '\xEF' || s.front() == '\xBB' ||
                          s.front() == '\xBF'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Visits non-empty lines as (1-based line number, content).
template <typename F>
void for_each_line(std::string_view text, F&& f) {
    std::size_t start = 0, line_no = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) f(line_no, line);
        start = end + 1;
    }
}

}  // namespace

int CsvTable::find(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
    const std::string text = slurp(path);
    CsvTable table;
    char delim = ',';
    bool have_header = false;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (!have_header) {
            delim = detect_delimiter(line);
            for (auto cell : split(line, delim)) table.header.emplace_back(trim(cell));
            have_header = true;
            return;
        }
        auto cells = split(line, delim);
        if (cells.size() != table.header.size())
            throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " fields, found " + std::to_string(cells.size()));
        auto& row = table.rows.emplace_back();
        for (auto cell : cells) row.emplace_back(trim(cell));
    });
    if (!have_header) throw ParseError(path.string() + ": empty file, no header");
    return table;
}

const std::vector<double>& NumericTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns[i];
    throw ParseError("no column named '" + std::string(name) + "'");
}

int NumericTable::find(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

std::size_t count_data_rows(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) throw IoError(path.string(), "cannot open for reading");
    std::vector<char> buf(1 << 20);
    std::size_t lines = 0;
    bool blank = true;  // current line has no content yet
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), f)) > 0) {
        for (std::size_t i = 0; i < got; ++i) {
            const char c = buf[i];
            if (c == '\n') {
                if (!blank) ++lines;
                blank = true;
            } else if (c != '\r') {
                blank = false;
            }
        }
    }
    const bool failed = std::ferror(f) != 0;
    std::fclose(f);
    if (failed) throw IoError(path.string(), "read failed");
    if (!blank) ++lines;
    return lines == 0 ? 0 : lines - 1;
}

NumericTable read_numeric_csv(const std::filesystem::path& path) {
    const std::string text = slurp(path);
    NumericTable table;
    char delim = ',';
    bool have_header = false;
    std::size_t data_row = 0;
    for_each_line(text, [&](std::size_t, std::string_view line) {
        if (!have_header) {
            delim = detect_delimiter(line);
            for (auto cell : split(line, delim)) table.header.emplace_back(trim(cell));
            table.columns.resize(table.header.size());
            have_header = true;
            return;
        }
        ++data_row;
        std::size_t col = 0, start = 0;
        while (true) {
            const auto pos = line.find(delim, start);
            const auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
            const auto v = parse_number(cell);
            if (col >= table.columns.size() || !v)
                throw ParseError(path.string() + ": row " + std::to_string(data_row) + ": malformed field " +
                                 std::to_string(col + 1));
            table.columns[col++].push_back(*v);
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        if (col != table.columns.size())
            throw ParseError(path.string() + ": row " + std::to_string(data_row) + ": expected " +
                             std::to_string(table.columns.size()) + " fields, found " + std::to_string(col));
    });
    if (!have_header) throw ParseError(path.string() + ": empty file, no header");
    return table;
}

std::vector<EventRecord> read_event_details_csv(const std::filesystem::path& path) {
    const auto table = read_numeric_csv(path);
    std::array<const std::vector<double>*, kDetailsHeader.size()> cols{};
    for (std::size_t c = 0; c < kDetailsHeader.size(); ++c) cols[c] = &table.column(kDetailsHeader[c]);
    auto as_index = [&](double v, std::size_t row) {
        if (v != std::floor(v))
            throw ParseError(path.string() + ": row " + std::to_string(row + 1) + ": non-integral index " +
                             format_number(v));
        return static_cast<std::int64_t>(v);
    };
    std::vector<EventRecord> records(table.rows());
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& r = records[i];
        r.start_index = as_index((*cols[0])[i], i);
        r.end_index = as_index((*cols[1])[i], i);
        r.width = as_index((*cols[2])[i], i);
        r.mean_current = (*cols[3])[i];
        for (std::size_t k = 0; k < kMaxLevels; ++k) {
            r.level_currents[k] = (*cols[4 + k])[i];
            r.level_widths[k] = as_index((*cols[8 + k])[i], i);
        }
    }
    return records;
}

void write_param_log(const GenerationConfig& cfg, const std::filesystem::path& path) {
    TextWriter out(path);
    for (const auto& [key, value] : flatten_config(cfg)) out.put(key).put('=').put(value).put('\n');
    out.close();
}

std::map<std::string, std::string> read_param_log(const std::filesystem::path& path) {
    const std::string text = slurp(path);
    std::map<std::string, std::string> out;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": expected key=value");
        out.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    });
    return out;
}

}  // namespace nanosim
