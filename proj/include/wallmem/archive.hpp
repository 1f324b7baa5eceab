#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wallmem/ring.hpp"

namespace wallmem {

using Json = nlohmann::ordered_json;

/// Samples read out at one pause point. A failed point keeps its s and the
/// error message and carries no samples.
struct PointRecord {
    std::size_t index = 0;
    double s = 0.0;
    double gamma_over_j = 0.0;  // +inf when B(s) J = 0
    double gamma_ghz = 0.0;
    std::vector<SpinConfig> samples;
    std::vector<int> wall_counts;
    std::optional<std::string> error;

    bool failed() const { return error.has_value(); }
    bool operator==(const PointRecord&) const = default;
};

/// JSON-lines archive: one metadata header line, then one record per point.
struct SampleArchive {
    Json header = Json::object();
    std::vector<PointRecord> records;
};

std::string encode_record(const PointRecord& record);
PointRecord decode_record(const std::string& line);

std::string encode_archive(const SampleArchive& archive);
/// Throws Error on a malformed line, with its line number. When `tolerate_tail`
/// is set, a broken final line (an interrupted write) is dropped instead.
SampleArchive decode_archive(const std::string& content, bool tolerate_tail = false);

/// Paths ending in `.gz` are gzip-compressed; reading accepts either form.
bool is_gzip_path(const std::string& path);
SampleArchive read_archive(const std::string& path, bool tolerate_tail = false);
void write_archive(const std::string& path, const SampleArchive& archive);

/// Incremental writer. Lines go to `<path>.partial`, flushed per record, and
/// the file is renamed to `path` by finish(). Gzip output is written as one
/// member per line, so an interrupted file stays readable up to the last
/// complete record.
class ArchiveWriter {
public:
    ArchiveWriter(std::string path, const Json& header);
    ~ArchiveWriter();
    ArchiveWriter(const ArchiveWriter&) = delete;
    ArchiveWriter& operator=(const ArchiveWriter&) = delete;

    void append(const PointRecord& record);
    void finish();

    static std::string partial_path(const std::string& path) { return path + ".partial"; }

private:
    void write_line(const std::string& line);

    std::string path_;
    bool gzip_;
    std::ofstream out_;
    bool finished_ = false;
};

}  // namespace wallmem
