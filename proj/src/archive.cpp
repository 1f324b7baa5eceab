#include "wallmem/archive.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include <zlib.h>

#include "wallmem/error.hpp"
#include "wallmem/text.hpp"

namespace wallmem {

namespace {

Json number_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double read_number(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw Error(std::string("missing field '") + key + "'");
    if (it->is_number()) return it->get<double>();
    if (it->is_string()) {
        if (const auto v = parse_double(it->get<std::string>()); v && std::isinf(*v)) return *v;
    }
    throw Error(std::string("field '") + key + "' is not a number");
}

std::string gzip_member(const std::string& data) {
    z_stream zs{};
    if (deflateInit2(&zs, 6, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error("gzip: deflateInit2 failed");
    }
    std::string out(deflateBound(&zs, static_cast<uLong>(data.size())) + 32, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error("gzip: deflate failed");
    return out;
}

// gzread passes plain files through unchanged.
std::string read_maybe_gzip(const std::string& path, bool& truncated) {
    if (!std::filesystem::exists(path)) throw Error("cannot open archive: " + path);
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw Error("cannot open archive: " + path);
    std::string content;
    char buf[1 << 16];
    truncated = false;
    for (;;) {
        const int got = gzread(f, buf, sizeof buf);
        if (got > 0) content.append(buf, static_cast<std::size_t>(got));
        if (got < static_cast<int>(sizeof buf)) {
            if (got < 0 || !gzeof(f)) truncated = true;
            break;
        }
    }
    int errnum = 0;
    gzerror(f, &errnum);
    if (errnum != Z_OK) truncated = true;  // Z_BUF_ERROR: file ends mid-member
    gzclose(f);
    return content;
}

}  // namespace

std::string encode_record(const PointRecord& record) {
    Json j;
    j["index"] = record.index;
    j["s"] = record.s;
    if (record.error) {
        j["error"] = *record.error;
        return j.dump();
    }
    j["gamma_over_j"] = number_or_inf(record.gamma_over_j);
    j["gamma_ghz"] = record.gamma_ghz;
    Json samples = Json::array();
    for (const auto& cfg : record.samples) samples.push_back(cfg.to_string());
    j["samples"] = std::move(samples);
    j["wall_counts"] = record.wall_counts;
    return j.dump();
}

PointRecord decode_record(const std::string& line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::exception& e) {
        throw Error(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error("record is not an object");
    PointRecord r;
    if (const auto it = j.find("index"); it != j.end()) {
        if (!it->is_number_unsigned()) throw Error("field 'index' is not a non-negative integer");
        r.index = it->get<std::size_t>();
    }
    r.s = read_number(j, "s");
    if (const auto it = j.find("error"); it != j.end()) {
        r.error = it->get<std::string>();
        return r;
    }
    r.gamma_over_j = read_number(j, "gamma_over_j");
    if (j.contains("gamma_ghz")) r.gamma_ghz = read_number(j, "gamma_ghz");
    const auto it = j.find("samples");
    if (it == j.end() || !it->is_array()) throw Error("missing field 'samples'");
    r.samples.reserve(it->size());
    for (const auto& text : *it) {
        if (!text.is_string()) throw Error("sample is not a string");
        r.samples.push_back(SpinConfig::parse(text.get<std::string>()));
        if (r.samples.back().size() != r.samples.front().size()) {
            throw Error("samples have inconsistent lengths");
        }
    }
    for (const auto& cfg : r.samples) r.wall_counts.push_back(wall_count(cfg));
    if (const auto wc = j.find("wall_counts"); wc != j.end()) {
        if (wc->get<std::vector<int>>() != r.wall_counts) {
            throw Error("wall_counts disagree with samples");
        }
    }
    return r;
}

std::string encode_archive(const SampleArchive& archive) {
    std::string out = archive.header.dump();
    out += '\n';
    for (const auto& r : archive.records) {
        out += encode_record(r);
        out += '\n';
    }
    return out;
}

SampleArchive decode_archive(const std::string& content, bool tolerate_tail) {
    auto lines = split_lines(content);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    const bool ends_cleanly = !content.empty() && content.back() == '\n';
    if (lines.empty()) throw Error("archive is empty");
    SampleArchive archive;
    try {
        archive.header = Json::parse(lines.front());
    } catch (const Json::exception& e) {
        throw Error(std::string("archive line 1: invalid header: ") + e.what());
    }
    if (!archive.header.is_object()) throw Error("archive line 1: header is not an object");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const bool last = i + 1 == lines.size();
        try {
            archive.records.push_back(decode_record(std::string(lines[i])));
        } catch (const Error& e) {
            if (tolerate_tail && last) break;
            throw Error("archive line " + std::to_string(i + 1) + ": " + e.what());
        }
        if (tolerate_tail && last && !ends_cleanly) archive.records.pop_back();
    }
    return archive;
}

bool is_gzip_path(const std::string& path) {
    const std::string_view p(path);
    return p.size() >= 3 && p.substr(p.size() - 3) == ".gz";
}

SampleArchive read_archive(const std::string& path, bool tolerate_tail) {
    bool truncated = false;
    const std::string content = read_maybe_gzip(path, truncated);
    if (truncated && !tolerate_tail) throw Error("archive is truncated: " + path);
    try {
        return decode_archive(content, tolerate_tail);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

void write_archive(const std::string& path, const SampleArchive& archive) {
    ArchiveWriter writer(path, archive.header);
    for (const auto& r : archive.records) writer.append(r);
    writer.finish();
}

ArchiveWriter::ArchiveWriter(std::string path, const Json& header)
    : path_(std::move(path)), gzip_(is_gzip_path(path_)) {
    out_.open(partial_path(path_), std::ios::binary | std::ios::trunc);
    if (!out_) throw Error("cannot write archive: " + partial_path(path_));
    write_line(header.dump());
}

ArchiveWriter::~ArchiveWriter() = default;

void ArchiveWriter::append(const PointRecord& record) {
    if (finished_) throw Error("archive already finished: " + path_);
    write_line(encode_record(record));
}

void ArchiveWriter::write_line(const std::string& line) {
    const std::string data = line + '\n';
    if (gzip_) {
        const std::string member = gzip_member(data);
        out_.write(member.data(), static_cast<std::streamsize>(member.size()));
    } else {
        out_.write(data.data(), static_cast<std::streamsize>(data.size()));
    }
    out_.flush();
    if (!out_) throw Error("write failed: " + partial_path(path_));
}

void ArchiveWriter::finish() {
    if (finished_) return;
    out_.close();
    if (!out_) throw Error("write failed: " + partial_path(path_));
    std::error_code ec;
    std::filesystem::rename(partial_path(path_), path_, ec);
    if (ec) throw Error("cannot rename " + partial_path(path_) + " to " + path_ + ": " + ec.message());
    finished_ = true;
}

}  // namespace wallmem
