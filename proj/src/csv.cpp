#include "lagwarp/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "lagwarp/errors.hpp"

namespace lagwarp {

namespace {

void split_line(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

} // namespace

CsvReader::CsvReader(const std::string& path, std::vector<std::string> expected_header)
    : path_(path), in_(path) {
    if (!in_)
        throw IoError("cannot open " + path);
    if (!std::getline(in_, line_))
        throw ValidationError(path + ": empty file, expected header row");
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    ++line_number_;
    split_line(line_, fields_);
    if (fields_.size() != expected_header.size()) {
        throw ValidationError(path + ": header has " + std::to_string(fields_.size()) +
                              " columns, expected " + std::to_string(expected_header.size()));
    }
    for (std::size_t i = 0; i < expected_header.size(); ++i) {
        if (fields_[i] != expected_header[i])
            throw ValidationError(path + ": missing column '" + expected_header[i] +
                                  "' (found '" + std::string(fields_[i]) + "')");
    }
    n_columns_ = expected_header.size();
}

bool CsvReader::next_row() {
    while (std::getline(in_, line_)) {
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        ++line_number_;
        if (line_.empty()) continue;
        split_line(line_, fields_);
        if (fields_.size() != n_columns_)
            throw ValidationError(path_ + ":" + std::to_string(line_number_) + ": expected " +
                                  std::to_string(n_columns_) + " fields, got " +
                                  std::to_string(fields_.size()));
        return true;
    }
    return false;
}

double CsvReader::field_double(std::size_t idx, const char* what) const {
    std::string_view f = fields_[idx];
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(value))
        throw ValidationError(path_ + ":" + std::to_string(line_number_) + ": bad " + what +
                              " '" + std::string(f) + "'");
    return value;
}

long long CsvReader::field_int(std::size_t idx, const char* what) const {
    std::string_view f = fields_[idx];
    long long value = 0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc() || ptr != f.data() + f.size())
        throw ValidationError(path_ + ":" + std::to_string(line_number_) + ": bad " + what +
                              " '" + std::string(f) + "'");
    return value;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary) {
    if (!out_)
        throw IoError("cannot write " + path);
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
    if (!out_)
        throw IoError("write failed on " + path_);
}

void CsvWriter::close() {
    if (out_.is_open()) {
        out_.close();
        if (!out_)
            throw IoError("close failed on " + path_);
    }
}

std::string CsvWriter::num(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[40];
    // %.9g keeps the artifacts compact while staying stable across reruns
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace lagwarp
