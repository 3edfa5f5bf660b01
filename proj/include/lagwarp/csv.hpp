#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace lagwarp {

// Line-oriented CSV access for the plain comma-separated schemas this project
// uses (no quoting or embedded separators). Fields are views into an internal
// line buffer that stays valid until the next call to next_row().
class CsvReader {
public:
    CsvReader(const std::string& path, std::vector<std::string> expected_header);

    bool next_row();
    const std::vector<std::string_view>& fields() const { return fields_; }
    std::size_t line_number() const { return line_number_; }
    const std::string& path() const { return path_; }

    double field_double(std::size_t idx, const char* what) const;
    long long field_int(std::size_t idx, const char* what) const;

private:
    std::string path_;
    std::ifstream in_;
    std::string line_;
    std::vector<std::string_view> fields_;
    std::size_t n_columns_ = 0;
    std::size_t line_number_ = 0;
};

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& fields);
    void close();

    // Deterministic float formatting shared by every emitted artifact.
    static std::string num(double v);

private:
    std::string path_;
    std::ofstream out_;
};

} // namespace lagwarp
