#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace suptrap::io {

// Shortest decimal form that round-trips the exact double; locale-free.
std::string format_double(double x);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);

    void add_row(const std::vector<std::string>& cells);
    std::string str() const { return buffer_; }

private:
    std::size_t n_columns_;
    std::string buffer_;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const;
};

CsvTable read_csv(const std::string& text);

std::string read_file(const std::filesystem::path& path);

// Write via temp file + rename so a crash never leaves a partial artifact.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string sha256_hex(const std::string& bytes);

}  // namespace suptrap::io
