#pragma once

// Text emission shared by the commands: round-trip number formatting, CSV
// tables and an all-or-nothing file set.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace tlab::io {

// Shortest decimal that parses back to the same double; NaN gives "".
std::string format_number(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    // Numeric row, every cell formatted with format_number.
    void add_numbers(const std::vector<double>& values);

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Quotes a cell when it holds a comma, quote or line break.
std::string csv_escape(const std::string& cell);

// Files staged in memory and written together. commit() writes every file to
// a temporary sibling first and renames only once all writes succeeded.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);

    void add(const std::string& name, std::string content);
    bool empty() const noexcept { return files_.empty(); }
    std::vector<std::string> names() const;
    const std::string& content(const std::string& name) const;

    // Returns the written paths. Throws ConfigError when the directory cannot
    // be created or a file cannot be written; nothing is left behind then.
    std::vector<std::filesystem::path> commit() const;

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

// Creates `dir` if needed and checks a file can be created in it.
void ensure_writable_directory(const std::filesystem::path& dir);

}  // namespace tlab::io
