#include "transmonlab/io/output.hpp"

#include "transmonlab/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace tlab::io {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) {
        throw Error("output", "CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(header_.size()));
    }
    rows_.push_back(std::move(cells));
}

void CsvTable::add_numbers(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(cells[i]);
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)) {}

void OutputSet::add(const std::string& name, std::string content) {
    for (const auto& f : files_) {
        if (f.first == name) throw Error("output", "file '" + name + "' staged twice");
    }
    files_.emplace_back(name, std::move(content));
}

std::vector<std::string> OutputSet::names() const {
    std::vector<std::string> out;
    for (const auto& f : files_) out.push_back(f.first);
    return out;
}

const std::string& OutputSet::content(const std::string& name) const {
    for (const auto& f : files_) {
        if (f.first == name) return f.second;
    }
    throw Error("output", "no staged file '" + name + "'");
}

std::vector<fs::path> OutputSet::commit() const {
    ensure_writable_directory(dir_);
    std::vector<fs::path> temps;
    auto discard = [&] {
        std::error_code ec;
        for (const auto& t : temps) fs::remove(t, ec);
    };
    for (const auto& [name, content] : files_) {
        const fs::path tmp = dir_ / ("." + name + ".tmp");
        temps.push_back(tmp);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out) {
            discard();
            throw ConfigError("cannot write " + tmp.string());
        }
    }
    std::vector<fs::path> written;
    for (std::size_t i = 0; i < files_.size(); ++i) {
        const fs::path target = dir_ / files_[i].first;
        std::error_code ec;
        fs::rename(temps[i], target, ec);
        if (ec) {
            discard();
            throw ConfigError("cannot move " + temps[i].string() + " to " + target.string() + ": " + ec.message());
        }
        written.push_back(target);
    }
    return written;
}

void ensure_writable_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("output directory '" + dir.string() + "' cannot be created");
    const fs::path probe = dir / ".transmonlab-probe";
    {
        std::ofstream out(probe);
        if (!out) throw ConfigError("output directory '" + dir.string() + "' is not writable");
    }
    fs::remove(probe, ec);
}

}  // namespace tlab::io
