#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qm {

// 17 significant digits; nan and inf spelled as such.
std::string format_real(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row(std::vector<std::string> cells);
    std::string str() const;
    void write(const std::filesystem::path& path) const;
    std::size_t size() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct Manifest {
    std::string command;
    std::string resolved_config;
    double runtime_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> artifacts;
};

// Writes <dir>/manifest as key = value lines followed by the resolved configuration.
void write_manifest(const std::filesystem::path& dir, const Manifest& m);

}  // namespace qm
