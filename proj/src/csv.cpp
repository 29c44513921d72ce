#include "qmereology/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qm {

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

CsvTable& CsvTable::row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::invalid_argument("csv: row width does not match header");
    rows_.push_back(std::move(cells));
    return *this;
}

std::string CsvTable::str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << quote(cells[i]);
        os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const { write_file(path, str()); }

void write_manifest(const std::filesystem::path& dir, const Manifest& m) {
    std::ostringstream os;
    os << "command = " << m.command << "\n"
       << "version = " << QMEREOLOGY_VERSION << "\n"
       << "runtime_seconds = " << format_real(m.runtime_seconds) << "\n";
    for (const auto& [k, v] : m.entries) os << k << " = " << v << "\n";
    for (const auto& a : m.artifacts) os << "artifact = " << a << "\n";
    if (!m.resolved_config.empty()) os << "\n# resolved configuration\n" << m.resolved_config;
    write_file(dir / "manifest", os.str());
}

}  // namespace qm
