#include "qmereology/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct Cursor {
    const std::string& origin;
    int line;
    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(origin, line, msg); }
};

double to_real(const std::string& v, const Cursor& c) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x)) c.fail("expected a real number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& v, const Cursor& c) {
    long long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) c.fail("expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t to_unsigned(const std::string& v, const Cursor& c) {
    std::uint64_t x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) c.fail("expected a nonnegative integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& v, const Cursor& c) {
    const std::string s = lower(v);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    c.fail("expected a boolean, got '" + v + "'");
}

int positive_int(const std::string& v, const Cursor& c, long long min = 1) {
    const long long x = to_integer(v, c);
    if (x < min || x > 1000000) c.fail("value " + v + " out of range (minimum " + std::to_string(min) + ")");
    return static_cast<int>(x);
}

double positive_real(const std::string& v, const Cursor& c) {
    const double x = to_real(v, c);
    if (!(x > 0.0)) c.fail("value must be positive, got '" + v + "'");
    return x;
}

double nonnegative_real(const std::string& v, const Cursor& c) {
    const double x = to_real(v, c);
    if (!(x >= 0.0)) c.fail("value must be nonnegative, got '" + v + "'");
    return x;
}

int odd_dim(const std::string& v, const Cursor& c) {
    const int d = positive_int(v, c, 3);
    if (d % 2 == 0) c.fail("dimension must be odd, got " + v);
    return d;
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const Cursor&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"model",
         {
             {"d_a", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.model.d_A = odd_dim(v, c); }},
             {"d_b", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.model.d_B = odd_dim(v, c); }},
             {"mass", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.model.mass = positive_real(v, c); }},
             {"omega", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.model.omega = positive_real(v, c); }},
             {"lambda", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.model.lambda = to_real(v, c); }},
             {"alpha",
              [](ExperimentConfig& x, const std::string& v, const Cursor& c) {
                  if (lower(v) == "auto")
                      x.model.alpha.reset();
                  else
                      x.model.alpha = positive_real(v, c);
              }},
             {"scramble", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.scramble = nonnegative_real(v, c); }},
             {"scramble_seed", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.scramble_seed = to_unsigned(v, c); }},
         }},
        {"sweep",
         {
             {"seed", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.sweep.seed = to_unsigned(v, c); }},
             {"n_samples", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.sweep.n_samples = positive_int(v, c); }},
             {"step_sigma", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.sweep.step_sigma = positive_real(v, c); }},
             {"walk_mode",
              [](ExperimentConfig& x, const std::string& v, const Cursor& c) {
                  const std::string s = lower(v);
                  if (s == "independent") x.sweep.walk_mode = WalkMode::independent;
                  else if (s == "cumulative") x.sweep.walk_mode = WalkMode::cumulative;
                  else c.fail("walk_mode must be independent or cumulative, got '" + v + "'");
              }},
             {"time_mode",
              [](ExperimentConfig& x, const std::string& v, const Cursor& c) {
                  const std::string s = lower(v);
                  if (s == "coefficient") x.sweep.time_mode = TimeMode::coefficient;
                  else if (s == "evolved_t0") x.sweep.time_mode = TimeMode::evolved_t0;
                  else c.fail("time_mode must be coefficient or evolved_t0, got '" + v + "'");
              }},
             {"qml_guard", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.sweep.qml_guard = positive_real(v, c); }},
             {"state_width", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.sweep.state_width = nonnegative_real(v, c); }},
         }},
        {"cpo",
         {
             {"n_restarts", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.sweep.cpo.n_restarts = positive_int(v, c); }},
             {"max_iters", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.sweep.cpo.max_iters = positive_int(v, c); }},
             {"tol", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.sweep.cpo.tol = positive_real(v, c); }},
         }},
        {"output",
         {
             {"directory",
              [](ExperimentConfig& x, const std::string& v, const Cursor& c) {
                  x.output_directory = unquote(v);
                  if (x.output_directory.empty()) c.fail("output directory must not be empty");
              }},
             {"emit_plots", [](ExperimentConfig& x, const std::string& v, const Cursor& c) { x.emit_plots = to_bool(v, c); }},
         }},
    };
    return table;
}

std::string real_text(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw, section;
    std::map<std::string, int> seen;
    Cursor c{origin, 0};
    while (std::getline(in, raw)) {
        ++c.line;
        std::string line = raw;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') c.fail("unterminated section header '" + line + "'");
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (!setters().count(section)) c.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) c.fail("expected key = value, got '" + line + "'");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) c.fail("key '" + key + "' appears before any section header");
        const auto& keys = setters().at(section);
        const auto it = keys.find(key);
        if (it == keys.end()) c.fail("unknown key '" + key + "' in [" + section + "]");
        if (value.empty()) c.fail("missing value for '" + key + "'");
        const std::string full = section + "." + key;
        if (seen.count(full)) c.fail("duplicate key '" + key + "' (first set on line " + std::to_string(seen[full]) + ")");
        seen[full] = c.line;
        it->second(cfg, value, c);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string resolved_config_text(const ExperimentConfig& x) {
    std::ostringstream os;
    os << "[model]\n"
       << "d_a = " << x.model.d_A << "\n"
       << "d_b = " << x.model.d_B << "\n"
       << "mass = " << real_text(x.model.mass) << "\n"
       << "omega = " << real_text(x.model.omega) << "\n"
       << "lambda = " << real_text(x.model.lambda) << "\n"
       << "alpha = " << (x.model.alpha ? real_text(*x.model.alpha) : std::string("auto")) << "\n"
       << "scramble = " << real_text(x.scramble) << "\n"
       << "scramble_seed = " << x.scramble_seed << "\n\n"
       << "[sweep]\n"
       << "seed = " << x.sweep.seed << "\n"
       << "n_samples = " << x.sweep.n_samples << "\n"
       << "step_sigma = " << real_text(x.sweep.step_sigma) << "\n"
       << "walk_mode = " << (x.sweep.walk_mode == WalkMode::cumulative ? "cumulative" : "independent") << "\n"
       << "time_mode = " << (x.sweep.time_mode == TimeMode::coefficient ? "coefficient" : "evolved_t0") << "\n"
       << "qml_guard = " << real_text(x.sweep.qml_guard) << "\n"
       << "state_width = " << real_text(x.sweep.state_width) << "\n\n"
       << "[cpo]\n"
       << "n_restarts = " << x.sweep.cpo.n_restarts << "\n"
       << "max_iters = " << x.sweep.cpo.max_iters << "\n"
       << "tol = " << real_text(x.sweep.cpo.tol) << "\n\n"
       << "[output]\n"
       << "directory = " << x.output_directory << "\n"
       << "emit_plots = " << (x.emit_plots ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace qm
