#include "gslab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gslab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& section, const std::string& key,
                    const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + section + "." + key + ": '" +
                          value + "'");
    }
}

int parse_int(const std::string& section, const std::string& key,
              const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + section + "." + key + ": '" +
                          value + "'");
    }
}

bool parse_bool(const std::string& section, const std::string& key,
                const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("bad boolean value for " + section + "." + key + ": '" + value +
                      "'");
}

void apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
    if (section == "problem") {
        if (key == "N") cfg.N = parse_int(section, key, value);
        else if (key == "p") cfg.p = parse_double(section, key, value);
        else if (key == "q") {
            if (value == "pstar") {
                cfg.q_is_pstar = true;
            } else {
                cfg.q_is_pstar = false;
                cfg.q = parse_double(section, key, value);
            }
        } else if (key == "l") cfg.l = parse_double(section, key, value);
        else if (key == "eps") cfg.eps = parse_double(section, key, value);
        else if (key == "kind") cfg.kind = equation_kind_from_string(value);
        else throw ConfigError("unknown key problem." + key);
    } else if (section == "sweep") {
        if (key == "eps_lo") cfg.eps_lo = parse_double(section, key, value);
        else if (key == "eps_hi") cfg.eps_hi = parse_double(section, key, value);
        else if (key == "points_per_decade")
            cfg.points_per_decade = parse_int(section, key, value);
        else throw ConfigError("unknown key sweep." + key);
    } else if (section == "integrator") {
        if (key == "rel_tol") cfg.integrator.rel_tol = parse_double(section, key, value);
        else if (key == "abs_tol") cfg.integrator.abs_tol = parse_double(section, key, value);
        else if (key == "bisection_tol")
            cfg.integrator.bisection_tol = parse_double(section, key, value);
        else if (key == "max_bisections")
            cfg.integrator.max_bisections = parse_int(section, key, value);
        else if (key == "r_start_factor")
            cfg.integrator.r_start_factor = parse_double(section, key, value);
        else if (key == "r_max") {
            cfg.integrator.r_max = (value == "auto") ? 0.0 : parse_double(section, key, value);
        } else throw ConfigError("unknown key integrator." + key);
    } else if (section == "fit") {
        if (key == "table") cfg.fit_table = value;
        else if (key == "column") cfg.fit_column = value;
        else if (key == "log_power") cfg.fit_log_power = value;
        else if (key == "tolerance") cfg.fit_tolerance = parse_double(section, key, value);
        else if (key == "window") cfg.fit_window = parse_double(section, key, value);
        else throw ConfigError("unknown key fit." + key);
    } else if (section == "output") {
        if (key == "dir") cfg.out_dir = value;
        else if (key == "emit_plot_data") cfg.emit_plot_data = parse_bool(section, key, value);
        else if (key == "jobs") cfg.jobs = parse_int(section, key, value);
        else throw ConfigError("unknown key output." + key);
    } else {
        throw ConfigError("unknown config section [" + section + "]");
    }
}

} // namespace

ProblemParams RunConfig::problem() const {
    ProblemParams params;
    params.N = N;
    params.p = p;
    params.q = q_is_pstar ? p_star(N, p) : q;
    params.l = l;
    params.eps = eps;
    try {
        params.validate();
    } catch (const ParamError& e) {
        throw ConfigError(std::string("invalid problem parameters: ") + e.what());
    }
    return params;
}

void RunConfig::apply_override(const std::string& key_value) {
    const auto eq = key_value.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like section.key=value: '" + key_value + "'");
    const std::string key_path = trim(key_value.substr(0, eq));
    const std::string value = trim(key_value.substr(eq + 1));
    const auto dot = key_path.find('.');
    if (dot == std::string::npos)
        throw ConfigError("override key must be section.key: '" + key_path + "'");
    apply_key(*this, key_path.substr(0, dot), key_path.substr(dot + 1), value);
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("bad section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        if (section.empty())
            throw ConfigError("key outside any section at line " + std::to_string(lineno));
        apply_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string fmt12(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.11e", value);
    return buf;
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[problem]\n";
    os << "N = " << c.N << "\n";
    os << "p = " << fmt12(c.p) << "\n";
    if (c.q_is_pstar) os << "q = pstar\n";
    else os << "q = " << fmt12(c.q) << "\n";
    os << "l = " << fmt12(c.l) << "\n";
    os << "eps = " << fmt12(c.eps) << "\n";
    os << "kind = " << to_string(c.kind) << "\n";
    os << "[sweep]\n";
    os << "eps_lo = " << fmt12(c.eps_lo) << "\n";
    os << "eps_hi = " << fmt12(c.eps_hi) << "\n";
    os << "points_per_decade = " << c.points_per_decade << "\n";
    os << "[integrator]\n";
    os << "rel_tol = " << fmt12(c.integrator.rel_tol) << "\n";
    os << "abs_tol = " << fmt12(c.integrator.abs_tol) << "\n";
    os << "bisection_tol = " << fmt12(c.integrator.bisection_tol) << "\n";
    os << "max_bisections = " << c.integrator.max_bisections << "\n";
    os << "r_start_factor = " << fmt12(c.integrator.r_start_factor) << "\n";
    if (c.integrator.r_max <= 0.0) os << "r_max = auto\n";
    else os << "r_max = " << fmt12(c.integrator.r_max) << "\n";
    os << "[fit]\n";
    os << "table = " << c.fit_table << "\n";
    os << "column = " << c.fit_column << "\n";
    os << "log_power = " << c.fit_log_power << "\n";
    os << "tolerance = " << fmt12(c.fit_tolerance) << "\n";
    os << "window = " << fmt12(c.fit_window) << "\n";
    os << "[output]\n";
    os << "dir = " << c.out_dir << "\n";
    os << "emit_plot_data = " << (c.emit_plot_data ? "true" : "false") << "\n";
    os << "jobs = " << c.jobs << "\n";
    return os.str();
}

std::uint64_t config_hash(const RunConfig& config) {
    const std::string text = serialize_config(config);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> CsvTable::numeric_column(const std::string& name,
                                             const std::string& status_filter) const {
    const int idx = column_index(name);
    if (idx < 0) throw ConfigError("CSV column '" + name + "' not found");
    const int status_idx = column_index("status");
    std::vector<double> out;
    for (const auto& row : rows) {
        if (!status_filter.empty() && status_idx >= 0 &&
            row[status_idx].rfind(status_filter, 0) != 0)
            continue;
        out.push_back(std::stod(row[idx]));
    }
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file '" + path + "'");
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            table.header = cells;
            first = false;
        } else {
            cells.resize(table.header.size());
            table.rows.push_back(cells);
        }
    }
    return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write CSV file '" + path + "'");
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << table.header[i] << (i + 1 < table.header.size() ? "," : "\n");
    for (const auto& row : table.rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

} // namespace gslab
