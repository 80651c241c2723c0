#include "holeburn/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "holeburn/errors.hpp"

namespace holeburn {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string_view sv(line);
    std::size_t start = 0;
    while (true) {
        const auto comma = sv.find(',', start);
        out.push_back(trim(sv.substr(start, comma == std::string_view::npos ? sv.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& v) {
    if (s == "nan" || s == "NaN") {
        v = std::numeric_limits<double>::quiet_NaN();
        return true;
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError("CSV is missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable read_csv(std::istream& in, const std::string& source) {
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '#') {
            const auto eq = s.find('=');
            if (eq != std::string::npos)
                t.metadata[trim(std::string_view(s).substr(1, eq - 1))] =
                    trim(std::string_view(s).substr(eq + 1));
            continue;
        }
        const auto fields = split(s);
        if (!have_header) {
            for (const auto& f : fields) {
                double dummy = 0.0;
                if (f.empty() || parse_double(f, dummy))
                    throw InputError(source + ": malformed CSV header on line " + std::to_string(lineno));
                if (std::count(fields.begin(), fields.end(), f) > 1)
                    throw InputError(source + ": duplicate column '" + f + "'");
            }
            t.header = fields;
            t.columns.assign(fields.size(), {});
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size())
            throw InputError(source + ": line " + std::to_string(lineno) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(t.header.size()));
        for (std::size_t j = 0; j < fields.size(); ++j) {
            double v = 0.0;
            if (!parse_double(fields[j], v))
                throw InputError(source + ": bad number '" + fields[j] + "' on line " +
                                 std::to_string(lineno));
            t.columns[j].push_back(v);
        }
    }
    if (!have_header) throw InputError(source + ": no CSV header found");
    return t;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return read_csv(in, path.string());
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (const auto& [k, v] : table.metadata) out << "# " << k << " = " << v << '\n';
    for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
    out << '\n';
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t j = 0; j < table.columns.size(); ++j)
            out << (j ? "," : "") << format_double(table.columns[j][i]);
        out << '\n';
    }
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    write_csv(out, table);
    if (!out) throw InputError("write to '" + path.string() + "' failed");
}

CsvTable signal_table(const std::vector<double>& time, const std::vector<double>& model_signal,
                      const std::vector<double>& scaled, const Metadata& meta) {
    CsvTable t;
    t.metadata = meta;
    t.header = {"time_s", "model_signal", "scaled_counts_per_s"};
    t.columns = {time, model_signal, scaled};
    return t;
}

DecayCurve decay_curve_from_table(const CsvTable& t) {
    DecayCurve c;
    c.time = t.columns[t.column("time_s")];
    if (t.has_column("scaled_counts_per_s"))
        c.counts = t.columns[t.column("scaled_counts_per_s")];
    else
        c.counts = t.columns[t.column("counts_per_s")];
    if (t.has_column("model_signal")) c.model_signal = t.columns[t.column("model_signal")];
    c.metadata = t.metadata;
    if (const auto it = t.metadata.find("power_w"); it != t.metadata.end()) {
        double p = 0.0;
        if (!parse_double(it->second, p)) throw InputError("bad power_w metadata '" + it->second + "'");
        c.power = p;
    }
    c.validate();
    return c;
}

CsvTable decay_curve_table(const DecayCurve& c) {
    auto model = c.model_signal;
    if (model.empty()) model.assign(c.time.size(), std::numeric_limits<double>::quiet_NaN());
    return signal_table(c.time, model, c.counts, c.metadata);
}

RawScan raw_scan_from_table(const CsvTable& t) {
    RawScan s;
    s.freq = t.columns[t.column("freq_hz")];
    s.fluor_counts = t.columns[t.column("fluor_counts")];
    s.power_monitor = t.columns[t.column("power_counts")];
    s.metadata = t.metadata;
    if (const auto it = t.metadata.find("aom_off"); it != t.metadata.end())
        s.aom_off = parse_index_range(it->second);
    return s;
}

CsvTable raw_scan_table(const RawScan& s) {
    CsvTable t;
    t.metadata = s.metadata;
    if (!s.aom_off.empty()) t.metadata["aom_off"] = format_index_range(s.aom_off);
    t.header = {"freq_hz", "fluor_counts", "power_counts"};
    t.columns = {s.freq, s.fluor_counts, s.power_monitor};
    return t;
}

CsvTable treated_scan_table(const RawScan& background_free, const NormalizedScan& n) {
    CsvTable t = raw_scan_table(background_free);
    t.header.push_back("normalized_signal");
    t.header.push_back("excluded");
    t.columns.push_back(n.signal);
    std::vector<double> ex(n.excluded.size());
    std::transform(n.excluded.begin(), n.excluded.end(), ex.begin(),
                   [](bool b) { return b ? 1.0 : 0.0; });
    t.columns.push_back(std::move(ex));
    return t;
}

} // namespace holeburn
