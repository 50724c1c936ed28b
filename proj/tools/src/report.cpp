#include "grushin_lab/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace grushin::lab {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

nlohmann::json number_json(double v) {
    // Non-finite numbers become null in JSON; the CSV keeps their spelled-out form.
    if (!std::isfinite(v)) return nullptr;
    return v;
}

nlohmann::json sample_json(const Sample& s) {
    nlohmann::json j = nlohmann::json::object();
    nlohmann::json idx = nlohmann::json::object();
    for (const auto& [k, v] : s.index) idx[k] = number_json(v);
    nlohmann::json vals = nlohmann::json::object();
    for (const auto& q : s.values) vals[q.name] = {{"value", number_json(q.value)}, {"method", q.method}};
    for (const auto& l : s.labels) vals[l.name] = {{"value", l.value}, {"method", l.method}};
    j["index"] = idx;
    j["values"] = vals;
    return j;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> index_columns(const ExperimentResult& r) {
    std::vector<std::string> cols;
    for (const auto& s : r.samples)
        for (const auto& [k, v] : s.index)
            if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    return cols;
}

}  // namespace

nlohmann::json to_json(const ExperimentResult& r, const nlohmann::json& config_echo) {
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["config"] = config_echo;
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : r.samples) samples.push_back(sample_json(s));
    j["samples"] = samples;
    j["summary"] = sample_json(r.summary)["values"];
    j["warnings"] = r.warnings;
    j["format_version"] = 1;
    return j;
}

std::string to_csv(const ExperimentResult& r) {
    const auto cols = index_columns(r);
    std::ostringstream os;
    os << "sample";
    for (const auto& c : cols) os << ',' << c;
    os << ",quantity,value,method\n";
    auto emit = [&](const std::string& id, const Sample& s) {
        std::vector<std::string> cells(cols.size());
        for (const auto& [k, v] : s.index)
            cells[std::find(cols.begin(), cols.end(), k) - cols.begin()] = format_number(v);
        auto prefix = [&] {
            os << id;
            for (const auto& c : cells) os << ',' << c;
        };
        for (const auto& q : s.values) {
            prefix();
            os << ',' << csv_escape(q.name) << ',' << format_number(q.value) << ',' << q.method << '\n';
        }
    };
    for (std::size_t i = 0; i < r.samples.size(); ++i) emit(std::to_string(i), r.samples[i]);
    emit("summary", r.summary);
    return os.str();
}

std::string to_gnuplot(const ExperimentResult& r) {
    const auto cols = index_columns(r);
    std::ostringstream os;
    os << "# Reads results.csv from the same directory.\n";
    os << "set datafile separator ','\n";
    os << "set terminal pngcairo size 900,600\n";
    os << "set key outside right\n";
    os << "set grid\n";
    if (cols.empty()) return os.str();
    const std::size_t xcol = 2;  // first index column
    const std::size_t qcol = 2 + cols.size();
    const std::size_t vcol = qcol + 1;
    os << "set xlabel '" << cols.front() << "'\n";
    for (const auto& q : r.plot_quantities) {
        os << "set output '" << r.experiment << '_' << q << ".png'\n";
        os << "set ylabel '" << q << "'\n";
        os << "plot 'results.csv' every ::1 using " << xcol << ":(strcol(" << qcol << ") eq '" << q << "' ? column("
           << vcol << ") : 1/0) with linespoints title '" << q << "'\n";
    }
    os << "unset output\n";
    return os.str();
}

void write_outputs(const ExperimentResult& r, const nlohmann::json& config_echo, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        f << text;
    };
    write("results.json", to_json(r, config_echo).dump(2) + "\n");
    write("results.csv", to_csv(r));
    write("plot.gp", to_gnuplot(r));
}

}  // namespace grushin::lab
