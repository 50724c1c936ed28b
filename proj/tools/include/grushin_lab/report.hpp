#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace grushin::lab {

// Provenance tags attached to every reported number.
namespace method {
inline constexpr const char* kKummer = "kummer";
inline constexpr const char* kFdOracle = "fd_oracle";
inline constexpr const char* kClosedForm = "closed_form";
inline constexpr const char* kMehler = "mehler";
inline constexpr const char* kFit = "fit";
}  // namespace method

struct Quantity {
    std::string name;
    double value = 0.0;
    std::string method;
};

struct Label {
    std::string name;
    std::string value;
    std::string method;
};

struct Sample {
    std::vector<std::pair<std::string, double>> index;  // sweep coordinates (inputs)
    std::vector<Quantity> values;
    std::vector<Label> labels;

    Sample& at(std::string name, double v) {
        index.emplace_back(std::move(name), v);
        return *this;
    }
    Sample& put(std::string name, double v, std::string m) {
        values.push_back({std::move(name), v, std::move(m)});
        return *this;
    }
    Sample& tag(std::string name, std::string v, std::string m) {
        labels.push_back({std::move(name), std::move(v), std::move(m)});
        return *this;
    }
};

struct ExperimentResult {
    std::string experiment;
    std::vector<Sample> samples;
    Sample summary;
    std::vector<std::string> warnings;
    std::vector<std::string> plot_quantities;  // drawn by plot.gp
};

nlohmann::json to_json(const ExperimentResult& r, const nlohmann::json& config_echo);
std::string to_csv(const ExperimentResult& r);
std::string to_gnuplot(const ExperimentResult& r);

// Shortest round-trip decimal, locale independent; "nan"/"inf"/"-inf" otherwise.
std::string format_number(double v);

void write_outputs(const ExperimentResult& r, const nlohmann::json& config_echo, const std::string& dir);

}  // namespace grushin::lab
