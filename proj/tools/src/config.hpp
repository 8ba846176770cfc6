#pragma once

#include <nhent/corr.hpp>
#include <nhent/model_zoo.hpp>
#include <nhent/spectra.hpp>

#include <json.hpp>

#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cli {

using json = nlohmann::ordered_json;

struct Tolerances {
    double degeneracy = 1e-12;
    double defect_threshold = 1e12;
    double clamp = 1e-12;
    double midgap = 0.05;
    double cut_angle = 1e-5;
    double imag = 1e-6;
    double oracle = 1e-8;
    double spectrum = 1e-9;
    double correlation = 1e-10;
    double purity = 1e-10;
    double unitary = 1e-8;
    double dynamics_purity = 1e-9;

    void set(const std::string& name, double value);
    json to_json() const;
    static const std::vector<std::string>& names();
};

// Reads an object field by field; finish() rejects keys that were never read.
class Fields {
public:
    Fields(const json& j, std::string path);

    bool has(const std::string& key) const;
    const json& at(const std::string& key);
    std::string path(const std::string& key) const { return path_ + "/" + key; }

    double number(const std::string& key);
    double number(const std::string& key, double fallback);
    int integer(const std::string& key);
    int integer(const std::string& key, int fallback);
    std::string string(const std::string& key);
    std::string string(const std::string& key, const std::string& fallback);
    bool boolean(const std::string& key, bool fallback);
    std::vector<int> integers(const std::string& key);
    std::vector<double> numbers(const std::string& key);

    // Fails on the first key outside `allowed`, before any required-field check can mask a typo.
    void only(std::initializer_list<const char*> allowed) const;
    void finish() const;

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

[[noreturn]] void fail(const std::string& path, const std::string& msg);

json load_json(const std::string& path, std::string* raw = nullptr);

nhent::ModelSpec parse_model(const json& j, const std::string& path);
json model_to_json(const nhent::ModelSpec& m);

struct PartitionSpec {
    enum class Kind { range, sites, prefix_cells, dual_half };
    std::string name;
    nhent::Space space = nhent::Space::position;
    Kind kind = Kind::range;
    std::vector<int> values; // range: {begin, end}; sites; prefix_cells: L_A list
    int dual_p = 0;
};

struct ResolvedPartition {
    std::string name;
    int la = 0;
    nhent::Partition partition;
};

PartitionSpec parse_partition(const json& j, const std::string& path, int index);
std::vector<ResolvedPartition> resolve(const PartitionSpec& spec, const nhent::KernelMatrix& K);

struct SweepAxis {
    std::string param;
    std::vector<double> values;
};

struct SweepPoint {
    std::vector<std::pair<std::string, double>> params;
    nhent::ModelSpec model;
};

std::vector<SweepPoint> expand_sweep(const nhent::ModelSpec& base, const std::vector<SweepAxis>& axes);

struct RunConfig {
    nhent::ModelSpec model;
    nhent::Rational filling{1, 2};
    nhent::Policy policy = nhent::Policy::real_part;
    std::vector<PartitionSpec> partitions;
    std::set<std::string> quantities;
    std::vector<int> renyi_orders{2};
    std::vector<SweepAxis> sweep;
    Tolerances tol;
};

// Shared by entanglement and duality.
RunConfig parse_run_config(const json& j, bool allow_quantities);

void apply_tolerances(Fields& f, Tolerances& tol);

} // namespace cli
