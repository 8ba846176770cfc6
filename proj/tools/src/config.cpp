#include "config.hpp"

#include <nhent/errors.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cli {

using nhent::ConfigError;

void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config " + (path.empty() ? std::string("/") : path) + ": " + msg);
}

// ---- tolerances

namespace {

struct TolEntry {
    const char* name;
    double Tolerances::*field;
};

constexpr TolEntry kTolTable[] = {
    {"degeneracy", &Tolerances::degeneracy},   {"defect_threshold", &Tolerances::defect_threshold},
    {"clamp", &Tolerances::clamp},             {"midgap", &Tolerances::midgap},
    {"cut_angle", &Tolerances::cut_angle},     {"imag", &Tolerances::imag},
    {"oracle", &Tolerances::oracle},           {"spectrum", &Tolerances::spectrum},
    {"correlation", &Tolerances::correlation}, {"purity", &Tolerances::purity},
    {"unitary", &Tolerances::unitary},         {"dynamics_purity", &Tolerances::dynamics_purity},
};

} // namespace

void Tolerances::set(const std::string& name, double value) {
    if (!std::isfinite(value) || value <= 0) throw ConfigError("tolerance " + name + " must be positive and finite");
    for (const auto& e : kTolTable)
        if (name == e.name) {
            this->*e.field = value;
            return;
        }
    throw ConfigError("unknown tolerance '" + name + "'");
}

json Tolerances::to_json() const {
    json j = json::object();
    for (const auto& e : kTolTable) j[e.name] = this->*e.field;
    return j;
}

const std::vector<std::string>& Tolerances::names() {
    static const std::vector<std::string> n = [] {
        std::vector<std::string> v;
        for (const auto& e : kTolTable) v.emplace_back(e.name);
        return v;
    }();
    return n;
}

void apply_tolerances(Fields& f, Tolerances& tol) {
    if (!f.has("tolerances")) return;
    const json& t = f.at("tolerances");
    const std::string p = f.path("tolerances");
    if (!t.is_object()) fail(p, "expected an object");
    for (const auto& [k, v] : t.items()) {
        if (!v.is_number()) fail(p + "/" + k, "expected a number");
        try {
            tol.set(k, v.get<double>());
        } catch (const ConfigError& e) {
            fail(p + "/" + k, e.what());
        }
    }
}

// ---- field reader

Fields::Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
}

bool Fields::has(const std::string& key) const { return j_.contains(key); }

const json& Fields::at(const std::string& key) {
    if (!j_.contains(key)) fail(path(key), "required field missing");
    used_.insert(key);
    return j_.at(key);
}

double Fields::number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) fail(path(key), "expected a number");
    return v.get<double>();
}

double Fields::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

int Fields::integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(path(key), "expected an integer");
    return v.get<int>();
}

int Fields::integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

std::string Fields::string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) fail(path(key), "expected a string");
    return v.get<std::string>();
}

std::string Fields::string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
}

bool Fields::boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) fail(path(key), "expected true or false");
    return v.get<bool>();
}

std::vector<int> Fields::integers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) fail(path(key), "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number_integer()) fail(path(key) + "/" + std::to_string(i), "expected an integer");
        out.push_back(v[i].get<int>());
    }
    return out;
}

std::vector<double> Fields::numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) fail(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(path(key) + "/" + std::to_string(i), "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

void Fields::only(std::initializer_list<const char*> allowed) const {
    for (const auto& [k, v] : j_.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            fail(path(k), "unknown key");
}

void Fields::finish() const {
    for (const auto& [k, v] : j_.items())
        if (!used_.count(k)) fail(path(k), "unknown key");
}

// ---- files

json load_json(const std::string& path, std::string* raw) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (raw) *raw = text;
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// ---- model

nhent::ModelSpec parse_model(const json& j, const std::string& path) {
    Fields f(j, path);
    f.only({"family", "params", "options", "bc"});
    nhent::ModelSpec m;
    try {
        m.family = nhent::family_from_string(f.string("family"));
    } catch (const ConfigError& e) {
        fail(f.path("family"), e.what());
    }
    if (f.has("params")) {
        const json& p = f.at("params");
        if (!p.is_object()) fail(f.path("params"), "expected an object");
        for (const auto& [k, v] : p.items()) {
            if (!v.is_number()) fail(f.path("params") + "/" + k, "expected a number");
            m.params[k] = v.get<double>();
        }
    }
    if (f.has("options")) {
        const json& o = f.at("options");
        if (!o.is_object()) fail(f.path("options"), "expected an object");
        for (const auto& [k, v] : o.items()) {
            if (!v.is_string()) fail(f.path("options") + "/" + k, "expected a string");
            m.options[k] = v.get<std::string>();
        }
    }
    try {
        m.bc = nhent::boundary_from_string(f.string("bc", "open"));
    } catch (const ConfigError& e) {
        fail(f.path("bc"), e.what());
    }
    f.finish();
    try {
        return nhent::complete(m);
    } catch (const ConfigError& e) {
        fail(path, e.what());
    }
}

json model_to_json(const nhent::ModelSpec& m) {
    json j;
    j["family"] = nhent::to_string(m.family);
    j["params"] = json::object();
    for (const auto& [k, v] : m.params) j["params"][k] = v;
    j["options"] = json::object();
    for (const auto& [k, v] : m.options) j["options"][k] = v;
    j["bc"] = nhent::to_string(m.bc);
    return j;
}

// ---- partitions

PartitionSpec parse_partition(const json& j, const std::string& path, int index) {
    Fields f(j, path);
    f.only({"name", "space", "range", "sites", "prefix_cells", "dual_half"});
    PartitionSpec p;
    p.name = f.string("name", "P" + std::to_string(index));
    try {
        p.space = nhent::space_from_string(f.string("space", "position"));
    } catch (const ConfigError& e) {
        fail(f.path("space"), e.what());
    }
    int kinds = 0;
    if (f.has("range")) {
        ++kinds;
        p.kind = PartitionSpec::Kind::range;
        p.values = f.integers("range");
        if (p.values.size() != 2 || p.values[0] < 0 || p.values[1] <= p.values[0])
            fail(f.path("range"), "expected [begin, end) with 0 <= begin < end");
    }
    if (f.has("sites")) {
        ++kinds;
        p.kind = PartitionSpec::Kind::sites;
        p.values = f.integers("sites");
        if (p.values.empty()) fail(f.path("sites"), "empty site list");
    }
    if (f.has("prefix_cells")) {
        ++kinds;
        p.kind = PartitionSpec::Kind::prefix_cells;
        p.values = f.integers("prefix_cells");
        if (p.values.empty()) fail(f.path("prefix_cells"), "empty L_A list");
        for (std::size_t i = 0; i < p.values.size(); ++i) {
            if (p.values[i] < 1) fail(f.path("prefix_cells") + "/" + std::to_string(i), "L_A must be >= 1");
            if (i && p.values[i] <= p.values[i - 1]) fail(f.path("prefix_cells"), "L_A values must increase strictly");
        }
    }
    if (f.has("dual_half")) {
        ++kinds;
        p.kind = PartitionSpec::Kind::dual_half;
        p.dual_p = f.integer("dual_half");
        if (p.space != nhent::Space::momentum) fail(f.path("dual_half"), "requires space = momentum");
    }
    if (kinds != 1) fail(path, "exactly one of range, sites, prefix_cells, dual_half is required");
    f.finish();
    return p;
}

std::vector<ResolvedPartition> resolve(const PartitionSpec& spec, const nhent::KernelMatrix& K) {
    const int spc = K.sublattices();
    const int cells = K.cells();
    std::vector<ResolvedPartition> out;
    switch (spec.kind) {
    case PartitionSpec::Kind::range:
        out.push_back({spec.name, spec.values[1] - spec.values[0],
                       nhent::Partition::range(spec.values[0], spec.values[1], spec.space)});
        break;
    case PartitionSpec::Kind::sites:
        out.push_back({spec.name, static_cast<int>(spec.values.size()), nhent::Partition::of(spec.values, spec.space)});
        break;
    case PartitionSpec::Kind::prefix_cells:
        for (int la : spec.values) out.push_back({spec.name, la, nhent::Partition::range(0, la * spc, spec.space)});
        break;
    case PartitionSpec::Kind::dual_half: {
        const long p = ((spec.dual_p % cells) + cells) % cells;
        if (std::gcd(p, static_cast<long>(cells)) != 1)
            throw nhent::PartitionError("partition " + spec.name + ": dual_half p must be coprime to the cell count");
        long pinv = 1;
        while (pinv * p % cells != 1) ++pinv;
        std::vector<int> idx;
        int count = 0;
        for (int m = 0; m < cells; ++m)
            if (m * pinv % cells < cells / 2) {
                ++count;
                for (int s = 0; s < spc; ++s) idx.push_back(m * spc + s);
            }
        out.push_back({spec.name, count, nhent::Partition::of(idx, nhent::Space::momentum)});
        break;
    }
    }
    for (auto& r : out) {
        try {
            r.partition.validate(K.dim());
        } catch (const nhent::ValidationError& e) {
            throw nhent::PartitionError("partition " + spec.name + ": " + e.what());
        }
    }
    return out;
}

// ---- sweeps

std::vector<SweepPoint> expand_sweep(const nhent::ModelSpec& base, const std::vector<SweepAxis>& axes) {
    std::vector<SweepPoint> pts{{{}, base}};
    for (const auto& ax : axes) {
        std::vector<SweepPoint> next;
        for (const auto& p : pts)
            for (double v : ax.values) {
                SweepPoint q = p;
                q.params.emplace_back(ax.param, v);
                q.model.params[ax.param] = v;
                next.push_back(std::move(q));
            }
        pts = std::move(next);
    }
    return pts;
}

RunConfig parse_run_config(const json& j, bool allow_quantities) {
    Fields f(j, "");
    if (allow_quantities)
        f.only({"model", "filling", "policy", "partitions", "quantities", "renyi_orders", "sweep", "tolerances"});
    else
        f.only({"model", "filling", "policy", "partitions", "sweep", "tolerances"});
    RunConfig rc;
    rc.model = parse_model(f.at("model"), "/model");
    try {
        rc.filling = nhent::parse_rational(f.string("filling", "1/2"));
    } catch (const ConfigError& e) {
        fail("/filling", e.what());
    }
    try {
        rc.policy = nhent::policy_from_string(f.string("policy", "real_part"));
    } catch (const ConfigError& e) {
        fail("/policy", e.what());
    }

    const json& parts = f.at("partitions");
    if (!parts.is_array() || parts.empty()) fail("/partitions", "expected a non-empty array");
    for (std::size_t i = 0; i < parts.size(); ++i)
        rc.partitions.push_back(parse_partition(parts[i], "/partitions/" + std::to_string(i), static_cast<int>(i)));
    std::set<std::string> names;
    for (const auto& p : rc.partitions) {
        if (!names.insert(p.name).second) fail("/partitions", "duplicate partition name '" + p.name + "'");
        if (p.space == nhent::Space::momentum && rc.model.bc == nhent::Boundary::open)
            fail("/partitions", "momentum partition '" + p.name + "' needs a periodic or antiperiodic model");
    }

    if (allow_quantities) {
        static const std::set<std::string> known = {"entropy", "renyi", "modified", "spectrum", "midgap",
                                                    "mutual_information"};
        rc.quantities = {"entropy", "renyi", "modified", "midgap"};
        if (f.has("quantities")) {
            rc.quantities.clear();
            const json& q = f.at("quantities");
            if (!q.is_array()) fail("/quantities", "expected an array of strings");
            for (std::size_t i = 0; i < q.size(); ++i) {
                if (!q[i].is_string() || !known.count(q[i].get<std::string>()))
                    fail("/quantities/" + std::to_string(i), "unknown quantity");
                rc.quantities.insert(q[i].get<std::string>());
            }
        }
        if (rc.quantities.count("mutual_information")) {
            if (rc.partitions.size() < 2) fail("/quantities", "mutual_information needs two partitions");
            for (int i = 0; i < 2; ++i)
                if (rc.partitions[i].space != nhent::Space::position ||
                    rc.partitions[i].kind == PartitionSpec::Kind::prefix_cells ||
                    rc.partitions[i].kind == PartitionSpec::Kind::dual_half)
                    fail("/partitions/" + std::to_string(i),
                         "mutual_information uses the first two partitions; they must be position range or sites");
        }
        if (f.has("renyi_orders")) {
            rc.renyi_orders = f.integers("renyi_orders");
            for (int n : rc.renyi_orders)
                if (n < 2) fail("/renyi_orders", "orders must be >= 2");
            if (std::find(rc.renyi_orders.begin(), rc.renyi_orders.end(), 2) == rc.renyi_orders.end())
                rc.renyi_orders.insert(rc.renyi_orders.begin(), 2);
        }
    }

    if (f.has("sweep")) {
        const json& s = f.at("sweep");
        if (!s.is_array()) fail("/sweep", "expected an array of {param, values}");
        const auto& info = nhent::family_info(rc.model.family);
        std::set<std::string> seen;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string p = "/sweep/" + std::to_string(i);
            Fields a(s[i], p);
            SweepAxis ax;
            ax.param = a.string("param");
            const bool known = std::count(info.required.begin(), info.required.end(), ax.param) ||
                               info.defaults.count(ax.param);
            if (!known) fail(a.path("param"), "'" + ax.param + "' is not a parameter of " + nhent::to_string(info.family));
            if (!seen.insert(ax.param).second) fail(a.path("param"), "parameter swept twice");
            ax.values = a.numbers("values");
            if (ax.values.empty()) fail(a.path("values"), "empty value list");
            std::vector<double> sorted = ax.values;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                fail(a.path("values"), "duplicate sweep value");
            a.finish();
            rc.sweep.push_back(std::move(ax));
        }
        for (const auto& pt : expand_sweep(rc.model, rc.sweep)) {
            try {
                nhent::complete(pt.model);
            } catch (const ConfigError& e) {
                fail("/sweep", e.what());
            }
        }
    }

    apply_tolerances(f, rc.tol);
    f.finish();
    return rc;
}

} // namespace cli
