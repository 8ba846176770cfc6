#include "commands.hpp"

#include "config.hpp"
#include "output.hpp"

#include <nhent/corr.hpp>
#include <nhent/dynamics.hpp>
#include <nhent/ent.hpp>
#include <nhent/errors.hpp>
#include <nhent/model_zoo.hpp>
#include <nhent/oracle.hpp>
#include <nhent/parallel.hpp>
#include <nhent/scaling.hpp>
#include <nhent/spectra.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace cli {

namespace fs = std::filesystem;
using namespace nhent;

namespace {

constexpr double kConditionWarning = 1e8;

fs::path out_dir(const Options& o) {
    const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
    fs::create_directories(dir);
    return dir;
}

void apply_overrides(const Options& o, Tolerances& tol) {
    for (const auto& [name, value] : o.tolerances) tol.set(name, value);
}

EigOptions eig_options(const Tolerances& t) {
    EigOptions e;
    e.defect_threshold = t.defect_threshold;
    return e;
}

EntOptions ent_options(const Tolerances& t, const std::vector<int>& orders = {2}) {
    EntOptions e;
    e.clamp_tol = t.clamp;
    e.midgap_tol = t.midgap;
    e.cut_angle = t.cut_angle;
    e.renyi_orders = orders;
    return e;
}

json params_json(const SweepPoint& p) {
    json j = json::object();
    for (const auto& [k, v] : p.params) j[k] = v;
    return j;
}

std::string status_of(const std::exception& e) {
    if (dynamic_cast<const DefectiveError*>(&e)) return "defective";
    if (dynamic_cast<const DegeneracyError*>(&e)) return "degenerate";
    if (dynamic_cast<const CollapseError*>(&e)) return "collapse";
    return "error";
}

// ---- sweep preparation shared by entanglement and duality

struct Prepared {
    SweepPoint point;
    KernelMatrix K;
    std::optional<KernelMatrix> Kk;
    std::vector<std::vector<ResolvedPartition>> parts; // per partition spec
};

std::vector<Prepared> prepare(const RunConfig& rc, bool mutual_information) {
    const bool need_k = std::any_of(rc.partitions.begin(), rc.partitions.end(),
                                    [](const PartitionSpec& p) { return p.space == Space::momentum; });
    std::vector<Prepared> out;
    const auto pts = expand_sweep(rc.model, rc.sweep);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Prepared p;
        p.point = pts[i];
        try {
            p.K = build(pts[i].model);
            if (need_k) p.Kk = momentum_transform(p.K);
            for (const auto& spec : rc.partitions)
                p.parts.push_back(resolve(spec, spec.space == Space::momentum ? *p.Kk : p.K));
        } catch (const ValidationError& e) {
            throw ConfigError("sweep point " + std::to_string(i) + ": " + e.what());
        }
        if (mutual_information) {
            const auto& a = p.parts[0][0].partition.indices;
            const auto& b = p.parts[1][0].partition.indices;
            for (int x : a)
                if (std::binary_search(b.begin(), b.end(), x))
                    throw ConfigError("sweep point " + std::to_string(i) +
                                      ": mutual_information partitions overlap at site " + std::to_string(x));
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct Solved {
    BiorthogonalSystem sys;
    GroundStateSelection sel;
};

Solved solve(const KernelMatrix& K, const RunConfig& rc, json& warnings, const char* label) {
    Solved s{biorthogonal_eig(K, eig_options(rc.tol)), {}};
    s.sel = select_occupied(s.sys, rc.filling, rc.policy, rc.tol.degeneracy);
    if (s.sel.degeneracy) warnings.push_back(warning_json(*s.sel.degeneracy));
    if (s.sys.condition_estimate > kConditionWarning) {
        std::ostringstream m;
        m << label << " eigenvector condition estimate " << s.sys.condition_estimate;
        warnings.push_back({{"code", "IllConditioned"}, {"message", m.str()}});
    }
    return s;
}

struct PointOut {
    std::string status = "ok";
    std::string message;
    json warnings = json::array();
    std::vector<std::vector<std::string>> rows;
    json detail = json::object();
};

std::vector<std::string> lead_cells(std::size_t index, const SweepPoint& p) {
    std::vector<std::string> cells{std::to_string(index)};
    for (const auto& [k, v] : p.params) cells.push_back(num(v));
    return cells;
}

std::vector<std::string> header_with(const RunConfig& rc, std::vector<std::string> tail) {
    std::vector<std::string> h{"point"};
    for (const auto& ax : rc.sweep) h.push_back(ax.param);
    h.insert(h.end(), tail.begin(), tail.end());
    return h;
}

json cplx_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

// Runs every point on the worker pool, then writes CSV, detail JSON and manifest in config order.
template <class Fn>
int run_points(const Options& o, const std::string& command, const std::string& digest, const RunConfig& rc,
               const std::vector<Prepared>& prep, const std::vector<std::string>& header, const std::string& csv_name,
               const std::string& json_name, Fn&& compute) {
    std::vector<PointOut> results(prep.size());
    parallel_for(static_cast<int>(prep.size()), o.workers, [&](int i) {
        PointOut& r = results[i];
        try {
            compute(prep[i], r);
        } catch (const std::exception& e) {
            r.status = status_of(e);
            r.message = e.what();
            r.rows.clear();
            for (std::size_t s = 0; s < prep[i].parts.size(); ++s)
                for (const auto& part : prep[i].parts[s]) {
                    auto cells = lead_cells(i, prep[i].point);
                    cells.push_back(part.name);
                    cells.push_back(to_string(part.partition.space));
                    cells.push_back(std::to_string(part.la));
                    while (cells.size() + 1 < header.size()) cells.push_back("nan");
                    cells.push_back(r.status);
                    r.rows.push_back(std::move(cells));
                }
        }
    });

    const fs::path dir = out_dir(o);
    Csv csv(header);
    Manifest man;
    man.command = command;
    man.config_digest = digest;
    man.tolerances = rc.tol.to_json();
    man.outputs = {csv_name, json_name, "manifest.json"};
    json detail;
    detail["model"] = model_to_json(rc.model);
    detail["filling"] = std::to_string(rc.filling.num) + "/" + std::to_string(rc.filling.den);
    detail["policy"] = to_string(rc.policy);
    detail["points"] = json::array();
    int failed = 0;
    std::size_t row = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        auto& r = results[i];
        json entry;
        entry["index"] = i;
        entry["params"] = params_json(prep[i].point);
        entry["status"] = r.status;
        if (!r.message.empty()) entry["message"] = r.message;
        entry["warnings"] = r.warnings;
        entry["csv_rows"] = json::array({row + 1, row + r.rows.size()});
        man.points.push_back(entry);
        for (auto& cells : r.rows) csv.row(std::move(cells));
        row += r.rows.size();
        json d = r.detail;
        d["index"] = i;
        d["params"] = params_json(prep[i].point);
        d["status"] = r.status;
        detail["points"].push_back(d);
        failed += r.status != "ok";
    }
    csv.write(dir / csv_name);
    write_json(dir / json_name, detail);
    man.write(dir);
    if (failed) std::fprintf(stderr, "%s: %d of %zu points failed; see manifest.json\n", command.c_str(), failed,
                             results.size());
    return failed ? 2 : 0;
}

// ---- csv input for fit

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name, const std::string& file) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ConfigError(file + ": missing column '" + name + "'");
        return static_cast<int>(it - header.begin());
    }
};

Table read_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open series file '" + file.string() + "'");
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(file.string() + ": empty file");
    t.header = split_csv_line(line);
    int n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != t.header.size())
            throw ConfigError(file.string() + ":" + std::to_string(n) + ": expected " +
                              std::to_string(t.header.size()) + " fields");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

double parse_number(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": '" + s + "' is not a number");
    }
}

struct FitJob {
    fs::path file;
    Geometry geometry = Geometry::chord;
    int total_length = 0;
    FitOptions options;
    json where = json::object();
};

json fit_json(const FitResult& fr) {
    return json{{"c", fr.c},
                {"intercept", fr.intercept},
                {"rms_residual", fr.rms_residual},
                {"window", json::array({fr.window.first, fr.window.second})},
                {"points_used", fr.points_used},
                {"rejected", fr.rejected},
                {"shrink_delta", fr.shrink_delta},
                {"robust", fr.robust}};
}

ScalingSeries load_series(const FitJob& job, int& skipped) {
    const Table t = read_csv(job.file);
    const std::string name = job.file.string();
    const int cla = t.column("L_A", name), cre = t.column("re_S", name), cim = t.column("im_S", name);
    const auto st = std::find(t.header.begin(), t.header.end(), "status");
    const int cst = st == t.header.end() ? -1 : static_cast<int>(st - t.header.begin());
    std::vector<std::pair<int, std::string>> filters;
    for (const auto& [k, v] : job.where.items())
        filters.emplace_back(t.column(k, name), v.is_string() ? v.get<std::string>() : std::string());

    ScalingSeries s;
    s.geometry = job.geometry;
    s.total_length = job.total_length;
    skipped = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string where = name + ":" + std::to_string(r + 2);
        bool keep = true;
        std::size_t fi = 0;
        for (const auto& [k, v] : job.where.items()) {
            const auto& cell = row[filters[fi++].first];
            if (v.is_string())
                keep = keep && cell == v.get<std::string>();
            else
                keep = keep && std::abs(parse_number(cell, where) - v.get<double>()) <= 1e-12 * std::max(1.0, std::abs(v.get<double>()));
        }
        if (!keep) continue;
        if (cst >= 0 && row[cst] != "ok") {
            ++skipped;
            continue;
        }
        s.points.push_back({static_cast<int>(parse_number(row[cla], where)),
                            cplx(parse_number(row[cre], where), parse_number(row[cim], where))});
    }
    std::sort(s.points.begin(), s.points.end(), [](const SeriesPoint& a, const SeriesPoint& b) { return a.la < b.la; });
    return s;
}

// ---- oracle cases

struct OracleCase {
    std::string name;
    KernelMatrix K;
    std::vector<int> a;
    Rational filling{1, 2};
    Policy policy = Policy::real_part;
};

KernelMatrix plain_kernel(const CMatrix& m) {
    KernelMatrix K;
    K.entries = m;
    for (int i = 0; i < m.rows(); ++i) K.labels.push_back({i, 0});
    return K;
}

struct RandomSpec {
    int n = 8;
    int a_size = 4;
    int count = 24;
    double kappa = 0.05;
    unsigned seed = 1;
};

// H + i kappa V with H, V Hermitian parts of complex Gaussian matrices; A drawn uniformly.
void add_random_cases(const RandomSpec& spec, const std::string& name, std::vector<OracleCase>& cases) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> g;
    auto hermitian = [&] {
        CMatrix m(spec.n, spec.n);
        for (int i = 0; i < spec.n; ++i)
            for (int j = 0; j < spec.n; ++j) m(i, j) = cplx(g(rng), g(rng));
        return CMatrix(0.5 * (m + m.adjoint()));
    };
    for (int r = 0; r < spec.count; ++r) {
        const CMatrix h = hermitian();
        const CMatrix v = hermitian();
        std::vector<int> sites(spec.n);
        for (int i = 0; i < spec.n; ++i) sites[i] = i;
        std::shuffle(sites.begin(), sites.end(), rng);
        sites.resize(spec.a_size);
        std::sort(sites.begin(), sites.end());
        cases.push_back({name + "/" + std::to_string(r), plain_kernel(h + cplx(0.0, spec.kappa) * v), sites});
    }
}

std::vector<OracleCase> default_suite() {
    std::vector<OracleCase> cases;
    add_random_cases(RandomSpec{}, "random", cases);
    cases.push_back({"nh_ssh", build_nh_ssh_real(4, 0.5, 1.5, 0.3, Boundary::open), {0, 1, 2, 3}});
    cases.push_back({"nh_ssh_pt", build_nh_ssh_real(4, 1.5, 1.0, 0.3, Boundary::periodic), {2, 3, 4, 5}});
    cases.push_back({"hatano_nelson", build_hatano_nelson(8, 1.0, 0.5, Boundary::antiperiodic), {1, 2, 5, 6}});
    cases.push_back({"hatano_nelson_open", build_hatano_nelson(8, 1.0, 0.8, Boundary::open), {0, 1, 2, 3}});
    return cases;
}

std::vector<int> checked_sites(Fields& f, const std::string& key, int n) {
    auto s = f.integers(key);
    std::sort(s.begin(), s.end());
    if (s.empty() || s.front() < 0 || s.back() >= n || std::adjacent_find(s.begin(), s.end()) != s.end())
        fail(f.path(key), "sites must be distinct and in [0, " + std::to_string(n) + ")");
    return s;
}

} // namespace

// ---------------------------------------------------------------- model-list

int cmd_model_list(const Options& o) {
    json all = json::array();
    for (const auto& info : family_catalog()) {
        std::ostringstream line;
        line << to_string(info.family) << "\n    required:";
        for (const auto& r : info.required) line << ' ' << r;
        line << "\n    defaults:";
        for (const auto& [k, v] : info.defaults) line << ' ' << k << '=' << num(v);
        for (const auto& [k, vals] : info.options) {
            line << "\n    option " << k << ':';
            for (const auto& v : vals) line << ' ' << v;
        }
        line << "\n    " << info.summary << '\n';
        std::cout << line.str();

        json j;
        j["family"] = to_string(info.family);
        j["required"] = info.required;
        j["defaults"] = json::object();
        for (const auto& [k, v] : info.defaults) j["defaults"][k] = v;
        j["options"] = json::object();
        for (const auto& [k, v] : info.options) j["options"][k] = v;
        j["summary"] = info.summary;
        all.push_back(j);
    }
    if (!o.out.empty()) write_json(out_dir(o) / "models.json", all);
    return 0;
}

// ---------------------------------------------------------------- entanglement

int cmd_entanglement(const Options& o) {
    if (o.config.empty()) throw ConfigError("entanglement: --config is required");
    std::string raw;
    const json j = load_json(o.config, &raw);
    RunConfig rc = parse_run_config(j, true);
    apply_overrides(o, rc.tol);
    const bool mi = rc.quantities.count("mutual_information") > 0;
    const auto prep = prepare(rc, mi);
    const EntOptions eopt = ent_options(rc.tol, rc.renyi_orders);
    const auto& q = rc.quantities;

    const auto header = header_with(rc, {"partition", "space", "L_A", "re_S", "im_S", "re_S_renyi2", "im_S_renyi2",
                                         "S_modified", "n_midgap", "status"});
    return run_points(o, "entanglement", sha256_hex(raw), rc, prep, header, "entanglement.csv", "reports.json",
                      [&](const Prepared& p, PointOut& r) {
        const std::size_t index = &p - prep.data();
        const Solved pos = solve(p.K, rc, r.warnings, "position");
        std::optional<Solved> mom;
        if (p.Kk) mom = solve(*p.Kk, rc, r.warnings, "momentum");
        json reports = json::array();
        std::vector<EntanglementReport> first;
        for (std::size_t s = 0; s < p.parts.size(); ++s)
            for (const auto& part : p.parts[s]) {
                const Solved& sv = part.partition.space == Space::momentum ? *mom : pos;
                const auto rep = analyze(correlation_matrix(sv.sys, sv.sel, part.partition), eopt);
                if (first.size() < 2 && s == first.size()) first.push_back(rep);
                const std::string tag = "partition " + part.name + " L_A=" + std::to_string(part.la) + ": ";
                for (const auto& w : rep.warnings) r.warnings.push_back({{"code", w.code}, {"message", tag + w.message}});
                if (rep.realness_residual > rc.tol.imag)
                    r.warnings.push_back({{"code", "ComplexEntropy"},
                                          {"message", tag + "|Im S| = " + num(rep.realness_residual)}});
                if (rep.branch_cut_modes > 0)
                    r.warnings.push_back({{"code", "BranchCut"},
                                          {"message", tag + std::to_string(rep.branch_cut_modes) +
                                                          " eigenvalue(s) on the negative real axis"}});

                const cplx r2 = rep.entropy_renyi.at(2);
                auto cells = lead_cells(index, p.point);
                cells.insert(cells.end(), {part.name, to_string(part.partition.space), std::to_string(part.la),
                                           num(rep.entropy_vn.real()), num(rep.entropy_vn.imag()), num(r2.real()),
                                           num(r2.imag()), num(rep.entropy_modified),
                                           std::to_string(rep.midgap_modes.size()), "ok"});
                r.rows.push_back(std::move(cells));

                json d;
                d["partition"] = part.name;
                d["space"] = to_string(part.partition.space);
                d["L_A"] = part.la;
                if (q.count("entropy")) {
                    d["entropy_vn"] = cplx_json(rep.entropy_vn);
                    d["realness_residual"] = rep.realness_residual;
                    d["branch_cut_modes"] = rep.branch_cut_modes;
                }
                if (q.count("renyi")) {
                    d["entropy_renyi"] = json::object();
                    for (const auto& [n, v] : rep.entropy_renyi) d["entropy_renyi"][std::to_string(n)] = cplx_json(v);
                }
                if (q.count("modified")) {
                    d["entropy_modified"] = rep.entropy_modified;
                    d["modified_residual"] = rep.modified_residual;
                }
                if (q.count("midgap")) d["midgap_modes"] = rep.midgap_modes;
                if (q.count("spectrum")) {
                    d["correlation_eigenvalues"] = complex_list(rep.correlation_eigenvalues);
                    d["single_particle_spectrum"] = complex_list(rep.single_particle_spectrum);
                }
                reports.push_back(d);
            }
        r.detail["reports"] = reports;
        if (mi) {
            const auto& a = p.parts[0][0].partition.indices;
            const auto& b = p.parts[1][0].partition.indices;
            std::vector<int> ab(a);
            ab.insert(ab.end(), b.begin(), b.end());
            const auto rab = analyze(correlation_matrix(pos.sys, pos.sel, Partition::of(ab)), eopt);
            r.detail["mutual_information"] = {{"a", p.parts[0][0].name},
                                              {"b", p.parts[1][0].name},
                                              {"value", cplx_json(mutual_information(first[0], first[1], rab))}};
        }
    });
}

// ---------------------------------------------------------------- duality

int cmd_duality(const Options& o) {
    if (o.config.empty()) throw ConfigError("duality: --config is required");
    std::string raw;
    const json j = load_json(o.config, &raw);
    RunConfig rc = parse_run_config(j, false);
    apply_overrides(o, rc.tol);
    const auto prep = prepare(rc, false);

    const auto header = header_with(rc, {"partition", "space", "L_A", "nonzero_rpr", "nonzero_prp", "max_mismatch",
                                         "real_spectrum_input", "status"});
    return run_points(o, "duality", sha256_hex(raw), rc, prep, header, "duality.csv", "duality.json",
                      [&](const Prepared& p, PointOut& r) {
        const std::size_t index = &p - prep.data();
        const Solved pos = solve(p.K, rc, r.warnings, "position");
        std::optional<Solved> mom;
        if (p.Kk) mom = solve(*p.Kk, rc, r.warnings, "momentum");
        json reports = json::array();
        std::string failure;
        for (const auto& parts : p.parts)
            for (const auto& part : parts) {
                const Solved& sv = part.partition.space == Space::momentum ? *mom : pos;
                const auto rep = check_duality(sv.sys, sv.sel, part.partition);
                const bool bad = rep.max_mismatch > rc.tol.spectrum || rep.nonzero_rpr != rep.nonzero_prp;
                std::string status = "ok";
                if (bad && rep.real_spectrum_input) {
                    status = "mismatch";
                    failure = "partition " + part.name + ": mismatch " + num(rep.max_mismatch);
                } else if (bad) {
                    r.warnings.push_back({{"code", "DualityMismatch"},
                                          {"message", "partition " + part.name + " (complex spectrum input): mismatch " +
                                                          num(rep.max_mismatch)}});
                }
                auto cells = lead_cells(index, p.point);
                cells.insert(cells.end(), {part.name, to_string(part.partition.space), std::to_string(part.la),
                                           std::to_string(rep.nonzero_rpr), std::to_string(rep.nonzero_prp),
                                           num(rep.max_mismatch), rep.real_spectrum_input ? "true" : "false", status});
                r.rows.push_back(std::move(cells));
                reports.push_back({{"partition", part.name},
                                   {"L_A", part.la},
                                   {"spectrum_rpr", complex_list(rep.spectrum_rpr)},
                                   {"spectrum_prp", complex_list(rep.spectrum_prp)},
                                   {"max_mismatch", rep.max_mismatch}});
            }
        r.detail["reports"] = reports;
        if (!failure.empty()) {
            r.status = "mismatch";
            r.message = failure;
        }
    });
}

// ---------------------------------------------------------------- fit

int cmd_fit(const Options& o) {
    std::vector<FitJob> jobs;
    std::string digest;
    Tolerances tol;
    if (!o.config.empty()) {
        std::string raw;
        const json j = load_json(o.config, &raw);
        digest = sha256_hex(raw);
        Fields f(j, "");
        f.only({"series", "geometry", "total_length", "la_min", "la_max", "min_points", "where", "tolerances"});
        const fs::path base = fs::path(o.config).parent_path();
        std::vector<std::string> files;
        const json& s = f.at("series");
        if (s.is_string()) {
            files.push_back(s.get<std::string>());
        } else if (s.is_array() && !s.empty()) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (!s[i].is_string()) fail("/series/" + std::to_string(i), "expected a file path");
                files.push_back(s[i].get<std::string>());
            }
        } else {
            fail("/series", "expected a file path or a non-empty array of paths");
        }
        FitJob proto;
        try {
            proto.geometry = geometry_from_string(f.string("geometry", "chord"));
        } catch (const ConfigError& e) {
            fail("/geometry", e.what());
        }
        proto.total_length = f.integer("total_length", 0);
        proto.options.la_min = f.integer("la_min", proto.options.la_min);
        proto.options.la_max = f.integer("la_max", proto.options.la_max);
        proto.options.min_points = f.integer("min_points", proto.options.min_points);
        if (f.has("where")) {
            proto.where = f.at("where");
            if (!proto.where.is_object()) fail("/where", "expected an object of column filters");
            for (const auto& [k, v] : proto.where.items())
                if (!v.is_string() && !v.is_number()) fail("/where/" + k, "expected a string or number");
        }
        apply_tolerances(f, tol);
        f.finish();
        for (const auto& file : files) {
            FitJob job = proto;
            job.file = fs::path(file).is_absolute() ? fs::path(file) : base / file;
            jobs.push_back(job);
        }
    } else {
        if (o.series.empty()) throw ConfigError("fit: give --config or one or more series files");
        for (const auto& file : o.series) {
            FitJob job;
            job.file = file;
            job.geometry = geometry_from_string(o.geometry);
            job.total_length = o.total_length;
            if (o.la_min >= 0) job.options.la_min = o.la_min;
            job.options.la_max = o.la_max;
            jobs.push_back(job);
        }
    }
    apply_overrides(o, tol);
    for (auto& job : jobs) {
        job.options.imag_tol = tol.imag;
        if (job.geometry == Geometry::chord && job.total_length <= 0)
            throw ConfigError("fit: chord geometry needs total_length > 0");
    }

    // Load everything first so malformed input exits as a validation error.
    std::vector<ScalingSeries> series;
    std::vector<int> skipped(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        series.push_back(load_series(jobs[i], skipped[i]));
        try {
            series.back().validate();
        } catch (const ConfigError& e) {
            throw ConfigError(jobs[i].file.string() + ": " + e.what() + " (use 'where' to select one series)");
        }
    }

    Csv csv({"series", "c", "intercept", "rms_residual", "window_min", "window_max", "points_used", "rejected",
             "shrink_delta", "robust", "status"});
    json fits = json::array();
    Manifest man;
    man.command = "fit";
    man.config_digest = digest;
    man.tolerances = tol.to_json();
    man.outputs = {"fit.csv", "fit.json", "manifest.json"};
    int failed = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        json entry{{"index", i}, {"series", jobs[i].file.string()}, {"warnings", json::array()}};
        if (skipped[i])
            entry["warnings"].push_back(
                {{"code", "SkippedRows"}, {"message", std::to_string(skipped[i]) + " row(s) with status != ok"}});
        try {
            const FitResult fr = fit_central_charge(series[i], jobs[i].options);
            csv.row({jobs[i].file.string(), num(fr.c), num(fr.intercept), num(fr.rms_residual),
                     std::to_string(fr.window.first), std::to_string(fr.window.second),
                     std::to_string(fr.points_used), std::to_string(fr.rejected.size()), num(fr.shrink_delta),
                     fr.robust ? "true" : "false", "ok"});
            if (!fr.rejected.empty())
                entry["warnings"].push_back({{"code", "RejectedPoints"},
                                             {"message", std::to_string(fr.rejected.size()) +
                                                             " point(s) with |Im S| above " + num(tol.imag)}});
            if (!fr.robust)
                entry["warnings"].push_back({{"code", "WindowSensitive"},
                                             {"message", "c changes by " + num(fr.shrink_delta) +
                                                             " when the window shrinks"}});
            json fj = fit_json(fr);
            fj["series"] = jobs[i].file.string();
            fj["geometry"] = to_string(jobs[i].geometry);
            fits.push_back(fj);
            entry["status"] = "ok";
        } catch (const InsufficientDataError& e) {
            ++failed;
            csv.row({jobs[i].file.string(), "nan", "nan", "nan", std::to_string(jobs[i].options.la_min),
                     std::to_string(jobs[i].options.la_max), "0", "0", "nan", "false", "insufficient_data"});
            fits.push_back({{"series", jobs[i].file.string()}, {"error", e.what()}});
            entry["status"] = "insufficient_data";
            entry["message"] = e.what();
            std::fprintf(stderr, "fit: %s: %s\n", jobs[i].file.string().c_str(), e.what());
        }
        man.points.push_back(entry);
    }
    const fs::path dir = out_dir(o);
    csv.write(dir / "fit.csv");
    write_json(dir / "fit.json", fits);
    man.write(dir);
    return failed ? 2 : 0;
}

// ---------------------------------------------------------------- dynamics

int cmd_dynamics(const Options& o) {
    if (o.config.empty()) throw ConfigError("dynamics: --config is required");
    std::string raw;
    const json j = load_json(o.config, &raw);
    Fields f(j, "");
    f.only({"model", "initial", "times", "partition", "reference", "max_growth", "collapse_tol", "propagator",
            "tolerances"});
    const ModelSpec model = parse_model(f.at("model"), "/model");
    const KernelMatrix K = build(model);
    const int n = K.dim();

    GaussianState psi0;
    {
        Fields s(f.at("initial"), "/initial");
        const std::string kind = s.string("kind");
        if (kind == "product") {
            psi0 = product_state(n, checked_sites(s, "sites", n));
        } else if (kind == "neel") {
            const int offset = s.integer("offset", 0);
            if (offset != 0 && offset != 1) fail(s.path("offset"), "expected 0 or 1");
            std::vector<int> sites;
            for (int i = offset; i < n; i += 2) sites.push_back(i);
            psi0 = product_state(n, sites);
        } else if (kind == "domain_wall") {
            const int m = s.integer("particles");
            if (m < 1 || m > n) fail(s.path("particles"), "must be in [1, " + std::to_string(n) + "]");
            psi0 = domain_wall_state(n, m);
        } else if (kind == "ground_state") {
            const ModelSpec gm = parse_model(s.at("model"), "/initial/model");
            const KernelMatrix G = build(gm);
            if (G.dim() != n) fail("/initial/model", "dimension differs from the evolution model");
            Rational fill;
            try {
                fill = parse_rational(s.string("filling", "1/2"));
            } catch (const ConfigError& e) {
                fail(s.path("filling"), e.what());
            }
            psi0 = hermitian_ground_state(G, fill);
        } else {
            fail(s.path("kind"), "expected product, neel, domain_wall or ground_state");
        }
        s.finish();
    }

    std::vector<double> times;
    {
        const json& t = f.at("times");
        if (t.is_array()) {
            times = f.numbers("times");
        } else {
            Fields g(t, "/times");
            const double tmax = g.number("t_max");
            const int steps = g.integer("steps");
            if (!(tmax > 0) || steps < 1) fail("/times", "need t_max > 0 and steps >= 1");
            for (int i = 0; i <= steps; ++i) times.push_back(tmax * i / steps);
            g.finish();
        }
        if (times.empty()) fail("/times", "empty time grid");
        for (std::size_t i = 0; i < times.size(); ++i)
            if (times[i] < 0 || (i && times[i] <= times[i - 1]))
                fail("/times", "times must be non-negative and strictly increasing");
    }

    const PartitionSpec pspec = parse_partition(f.at("partition"), "/partition", 0);
    if (pspec.space != Space::position) fail("/partition", "dynamics uses position-space partitions");
    const auto parts = resolve(pspec, K);
    if (parts.size() != 1) fail("/partition", "give a single partition");

    DynamicsOptions dopt;
    Tolerances tol;
    const bool reference = f.boolean("reference", false);
    dopt.max_growth = f.number("max_growth", dopt.max_growth);
    dopt.collapse_tol = f.number("collapse_tol", dopt.collapse_tol);
    const std::string path = f.string("propagator", "auto");
    if (path == "eigen") dopt.propagator.force = PropagatorPath::eigen;
    else if (path == "pade") dopt.propagator.force = PropagatorPath::pade;
    else if (path != "auto") fail("/propagator", "expected auto, eigen or pade");
    apply_tolerances(f, tol);
    f.finish();
    apply_overrides(o, tol);
    dopt.ent = ent_options(tol);

    const auto pts = evolve_no_jump(K, psi0, times, parts[0].partition, dopt);
    std::vector<EntanglementReport> ref;
    if (reference) ref = evolve_unitary_reference(K, psi0, times, parts[0].partition, dopt.ent);

    Csv csv({"t", "re_S", "im_S", "S_modified", "trace_residual", "purity_residual", "substeps", "ref_re_S",
             "ref_im_S", "deviation"});
    json warnings = json::array();
    double max_dev = 0.0, max_purity = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        std::vector<std::string> cells{num(p.time),
                                       num(p.report.entropy_vn.real()),
                                       num(p.report.entropy_vn.imag()),
                                       num(p.report.entropy_modified),
                                       num(p.trace_residual),
                                       num(p.purity_residual),
                                       std::to_string(p.substeps)};
        if (reference) {
            const double dev = std::max(std::abs(p.report.entropy_vn - ref[i].entropy_vn),
                                        multiset_mismatch(p.report.correlation_eigenvalues,
                                                          ref[i].correlation_eigenvalues));
            max_dev = std::max(max_dev, dev);
            cells.insert(cells.end(), {num(ref[i].entropy_vn.real()), num(ref[i].entropy_vn.imag()), num(dev)});
        } else {
            cells.insert(cells.end(), {"", "", ""});
        }
        max_purity = std::max(max_purity, p.purity_residual);
        for (const auto& w : p.report.warnings)
            warnings.push_back({{"code", w.code}, {"message", "t=" + num(p.time) + ": " + w.message}});
        csv.row(std::move(cells));
    }
    if (max_purity > tol.dynamics_purity)
        warnings.push_back({{"code", "Purity"}, {"message", "max Tr|C^2 - C| = " + num(max_purity)}});

    const bool ref_fail = reference && max_dev > tol.unitary;
    const fs::path dir = out_dir(o);
    csv.write(dir / "dynamics.csv");
    Manifest man;
    man.command = "dynamics";
    man.config_digest = sha256_hex(raw);
    man.tolerances = tol.to_json();
    man.outputs = {"dynamics.csv", "manifest.json"};
    json entry{{"index", 0},
               {"model", model_to_json(model)},
               {"status", ref_fail ? "reference_mismatch" : "ok"},
               {"max_purity_residual", max_purity},
               {"warnings", warnings},
               {"csv_rows", json::array({1, pts.size()})}};
    if (reference) entry["max_reference_deviation"] = max_dev;
    man.points.push_back(entry);
    man.write(dir);
    if (ref_fail) std::fprintf(stderr, "dynamics: deviation from unitary reference %g exceeds %g\n", max_dev, tol.unitary);
    return ref_fail ? 2 : 0;
}

// ---------------------------------------------------------------- oracle

int cmd_oracle(const Options& o) {
    std::vector<OracleCase> cases;
    std::string digest;
    Tolerances tol;
    if (o.config.empty()) {
        cases = default_suite();
    } else {
        std::string raw;
        const json j = load_json(o.config, &raw);
        digest = sha256_hex(raw);
        Fields f(j, "");
        f.only({"cases", "tolerances"});
        const json& list = f.at("cases");
        if (!list.is_array() || list.empty()) fail("/cases", "expected a non-empty array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = "/cases/" + std::to_string(i);
            Fields c(list[i], p);
            const std::string name = c.string("name", "case" + std::to_string(i));
            if (c.has("random")) {
                Fields r(c.at("random"), p + "/random");
                RandomSpec rs;
                rs.n = r.integer("n", rs.n);
                rs.a_size = r.integer("a_size", rs.a_size);
                rs.count = r.integer("count", rs.count);
                rs.kappa = r.number("kappa", rs.kappa);
                rs.seed = static_cast<unsigned>(r.integer("seed", static_cast<int>(rs.seed)));
                if (rs.n < 2 || rs.n > oracle::kMaxModes) fail(r.path("n"), "must be in [2, 14]");
                if (rs.a_size < 1 || rs.a_size >= rs.n) fail(r.path("a_size"), "must be in [1, n)");
                if (rs.count < 1) fail(r.path("count"), "must be >= 1");
                r.finish();
                add_random_cases(rs, name, cases);
            } else {
                OracleCase oc;
                oc.name = name;
                const ModelSpec m = parse_model(c.at("model"), p + "/model");
                oc.K = build(m);
                if (oc.K.dim() > oracle::kMaxModes) fail(p + "/model", "oracle supports at most 14 modes");
                oc.a = checked_sites(c, "sites", oc.K.dim());
                try {
                    oc.filling = parse_rational(c.string("filling", "1/2"));
                    oc.policy = policy_from_string(c.string("policy", "real_part"));
                } catch (const ConfigError& e) {
                    fail(p, e.what());
                }
                cases.push_back(std::move(oc));
            }
            c.finish();
        }
        apply_tolerances(f, tol);
        f.finish();
    }
    apply_overrides(o, tol);
    const EntOptions eopt = ent_options(tol);

    struct Result {
        oracle::CrossCheck cc;
        std::string status = "pass";
        std::string message;
    };
    std::vector<Result> res(cases.size());
    parallel_for(static_cast<int>(cases.size()), o.workers, [&](int i) {
        const auto& c = cases[i];
        try {
            res[i].cc = oracle::cross_check(c.K, c.a, c.filling, c.policy, eopt);
            const auto& cc = res[i].cc;
            if (cc.entropy > tol.oracle || cc.modified > tol.oracle || cc.spectrum > tol.spectrum ||
                cc.correlation > tol.correlation || cc.purity > tol.purity)
                res[i].status = "fail";
        } catch (const std::exception& e) {
            res[i].status = status_of(e);
            res[i].message = e.what();
        }
    });

    Csv csv({"case", "N", "A", "entropy_residual", "modified_residual", "spectrum_residual", "correlation_residual",
             "purity_residual", "status"});
    Manifest man;
    man.command = "oracle";
    man.config_digest = digest;
    man.tolerances = tol.to_json();
    man.outputs = {"oracle.csv", "manifest.json"};
    int failed = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        std::string a;
        for (int s : cases[i].a) a += (a.empty() ? "" : " ") + std::to_string(s);
        const auto& r = res[i];
        const bool computed = r.message.empty();
        csv.row({cases[i].name, std::to_string(cases[i].K.dim()), a, computed ? num(r.cc.entropy) : "nan",
                 computed ? num(r.cc.modified) : "nan", computed ? num(r.cc.spectrum) : "nan",
                 computed ? num(r.cc.correlation) : "nan", computed ? num(r.cc.purity) : "nan", r.status});
        json entry{{"index", i}, {"case", cases[i].name}, {"status", r.status}, {"warnings", json::array()},
                   {"csv_rows", json::array({i + 1, i + 1})}};
        if (!r.message.empty()) entry["message"] = r.message;
        man.points.push_back(entry);
        if (r.status != "pass") {
            ++failed;
            std::fprintf(stderr, "oracle: %s: %s %s\n", cases[i].name.c_str(), r.status.c_str(), r.message.c_str());
        }
    }
    const fs::path dir = out_dir(o);
    csv.write(dir / "oracle.csv");
    man.write(dir);
    std::printf("oracle: %zu/%zu cases pass\n", cases.size() - failed, cases.size());
    return failed ? 2 : 0;
}

} // namespace cli
