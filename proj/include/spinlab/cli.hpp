#pragma once

// Experiment driver: JSON config in, CSV/JSON artifacts plus a manifest out.
//
// Numeric CSV cells are printed with std::to_chars (shortest round-trip), so
// a given config reproduces its CSV outputs byte for byte.  The manifest
// echoes the parsed config, records wall times per task and an FNV-1a 64
// checksum per emitted file.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinlab/analysis.hpp"
#include "spinlab/classical.hpp"
#include "spinlab/entangle.hpp"
#include "spinlab/lmg.hpp"
#include "spinlab/symspace.hpp"
#include "spinlab/version.hpp"

namespace spinlab::cli {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentType {
    dicke_average,
    superposition_average,
    lmg_spectrum,
    scaling_fit,
    c0_profile,
    distribution,
    zones
};

inline const char* to_string(ExperimentType t) {
    switch (t) {
        case ExperimentType::dicke_average: return "dicke-average";
        case ExperimentType::superposition_average: return "superposition-average";
        case ExperimentType::lmg_spectrum: return "lmg-spectrum";
        case ExperimentType::scaling_fit: return "scaling-fit";
        case ExperimentType::c0_profile: return "c0-profile";
        case ExperimentType::distribution: return "distribution";
        default: return "zones";
    }
}

enum class SectorChoice { positive, negative, both };

inline const char* to_string(SectorChoice s) {
    switch (s) {
        case SectorChoice::positive: return "positive";
        case SectorChoice::negative: return "negative";
        default: return "both";
    }
}

struct InterceptScanSpec {
    bool enabled = false;
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
};

struct ExperimentConfig {
    ExperimentType experiment = ExperimentType::dicke_average;
    std::vector<LmgParams> params;
    std::vector<int> sizes;
    std::vector<double> fractions;
    SectorChoice sector = SectorChoice::positive;
    double fit_intercept = 0.5;
    InterceptScanSpec scan;
    int bins = 101;
    int threads = 0;  // 0 = hardware
    std::string output_dir = ".";
};

// Shortest round-trip decimal form; errors out on non-finite values so no
// NaN can reach an artifact.
inline std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::runtime_error("format_double: non-finite value");
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf, 16);
}

// ---------------------------------------------------------------------------
// Config parsing

inline ExperimentType parse_experiment(const std::string& name) {
    static const std::map<std::string, ExperimentType> table = {
        {"dicke-average", ExperimentType::dicke_average},
        {"superposition-average", ExperimentType::superposition_average},
        {"lmg-spectrum", ExperimentType::lmg_spectrum},
        {"scaling-fit", ExperimentType::scaling_fit},
        {"c0-profile", ExperimentType::c0_profile},
        {"distribution", ExperimentType::distribution},
        {"zones", ExperimentType::zones}};
    const auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown experiment: " + name);
    return it->second;
}

inline SectorChoice parse_sector(const std::string& name) {
    if (name == "positive") return SectorChoice::positive;
    if (name == "negative") return SectorChoice::negative;
    if (name == "both") return SectorChoice::both;
    throw ConfigError("unknown sector: " + name);
}

inline ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const char* known[] = {"experiment", "params",  "sizes",   "fractions",
                                  "sector",     "fit_intercept", "intercept_scan",
                                  "bins",       "threads", "output_dir"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown config key: " + key);
    }
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigError("config needs an \"experiment\" string");

    ExperimentConfig cfg;
    try {
        cfg.experiment = parse_experiment(j["experiment"].get<std::string>());
        if (j.contains("params")) {
            for (const auto& row : j["params"]) {
                if (!row.is_array() || row.size() != 3)
                    throw ConfigError("params entries must be [gx, gy, h] triples");
                cfg.params.push_back(
                    {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
            }
        }
        if (j.contains("sizes"))
            for (const auto& v : j["sizes"]) cfg.sizes.push_back(v.get<int>());
        if (j.contains("fractions"))
            for (const auto& v : j["fractions"]) cfg.fractions.push_back(v.get<double>());
        if (j.contains("sector"))
            cfg.sector = parse_sector(j["sector"].get<std::string>());
        if (j.contains("fit_intercept")) cfg.fit_intercept = j["fit_intercept"].get<double>();
        if (j.contains("intercept_scan")) {
            const auto& s = j["intercept_scan"];
            if (!s.is_array() || s.size() != 3)
                throw ConfigError("intercept_scan must be [lo, hi, step]");
            cfg.scan.enabled = true;
            cfg.scan.lo = s[0].get<double>();
            cfg.scan.hi = s[1].get<double>();
            cfg.scan.step = s[2].get<double>();
        }
        if (j.contains("bins")) cfg.bins = j["bins"].get<int>();
        if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
        if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }

    // structural checks
    const ExperimentType t = cfg.experiment;
    const bool needs_sizes = t != ExperimentType::zones;
    const bool needs_params = t == ExperimentType::lmg_spectrum ||
                              t == ExperimentType::scaling_fit ||
                              t == ExperimentType::distribution || t == ExperimentType::zones;
    const bool forbids_params = t == ExperimentType::dicke_average ||
                                t == ExperimentType::superposition_average;
    if (needs_sizes && cfg.sizes.empty()) throw ConfigError("config needs \"sizes\"");
    if (needs_params && cfg.params.empty()) throw ConfigError("config needs \"params\"");
    if (forbids_params && !cfg.params.empty())
        throw ConfigError("params are not used by this experiment");
    if (t != ExperimentType::zones && cfg.fractions.empty())
        throw ConfigError("config needs \"fractions\"");
    for (int n : cfg.sizes)
        if (n < 2 || n % 2 != 0)
            throw ConfigError("sizes must be even and >= 2, got " + std::to_string(n));
    for (double p : cfg.fractions) {
        if (!(p > 0.0) || p > 0.5)
            throw ConfigError("fractions must lie in (0, 1/2]");
        for (int n : cfg.sizes) {
            const double pn = p * n;
            if (std::abs(pn - std::lround(pn)) > 1e-9)
                throw ConfigError("fraction " + format_double(p) + " times N = " +
                                  std::to_string(n) + " is not an integer");
        }
    }
    const bool single_cell =
        t == ExperimentType::lmg_spectrum || t == ExperimentType::distribution;
    if (single_cell) {
        if (cfg.params.size() != 1 || cfg.sizes.size() != 1 || cfg.fractions.size() != 1)
            throw ConfigError("this experiment takes exactly one (params, N, p) cell");
        if (cfg.sector == SectorChoice::both)
            throw ConfigError("profile experiments need a definite sector");
    }
    if (cfg.scan.enabled &&
        (!(cfg.scan.step > 0.0) || !(cfg.scan.hi >= cfg.scan.lo)))
        throw ConfigError("intercept_scan needs lo <= hi and step > 0");
    if (cfg.bins < 1) throw ConfigError("bins must be >= 1");
    if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// Run manifest

struct TaskRecord {
    std::string name;
    double seconds = 0.0;
};

struct FileRecord {
    std::string name;
    std::string checksum;
};

struct RunManifest {
    std::string version;
    json config_echo;
    std::vector<TaskRecord> tasks;
    std::vector<FileRecord> files;
};

namespace detail {

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

inline void write_file(const std::filesystem::path& dir, const std::string& name,
                       const std::string& bytes, RunManifest& manifest) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir.string());
    const std::filesystem::path full = dir / name;
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + full.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + full.string());
    manifest.files.push_back({name, fnv1a64_hex(bytes)});
}

inline std::string lmg_label(const LmgParams& p) {
    return "lmg(gx=" + format_double(p.gamma_x) + " gy=" + format_double(p.gamma_y) +
           " h=" + format_double(p.h) + ")";
}

inline std::string scaling_csv(const std::vector<ScalingSample>& rows) {
    std::string s = "basis,N,p,s_max,avg_ee,normalized\n";
    for (const auto& r : rows) {
        s += r.basis;
        s += ',';
        s += std::to_string(r.n_qubits);
        s += ',';
        s += format_double(r.fraction);
        s += ',';
        s += format_double(r.s_max);
        s += ',';
        s += format_double(r.average);
        s += ',';
        s += format_double(r.normalized);
        s += '\n';
    }
    return s;
}

inline std::string profile_csv(const SpectrumEntanglementProfile& p) {
    std::string s = "index,energy,scaled_energy,entropy\n";
    for (std::size_t i = 0; i < p.energies.size(); ++i) {
        s += std::to_string(i);
        s += ',';
        s += format_double(p.energies[i]);
        s += ',';
        s += format_double(p.scaled_energies[i]);
        s += ',';
        s += format_double(p.entropies[i]);
        s += '\n';
    }
    return s;
}

inline std::string dos_csv(const DosHistogram& h) {
    std::string s = "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        s += format_double(h.edges[i]);
        s += ',';
        s += format_double(h.edges[i + 1]);
        s += ',';
        s += std::to_string(h.counts[i]);
        s += '\n';
    }
    return s;
}

struct FitGroup {
    std::string basis;
    double fraction = 0.0;
    std::vector<double> x;  // 1 / s_max
    std::vector<double> y;  // normalized average
};

// Groups scaling rows by (basis, p) preserving first-appearance order.
inline std::vector<FitGroup> fit_groups(const std::vector<ScalingSample>& rows) {
    std::vector<FitGroup> groups;
    for (const auto& r : rows) {
        FitGroup* g = nullptr;
        for (auto& cand : groups)
            if (cand.basis == r.basis && cand.fraction == r.fraction) {
                g = &cand;
                break;
            }
        if (!g) {
            groups.push_back({r.basis, r.fraction, {}, {}});
            g = &groups.back();
        }
        g->x.push_back(1.0 / r.s_max);
        g->y.push_back(r.normalized);
    }
    return groups;
}

inline json fit_json(const std::vector<FitGroup>& groups, double intercept,
                     const InterceptScanSpec& scan) {
    json out;
    out["groups"] = json::array();
    for (const auto& g : groups) {
        if (g.x.size() < 2) continue;  // nothing to fit
        json jg;
        jg["basis"] = g.basis;
        jg["p"] = g.fraction;
        const FitResult fit = fixed_intercept_fit(g.x, g.y, intercept);
        jg["intercept"] = fit.intercept;
        jg["slope"] = fit.slope;
        jg["r_squared"] = fit.r_squared;
        jg["n_points"] = fit.n_points;
        if (scan.enabled) {
            const auto points = intercept_scan(g.x, g.y, scan.lo, scan.hi, scan.step);
            json jp = json::array();
            for (const auto& pt : points)
                jp.push_back({{"intercept", pt.intercept},
                              {"slope", pt.slope},
                              {"r_squared", pt.r_squared}});
            jg["scan"] = {{"best_intercept", best_intercept(points)}, {"points", jp}};
        }
        out["groups"].push_back(jg);
    }
    return out;
}

inline json zone_json(const LmgParams& p, const ZoneReport& report) {
    json jz;
    jz["params"] = {{"gamma_x", p.gamma_x}, {"gamma_y", p.gamma_y}, {"h", p.h}};
    jz["zone"] = to_string(report.zone);
    switch (report.subcase) {
        case ZoneSubcase::a: jz["subcase"] = "a"; break;
        case ZoneSubcase::b: jz["subcase"] = "b"; break;
        default: jz["subcase"] = nullptr;
    }
    jz["fixed_points"] = json::array();
    for (const auto& fp : report.points) {
        json jf;
        jf["label"] = to_string(fp.label);
        jf["exists"] = fp.exists;
        if (fp.exists) {
            jf["point"] = {fp.point.x, fp.point.y, fp.point.z};
            jf["h0"] = fp.h0;
            jf["stable"] = fp.stable;
        }
        jz["fixed_points"].push_back(jf);
    }
    jz["esqpt_energies"] = report.esqpt_energies;
    return jz;
}

// Average entropy over the requested sector(s) of an already solved pair.
// Sectors are weighted by their dimensions, i.e. the union of eigenstates.
struct SolvedSectors {
    std::vector<SolvedSector> members;
};

inline SolvedSectors solve_choice(const LmgParams& p, int n, SectorChoice choice) {
    SolvedSectors s;
    if (choice != SectorChoice::negative)
        s.members.push_back(solve_sector(p, n, Parity::positive));
    if (choice != SectorChoice::positive)
        s.members.push_back(solve_sector(p, n, Parity::negative));
    return s;
}

inline double average_over(const SolvedSectors& solved, const Bipartition& cut,
                           const LogFactorialTable& lf, int threads) {
    double total = 0.0;
    int count = 0;
    for (const auto& sector : solved.members) {
        const std::vector<double> s = sector_entropies(sector, cut, lf, threads);
        total += pairwise_sum(s);
        count += static_cast<int>(s.size());
    }
    return total / count;
}

}  // namespace detail

inline json zone_report_json(const LmgParams& params, const ZoneReport& report) {
    return detail::zone_json(params, report);
}

// ---------------------------------------------------------------------------
// Experiment driver

inline RunManifest run(const ExperimentConfig& cfg, const json& config_echo = json()) {
    RunManifest manifest;
    manifest.version = kVersion;
    manifest.config_echo = config_echo;
    const std::filesystem::path dir = cfg.output_dir;
    const int max_n = cfg.sizes.empty()
                          ? 0
                          : *std::max_element(cfg.sizes.begin(), cfg.sizes.end());

    const auto task = [&](const std::string& name, auto&& body) {
        detail::Stopwatch clock;
        body();
        manifest.tasks.push_back({name, clock.seconds()});
    };

    switch (cfg.experiment) {
        case ExperimentType::dicke_average:
        case ExperimentType::superposition_average: {
            const bool dicke = cfg.experiment == ExperimentType::dicke_average;
            const LogFactorialTable lf(max_n);
            std::vector<ScalingSample> rows;
            for (int n : cfg.sizes)
                for (double p : cfg.fractions) {
                    const std::string name = std::string(dicke ? "dicke" : "superposition") +
                                             " N=" + std::to_string(n) +
                                             " p=" + format_double(p);
                    task(name, [&] {
                        const Bipartition cut = Bipartition::fraction_of(n, p);
                        const double avg =
                            dicke ? dicke_basis_average_ee(n, cut, lf, cfg.threads)
                                  : superposition_basis_average_ee(n, cut, lf, cfg.threads);
                        rows.push_back(normalized_average(
                            dicke ? "dicke" : "superposition", n, p, avg));
                    });
                }
            detail::write_file(dir, "scaling.csv", detail::scaling_csv(rows), manifest);
            const auto groups = detail::fit_groups(rows);
            detail::write_file(dir, "fit.json",
                               detail::fit_json(groups, cfg.fit_intercept, cfg.scan).dump(2) + "\n",
                               manifest);
            break;
        }

        case ExperimentType::scaling_fit:
        case ExperimentType::c0_profile: {
            std::vector<ScalingSample> rows;
            if (cfg.experiment == ExperimentType::c0_profile && cfg.params.empty()) {
                const LogFactorialTable lf(max_n);
                for (int n : cfg.sizes)
                    for (double p : cfg.fractions)
                        task("dicke N=" + std::to_string(n) + " p=" + format_double(p), [&] {
                            const Bipartition cut = Bipartition::fraction_of(n, p);
                            rows.push_back(normalized_average(
                                "dicke", n, p,
                                dicke_basis_average_ee(n, cut, lf, cfg.threads)));
                        });
            } else {
                const LogFactorialTable lf(max_n);
                for (const LmgParams& par : cfg.params)
                    for (int n : cfg.sizes) {
                        detail::SolvedSectors solved;
                        const std::string label =
                            detail::lmg_label(par) + "/" + to_string(cfg.sector);
                        task("solve " + detail::lmg_label(par) + " N=" + std::to_string(n),
                             [&] { solved = detail::solve_choice(par, n, cfg.sector); });
                        for (double p : cfg.fractions)
                            task("entropies " + detail::lmg_label(par) +
                                     " N=" + std::to_string(n) + " p=" + format_double(p),
                                 [&] {
                                     const Bipartition cut = Bipartition::fraction_of(n, p);
                                     rows.push_back(normalized_average(
                                         label, n, p,
                                         detail::average_over(solved, cut, lf, cfg.threads)));
                                 });
                    }
            }
            detail::write_file(dir, "scaling.csv", detail::scaling_csv(rows), manifest);
            if (cfg.experiment == ExperimentType::scaling_fit) {
                const auto groups = detail::fit_groups(rows);
                detail::write_file(
                    dir, "fit.json",
                    detail::fit_json(groups, cfg.fit_intercept, cfg.scan).dump(2) + "\n",
                    manifest);
            }
            break;
        }

        case ExperimentType::lmg_spectrum:
        case ExperimentType::distribution: {
            const LogFactorialTable lf(max_n);
            const LmgParams par = cfg.params[0];
            const int n = cfg.sizes[0];
            const double p = cfg.fractions[0];
            const Parity sector = cfg.sector == SectorChoice::positive ? Parity::positive
                                                                       : Parity::negative;
            SpectrumEntanglementProfile profile;
            task("profile " + detail::lmg_label(par) + " N=" + std::to_string(n) +
                     " p=" + format_double(p),
                 [&] {
                     const SolvedSector solved = solve_sector(par, n, sector);
                     profile = ee_profile(solved, Bipartition::fraction_of(n, p), lf,
                                          cfg.threads);
                 });
            detail::write_file(dir, "profile.csv", detail::profile_csv(profile), manifest);
            if (cfg.experiment == ExperimentType::distribution) {
                const DosHistogram hist = dos_histogram(profile.scaled_energies, cfg.bins);
                detail::write_file(dir, "dos.csv", detail::dos_csv(hist), manifest);
            }
            break;
        }

        case ExperimentType::zones: {
            json out = json::array();
            for (const LmgParams& par : cfg.params)
                task("zone " + detail::lmg_label(par),
                     [&] { out.push_back(detail::zone_json(par, classify_zone(par))); });
            detail::write_file(dir, "zones.json", out.dump(2) + "\n", manifest);
            break;
        }
    }

    json jm;
    jm["version"] = manifest.version;
    jm["experiment"] = to_string(cfg.experiment);
    jm["config"] = manifest.config_echo;
    jm["tasks"] = json::array();
    for (const auto& t : manifest.tasks)
        jm["tasks"].push_back({{"name", t.name}, {"seconds", t.seconds}});
    jm["files"] = json::array();
    for (const auto& f : manifest.files)
        jm["files"].push_back({{"name", f.name}, {"fnv1a64", f.checksum}});
    detail::write_file(dir, "manifest.json", jm.dump(2) + "\n", manifest);
    return manifest;
}

// ---------------------------------------------------------------------------
// scaling.csv reader for the standalone fit subcommand

inline std::vector<ScalingSample> read_scaling_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "basis,N,p,s_max,avg_ee,normalized")
        throw IoError("unrecognized scaling.csv header in " + path);
    std::vector<ScalingSample> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 6)
            throw IoError("bad row at " + path + ":" + std::to_string(lineno));
        try {
            ScalingSample s;
            s.basis = cells[0];
            s.n_qubits = std::stoi(cells[1]);
            s.fraction = std::stod(cells[2]);
            s.s_max = std::stod(cells[3]);
            s.average = std::stod(cells[4]);
            s.normalized = std::stod(cells[5]);
            rows.push_back(std::move(s));
        } catch (const std::exception&) {
            throw IoError("bad numeric cell at " + path + ":" + std::to_string(lineno));
        }
    }
    return rows;
}

inline json fit_from_csv(const std::string& path, double intercept,
                         const InterceptScanSpec& scan) {
    const auto rows = read_scaling_csv(path);
    if (rows.empty()) throw IoError("no data rows in " + path);
    return detail::fit_json(detail::fit_groups(rows), intercept, scan);
}

}  // namespace spinlab::cli
