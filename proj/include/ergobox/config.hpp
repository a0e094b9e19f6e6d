#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ergobox/csv.hpp"
#include "ergobox/ergodic.hpp"
#include "ergobox/errors.hpp"
#include "ergobox/model.hpp"
#include "ergobox/thermo.hpp"

namespace ergobox {

struct PotentialSpec {
    std::string kind;  // harmonic | power | well | tabulated
    double omega = 1.0;
    double osc_mass = 1.0;
    int n = 4;
    double a = 1.0;
    bool over_n = true;
    double half_width = 1.0;
    double depth = 0.0;
    std::string file;
};

struct RunConfig {
    PotentialSpec potential;
    double hbar = 1.0;
    double mass = 1.0;

    bool sweep = false;
    double beta = 1.0;
    double tmin = 0.1;
    double tmax = 10.0;
    int points = 12;
    bool units_delta01 = true;

    std::vector<Method> methods{Method::Ergodic, Method::Spectral};

    QuadratureSpec quad{};
    int spectral_points = 4096;
    int spectral_k = 16;

    double grid_xmin = 0.0;  // xmin == xmax requests an automatic grid
    double grid_xmax = 0.0;
    int grid_points = 101;

    std::string out_dir = "out";
    std::uint64_t seed = 20260816ULL;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline double cfg_double(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + v + "'", line);
    }
}

inline int cfg_int(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError("expected an integer, got '" + v + "'", line);
    }
}

inline std::uint64_t cfg_u64(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw ConfigError("expected an unsigned integer, got '" + v + "'", line);
    }
}

inline bool cfg_bool(const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("expected true or false, got '" + v + "'", line);
}

}  // namespace detail

// Parses the sectioned key-value format. Unknown sections and keys are
// rejected with the offending line number; defaults fill everything that a
// valid document may omit.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    int potential_blocks = 0;
    bool beta_given = false;
    bool sweep_given = false;

    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = detail::trim(raw);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("malformed section header", line);
            section = detail::trim(s.substr(1, s.size() - 2));
            if (section == "potential") {
                ++potential_blocks;
                if (potential_blocks > 1)
                    throw ConfigError("exactly one [potential] block is allowed",
                                      line);
            } else if (section != "constants" && section != "temperature" &&
                       section != "methods" && section != "quadrature" &&
                       section != "spectral" && section != "grid" &&
                       section != "output") {
                throw ConfigError("unknown section [" + section + "]", line);
            }
            continue;
        }

        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line);
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string val = detail::trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line);
        if (val.empty()) throw ConfigError("empty value for '" + key + "'", line);
        if (section.empty())
            throw ConfigError("key '" + key + "' appears before any section",
                              line);

        if (section == "potential") {
            if (key == "kind") cfg.potential.kind = val;
            else if (key == "omega") cfg.potential.omega = detail::cfg_double(val, line);
            else if (key == "mass") cfg.potential.osc_mass = detail::cfg_double(val, line);
            else if (key == "n") cfg.potential.n = detail::cfg_int(val, line);
            else if (key == "a") cfg.potential.a = detail::cfg_double(val, line);
            else if (key == "over_n") cfg.potential.over_n = detail::cfg_bool(val, line);
            else if (key == "half_width") cfg.potential.half_width = detail::cfg_double(val, line);
            else if (key == "depth") cfg.potential.depth = detail::cfg_double(val, line);
            else if (key == "file") cfg.potential.file = val;
            else throw ConfigError("unknown key '" + key + "' in [potential]", line);
        } else if (section == "constants") {
            if (key == "hbar") cfg.hbar = detail::cfg_double(val, line);
            else if (key == "mass") cfg.mass = detail::cfg_double(val, line);
            else throw ConfigError("unknown key '" + key + "' in [constants]", line);
        } else if (section == "temperature") {
            if (key == "beta") {
                cfg.beta = detail::cfg_double(val, line);
                beta_given = true;
            } else if (key == "tmin") {
                cfg.tmin = detail::cfg_double(val, line);
                sweep_given = true;
            } else if (key == "tmax") {
                cfg.tmax = detail::cfg_double(val, line);
                sweep_given = true;
            } else if (key == "points") {
                cfg.points = detail::cfg_int(val, line);
                sweep_given = true;
            } else if (key == "units") {
                if (val == "delta01") cfg.units_delta01 = true;
                else if (val == "absolute") cfg.units_delta01 = false;
                else throw ConfigError("units must be delta01 or absolute", line);
                sweep_given = true;
            } else {
                throw ConfigError("unknown key '" + key + "' in [temperature]", line);
            }
        } else if (section == "methods") {
            if (key == "list") {
                cfg.methods.clear();
                std::stringstream ms(val);
                std::string item;
                while (std::getline(ms, item, ',')) {
                    item = detail::trim(item);
                    if (item.empty()) continue;
                    try {
                        cfg.methods.push_back(method_from_name(item));
                    } catch (const std::exception&) {
                        throw ConfigError("unknown method '" + item + "'", line);
                    }
                }
                if (cfg.methods.empty())
                    throw ConfigError("method list is empty", line);
            } else {
                throw ConfigError("unknown key '" + key + "' in [methods]", line);
            }
        } else if (section == "quadrature") {
            if (key == "s_nodes") cfg.quad.s_nodes = detail::cfg_int(val, line);
            else if (key == "l_panel_nodes") cfg.quad.l_panel_nodes = detail::cfg_int(val, line);
            else if (key == "l_tail") cfg.quad.l_tail = detail::cfg_double(val, line);
            else if (key == "alpha_nodes") cfg.quad.alpha_nodes = detail::cfg_int(val, line);
            else throw ConfigError("unknown key '" + key + "' in [quadrature]", line);
        } else if (section == "spectral") {
            if (key == "side_points") cfg.spectral_points = detail::cfg_int(val, line);
            else if (key == "k_states") cfg.spectral_k = detail::cfg_int(val, line);
            else throw ConfigError("unknown key '" + key + "' in [spectral]", line);
        } else if (section == "grid") {
            if (key == "xmin") cfg.grid_xmin = detail::cfg_double(val, line);
            else if (key == "xmax") cfg.grid_xmax = detail::cfg_double(val, line);
            else if (key == "points") cfg.grid_points = detail::cfg_int(val, line);
            else throw ConfigError("unknown key '" + key + "' in [grid]", line);
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = val;
            else if (key == "seed") cfg.seed = detail::cfg_u64(val, line);
            else throw ConfigError("unknown key '" + key + "' in [output]", line);
        }
    }

    if (potential_blocks == 0)
        throw ConfigError("missing [potential] section");
    if (cfg.potential.kind.empty())
        throw ConfigError("missing required key 'kind' in [potential]");
    const std::string& kind = cfg.potential.kind;
    if (kind != "harmonic" && kind != "power" && kind != "well" &&
        kind != "tabulated")
        throw ConfigError("unknown potential kind '" + kind + "'");
    if (kind == "harmonic" && !(cfg.potential.omega > 0.0))
        throw ConfigError("harmonic potential needs omega > 0");
    if (kind == "power") {
        if (cfg.potential.n < 2 || cfg.potential.n % 2 != 0)
            throw ConfigError("symmetry requires an even exponent n >= 2");
        if (!(cfg.potential.a > 0.0))
            throw ConfigError("power potential needs a > 0");
    }
    if (kind == "well" && !(cfg.potential.half_width > 0.0))
        throw ConfigError("well potential needs half_width > 0");
    if (kind == "tabulated" && cfg.potential.file.empty())
        throw ConfigError("tabulated potential needs a file");
    if (!(cfg.hbar > 0.0) || !(cfg.mass > 0.0))
        throw ConfigError("constants must be positive");
    if (beta_given && sweep_given)
        throw ConfigError("give either a single beta or a sweep, not both");
    cfg.sweep = sweep_given;
    if (beta_given && !(cfg.beta > 0.0))
        throw ConfigError("beta must be positive");
    if (sweep_given) {
        if (!(cfg.tmin > 0.0))
            throw ConfigError("sweep bounds must be positive");
        if (cfg.tmin > cfg.tmax)
            throw ConfigError("sweep bounds must be ordered: tmin <= tmax");
        if (cfg.points < 1) throw ConfigError("sweep needs points >= 1");
    }
    if (cfg.quad.s_nodes < 4 || cfg.quad.l_panel_nodes < 2 ||
        cfg.quad.alpha_nodes < 4)
        throw ConfigError("quadrature node counts are too small");
    if (!(cfg.quad.l_tail > 0.0) || cfg.quad.l_tail >= 1e-2)
        throw ConfigError("l_tail must lie in (0, 1e-2)");
    if (cfg.spectral_points < 512)
        throw ConfigError("spectral side_points must be at least 512");
    if (cfg.spectral_k < 2) throw ConfigError("spectral k_states must be >= 2");
    if (cfg.grid_points < 2) throw ConfigError("grid points must be >= 2");
    if (cfg.grid_xmin > cfg.grid_xmax)
        throw ConfigError("grid bounds must be ordered");
    return cfg;
}

// Serializes a config with every default materialized; parsing the result
// reproduces the struct exactly.
inline std::string render_config(const RunConfig& cfg) {
    std::ostringstream o;
    o << "[potential]\n";
    o << "kind = " << cfg.potential.kind << "\n";
    if (cfg.potential.kind == "harmonic") {
        o << "omega = " << format_double(cfg.potential.omega) << "\n";
        o << "mass = " << format_double(cfg.potential.osc_mass) << "\n";
    } else if (cfg.potential.kind == "power") {
        o << "n = " << cfg.potential.n << "\n";
        o << "a = " << format_double(cfg.potential.a) << "\n";
        o << "over_n = " << (cfg.potential.over_n ? "true" : "false") << "\n";
    } else if (cfg.potential.kind == "well") {
        o << "half_width = " << format_double(cfg.potential.half_width) << "\n";
        o << "depth = " << format_double(cfg.potential.depth) << "\n";
    } else if (cfg.potential.kind == "tabulated") {
        o << "file = " << cfg.potential.file << "\n";
    }
    o << "\n[constants]\n";
    o << "hbar = " << format_double(cfg.hbar) << "\n";
    o << "mass = " << format_double(cfg.mass) << "\n";
    o << "\n[temperature]\n";
    if (cfg.sweep) {
        o << "tmin = " << format_double(cfg.tmin) << "\n";
        o << "tmax = " << format_double(cfg.tmax) << "\n";
        o << "points = " << cfg.points << "\n";
        o << "units = " << (cfg.units_delta01 ? "delta01" : "absolute") << "\n";
    } else {
        o << "beta = " << format_double(cfg.beta) << "\n";
    }
    o << "\n[methods]\n";
    o << "list = ";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        if (i) o << ",";
        o << method_name(cfg.methods[i]);
    }
    o << "\n";
    o << "\n[quadrature]\n";
    o << "s_nodes = " << cfg.quad.s_nodes << "\n";
    o << "l_panel_nodes = " << cfg.quad.l_panel_nodes << "\n";
    o << "l_tail = " << format_double(cfg.quad.l_tail) << "\n";
    o << "alpha_nodes = " << cfg.quad.alpha_nodes << "\n";
    o << "\n[spectral]\n";
    o << "side_points = " << cfg.spectral_points << "\n";
    o << "k_states = " << cfg.spectral_k << "\n";
    o << "\n[grid]\n";
    o << "xmin = " << format_double(cfg.grid_xmin) << "\n";
    o << "xmax = " << format_double(cfg.grid_xmax) << "\n";
    o << "points = " << cfg.grid_points << "\n";
    o << "\n[output]\n";
    o << "dir = " << cfg.out_dir << "\n";
    o << "seed = " << cfg.seed << "\n";
    return o.str();
}

// Materializes the potential described by a config. Tabulated data comes from
// a two-column CSV of z and V samples starting at z = 0.
inline Potential make_potential(const PotentialSpec& spec) {
    if (spec.kind == "harmonic")
        return Potential::harmonic(spec.omega, spec.osc_mass);
    if (spec.kind == "power")
        return Potential::power_law(spec.n, spec.a, spec.over_n);
    if (spec.kind == "well")
        return Potential::infinite_well(spec.half_width, spec.depth);
    if (spec.kind == "tabulated") {
        CsvTable t = read_csv(spec.file);
        if (t.header.size() != 2)
            throw ConfigError("tabulated potential csv needs two columns");
        std::vector<double> zs, vs;
        zs.reserve(t.rows.size());
        vs.reserve(t.rows.size());
        for (const auto& r : t.rows) {
            zs.push_back(csv_to_double(r[0]));
            vs.push_back(csv_to_double(r[1]));
        }
        return Potential::tabulated(zs, vs);
    }
    throw ConfigError("unknown potential kind '" + spec.kind + "'");
}

}  // namespace ergobox
