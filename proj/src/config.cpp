#include "nlchns/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlchns/ops.hpp"
#include "nlchns/snapshot.hpp"

namespace nlchns {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(d);
    } catch (...) {
        throw ConfigError(key + ": not an integer: '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "grid.lx") c.grid_lx = to_double(key, val);
        else if (key == "grid.ly") c.grid_ly = to_double(key, val);
        else if (key == "grid.nx") c.grid_nx = to_int(key, val);
        else if (key == "grid.ny") c.grid_ny = to_int(key, val);
        else if (key == "kernel.family") c.kernel_family = val;
        else if (key == "kernel.amplitude") c.kernel_amplitude = to_double(key, val);
        else if (key == "kernel.epsilon") c.kernel_epsilon = to_double(key, val);
        else if (key == "kernel.radius") c.kernel_radius = to_double(key, val);
        else if (key == "potential.family") c.potential_family = val;
        else if (key == "potential.coeffs") c.potential_coeffs = to_list(key, val);
        else if (key == "potential.validation_range")
            c.potential_validation_range = to_double(key, val);
        else if (key == "ch.dt") c.ch_dt = to_double(key, val);
        else if (key == "ch.picard_tol") c.ch_picard_tol = to_double(key, val);
        else if (key == "ch.picard_max") c.ch_picard_max = to_int(key, val);
        else if (key == "ch.convection_scheme") c.ch_convection_scheme = val;
        else if (key == "ns.nu") c.ns_nu = to_double(key, val);
        else if (key == "ns.viscous_implicit") c.ns_viscous_implicit = to_bool(key, val);
        else if (key == "ns.poisson_tol") c.ns_poisson_tol = to_double(key, val);
        else if (key == "forcing.mode") c.forcing_mode = val;
        else if (key == "forcing.values") c.forcing_values = val;
        else if (key == "init.kind") c.init_kind = val;
        else if (key == "init.m") c.init_m = to_double(key, val);
        else if (key == "init.amplitude") c.init_amplitude = to_double(key, val);
        else if (key == "init.noise") c.init_noise = to_double(key, val);
        else if (key == "init.path") c.init_path = val;
        else if (key == "seed") c.seed = std::stoull(val);
        else if (key == "t_end") c.t_end = to_double(key, val);
        else if (key == "sample_every") c.sample_every = to_int(key, val);
        else if (key == "snapshot_every") c.snapshot_every = to_int(key, val);
        else if (key == "output.dir") c.output_dir = val;
        else throw ConfigError("unknown config key: " + key);
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream o;
    o << "grid.lx = " << fmt(c.grid_lx) << "\n";
    o << "grid.ly = " << fmt(c.grid_ly) << "\n";
    o << "grid.nx = " << c.grid_nx << "\n";
    o << "grid.ny = " << c.grid_ny << "\n";
    o << "kernel.family = " << c.kernel_family << "\n";
    o << "kernel.amplitude = " << fmt(c.kernel_amplitude) << "\n";
    o << "kernel.epsilon = " << fmt(c.kernel_epsilon) << "\n";
    o << "kernel.radius = " << fmt(c.kernel_radius) << "\n";
    o << "potential.family = " << c.potential_family << "\n";
    if (!c.potential_coeffs.empty()) {
        o << "potential.coeffs = ";
        for (size_t i = 0; i < c.potential_coeffs.size(); ++i)
            o << (i ? "," : "") << fmt(c.potential_coeffs[i]);
        o << "\n";
    }
    o << "potential.validation_range = " << fmt(c.potential_validation_range) << "\n";
    o << "ch.dt = " << fmt(c.ch_dt) << "\n";
    o << "ch.picard_tol = " << fmt(c.ch_picard_tol) << "\n";
    o << "ch.picard_max = " << c.ch_picard_max << "\n";
    o << "ch.convection_scheme = " << c.ch_convection_scheme << "\n";
    o << "ns.nu = " << fmt(c.ns_nu) << "\n";
    o << "ns.viscous_implicit = " << (c.ns_viscous_implicit ? "true" : "false") << "\n";
    o << "ns.poisson_tol = " << fmt(c.ns_poisson_tol) << "\n";
    o << "forcing.mode = " << c.forcing_mode << "\n";
    if (!c.forcing_values.empty()) o << "forcing.values = " << c.forcing_values << "\n";
    o << "init.kind = " << c.init_kind << "\n";
    o << "init.m = " << fmt(c.init_m) << "\n";
    o << "init.amplitude = " << fmt(c.init_amplitude) << "\n";
    o << "init.noise = " << fmt(c.init_noise) << "\n";
    if (!c.init_path.empty()) o << "init.path = " << c.init_path << "\n";
    o << "seed = " << c.seed << "\n";
    o << "t_end = " << fmt(c.t_end) << "\n";
    o << "sample_every = " << c.sample_every << "\n";
    o << "snapshot_every = " << c.snapshot_every << "\n";
    o << "output.dir = " << c.output_dir << "\n";
    return o.str();
}

void validate_config(const RunConfig& c) {
    if (!(c.grid_lx > 0.0)) throw ConfigError("grid.lx: must be > 0");
    if (!(c.grid_ly > 0.0)) throw ConfigError("grid.ly: must be > 0");
    if (c.grid_nx < 4) throw ConfigError("grid.nx: must be >= 4");
    if (c.grid_ny < 4) throw ConfigError("grid.ny: must be >= 4");
    if (c.kernel_family != "gaussian" && c.kernel_family != "mollifier")
        throw ConfigError("kernel.family: must be gaussian or mollifier");
    if (!(c.kernel_amplitude > 0.0)) throw ConfigError("kernel.amplitude: must be > 0");
    if (!(c.kernel_epsilon > 0.0)) throw ConfigError("kernel.epsilon: must be > 0");
    if (c.potential_family != "quartic" && c.potential_family != "even_poly")
        throw ConfigError("potential.family: must be quartic or even_poly");
    if (!(c.ch_dt > 0.0)) throw ConfigError("ch.dt: must be > 0");
    if (!(c.ch_picard_tol > 0.0)) throw ConfigError("ch.picard_tol: must be > 0");
    if (c.ch_picard_max < 1) throw ConfigError("ch.picard_max: must be >= 1");
    if (c.ch_convection_scheme != "centered" && c.ch_convection_scheme != "upwind")
        throw ConfigError("ch.convection_scheme: must be centered or upwind");
    if (!(c.ns_nu > 0.0)) throw ConfigError("ns.nu: must be > 0");
    if (!(c.ns_poisson_tol > 0.0)) throw ConfigError("ns.poisson_tol: must be > 0");
    if (c.forcing_mode != "zero" && c.forcing_mode != "constant" && c.forcing_mode != "table")
        throw ConfigError("forcing.mode: must be zero, constant or table");
    if (c.init_kind != "constant" && c.init_kind != "stripe" && c.init_kind != "random" &&
        c.init_kind != "snapshot")
        throw ConfigError("init.kind: must be constant, stripe, random or snapshot");
    if (c.init_kind == "snapshot" && c.init_path.empty())
        throw ConfigError("init.path: required for init.kind = snapshot");
    if (!(c.t_end >= 0.0)) throw ConfigError("t_end: must be >= 0");
    if (c.sample_every < 1) throw ConfigError("sample_every: must be >= 1");
    if (c.snapshot_every < 0) throw ConfigError("snapshot_every: must be >= 0");
}

Grid grid_from(const RunConfig& c) { return make_grid(c.grid_lx, c.grid_ly, c.grid_nx, c.grid_ny); }

KernelSpec kernel_from(const RunConfig& c, const Grid& g) {
    const KernelFamily fam =
        (c.kernel_family == "mollifier") ? KernelFamily::mollifier : KernelFamily::gaussian;
    return build_kernel(fam, c.kernel_amplitude, c.kernel_epsilon, c.kernel_radius, g);
}

PotentialSpec potential_from(const RunConfig& c) {
    if (c.potential_family == "quartic") return make_quartic(c.potential_validation_range);
    return make_even_poly(c.potential_coeffs, c.potential_validation_range);
}

double unit_symmetric(unsigned long long& state) {
    // splitmix64 step, mapped to [-1, 1)
    state += 0x9E3779B97f4A7C15ULL;
    unsigned long long z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
    return 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
}

ScalarField initial_phi_from(const RunConfig& c, const Grid& g) {
    ScalarField phi(g, c.init_m);
    unsigned long long rng = c.seed;
    if (c.init_kind == "constant") {
        return phi;
    } else if (c.init_kind == "stripe") {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                phi.at(i, j) = c.init_m + c.init_amplitude * std::cos(M_PI * g.xc(i) / g.lx) +
                               c.init_noise * unit_symmetric(rng);
    } else if (c.init_kind == "random") {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                phi.at(i, j) = c.init_m + c.init_amplitude * unit_symmetric(rng);
    } else if (c.init_kind == "snapshot") {
        phi = read_snapshot(c.init_path);
        if (!(phi.grid == g))
            throw ConfigError("init.path: snapshot grid does not match the configured grid");
    }
    add_scalar_inplace(phi, c.init_m - mean(phi));  // exact prescribed mean
    return phi;
}

Forcing forcing_from(const RunConfig& c, const Grid& g) {
    if (c.forcing_mode == "zero") return Forcing::none();
    if (c.forcing_mode == "constant") {
        const std::vector<double> v = to_list("forcing.values", c.forcing_values);
        if (v.size() != 2) throw ConfigError("forcing.values: expected 'fx,fy'");
        return Forcing::uniform(g, v[0], v[1]);
    }
    // table: "t:fx,fy; t:fx,fy; ..."
    std::vector<double> times;
    std::vector<std::array<double, 2>> vals;
    std::stringstream ss(c.forcing_values);
    std::string entry;
    while (std::getline(ss, entry, ';')) {
        entry = trim(entry);
        if (entry.empty()) continue;
        const size_t colon = entry.find(':');
        if (colon == std::string::npos)
            throw ConfigError("forcing.values: table entries are 't:fx,fy'");
        times.push_back(to_double("forcing.values", trim(entry.substr(0, colon))));
        const std::vector<double> v = to_list("forcing.values", entry.substr(colon + 1));
        if (v.size() != 2) throw ConfigError("forcing.values: table entries are 't:fx,fy'");
        vals.push_back({v[0], v[1]});
    }
    return Forcing::table(g, std::move(times), std::move(vals));
}

ChStepConfig ch_config_from(const RunConfig& c) {
    ChStepConfig cfg;
    cfg.dt = c.ch_dt;
    cfg.picard_tol = c.ch_picard_tol;
    cfg.picard_max = c.ch_picard_max;
    cfg.scheme = (c.ch_convection_scheme == "upwind") ? ConvectionScheme::upwind
                                                      : ConvectionScheme::centered;
    return cfg;
}

NsStepConfig ns_config_from(const RunConfig& c) {
    NsStepConfig cfg;
    cfg.dt = c.ch_dt;  // the coupler owns dt
    cfg.nu = c.ns_nu;
    cfg.viscous_implicit = c.ns_viscous_implicit;
    cfg.poisson_tol = c.ns_poisson_tol;
    return cfg;
}

}  // namespace nlchns
