#include "biphoton/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/io.hpp"

namespace biphoton {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

class KeyValues {
public:
    explicit KeyValues(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty())
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": empty key or value");
            values_[key] = value;
        }
    }

    double number(const std::string& key, double fallback) {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(it->first);
        return parse_number(key, it->second);
    }

    long integer(const std::string& key, long fallback) {
        const double v = number(key, static_cast<double>(fallback));
        const double rounded = std::round(v);
        if (std::abs(v - rounded) > 1e-9)
            throw ConfigError(key + ": expected an integer, got " + format_double(v));
        return static_cast<long>(rounded);
    }

    bool boolean(const std::string& key, bool fallback) {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(it->first);
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError(key + ": expected true/false, got '" + it->second + "'");
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(it->first);
        return it->second;
    }

    std::vector<double> number_list(const std::string& key) {
        const auto it = values_.find(key);
        if (it == values_.end()) return {};
        consumed_.insert(it->first);
        std::vector<double> out;
        std::istringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(parse_number(key, item));
        }
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : values_)
            if (!consumed_.count(key))
                throw ConfigError("unknown config key '" + key + "'");
    }

private:
    static double parse_number(const std::string& key, const std::string& s) {
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw ConfigError(key + ": cannot parse number '" + s + "'");
        }
        if (pos != s.size())
            throw ConfigError(key + ": trailing characters in number '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    KeyValues kv(text);
    ExperimentConfig cfg;

    cfg.crystal.length = kv.number("crystal.length_L", cfg.crystal.length);
    cfg.crystal.pump_wavelength = kv.number("crystal.pump_wavelength", cfg.crystal.pump_wavelength);
    cfg.crystal.refractive_index = kv.number("crystal.refractive_index", cfg.crystal.refractive_index);
    cfg.birth_zone_b = kv.number("crystal.birth_zone_b", cfg.birth_zone_b);

    cfg.pump.waist_w0 = kv.number("pump.w0", cfg.pump.waist_w0);
    cfg.pump.phase_phi = kv.number("pump.phi", cfg.pump.phase_phi);

    cfg.optics.f2 = kv.number("optics.f2", cfg.optics.f2);
    cfg.optics.f = kv.number("optics.f", cfg.optics.f);
    cfg.optics.signal_wavelength = kv.number("optics.signal_wavelength", cfg.optics.signal_wavelength);

    const double separation = kv.number("slits.separation_2d", cfg.slits.separation());
    cfg.slits.half_separation = separation / 2.0;
    cfg.slits.opening = kv.number("slits.opening_a", cfg.slits.opening);

    cfg.grids.slit_n = static_cast<int>(kv.integer("grids.slit_n", cfg.grids.slit_n));
    cfg.grids.slit_extent = kv.number("grids.slit_extent", cfg.grids.slit_extent);
    cfg.grids.det_n = static_cast<int>(kv.integer("grids.det_n", cfg.grids.det_n));
    cfg.grids.det_extent = kv.number("grids.det_extent", cfg.grids.det_extent);

    cfg.acquisition.frames = static_cast<int>(kv.integer("acquisition.frames", cfg.acquisition.frames));
    cfg.acquisition.nx = static_cast<int>(kv.integer("acquisition.nx", cfg.acquisition.nx));
    cfg.acquisition.ny = static_cast<int>(kv.integer("acquisition.ny", cfg.acquisition.ny));
    cfg.acquisition.pixel_pitch = kv.number("acquisition.pitch", cfg.acquisition.pixel_pitch);
    cfg.acquisition.mean_pairs_per_frame = kv.number("acquisition.mu_pairs", cfg.acquisition.mean_pairs_per_frame);
    cfg.acquisition.detection_efficiency = kv.number("acquisition.efficiency", cfg.acquisition.detection_efficiency);
    cfg.acquisition.background_rate_per_pixel = kv.number("acquisition.background", cfg.acquisition.background_rate_per_pixel);
    cfg.acquisition.y_envelope_sigma = kv.number("acquisition.y_sigma", cfg.acquisition.y_envelope_sigma);
    cfg.acquisition.rng_seed = static_cast<uint64_t>(kv.integer("acquisition.seed", static_cast<long>(cfg.acquisition.rng_seed)));

    cfg.fit.cost_rel_tol = kv.number("fit.cost_rel_tol", cfg.fit.cost_rel_tol);
    cfg.fit.gradient_tol = kv.number("fit.gradient_tol", cfg.fit.gradient_tol);
    cfg.fit.max_iterations = static_cast<int>(kv.integer("fit.max_iterations", cfg.fit.max_iterations));

    cfg.sweep.w0_list = kv.number_list("pump.w0_list");
    cfg.sweep.regime_high = kv.number("sweep.regime_high", cfg.sweep.regime_high);
    cfg.sweep.regime_low = kv.number("sweep.regime_low", cfg.sweep.regime_low);
    cfg.sweep.monte_carlo = kv.boolean("sweep.monte_carlo", cfg.sweep.monte_carlo);

    cfg.output.directory = kv.text("output.directory", cfg.output.directory);
    cfg.output.write_csv = kv.boolean("output.csv", cfg.output.write_csv);
    cfg.output.write_bpf2 = kv.boolean("output.bpf2", cfg.output.write_bpf2);

    kv.reject_unknown();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

void ExperimentConfig::validate() const {
    try {
        crystal.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("crystal.*: ") + e.what());
    }
    require(birth_zone_b >= 0.0, "crystal.birth_zone_b: must be >= 0 (0 = derive from crystal)");
    try {
        pump.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("pump.w0: ") + e.what());
    }
    optics.validate();
    slits.validate();

    require(grids.slit_n >= 64 && (grids.slit_n & (grids.slit_n - 1)) == 0,
            "grids.slit_n: must be a power of two >= 64");
    require(grids.det_n >= 64 && (grids.det_n & (grids.det_n - 1)) == 0,
            "grids.det_n: must be a power of two >= 64");
    require(grids.slit_extent > 0.0, "grids.slit_extent: must be > 0");
    require(grids.det_extent > 0.0, "grids.det_extent: must be > 0");
    require(grids.slit_extent / 2.0 > slits.half_separation + slits.opening / 2.0,
            "grids.slit_extent: must cover both slits (slits.separation_2d/2 + opening_a/2)");

    const double fringe = optics.f * optics.signal_wavelength / slits.separation();
    require(fringe >= 4.0 * grids.det_extent / grids.det_n,
            "grids.det_n/det_extent: detector spacing must resolve the fringe period "
            "f*lambda/separation_2d with >= 4 samples");

    acquisition.validate();
    require(acquisition.nx * acquisition.pixel_pitch <= grids.det_extent * (1.0 + 1e-12),
            "acquisition.nx*pitch: pixel array must fit inside grids.det_extent");

    require(fit.cost_rel_tol > 0.0, "fit.cost_rel_tol: must be > 0");
    require(fit.gradient_tol > 0.0, "fit.gradient_tol: must be > 0");
    require(fit.max_iterations >= 1, "fit.max_iterations: must be >= 1");

    require(sweep.regime_low < sweep.regime_high,
            "sweep.regime_low: must be below sweep.regime_high");
    for (double w0 : sweep.w0_list)
        require(w0 > 0.0, "pump.w0_list: every waist must be > 0");
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream out;
    const auto put = [&](const char* key, const std::string& value) {
        out << key << " = " << value << "\n";
    };
    const auto putn = [&](const char* key, double v) { put(key, format_double(v)); };
    putn("crystal.length_L", crystal.length);
    putn("crystal.pump_wavelength", crystal.pump_wavelength);
    putn("crystal.refractive_index", crystal.refractive_index);
    putn("crystal.birth_zone_b", birth_zone_b);
    putn("pump.w0", pump.waist_w0);
    putn("pump.phi", pump.phase_phi);
    if (!sweep.w0_list.empty()) {
        std::ostringstream list;
        for (size_t i = 0; i < sweep.w0_list.size(); ++i)
            list << (i ? ", " : "") << format_double(sweep.w0_list[i]);
        put("pump.w0_list", list.str());
    }
    putn("optics.f2", optics.f2);
    putn("optics.f", optics.f);
    putn("optics.signal_wavelength", optics.signal_wavelength);
    putn("slits.separation_2d", slits.separation());
    putn("slits.opening_a", slits.opening);
    putn("grids.slit_n", grids.slit_n);
    putn("grids.slit_extent", grids.slit_extent);
    putn("grids.det_n", grids.det_n);
    putn("grids.det_extent", grids.det_extent);
    putn("acquisition.frames", acquisition.frames);
    putn("acquisition.nx", acquisition.nx);
    putn("acquisition.ny", acquisition.ny);
    putn("acquisition.pitch", acquisition.pixel_pitch);
    putn("acquisition.mu_pairs", acquisition.mean_pairs_per_frame);
    putn("acquisition.efficiency", acquisition.detection_efficiency);
    putn("acquisition.background", acquisition.background_rate_per_pixel);
    putn("acquisition.y_sigma", acquisition.y_envelope_sigma);
    putn("acquisition.seed", static_cast<double>(acquisition.rng_seed));
    putn("fit.cost_rel_tol", fit.cost_rel_tol);
    putn("fit.gradient_tol", fit.gradient_tol);
    putn("fit.max_iterations", fit.max_iterations);
    putn("sweep.regime_high", sweep.regime_high);
    putn("sweep.regime_low", sweep.regime_low);
    put("sweep.monte_carlo", sweep.monte_carlo ? "true" : "false");
    put("output.directory", output.directory);
    put("output.csv", output.write_csv ? "true" : "false");
    put("output.bpf2", output.write_bpf2 ? "true" : "false");
    return out.str();
}

uint64_t ExperimentConfig::config_hash() const { return fnv1a64(canonical_text()); }

} // namespace biphoton
