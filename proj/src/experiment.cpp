#include "csim/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "csim/results.hpp"
#include "csim/version.hpp"

namespace csim::experiment {

namespace {

using nlohmann::json;

json require_field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key))
        throw ConfigError("missing required field", path + "." + key);
    return obj.at(key);
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& path) {
    const json v = require_field(obj, key, path);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field has the wrong type", path + "." + key);
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, const std::string& path, T fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field has the wrong type", path + "." + key);
    }
}

CodebookSpec parse_codebook(const json& obj, const std::string& path) {
    CodebookSpec cs;
    const std::string family = get_as<std::string>(obj, "family", path);
    try {
        cs.family = codebook::family_from_name(family);
    } catch (const std::exception&) {
        throw ConfigError("unknown codebook family '" + family + "'", path + ".family");
    }
    switch (cs.family) {
        case codebook::Family::zadoff_chu:
            cs.length_L = get_as<int>(obj, "L", path);
            cs.roots = get_or<std::vector<int>>(obj, "roots", path, {});
            break;
        case codebook::Family::cyclic_chirp:
            cs.spreading_factor = get_as<int>(obj, "SF", path);
            cs.oversampling_P = get_or<int>(obj, "P", path, 1);
            break;
        case codebook::Family::file:
            cs.path = get_as<std::string>(obj, "path", path);
            break;
    }
    return cs;
}

json codebook_to_json(const CodebookSpec& cs) {
    json j;
    j["family"] = codebook::family_name(cs.family);
    switch (cs.family) {
        case codebook::Family::zadoff_chu:
            j["L"] = cs.length_L;
            j["roots"] = cs.roots;
            break;
        case codebook::Family::cyclic_chirp:
            j["SF"] = cs.spreading_factor;
            j["P"] = cs.oversampling_P;
            break;
        case codebook::Family::file:
            j["path"] = cs.path;
            break;
    }
    return j;
}

Experiment parse_experiment(const json& obj, const std::string& path) {
    Experiment e;
    e.name = get_as<std::string>(obj, "name", path);
    const std::string scheme = get_as<std::string>(obj, "scheme", path);
    try {
        e.scheme = modem::scheme_from_name(scheme);
    } catch (const std::exception&) {
        throw ConfigError("unknown scheme '" + scheme + "'", path + ".scheme");
    }
    e.nt = get_as<int>(obj, "Nt", path);
    e.nr = get_as<int>(obj, "Nr", path);
    e.nc = get_as<int>(obj, "Nc", path);
    e.m = get_as<int>(obj, "M", path);
    e.codebook = parse_codebook(require_field(obj, "codebook", path), path + ".codebook");
    if (obj.contains("channel")) {
        const json ch = obj.at("channel");
        e.channel.corr_r = get_or<double>(ch, "corr_r", path + ".channel", 0.0);
        e.channel.csi_error_var = get_or<double>(ch, "csi_error_var", path + ".channel", 0.0);
    }
    e.channel.num_rx_Nr = e.nr;
    e.channel.num_tx_Nt = e.nt;
    e.snr_grid_db = get_as<std::vector<double>>(obj, "snr_grid_db", path);
    for (size_t i = 1; i < e.snr_grid_db.size(); ++i)
        if (e.snr_grid_db[i] <= e.snr_grid_db[i - 1])
            throw ConfigError("SNR grid must be strictly increasing", path + ".snr_grid_db");
    if (e.snr_grid_db.empty())
        throw ConfigError("SNR grid must not be empty", path + ".snr_grid_db");
    e.max_blocks = get_or<long>(obj, "max_blocks", path, 1000000L);
    if (e.max_blocks < 1000) throw ConfigError("max_blocks must be >= 1000", path + ".max_blocks");
    e.target_errors = get_or<long>(obj, "target_errors", path, 500L);
    if (e.target_errors < 100)
        throw ConfigError("target_errors must be >= 100", path + ".target_errors");
    e.seed = get_or<uint64_t>(obj, "seed", path, 1ULL);
    const std::string det = get_or<std::string>(obj, "detector", path, "lc");
    try {
        e.detector = sim::detector_choice_from_name(det);
    } catch (const std::exception&) {
        throw ConfigError("unknown detector '" + det + "'", path + ".detector");
    }
    e.symbol_duration_s = get_or<double>(obj, "symbol_duration_s", path, 1.0);
    if (e.symbol_duration_s <= 0.0)
        throw ConfigError("symbol_duration_s must be positive", path + ".symbol_duration_s");
    e.analytic_overlay = get_or<bool>(obj, "analytic_overlay", path, true);
    e.output = get_or<std::string>(obj, "output", path, e.name + ".csv");
    return e;
}

json experiment_to_json(const Experiment& e) {
    json j;
    j["name"] = e.name;
    j["scheme"] = modem::scheme_name(e.scheme);
    j["Nt"] = e.nt;
    j["Nr"] = e.nr;
    j["Nc"] = e.nc;
    j["M"] = e.m;
    j["codebook"] = codebook_to_json(e.codebook);
    j["channel"] = {{"corr_r", e.channel.corr_r}, {"csi_error_var", e.channel.csi_error_var}};
    j["snr_grid_db"] = e.snr_grid_db;
    j["max_blocks"] = e.max_blocks;
    j["target_errors"] = e.target_errors;
    j["seed"] = e.seed;
    j["detector"] = sim::detector_choice_name(e.detector);
    j["symbol_duration_s"] = e.symbol_duration_s;
    j["analytic_overlay"] = e.analytic_overlay;
    j["output"] = e.output;
    return j;
}

} // namespace

codebook::SpreadingCodebook CodebookSpec::build(int count_Nc) const {
    switch (family) {
        case codebook::Family::zadoff_chu: {
            std::vector<int> r = roots;
            if (r.empty()) { // first count_Nc roots coprime with L
                for (int u = 1; u < length_L && static_cast<int>(r.size()) < count_Nc; ++u) {
                    if (std::gcd(u, length_L) == 1) r.push_back(u);
                }
            }
            if (static_cast<int>(r.size()) != count_Nc)
                throw std::invalid_argument("codebook roots count differs from Nc");
            return codebook::gen_zadoff_chu(length_L, r);
        }
        case codebook::Family::cyclic_chirp:
            return codebook::gen_cyclic_chirp(spreading_factor, oversampling_P, count_Nc);
        case codebook::Family::file: {
            if (!std::filesystem::exists(path))
                throw CodebookFileError("codebook file not found: " + path);
            codebook::SpreadingCodebook cb = codebook::load_codebook(path);
            if (cb.count_Nc != count_Nc)
                throw std::invalid_argument("codebook file holds " + std::to_string(cb.count_Nc) +
                                            " sequences, config expects " +
                                            std::to_string(count_Nc));
            return cb;
        }
    }
    throw std::logic_error("unknown codebook family");
}

sim::ExperimentSpec Experiment::to_spec() const {
    sim::ExperimentSpec spec;
    spec.scheme = modem::SchemeConfig::make(scheme, nt, nr, nc, m, codebook.build(nc));
    spec.channel = channel;
    spec.snr_grid_db = snr_grid_db;
    spec.max_blocks = max_blocks;
    spec.target_errors = target_errors;
    spec.master_seed = seed;
    spec.detector = detector;
    spec.symbol_duration_Ts = symbol_duration_s;
    spec.analytic_overlay = analytic_overlay;
    return spec;
}

ExperimentFile parse_experiment_file(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "$");
    }
    const json exps = require_field(doc, "experiments", "$");
    if (!exps.is_array() || exps.empty())
        throw ConfigError("experiments must be a non-empty array", "$.experiments");
    ExperimentFile file;
    for (size_t i = 0; i < exps.size(); ++i) {
        const std::string path = "experiments[" + std::to_string(i) + "]";
        file.experiments.push_back(parse_experiment(exps.at(i), path));
    }
    for (size_t i = 0; i < file.experiments.size(); ++i)
        for (size_t j = i + 1; j < file.experiments.size(); ++j)
            if (file.experiments[i].name == file.experiments[j].name)
                throw ConfigError("duplicate experiment name '" + file.experiments[i].name + "'",
                                  "experiments[" + std::to_string(j) + "].name");
    return file;
}

ExperimentFile load_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path, "$");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_file(buf.str());
}

std::string serialize_experiment_file(const ExperimentFile& file) {
    json j;
    j["experiments"] = json::array();
    for (const Experiment& e : file.experiments) j["experiments"].push_back(experiment_to_json(e));
    return j.dump(2) + "\n";
}

std::vector<RunOutcome> run_experiments(const ExperimentFile& file, const std::string& output_dir,
                                        int workers, const uint64_t* seed_override) {
    std::filesystem::create_directories(output_dir);
    std::vector<RunOutcome> outcomes;
    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["experiments"] = nlohmann::json::array();

    for (const Experiment& exp : file.experiments) {
        Experiment e = exp;
        if (seed_override) e.seed = *seed_override;
        const auto start = std::chrono::steady_clock::now();
        const sim::ExperimentSpec spec = e.to_spec();
        const sim::SweepResult sweep = sim::run_sweep(spec, workers);

        std::vector<results::Row> rows;
        if (sweep.ml) {
            auto m = results::rows_from_curve(e.name, spec, *sweep.ml);
            rows.insert(rows.end(), m.begin(), m.end());
        }
        if (sweep.lc) {
            auto l = results::rows_from_curve(e.name, spec, *sweep.lc);
            rows.insert(rows.end(), l.begin(), l.end());
        }
        const std::string csv_path = (std::filesystem::path(output_dir) / e.output).string();
        results::write_file_atomic(csv_path, results::render_csv(rows));
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        RunOutcome oc;
        oc.name = e.name;
        oc.csv_path = csv_path;
        oc.spec_digest = spec.digest();
        oc.rows = rows.size();
        oc.wall_seconds = wall;
        outcomes.push_back(oc);

        char digest[24];
        std::snprintf(digest, sizeof digest, "%016llx",
                      static_cast<unsigned long long>(oc.spec_digest));
        manifest["experiments"].push_back({{"name", oc.name},
                                           {"csv", e.output},
                                           {"spec_digest", digest},
                                           {"rows", oc.rows},
                                           {"wall_seconds", oc.wall_seconds}});
    }
    results::write_file_atomic((std::filesystem::path(output_dir) / "manifest.json").string(),
                               manifest.dump(2) + "\n");
    return outcomes;
}

} // namespace csim::experiment
