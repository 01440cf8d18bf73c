#include "gflab/config.hpp"

#include <fstream>
#include <sstream>

#include "gflab/errors.hpp"
#include "json.hpp"

namespace gflab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& member(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing field");
    return *it;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double number_field(const json& j, const std::string& path, const std::string& key,
                    double fallback) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    return number_at(*it, path + "." + key);
}

int int_field(const json& j, const std::string& path, const std::string& key, int fallback) {
    const double v = number_field(j, path, key, fallback);
    return static_cast<int>(v);
}

std::string string_field(const json& j, const std::string& path, const std::string& key,
                         const std::string& fallback) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_string()) fail(path + "." + key, "expected a string");
    return it->get<std::string>();
}

DistributionAtom::FunctionId function_id(const std::string& name, const std::string& path) {
    if (name == "sin") return DistributionAtom::FunctionId::Sin;
    if (name == "cos") return DistributionAtom::FunctionId::Cos;
    if (name == "hat") return DistributionAtom::FunctionId::Hat;
    if (name == "zero") return DistributionAtom::FunctionId::Zero;
    fail(path, "unknown function id '" + name + "'");
}

DistributionSpec parse_distribution(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected a distribution object");
    const std::string id = string_field(j, path, "id", "");
    if (id.empty()) fail(path + ".id", "missing field");
    const double x0 = number_field(j, path, "x0", 0.0);
    const double coef = number_field(j, path, "coefficient", 1.0);
    if (id == "zero") return DistributionSpec::zero();
    if (id == "delta") return DistributionSpec::delta(x0, coef);
    if (id == "delta_squared") return DistributionSpec::delta_squared(x0, coef);
    if (id == "delta_derivative")
        return DistributionSpec::delta_derivative(x0, int_field(j, path, "order", 1), coef);
    if (id == "heaviside") return DistributionSpec::heaviside(x0, coef);
    if (id == "function")
        return DistributionSpec::function(
            function_id(string_field(j, path, "function", ""), path + ".function"), coef);
    if (id == "sampled_l1") {
        const auto& vals = member(j, path, "values");
        if (!vals.is_array() || vals.size() < 2)
            fail(path + ".values", "expected an array of at least two samples");
        std::vector<double> v;
        for (std::size_t k = 0; k < vals.size(); ++k)
            v.push_back(number_at(vals[k], path + ".values[" + std::to_string(k) + "]"));
        const double spacing = number_field(j, path, "spacing", 0.0);
        if (!(spacing > 0.0)) fail(path + ".spacing", "expected a positive spacing");
        return DistributionSpec::sampled_l1(GridFunction1D(x0, spacing, std::move(v)), coef);
    }
    if (id == "combination") {
        const auto& terms = member(j, path, "terms");
        if (!terms.is_array()) fail(path + ".terms", "expected an array");
        DistributionSpec sum = DistributionSpec::zero();
        for (std::size_t k = 0; k < terms.size(); ++k)
            sum = sum.plus(
                parse_distribution(terms[k], path + ".terms[" + std::to_string(k) + "]"));
        return sum;
    }
    fail(path + ".id", "unknown distribution id '" + id + "'");
}

NonlinearitySpec parse_nonlinearity(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected a nonlinearity object");
    const std::string id = string_field(j, path, "id", "");
    if (id.empty()) fail(path + ".id", "missing field");
    const double par = number_field(j, path, "parameter", 1.0);
    try {
        return NonlinearitySpec::from_name(id, par);
    } catch (const ConfigError& e) {
        fail(path + ".id", e.what());
    }
}

LabSettings parse_lab(const json& j, const std::string& path, const LabSettings& base) {
    LabSettings lab = base;
    if (j.contains("region")) {
        const auto& r = j["region"];
        const double kappa = number_field(r, path + ".region", "kappa", lab.region.kappa);
        const double T = number_field(r, path + ".region", "T", lab.region.T);
        const std::string orient =
            string_field(r, path + ".region", "orientation", "upper");
        if (orient != "upper" && orient != "lower")
            fail(path + ".region.orientation", "expected 'upper' or 'lower'");
        try {
            lab.region = Trapezoid(kappa, T,
                                   orient == "upper" ? Trapezoid::Orientation::Upper
                                                     : Trapezoid::Orientation::Lower);
        } catch (const Error& e) {
            fail(path + ".region", e.what());
        }
    }
    if (j.contains("ladder")) {
        const auto& l = j["ladder"];
        try {
            lab.ladder = make_ladder(number_field(l, path + ".ladder", "eps0", 0.25),
                                     number_field(l, path + ".ladder", "ratio", 0.5),
                                     int_field(l, path + ".ladder", "count", 6));
        } catch (const Error& e) {
            fail(path + ".ladder", e.what());
        }
    }
    if (j.contains("grid"))
        lab.points_per_eps = int_field(j["grid"], path + ".grid", "points_per_eps",
                                       lab.points_per_eps);
    if (j.contains("mollifier")) {
        const auto& m = j["mollifier"];
        lab.moment_order = int_field(m, path + ".mollifier", "moment_order", lab.moment_order);
        lab.mollifier_radius =
            number_field(m, path + ".mollifier", "radius", lab.mollifier_radius);
        lab.samples_per_unit =
            int_field(m, path + ".mollifier", "samples_per_unit", lab.samples_per_unit);
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        lab.picard.tol = number_field(s, path + ".solver", "tol", lab.picard.tol);
        lab.picard.max_iter = int_field(s, path + ".solver", "max_iter", lab.picard.max_iter);
        if (!(lab.picard.tol > 0.0)) fail(path + ".solver.tol", "tolerance must be positive");
    }
    if (j.contains("classification")) {
        const auto& c = j["classification"];
        lab.cell_side = number_field(c, path + ".classification", "cell_side", lab.cell_side);
        lab.max_order = int_field(c, path + ".classification", "max_order", lab.max_order);
        lab.q_max = number_field(c, path + ".classification", "q_max", lab.q_max);
        if (!(lab.cell_side > 0.0))
            fail(path + ".classification.cell_side", "cell side must be positive");
    }
    if (lab.points_per_eps < 2) fail(path + ".grid.points_per_eps", "must be >= 2");
    return lab;
}

json lab_to_json(const LabSettings& lab) {
    json j;
    j["region"] = {{"kappa", lab.region.kappa},
                   {"T", lab.region.T},
                   {"orientation",
                    lab.region.orientation == Trapezoid::Orientation::Upper ? "upper"
                                                                            : "lower"}};
    j["ladder"] = {{"eps0", lab.ladder.front()},
                   {"count", lab.ladder.size()},
                   {"values", lab.ladder.values()}};
    j["grid"] = {{"points_per_eps", lab.points_per_eps}};
    j["mollifier"] = {{"moment_order", lab.moment_order},
                      {"radius", lab.mollifier_radius},
                      {"samples_per_unit", lab.samples_per_unit}};
    j["solver"] = {{"tol", lab.picard.tol}, {"max_iter", lab.picard.max_iter}};
    j["classification"] = {{"cell_side", lab.cell_side},
                           {"max_order", lab.max_order},
                           {"q_max", lab.q_max}};
    j["parallelism"] = lab.parallelism;
    j["seed"] = lab.seed;
    return j;
}

json distribution_to_json(const DistributionSpec& d) {
    json terms = json::array();
    for (const auto& a : d.atoms()) {
        json t;
        t["coefficient"] = a.coefficient;
        switch (a.kind) {
            case DistributionAtom::Kind::Delta:
                t["id"] = "delta";
                t["x0"] = a.position;
                break;
            case DistributionAtom::Kind::DeltaDerivative:
                t["id"] = "delta_derivative";
                t["x0"] = a.position;
                t["order"] = a.derivative_order;
                break;
            case DistributionAtom::Kind::DeltaSquared:
                t["id"] = "delta_squared";
                t["x0"] = a.position;
                break;
            case DistributionAtom::Kind::Heaviside:
                t["id"] = "heaviside";
                t["x0"] = a.position;
                break;
            case DistributionAtom::Kind::SampledL1:
                t["id"] = "sampled_l1";
                t["x0"] = a.density.x0();
                t["spacing"] = a.density.spacing();
                t["values"] = a.density.values();
                break;
            case DistributionAtom::Kind::Function: {
                t["id"] = "function";
                const char* name = "zero";
                switch (a.function) {
                    case DistributionAtom::FunctionId::Sin: name = "sin"; break;
                    case DistributionAtom::FunctionId::Cos: name = "cos"; break;
                    case DistributionAtom::FunctionId::Hat: name = "hat"; break;
                    case DistributionAtom::FunctionId::Zero: name = "zero"; break;
                }
                t["function"] = name;
                t["x0"] = a.position;
                break;
            }
        }
        terms.push_back(t);
    }
    if (terms.empty()) return json{{"id", "zero"}};
    if (terms.size() == 1) return terms[0];
    return json{{"id", "combination"}, {"terms", terms}};
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");

    static const std::vector<std::string> known = {
        "region", "ladder", "grid",  "mollifier",  "solver", "classification",
        "output_dir", "plots", "parallelism", "seed", "scenarios"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const auto& k : known) ok = ok || k == key;
        if (!ok) throw ConfigError(key + ": unknown top-level field");
    }

    RunConfig cfg;
    cfg.lab = parse_lab(j, "config", LabSettings{});
    cfg.lab.parallelism = int_field(j, "config", "parallelism", 1);
    if (cfg.lab.parallelism < 1) throw ConfigError("parallelism: must be >= 1");
    cfg.lab.seed = static_cast<unsigned>(int_field(j, "config", "seed", 0));
    cfg.output_dir = string_field(j, "config", "output_dir", cfg.output_dir);
    if (j.contains("plots")) {
        if (!j["plots"].is_boolean()) throw ConfigError("plots: expected a boolean");
        cfg.plots = j["plots"].get<bool>();
    }

    if (j.contains("scenarios")) {
        const auto& arr = j["scenarios"];
        if (!arr.is_array() || arr.empty())
            throw ConfigError("scenarios: expected a non-empty array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string path = "scenarios[" + std::to_string(k) + "]";
            const auto& sj = arr[k];
            const std::string id_name = string_field(sj, path, "id", "");
            if (id_name.empty()) fail(path + ".id", "missing field");
            ScenarioId id;
            try {
                id = scenario_from_name(id_name);
            } catch (const ConfigError& e) {
                fail(path + ".id", e.what());
            }
            ScenarioSpec spec = ScenarioSpec::defaults(id, parse_lab(sj, path, cfg.lab));
            spec.lab.parallelism = cfg.lab.parallelism;
            spec.lab.seed = cfg.lab.seed;
            if (sj.contains("a")) spec.a = parse_distribution(sj["a"], path + ".a");
            if (sj.contains("b")) spec.b = parse_distribution(sj["b"], path + ".b");
            if (sj.contains("f")) spec.f = parse_nonlinearity(sj["f"], path + ".f");
            if (sj.contains("tolerances")) {
                const auto& t = sj["tolerances"];
                if (!t.is_object()) fail(path + ".tolerances", "expected an object");
                for (const auto& [key, value] : t.items()) {
                    if (!value.is_number())
                        fail(path + ".tolerances." + key, "expected a number");
                    if (value.get<double>() <= 0.0 && key != "perturb_target_b")
                        fail(path + ".tolerances." + key, "tolerances must be positive");
                    spec.tolerances[key] = value.get<double>();
                }
            }
            spec.validate();
            cfg.scenarios.push_back(std::move(spec));
        }
    } else {
        for (ScenarioId id : default_suite())
            cfg.scenarios.push_back(ScenarioSpec::defaults(id, cfg.lab));
    }

    // canonical echo of the effective configuration
    json echo;
    echo["lab"] = lab_to_json(cfg.lab);
    echo["output_dir"] = cfg.output_dir;
    echo["plots"] = cfg.plots;
    json scen = json::array();
    for (const auto& s : cfg.scenarios) {
        json e;
        e["id"] = to_string(s.id);
        e["a"] = distribution_to_json(s.a);
        e["b"] = distribution_to_json(s.b);
        e["f"] = {{"id", s.f.name()}, {"parameter", s.f.parameter()}};
        e["tolerances"] = s.tolerances;
        e["lab"] = lab_to_json(s.lab);
        scen.push_back(e);
    }
    echo["scenarios"] = scen;
    cfg.echo = echo.dump();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace gflab
