#include "gflab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gflab/errors.hpp"
#include "json.hpp"

namespace gflab {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_hex(const std::string& bytes) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string digest_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return digest_hex(ss.str());
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string csv_text(const std::vector<EvidenceRow>& rows) {
    std::string out =
        "scenario,epsilon,region_or_cell,alpha,norm_kind,norm_value,fit_slope,fit_r2,verdict\n";
    for (const auto& r : rows) {
        out += csv_escape(r.scenario);
        out += ',';
        if (r.epsilon) out += num(*r.epsilon);
        out += ',';
        out += csv_escape(r.region_or_cell);
        out += ',';
        out += csv_escape(r.alpha);
        out += ',';
        out += csv_escape(r.norm_kind);
        out += ',';
        out += num(r.norm_value);
        out += ',';
        if (r.fit_slope) out += num(*r.fit_slope);
        out += ',';
        if (r.fit_r2) out += num(*r.fit_r2);
        out += ',';
        out += csv_escape(r.verdict);
        out += '\n';
    }
    return out;
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    fs::rename(tmp, path);
}

std::string scenario_svg(const ScenarioResult& result) {
    // collect positive (eps, value) series keyed by (region, kind)
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    for (const auto& r : result.rows)
        if (r.epsilon && r.norm_value > 0.0)
            series[r.region_or_cell + " / " + r.norm_kind].push_back(
                {*r.epsilon, r.norm_value});
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto& [k, pts] : series)
        for (auto& [e, v] : pts) {
            xmin = std::min(xmin, std::log10(1.0 / e));
            xmax = std::max(xmax, std::log10(1.0 / e));
            ymin = std::min(ymin, std::log10(v));
            ymax = std::max(ymax, std::log10(v));
        }
    const double W = 640, H = 420, L = 60, Bm = 40;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"10\" y=\"18\" font-size=\"14\">" << to_string(result.id)
        << " (log10 norm vs log10 1/eps)</text>\n";
    if (!series.empty() && xmax > xmin) {
        if (ymax <= ymin) ymax = ymin + 1.0;
        const auto X = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - 20); };
        const auto Y = [&](double ly) {
            return H - Bm - (ly - ymin) / (ymax - ymin) * (H - Bm - 40);
        };
        const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
        int ci = 0;
        double label_y = 34;
        for (const auto& [key, pts] : series) {
            if (pts.size() < 2) continue;
            const char* col = colors[ci++ % 8];
            svg << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
            for (const auto& [e, v] : pts)
                svg << X(std::log10(1.0 / e)) << "," << Y(std::log10(v)) << " ";
            svg << "\"/>\n<text x=\"" << L + 4 << "\" y=\"" << label_y
                << "\" font-size=\"10\" fill=\"" << col << "\">" << key << "</text>\n";
            label_y += 12;
        }
        svg << "<line x1=\"" << L << "\" y1=\"" << H - Bm << "\" x2=\"" << W - 20
            << "\" y2=\"" << H - Bm << "\" stroke=\"black\"/>\n<line x1=\"" << L
            << "\" y1=\"40\" x2=\"" << L << "\" y2=\"" << H - Bm << "\" stroke=\"black\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

namespace {

json manifest_json(const ReportBundle& bundle, const std::string& config_echo) {
    json m;
    m["format"] = "gflab-bundle-v1";
    m["all_pass"] = bundle.all_pass;
    m["config"] = json::parse(config_echo.empty() ? "{}" : config_echo);
    json scenarios = json::array();
    for (const auto& s : bundle.scenarios) {
        json e;
        e["id"] = s.id;
        e["verdict"] = s.verdict;
        if (!s.error.empty()) e["error"] = s.error;
        e["runtime_ms"] = s.runtime_ms;
        json ko = json::object();
        for (const auto& [k, v] : s.key_orders) ko[k] = v;
        e["key_orders"] = ko;
        e["notes"] = s.notes;
        json files = json::array();
        for (const auto& f : s.files) files.push_back({{"name", f.name}, {"digest", f.digest}});
        e["files"] = files;
        scenarios.push_back(e);
    }
    m["scenarios"] = scenarios;
    return m;
}

} // namespace

ReportBundle write_bundle(const fs::path& dir, const std::vector<ScenarioResult>& results,
                          const std::vector<std::string>& errors,
                          const std::string& config_echo_json, bool plots) {
    ReportBundle bundle;
    bundle.directory = dir;
    fs::create_directories(dir);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        ManifestScenario m;
        m.id = to_string(r.id);
        m.runtime_ms = r.runtime_ms;
        m.notes = r.notes;
        if (!errors[i].empty()) {
            m.verdict = "error";
            m.error = errors[i];
            bundle.all_pass = false;
        } else {
            m.verdict = r.pass ? "pass" : "fail";
            if (!r.pass) bundle.all_pass = false;
            for (const auto& row : r.rows)
                if (row.fit_slope && m.key_orders.size() < 6) {
                    const std::string key = row.region_or_cell.empty()
                                                ? row.norm_kind
                                                : row.region_or_cell + "/" + row.norm_kind;
                    m.key_orders.push_back({key, *row.fit_slope});
                }
            const std::string csv = csv_text(r.rows);
            const std::string csv_name = m.id + ".csv";
            write_file_atomic(dir / csv_name, csv);
            m.files.push_back({csv_name, digest_hex(csv)});
            if (plots) {
                const std::string svg = scenario_svg(r);
                const std::string svg_name = m.id + ".svg";
                write_file_atomic(dir / svg_name, svg);
                m.files.push_back({svg_name, digest_hex(svg)});
            }
        }
        bundle.scenarios.push_back(std::move(m));
    }
    const json m = manifest_json(bundle, config_echo_json);
    write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
    return bundle;
}

LoadedManifest load_bundle(const fs::path& dir) {
    const fs::path mpath = dir / "manifest.json";
    std::ifstream in(mpath);
    if (!in) throw ConfigError("no manifest.json in " + dir.string());
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw ConfigError("corrupt manifest: " + std::string(e.what()));
    }
    LoadedManifest out;
    if (!m.contains("scenarios") || !m["scenarios"].is_array())
        throw ConfigError("corrupt manifest: missing scenarios array");
    out.all_pass = m.value("all_pass", false);
    if (m.contains("config")) out.config_echo = m["config"].dump();
    for (const auto& e : m["scenarios"]) {
        ManifestScenario s;
        s.id = e.value("id", "?");
        s.verdict = e.value("verdict", "?");
        s.error = e.value("error", "");
        s.runtime_ms = e.value("runtime_ms", 0.0);
        if (e.contains("key_orders"))
            for (const auto& [k, v] : e["key_orders"].items())
                s.key_orders.push_back({k, v.get<double>()});
        if (e.contains("notes"))
            for (const auto& n : e["notes"]) s.notes.push_back(n.get<std::string>());
        if (e.contains("files"))
            for (const auto& f : e["files"]) {
                BundleEntry be{f.value("name", ""), f.value("digest", "")};
                const std::string actual = digest_file(dir / be.name);
                if (actual != be.digest)
                    throw ConfigError("digest mismatch for " + be.name + ": manifest " +
                                      be.digest + ", file " + actual);
                s.files.push_back(be);
            }
        out.scenarios.push_back(std::move(s));
    }
    return out;
}

} // namespace gflab
