#include "relucert/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "relucert/errors.hpp"

namespace relucert {

namespace {

using nlohmann::json;

std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        auto hash = sv.find('#');
        if (hash != std::string_view::npos) sv = sv.substr(0, hash);
        bool blank = sv.find_first_not_of(" \t\r,;") == std::string_view::npos;
        if (blank) continue;
        std::vector<double> row;
        std::string cell;
        std::stringstream ss{std::string(sv)};
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            try {
                std::string trimmed = cell;
                trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
                trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
                if (trimmed == "inf" || trimmed == "+inf") {
                    row.push_back(std::numeric_limits<double>::infinity());
                    continue;
                }
                if (trimmed == "-inf") {
                    row.push_back(-std::numeric_limits<double>::infinity());
                    continue;
                }
                double v = std::stod(trimmed, &pos);
                if (pos != trimmed.size())
                    throw parse_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
                row.push_back(v);
            } catch (const parse_error&) {
                throw;
            } catch (...) {
                throw parse_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json value_to_json(double v) {
    if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
    return json(v);
}

json vector_to_json(const std::vector<double>& vals) {
    json arr = json::array();
    for (double v : vals) arr.push_back(value_to_json(v));
    return arr;
}

json domain_json(const DomainSpec& d) {
    json j;
    j["n"] = d.n;
    switch (d.kind) {
        case DomainKind::ball: j["variant"] = "ball"; j["r"] = d.r; break;
        case DomainKind::sphere: j["variant"] = "sphere"; break;
        case DomainKind::donut: j["variant"] = "donut"; j["r"] = d.r; j["s"] = d.s; break;
        case DomainKind::nonneg_ball: j["variant"] = "nonneg_ball"; j["r"] = d.r; break;
        case DomainKind::ball_complement: j["variant"] = "ball_complement"; j["s"] = d.s; break;
        case DomainKind::polytope_boundary: j["variant"] = "polytope_boundary"; break;
        case DomainKind::sample_cloud: {
            j["variant"] = "sample_cloud";
            json pts = json::array();
            for (std::size_t i = 0; i < d.cloud->count; ++i) {
                auto p = d.cloud->point(i);
                pts.push_back(std::vector<double>(p.begin(), p.end()));
            }
            j["points"] = pts;
            break;
        }
        case DomainKind::full_space: j["variant"] = "full_space"; break;
    }
    return j;
}

}  // namespace

Frame read_frame_csv(const std::string& path) {
    return Frame::from_rows(read_csv_rows(path));
}

Points read_points_csv(const std::string& path) {
    return Points::from_rows(read_csv_rows(path));
}

void write_points_csv(const std::string& path, const Points& points) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write file: " + path);
    for (std::size_t i = 0; i < points.count; ++i) {
        auto p = points.point(i);
        for (std::size_t j = 0; j < p.size(); ++j)
            out << (j ? "," : "") << format_value(p[j]);
        out << "\n";
    }
}

void write_frame_csv(const std::string& path, const Frame& frame) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write file: " + path);
    for (int i = 0; i < frame.m; ++i) {
        auto r = frame.row(i);
        for (int j = 0; j < frame.n; ++j) out << (j ? "," : "") << format_value(r[static_cast<std::size_t>(j)]);
        out << "\n";
    }
}

Bias read_bias_file(const std::string& path, int expected_m) {
    Bias bias;
    std::ifstream probe(path);
    if (!probe) throw parse_error("cannot open file: " + path);
    char first = 0;
    probe >> std::ws;
    probe.get(first);
    probe.close();
    if (first == '[') {
        std::ifstream in(path);
        json j = json::parse(in, nullptr, true, true);
        for (const auto& v : j) {
            if (v.is_string()) {
                std::string s = v.get<std::string>();
                if (s == "inf" || s == "+inf")
                    bias.push_back(std::numeric_limits<double>::infinity());
                else if (s == "-inf")
                    bias.push_back(-std::numeric_limits<double>::infinity());
                else
                    throw parse_error(path + ": bad bias entry '" + s + "'");
            } else {
                bias.push_back(v.get<double>());
            }
        }
    } else {
        for (const auto& row : read_csv_rows(path)) {
            if (row.size() != 1) throw parse_error(path + ": bias CSV must have one column");
            bias.push_back(row.front());
        }
    }
    if (expected_m >= 0 && static_cast<int>(bias.size()) != expected_m)
        throw parse_error(path + ": bias length " + std::to_string(bias.size()) +
                          " does not match frame rows " + std::to_string(expected_m));
    return bias;
}

void write_bias_csv(const std::string& path, const Bias& bias) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write file: " + path);
    for (double v : bias) out << format_value(v) << "\n";
}

DomainSpec domain_from_json(const std::string& json_text, const Frame* frame_for_boundary) {
    json j;
    try {
        j = json::parse(json_text, nullptr, true, true);
    } catch (const std::exception& e) {
        throw parse_error(std::string("domain JSON: ") + e.what());
    }
    std::string variant = j.value("variant", "");
    int n = j.value("n", 0);
    if (variant == "ball") return DomainSpec::ball(n, j.value("r", 1.0));
    if (variant == "sphere") return DomainSpec::sphere(n);
    if (variant == "donut") return DomainSpec::donut(n, j.value("r", 1.0), j.value("s", 0.0));
    if (variant == "nonneg_ball") return DomainSpec::nonneg_ball(n, j.value("r", 1.0));
    if (variant == "ball_complement") return DomainSpec::ball_complement(n, j.value("s", 1.0));
    if (variant == "full_space") return DomainSpec::full_space(n);
    if (variant == "polytope_boundary") {
        if (frame_for_boundary == nullptr)
            throw parse_error("polytope_boundary domain needs a frame (--frame)");
        Normalized unit = normalize(*frame_for_boundary,
                                    Bias(static_cast<std::size_t>(frame_for_boundary->m), 0.0));
        return DomainSpec::polytope_boundary(unit.frame);
    }
    if (variant == "sample_cloud") {
        if (j.contains("path")) return DomainSpec::sample_cloud(read_points_csv(j["path"]));
        if (j.contains("points")) {
            std::vector<std::vector<double>> rows;
            for (const auto& p : j["points"]) rows.push_back(p.get<std::vector<double>>());
            return DomainSpec::sample_cloud(Points::from_rows(rows));
        }
        throw parse_error("sample_cloud domain needs \"points\" or \"path\"");
    }
    throw parse_error("unknown domain variant '" + variant + "'");
}

DomainSpec parse_domain(const std::string& text, int n, const Frame* frame_for_boundary) {
    if (!text.empty() && text.front() == '{') return domain_from_json(text, frame_for_boundary);
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.empty()) throw parse_error("empty domain spec");
    const std::string& kind = parts.front();
    auto arg = [&](std::size_t i, double fallback) {
        return parts.size() > i ? std::stod(parts[i]) : fallback;
    };
    if (kind == "ball") return DomainSpec::ball(n, arg(1, 1.0));
    if (kind == "sphere") return DomainSpec::sphere(n);
    if (kind == "donut") return DomainSpec::donut(n, arg(1, 1.0), arg(2, 0.0));
    if (kind == "nonneg_ball") return DomainSpec::nonneg_ball(n, arg(1, 1.0));
    if (kind == "ball_complement" || kind == "complement")
        return DomainSpec::ball_complement(n, arg(1, 1.0));
    if (kind == "full_space" || kind == "gaussian") return DomainSpec::full_space(n);
    if (kind == "cloud") {
        if (parts.size() < 2) throw parse_error("cloud domain needs a CSV path: cloud:points.csv");
        return DomainSpec::sample_cloud(read_points_csv(parts[1]));
    }
    if (kind == "boundary") {
        if (frame_for_boundary == nullptr)
            throw parse_error("boundary domain needs a frame (--frame)");
        Normalized unit = normalize(*frame_for_boundary,
                                    Bias(static_cast<std::size_t>(frame_for_boundary->m), 0.0));
        return DomainSpec::polytope_boundary(unit.frame);
    }
    throw parse_error("unknown domain '" + text + "'");
}

std::string domain_to_json(const DomainSpec& domain) {
    return domain_json(domain).dump(2);
}

std::string bias_estimate_to_json(const BiasEstimate& estimate) {
    json j;
    j["schema"] = "relu-certify/1";
    j["type"] = "bias_estimate";
    j["method"] = method_name(estimate.method);
    j["values"] = vector_to_json(estimate.values);
    j["correction"] = estimate.correction;
    j["seed"] = estimate.seed;
    j["n_samples"] = estimate.n_samples;
    j["iterations"] = estimate.iterations;
    j["generator"] = kGeneratorId;
    if (estimate.domain) j["domain"] = domain_json(*estimate.domain);
    if (!estimate.free_indices.empty()) j["free_indices"] = estimate.free_indices;
    if (!estimate.flagged.empty()) j["flagged"] = estimate.flagged;
    if (estimate.frame_scale != 1.0) j["frame_scale"] = estimate.frame_scale;
    return j.dump(2);
}

std::string certificate_to_json(const Certificate& cert, const Frame& frame, const Bias& given) {
    json j;
    j["schema"] = "relu-certify/1";
    j["type"] = "certificate";
    j["verdict"] = verdict_name(cert.verdict);
    j["method"] = method_name(cert.method);
    j["margin"] = vector_to_json(cert.margin);
    j["correction"] = cert.correction;
    j["seed"] = cert.seed;
    j["n_samples"] = cert.n_samples;
    j["domain"] = cert.domain_label;
    j["generator"] = kGeneratorId;
    j["frame"] = {{"m", frame.m}, {"n", frame.n}};
    j["bias"] = vector_to_json(given);
    if (!cert.note.empty()) j["note"] = cert.note;
    if (cert.witnesses.count == 2) {
        auto a = cert.witnesses.point(0);
        auto b = cert.witnesses.point(1);
        j["witnesses"] = {std::vector<double>(a.begin(), a.end()),
                          std::vector<double>(b.begin(), b.end())};
    }
    return j.dump(2);
}

std::string facet_structure_to_json(const FacetStructure& fs) {
    json j;
    j["simplicial"] = fs.simplicial;
    json facets = json::array();
    for (const Facet& f : fs.facets) {
        json fj;
        fj["vertices"] = f.vertices;
        fj["normal"] = f.normal;
        fj["offset"] = f.offset;
        facets.push_back(fj);
    }
    j["facets"] = facets;
    return j.dump(2);
}

std::string stability_report_to_json(const StabilityReport& rep) {
    json j;
    j["schema"] = "relu-certify/1";
    j["type"] = "stability_report";
    j["a_alpha"] = rep.a_alpha;
    j["b_alpha"] = rep.b_alpha;
    j["samples"] = rep.samples;
    j["distinct_active_sets"] = rep.distinct_active_sets;
    j["worst_condition"] = rep.worst_condition;
    j["deficient"] = rep.deficient;
    if (!rep.deficient_witness.empty()) j["deficient_witness"] = rep.deficient_witness;
    if (rep.global_zero_bias_constant > 0.0)
        j["global_zero_bias_constant"] = rep.global_zero_bias_constant;
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write file: " + path);
    out << content;
    if (!content.empty() && content.back() != '\n') out << "\n";
}

}  // namespace relucert
