#include "fio/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace fio {

namespace {
json vec_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}
json mi_json(const MultiIndex& m) {
    json a = json::array();
    for (int i = 0; i < m.n; ++i) a.push_back(m[i]);
    return a;
}
}  // namespace

json to_json(const FitResult& f) { return json{{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}}; }

json to_json(const DecayReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"j", row.j}, {"v_count", row.v_count}, {"value", row.value},
                        {"normalized_value", row.normalized_value}});
    json out{{"name", r.name}, {"rows", rows}};
    out["fit"] = r.fit ? to_json(*r.fit) : json(nullptr);
    out["target"] = r.target;
    out["tolerance"] = r.tolerance;
    out["verdict"] = r.pass ? "pass" : "fail";
    if (!r.note.empty()) out["note"] = r.note;
    return out;
}

json to_json(const BoundednessReport& r) {
    json rows = json::array();
    for (std::size_t i = 0; i < r.ratios.size(); ++i) rows.push_back({{"input", r.labels[i]}, {"ratio", r.ratios[i]}});
    json out{{"name", r.name}, {"inputs", r.inputs}, {"rows", rows},   {"max_ratio", r.max_ratio},
             {"stability", r.stability}, {"threshold", r.threshold}};
    if (r.exponent != 0.0) out["exponent"] = r.exponent;
    out["verdict"] = r.pass ? "pass" : "fail";
    return out;
}

json to_json(const HRemainderReport& r) {
    json fits = json::array();
    for (const auto& f : r.fits) {
        json j = to_json(f.report);
        j["alpha"] = mi_json(f.alpha);
        j["identically_zero"] = f.identically_zero;
        fits.push_back(j);
    }
    return json{{"name", "hcheck"}, {"h_axis_error", r.h_axis_error}, {"fits", fits}, {"verdict", r.pass ? "pass" : "fail"}};
}

json to_json(const SeparationReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"j", row.j}, {"direction", row.direction}, {"samples", row.samples}, {"min_ratio", row.min_ratio}});
    return json{{"name", "separation"}, {"rows", rows},          {"min_ratio", r.min_ratio},
                {"floor", r.floor},     {"verdict", r.pass ? "pass" : "fail"}};
}

json to_json(const ClassReport& r) {
    json cells = json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"alpha", mi_json(c.alpha)},
                         {"beta", mi_json(c.beta)},
                         {"constant", c.constant},
                         {"slope", c.slope},
                         {"worst_annulus", c.worst_annulus},
                         {"worst_x", vec_json(c.worst_x)},
                         {"worst_xi", vec_json(c.worst_xi)},
                         {"ok", c.ok}});
    json out{{"class", r.class_name}, {"m", r.m}, {"derivative_source", r.derivative_source}, {"cells", cells}};
    if (r.first_violation) {
        const auto& c = r.cells[*r.first_violation];
        out["violation"] = {{"alpha", mi_json(c.alpha)}, {"beta", mi_json(c.beta)}, {"annulus", c.worst_annulus}};
    }
    out["verdict"] = r.pass ? "pass" : "fail";
    return out;
}

json to_json(const PhaseReport& r) {
    json out{{"max_homogeneity_error", r.max_homogeneity_error},
             {"max_euler_error", r.max_euler_error},
             {"min_abs_det", r.min_abs_det},
             {"homogeneity_ok", r.homogeneity_ok},
             {"euler_ok", r.euler_ok},
             {"nondegenerate_ok", r.nondegenerate_ok}};
    if (!r.failed_hypothesis.empty()) out["failed_hypothesis"] = r.failed_hypothesis;
    out["verdict"] = r.pass ? "pass" : "fail";
    return out;
}

json to_json(const NetValidation& v) {
    json out{{"separation_ok", v.separation_ok}, {"axes_ok", v.axes_ok},   {"components_ok", v.components_ok},
             {"covering_ok", v.covering_ok},     {"min_separation", v.min_separation},
             {"uncovered", v.uncovered},         {"samples", v.samples}};
    if (!v.first_violation.empty()) out["first_violation"] = v.first_violation;
    out["verdict"] = v.pass ? "pass" : "fail";
    return out;
}

std::string decay_csv(const DecayReport& r) {
    std::ostringstream os;
    os << std::setprecision(17) << "j,v_count,value,normalized_value\n";
    for (const auto& row : r.rows) os << row.j << ',' << row.v_count << ',' << row.value << ',' << row.normalized_value << '\n';
    return os.str();
}

std::string decay_svg(const DecayReport& r) {
    const double W = 480, H = 320, pad = 50;
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : r.rows)
        if (row.normalized_value > 0.0) pts.emplace_back(row.j, std::log2(row.normalized_value));
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (pts.empty()) {
        os << "<text x=\"" << pad << "\" y=\"" << H / 2 << "\">no positive values</text>\n</svg>\n";
        return os.str();
    }
    double x0 = pts.front().first, x1 = pts.back().first;
    double y0 = pts.front().second, y1 = y0;
    for (auto [x, y] : pts) {
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (r.fit) {
        y0 = std::min({y0, r.fit->intercept + r.fit->slope * x0, r.fit->intercept + r.fit->slope * x1});
        y1 = std::max({y1, r.fit->intercept + r.fit->slope * x0, r.fit->intercept + r.fit->slope * x1});
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 - y0 < 1e-9) y1 = y0 + 1;
    auto sx = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
    auto sy = [&](double y) { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); };
    os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\">j</text>\n";
    os << "<text x=\"8\" y=\"" << pad - 14 << "\">log2 value</text>\n";
    for (auto [x, y] : pts) {
        os << "<text x=\"" << sx(x) - 4 << "\" y=\"" << H - pad + 16 << "\" font-size=\"11\">" << static_cast<int>(x)
           << "</text>\n";
        os << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
    for (auto [x, y] : pts) os << sx(x) << ',' << sy(y) << ' ';
    os << "\"/>\n";
    if (r.fit) {
        os << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy(r.fit->intercept + r.fit->slope * x0) << "\" x2=\"" << sx(x1)
           << "\" y2=\"" << sy(r.fit->intercept + r.fit->slope * x1) << "\" stroke=\"firebrick\" stroke-dasharray=\"4\"/>\n";
        os << "<text x=\"" << W - pad - 170 << "\" y=\"" << pad << "\">slope " << std::setprecision(3) << r.fit->slope
           << " (target " << r.target << ")</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << contents;
    if (!os) throw std::runtime_error("write failed for " + path);
}

json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return json::parse(is, nullptr, true, true);
}

}  // namespace fio
