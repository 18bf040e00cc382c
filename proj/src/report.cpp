#include "quench/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace quench {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const CheckRecord& c) {
    return ordered_json{{"name", c.name},
                        {"pass", c.pass},
                        {"value", c.value},
                        {"limit", c.limit},
                        {"detail", c.detail}};
}

ordered_json to_json(const FitRecord& f) {
    return ordered_json{{"quantity", f.quantity},
                        {"center_node", f.center_node},
                        {"center_level", f.center_level},
                        {"radii", f.radii},
                        {"values", f.values},
                        {"slope", f.slope},
                        {"intercept", f.intercept},
                        {"r2", f.r2},
                        {"reference", f.reference},
                        {"pass", f.pass}};
}

ordered_json to_json(const EpsReport& r) {
    ordered_json j{{"eps", r.eps},
                   {"dt", r.dt},
                   {"steps", r.steps},
                   {"stored_levels", r.stored_levels},
                   {"min_value", r.min_value},
                   {"max_value", r.max_value},
                   {"max_residual", r.max_residual},
                   {"pass", r.pass}};
    j["fits"] = ordered_json::array();
    for (const auto& f : r.fits) j["fits"].push_back(to_json(f));
    j["checks"] = ordered_json::array();
    for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
    return j;
}

}  // namespace

std::string report_to_json(const RunReport& report) {
    ordered_json j;
    j["experiment"] = report.config.name;
    j["pass"] = report.pass;
    j["config_ini"] = report.config.to_ini();
    j["runs"] = ordered_json::array();
    for (const auto& r : report.runs) j["runs"].push_back(to_json(r));
    j["cross_checks"] = ordered_json::array();
    for (const auto& c : report.cross_checks) j["cross_checks"].push_back(to_json(c));
    return j.dump(2) + "\n";
}

void write_report_files(const RunReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / "report.json", std::ios::binary);
        out << report_to_json(report);
    }
    {
        ordered_json meta;
        const auto now = std::chrono::system_clock::now();
        meta["written_unix_seconds"] =
            std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
        meta["wall_seconds"] = ordered_json::array();
        for (const auto& r : report.runs) meta["wall_seconds"].push_back(r.wall_seconds);
        std::ofstream out(fs::path(dir) / "metadata.json", std::ios::binary);
        out << meta.dump(2) << "\n";
    }
}

void write_fields_csv(const std::string& path, const GridFunction& u, int csv_levels) {
    const auto& g = u.grid();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << (g.dim == 1 ? "level,t,i,x,u\n" : "level,t,i,j,x,y,u\n");

    const int exported = std::min(csv_levels, g.levels);
    char buf[64];
    const auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (int e = 0; e < exported; ++e) {
        const int k = exported == 1 ? g.levels - 1
                                    : int(std::lround(double(e) * (g.levels - 1) /
                                                      double(exported - 1)));
        const double t = g.time(k);
        for (int node = 0; node < g.num_nodes(); ++node) {
            const auto ij = g.unflatten(node);
            const auto x = g.point(node);
            out << k << ',' << fmt(t) << ',' << ij[0];
            if (g.dim == 2) out << ',' << ij[1];
            out << ',' << fmt(x[0]);
            if (g.dim == 2) out << ',' << fmt(x[1]);
            out << ',' << fmt(u.at(node, k)) << '\n';
        }
    }
}

void write_loglog_svg(const std::string& path, const FitRecord& fit, const std::string& title) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);

    const int width = 480, height = 360;
    const int ml = 60, mr = 20, mt = 36, mb = 48;
    std::vector<double> lx, ly;
    for (size_t i = 0; i < fit.radii.size(); ++i) {
        if (fit.values[i] > 0.0 && fit.radii[i] > 0.0) {
            lx.push_back(std::log10(fit.radii[i]));
            ly.push_back(std::log10(fit.values[i]));
        }
    }
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' viewBox='0 0 " << width << " " << height << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << width / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
        << "</text>\n";
    if (lx.size() >= 2) {
        const auto [xmin_it, xmax_it] = std::minmax_element(lx.begin(), lx.end());
        const auto [ymin_it, ymax_it] = std::minmax_element(ly.begin(), ly.end());
        const double pad = 0.15;
        const double xmin = *xmin_it - pad, xmax = *xmax_it + pad;
        const double ymin = *ymin_it - pad, ymax = *ymax_it + pad;
        const auto sx = [&](double v) {
            return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr);
        };
        const auto sy = [&](double v) {
            return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb);
        };
        out << "<rect x='" << ml << "' y='" << mt << "' width='" << width - ml - mr
            << "' height='" << height - mt - mb << "' fill='none' stroke='black'/>\n";
        out << "<clipPath id='plot'><rect x='" << ml << "' y='" << mt << "' width='"
            << width - ml - mr << "' height='" << height - mt - mb << "'/></clipPath>\n";
        out << "<g clip-path='url(#plot)'>\n";
        // fitted line
        const double f0 = fit.intercept / std::log(10.0) + fit.slope * xmin;
        const double f1 = fit.intercept / std::log(10.0) + fit.slope * xmax;
        out << "<line x1='" << sx(xmin) << "' y1='" << sy(f0) << "' x2='" << sx(xmax) << "' y2='"
            << sy(f1) << "' stroke='steelblue' stroke-width='1.5'/>\n";
        // reference slope through the data centroid
        const double cx = std::accumulate(lx.begin(), lx.end(), 0.0) / double(lx.size());
        const double cy = std::accumulate(ly.begin(), ly.end(), 0.0) / double(ly.size());
        const double r0 = cy + fit.reference * (xmin - cx);
        const double r1 = cy + fit.reference * (xmax - cx);
        out << "<line x1='" << sx(xmin) << "' y1='" << sy(r0) << "' x2='" << sx(xmax) << "' y2='"
            << sy(r1) << "' stroke='gray' stroke-dasharray='6,4' stroke-width='1'/>\n";
        out << "</g>\n";
        for (size_t i = 0; i < lx.size(); ++i) {
            out << "<circle cx='" << sx(lx[i]) << "' cy='" << sy(ly[i])
                << "' r='3.5' fill='firebrick'/>\n";
        }
        std::ostringstream legend;
        legend << "slope " << std::setprecision(4) << fit.slope << ", reference "
               << fit.reference << ", r2 " << std::setprecision(4) << fit.r2;
        out << "<text x='" << ml + 8 << "' y='" << mt + 16 << "' font-size='12'>" << legend.str()
            << "</text>\n";
        out << "<text x='" << width / 2 << "' y='" << height - 12
            << "' text-anchor='middle' font-size='12'>log10 radius</text>\n";
        out << "<text x='16' y='" << height / 2
            << "' font-size='12' transform='rotate(-90 16 " << height / 2
            << ")'>log10 value</text>\n";
    } else {
        out << "<text x='" << width / 2 << "' y='" << height / 2
            << "' text-anchor='middle' font-size='12'>not enough positive data</text>\n";
    }
    out << "</svg>\n";
}

int aggregate_reports(const std::string& dir, std::ostream& out) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("report: not a directory: " + dir);
    }
    std::vector<fs::path> found;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "report.json") {
            found.push_back(entry.path());
        }
    }
    std::sort(found.begin(), found.end());
    if (found.empty()) {
        throw std::runtime_error("report: no report.json found under " + dir);
    }
    int failures = 0;
    out << "experiment                        pass  checks\n";
    for (const auto& path : found) {
        std::ifstream in(path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw std::runtime_error("report: malformed json in " + path.string() + ": " +
                                     e.what());
        }
        const bool pass = j.value("pass", false);
        int total = 0, ok = 0;
        for (const auto& run : j.value("runs", nlohmann::json::array())) {
            for (const auto& c : run.value("checks", nlohmann::json::array())) {
                ++total;
                if (c.value("pass", false)) ++ok;
            }
        }
        for (const auto& c : j.value("cross_checks", nlohmann::json::array())) {
            ++total;
            if (c.value("pass", false)) ++ok;
        }
        if (!pass) ++failures;
        std::ostringstream name;
        name << std::left << std::setw(32) << j.value("experiment", path.string());
        out << name.str() << "  " << (pass ? "yes " : "NO  ") << ok << "/" << total << "\n";
    }
    out << (failures == 0 ? "all pass" : std::to_string(failures) + " failing") << " ("
        << found.size() << " report" << (found.size() == 1 ? "" : "s") << ")\n";
    return failures;
}

}  // namespace quench
