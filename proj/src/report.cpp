#include "vrsjam/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace vrsjam::report {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string format_confusion(const ml::Evaluation& eval) {
    std::ostringstream s;
    char line[128];
    std::snprintf(line, sizeof line, "%-16s %14s %14s %14s\n", "predicted\\actual", "Interference", "SmartAttack",
                  "ConstantAttack");
    s << line;
    for (int p = 0; p < kNumClasses; ++p) {
        const auto& row = eval.matrix.counts[static_cast<std::size_t>(p)];
        std::snprintf(line, sizeof line, "%-16s %14ld %14ld %14ld\n",
                      std::string(to_string(static_cast<ScenarioKind>(p))).c_str(), row[0], row[1], row[2]);
        s << line;
    }
    s << "accuracy: " << fmt("%.2f", 100.0 * eval.accuracy) << "%\n";
    return s.str();
}

Collected collect_results(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw std::runtime_error("no results directory " + dir.string());
    std::map<std::string, dataset::ResultSummary> by_name;
    std::map<std::string, int> count;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() != ".result") continue;
        auto r = dataset::read_result(e.path());
        auto [it, fresh] = by_name.try_emplace(r.name, r);
        if (!fresh) it->second.accuracy += r.accuracy;
        ++count[r.name];
    }
    if (by_name.empty()) throw std::runtime_error("no .result files in " + dir.string());
    // several seeds of one case: report the mean
    for (auto& [name, r] : by_name) r.accuracy /= count[name];

    Collected c;
    for (const auto* list : {&dataset::table_cases(), &dataset::high_speed_cases()}) {
        for (const auto& ec : *list) {
            if (auto it = by_name.find(ec.name); it != by_name.end()) {
                c.results.push_back(it->second);
                by_name.erase(it);
            } else if (list == &dataset::table_cases()) {
                c.missing.push_back(ec.name);
            }
        }
    }
    for (auto& [name, r] : by_name) c.results.push_back(r);
    return c;
}

void write_summary_csv(const std::vector<dataset::ResultSummary>& results, std::ostream& out) {
    out << kSummaryHeader << '\n';
    for (const auto& r : results) {
        out << r.name << ',' << dataset::to_string(r.classifier) << ',' << (r.use_vrs ? 1 : 0) << ','
            << fmt("%g", r.train_speed) << ',' << fmt("%g", r.test_speed) << ',' << fmt("%.4f", r.accuracy) << '\n';
    }
}

void write_svg_chart(const std::vector<dataset::ResultSummary>& results, std::ostream& out) {
    const int bar = 36;
    const int gap = 14;
    const int left = 60;
    const int top = 30;
    const int plot_h = 300;
    const int bottom = 130;
    const int n = static_cast<int>(results.size());
    const int width = left + n * (bar + gap) + gap + 20;
    const int height = top + plot_h + bottom;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">Classification accuracy per case (%)</text>\n";
    for (int pct = 0; pct <= 100; pct += 20) {
        const double y = top + plot_h - plot_h * pct / 100.0;
        out << "<line x1=\"" << left << "\" x2=\"" << width - 10 << "\" y1=\"" << y << "\" y2=\"" << y
            << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << pct << "</text>\n";
    }
    for (int i = 0; i < n; ++i) {
        const auto& r = results[static_cast<std::size_t>(i)];
        const double acc = std::clamp(r.accuracy, 0.0, 1.0);
        const double h = plot_h * acc;
        const int x = left + gap + i * (bar + gap);
        const double y = top + plot_h - h;
        const char* color = r.use_vrs ? "#2b6cb0" : "#a0aec0";
        out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar << "\" height=\"" << h << "\" fill=\""
            << color << "\"><title>" << xml_escape(r.name) << "</title></rect>\n";
        out << "<text x=\"" << x + bar / 2 << "\" y=\"" << y - 4 << "\" text-anchor=\"middle\">"
            << fmt("%.1f", 100.0 * acc) << "</text>\n";
        const int lx = x + bar / 2;
        const int ly = top + plot_h + 10;
        out << "<text x=\"" << lx << "\" y=\"" << ly << "\" transform=\"rotate(60 " << lx << ' ' << ly
            << ")\">" << xml_escape(r.name) << "</text>\n";
    }
    out << "<line x1=\"" << left << "\" x2=\"" << left << "\" y1=\"" << top << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    out << "</svg>\n";
}

}  // namespace vrsjam::report
