#pragma once

// Diverging heatmaps: red for positive, blue for negative contributions,
// white at zero, range symmetric at +-max|score|. NaN cells are empty.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chardecomp/error.hpp"

namespace chardecomp::report {

struct HeatmapSpec {
    std::string title;
    std::vector<std::string> row_labels;
    std::vector<std::string> column_labels;
    std::vector<std::vector<double>> scores;  // rows x columns
    std::set<std::size_t> bold_columns;        // ground-truth columns
    std::set<std::size_t> bold_rows;           // ground-truth rows (bigram grids)
};

inline void validate(const HeatmapSpec& h) {
    if (h.scores.empty() || h.column_labels.empty()) throw std::invalid_argument("heatmap: empty matrix");
    if (h.scores.size() != h.row_labels.size()) throw std::invalid_argument("heatmap: row label count mismatch");
    for (const auto& row : h.scores) {
        if (row.size() != h.column_labels.size()) throw std::invalid_argument("heatmap: column label count mismatch");
    }
    for (std::size_t c : h.bold_columns) {
        if (c >= h.column_labels.size()) throw std::invalid_argument("heatmap: bold column out of range");
    }
    for (std::size_t r : h.bold_rows) {
        if (r >= h.row_labels.size()) throw std::invalid_argument("heatmap: bold row out of range");
    }
}

/// max |score| over the finite cells.
inline double color_range(const HeatmapSpec& h) {
    double r = 0.0;
    for (const auto& row : h.scores) {
        for (double v : row) {
            if (std::isfinite(v)) r = std::max(r, std::abs(v));
        }
    }
    return r;
}

/// "#rrggbb" for `v` on the symmetric ramp of half-width `range`.
inline std::string ramp_color(double v, double range) {
    if (!std::isfinite(v)) return "#e0e0e0";
    double t = range > 0.0 ? std::clamp(v / range, -1.0, 1.0) : 0.0;
    const auto fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
    int r = 255, g = fade, b = fade;
    if (t < 0.0) {
        r = fade;
        b = 255;
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

/// Short colour-bar label, e.g. 2.3 or -0.051.
inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2g", v);
    std::string s = buf;
    return s == "-0" ? "0" : s;
}

/// Shortest round-trip text of a number, shared by the text and JSON-lines outputs.
inline std::string number_text(double v) {
    if (!std::isfinite(v)) return "null";
    return nlohmann::json(v).dump();
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string render_svg(const HeatmapSpec& h) {
    validate(h);
    constexpr int cell = 36, pad = 10, bar_w = 16;
    std::size_t longest = 0;
    for (const auto& l : h.row_labels) longest = std::max(longest, l.size());
    const int left = pad + static_cast<int>(longest) * 8 + 8;
    const int top = (h.title.empty() ? pad : pad + 20) + 22;
    const int cols = static_cast<int>(h.column_labels.size());
    const int rows = static_cast<int>(h.row_labels.size());
    const int grid_w = cols * cell, grid_h = rows * cell;
    const int bar_x = left + grid_w + 20;
    const int bar_h = std::max(grid_h, 3 * cell);
    const int width = bar_x + bar_w + 60;
    const int height = top + bar_h + pad;
    const double range = color_range(h);

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"14\">\n";
    o << "<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"0\" x2=\"0\" y2=\"1\">"
      << "<stop offset=\"0\" stop-color=\"#ff0000\"/><stop offset=\"0.5\" stop-color=\"#ffffff\"/>"
      << "<stop offset=\"1\" stop-color=\"#0000ff\"/></linearGradient></defs>\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!h.title.empty()) o << "<text x=\"" << pad << "\" y=\"" << pad + 14 << "\">" << xml_escape(h.title) << "</text>\n";
    for (int c = 0; c < cols; ++c) {
        const bool bold = h.bold_columns.count(static_cast<std::size_t>(c)) != 0;
        o << "<text x=\"" << left + c * cell + cell / 2 << "\" y=\"" << top - 8 << "\" text-anchor=\"middle\""
          << (bold ? " font-weight=\"bold\"" : "") << ">" << xml_escape(h.column_labels[static_cast<std::size_t>(c)])
          << "</text>\n";
    }
    for (int r = 0; r < rows; ++r) {
        const bool bold = h.bold_rows.count(static_cast<std::size_t>(r)) != 0;
        o << "<text x=\"" << left - 8 << "\" y=\"" << top + r * cell + cell / 2 + 5 << "\" text-anchor=\"end\""
          << (bold ? " font-weight=\"bold\"" : "") << ">" << xml_escape(h.row_labels[static_cast<std::size_t>(r)])
          << "</text>\n";
        for (int c = 0; c < cols; ++c) {
            const double v = h.scores[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            o << "<rect x=\"" << left + c * cell << "\" y=\"" << top + r * cell << "\" width=\"" << cell
              << "\" height=\"" << cell << "\" fill=\"" << ramp_color(v, range) << "\" stroke=\"#999999\"/>\n";
        }
    }
    o << "<rect x=\"" << bar_x << "\" y=\"" << top << "\" width=\"" << bar_w << "\" height=\"" << bar_h
      << "\" fill=\"url(#ramp)\" stroke=\"#999999\"/>\n";
    const double ticks[3] = {range, 0.0, -range};
    for (int i = 0; i < 3; ++i) {
        o << "<text x=\"" << bar_x + bar_w + 6 << "\" y=\"" << top + i * bar_h / 2 + (i == 0 ? 12 : i == 1 ? 5 : -2)
          << "\">" << tick_label(ticks[i]) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// Tab-separated matrix with a header row of column labels.
inline std::string render_text(const HeatmapSpec& h) {
    validate(h);
    std::ostringstream o;
    if (!h.title.empty()) o << "# " << h.title << "\n";
    o << "#range\t" << number_text(color_range(h)) << "\n";
    for (const auto& c : h.column_labels) o << '\t' << c;
    o << '\n';
    for (std::size_t r = 0; r < h.scores.size(); ++r) {
        o << h.row_labels[r];
        for (double v : h.scores[r]) o << '\t' << number_text(v);
        o << '\n';
    }
    return o.str();
}

/// One JSON object per row.
inline std::string render_jsonl(const HeatmapSpec& h) {
    validate(h);
    std::ostringstream o;
    for (std::size_t r = 0; r < h.scores.size(); ++r) {
        nlohmann::ordered_json j;
        j["title"] = h.title;
        j["row"] = h.row_labels[r];
        j["columns"] = h.column_labels;
        nlohmann::ordered_json values = nlohmann::ordered_json::array();
        for (double v : h.scores[r]) values.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json());
        j["scores"] = values;
        j["bold_columns"] = std::vector<std::size_t>(h.bold_columns.begin(), h.bold_columns.end());
        j["bold_row"] = h.bold_rows.count(r) != 0;
        j["range"] = color_range(h);
        o << j.dump() << '\n';
    }
    return o.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

/// Strips a trailing ".svg" so sidecars share the stem.
inline std::string output_stem(const std::string& path) {
    if (path.size() > 4 && path.compare(path.size() - 4, 4, ".svg") == 0) return path.substr(0, path.size() - 4);
    return path;
}

/// Writes <stem>.svg, <stem>.txt and <stem>.jsonl; returns the paths written.
inline std::vector<std::string> emit_heatmap(const HeatmapSpec& h, const std::string& path) {
    const std::string stem = output_stem(path);
    const std::vector<std::string> paths{stem + ".svg", stem + ".txt", stem + ".jsonl"};
    write_text_file(paths[0], render_svg(h));
    write_text_file(paths[1], render_text(h));
    write_text_file(paths[2], render_jsonl(h));
    return paths;
}

/// Square grid over positions for two-character sets: cell (i, j), i < j, holds
/// `upper` of {i, j}; cell (j, i) holds `lower` when given. Other cells are empty.
inline HeatmapSpec bigram_grid(std::string title, const std::vector<std::string>& labels,
                               const std::vector<std::vector<double>>& upper,
                               const std::optional<std::vector<std::vector<double>>>& lower) {
    HeatmapSpec h;
    h.title = std::move(title);
    h.row_labels = labels;
    h.column_labels = labels;
    const std::size_t n = labels.size();
    h.scores.assign(n, std::vector<double>(n, std::nan("")));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            h.scores[i][j] = upper.at(i).at(j);
            if (lower) h.scores[j][i] = lower->at(i).at(j);
        }
    }
    return h;
}

}  // namespace chardecomp::report
