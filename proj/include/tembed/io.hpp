#pragma once

// File formats: the JSON graph and t-embedding formats of the CLI contract,
// CSV tables, SVG drawings, and the run manifest.

#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tembed/embedding.hpp"
#include "tembed/tgraph.hpp"

namespace tembed {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Graph JSON: {"black": [...], "white": [...], "edges": [{"b","w","x"}],
//              "rotation": {vertex: [edge ids]}, "v_out": face-key | null}

inline json graph_to_json(const DimerGraph& g, std::optional<std::string> v_out_key) {
    json j;
    j["black"] = json::array();
    j["white"] = json::array();
    for (int v = 0; v < g.num_vertices(); ++v)
        (g.is_black(v) ? j["black"] : j["white"]).push_back(v);
    j["edges"] = json::array();
    for (const auto& e : g.edges) j["edges"].push_back({{"b", e.b}, {"w", e.w}, {"x", e.x}});
    json rot = json::object();
    for (int v = 0; v < g.num_vertices(); ++v) rot[std::to_string(v)] = g.rotation[v];
    j["rotation"] = std::move(rot);
    if (v_out_key) j["v_out"] = *v_out_key;
    else j["v_out"] = nullptr;
    return j;
}

inline std::pair<DimerGraph, std::optional<std::string>> graph_from_json(const json& j) {
    DimerGraph g;
    // internal index = rank of the external id, so dense 0..V-1 ids map to
    // themselves and round trips keep the labelling
    std::map<long, int> index;
    std::map<long, uint8_t> color_of;
    for (const auto& v : j.at("black")) color_of[v.get<long>()] = 0;
    for (const auto& v : j.at("white")) {
        if (!color_of.emplace(v.get<long>(), 1).second)
            throw std::invalid_argument("duplicate vertex id in graph file");
    }
    for (const auto& [id, col] : color_of) {
        index[id] = static_cast<int>(g.color.size());
        g.color.push_back(col);
        g.label.push_back(std::to_string(id));
    }
    for (const auto& e : j.at("edges")) {
        DimerGraph::Edge ed;
        ed.b = index.at(e.at("b").get<long>());
        ed.w = index.at(e.at("w").get<long>());
        ed.x = e.value("x", 1.0);
        g.edges.push_back(ed);
    }
    g.rotation.resize(g.num_vertices());
    for (const auto& [key, arr] : j.at("rotation").items())
        g.rotation[index.at(std::stol(key))] = arr.get<std::vector<int>>();
    std::optional<std::string> v_out;
    if (j.contains("v_out") && !j.at("v_out").is_null()) v_out = j.at("v_out").get<std::string>();
    return {std::move(g), std::move(v_out)};
}

// ---------------------------------------------------------------------------
// T-embedding JSON: the graph format plus "positions": {dual-vertex id: [x,y]}
// and an explicit "cells" block so subdivided boundaries reload losslessly.

inline json tembedding_to_json(const TEmbedding& t) {
    json j = graph_to_json(t.g, std::nullopt);
    json pos = json::object();
    for (int v = 0; v < t.num_vertices(); ++v)
        pos[t.dual.vertex_key[v]] = {t.pos[v].real(), t.pos[v].imag()};
    j["positions"] = std::move(pos);
    json cells = json::array();
    for (int u = 0; u < t.num_cells(); ++u) {
        json c;
        c["color"] = t.dual.cell_color[u] == 0 ? "black" : "white";
        json cyc = json::array();
        for (int v : t.dual.cell[u]) cyc.push_back(t.dual.vertex_key[v]);
        c["cycle"] = std::move(cyc);
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    return j;
}

inline TEmbedding tembedding_from_json(const json& j) {
    if (j.contains("cells")) {
        std::map<std::string, int> vid;
        std::vector<cplx> pos;
        for (const auto& [key, xy] : j.at("positions").items()) {
            vid[key] = static_cast<int>(pos.size());
            pos.push_back(cplx(xy.at(0).get<double>(), xy.at(1).get<double>()));
        }
        std::vector<std::vector<int>> cells;
        std::vector<uint8_t> colors;
        for (const auto& c : j.at("cells")) {
            std::vector<int> cyc;
            for (const auto& key : c.at("cycle")) cyc.push_back(vid.at(key.get<std::string>()));
            cells.push_back(std::move(cyc));
            colors.push_back(c.at("color").get<std::string>() == "black" ? 0 : 1);
        }
        return embedding_from_cells(std::move(pos), cells, colors);
    }
    auto [g, v_out] = graph_from_json(j);
    std::map<std::string, cplx> positions;
    for (const auto& [key, xy] : j.at("positions").items())
        positions[key] = cplx(xy.at(0).get<double>(), xy.at(1).get<double>());
    return embedding_from_graph(g, v_out, positions);
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << j.dump(1) << "\n";
}

inline json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    json j;
    is >> j;
    return j;
}

// ---------------------------------------------------------------------------
// CSV

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : os_(path) {
        if (!os_) throw std::runtime_error("cannot open " + path + " for writing");
        os_ << std::setprecision(17);
        for (size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
        os_ << "\n";
    }
    void row(const std::vector<double>& vals) {
        for (size_t i = 0; i < vals.size(); ++i) os_ << (i ? "," : "") << vals[i];
        os_ << "\n";
    }
    void row_mixed(const std::vector<std::string>& vals) {
        for (size_t i = 0; i < vals.size(); ++i) os_ << (i ? "," : "") << vals[i];
        os_ << "\n";
    }

  private:
    std::ofstream os_;
};

// ---------------------------------------------------------------------------
// SVG rendering

class SvgCanvas {
  public:
    SvgCanvas(double min_x, double min_y, double max_x, double max_y, int px = 900)
        : min_x_(min_x), min_y_(min_y), scale_(px / std::max(max_x - min_x, max_y - min_y)),
          w_(static_cast<int>((max_x - min_x) * scale_) + 20),
          h_(static_cast<int>((max_y - min_y) * scale_) + 20) {}

    void polygon(const std::vector<cplx>& pts, const std::string& fill,
                 const std::string& stroke = "#333", double width = 0.5) {
        body_ << "<polygon points=\"";
        for (cplx z : pts) body_ << sx(z) << "," << sy(z) << " ";
        body_ << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width
              << "\"/>\n";
    }
    void line(cplx a, cplx b, const std::string& stroke, double width = 1.0) {
        body_ << "<line x1=\"" << sx(a) << "\" y1=\"" << sy(a) << "\" x2=\"" << sx(b) << "\" y2=\""
              << sy(b) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\"/>\n";
    }
    void circle(cplx c, double r_px, const std::string& fill) {
        body_ << "<circle cx=\"" << sx(c) << "\" cy=\"" << sy(c) << "\" r=\"" << r_px
              << "\" fill=\"" << fill << "\"/>\n";
    }
    void text(cplx at, const std::string& s, int size = 12) {
        body_ << "<text x=\"" << sx(at) << "\" y=\"" << sy(at) << "\" font-size=\"" << size
              << "\" font-family=\"sans-serif\">" << s << "</text>\n";
    }
    void save(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open " + path + " for writing");
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
           << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n<rect width=\"100%\" height=\"100%\""
           << " fill=\"white\"/>\n"
           << body_.str() << "</svg>\n";
    }

  private:
    double sx(cplx z) const { return 10 + (z.real() - min_x_) * scale_; }
    double sy(cplx z) const { return h_ - 10 - (z.imag() - min_y_) * scale_; }
    double min_x_, min_y_, scale_;
    int w_, h_;
    std::ostringstream body_;
};

inline void render_tembedding_svg(const TEmbedding& t, const std::string& path) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (cplx z : t.pos) {
        lo_x = std::min(lo_x, z.real());
        hi_x = std::max(hi_x, z.real());
        lo_y = std::min(lo_y, z.imag());
        hi_y = std::max(hi_y, z.imag());
    }
    SvgCanvas svg(lo_x, lo_y, hi_x, hi_y);
    for (int u = 0; u < t.num_cells(); ++u)
        svg.polygon(t.cell_polygon(u), t.black_cell(u) ? "#666" : "#eee");
    svg.save(path);
}

/// Per-face heat map of the origami gradient: the rotation angle arg(eta^2)
/// colors each face (the gradient has unit modulus everywhere).
inline void render_origami_heatmap_svg(const TEmbedding& t, const OrigamiField& eta,
                                       const std::string& path) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (cplx z : t.pos) {
        lo_x = std::min(lo_x, z.real());
        hi_x = std::max(hi_x, z.real());
        lo_y = std::min(lo_y, z.imag());
        hi_y = std::max(hi_y, z.imag());
    }
    SvgCanvas svg(lo_x, lo_y, hi_x, hi_y);
    for (int u = 0; u < t.num_cells(); ++u) {
        double hue = (std::arg(eta.eta_sq[u]) + kPi) / (2 * kPi) * 360.0;
        std::ostringstream color;
        color << "hsl(" << static_cast<int>(hue) << "," << (t.black_cell(u) ? 70 : 45) << "%,"
              << (t.black_cell(u) ? 45 : 70) << "%)";
        svg.polygon(t.cell_polygon(u), color.str());
    }
    svg.save(path);
}

inline void render_tgraph_svg(const TGraph& tg, const std::string& path) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (cplx z : tg.node_pos) {
        lo_x = std::min(lo_x, z.real());
        hi_x = std::max(hi_x, z.real());
        lo_y = std::min(lo_y, z.imag());
        hi_y = std::max(hi_y, z.imag());
    }
    SvgCanvas svg(lo_x, lo_y, hi_x, hi_y);
    for (const auto& [cell, fs] : tg.split->faces)
        for (const auto& sub : fs.subs) {
            std::array<cplx, 3> x{tg.image[sub.v[0]], tg.image[sub.v[1]], tg.image[sub.v[2]]};
            int a = 0, b = 1;
            double best = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j)
                    if (std::abs(x[j] - x[i]) > best) {
                        best = std::abs(x[j] - x[i]);
                        a = i;
                        b = j;
                    }
            if (best > 0) svg.line(x[a], x[b], "#0066aa", 1.2);
        }
    for (const auto& dg : tg.degenerates) svg.circle(tg.node_pos[dg.node], 3.0, "#cc3333");
    svg.save(path);
}

/// Simple scatter/line chart in log-log or linear axes.
inline void render_xy_svg(const std::vector<std::pair<double, double>>& pts,
                          const std::vector<std::pair<double, double>>& overlay,
                          const std::string& x_label, const std::string& y_label,
                          const std::string& path) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (auto& [x, y] : pts) {
        lo_x = std::min(lo_x, x);
        hi_x = std::max(hi_x, x);
        lo_y = std::min(lo_y, y);
        hi_y = std::max(hi_y, y);
    }
    for (auto& [x, y] : overlay) {
        lo_y = std::min(lo_y, y);
        hi_y = std::max(hi_y, y);
    }
    if (hi_x <= lo_x) hi_x = lo_x + 1;
    if (hi_y <= lo_y) hi_y = lo_y + 1;
    SvgCanvas svg(lo_x, lo_y, hi_x, hi_y, 600);
    for (size_t i = 0; i + 1 < overlay.size(); ++i)
        svg.line(cplx(overlay[i].first, overlay[i].second),
                 cplx(overlay[i + 1].first, overlay[i + 1].second), "#999", 1.0);
    for (auto& [x, y] : pts) svg.circle(cplx(x, y), 3.0, "#0066aa");
    svg.text(cplx(lo_x, lo_y), x_label + " vs " + y_label);
    svg.save(path);
}

// ---------------------------------------------------------------------------
// Manifest

inline uint64_t fnv1a_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return 0;
    uint64_t h = 1469598103934665603ULL;
    char c;
    while (is.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

struct Manifest {
    json j;
    Manifest() {
        j["artifacts"] = json::array();
        j["inputs"] = json::array();
    }
    void input(const std::string& path) {
        j["inputs"].push_back({{"path", path}, {"fnv1a", fnv1a_file(path)}});
    }
    void artifact(const std::string& path, const std::string& producer) {
        j["artifacts"].push_back(
            {{"path", path}, {"producer", producer}, {"fnv1a", fnv1a_file(path)}});
    }
    void set(const std::string& key, const json& v) { j[key] = v; }
    void save(const std::string& path) {
        // hash artifacts afresh so re-runs can be compared byte for byte
        for (auto& a : j["artifacts"]) a["fnv1a"] = fnv1a_file(a["path"].get<std::string>());
        write_json(path, j);
    }
};

}  // namespace tembed
