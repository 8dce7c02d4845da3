#ifndef METARING_IO_HPP
#define METARING_IO_HPP

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "simulate.hpp"

namespace metaring {

using nlohmann::json;

inline json to_json(const StationaryPoint& p) {
    json j;
    j["coords"] = p.coords;
    j["triple"] = {p.triple.a0, p.triple.a1, p.triple.a2};
    j["family"] = family_name(p.family, p.k, p.morse_index);
    j["morse_index"] = p.morse_index;
    j["lambda"] = p.lambda;
    j["gamma"] = p.gamma;
    j["potential"] = p.potential;
    return j;
}

inline json to_json(const TransitionGraph& g) {
    json j;
    j["mode"] = g.quotient ? "orbit-quotient" : "full";
    j["nodes"] = json::array();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        json n = to_json(g.nodes[i]);
        n["id"] = i;
        if (g.quotient) n["orbit_size"] = g.node_orbit_size[i];
        j["nodes"].push_back(std::move(n));
    }
    j["saddles"] = json::array();
    for (std::size_t i = 0; i < g.saddles.size(); ++i) {
        json n = to_json(g.saddles[i]);
        n["id"] = i;
        if (g.quotient) n["orbit_size"] = g.saddle_orbit_size[i];
        j["saddles"].push_back(std::move(n));
    }
    j["edges"] = json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back({{"saddle", e.saddle}, {"lower", e.lower}, {"upper", e.upper}});
    return j;
}

inline std::string to_dot(const TransitionGraph& g) {
    std::ostringstream os;
    os << "graph transitions {\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        os << "  n" << i << " [label=\"" << family_name(g.nodes[i].family, g.nodes[i].k)
           << " #" << i << " V=" << g.nodes[i].potential << "\"];\n";
    }
    for (const auto& e : g.edges) {
        const auto& z = g.saddles[e.saddle];
        os << "  n" << e.lower << " -- n" << e.upper << " [label=\""
           << family_name(z.family, z.k, z.morse_index) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

inline json to_json(const HierarchyReport& r) {
    json j;
    j["blocks"] = json::array();
    for (const auto& b : r.blocks)
        j["blocks"].push_back({{"name", b.name}, {"escape_height", b.escape_height}});
    j["theta"] = r.theta;
    j["ok"] = r.ok;
    return j;
}

inline json to_json(const Move& m) {
    json j;
    j["site_i"] = m.site_i;
    j["site_j"] = m.site_j;
    j["type"] = m.height.transition_type;
    j["delta_p"] = m.height.delta_p;
    j["h0"] = m.height.h0;
    j["h1"] = m.height.h1;
    j["grouped"] = m.height.grouped;
    j["saddle_class"] = {m.height.saddle_class.i01, m.height.saddle_class.i02,
                         m.height.saddle_class.i12};
    return j;
}

inline std::string to_dot(const DisconnectivityTree& t) {
    std::ostringstream os;
    os << "graph disconnectivity {\n";
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        os << "  n" << i << " [label=\"" << t.nodes[i].name << " V=" << t.nodes[i].v << "\""
           << (t.nodes[i].children.empty() ? ", shape=box" : "") << "];\n";
        for (int c : t.nodes[i].children) os << "  n" << i << " -- n" << c << ";\n";
    }
    os << "}\n";
    return os.str();
}

inline json to_json(const RateEstimate& r) {
    json j;
    j["arrhenius"] = r.arrhenius;
    j["prefactor"] = r.prefactor;
    j["symmetry_factor"] = r.symmetry_factor;
    j["error_note"] = r.error_note;
    return j;
}

inline json to_json(const SpectralGapResult& r) {
    json j;
    j["gap"] = r.gap;
    j["exponent"] = r.exponent;
    j["exponent_h0"] = r.exponent_h0;
    j["exponent_first_order"] = r.exponent_first_order;
    j["prefactor_ratio"] = r.prefactor_ratio;
    j["prefactor_ratio_limit"] = r.prefactor_ratio_limit;
    j["rate"] = to_json(r.rate);
    return j;
}

/// CSV with header t,i1..iN.
inline std::string trajectory_csv(const std::vector<std::pair<double, Vec>>& rows, int n) {
    std::ostringstream os;
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",i" << i;
    os << "\n";
    os.precision(12);
    for (const auto& [t, x] : rows) {
        os << t;
        for (double v : x) os << "," << v;
        os << "\n";
    }
    return os.str();
}

/// CSV with header t,p,label.
inline std::string trace_csv(const std::vector<TraceEntry>& trace) {
    std::ostringstream os;
    os << "t,p,label\n";
    os.precision(12);
    for (const auto& e : trace) os << e.t << "," << e.p << "," << e.klass << "\n";
    return os.str();
}

/// CSV with header t_wait,site_i,site_j,type,delta_p.
inline std::string event_log_csv(const std::vector<TraceEntry>& trace) {
    std::ostringstream os;
    os << "t_wait,site_i,site_j,type,delta_p\n";
    os.precision(12);
    for (const auto& e : trace)
        os << e.t_wait << "," << e.site_i << "," << e.site_j << "," << e.type << ","
           << e.delta_p << "\n";
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_file: cannot open " + path);
    f << content;
    if (!f.good()) throw std::runtime_error("write_file: write failed for " + path);
}

}  // namespace metaring

#endif  // METARING_IO_HPP
