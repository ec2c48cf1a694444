#include "crux/netmap.hpp"

#include "crux/errors.hpp"
#include "crux/hash.hpp"
#include "crux/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace crux {

namespace {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_latency(const std::string& tok, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw parse_error("line " + std::to_string(line_no) + ": bad latency value '" + tok + "'");
    return v;
}

}  // namespace

MapFormat parse_map_format(const std::string& name) {
    if (name == "csv") return MapFormat::csv;
    if (name == "json") return MapFormat::json;
    throw parse_error("unknown map format '" + name + "' (expected csv or json)");
}

NetworkMap::NetworkMap(std::vector<std::string> ids, std::vector<double> dist)
    : ids_(std::move(ids)), dist_(std::move(dist)) {
    if (ids_.empty()) throw std::invalid_argument("map must have at least one node");
    n_ = static_cast<int>(ids_.size());
    const auto n = static_cast<std::size_t>(n_);
    if (dist_.size() != n * n) throw std::invalid_argument("distance matrix is not square");

    std::unordered_set<std::string> seen;
    for (const auto& id : ids_) {
        if (id.empty()) throw std::invalid_argument("empty node id");
        if (!seen.insert(id).second) throw std::invalid_argument("duplicate node id '" + id + "'");
    }

    for (double v : dist_) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite latency entry");
        if (v < 0.0) throw std::invalid_argument("negative latency entry");
    }

    for (std::size_t u = 0; u < n; ++u) {
        dist_[u * n + u] = 0.0;
        for (std::size_t v = u + 1; v < n; ++v) {
            double m = std::max(dist_[u * n + v], dist_[v * n + u]);
            if (m <= 0.0)
                throw std::invalid_argument("zero distance between distinct nodes '" + ids_[u] +
                                            "' and '" + ids_[v] + "'");
            dist_[u * n + v] = m;
            dist_[v * n + u] = m;
        }
    }

    canon_.resize(n);
    std::iota(canon_.begin(), canon_.end(), 0);
    std::sort(canon_.begin(), canon_.end(),
              [this](int a, int b) { return ids_[static_cast<std::size_t>(a)] < ids_[static_cast<std::size_t>(b)]; });
}

int NetworkMap::index_of(const std::string& node_id) const {
    for (int u = 0; u < n_; ++u)
        if (ids_[static_cast<std::size_t>(u)] == node_id) return u;
    return -1;
}

bool NetworkMap::same_contents(const NetworkMap& other) const {
    return ids_ == other.ids_ && dist_ == other.dist_;
}

namespace {

NetworkMap load_csv(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!t.empty()) lines.push_back(t);
    }
    if (lines.empty()) throw parse_error("empty CSV map");

    std::vector<std::string> ids = split_csv_line(lines[0]);
    const std::size_t n = ids.size();
    if (lines.size() != n + 1)
        throw parse_error("expected " + std::to_string(n) + " data rows, got " +
                          std::to_string(lines.size() - 1));

    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto toks = split_csv_line(lines[i + 1]);
        if (toks.size() != n + 1)
            throw parse_error("line " + std::to_string(i + 2) + ": expected " +
                              std::to_string(n + 1) + " fields, got " + std::to_string(toks.size()));
        if (toks[0] != ids[i])
            throw parse_error("line " + std::to_string(i + 2) + ": row id '" + toks[0] +
                              "' does not match header id '" + ids[i] + "'");
        for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = parse_latency(toks[j + 1], i + 2);
    }
    return NetworkMap(std::move(ids), std::move(dist));
}

NetworkMap load_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("bad JSON map: ") + e.what());
    }
    if (!j.is_object() || !j.contains("nodes") || !j.contains("dist_ms"))
        throw parse_error("JSON map must be an object with 'nodes' and 'dist_ms'");

    std::vector<std::string> ids;
    for (const auto& v : j.at("nodes")) {
        if (!v.is_string()) throw parse_error("'nodes' entries must be strings");
        ids.push_back(v.get<std::string>());
    }
    const std::size_t n = ids.size();
    const auto& rows = j.at("dist_ms");
    if (!rows.is_array() || rows.size() != n) throw parse_error("'dist_ms' must be an n x n array");
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n)
            throw parse_error("'dist_ms' must be an n x n array");
        for (std::size_t k = 0; k < n; ++k) {
            if (!rows[i][k].is_number()) throw parse_error("'dist_ms' entries must be numbers");
            dist[i * n + k] = rows[i][k].get<double>();
        }
    }
    return NetworkMap(std::move(ids), std::move(dist));
}

}  // namespace

NetworkMap load_map(std::istream& in, MapFormat format) {
    return format == MapFormat::csv ? load_csv(in) : load_json(in);
}

NetworkMap load_map_file(const std::string& path, MapFormat format) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open map file '" + path + "'");
    return load_map(in, format);
}

void save_map(const NetworkMap& map, std::ostream& out, MapFormat format) {
    const int n = map.size();
    if (format == MapFormat::csv) {
        for (int j = 0; j < n; ++j) {
            if (j) out << ',';
            out << map.id(j);
        }
        out << '\n';
        for (int i = 0; i < n; ++i) {
            out << map.id(i);
            for (int j = 0; j < n; ++j) out << ',' << format_double(map(i, j));
            out << '\n';
        }
    } else {
        nlohmann::json j;
        j["nodes"] = map.ids();
        auto rows = nlohmann::json::array();
        for (int i = 0; i < n; ++i) {
            auto row = nlohmann::json::array();
            for (int k = 0; k < n; ++k) row.push_back(map(i, k));
            rows.push_back(std::move(row));
        }
        j["dist_ms"] = std::move(rows);
        out << j.dump(1) << '\n';
    }
}

ValidationReport validate(const NetworkMap& map, double r_min_ms) {
    ValidationReport rep;
    const int n = map.size();

    for (int u = 0; u < n && rep.zero_diagonal; ++u)
        if (map(u, u) != 0.0) rep.zero_diagonal = false;
    for (int u = 0; u < n && rep.symmetric; ++u)
        for (int v = u + 1; v < n; ++v)
            if (map(u, v) != map(v, u)) {
                rep.symmetric = false;
                break;
            }

    // Tolerate FP dust so exact Euclidean metrics never get flagged.
    double worst = std::numeric_limits<double>::infinity();
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            const double duv = map(u, v);
            for (int w = 0; w < n; ++w) {
                if (w == u || w == v) continue;
                const double via = map(u, w) + map(w, v);
                if (duv > via * (1.0 + 1e-9) + 1e-12) {
                    ++rep.triangle_violations;
                    worst = std::min(worst, via / duv);
                }
            }
        }
    }
    if (rep.triangle_violations > 0) rep.worst_violation_ratio = worst;

    rep.diameter_ms = diameter(map);
    rep.radius_spread = radius_spread(map, r_min_ms);
    return rep;
}

double diameter(const NetworkMap& map) {
    double d = 0.0;
    for (int u = 0; u < map.size(); ++u)
        for (int v = u + 1; v < map.size(); ++v) d = std::max(d, map(u, v));
    return d;
}

double diameter(const NetworkMap& map, std::span<const int> subset) {
    if (subset.empty()) throw std::invalid_argument("diameter of empty node set");
    double d = 0.0;
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = i + 1; j < subset.size(); ++j)
            d = std::max(d, map(subset[i], subset[j]));
    return d;
}

double radius_spread(const NetworkMap& map, double r_min_ms) {
    if (!(r_min_ms > 0.0)) throw std::invalid_argument("r_min must be positive");
    const double diam = diameter(map);
    double r_max = r_min_ms;
    double spread = 1.0;
    while (r_max < diam) {
        r_max *= 2.0;
        spread *= 2.0;
    }
    return spread;
}

SynthModel parse_synth_model(const std::string& name) {
    if (name == "euclidean") return SynthModel::euclidean;
    if (name == "clustered-euclidean") return SynthModel::clustered_euclidean;
    if (name == "uniform") return SynthModel::uniform;
    throw parse_error("unknown synth model '" + name + "'");
}

namespace {

std::vector<std::string> make_ids(int n) {
    int width = 3;
    for (int v = n - 1; v >= 1000; v /= 10) ++width;
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::string num = std::to_string(i);
        ids.push_back("n" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num);
    }
    return ids;
}

NetworkMap from_points(std::vector<std::string> ids, const std::vector<double>& xs,
                       const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            const double dx = xs[u] - xs[v], dy = ys[u] - ys[v];
            double d = std::sqrt(dx * dx + dy * dy);
            d = std::max(d, 1e-6);  // coincident points would break metric positivity
            dist[u * n + v] = d;
            dist[v * n + u] = d;
        }
    }
    return NetworkMap(std::move(ids), std::move(dist));
}

NetworkMap synth_euclidean(std::mt19937_64& rng, int n) {
    constexpr double side = 400.0;
    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] = uniform01(rng) * side;
        ys[static_cast<std::size_t>(i)] = uniform01(rng) * side;
    }
    return from_points(make_ids(n), xs, ys);
}

// Three distance scales: ~0.3 ms inside a site, tens of ms between sites of
// one region, hundreds of ms between regions. Regions sit on a circle so
// inter-region distances stay within a factor ~2 of each other.
NetworkMap synth_clustered(std::mt19937_64& rng, int n) {
    constexpr int regions = 6;
    constexpr int sites_per_region = 3;
    constexpr double region_radius = 200.0;
    constexpr double site_box = 0.2;
    constexpr double site_offsets[sites_per_region] = {6.0, 18.0, 40.0};
    constexpr double two_pi = 6.283185307179586;

    const double angle0 = uniform01(rng) * two_pi;
    double cx[regions], cy[regions];
    for (int r = 0; r < regions; ++r) {
        const double ang = angle0 + two_pi * (r + 0.2 * (uniform01(rng) - 0.5)) / regions;
        const double rad = region_radius * (0.95 + 0.1 * uniform01(rng));
        cx[r] = rad * std::cos(ang);
        cy[r] = rad * std::sin(ang);
    }

    const int sites = regions * sites_per_region;
    std::vector<double> sx(sites), sy(sites);
    for (int r = 0; r < regions; ++r) {
        for (int s = 0; s < sites_per_region; ++s) {
            const double off = site_offsets[s] * (0.8 + 0.4 * uniform01(rng));
            const double ang = uniform01(rng) * two_pi;
            sx[static_cast<std::size_t>(r * sites_per_region + s)] = cx[r] + off * std::cos(ang);
            sy[static_cast<std::size_t>(r * sites_per_region + s)] = cy[r] + off * std::sin(ang);
        }
    }

    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // round-robin over regions first, then sites, to keep them even
        const int site = (i % regions) * sites_per_region + (i / regions) % sites_per_region;
        xs[static_cast<std::size_t>(i)] = sx[static_cast<std::size_t>(site)] + (uniform01(rng) - 0.5) * site_box;
        ys[static_cast<std::size_t>(i)] = sy[static_cast<std::size_t>(site)] + (uniform01(rng) - 0.5) * site_box;
    }
    return from_points(make_ids(n), xs, ys);
}

NetworkMap synth_uniform(std::mt19937_64& rng, int n) {
    const auto sz = static_cast<std::size_t>(n);
    std::vector<double> dist(sz * sz, 0.0);
    for (std::size_t u = 0; u < sz; ++u)
        for (std::size_t v = u + 1; v < sz; ++v) {
            double d = 1.0 + 99.0 * uniform01(rng);
            dist[u * sz + v] = d;
            dist[v * sz + u] = d;
        }
    // Floyd-Warshall closure restores the triangle inequality.
    for (std::size_t w = 0; w < sz; ++w)
        for (std::size_t u = 0; u < sz; ++u)
            for (std::size_t v = 0; v < sz; ++v)
                dist[u * sz + v] = std::min(dist[u * sz + v], dist[u * sz + w] + dist[w * sz + v]);
    for (std::size_t u = 0; u < sz; ++u) dist[u * sz + u] = 0.0;
    return NetworkMap(make_ids(n), std::move(dist));
}

}  // namespace

NetworkMap synth_map(std::uint64_t seed, int n, SynthModel model) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    std::mt19937_64 rng(splitmix64(seed));
    if (n == 1) return NetworkMap(make_ids(1), {0.0});
    switch (model) {
        case SynthModel::euclidean: return synth_euclidean(rng, n);
        case SynthModel::clustered_euclidean: return synth_clustered(rng, n);
        case SynthModel::uniform: return synth_uniform(rng, n);
    }
    throw std::invalid_argument("unknown synth model");
}

}  // namespace crux
