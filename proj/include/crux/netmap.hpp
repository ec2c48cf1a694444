#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crux {

enum class MapFormat { csv, json };

MapFormat parse_map_format(const std::string& name);

// Symmetric nonnegative round-trip latency matrix over opaque node ids.
//
// Asymmetric inputs are symmetrized with max() (conservative for latency
// bounds) and the diagonal is forced to zero, so a constructed map always
// satisfies dist(u,u) == 0, dist(u,v) == dist(v,u) and dist(u,v) > 0 for
// u != v.
class NetworkMap {
public:
    NetworkMap() = default;

    // dist is row-major n*n; symmetrization and diagonal zeroing happen here.
    // Throws std::invalid_argument on duplicate ids, non-square data,
    // negative or non-finite entries, or a zero off-diagonal distance.
    NetworkMap(std::vector<std::string> ids, std::vector<double> dist);

    int size() const { return n_; }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id(int u) const { return ids_[static_cast<std::size_t>(u)]; }
    int index_of(const std::string& node_id) const;  // -1 when unknown

    double operator()(int u, int v) const {
        return dist_[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) +
                     static_cast<std::size_t>(v)];
    }

    // Node indices ordered by id string: the canonical order for member
    // lists, consistent hashing and serialized output.
    const std::vector<int>& canonical_order() const { return canon_; }
    bool id_less(int a, int b) const {
        return ids_[static_cast<std::size_t>(a)] < ids_[static_cast<std::size_t>(b)];
    }

    bool same_contents(const NetworkMap& other) const;

private:
    std::vector<std::string> ids_;
    std::vector<double> dist_;
    std::vector<int> canon_;
    int n_ = 0;
};

struct ValidationReport {
    bool symmetric = true;
    bool zero_diagonal = true;
    long triangle_violations = 0;
    // min over violating triples of (d(u,w)+d(w,v))/d(u,v); present iff
    // triangle_violations > 0, and then < 1.
    std::optional<double> worst_violation_ratio;
    double diameter_ms = 0.0;
    double radius_spread = 1.0;
};

// CSV: first row = comma-separated node ids; row i = node id followed by n
// latency values in ms. JSON: {"nodes": [...], "dist_ms": [[...]]}.
NetworkMap load_map(std::istream& in, MapFormat format);
NetworkMap load_map_file(const std::string& path, MapFormat format);
void save_map(const NetworkMap& map, std::ostream& out, MapFormat format);

// Exhaustive triangle-inequality scan over all (u,v,w) triples. Violations
// are reported, never fatal.
ValidationReport validate(const NetworkMap& map, double r_min_ms = 1.0);

double diameter(const NetworkMap& map);  // all nodes
double diameter(const NetworkMap& map, std::span<const int> subset);

// R = r_max / r_min where r_max is the smallest power-of-two multiple of
// r_min covering the diameter. Always an exact power of two, so a landmark
// has at most log2(R)+1 rings.
double radius_spread(const NetworkMap& map, double r_min_ms);

enum class SynthModel { euclidean, clustered_euclidean, uniform };

SynthModel parse_synth_model(const std::string& name);

// Deterministic synthetic maps for experiments:
//   euclidean           points in a square, distance = Euclidean in ms
//   clustered-euclidean tight sites inside regions spread far apart; gives a
//                       wide WAN-like latency spread (sub-ms to ~450 ms)
//   uniform             i.i.d. entries metrized by shortest-path closure
NetworkMap synth_map(std::uint64_t seed, int n, SynthModel model);

}  // namespace crux
