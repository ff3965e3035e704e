#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fio/symbols.hpp"
#include "fio/vec.hpp"

namespace fio {

/// A net direction xi_j^v: unit vector, level j, zero pattern J (bit i set iff i in J).
struct Direction {
    Vec vector;
    int level = 0;
    unsigned zero_mask = 0;

    bool in_zero_set(int i) const { return (zero_mask >> i) & 1U; }
    int zero_count() const;
};

inline double separation_radius(int j) { return std::pow(2.0, -0.5 * j - 2.0); }  // 2^{-j/2-2}
inline double component_floor(int j) { return std::pow(2.0, -0.5 * j); }        // 2^{-j/2}

/// Zero pattern J(xi) = {i : |xi_i| < 2^{-j/2}} of a unit vector.
unsigned zero_pattern(const Vec& u, int j);

/// Uniform hash over points of the unit sphere, for radius queries.
class SphereIndex {
public:
    SphereIndex() = default;
    SphereIndex(const std::vector<Vec>& points, double cell);

    /// Appends indices of points p with |p - q| <= radius.  radius must not exceed the cell size.
    void query(const Vec& q, double radius, std::vector<std::size_t>& out) const;
    void insert(const Vec& p, std::size_t index);
    double cell() const { return cell_; }

private:
    std::int64_t key(const std::array<long, kMaxDim>& c) const;
    std::array<long, kMaxDim> cell_of(const Vec& p) const;

    int dim_ = 0;
    double cell_ = 1.0;
    std::vector<Vec> points_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets_;
};

class DirectionNet {
public:
    DirectionNet(int level, int dim, std::vector<Direction> directions);

    int level() const { return level_; }
    int dim() const { return dim_; }
    std::size_t size() const { return dirs_.size(); }
    const Direction& operator[](std::size_t i) const { return dirs_[i]; }
    const std::vector<Direction>& directions() const { return dirs_; }

    /// Indices of directions within `radius` of u (radius <= 12 * 2^{-j/2-2}).
    void neighbors(const Vec& u, double radius, std::vector<std::size_t>& out) const;
    double max_query_radius() const { return index_.cell(); }

    /// Directions whose zero pattern equals mask.
    std::vector<std::size_t> stratum(unsigned mask) const;

private:
    int level_;
    int dim_;
    std::vector<Direction> dirs_;
    SphereIndex index_;
};

/// Builds Omega_j for n in {2,3}.  Deterministic.
DirectionNet build_direction_net(int j, int n);

struct NetValidation {
    bool pass = true;
    bool separation_ok = true;   // (i)
    bool axes_ok = true;         // (ii)
    bool components_ok = true;   // (iii)
    bool covering_ok = true;     // (iv)
    double min_separation = 0.0;
    std::size_t uncovered = 0;   // failing samples for (iv)
    std::size_t samples = 0;
    std::string first_violation;
};

/// Checks (i)-(iv); (iv) on `samples` uniform random sphere points.
NetValidation validate_direction_net(const DirectionNet& net, std::size_t samples, std::uint64_t seed = 1);

/// Orthogonal A with det 1 and A e_1 = d.vector; columns k in J are e_k.
Mat rotation_to_direction(const Direction& d);

inline double projection(const Direction& d, const Vec& y) { return dot(y, d.vector); }

/// R_j^v (spatial, through Phi_xi) or its dual through y - x0.
struct Rectangle {
    enum class Kind { Spatial, Dual };
    Direction direction;
    Vec center;
    int scale = 0;
    double M = 8.0;
    Kind kind = Kind::Spatial;
};

bool rectangle_contains(const Rectangle& rect, const Vec& x, const Phase* phase);

/// B* as a union of rectangles, with a radius index for fast membership.
class ExceptionalSet {
public:
    ExceptionalSet(const Vec& center, double radius, std::vector<Rectangle> rects, const Phase* phase);

    /// All spatial R_k^mu with 2^{-k} <= r and k <= k_max.
    static ExceptionalSet build(const Vec& center, double radius, double M, int k_max, const Phase& phase,
                                const std::vector<std::shared_ptr<const DirectionNet>>& nets);

    bool contains(const Vec& x) const;
    const Vec& center() const { return center_; }
    double radius() const { return radius_; }
    const std::vector<Rectangle>& rectangles() const { return rects_; }

private:
    struct Bucketed {
        double radius = 0.0;
        std::unordered_map<std::int64_t, std::vector<std::size_t>> cells;
    };
    std::int64_t cell_key(const Vec& p, double radius) const;

    Vec center_;
    double radius_;
    std::vector<Rectangle> rects_;
    const Phase* phase_;
    std::vector<Vec> anchors_;          // every rectangle sits in the ball(anchor, M 2^{-k/2})
    std::vector<Bucketed> by_scale_;    // anchored rectangles grouped by scale
    std::vector<std::size_t> unanchored_;
};

struct VolumeEstimate {
    double volume = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo |B*| over the box [-box_half_width, box_half_width]^n.
VolumeEstimate exceptional_set_volume(const ExceptionalSet& es, int dim, double box_half_width,
                                      std::size_t mc_samples, std::uint64_t seed = 3);

/// Line format: `j J-bitmask c1 ... cn` with 17 significant digits.
void write_net(std::ostream& os, const DirectionNet& net);
DirectionNet read_net(std::istream& is, int dim);

}  // namespace fio
