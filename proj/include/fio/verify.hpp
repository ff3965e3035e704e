#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fio/operator.hpp"

namespace fio {

struct DecayRow {
    int j = 0;
    std::size_t v_count = 0;
    double value = 0.0;             // direction average of the raw integral
    double normalized_value = 0.0;  // value after the mode-specific normalization
};

struct DecayReport {
    std::string name;
    std::vector<DecayRow> rows;
    std::optional<FitResult> fit;  // empty when a normalized value is not positive
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct BoundednessReport {
    std::string name;
    std::string inputs;
    std::vector<std::string> labels;
    std::vector<double> ratios;
    double max_ratio = 0.0;
    double stability = 0.0;  // max/min for sweeps, relative change for refinements
    double threshold = 0.0;
    bool pass = false;
    double exponent = 0.0;  // p or q for off-diagonal runs, 0 otherwise
};

/// Symbol, phase and grid for experiments.  xi_max is the dual half width.
FioSpec make_spec(int dim, const Symbol& symbol, const Phase& phase, double half_width, std::size_t points,
                  int j_max);

/// min(count, |stratum|) directions of the J = 0 stratum, evenly spaced in index.
std::vector<std::size_t> sample_directions(const DirectionNet& net, unsigned mask, std::size_t count);

struct DecayParams {
    std::string mode = "plain";  // plain | lipschitz | offball
    int j_min = 3;
    int j_max = 7;
    int J_max = 8;            // lipschitz displacement is 2^{-J_max} along e_1
    unsigned zero_mask = 0;   // stratum J
    std::size_t directions = 8;
    std::optional<Vec> y;     // default origin
    std::optional<double> tolerance;
    double r = 0.25;          // offball ball radius
    std::optional<Vec> x0;    // offball ball center, default origin
    double M = 8.0;
    double window_pad = 2.0;
    double eta_pad = 2.0;
    KernelL1Options::Method method = KernelL1Options::Method::Auto;
};

double decay_target(const std::string& mode, int dim);
DecayReport decay_experiment(const FioSpec& spec, const DecayParams& p);

struct AtomParams {
    std::vector<double> radii{1.0, 0.5, 0.25, 0.125, 0.0625};
    std::vector<std::string> profiles{"odd"};
    std::vector<Vec> centers;  // default: origin only
    double growth_ceiling = 3.0;
};

BoundednessReport atom_uniformity(const FioSpec& spec, const AtomParams& p);

struct RefinementParams {
    std::vector<std::size_t> points{128, 256};  // grid sizes per axis, same box
    std::size_t trials = 8;
    double band_lo = 0.5;
    double band_hi = 4.0;
    std::uint64_t seed = 7;
    double tolerance = 0.2;
};

BoundednessReport l2_experiment(const FioSpec& spec, const RefinementParams& p);

enum class OffdiagMode { PTo2, TwoToQ };

/// 1/p = 1/2 - m/n for PTo2, 1/q = 1/2 + m/n for TwoToQ.
double offdiagonal_exponent(double m, int n, OffdiagMode mode);
BoundednessReport offdiagonal_experiment(const FioSpec& spec, double m, OffdiagMode mode, const RefinementParams& p);

struct HCheckParams {
    int j_min = 4;
    int j_max = 8;
    std::size_t samples = 4;  // x samples; eta runs over a fixed grid of the rotated support
    std::uint64_t seed = 11;
    double tolerance = 0.3;
};

struct HAlphaFit {
    MultiIndex alpha;
    DecayReport report;
    bool identically_zero = false;
};

struct HRemainderReport {
    double h_axis_error = 0.0;  // max |h(eta_1, 0, ..., 0)|
    std::vector<HAlphaFit> fits;
    bool pass = false;
};

/// h(eta) = Phi(x, A eta) - Phi_xi(x, A e_1) . A eta for the direction d.
double h_remainder(const Phase& phase, const Mat& A, const Vec& x, const Vec& eta);
HRemainderReport h_remainder_check(const Phase& phase, int dim, const HCheckParams& p);

struct SeparationParams {
    Vec x0;
    double r = 0.25;
    std::vector<int> levels{4, 5, 6, 7};
    std::size_t samples = 2000;
    double M = 8.0;
    double x_box = 8.0;  // x is drawn from [-x_box, x_box]^n minus B*
    double floor = 0.1;
    std::uint64_t seed = 13;
};

struct SeparationRow {
    int j = 0;
    std::size_t direction = 0;
    std::size_t samples = 0;
    double min_ratio = 0.0;
};

struct SeparationReport {
    std::vector<SeparationRow> rows;
    double min_ratio = 0.0;
    double floor = 0.0;
    bool pass = false;
};

SeparationReport separation_check(const Phase& phase, int dim, const SeparationParams& p);

}  // namespace fio
