#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fio/geometry.hpp"
#include "fio/numerics.hpp"
#include "fio/symbols.hpp"

namespace fio {

/// Grid too coarse (or box too small) for the requested evaluation.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Direction nets for levels 0..j_max, shared by all pieces.
struct Decomposition {
    int dim = 2;
    int j_max = 0;
    std::vector<std::shared_ptr<const DirectionNet>> nets;

    static std::shared_ptr<const Decomposition> build(int dim, int j_max);
    const DirectionNet& net(int j) const;
};

/// Piece of the frequency decomposition.  level 0 is the Psi_0 term; a level
/// without direction is the radial piece sigma * Psi_j.
struct PieceId {
    int level = 0;
    std::optional<std::size_t> direction;
};

double piece_cutoff(const Decomposition& dec, const PieceId& piece, const Vec& xi);

struct FioSpec {
    Symbol symbol;
    Phase phase;
    Grid x_grid;
    double xi_max;  // truncation |xi|_inf <= xi_max on x_grid.dual()
    std::shared_ptr<const Decomposition> decomposition;
};

/// Throws ResolutionError when the dual grid cannot carry xi_max, when
/// 2^{level+1} > xi_max, or when the symbol support moved by the phase needs
/// fewer than 4 samples per period of e^{2 pi i x.xi}.
void check_resolution(const FioSpec& spec, std::optional<int> level = std::nullopt);

struct ApplyOptions {
    bool force_direct = false;  // skip the FFT path for translation phases
};

std::vector<cplx> apply_fio(const FioSpec& spec, std::span<const cplx> f, const ApplyOptions& opt = {});
std::vector<cplx> apply_piece(const FioSpec& spec, const PieceId& piece, std::span<const cplx> f,
                              const ApplyOptions& opt = {});

/// Fraction of the discrete L^2 mass of dft(f) outside the truncation box.
double spectral_tail_mass(const FioSpec& spec, std::span<const cplx> f);

/// K(x, y) = sum over the xi lattice of e^{2 pi i (Phi(x,xi) - y.xi)} a(x, xi), optionally times delta_ell.
cplx kernel_eval(const FioSpec& spec, const PieceId& piece, const Vec& x, const Vec& y,
                 const std::vector<int>* ell = nullptr);

struct KernelL1Options {
    enum class Method { Auto, Direct, Lattice };
    Method method = Method::Auto;
    std::optional<Vec> y_prime;              // integrate |K(x,y) - K(x,y')| instead
    const ExceptionalSet* exclude = nullptr; // drop x in this set
    double window_pad = 2.0;                 // w-window half width over the support reach
    double eta_pad = 2.0;                    // zero padding of the eta box
};

/// int |K(x, y)| dx.  Lattice method needs a translation phase and a separable symbol.
double kernel_l1_in_x(const FioSpec& spec, const PieceId& piece, const Vec& y, const KernelL1Options& opt = {});

/// Convolution kernel of (1 + |xi|^2)^{m/2} in dimension z.size(), m in (-n, 0).
double multiplier_kernel(double m, const Vec& z);

struct MultiplierDecay {
    FitResult fit;  // log2 |K| against log2 |z|
    double target = 0.0;
    std::vector<std::pair<double, double>> samples;  // (|z|, K)
    bool positive = true;
};

MultiplierDecay multiplier_kernel_decay(double m, int n, int points = 11);

/// K#(xi, eta) = int e^{2 pi i (Phi(x,eta) - Phi(x,xi))} sigma(x,eta) conj(sigma(x,xi)) dx on spec.x_grid.
cplx ttstar_kernel(const FioSpec& spec, const Vec& xi, const Vec& eta);

}  // namespace fio
