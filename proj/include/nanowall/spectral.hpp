#ifndef NANOWALL_SPECTRAL_HPP
#define NANOWALL_SPECTRAL_HPP

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "nanowall/grid.hpp"
#include "nanowall/profiles.hpp"

namespace nanowall {

// General banded matrix, row-major band storage: entry (i, j) with
// -kl <= j - i <= ku lives at a[i*(kl+ku+1) + (j - i + kl)].
struct BandedMatrix {
    int n = 0, kl = 0, ku = 0;
    std::vector<double> a;

    void init(int size, int lower, int upper);
    double& at(int i, int j);
    double get(int i, int j) const;
    void apply(const double* x, double* y) const;
};

// Discrete realization of one of the paper-level operators, acting on
// node-value vectors (size n for the scalar operators L and l, 2n for the
// block operator with node-major interleaving (W1_i, W2_i)).
struct DiscreteOperator {
    enum class Kind { L, SmallL, ScriptL, Generic };

    Kind kind = Kind::Generic;
    int size = 0;
    GridPtr grid;
    double delta = 0.0;  // script operator carries its delta*l part
    BandedMatrix band;
    std::string tag;

    ScalarField apply(const ScalarField& f) const;
    Field2 apply(const Field2& f) const;
};

// L = -d^2/dx^2 + 2 tanh^2 x - 1, symmetric tridiagonal. Dirichlet boundary:
// the two boundary rows keep their diagonal but are decoupled symmetrically.
DiscreteOperator build_L(GridPtr g);

// l = d/dx + tanh x (centered interior rows, one-sided boundary rows).
DiscreteOperator build_l(GridPtr g);

// Block operator J (x) L + delta * I (x) l acting on two-component fields,
// with J = [[-1, -1], [1, -1]]. Boundary nodes fully decoupled (Dirichlet).
DiscreteOperator build_script_L(GridPtr g, double delta = 0.0);

struct SpectrumReport {
    // Sorted by real part, descending. For restricted solves these are the
    // eigenvalues nearest the spectral gap (smallest in magnitude), which for
    // this operator family contain the rightmost ones.
    std::vector<std::complex<double>> eigenvalues;
    // Optional right eigenvectors of the restriction, two complex components
    // per node, only filled on request.
    std::vector<std::vector<std::complex<double>>> eigenvectors;
    double abscissa = 0.0;  // max Re over the computed set
    std::array<double, 2> kernel_deflation_residuals{0.0, 0.0};  // ||A v_i||_L2
    std::vector<double> kernel_overlaps;  // |<eigvec, mode>| per eigenvalue
    std::vector<double> eigen_residuals;  // ||A w - lambda w||_2 / ||w||_2
};

struct SpectrumOptions {
    int n_eigs = 24;
    bool want_vectors = false;
    int krylov_dim = 0;      // 0 = automatic
    bool force_dense = false;  // small-n validation path (LAPACK *geev)
};

// Spectrum of the operator restricted to the orthogonal complement of the
// kernel modes (the discrete Q-projection of the L2 inner product).
SpectrumReport restricted_spectrum(const DiscreteOperator& op, const KernelModes& modes,
                                   const SpectrumOptions& opts = {});

struct Delta0Estimate {
    double delta0 = 0.0;
    std::vector<std::pair<double, double>> trace;  // (delta, abscissa) evaluations
};

// Largest delta (bracket width <= 1e-3) for which the restricted spectral
// abscissa of scriptL + delta*l stays below target_abscissa; bisection after
// a doubling search. Returns 0 if even delta = 0 fails the target.
Delta0Estimate estimate_delta0(GridPtr g, double target_abscissa = -0.5);

struct DecayFit {
    double k4 = 0.0;    // intercept-derived prefactor estimate
    double beta = 0.0;  // fitted decay rate (positive = decay)
    bool decayed = false;
    std::vector<double> times;
    std::vector<double> h1_norms;
};

// Evolves dW/dt = (scriptL + delta*l) W with the explicit midpoint scheme,
// re-projecting onto the complement of the kernel modes every step, and fits
// log ||W(t)||_H1 over the final half of the record. A positive slope is
// reported through decayed=false, never silently accepted.
DecayFit linear_decay_probe(double delta, const Field2& w0, double t_end, double dt = 0.0);

}  // namespace nanowall

#endif
