#include "nanowall/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "nanowall/calculus.hpp"
#include "nanowall/errors.hpp"

namespace nanowall {

using cd = std::complex<double>;

void BandedMatrix::init(int size, int lower, int upper) {
    n = size;
    kl = lower;
    ku = upper;
    a.assign(static_cast<size_t>(n) * (kl + ku + 1), 0.0);
}

double& BandedMatrix::at(int i, int j) {
    return a[static_cast<size_t>(i) * (kl + ku + 1) + (j - i + kl)];
}

double BandedMatrix::get(int i, int j) const {
    if (j - i > ku || i - j > kl) return 0.0;
    return a[static_cast<size_t>(i) * (kl + ku + 1) + (j - i + kl)];
}

void BandedMatrix::apply(const double* x, double* y) const {
    const int w = kl + ku + 1;
    for (int i = 0; i < n; ++i) {
        const int j0 = std::max(0, i - kl);
        const int j1 = std::min(n - 1, i + ku);
        double acc = 0.0;
        const double* row = a.data() + static_cast<size_t>(i) * w + kl - i;
        for (int j = j0; j <= j1; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

ScalarField DiscreteOperator::apply(const ScalarField& f) const {
    if (size != f.grid->n) throw ConfigError("DiscreteOperator::apply: size mismatch");
    ScalarField out{f.grid, std::vector<double>(f.v.size())};
    band.apply(f.v.data(), out.v.data());
    return out;
}

Field2 DiscreteOperator::apply(const Field2& f) const {
    const int n = f.c1.grid->n;
    if (size != 2 * n) throw ConfigError("DiscreteOperator::apply: size mismatch");
    std::vector<double> x(static_cast<size_t>(2 * n)), y(static_cast<size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
        x[2 * i] = f.c1.v[i];
        x[2 * i + 1] = f.c2.v[i];
    }
    band.apply(x.data(), y.data());
    Field2 out = make_field2(f.c1.grid);
    for (int i = 0; i < n; ++i) {
        out.c1.v[i] = y[2 * i];
        out.c2.v[i] = y[2 * i + 1];
    }
    return out;
}

DiscreteOperator build_L(GridPtr g) {
    const int n = g->n;
    const double invh2 = 1.0 / (g->h * g->h);
    DiscreteOperator op;
    op.kind = DiscreteOperator::Kind::L;
    op.size = n;
    op.grid = g;
    op.tag = "L = -d2/dx2 + 2 tanh^2 x - 1 (Dirichlet)";
    op.band.init(n, 1, 1);
    auto pot = [&](int i) {
        const double t = std::tanh(g->nodes[i]);
        return 2.0 * t * t - 1.0;
    };
    for (int i = 0; i < n; ++i) op.band.at(i, i) = 2.0 * invh2 + pot(i);
    // Interior couplings only: boundary rows/columns stay decoupled, which is
    // the symmetric elimination of the Dirichlet values.
    for (int i = 1; i < n - 1; ++i) {
        if (i - 1 >= 1) op.band.at(i, i - 1) = -invh2;
        if (i + 1 <= n - 2) op.band.at(i, i + 1) = -invh2;
    }
    return op;
}

DiscreteOperator build_l(GridPtr g) {
    const int n = g->n;
    const double inv2h = 1.0 / (2.0 * g->h);
    DiscreteOperator op;
    op.kind = DiscreteOperator::Kind::SmallL;
    op.size = n;
    op.grid = g;
    op.tag = "l = d/dx + tanh x";
    op.band.init(n, 2, 2);
    for (int i = 1; i < n - 1; ++i) {
        op.band.at(i, i - 1) = -inv2h;
        op.band.at(i, i) = std::tanh(g->nodes[i]);
        op.band.at(i, i + 1) = inv2h;
    }
    // One-sided second-order first derivative at the boundary rows.
    op.band.at(0, 0) = -3.0 * inv2h + std::tanh(g->nodes[0]);
    op.band.at(0, 1) = 4.0 * inv2h;
    op.band.at(0, 2) = -inv2h;
    op.band.at(n - 1, n - 1) = 3.0 * inv2h + std::tanh(g->nodes[n - 1]);
    op.band.at(n - 1, n - 2) = -4.0 * inv2h;
    op.band.at(n - 1, n - 3) = inv2h;
    return op;
}

DiscreteOperator build_script_L(GridPtr g, double delta) {
    // Node-major interleaving: unknown (i, comp) sits at 2*i + comp. The block
    // acts as (W1, W2) -> J (L W1, L W2) + delta (l W1, l W2) with
    // J = [[-1, -1], [1, -1]]. Boundary nodes are fully decoupled.
    const int n = g->n;
    DiscreteOperator L = build_L(g);
    DiscreteOperator sl = build_l(g);
    DiscreteOperator op;
    op.kind = DiscreteOperator::Kind::ScriptL;
    op.size = 2 * n;
    op.grid = g;
    op.delta = delta;
    op.tag = "scriptL = J L" + std::string(delta != 0.0 ? " + delta l" : "");
    op.band.init(2 * n, 5, 5);
    const double J[2][2] = {{-1.0, -1.0}, {1.0, -1.0}};
    for (int i = 0; i < n; ++i) {
        const bool bdry = (i == 0 || i == n - 1);
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            const double lij = L.band.get(i, j);
            const double sij = bdry ? 0.0 : sl.band.get(i, j);
            for (int ci = 0; ci < 2; ++ci) {
                for (int cj = 0; cj < 2; ++cj) {
                    double val = J[ci][cj] * lij;
                    if (ci == cj) val += delta * sij;
                    if (val != 0.0) op.band.at(2 * i + ci, 2 * j + cj) = val;
                }
            }
        }
    }
    return op;
}

// ---------------------------------------------------------------------------
// Restricted eigensolves.
//
// The block operator in the eigenbasis of J decouples into the two complex
// tridiagonal interior problems B_pm = (-1 pm i) L + delta l, whose spectra
// are complex conjugates of each other, so one block suffices. The
// restriction to the complement of the kernel modes is realized through a
// bordered solve: B y = x + beta*s with s^T y = 0 applies the inverse of the
// restricted operator exactly, and the tridiagonal LU makes it O(n).
// ---------------------------------------------------------------------------

namespace {

struct InteriorTridiag {
    int m = 0;
    std::vector<cd> dl, d, du;  // sub/diag/super of the interior problem
};

// coeff*L + delta*l on the interior nodes (Dirichlet truncation).
InteriorTridiag interior_block(const Grid& g, cd coeff, double delta) {
    const int m = g.n - 2;
    const double invh2 = 1.0 / (g.h * g.h);
    const double inv2h = 1.0 / (2.0 * g.h);
    InteriorTridiag t;
    t.m = m;
    t.d.resize(m);
    t.dl.assign(m > 1 ? m - 1 : 0, cd(0.0));
    t.du.assign(m > 1 ? m - 1 : 0, cd(0.0));
    for (int k = 0; k < m; ++k) {
        const double x = g.nodes[k + 1];
        const double th = std::tanh(x);
        t.d[k] = coeff * (2.0 * invh2 + 2.0 * th * th - 1.0) + delta * th;
        if (k + 1 < m) {
            t.du[k] = coeff * (-invh2) + delta * inv2h;
            t.dl[k] = coeff * (-invh2) - delta * inv2h;
        }
    }
    return t;
}

std::vector<double> interior_sech(const Grid& g, bool normalized = true) {
    std::vector<double> s(static_cast<size_t>(g.n - 2));
    for (int k = 0; k < g.n - 2; ++k) s[k] = sech(g.nodes[k + 1]);
    if (normalized) {
        double nrm = std::sqrt(std::inner_product(s.begin(), s.end(), s.begin(), 0.0));
        for (auto& v : s) v /= nrm;
    }
    return s;
}

struct TridiagLU {
    int m = 0;
    std::vector<cd> dl, d, du, du2;
    std::vector<lapack_int> ipiv;

    explicit TridiagLU(const InteriorTridiag& t)
        : m(t.m), dl(t.dl), d(t.d), du(t.du), du2(std::max(0, t.m - 2)), ipiv(t.m) {
        lapack_int info = LAPACKE_zgttrf(m, dl.data(), d.data(), du.data(), du2.data(), ipiv.data());
        if (info != 0) throw DiagnosticsError("zgttrf failed, info=" + std::to_string(info));
    }

    void solve(std::vector<cd>& rhs) const {
        lapack_int info = LAPACKE_zgttrs(LAPACK_COL_MAJOR, 'N', m, 1, dl.data(), d.data(), du.data(),
                                         du2.data(), ipiv.data(), rhs.data(), m);
        if (info != 0) throw DiagnosticsError("zgttrs failed, info=" + std::to_string(info));
    }
};

cd dotc(const std::vector<cd>& a, const std::vector<cd>& b) {
    cd acc(0.0);
    for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

// Applies the inverse of the restriction of B to the complement of s:
// solves B y = x + beta*s with s^T y = 0 via two LU solves (B^{-1} s cached).
struct DeflatedInverse {
    const TridiagLU& lu;
    const std::vector<double>& s;
    std::vector<cd> binv_s;
    cd s_binv_s;

    DeflatedInverse(const TridiagLU& lu_, const std::vector<double>& s_) : lu(lu_), s(s_) {
        binv_s.assign(s.size(), cd(0.0));
        for (size_t i = 0; i < s.size(); ++i) binv_s[i] = cd(s[i], 0.0);
        lu.solve(binv_s);
        s_binv_s = cd(0.0);
        for (size_t i = 0; i < s.size(); ++i) s_binv_s += s[i] * binv_s[i];
        if (std::abs(s_binv_s) < 1e-300)
            throw DiagnosticsError("deflated solve: s^T B^{-1} s vanished (ill-conditioned projection)");
    }

    void apply(const std::vector<cd>& x, std::vector<cd>& y) const {
        y = x;
        lu.solve(y);
        cd num(0.0);
        for (size_t i = 0; i < s.size(); ++i) num += s[i] * y[i];
        const cd beta = -num / s_binv_s;
        for (size_t i = 0; i < s.size(); ++i) y[i] += beta * binv_s[i];
    }
};

void project_out(std::vector<cd>& v, const std::vector<double>& s) {
    cd overlap(0.0);
    for (size_t i = 0; i < v.size(); ++i) overlap += s[i] * v[i];
    for (size_t i = 0; i < v.size(); ++i) v[i] -= overlap * s[i];
}

struct RitzPair {
    cd lambda;
    std::vector<cd> vec;
    double residual;
};

void tridiag_apply(const InteriorTridiag& t, const std::vector<cd>& x, std::vector<cd>& y) {
    y.assign(t.m, cd(0.0));
    for (int i = 0; i < t.m; ++i) {
        cd acc = t.d[i] * x[i];
        if (i > 0) acc += t.dl[i - 1] * x[i - 1];
        if (i + 1 < t.m) acc += t.du[i] * x[i + 1];
        y[i] = acc;
    }
}

// Shift-invert Arnoldi (shift 0) for the k smallest-magnitude eigenvalues of
// the restriction of B to the complement of s. Deterministic start vector.
std::vector<RitzPair> arnoldi_smallest(const InteriorTridiag& B, const std::vector<double>& s,
                                       int k, int krylov_dim) {
    const int m = B.m;
    TridiagLU lu(B);
    DeflatedInverse inv(lu, s);

    const int mdim = std::min(m - 2, krylov_dim);
    if (mdim < k + 2) throw DiagnosticsError("arnoldi: Krylov dimension too small");

    std::vector<std::vector<cd>> V;
    V.reserve(mdim + 1);
    std::vector<cd> H(static_cast<size_t>(mdim + 1) * mdim, cd(0.0));
    auto Hat = [&](int i, int j) -> cd& { return H[static_cast<size_t>(i) * mdim + j]; };

    std::mt19937_64 rng(0x6e616e6fULL);
    std::vector<cd> q(m);
    for (auto& z : q) z = cd(std::uniform_real_distribution<double>(-1, 1)(rng), 0.0);
    project_out(q, s);
    double nrm = std::sqrt(std::abs(dotc(q, q)));
    for (auto& z : q) z /= nrm;
    V.push_back(q);

    int built = 0;
    std::vector<cd> w(m);
    for (int j = 0; j < mdim; ++j) {
        inv.apply(V[j], w);
        project_out(w, s);
        // Modified Gram-Schmidt with one re-orthogonalization pass.
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) {
                cd hij = dotc(V[i], w);
                if (pass == 0)
                    Hat(i, j) = hij;
                else
                    Hat(i, j) += hij;
                for (int r = 0; r < m; ++r) w[r] -= hij * V[i][r];
            }
        }
        nrm = std::sqrt(std::abs(dotc(w, w)));
        Hat(j + 1, j) = nrm;
        built = j + 1;
        if (nrm < 1e-13) break;  // invariant subspace found
        for (auto& z : w) z /= nrm;
        V.push_back(w);
    }

    // Ritz pairs from the dense Hessenberg block.
    const int md = built;
    std::vector<cd> Hm(static_cast<size_t>(md) * md);
    for (int i = 0; i < md; ++i)
        for (int j = 0; j < md; ++j) Hm[static_cast<size_t>(i) * md + j] = Hat(i, j);
    std::vector<cd> nu(md);
    std::vector<cd> Y(static_cast<size_t>(md) * md);
    lapack_int info = LAPACKE_zgeev(LAPACK_ROW_MAJOR, 'N', 'V', md, Hm.data(), md, nu.data(),
                                    nullptr, md, Y.data(), md);
    if (info != 0) throw DiagnosticsError("zgeev(Hessenberg) failed, info=" + std::to_string(info));

    // Largest |nu| of the inverse are the smallest eigenvalues of B|_E.
    std::vector<int> order(md);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(nu[a]) > std::abs(nu[b]); });

    std::vector<RitzPair> out;
    for (int idx = 0; idx < std::min(k, md); ++idx) {
        const int col = order[idx];
        RitzPair rp;
        rp.lambda = 1.0 / nu[col];
        rp.vec.assign(m, cd(0.0));
        for (int i = 0; i < md; ++i) {
            const cd yi = Y[static_cast<size_t>(i) * md + col];
            for (int r = 0; r < m; ++r) rp.vec[r] += yi * V[i][r];
        }
        double vnrm = std::sqrt(std::abs(dotc(rp.vec, rp.vec)));
        for (auto& z : rp.vec) z /= vnrm;
        // True residual of the restricted operator: P (B x) - lambda x.
        std::vector<cd> bx;
        tridiag_apply(B, rp.vec, bx);
        project_out(bx, s);
        double rsq = 0.0;
        for (int r = 0; r < m; ++r) {
            const cd diff = bx[r] - rp.lambda * rp.vec[r];
            rsq += std::norm(diff);
        }
        rp.residual = std::sqrt(rsq);
        out.push_back(std::move(rp));
    }
    return out;
}

std::vector<RitzPair> arnoldi_smallest_checked(const InteriorTridiag& B, const std::vector<double>& s,
                                               int k, int krylov_dim0) {
    int mdim = krylov_dim0;
    for (int attempt = 0; attempt < 3; ++attempt) {
        auto pairs = arnoldi_smallest(B, s, k, mdim);
        double worst = 0.0;
        for (const auto& p : pairs) worst = std::max(worst, p.residual / (1.0 + std::abs(p.lambda)));
        if (worst <= 1e-9 || mdim >= B.m - 2) return pairs;
        mdim = std::min(B.m - 2, mdim * 2);
    }
    throw DiagnosticsError("arnoldi: Ritz residuals did not converge");
}

// Dense restriction of an interior complex matrix to the complement of s,
// via a Householder reflector mapping s to e1 (validation path, small n).
std::vector<cd> dense_restricted(const InteriorTridiag& B, const std::vector<double>& s, int& mr) {
    const int m = B.m;
    std::vector<cd> D(static_cast<size_t>(m) * m, cd(0.0));
    for (int i = 0; i < m; ++i) {
        D[static_cast<size_t>(i) * m + i] = B.d[i];
        if (i > 0) D[static_cast<size_t>(i) * m + i - 1] = B.dl[i - 1];
        if (i + 1 < m) D[static_cast<size_t>(i) * m + i + 1] = B.du[i];
    }
    // Householder vector v = s + sign(s0) e1.
    std::vector<double> v = s;
    v[0] += (s[0] >= 0.0 ? 1.0 : -1.0);
    double vv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    auto reflect_rows = [&](std::vector<cd>& M) {
        // M <- H M with H = I - 2 v v^T / (v^T v)
        for (int j = 0; j < m; ++j) {
            cd acc(0.0);
            for (int i = 0; i < m; ++i) acc += v[i] * M[static_cast<size_t>(i) * m + j];
            acc *= 2.0 / vv;
            for (int i = 0; i < m; ++i) M[static_cast<size_t>(i) * m + j] -= acc * v[i];
        }
    };
    auto reflect_cols = [&](std::vector<cd>& M) {
        for (int i = 0; i < m; ++i) {
            cd acc(0.0);
            for (int j = 0; j < m; ++j) acc += M[static_cast<size_t>(i) * m + j] * v[j];
            acc *= 2.0 / vv;
            for (int j = 0; j < m; ++j) M[static_cast<size_t>(i) * m + j] -= acc * v[j];
        }
    };
    reflect_rows(D);
    reflect_cols(D);
    // Drop the first row/column (the s-direction).
    mr = m - 1;
    std::vector<cd> R(static_cast<size_t>(mr) * mr);
    for (int i = 0; i < mr; ++i)
        for (int j = 0; j < mr; ++j) R[static_cast<size_t>(i) * mr + j] = D[static_cast<size_t>(i + 1) * m + j + 1];
    return R;
}

std::vector<cd> dense_eigenvalues(std::vector<cd> M, int m) {
    std::vector<cd> w(m);
    lapack_int info =
        LAPACKE_zgeev(LAPACK_ROW_MAJOR, 'N', 'N', m, M.data(), m, w.data(), nullptr, m, nullptr, m);
    if (info != 0) throw DiagnosticsError("zgeev failed, info=" + std::to_string(info));
    return w;
}

double mode_l2_residual(const DiscreteOperator& op, const Field2& mode) {
    if (op.size == op.grid->n) {
        // Scalar operator: apply to the nonzero component of the mode.
        const ScalarField& comp = (norm(mode.c1, NormKind::L2) > norm(mode.c2, NormKind::L2))
                                      ? mode.c1
                                      : mode.c2;
        return norm(op.apply(comp), NormKind::L2);
    }
    return norm(op.apply(mode), NormKind::L2);
}

}  // namespace

SpectrumReport restricted_spectrum(const DiscreteOperator& op, const KernelModes& modes,
                                   const SpectrumOptions& opts) {
    const Grid& g = *op.grid;
    SpectrumReport rep;
    rep.kernel_deflation_residuals = {mode_l2_residual(op, modes.v1), mode_l2_residual(op, modes.v2)};
    std::vector<double> s = interior_sech(g);

    const int k = opts.n_eigs;
    const int kdim = opts.krylov_dim > 0 ? opts.krylov_dim : std::max(160, 8 * k);

    auto pad_scalar = [&](const std::vector<cd>& interior) {
        std::vector<cd> full(static_cast<size_t>(g.n), cd(0.0));
        for (int i = 0; i < g.n - 2; ++i) full[i + 1] = interior[i];
        return full;
    };

    auto overlap_with_sech = [&](const std::vector<cd>& interior) {
        cd acc(0.0);
        for (size_t i = 0; i < s.size(); ++i) acc += s[i] * interior[i];
        return std::abs(acc);
    };

    if (op.kind == DiscreteOperator::Kind::L) {
        InteriorTridiag B = interior_block(g, cd(1.0, 0.0), 0.0);
        if (opts.force_dense) {
            int mr = 0;
            auto R = dense_restricted(B, s, mr);
            rep.eigenvalues = dense_eigenvalues(std::move(R), mr);
        } else {
            auto pairs = arnoldi_smallest_checked(B, s, k, kdim);
            for (auto& p : pairs) {
                rep.eigenvalues.push_back(p.lambda);
                rep.kernel_overlaps.push_back(overlap_with_sech(p.vec));
                rep.eigen_residuals.push_back(p.residual);
                if (opts.want_vectors) rep.eigenvectors.push_back(pad_scalar(p.vec));
            }
        }
    } else if (op.kind == DiscreteOperator::Kind::ScriptL) {
        // One J-block suffices: the other block is its complex conjugate.
        InteriorTridiag B = interior_block(g, cd(-1.0, 1.0), op.delta);
        if (opts.force_dense) {
            int mr = 0;
            auto R = dense_restricted(B, s, mr);
            auto ev = dense_eigenvalues(std::move(R), mr);
            rep.eigenvalues = ev;
            for (const auto& z : ev) rep.eigenvalues.push_back(std::conj(z));
        } else {
            auto pairs = arnoldi_smallest_checked(B, s, k, kdim);
            for (auto& p : pairs) {
                rep.eigenvalues.push_back(p.lambda);
                rep.eigenvalues.push_back(std::conj(p.lambda));
                const double ov = overlap_with_sech(p.vec);
                rep.kernel_overlaps.push_back(ov);
                rep.kernel_overlaps.push_back(ov);
                rep.eigen_residuals.push_back(p.residual);
                rep.eigen_residuals.push_back(p.residual);
                if (opts.want_vectors) {
                    // Block eigenvector phi lifts to (phi, -i phi) for the
                    // (-1+i) block; the conjugate pair lifts to (phi, i phi).
                    std::vector<cd> full1(static_cast<size_t>(2 * g.n), cd(0.0));
                    std::vector<cd> full2(static_cast<size_t>(2 * g.n), cd(0.0));
                    for (int i = 0; i < g.n - 2; ++i) {
                        full1[2 * (i + 1)] = p.vec[i];
                        full1[2 * (i + 1) + 1] = cd(0.0, -1.0) * p.vec[i];
                        full2[2 * (i + 1)] = std::conj(p.vec[i]);
                        full2[2 * (i + 1) + 1] = cd(0.0, 1.0) * std::conj(p.vec[i]);
                    }
                    rep.eigenvectors.push_back(std::move(full1));
                    rep.eigenvectors.push_back(std::move(full2));
                }
            }
        }
    } else {
        throw DiagnosticsError("restricted_spectrum: unsupported operator kind");
    }

    std::vector<int> order(rep.eigenvalues.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (rep.eigenvalues[a].real() != rep.eigenvalues[b].real())
            return rep.eigenvalues[a].real() > rep.eigenvalues[b].real();
        return rep.eigenvalues[a].imag() > rep.eigenvalues[b].imag();
    });
    auto permute = [&](auto& vec) {
        using T = std::decay_t<decltype(vec)>;
        if (vec.empty()) return;
        T tmp;
        tmp.reserve(vec.size());
        for (int idx : order) tmp.push_back(std::move(vec[idx]));
        vec = std::move(tmp);
    };
    permute(rep.eigenvalues);
    permute(rep.kernel_overlaps);
    permute(rep.eigen_residuals);
    permute(rep.eigenvectors);

    rep.abscissa = rep.eigenvalues.empty() ? 0.0 : rep.eigenvalues.front().real();
    return rep;
}

namespace {

double restricted_abscissa(const Grid& g, double delta, int n_eigs, int krylov_dim) {
    InteriorTridiag B = interior_block(g, cd(-1.0, 1.0), delta);
    std::vector<double> s = interior_sech(g);
    auto pairs = arnoldi_smallest_checked(B, s, n_eigs, krylov_dim);
    double a = -std::numeric_limits<double>::infinity();
    for (const auto& p : pairs) a = std::max(a, p.lambda.real());
    return a;
}

}  // namespace

Delta0Estimate estimate_delta0(GridPtr g, double target_abscissa) {
    Delta0Estimate est;
    const int n_eigs = 16;
    const int kdim = 200;
    auto abscissa = [&](double delta) {
        const double a = restricted_abscissa(*g, delta, n_eigs, kdim);
        est.trace.emplace_back(delta, a);
        return a;
    };

    if (abscissa(0.0) >= target_abscissa) {
        est.delta0 = 0.0;  // would indicate a discretization bug upstream
        return est;
    }

    // Doubling search for a bracket, then bisection to width <= 1e-3.
    double lo = 0.0, hi = 0.25;
    const double cap = 8.0;
    while (abscissa(hi) < target_abscissa) {
        lo = hi;
        hi *= 2.0;
        if (hi > cap) {
            est.delta0 = cap;
            return est;
        }
    }
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if (abscissa(mid) < target_abscissa)
            lo = mid;
        else
            hi = mid;
    }
    est.delta0 = lo;
    return est;
}

DecayFit linear_decay_probe(double delta, const Field2& w0, double t_end, double dt) {
    GridPtr g = w0.c1.grid;
    const int n = g->n;
    if (dt <= 0.0) dt = 0.125 * g->h * g->h;
    DiscreteOperator op = build_script_L(g, delta);

    // Normalized kernel modes for the per-step projection onto E.
    KernelModes km = kernel_modes(g);
    const double mode_nrm = norm(km.v1.c2, NormKind::L2);
    std::vector<double> w(static_cast<size_t>(2 * n)), k1(w.size()), half(w.size());
    for (int i = 0; i < n; ++i) {
        w[2 * i] = w0.c1.v[i];
        w[2 * i + 1] = w0.c2.v[i];
    }

    const double h = g->h;
    auto project_E = [&](std::vector<double>& state) {
        // <state, v1> and <state, v2> with the trapezoid weights; v1 = (0, sech),
        // v2 = (sech, 0), each of norm mode_nrm.
        double p1 = 0.0, p2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sh = sech(g->nodes[i]);
            const double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            p1 += wgt * sh * state[2 * i + 1];
            p2 += wgt * sh * state[2 * i];
        }
        p1 *= h / (mode_nrm * mode_nrm);
        p2 *= h / (mode_nrm * mode_nrm);
        for (int i = 0; i < n; ++i) {
            const double sh = sech(g->nodes[i]);
            state[2 * i + 1] -= p1 * sh;
            state[2 * i] -= p2 * sh;
        }
    };
    project_E(w);

    Field2 snapshot = make_field2(g);
    auto h1_norm = [&](const std::vector<double>& state) {
        for (int i = 0; i < n; ++i) {
            snapshot.c1.v[i] = state[2 * i];
            snapshot.c2.v[i] = state[2 * i + 1];
        }
        return norm(snapshot, NormKind::H1);
    };

    DecayFit fit;
    const auto n_steps = static_cast<long long>(std::llround(t_end / dt));
    const long long stride = std::max<long long>(1, std::llround(0.05 / dt));
    fit.times.push_back(0.0);
    fit.h1_norms.push_back(h1_norm(w));
    for (long long stp = 1; stp <= n_steps; ++stp) {
        op.band.apply(w.data(), k1.data());
        for (size_t i = 0; i < w.size(); ++i) half[i] = w[i] + 0.5 * dt * k1[i];
        op.band.apply(half.data(), k1.data());
        for (size_t i = 0; i < w.size(); ++i) w[i] += dt * k1[i];
        project_E(w);
        if (stp % stride == 0 || stp == n_steps) {
            fit.times.push_back(stp * dt);
            fit.h1_norms.push_back(h1_norm(w));
        }
    }

    // Least-squares fit of log ||W||_H1 over the final half of the record.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (size_t i = 0; i < fit.times.size(); ++i) {
        if (fit.times[i] < 0.5 * t_end) continue;
        if (!(fit.h1_norms[i] > 0.0)) continue;
        const double x = fit.times[i], y = std::log(fit.h1_norms[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt < 2) throw DiagnosticsError("linear_decay_probe: not enough samples to fit");
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / cnt;
    fit.beta = -slope;
    fit.decayed = fit.beta > 0.0;
    const double w0_h1 = fit.h1_norms.front();
    fit.k4 = w0_h1 > 0.0 ? std::exp(intercept) / w0_h1 : 0.0;
    return fit;
}

}  // namespace nanowall
