#ifndef NANOWALL_DYNAMICS_HPP
#define NANOWALL_DYNAMICS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "nanowall/grid.hpp"

namespace nanowall {

enum class Frame { Lab, Moving };
enum class Boundary { ClampToProfile, HomogeneousNeumann };

// Largest stable step of the explicit two-stage midpoint scheme on a grid of
// spacing h (diffusion-dominated bound).
inline double max_stable_dt(double h) { return 0.2 * h * h; }

struct DynamicsSpec {
    Frame frame = Frame::Moving;
    double delta = 0.0;
    double dt = 5e-5;
    double t_end = 0.0;
    Boundary boundary = Boundary::ClampToProfile;
    int record_every = 400;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<VectorField3> snapshots;
    VectorField3 terminal;
};

// Effective field h_delta(u) = u_xx - u2 e2 - u3 e3 + delta e1 (component-wise
// second differences, one-sided at the boundary rows).
VectorField3 effective_field(const VectorField3& u, double delta);

// Lab frame: du/dt = -u x h - u x (u x h). Orthogonal to u at every node by
// construction.
VectorField3 rhs_lab(const VectorField3& u, double delta);

// Moving frame: dv/dt = -v x h(v) - v x (v x h(v)) - delta*(v_x + v1 v - e1)
// with h(v) = v_xx - v2 e2 - v3 e3. The discrete transport term v_x is
// projected onto the tangent plane so the right-hand side is orthogonal to v
// at every node, exactly as in the continuum.
VectorField3 rhs_moving(const VectorField3& v, double delta);

// One explicit midpoint step followed by node-wise renormalization; boundary
// nodes then overwritten per boundary policy (clamp holds the incoming
// boundary values, i.e. those of the initial profile when iterated).
VectorField3 step(const VectorField3& state, const DynamicsSpec& spec);

// Called at t = 0, every record_every-th step and at the final step.
using RecordObserver = std::function<void(std::int64_t step_index, double t, const VectorField3& state)>;

// Repeated stepping to t_end (round(t_end/dt) steps). Deterministic for fixed
// inputs. Throws IntegrationDiverged on NaN/overflow.
VectorField3 evolve(const VectorField3& initial, const DynamicsSpec& spec, const RecordObserver& on_record);
Trajectory evolve(const VectorField3& initial, const DynamicsSpec& spec);

// Lab-frame energy diagnostic
//   1/2 ||u_x||^2 + 1/2 ||u2||^2 + 1/2 ||u3||^2 - delta * <u1 - tanh x, 1>.
// The Zeeman term is renormalized against the wall tail so it stays finite on
// the truncated domain; only differences and monotonicity are consumed.
double energy(const VectorField3& u, double delta);

}  // namespace nanowall

#endif
