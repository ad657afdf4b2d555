#pragma once

#include "cliffmorse/curves.hpp"
#include "cliffmorse/dichotomy.hpp"
#include "cliffmorse/flow.hpp"
#include "cliffmorse/white.hpp"

#include <filesystem>
#include <stdexcept>
#include <vector>

namespace cliffmorse {

struct NoProgress : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One time slice of a moving-torus ansatz: base rotation n, its left
// logarithmic derivative omega = n^{-1} dn/dT in slow time T = s t, the graph
// field f over n . T0 and the slow-time derivative of f at fixed (theta, phi).
struct FlowSlice {
    double t = 0.0; // slow time
    Eigen::Matrix4d n = Eigen::Matrix4d::Identity();
    Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
    TorusField f;
    TorusField fdot;
};

// Approximate eternal mean curvature flow in e^{2 s u} g: a family of graphs
// over rotating Clifford tori, sampled uniformly in slow time. The fine_*
// arrays hold the same track on a grid refined by AnsatzOptions::refine;
// slices are every refine-th fine node. eta / eta_dot record the kernel
// correction applied by the latest corrector pass, per slice.
struct EternalFlowCandidate {
    double s = 0.0;
    std::vector<FlowSlice> slices;
    FlowPath gamma; // base-path samples at slice times
    std::vector<EndMatrix2> eta;
    std::vector<EndMatrix2> eta_dot;
    int corrections = 0;
    double residual_sup = 0.0;           // worst slice sup norm
    double residual_l2 = 0.0;            // worst slice L2 norm
    std::vector<double> slice_residual;  // per-slice sup norms

    std::vector<double> fine_times;
    std::vector<Eigen::Matrix4d> fine_n;
    std::vector<Eigen::Matrix4d> fine_omega;
    std::vector<EndMatrix2> fine_velocity; // descent velocity of the base path
    std::vector<TorusField> fine_f;
    std::vector<TorusField> fine_fdot;
};

struct AnsatzOptions {
    int n_slices = 401;     // uniform slow-time slices, odd so the center is a node
    int refine = 4;         // fine-grid factor for derivatives and the corrector
    double grad_tol = 1e-8; // endpoint gradient norm fixing the time truncation
    double t_floor = 1.0;   // half-width floor, for paths pinned at a critical point
    int grid_n = 64;
    double white_tol = 1e-10;
    unsigned threads = 0;
};

// Horizontal-lift ansatz along a descent path: polishes gamma's source
// endpoint onto its critical point, restarts just off the unstable direction,
// integrates the descent forward until the gradient norm settles below
// grad_tol, samples the lift uniformly in slow time, and hangs the White
// graph over every slice. Requires gamma.direction == +1 and |s| <= kWhiteSMax.
EternalFlowCandidate build_ansatz_flow(const AmbientFunction& u, const FlowPath& gamma,
                                       double s, const AnsatzOptions& opt = {});

// Residual of the flow equation  s < slice velocity, normal > + H  at one
// slice (by index, or at the slice nearest to slow time t). Zero residual
// means the slice family moves exactly by mean curvature in e^{2 s u} g.
TorusField mcf_operator_slice(const AmbientFunction& u, const EternalFlowCandidate& cand,
                              int slice);
TorusField mcf_operator(const AmbientFunction& u, const EternalFlowCandidate& cand, double t);

// recompute per-slice residual norms on a candidate assembled by hand
void refresh_residuals(const AmbientFunction& u, EternalFlowCandidate& cand,
                       unsigned threads = 0);

// One corrector pass: splits the residual into kernel and kernel-free parts,
// solves the bounded 4-dimensional flow equation for a base correction eta and
// the quasi-static mode equations for a graph correction, rebuilds the slices,
// and returns the improved candidate. Throws NoProgress unless the sup
// residual drops by at least 2x. s = 0 candidates return unchanged.
EternalFlowCandidate correct_ansatz(const AmbientFunction& u, const EternalFlowCandidate& cand,
                                    const AnsatzOptions& opt = {});

// Bounded quasi-static solution of s d(df)/dT = 2(2 - mu) df - rho per Fourier
// mode on a uniform slow-time grid of spacing ht, expanded to third order in
// s / lambda with sixth-order slow-time derivatives. Kernel modes (mu = 2) are
// dropped. This is the kernel-free half of correct_ansatz.
std::vector<TorusField> quasi_static_correction(const std::vector<TorusField>& rho,
                                                double s, double ht,
                                                unsigned threads = 0);

// exact evolution of the linearized graph flow df/dt = 2(Laplacian + 2) f:
// mode (m, k) is scaled by e^{2 (2 - m^2 - k^2) t}. f0 must be kernel-free.
TorusField linear_mcf_evolve(const TorusField& f0, double t);

// nonlinear graph flow velocity df/dt = -e^{-c} sqrt(Q) H(f) in e^{2 s u} g
// over the identity base torus
TorusField graph_mcf_velocity(const TorusField& f, const AmbientFunction& u, double s);

// implicit-explicit time stepping of the nonlinear graph flow: the flat
// linearization is treated spectrally implicitly, the remainder explicitly
TorusField graph_mcf_evolve(const TorusField& f0, const AmbientFunction& u, double s,
                            double t_final, double dt);

// Candidate dump: slice_%04d.csv per graph field plus manifest.json holding
// {s, times, base_matrices, residuals, ...}. read_candidate_summary restores
// the slice times, bases and fields (not the derivative caches).
void write_candidate(const EternalFlowCandidate& cand, const std::filesystem::path& dir);
EternalFlowCandidate read_candidate_summary(const std::filesystem::path& dir);

} // namespace cliffmorse
