#pragma once

#include "cliffmorse/flow.hpp"

#include <array>
#include <vector>

namespace cliffmorse {

struct ComplexOptions {
    double epsilon = 1e-4;    // radius of the sphere of starts around a critical point
    int circle_samples = 128; // initial samples on each unstable/stable circle
    int bisect_depth = 24;    // label bisection depth for wall isolation
    // acceptance cut on the closest approach to the claimed wall point; loose
    // because saddle passes are noise-floored, tight enough to stay inside one
    // basin (critical points sit ~0.4 apart, attribution also demands the
    // nearest rival be 1.5x further)
    double wall_radius = 0.15;
    unsigned threads = 0;
    FlowOptions flow;
};

// one isolated transition between basins on an eigen-circle around an index-2
// critical point; the bracketing angles survive for later refinement
struct WallCrossing {
    int owner = -1;     // index-2 critical point the circle belongs to
    int wall = -1;      // critical point the separating orbit runs through
    int direction = 1;  // +1 descent circle (walls have index 1), -1 ascent (index 3)
    double angle_lo = 0.0, angle_hi = 0.0;
    int label_lo = -1, label_hi = -1;
};

struct BoundaryCount {
    int from = -1; // higher Morse index end of the descent orbits
    int to = -1;
    int count = 0; // geometric count before mod-2 reduction
};

struct MorseComplexData {
    std::array<std::vector<int>, 5> cells; // critical point ids per Morse index
    // partial[k] maps C_k -> C_{k-1}; rows follow cells[k-1], cols follow cells[k]
    std::array<Eigen::MatrixXi, 5> partial; // [0] unused
    std::array<int, 5> betti{};
    bool d_squared_zero = false;
    int euler = 0;      // alternating sum of cell counts
    int unresolved = 0; // shots or walls that failed to resolve
    std::vector<WallCrossing> walls;
    std::vector<BoundaryCount> counts;
};

// rank over Z2 (entries taken mod 2)
int rank_mod2(Eigen::MatrixXi m);

// count descent orbits between critical points of adjacent Morse index by
// shooting from eigen-rays and eigen-circles, assemble the mod-2 boundary
// operator, verify d^2 = 0 and read off Betti numbers
MorseComplexData build_complex(const AreaFunctional& f, const CriticalSet& cs,
                               const ComplexOptions& opt = {});

// a sampled representative of one counted orbit; samples run in integration
// order, which is from -> to when direction = +1 and to -> from otherwise
struct ConnectingOrbit {
    int from = -1;
    int to = -1;
    int direction = 1;
    FlowPath path;
};

std::vector<ConnectingOrbit> connecting_orbits(const AreaFunctional& f, const CriticalSet& cs,
                                               const MorseComplexData& data,
                                               const ComplexOptions& opt = {});

} // namespace cliffmorse
