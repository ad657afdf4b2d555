#pragma once

#include "cliffmorse/end2.hpp"

#include <vector>

namespace cliffmorse {

// Shape of { psi_A = 0 } on the torus. Generic A gives two disjoint closed
// curves winding once in theta; Special means the zero set degenerates to two
// intersecting diagonal circles (A proportional to an orthogonal matrix up to
// sign split); Singular means det A = 0 and whole coordinate circles vanish.
enum class ZeroSetKind { Generic, Special, Singular };

struct ZeroSetSample {
    double theta;
    double phi;
};

struct ZeroSet {
    ZeroSetKind kind = ZeroSetKind::Generic;
    std::vector<ZeroSetSample> samples;
};

// classify and sample the zero set of psi_A; n_theta sweep positions
ZeroSet zero_set(const EndMatrix2& a, int n_theta);

// minimum over the sampled zero set of |psi_B - (dpsi_A/dtheta)^2 + (dpsi_A/dphi)^2|,
// the quantity controlling whether a second-order deformation can keep the
// curve's graph property
struct ObstructionReport {
    double min_abs = 0.0;
    ZeroSetSample argmin{0.0, 0.0};
    std::vector<double> values; // aligned with the zero-set samples
};
ObstructionReport second_derivative_obstruction(const EndMatrix2& a, const EndMatrix2& b,
                                                int n_theta);

} // namespace cliffmorse
