#pragma once

#include <vector>

namespace cliffmorse::detail {

// sixth-order first derivative on a uniform grid, one-sided near the edges
template <class T>
T deriv6(const std::vector<T>& v, int i, double h) {
    const int n = static_cast<int>(v.size());
    const auto at = [&](int k) -> const T& { return v[k]; };
    if (i >= 3 && i + 3 < n) {
        return (1.0 / h) * ((-1.0 / 60) * at(i - 3) + (3.0 / 20) * at(i - 2) +
                            (-3.0 / 4) * at(i - 1) + (3.0 / 4) * at(i + 1) +
                            (-3.0 / 20) * at(i + 2) + (1.0 / 60) * at(i + 3));
    }
    static const double edge[3][7] = {
        {-49.0 / 20, 6.0, -15.0 / 2, 20.0 / 3, -15.0 / 4, 6.0 / 5, -1.0 / 6},
        {-1.0 / 6, -77.0 / 60, 5.0 / 2, -5.0 / 3, 5.0 / 6, -1.0 / 4, 1.0 / 30},
        {1.0 / 30, -2.0 / 5, -7.0 / 12, 4.0 / 3, -1.0 / 2, 2.0 / 15, -1.0 / 60}};
    if (i < 3) {
        T acc = edge[i][0] * at(0);
        for (int k = 1; k < 7; ++k) acc += edge[i][k] * at(k);
        return (1.0 / h) * acc;
    }
    const int j = n - 1 - i; // mirrored right edge, flipped sign
    T acc = -edge[j][0] * at(n - 1);
    for (int k = 1; k < 7; ++k) acc += -edge[j][k] * at(n - 1 - k);
    return (1.0 / h) * acc;
}

} // namespace cliffmorse::detail
