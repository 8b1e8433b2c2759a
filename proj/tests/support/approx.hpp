// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sonotrack/geometry.hpp"

#include <cmath>

namespace oracle {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool near(const sonotrack::Vec3& a, const sonotrack::Vec3& b, double tol)
{
    return near(a.x, b.x, tol) && near(a.y, b.y, tol) && near(a.z, b.z, tol);
}

} // namespace oracle
