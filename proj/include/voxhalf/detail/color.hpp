#pragma once

#include <cmath>

namespace voxhalf::detail {

// IEC 61966-2-1 sRGB transfer curve, both directions, on [0,1].
inline double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double c) {
    return c <= 0.0031308 ? c * 12.92 : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

}  // namespace voxhalf::detail
