#include "hetnet/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace hetnet::numerics {

namespace {

// Sum of 2F1(1, b; c; z) for |z| < 1, plain term recurrence.
double series_1bc(double b, double c, double z) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 500; ++n) {
        term *= (b + n) / (c + n) * z;
        sum += term;
        if (std::abs(term) <= 0.5 * std::numeric_limits<double>::epsilon() * std::abs(sum))
            return sum;
    }
    throw std::runtime_error("gauss_2f1: series failed to converge");
}

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

}  // namespace

double gauss_2f1(double b, double c, double z) {
    if (!(c > b) || !(b > 0.0))
        throw std::invalid_argument("gauss_2f1: requires c > b > 0");
    if (z > 0.0)
        throw std::domain_error("gauss_2f1: requires z <= 0");
    if (z == 0.0) return 1.0;
    if (z > -0.5) return series_1bc(b, c, z);
    if (z > -2.0) {
        // Pfaff: F(1,b;c;z) = (1-z)^-1 F(1, c-b; c; z/(z-1)).
        return series_1bc(c - b, c, z / (z - 1.0)) / (1.0 - z);
    }
    // DLMF 15.8.2 with a = 1: expand around 1/z, which lies in (-0.5, 0).
    // The coefficients have poles at integer b (and at c = 1); those fall
    // outside the supported branch.
    if ((b >= 1.0 && near_integer(b)) || near_integer(c - 1.0))
        throw std::domain_error(
            "gauss_2f1: z < -2 requires non-integer b and c != 1 (argument "
            "inversion would hit a Gamma pole)");
    const double inv = 1.0 / z;
    const double a1 = std::tgamma(c) * std::tgamma(b - 1.0) /
                      (std::tgamma(b) * std::tgamma(c - 1.0));
    const double a2 = std::tgamma(c) * std::tgamma(1.0 - b) / std::tgamma(c - b);
    const double term1 = a1 * (-inv) * series_1bc(2.0 - c, 2.0 - b, inv);
    const double term2 = a2 * std::pow(-z, -b) * std::pow(1.0 - inv, c - b - 1.0);
    return term1 + term2;
}

}  // namespace hetnet::numerics
