#include <fwm/angular.hpp>

#include <cmath>
#include <string>

#include <gsl/gsl_sf_coupling.h>

#include <fwm/core.hpp>

namespace fwm::angular {

namespace {

int twice(double j)
{
    return static_cast<int>(std::lround(2.0 * j));
}

bool in_triangle(double a, double b, double c)
{
    return c >= std::abs(a - b) - 1e-9 && c <= a + b + 1e-9;
}

void require_projection(double j, double m, const char *what)
{
    if (!is_half_integer(j) || std::abs(2.0 * m - twice(m)) > 1e-9 ||
        std::abs(m) > j + 1e-9 || ((twice(j) - twice(m)) % 2) != 0) {
        throw DomainError(std::string("wigner_coupling: invalid projection for ") + what);
    }
}

} // namespace

bool is_half_integer(double j)
{
    return j >= 0.0 && std::abs(2.0 * j - std::round(2.0 * j)) < 1e-9;
}

double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3)
{
    return gsl_sf_coupling_3j(twice(j1), twice(j2), twice(j3), twice(m1), twice(m2),
                              twice(m3));
}

double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6)
{
    return gsl_sf_coupling_6j(twice(j1), twice(j2), twice(j3), twice(j4), twice(j5),
                              twice(j6));
}

double wigner_coupling(double F, double mF, double Fp, double mFp, double J, double Jp,
                       double I)
{
    for (double j : {F, Fp, J, Jp, I}) {
        if (!is_half_integer(j)) {
            throw DomainError("wigner_coupling: angular momenta must be non-negative half-integers");
        }
    }
    if (!in_triangle(J, I, F) || !in_triangle(Jp, I, Fp)) {
        throw DomainError("wigner_coupling: F or F' outside the J (x) I range");
    }
    require_projection(F, mF, "F");
    require_projection(Fp, mFp, "F'");

    const double q = mF - mFp;
    if (std::abs(q) > 1.0 + 1e-9 || !in_triangle(J, Jp, 1.0) || !in_triangle(F, Fp, 1.0)) {
        return 0.0;
    }

    // Wigner-Eckart: hyperfine reduced element from the fine-structure one
    const int phase_f = twice(Fp + J + 1.0 + I) / 2;
    const double reduced = ((phase_f % 2) ? -1.0 : 1.0) *
                           std::sqrt((2.0 * Fp + 1.0) * (2.0 * J + 1.0)) *
                           wigner_6j(J, Jp, 1.0, Fp, F, I);
    const int phase_m = twice(Fp - 1.0 + mF) / 2;
    const double angular = ((phase_m % 2) ? -1.0 : 1.0) * std::sqrt(2.0 * F + 1.0) *
                           wigner_3j(Fp, 1.0, F, mFp, q, -mF);

    const double norm = std::sqrt((2.0 * J + 1.0) / (2.0 * Jp + 1.0));
    return reduced * angular / norm;
}

} // namespace fwm::angular
