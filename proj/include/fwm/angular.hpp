#ifndef FWM_ANGULAR_HPP
#define FWM_ANGULAR_HPP

/**
 * Angular-momentum recoupling for hyperfine dipole matrix elements.
 * All quantum numbers are passed as (half-)integers stored in doubles.
 */
namespace fwm::angular {

/// True when 2 * j is (numerically) an integer and j >= 0.
bool is_half_integer(double j);

double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3);

double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6);

/**
 * Relative dipole strength <F mF | d_q | F' mF'> / mu_ref between a ground
 * hyperfine sublevel (J, F, mF) and an excited one (J', F', mF'), with
 * q = mF - mF'. Normalised so that the squared strengths out of any fixed
 * excited sublevel, summed over every ground sublevel, equal one.
 * Returns zero when dipole selection rules forbid the transition; throws
 * DomainError when the quantum numbers themselves are invalid.
 */
double wigner_coupling(double F, double mF, double Fp, double mFp, double J, double Jp,
                       double I);

} // namespace fwm::angular

#endif
