#ifndef FWM_LIOUVILLE_HPP
#define FWM_LIOUVILLE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include <fwm/core.hpp>

/**
 * Driven multilevel atom: rotating-frame Lindblad generator, control-only
 * steady state and first-order probe response.
 *
 * Energies and field frequencies share one arbitrary reference (only their
 * differences enter), all in rad/s. Rabi frequencies are quoted for the
 * reference dipole mu, i.e. Omega = mu E / (2 hbar); the actual coupling
 * of a transition is Omega times its relative strength.
 */
namespace fwm::liouville {

struct AtomicState
{
    std::string label;
    std::string manifold;
    double energy = 0.0; // rad/s
    double F = 0.0;
    double mF = 0.0;
    bool excited = false;

    bool operator==(const AtomicState &) const = default;
};

struct DipoleCoupling
{
    std::size_t lower = 0;
    std::size_t upper = 0;
    double strength = 0.0; // relative to the reference dipole

    bool operator==(const DipoleCoupling &) const = default;
};

/// Incoherent population transfer from `upper` to `lower`.
struct DecayChannel
{
    std::size_t upper = 0;
    std::size_t lower = 0;
    double rate = 0.0; // rad/s

    bool operator==(const DecayChannel &) const = default;
};

/// Extra decay of the coherence between two states.
struct Dephasing
{
    std::size_t first = 0;
    std::size_t second = 0;
    double rate = 0.0; // rad/s

    bool operator==(const Dephasing &) const = default;
};

struct LevelScheme
{
    std::vector<AtomicState> states;
    std::vector<DipoleCoupling> couplings;
    std::vector<DecayChannel> decays;
    std::vector<Dephasing> dephasing;

    std::size_t size() const { return states.size(); }
    double total_decay(std::size_t state) const;
    std::vector<std::size_t> manifold_states(const std::string &manifold) const;
    std::vector<std::size_t> couplings_between(const std::string &lower_manifold,
                                               const std::string &upper_manifold) const;
    /// Adds `rate` to every coherence between the two manifolds.
    void add_dephasing(const std::string &manifold_a, const std::string &manifold_b,
                       double rate);
    /// Adds `rate` to every ground-excited coherence.
    void add_optical_dephasing(double rate);

    /// Throws ConfigurationError on a broken invariant.
    void validate() const;

    bool operator==(const LevelScheme &) const = default;
};

enum class FieldRole { control, probe1, probe2 };

std::string to_string(FieldRole role);
FieldRole field_role_from_string(const std::string &name);

/**
 * One monochromatic field. Probe frequencies are given at zero probe
 * detuning: probe 1 runs at frequency - delta, probe 2 at frequency + delta,
 * so the sum of the probe frequencies stays fixed.
 */
struct FieldDrive
{
    std::string name;
    FieldRole role = FieldRole::control;
    double frequency = 0.0; // rad/s
    double rabi = 0.0;      // rad/s, controls only
    int direction = 1;      // wavevector sign along z
    std::vector<std::size_t> couplings;

    bool operator==(const FieldDrive &) const = default;
};

struct DriveAssignment
{
    std::vector<FieldDrive> fields;
    /// Require both probes and a closed mixing loop.
    bool fwm_closure = true;

    void validate(const LevelScheme &scheme) const;
    bool operator==(const DriveAssignment &) const = default;
};

/**
 * Rotating frame theta_j = offset_j + charge_j * nu. The frame is static
 * (nu = 0); the charge counts probe quanta and labels the sector a density
 * matrix element belongs to.
 */
struct RotatingFrame
{
    std::vector<double> offset;
    std::vector<int> charge;
};

/// Index pair (row, col) of a density-matrix element.
struct Element
{
    std::size_t row = 0;
    std::size_t col = 0;
    bool operator==(const Element &) const = default;
};

enum class Decomposition { sector, full };

class Generator
{
public:
    Generator(const LevelScheme &scheme, const DriveAssignment &drives, double delta,
              double velocity_shift = 0.0);

    std::size_t size() const { return m_size; }
    const Eigen::MatrixXcd &hamiltonian() const { return m_hamiltonian; }
    const RotatingFrame &frame() const { return m_frame; }

    /// d rho / dt for a full density matrix.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd &rho) const;

    /// Superoperator restricted to `basis` (column k = action on basis[k]).
    Eigen::MatrixXcd restricted(std::span<const Element> basis) const;

    std::vector<Element> full_basis() const;
    /// Elements with charge_row - charge_col == charge_difference (and equal
    /// mF when every coupling is pi-polarised).
    std::vector<Element> sector(int charge_difference) const;
    bool conserves_projection() const { return m_pi_only; }

    /// -i [H_probe, rho] for unit probe-1 amplitude alpha_1.
    Eigen::MatrixXcd probe1_source(const Eigen::MatrixXcd &rho) const;
    /// -i [H_probe, rho] for unit conjugate probe-2 amplitude alpha_2^*.
    Eigen::MatrixXcd probe2_conjugate_source(const Eigen::MatrixXcd &rho) const;

    const std::vector<std::pair<std::size_t, std::size_t>> &probe1_transitions() const
    {
        return m_probe1;
    }
    const std::vector<double> &probe1_strengths() const { return m_probe1_strength; }
    const std::vector<std::pair<std::size_t, std::size_t>> &probe2_transitions() const
    {
        return m_probe2;
    }
    const std::vector<double> &probe2_strengths() const { return m_probe2_strength; }

private:
    void add_action(std::size_t k, std::size_t l,
                    std::vector<std::pair<Element, complex>> &out) const;

    std::size_t m_size = 0;
    Eigen::MatrixXcd m_hamiltonian;
    RotatingFrame m_frame;
    std::vector<double> m_mF;
    std::vector<DecayChannel> m_decays;
    std::vector<double> m_out_rate;
    Eigen::MatrixXd m_dephasing;
    bool m_pi_only = true;
    // (ground, excited) pairs addressed by the probes
    std::vector<std::pair<std::size_t, std::size_t>> m_probe1;
    std::vector<double> m_probe1_strength;
    std::vector<std::pair<std::size_t, std::size_t>> m_probe2;
    std::vector<double> m_probe2_strength;
};

/// Co-rotating generator at probe detuning delta; throws ConfigurationError
/// when the fields admit no consistent frame.
Generator build_rotating_frame_generator(const LevelScheme &scheme,
                                         const DriveAssignment &drives, double delta,
                                         double velocity_shift = 0.0);

struct SteadyState
{
    Eigen::MatrixXcd rho;
    double residual = 0.0;
    double generator_norm = 0.0;

    complex trace() const { return rho.trace(); }
    double hermiticity_error() const;
    double min_eigenvalue() const;
};

class NonUniqueSteadyState : public NumericalError
{
public:
    NonUniqueSteadyState(std::size_t kernel_dimension);
    std::size_t kernel_dimension() const { return m_kernel_dimension; }

private:
    std::size_t m_kernel_dimension;
};

SteadyState steady_state(const Generator &generator,
                         Decomposition mode = Decomposition::sector);

struct ProbeSpec
{
    double density = 0.0;          // atoms / cm^3
    double reference_dipole = 0.0; // esu cm
    /// State pairs whose coherence is held at zero in first order.
    std::vector<std::pair<std::size_t, std::size_t>> neglected_coherences;
};

struct ResponsePoint
{
    double delta = 0.0;
    SusceptibilityMatrix chi;
    bool ok = true;
    std::string error;
};

/// First-order susceptibilities around a given control-only steady state.
SusceptibilityMatrix linear_response(const Generator &generator, const SteadyState &state,
                                     const ProbeSpec &probe,
                                     Decomposition mode = Decomposition::sector);

/**
 * Susceptibilities over a detuning grid. The control-only steady state
 * does not depend on the probe detuning (equal-charge frame offsets are
 * detuning independent), so it is solved once.
 */
std::vector<ResponsePoint> linear_response_susceptibilities(
    const LevelScheme &scheme, const DriveAssignment &drives, const ProbeSpec &probe,
    std::span<const double> deltas, double velocity_shift = 0.0,
    Decomposition mode = Decomposition::sector);

} // namespace fwm::liouville

#endif
