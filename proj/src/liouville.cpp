#include <fwm/liouville.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

namespace fwm::liouville {

namespace {

constexpr double projection_tolerance = 1e-9;
constexpr double kernel_threshold = 1e-10;
constexpr double pivot_threshold = 1e-12;

bool same_projection(double a, double b)
{
    return std::abs(a - b) < projection_tolerance;
}

int role_charge(FieldRole role)
{
    switch (role) {
    case FieldRole::probe1:
        return -1;
    case FieldRole::probe2:
        return 1;
    case FieldRole::control:
        break;
    }
    return 0;
}

double field_frequency(const FieldDrive &f, double delta, double velocity_shift)
{
    double w = f.frequency - f.direction * velocity_shift;
    if (f.role == FieldRole::probe1) {
        w -= delta;
    } else if (f.role == FieldRole::probe2) {
        w += delta;
    }
    return w;
}

struct Edge
{
    std::size_t to;
    double frequency; // theta_to - theta_from
    int charge;       // q_to - q_from
};

RotatingFrame solve_frame(const LevelScheme &scheme, const DriveAssignment &drives,
                          double delta, double velocity_shift)
{
    const std::size_t n = scheme.size();
    std::vector<std::vector<Edge>> adjacency(n);
    double scale = 1.0;
    for (const auto &field : drives.fields) {
        const double w = field_frequency(field, delta, velocity_shift);
        const int q = role_charge(field.role);
        scale = std::max(scale, std::abs(w));
        for (std::size_t c : field.couplings) {
            const auto &cp = scheme.couplings[c];
            adjacency[cp.lower].push_back({cp.upper, w, q});
            adjacency[cp.upper].push_back({cp.lower, -w, -q});
        }
    }
    for (const auto &s : scheme.states) {
        scale = std::max(scale, std::abs(s.energy));
    }
    const double tolerance = 1e-11 * scale;

    RotatingFrame frame;
    frame.offset.assign(n, 0.0);
    frame.charge.assign(n, 0);
    std::vector<int> component(n, -1);
    int components = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (component[root] >= 0) {
            continue;
        }
        component[root] = components;
        frame.offset[root] = scheme.states[root].energy;
        std::deque<std::size_t> queue{root};
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (const auto &e : adjacency[u]) {
                const double offset = frame.offset[u] + e.frequency;
                const int charge = frame.charge[u] + e.charge;
                if (component[e.to] < 0) {
                    component[e.to] = components;
                    frame.offset[e.to] = offset;
                    frame.charge[e.to] = charge;
                    queue.push_back(e.to);
                } else if (std::abs(frame.offset[e.to] - offset) > tolerance ||
                           frame.charge[e.to] != charge) {
                    throw ConfigurationError(
                        "rotating frame is not closed: state '" + scheme.states[e.to].label +
                        "' is reached with inconsistent field frequencies");
                }
            }
        }
        ++components;
    }

    if (drives.fwm_closure) {
        std::vector<int> probe1_components;
        std::vector<int> probe2_components;
        for (const auto &field : drives.fields) {
            auto &target = field.role == FieldRole::probe1 ? probe1_components : probe2_components;
            if (field.role == FieldRole::control) {
                continue;
            }
            for (std::size_t c : field.couplings) {
                target.push_back(component[scheme.couplings[c].lower]);
            }
        }
        const bool closed = std::any_of(probe1_components.begin(), probe1_components.end(),
                                        [&](int c) {
                                            return std::find(probe2_components.begin(),
                                                             probe2_components.end(),
                                                             c) != probe2_components.end();
                                        });
        if (!closed) {
            throw ConfigurationError(
                "mixing loop is open: the two probes address disconnected manifolds");
        }
    }
    return frame;
}

std::size_t first_population(std::span<const Element> basis)
{
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (basis[k].row == basis[k].col) {
            return k;
        }
    }
    throw NumericalError("steady state sector contains no population");
}

Eigen::VectorXcd gather(const Eigen::MatrixXcd &m, std::span<const Element> basis)
{
    Eigen::VectorXcd v(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        v(static_cast<Eigen::Index>(k)) =
            m(static_cast<Eigen::Index>(basis[k].row), static_cast<Eigen::Index>(basis[k].col));
    }
    return v;
}

Eigen::MatrixXcd scatter(const Eigen::VectorXcd &v, std::span<const Element> basis,
                         std::size_t n)
{
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(size, size);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        m(static_cast<Eigen::Index>(basis[k].row), static_cast<Eigen::Index>(basis[k].col)) =
            v(static_cast<Eigen::Index>(k));
    }
    return m;
}

double scaled_min_pivot(const Eigen::PartialPivLU<Eigen::MatrixXcd> &lu)
{
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    const double largest = diag.maxCoeff();
    return largest > 0.0 ? diag.minCoeff() / largest : 0.0;
}

/// Rows, then columns, scaled to unit max-abs entry (zero lines left as they are).
Eigen::MatrixXcd equilibrated(Eigen::MatrixXcd m)
{
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double s = m.row(i).cwiseAbs().maxCoeff();
        if (s > 0.0) {
            m.row(i) /= s;
        }
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double s = m.col(j).cwiseAbs().maxCoeff();
        if (s > 0.0) {
            m.col(j) /= s;
        }
    }
    return m;
}

std::vector<Element> remove_neglected(std::vector<Element> basis, const ProbeSpec &probe)
{
    if (probe.neglected_coherences.empty()) {
        return basis;
    }
    std::erase_if(basis, [&](const Element &e) {
        return std::any_of(probe.neglected_coherences.begin(),
                           probe.neglected_coherences.end(), [&](const auto &pair) {
                               return (e.row == pair.first && e.col == pair.second) ||
                                      (e.row == pair.second && e.col == pair.first);
                           });
    });
    return basis;
}

} // namespace

double LevelScheme::total_decay(std::size_t state) const
{
    double total = 0.0;
    for (const auto &d : decays) {
        if (d.upper == state) {
            total += d.rate;
        }
    }
    return total;
}

std::vector<std::size_t> LevelScheme::manifold_states(const std::string &manifold) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].manifold == manifold) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> LevelScheme::couplings_between(const std::string &lower_manifold,
                                                        const std::string &upper_manifold) const
{
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < couplings.size(); ++c) {
        if (states[couplings[c].lower].manifold == lower_manifold &&
            states[couplings[c].upper].manifold == upper_manifold) {
            out.push_back(c);
        }
    }
    return out;
}

void LevelScheme::add_dephasing(const std::string &manifold_a, const std::string &manifold_b,
                                double rate)
{
    for (std::size_t i : manifold_states(manifold_a)) {
        for (std::size_t j : manifold_states(manifold_b)) {
            if (i != j) {
                dephasing.push_back({i, j, rate});
            }
        }
    }
}

void LevelScheme::add_optical_dephasing(double rate)
{
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = 0; j < states.size(); ++j) {
            if (!states[i].excited && states[j].excited) {
                dephasing.push_back({i, j, rate});
            }
        }
    }
}

void LevelScheme::validate() const
{
    const std::size_t n = states.size();
    if (n == 0) {
        throw ConfigurationError("level scheme has no states");
    }
    for (const auto &s : states) {
        if (!std::isfinite(s.energy)) {
            throw ConfigurationError("state '" + s.label + "' has a non-finite energy");
        }
    }
    for (const auto &c : couplings) {
        if (c.lower >= n || c.upper >= n) {
            throw ConfigurationError("dipole coupling refers to a missing state");
        }
        if (states[c.lower].excited || !states[c.upper].excited) {
            throw ConfigurationError("dipole coupling " + states[c.lower].label + " -> " +
                                     states[c.upper].label +
                                     " does not join a ground to an excited state");
        }
        if (!std::isfinite(c.strength)) {
            throw ConfigurationError("dipole coupling strength is not finite");
        }
    }
    for (const auto &d : decays) {
        if (d.upper >= n || d.lower >= n || d.upper == d.lower) {
            throw ConfigurationError("decay channel refers to a missing or identical state");
        }
        if (!(d.rate >= 0.0) || !std::isfinite(d.rate)) {
            throw ConfigurationError("decay rates must be finite and non-negative");
        }
    }
    for (const auto &d : dephasing) {
        if (d.first >= n || d.second >= n || d.first == d.second) {
            throw ConfigurationError("dephasing refers to a missing or identical state");
        }
        if (!(d.rate >= 0.0) || !std::isfinite(d.rate)) {
            throw ConfigurationError("dephasing rates must be finite and non-negative");
        }
    }
}

std::string to_string(FieldRole role)
{
    switch (role) {
    case FieldRole::control:
        return "control";
    case FieldRole::probe1:
        return "probe1";
    case FieldRole::probe2:
        return "probe2";
    }
    return "control";
}

FieldRole field_role_from_string(const std::string &name)
{
    if (name == "control") {
        return FieldRole::control;
    }
    if (name == "probe1") {
        return FieldRole::probe1;
    }
    if (name == "probe2") {
        return FieldRole::probe2;
    }
    throw ConfigurationError("unknown field role '" + name + "'");
}

void DriveAssignment::validate(const LevelScheme &scheme) const
{
    std::vector<int> owner(scheme.couplings.size(), 0);
    int probe1 = 0;
    int probe2 = 0;
    for (const auto &f : fields) {
        if (!std::isfinite(f.frequency) || !std::isfinite(f.rabi) || f.rabi < 0.0) {
            throw ConfigurationError("field '" + f.name + "' has an invalid frequency or Rabi amplitude");
        }
        if (f.direction != 1 && f.direction != -1) {
            throw ConfigurationError("field '" + f.name + "' direction must be +1 or -1");
        }
        for (std::size_t c : f.couplings) {
            if (c >= scheme.couplings.size()) {
                throw ConfigurationError("field '" + f.name + "' addresses a missing coupling");
            }
            if (owner[c]++ > 0) {
                throw ConfigurationError("coupling addressed by more than one field");
            }
        }
        probe1 += f.role == FieldRole::probe1;
        probe2 += f.role == FieldRole::probe2;
        if (f.role != FieldRole::control && f.couplings.empty()) {
            throw ConfigurationError("probe field '" + f.name + "' addresses no coupling");
        }
    }
    if (probe1 > 1 || probe2 > 1) {
        throw ConfigurationError("at most one field per probe role");
    }
    if (fwm_closure && (probe1 != 1 || probe2 != 1)) {
        throw ConfigurationError("mixing closure needs exactly one probe of each role");
    }
}

Generator::Generator(const LevelScheme &scheme, const DriveAssignment &drives, double delta,
                     double velocity_shift)
{
    scheme.validate();
    drives.validate(scheme);
    m_size = scheme.size();
    m_frame = solve_frame(scheme, drives, delta, velocity_shift);

    const auto n = static_cast<Eigen::Index>(m_size);
    m_hamiltonian = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t j = 0; j < m_size; ++j) {
        m_hamiltonian(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
            scheme.states[j].energy - m_frame.offset[j];
        m_mF.push_back(scheme.states[j].mF);
    }
    for (const auto &field : drives.fields) {
        for (std::size_t c : field.couplings) {
            const auto &cp = scheme.couplings[c];
            if (!same_projection(scheme.states[cp.lower].mF, scheme.states[cp.upper].mF)) {
                m_pi_only = false;
            }
            switch (field.role) {
            case FieldRole::control: {
                const auto g = static_cast<Eigen::Index>(cp.lower);
                const auto e = static_cast<Eigen::Index>(cp.upper);
                m_hamiltonian(e, g) -= field.rabi * cp.strength;
                m_hamiltonian(g, e) -= field.rabi * cp.strength;
                break;
            }
            case FieldRole::probe1:
                m_probe1.emplace_back(cp.lower, cp.upper);
                m_probe1_strength.push_back(cp.strength);
                break;
            case FieldRole::probe2:
                m_probe2.emplace_back(cp.lower, cp.upper);
                m_probe2_strength.push_back(cp.strength);
                break;
            }
        }
    }

    m_decays = scheme.decays;
    m_out_rate.assign(m_size, 0.0);
    for (const auto &d : m_decays) {
        m_out_rate[d.upper] += d.rate;
    }
    m_dephasing = Eigen::MatrixXd::Zero(n, n);
    for (const auto &d : scheme.dephasing) {
        m_dephasing(static_cast<Eigen::Index>(d.first), static_cast<Eigen::Index>(d.second)) +=
            d.rate;
        m_dephasing(static_cast<Eigen::Index>(d.second), static_cast<Eigen::Index>(d.first)) +=
            d.rate;
    }
}

Eigen::MatrixXcd Generator::apply(const Eigen::MatrixXcd &rho) const
{
    Eigen::MatrixXcd out = -I * (m_hamiltonian * rho - rho * m_hamiltonian);
    const auto n = static_cast<Eigen::Index>(m_size);
    for (const auto &d : m_decays) {
        const auto u = static_cast<Eigen::Index>(d.upper);
        const auto l = static_cast<Eigen::Index>(d.lower);
        out(l, l) += d.rate * rho(u, u);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double damping = 0.5 * (m_out_rate[static_cast<std::size_t>(i)] +
                                          m_out_rate[static_cast<std::size_t>(j)]) +
                                   m_dephasing(i, j);
            out(i, j) -= damping * rho(i, j);
        }
    }
    return out;
}

void Generator::add_action(std::size_t k, std::size_t l,
                           std::vector<std::pair<Element, complex>> &out) const
{
    const auto n = static_cast<Eigen::Index>(m_size);
    const auto ki = static_cast<Eigen::Index>(k);
    const auto li = static_cast<Eigen::Index>(l);
    // -i (H |k><l| - |k><l| H)
    for (Eigen::Index m = 0; m < n; ++m) {
        const complex hmk = m_hamiltonian(m, ki);
        if (hmk != 0.0) {
            out.push_back({{static_cast<std::size_t>(m), l}, -I * hmk});
        }
        const complex hlm = m_hamiltonian(li, m);
        if (hlm != 0.0) {
            out.push_back({{k, static_cast<std::size_t>(m)}, I * hlm});
        }
    }
    if (k == l) {
        for (const auto &d : m_decays) {
            if (d.upper == k && d.rate != 0.0) {
                out.push_back({{d.lower, d.lower}, d.rate});
            }
        }
    }
    const double damping = 0.5 * (m_out_rate[k] + m_out_rate[l]) + m_dephasing(ki, li);
    if (damping != 0.0) {
        out.push_back({{k, l}, -damping});
    }
}

Eigen::MatrixXcd Generator::restricted(std::span<const Element> basis) const
{
    std::vector<std::ptrdiff_t> index(m_size * m_size, -1);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        index[basis[k].row * m_size + basis[k].col] = static_cast<std::ptrdiff_t>(k);
    }
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<std::pair<Element, complex>> action;
    for (std::size_t c = 0; c < basis.size(); ++c) {
        action.clear();
        add_action(basis[c].row, basis[c].col, action);
        for (const auto &[element, value] : action) {
            const auto r = index[element.row * m_size + element.col];
            // elements outside the basis are either zero by symmetry or neglected
            if (r >= 0) {
                L(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) += value;
            }
        }
    }
    return L;
}

std::vector<Element> Generator::full_basis() const
{
    std::vector<Element> out;
    out.reserve(m_size * m_size);
    for (std::size_t i = 0; i < m_size; ++i) {
        for (std::size_t j = 0; j < m_size; ++j) {
            out.push_back({i, j});
        }
    }
    return out;
}

std::vector<Element> Generator::sector(int charge_difference) const
{
    std::vector<Element> out;
    for (std::size_t i = 0; i < m_size; ++i) {
        for (std::size_t j = 0; j < m_size; ++j) {
            if (m_frame.charge[i] - m_frame.charge[j] != charge_difference) {
                continue;
            }
            if (m_pi_only && !same_projection(m_mF[i], m_mF[j])) {
                continue;
            }
            out.push_back({i, j});
        }
    }
    return out;
}

Eigen::MatrixXcd Generator::probe1_source(const Eigen::MatrixXcd &rho) const
{
    const auto n = static_cast<Eigen::Index>(m_size);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t t = 0; t < m_probe1.size(); ++t) {
        h(static_cast<Eigen::Index>(m_probe1[t].second),
          static_cast<Eigen::Index>(m_probe1[t].first)) -= m_probe1_strength[t];
    }
    return -I * (h * rho - rho * h);
}

Eigen::MatrixXcd Generator::probe2_conjugate_source(const Eigen::MatrixXcd &rho) const
{
    const auto n = static_cast<Eigen::Index>(m_size);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t t = 0; t < m_probe2.size(); ++t) {
        h(static_cast<Eigen::Index>(m_probe2[t].first),
          static_cast<Eigen::Index>(m_probe2[t].second)) -= m_probe2_strength[t];
    }
    return -I * (h * rho - rho * h);
}

Generator build_rotating_frame_generator(const LevelScheme &scheme,
                                         const DriveAssignment &drives, double delta,
                                         double velocity_shift)
{
    return Generator(scheme, drives, delta, velocity_shift);
}

double SteadyState::hermiticity_error() const
{
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double SteadyState::min_eigenvalue() const
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (rho + rho.adjoint()),
                                                           Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

NonUniqueSteadyState::NonUniqueSteadyState(std::size_t kernel_dimension)
    : NumericalError("non-unique steady state: generator kernel has dimension " +
                     std::to_string(kernel_dimension)),
      m_kernel_dimension(kernel_dimension)
{
}

SteadyState steady_state(const Generator &generator, Decomposition mode)
{
    const std::vector<Element> basis =
        mode == Decomposition::sector ? generator.sector(0) : generator.full_basis();
    Eigen::MatrixXcd L = generator.restricted(basis);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(equilibrated(L));
    qr.setThreshold(kernel_threshold);
    const auto kernel = static_cast<std::size_t>(L.cols() - qr.rank());
    if (kernel != 1) {
        throw NonUniqueSteadyState(kernel);
    }

    const double norm = L.norm();
    const std::size_t trace_row = first_population(basis);
    Eigen::MatrixXcd A = L;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(L.rows());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        A(static_cast<Eigen::Index>(trace_row), static_cast<Eigen::Index>(k)) =
            basis[k].row == basis[k].col ? 1.0 : 0.0;
    }
    b(static_cast<Eigen::Index>(trace_row)) = 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const Eigen::VectorXcd x = lu.solve(b);

    SteadyState out;
    out.rho = scatter(x, basis, generator.size());
    out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
    out.generator_norm = norm;
    out.residual = (L * gather(out.rho, basis)).norm();
    if (!(out.residual < 1e-10 * norm)) {
        throw NumericalError("steady state residual " + std::to_string(out.residual) +
                             " exceeds tolerance");
    }
    return out;
}

namespace {

constexpr int response_sector = -1;

/// First-order system A x = rhs and the linear readout of the probe coherences.
struct ResponseSystem
{
    std::vector<Element> basis;
    Eigen::MatrixXcd matrix;
    Eigen::MatrixXcd rhs;
    Eigen::VectorXd probe1_readout;
    Eigen::VectorXd probe2_readout;
};

ResponseSystem response_system(const Generator &generator, const SteadyState &state,
                               const ProbeSpec &probe, Decomposition mode)
{
    ResponseSystem sys;
    sys.basis = remove_neglected(mode == Decomposition::sector
                                     ? generator.sector(response_sector)
                                     : generator.full_basis(),
                                 probe);
    sys.matrix = generator.restricted(sys.basis);
    const auto dim = sys.matrix.rows();
    sys.rhs.resize(dim, 2);
    sys.rhs.col(0) = -gather(generator.probe1_source(state.rho), sys.basis);
    sys.rhs.col(1) = -gather(generator.probe2_conjugate_source(state.rho), sys.basis);

    if (mode == Decomposition::full) {
        // the full generator is singular along the steady state; pin trace(X) = 0
        const std::size_t row = first_population(sys.basis);
        for (std::size_t k = 0; k < sys.basis.size(); ++k) {
            sys.matrix(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k)) =
                sys.basis[k].row == sys.basis[k].col ? 1.0 : 0.0;
        }
        sys.rhs.row(static_cast<Eigen::Index>(row)).setZero();
    }

    const std::size_t n = generator.size();
    std::vector<std::ptrdiff_t> index(n * n, -1);
    for (std::size_t k = 0; k < sys.basis.size(); ++k) {
        index[sys.basis[k].row * n + sys.basis[k].col] = static_cast<std::ptrdiff_t>(k);
    }
    const double scale = probe.density * probe.reference_dipole * probe.reference_dipole /
                         (2.0 * constants::hbar);
    sys.probe1_readout = Eigen::VectorXd::Zero(dim);
    sys.probe2_readout = Eigen::VectorXd::Zero(dim);
    const auto &p1 = generator.probe1_transitions();
    for (std::size_t t = 0; t < p1.size(); ++t) {
        const auto k = index[p1[t].second * n + p1[t].first]; // rho_eg
        if (k >= 0) {
            sys.probe1_readout(k) += scale * generator.probe1_strengths()[t];
        }
    }
    const auto &p2 = generator.probe2_transitions();
    for (std::size_t t = 0; t < p2.size(); ++t) {
        const auto k = index[p2[t].first * n + p2[t].second]; // rho_ge
        if (k >= 0) {
            sys.probe2_readout(k) += scale * generator.probe2_strengths()[t];
        }
    }
    return sys;
}

SusceptibilityMatrix solve_response(const ResponseSystem &sys, const Eigen::MatrixXcd &A)
{
    if (A.rows() == 0) {
        return {};
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    if (scaled_min_pivot(lu) < pivot_threshold) {
        throw NumericalError("first-order response system is singular");
    }
    const Eigen::MatrixXcd x = lu.solve(sys.rhs);
    // x.col(0): response to alpha_1, x.col(1): response to alpha_2^*
    SusceptibilityMatrix chi;
    chi.chi11 = sys.probe1_readout.cast<complex>().dot(x.col(0));
    chi.chi12 = sys.probe1_readout.cast<complex>().dot(x.col(1));
    chi.chi22 = std::conj(sys.probe2_readout.cast<complex>().dot(x.col(1)));
    chi.chi21 = std::conj(sys.probe2_readout.cast<complex>().dot(x.col(0)));
    return chi;
}

} // namespace

SusceptibilityMatrix linear_response(const Generator &generator, const SteadyState &state,
                                     const ProbeSpec &probe, Decomposition mode)
{
    const ResponseSystem sys = response_system(generator, state, probe, mode);
    return solve_response(sys, sys.matrix);
}

std::vector<ResponsePoint> linear_response_susceptibilities(
    const LevelScheme &scheme, const DriveAssignment &drives, const ProbeSpec &probe,
    std::span<const double> deltas, double velocity_shift, Decomposition mode)
{
    std::vector<ResponsePoint> out;
    out.reserve(deltas.size());
    if (deltas.empty()) {
        return out;
    }
    const double delta0 = deltas.front();
    const Generator reference(scheme, drives, delta0, velocity_shift);
    const SteadyState state = steady_state(reference, mode);
    // In the response sector the detuning only enters as i * charge * delta on the diagonal.
    const ResponseSystem sys = response_system(reference, state, probe, mode);
    const auto identity = Eigen::MatrixXcd::Identity(sys.matrix.rows(), sys.matrix.cols());
    for (double delta : deltas) {
        ResponsePoint point;
        point.delta = delta;
        try {
            if (mode == Decomposition::sector) {
                const complex shift = I * static_cast<double>(response_sector) * (delta - delta0);
                point.chi = solve_response(sys, sys.matrix + shift * identity);
            } else {
                const Generator generator(scheme, drives, delta, velocity_shift);
                point.chi = linear_response(generator, state, probe, mode);
            }
            if (!point.chi.finite()) {
                throw NumericalError("non-finite susceptibility");
            }
        } catch (const NumericalError &e) {
            point.ok = false;
            point.error = e.what();
            point.chi = {};
        }
        out.push_back(point);
    }
    return out;
}

} // namespace fwm::liouville
