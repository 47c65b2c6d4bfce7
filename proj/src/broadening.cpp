#include <fwm/broadening.hpp>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace fwm::broadening {

namespace {

constexpr double branch_switch = 336.8; // K

std::vector<complex> average_with(const GaussHermiteRule &rule, double width,
                                  const std::function<std::vector<complex>(double)> &spectrum)
{
    std::vector<complex> sum;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const std::vector<complex> v = spectrum(width * rule.nodes[i]);
        if (sum.empty()) {
            sum.assign(v.size(), complex{});
        } else if (v.size() != sum.size()) {
            throw DomainError("doppler_average: spectrum length changed between velocity classes");
        }
        for (std::size_t j = 0; j < v.size(); ++j) {
            sum[j] += rule.weights[i] * v[j];
        }
    }
    return sum;
}

} // namespace

void BroadeningSpec::validate() const
{
    if (!(collisional_coefficient >= 0.0) || !(temperature > 0.0) || !(mass > 0.0)) {
        throw DomainError("BroadeningSpec: need beta >= 0, T > 0 and m > 0");
    }
    if (doppler_nodes < 8 || doppler_nodes % 2 != 0) {
        throw DomainError("BroadeningSpec: Doppler node count must be even and >= 8");
    }
}

double collisional_gamma(double density, const BroadeningSpec &spec)
{
    if (!(density >= 0.0)) {
        throw DomainError("collisional_gamma: density must be non-negative");
    }
    return spec.collisional_coefficient * density;
}

double max_index_estimate(double density, double wavelength, double radiative_decay,
                          const BroadeningSpec &spec)
{
    const double gamma = 0.5 * radiative_decay + collisional_gamma(density, spec);
    return dimensionless_density(density, wavelength) * radiative_decay / gamma;
}

double doppler_width(double temperature, double mass, double wavevector)
{
    if (!(temperature > 0.0) || !(mass > 0.0) || !(wavevector > 0.0)) {
        throw DomainError("doppler_width: T, m and k must be positive");
    }
    return wavevector * std::sqrt(2.0 * constants::k_boltzmann * temperature / mass);
}

GaussHermiteRule gauss_hermite(int n)
{
    if (n < 1) {
        throw DomainError("gauss_hermite: need at least one node");
    }
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    GaussHermiteRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        const double v = solver.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = v * v;
        total += v * v;
    }
    // symmetrise: exact rules are even in x
    for (int i = 0; i < n / 2; ++i) {
        const auto a = static_cast<std::size_t>(i);
        const auto b = static_cast<std::size_t>(n - 1 - i);
        const double x = 0.5 * (rule.nodes[b] - rule.nodes[a]);
        const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
        rule.nodes[a] = -x;
        rule.nodes[b] = x;
        rule.weights[a] = rule.weights[b] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    }
    for (double &w : rule.weights) {
        w /= total;
    }
    return rule;
}

DopplerAverage doppler_average(const std::function<std::vector<complex>(double)> &spectrum,
                               double width, int nodes, bool check_doubling, double tolerance)
{
    if (!(width >= 0.0) || nodes < 1) {
        throw DomainError("doppler_average: need W_D >= 0 and at least one node");
    }
    DopplerAverage out;
    if (width == 0.0) {
        out.value = spectrum(0.0);
        out.nodes = 1;
        return out;
    }
    const std::vector<complex> base = average_with(gauss_hermite(nodes), width, spectrum);
    if (!check_doubling) {
        out.value = base;
        out.nodes = nodes;
        return out;
    }
    out.value = average_with(gauss_hermite(2 * nodes), width, spectrum);
    out.nodes = 2 * nodes;
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < out.value.size(); ++j) {
        diff = std::max(diff, std::abs(out.value[j] - base[j]));
        scale = std::max(scale, std::abs(out.value[j]));
    }
    out.relative_change = scale > 0.0 ? diff / scale : diff;
    if (!(out.relative_change < tolerance)) {
        out.converged = false;
        out.warning = "Doppler quadrature not converged: doubling " + std::to_string(nodes) +
                      " nodes changed the result by " + std::to_string(out.relative_change) +
                      " (relative)";
    }
    return out;
}

complex doppler_average(const std::function<complex(double)> &spectrum, double width,
                        int nodes)
{
    const auto wrapped = [&](double shift) { return std::vector<complex>{spectrum(shift)}; };
    return doppler_average(wrapped, width, nodes, false).value.front();
}

double vapor_pressure_mbar(double temperature, VaporBranch branch)
{
    const double log_p = branch == VaporBranch::low ? 7.9667 - 4646.0 / temperature
                                                    : 7.4077 - 4453.0 / temperature;
    return std::pow(10.0, log_p);
}

double vapor_density(double temperature)
{
    if (!(temperature >= 298.0) || !(temperature <= 600.0)) {
        throw DomainError("vapor_density: temperature outside 298-600 K");
    }
    const VaporBranch branch =
        temperature < branch_switch ? VaporBranch::low : VaporBranch::high;
    const double pascal = 1.0e2 * vapor_pressure_mbar(temperature, branch);
    const double per_m3 = pascal / (constants::k_boltzmann_si * temperature);
    return per_m3 * 1.0e-6;
}

} // namespace fwm::broadening
