#include <fwm/propagation.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace fwm::propagation {

namespace {

struct Roots
{
    complex first;
    complex second;
    complex s;
    complex delta_a;
};

Roots roots(const SusceptibilityMatrix &chi, double k1, double k2)
{
    const complex a = k1 * chi.chi11;
    const complex b = k2 * std::conj(chi.chi22);
    const complex s = std::sqrt((a + b) * (a + b) -
                                4.0 * k1 * k2 * chi.chi12 * std::conj(chi.chi21));
    const complex da = a - b;
    return {I * pi * (da + s), I * pi * (da - s), s, da};
}

using State = std::array<complex, 2>;

State derivative(const SusceptibilityMatrix &chi, double k1, double k2, double dk, double z,
                 const State &y)
{
    const complex phase = std::exp(I * dk * z);
    return {2.0 * pi * I * k1 * (chi.chi11 * y[0] + chi.chi12 * phase * y[1]),
            -2.0 * pi * I * k2 *
                (std::conj(chi.chi22) * y[1] + std::conj(chi.chi21) * std::conj(phase) * y[0])};
}

} // namespace

PropagationConstants propagation_constants(const SusceptibilityMatrix &chi, double k1,
                                           double k2)
{
    const Roots r = roots(chi, k1, k2);
    // more absorbing = smaller Re lambda
    if (r.first.real() <= r.second.real()) {
        return {r.second, r.first, BranchTag::local_absorption};
    }
    return {r.first, r.second, BranchTag::local_absorption};
}

std::vector<PropagationConstants> track_branches(std::span<const SusceptibilityMatrix> chi,
                                                 double k1, double k2)
{
    std::vector<complex> a;
    std::vector<complex> b;
    a.reserve(chi.size());
    b.reserve(chi.size());
    for (std::size_t i = 0; i < chi.size(); ++i) {
        const Roots r = roots(chi[i], k1, k2);
        if (i == 0) {
            a.push_back(r.first);
            b.push_back(r.second);
            continue;
        }
        const double keep = std::abs(r.first - a.back()) + std::abs(r.second - b.back());
        const double swap = std::abs(r.second - a.back()) + std::abs(r.first - b.back());
        if (swap < keep) {
            a.push_back(r.second);
            b.push_back(r.first);
        } else {
            a.push_back(r.first);
            b.push_back(r.second);
        }
    }
    double max_a = -std::numeric_limits<double>::infinity();
    double max_b = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        max_a = std::max(max_a, a[i].real());
        max_b = std::max(max_b, b[i].real());
    }
    // the trace with the larger worst-case Re lambda reaches lower absorption
    const bool a_is_plus = max_a >= max_b;
    std::vector<PropagationConstants> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.push_back(a_is_plus ? PropagationConstants{a[i], b[i], BranchTag::continuity}
                                : PropagationConstants{b[i], a[i], BranchTag::continuity});
    }
    return out;
}

ComplexIndex index_from_constant(complex lambda, double k)
{
    if (!(k > 0.0)) {
        throw DomainError("index_from_constant: k must be positive");
    }
    return {lambda.imag() / k, -lambda.real() / k};
}

FieldPair SlabSolution::apply(const FieldPair &in) const
{
    return {transfer(0, 0) * in.e1 + transfer(0, 1) * in.e2_conj,
            transfer(1, 0) * in.e1 + transfer(1, 1) * in.e2_conj};
}

SlabSolution slab_transfer(const SusceptibilityMatrix &chi, double k1, double k2, double L)
{
    if (!(L >= 0.0)) {
        throw DomainError("slab_transfer: thickness must be non-negative");
    }
    const Roots r = roots(chi, k1, k2);
    const complex sum = k1 * chi.chi11 + k2 * std::conj(chi.chi22);
    const complex x = pi * r.s * L;
    const complex cosine = std::cos(x);
    // sin(pi S L) / S, even in S
    const complex sine_over_s =
        std::abs(x) < 1e-6 ? pi * L * (1.0 - x * x / 6.0) : std::sin(x) / r.s;
    const complex envelope = std::exp(I * pi * r.delta_a * L);

    SlabSolution out;
    out.thickness = L;
    out.s = r.s;
    out.delta_a = r.delta_a;
    out.transfer(0, 0) = envelope * (cosine + I * sum * sine_over_s);
    out.transfer(0, 1) = envelope * 2.0 * I * k1 * chi.chi12 * sine_over_s;
    out.transfer(1, 0) = envelope * (-2.0) * I * k2 * std::conj(chi.chi21) * sine_over_s;
    out.transfer(1, 1) = envelope * (cosine - I * sum * sine_over_s);
    return out;
}

FieldPair slab_asymptotic(const SusceptibilityMatrix &chi, double k1, double k2, double L,
                          const FieldPair &in, double threshold)
{
    Roots r = roots(chi, k1, k2);
    if (r.first.real() < r.second.real()) {
        r.s = -r.s;
        std::swap(r.first, r.second);
    }
    if (!((r.first.real() - r.second.real()) * L > threshold)) {
        throw DomainError("slab_asymptotic: asymptote not valid, the subdominant mode is "
                          "not yet attenuated");
    }
    const complex sum = k1 * chi.chi11 + k2 * std::conj(chi.chi22);
    const complex scale = std::exp(r.first * L) / (2.0 * r.s);
    return {scale * (in.e1 * (sum + r.s) + 2.0 * k1 * chi.chi12 * in.e2_conj),
            scale * (-2.0 * k2 * std::conj(chi.chi21) * in.e1 + in.e2_conj * (r.s - sum))};
}

IntegrationResult integrate_coupled(const ChiProfile &chi, double k1, double k2,
                                    double delta_k, double L, const FieldPair &in,
                                    const IntegrationOptions &options)
{
    if (!(L >= 0.0)) {
        throw DomainError("integrate_coupled: thickness must be non-negative");
    }
    // Dormand-Prince 5(4) tableau
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    IntegrationResult result;
    State y{in.e1, in.e2_conj};
    if (L == 0.0) {
        result.fields = in;
        return result;
    }

    auto f = [&](double z, const State &s) { return derivative(chi(z), k1, k2, delta_k, z, s); };
    auto combine = [](const State &base, double h, std::initializer_list<std::pair<double, const State *>> terms) {
        State out = base;
        for (const auto &[w, k] : terms) {
            out[0] += h * w * (*k)[0];
            out[1] += h * w * (*k)[1];
        }
        return out;
    };

    double z = 0.0;
    double h = options.initial_step;
    if (!(h > 0.0)) {
        const SusceptibilityMatrix c0 = chi(0.0);
        const double rate = 2.0 * pi *
                            (std::max(k1, k2) * (std::abs(c0.chi11) + std::abs(c0.chi12) +
                                                 std::abs(c0.chi21) + std::abs(c0.chi22))) +
                            std::abs(delta_k);
        h = rate > 0.0 ? std::min(L, 0.01 / rate) : L;
    }

    State k1s = f(z, y);
    while (z < L) {
        if (result.accepted_steps + result.rejected_steps >= options.max_steps) {
            throw NumericalError("integrate_coupled: step budget exhausted at z = " +
                                 std::to_string(z));
        }
        h = std::min(h, L - z);
        if (h < 1e-14 * std::max(L, 1e-300)) {
            throw NumericalError("integrate_coupled: step size underflow at z = " +
                                 std::to_string(z) + " (h = " + std::to_string(h) + ")");
        }
        const State k2s = f(z + c2 * h, combine(y, h, {{a21, &k1s}}));
        const State k3s = f(z + c3 * h, combine(y, h, {{a31, &k1s}, {a32, &k2s}}));
        const State k4s = f(z + c4 * h, combine(y, h, {{a41, &k1s}, {a42, &k2s}, {a43, &k3s}}));
        const State k5s =
            f(z + c5 * h, combine(y, h, {{a51, &k1s}, {a52, &k2s}, {a53, &k3s}, {a54, &k4s}}));
        const State k6s = f(z + h, combine(y, h,
                                           {{a61, &k1s}, {a62, &k2s}, {a63, &k3s}, {a64, &k4s},
                                            {a65, &k5s}}));
        const State next = combine(
            y, h, {{b1, &k1s}, {b3, &k3s}, {b4, &k4s}, {b5, &k5s}, {b6, &k6s}});
        const State k7s = f(z + h, next);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const complex e = h * (e1 * k1s[i] + e3 * k3s[i] + e4 * k4s[i] + e5 * k5s[i] +
                                   e6 * k6s[i] + e7 * k7s[i]);
            const double sc = options.absolute_tolerance +
                              options.relative_tolerance *
                                  std::max(std::abs(y[i]), std::abs(next[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        if (err <= 1.0) {
            z += h;
            y = next;
            k1s = k7s;
            ++result.accepted_steps;
        } else {
            ++result.rejected_steps;
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    result.fields = {y[0], y[1]};
    return result;
}

IntegrationResult integrate_coupled(const SusceptibilityMatrix &chi, double k1, double k2,
                                    double delta_k, double L, const FieldPair &in,
                                    const IntegrationOptions &options)
{
    return integrate_coupled([&](double) { return chi; }, k1, k2, delta_k, L, in, options);
}

} // namespace fwm::propagation
