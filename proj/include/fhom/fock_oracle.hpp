#ifndef FHOM_FOCK_ORACLE_HPP
#define FHOM_FOCK_ORACLE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "fhom/config.hpp"
#include "fhom/converter.hpp"
#include "fhom/errors.hpp"
#include "fhom/hom.hpp"

namespace fhom
{
// Mode order of the single-frequency-bin network: the two detected modes followed by
// the four loss ancillae (input loss U/L, output filter loss U/L).
enum FockMode : int
{
    mode_u = 0,
    mode_l = 1,
    mode_eu1 = 2,
    mode_el1 = 3,
    mode_eu2 = 4,
    mode_el2 = 5
};

inline constexpr int k_fock_modes = 6;

// State vector over photon numbers, sparse in the occupied basis kets.
struct TruncatedState
{
    int n_max = 12;
    std::unordered_map<std::uint64_t, std::complex<double>> amps;
    double leaked = 0.0; // probability dropped at the truncation boundary

    static std::uint64_t pack(const std::array<int, k_fock_modes>& n)
    {
        std::uint64_t key = 0;
        for (int i = 0; i < k_fock_modes; ++i)
            key |= static_cast<std::uint64_t>(n[static_cast<std::size_t>(i)] & 0xff) << (8 * i);
        return key;
    }

    static std::array<int, k_fock_modes> unpack(std::uint64_t key)
    {
        std::array<int, k_fock_modes> n{};
        for (int i = 0; i < k_fock_modes; ++i)
            n[static_cast<std::size_t>(i)] = static_cast<int>((key >> (8 * i)) & 0xff);
        return n;
    }

    double norm_sq() const
    {
        double s = 0.0;
        for (const auto& [key, amp] : amps)
            s += std::norm(amp);
        return s;
    }
};

inline constexpr int k_fock_n_max_limit = 80; // modes pack into bytes; 80! is still finite

namespace detail
{
inline const std::array<double, 2 * k_fock_n_max_limit + 3>& factorials()
{
    static const auto table = [] {
        std::array<double, 2 * k_fock_n_max_limit + 3> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i)
            t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    return table;
}
} // namespace detail

// Two-mode beamsplitter acting on creation operators:
// a_i^+ -> m00 a_i^+ + m01 a_j^+,  a_j^+ -> m10 a_i^+ + m11 a_j^+.
inline void apply_beamsplitter(TruncatedState& state, int mode_i, int mode_j, const BsMatrix& m)
{
    const auto& fact = detail::factorials();
    std::unordered_map<std::uint64_t, std::complex<double>> next;
    next.reserve(state.amps.size() * 4);
    for (const auto& [key, amp] : state.amps)
    {
        auto n = TruncatedState::unpack(key);
        const int a = n[static_cast<std::size_t>(mode_i)];
        const int b = n[static_cast<std::size_t>(mode_j)];
        if (a == 0 && b == 0)
        {
            next[key] += amp;
            continue;
        }
        // expand (m00 x + m01 y)^a (m10 x + m11 y)^b over x^p y^q monomials
        std::vector<std::complex<double>> poly(static_cast<std::size_t>(a + b + 1), 0.0);
        {
            std::vector<std::complex<double>> pa(static_cast<std::size_t>(a + 1));
            for (int k = 0; k <= a; ++k)
                pa[static_cast<std::size_t>(k)] = fact[a] / (fact[k] * fact[a - k]) *
                                                  std::pow(m[0][0], k) * std::pow(m[0][1], a - k);
            for (int l = 0; l <= b; ++l)
            {
                const std::complex<double> pb = fact[b] / (fact[l] * fact[b - l]) *
                                                std::pow(m[1][0], l) * std::pow(m[1][1], b - l);
                for (int k = 0; k <= a; ++k)
                    poly[static_cast<std::size_t>(k + l)] += pa[static_cast<std::size_t>(k)] * pb;
            }
        }
        const double base = std::sqrt(fact[a] * fact[b]);
        for (int p = 0; p <= a + b; ++p)
        {
            const int q = a + b - p;
            const std::complex<double> c = poly[static_cast<std::size_t>(p)];
            if (c == 0.0)
                continue;
            const std::complex<double> out = amp * c * std::sqrt(fact[p] * fact[q]) / base;
            if (p > state.n_max || q > state.n_max)
            {
                state.leaked += std::norm(out);
                continue;
            }
            auto nn = n;
            nn[static_cast<std::size_t>(mode_i)] = p;
            nn[static_cast<std::size_t>(mode_j)] = q;
            next[TruncatedState::pack(nn)] += out;
        }
    }
    state.amps = std::move(next);
}

// Initial state: a single photon in the upper mode and either a truncated coherent
// state or a single photon in the lower mode.
inline TruncatedState prepare(InputKind kind, double alpha_sq, int n_max = 12)
{
    if (n_max < 4 || n_max > k_fock_n_max_limit)
        throw std::domain_error("fock prepare: n_max must lie in [4, 80]");
    if (!(alpha_sq >= 0.0))
        throw std::domain_error("fock prepare: alpha_sq must be nonnegative");
    TruncatedState state;
    state.n_max = n_max;
    std::array<int, k_fock_modes> n{};
    n[mode_u] = 1;
    if (kind == InputKind::single_photon_lower)
    {
        n[mode_l] = 1;
        state.amps[TruncatedState::pack(n)] = 1.0;
        return state;
    }
    const auto& fact = detail::factorials();
    const double alpha = std::sqrt(alpha_sq);
    double mass = 0.0;
    for (int k = 0; k <= n_max; ++k)
    {
        n[mode_l] = k;
        const double c = std::exp(-alpha_sq / 2.0) * std::pow(alpha, k) / std::sqrt(fact[k]);
        state.amps[TruncatedState::pack(n)] = c;
        mass += c * c;
    }
    state.leaked = std::max(0.0, 1.0 - mass);
    if (state.leaked > 1e-8)
        throw truncation_error("fock prepare: coherent-state truncation leaks more than 1e-8");
    return state;
}

struct NetworkParams
{
    double r_tilde = 0.0;
    double t_in_u = 1.0;
    double t_in_l = 1.0;
    double t_out_u = 1.0;
    double t_out_l = 1.0;
    double pump_phase = 0.0;
};

namespace detail
{
inline BsMatrix loss_bs(double transmittance)
{
    const double t = std::sqrt(transmittance);
    const double r = std::sqrt(1.0 - transmittance);
    return {{{std::complex<double>(t, 0.0), std::complex<double>(r, 0.0)},
             {std::complex<double>(-r, 0.0), std::complex<double>(t, 0.0)}}};
}

// Creation-operator map of the lossless frequency beamsplitter:
// a_U^+ -> sqrt(T) a_U^+ + e^{-i phi} sqrt(R) a_L^+,
// a_L^+ -> -e^{+i phi} sqrt(R) a_U^+ + sqrt(T) a_L^+.
inline BsMatrix frequency_bs(double r_tilde, double phase)
{
    const double c = std::sqrt(1.0 - r_tilde);
    const double s = std::sqrt(r_tilde);
    const std::complex<double> eip = std::polar(1.0, phase);
    return {{{std::complex<double>(c, 0.0), std::conj(eip) * s},
             {-eip * s, std::complex<double>(c, 0.0)}}};
}
} // namespace detail

// The five lossless components in order: input losses, frequency BS, output filters.
inline TruncatedState apply_network(TruncatedState state, const NetworkParams& net)
{
    auto check01 = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::domain_error(std::string("fock apply_network: ") + name +
                                    " must lie in [0,1]");
    };
    check01(net.r_tilde, "r_tilde");
    check01(net.t_in_u, "t_in_u");
    check01(net.t_in_l, "t_in_l");
    check01(net.t_out_u, "t_out_u");
    check01(net.t_out_l, "t_out_l");
    apply_beamsplitter(state, mode_u, mode_eu1, detail::loss_bs(net.t_in_u));
    apply_beamsplitter(state, mode_l, mode_el1, detail::loss_bs(net.t_in_l));
    apply_beamsplitter(state, mode_u, mode_l, detail::frequency_bs(net.r_tilde, net.pump_phase));
    apply_beamsplitter(state, mode_u, mode_eu2, detail::loss_bs(net.t_out_u));
    apply_beamsplitter(state, mode_l, mode_el2, detail::loss_bs(net.t_out_l));
    return state;
}

// Born-rule no-click probabilities of the detected modes; background-noise factors
// (1 - d) are applied by the caller.
inline NoClickProbs no_click_probs_oracle(const TruncatedState& state)
{
    NoClickProbs p;
    for (const auto& [key, amp] : state.amps)
    {
        const auto n = TruncatedState::unpack(key);
        const double w = std::norm(amp);
        if (n[mode_u] == 0)
            p.p_u0 += w;
        if (n[mode_l] == 0)
            p.p_l0 += w;
        if (n[mode_u] == 0 && n[mode_l] == 0)
            p.p_u0l0 += w;
    }
    return p;
}

} // namespace fhom

#endif
