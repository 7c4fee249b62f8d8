#ifndef QMEM_CERTIFY_CHAIN_HPP
#define QMEM_CERTIFY_CHAIN_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <qmem/numcore/error.hpp>

namespace qmem {

/** N two-level atoms crossed in turn by one field mode, kappa tau = sqrt(d/N). */
struct ChainModel {
    std::size_t N = 100;
    double d = 1.0;

    void validate() const
    {
        require(N >= 1, "ChainModel: N must be >= 1");
        require(d >= 0.0 && std::isfinite(d), "ChainModel: d must be >= 0");
    }

    double kappa_tau() const { return std::sqrt(d / static_cast<double>(N)); }

    Warnings warnings() const
    {
        Warnings w;
        if (kappa_tau() > 0.3) {
            w.push_back({ErrorKind::RegimeWarning,
                         "kappa tau = " + std::to_string(kappa_tau()) +
                             " is not small"});
        }
        return w;
    }
};

enum class ChainDirection { forward, backward };

/**
 * Sparse state of the chain and the field mode. A basis state is the
 * photon number together with the sorted list of excited atoms; the
 * propagator is real so amplitudes are real.
 */
class FockChainState {
public:
    using Atoms = std::vector<std::uint32_t>;
    using Key = std::pair<std::size_t, Atoms>;

    FockChainState(std::size_t natoms, std::size_t n_max)
        : m_natoms(natoms), m_nmax(n_max)
    {
        require(natoms >= 1, "FockChainState: need at least one atom");
    }

    static FockChainState vacuum(std::size_t natoms, std::size_t n_max)
    {
        FockChainState s(natoms, n_max);
        s.m_amp[{0, {}}] = 1.0;
        return s;
    }

    static FockChainState photons(std::size_t natoms, std::size_t n,
                                  std::size_t n_max)
    {
        require(n <= n_max, "FockChainState: photon number above n_max");
        FockChainState s(natoms, n_max);
        s.m_amp[{n, {}}] = 1.0;
        return s;
    }

    static FockChainState all_excited(std::size_t natoms, std::size_t n_max)
    {
        FockChainState s(natoms, n_max);
        Atoms a(natoms);
        for (std::size_t j = 0; j < natoms; ++j) {
            a[j] = static_cast<std::uint32_t>(j);
        }
        s.m_amp[{0, a}] = 1.0;
        return s;
    }

    std::size_t natoms() const { return m_natoms; }
    std::size_t n_max() const { return m_nmax; }
    const std::map<Key, double> &amplitudes() const { return m_amp; }
    std::map<Key, double> &amplitudes() { return m_amp; }

    double amplitude(std::size_t n, const Atoms &atoms) const
    {
        auto it = m_amp.find({n, atoms});
        return it == m_amp.end() ? 0.0 : it->second;
    }

    double norm() const
    {
        double s = 0.0;
        for (const auto &[k, a] : m_amp) {
            s += a * a;
        }
        return s;
    }

    std::vector<double> photon_distribution() const
    {
        std::vector<double> p(m_nmax + 1, 0.0);
        for (const auto &[k, a] : m_amp) {
            p[k.first] += a * a;
        }
        return p;
    }

    double mean_photons() const
    {
        double s = 0.0;
        for (const auto &[k, a] : m_amp) {
            s += static_cast<double>(k.first) * a * a;
        }
        return s;
    }

    /* probability weight per total excitation number */
    std::map<std::size_t, double> excitation_weights() const
    {
        std::map<std::size_t, double> w;
        for (const auto &[k, a] : m_amp) {
            w[k.first + k.second.size()] += a * a;
        }
        return w;
    }

    /* keeps the components with n photons (unnormalized) */
    FockChainState project_photons(std::size_t n) const
    {
        FockChainState s(m_natoms, m_nmax);
        for (const auto &[k, a] : m_amp) {
            if (k.first == n) {
                s.m_amp[k] = a;
            }
        }
        return s;
    }

    /* the field mode is replaced by vacuum; requires a projected state */
    FockChainState with_empty_mode() const
    {
        FockChainState s(m_natoms, m_nmax);
        for (const auto &[k, a] : m_amp) {
            require(k.first == 0, "with_empty_mode: state has photons");
            s.m_amp[k] = a;
        }
        return s;
    }

    /**
     * One atom interacts with the mode for kappa tau:
     * |g,n> -> cos(kt sqrt n)|g,n> - sin(kt sqrt n)|e,n-1>,
     * |e,n> -> cos(kt sqrt(n+1))|e,n> + sin(kt sqrt(n+1))|g,n+1>.
     * Returns the probability dropped above n_max.
     */
    double interact(std::uint32_t atom, double kt)
    {
        require(atom < m_natoms, "interact: atom index out of range");
        std::map<Key, double> out;
        double leak = 0.0;
        for (const auto &[k, a] : m_amp) {
            const std::size_t n = k.first;
            const auto &atoms = k.second;
            auto pos = std::lower_bound(atoms.begin(), atoms.end(), atom);
            const bool excited = pos != atoms.end() && *pos == atom;
            if (!excited) {
                const double x = kt * std::sqrt(static_cast<double>(n));
                out[k] += std::cos(x) * a;
                if (n > 0) {
                    Atoms up = atoms;
                    up.insert(up.begin() + (pos - atoms.begin()), atom);
                    out[{n - 1, std::move(up)}] += -std::sin(x) * a;
                }
            } else {
                const double x = kt * std::sqrt(static_cast<double>(n + 1));
                out[k] += std::cos(x) * a;
                const double b = std::sin(x) * a;
                if (n + 1 > m_nmax) {
                    leak += b * b;
                } else {
                    Atoms down = atoms;
                    down.erase(down.begin() + (pos - atoms.begin()));
                    out[{n + 1, std::move(down)}] += b;
                }
            }
        }
        for (auto it = out.begin(); it != out.end();) {
            it = it->second == 0.0 ? out.erase(it) : std::next(it);
        }
        m_amp = std::move(out);
        return leak;
    }

private:
    std::size_t m_natoms;
    std::size_t m_nmax;
    std::map<Key, double> m_amp;
};

/**
 * Sends the mode through the chain: forward is U_N ... U_1 (atom 0
 * first), backward is U_1 ... U_N (last atom first).
 */
inline FockChainState chain_propagate(FockChainState state,
                                      const ChainModel &model,
                                      ChainDirection dir)
{
    model.validate();
    require(state.natoms() == model.N,
            "chain_propagate: state and model atom counts differ");
    const double kt = model.kappa_tau();
    double leak = 0.0;
    for (std::size_t j = 0; j < model.N; ++j) {
        auto atom = static_cast<std::uint32_t>(
            dir == ChainDirection::forward ? j : model.N - 1 - j);
        leak += state.interact(atom, kt);
        if (leak > 1e-10) {
            throw Error(ErrorKind::TruncationOverflow,
                        "photon number leaked above n_max: " +
                            std::to_string(leak));
        }
    }
    return state;
}

struct ChainEfficiency {
    /* from the propagated state */
    double exact = 0.0;
    /* finite-N closed form */
    double closed_form = 0.0;
    /* N -> infinity limit */
    double limit = 0.0;
    Warnings warnings;
};

/* single-photon absorption probability and its Beer-law limit */
inline ChainEfficiency chain_absorption(const ChainModel &m)
{
    m.validate();
    auto s = chain_propagate(FockChainState::photons(m.N, 1, 1), m,
                             ChainDirection::forward);
    ChainEfficiency r;
    r.exact = 1.0 - s.project_photons(1).norm();
    r.closed_form = 1.0 - std::pow(std::cos(m.kappa_tau()), 2.0 * m.N);
    r.limit = -std::expm1(-m.d);
    r.warnings = m.warnings();
    return r;
}

/**
 * Absorbs a single photon forward, keeps the absorbed part, then lets the
 * excitation radiate into an empty mode in the given order. The stored
 * amplitudes are real so no rephasing step is needed.
 */
inline ChainEfficiency chain_efficiency(const ChainModel &m, ChainDirection dir)
{
    m.validate();
    auto s = chain_propagate(FockChainState::photons(m.N, 1, 1), m,
                             ChainDirection::forward);
    auto stored = s.project_photons(0).with_empty_mode();
    auto out = chain_propagate(stored, m, dir);
    ChainEfficiency r;
    r.exact = out.project_photons(1).norm();
    const double c = std::cos(m.kappa_tau());
    const double s2 = 1.0 - c * c;
    const double n = static_cast<double>(m.N);
    if (dir == ChainDirection::forward) {
        r.closed_form = n * n * s2 * s2 * std::pow(c, 2.0 * n - 2.0);
        r.limit = m.d * m.d * std::exp(-m.d);
    } else {
        double a = 1.0 - std::pow(c, 2.0 * n);
        r.closed_form = a * a;
        r.limit = std::expm1(-m.d) * std::expm1(-m.d);
    }
    r.warnings = m.warnings();
    return r;
}

struct InvertedEmission {
    /* exact mean photon number for the finite chain */
    double exact = 0.0;
    /* bosonic approximation cosh^{2N}(kappa tau) - 1 */
    double bosonic = 0.0;
    /* large-N limit e^d - 1 */
    double limit = 0.0;
    std::vector<double> distribution;
    Warnings warnings;
};

/**
 * Mean photon number emitted by a fully inverted chain into an initially
 * empty mode. Each atom meets the mode once, so the photon-number
 * distribution obeys the exact recursion
 * p'_n = cos^2(kt sqrt(n+1)) p_n + sin^2(kt sqrt n) p_{n-1}.
 */
inline InvertedEmission inverted_emission(const ChainModel &m,
                                          std::size_t n_max = 40)
{
    m.validate();
    const double kt = m.kappa_tau();
    std::vector<double> p(n_max + 1, 0.0), q(n_max + 1);
    p[0] = 1.0;
    double leak = 0.0;
    for (std::size_t j = 0; j < m.N; ++j) {
        for (std::size_t n = 0; n <= n_max; ++n) {
            double c = std::cos(kt * std::sqrt(static_cast<double>(n + 1)));
            q[n] = c * c * p[n];
            if (n > 0) {
                double s = std::sin(kt * std::sqrt(static_cast<double>(n)));
                q[n] += s * s * p[n - 1];
            }
        }
        double s = std::sin(kt * std::sqrt(static_cast<double>(n_max + 1)));
        leak += s * s * p[n_max];
        if (leak > 1e-10) {
            throw Error(ErrorKind::TruncationOverflow,
                        "inverted emission leaked above n_max: " +
                            std::to_string(leak));
        }
        std::swap(p, q);
    }
    InvertedEmission r;
    for (std::size_t n = 0; n <= n_max; ++n) {
        r.exact += static_cast<double>(n) * p[n];
    }
    r.distribution = p;
    r.bosonic = std::pow(std::cosh(kt), 2.0 * static_cast<double>(m.N)) - 1.0;
    r.limit = std::expm1(m.d);
    r.warnings = m.warnings();
    return r;
}

} // namespace qmem

#endif
