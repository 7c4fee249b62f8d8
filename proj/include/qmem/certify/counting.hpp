#ifndef QMEM_CERTIFY_COUNTING_HPP
#define QMEM_CERTIFY_COUNTING_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <qmem/numcore/error.hpp>

namespace qmem {

struct DetectorModel {
    double eta_d = 1.0;
    double p_dc = 0.0;
    double eta_m = 1.0;

    void validate() const
    {
        require(eta_d >= 0.0 && eta_d <= 1.0, "DetectorModel: eta_d outside [0,1]");
        require(p_dc >= 0.0 && p_dc < 1.0, "DetectorModel: p_dc outside [0,1)");
        require(eta_m >= 0.0 && eta_m <= 1.0, "DetectorModel: eta_m outside [0,1]");
    }

    double total() const { return eta_d * eta_m; }
};

/* gain G = e^d for an amplifier, transmission e^-d for an attenuator */
struct AmplifierModel {
    double gain = 1.0;

    static AmplifierModel amplifier(double d) { return {std::exp(d)}; }
    static AmplifierModel attenuator(double d) { return {std::exp(-d)}; }

    bool is_amplifier() const { return gain >= 1.0; }

    void validate() const
    {
        require(gain > 0.0 && std::isfinite(gain), "AmplifierModel: gain must be positive");
    }
};

enum class CriterionKind { g2, cauchy_schwarz, bell_visibility, tv };

inline std::string to_string(CriterionKind k)
{
    switch (k) {
    case CriterionKind::g2:
        return "g2";
    case CriterionKind::cauchy_schwarz:
        return "cauchy_schwarz";
    case CriterionKind::bell_visibility:
        return "bell_visibility";
    case CriterionKind::tv:
        return "tv";
    }
    return "?";
}

/**
 * value is g2, R or V; the tv criterion stores T in value and V in
 * second. passes_quantum follows the criterion's threshold.
 */
struct CriterionReport {
    CriterionKind criterion = CriterionKind::g2;
    double value = 0.0;
    double second = 0.0;
    double threshold = 0.0;
    bool passes_quantum = false;
    /* printed formulas inconsistent with the ideal-memory limit */
    bool consistency_flag = false;
    Warnings warnings;
};

/* mean photon number n <-> squeezing parameter p = n / (n + 1) */
inline double squeezing_from_mean(double n)
{
    require(n >= 0.0, "squeezing_from_mean: n must be >= 0");
    return n / (n + 1.0);
}

inline double mean_from_squeezing(double p)
{
    require(p >= 0.0 && p < 1.0, "mean_from_squeezing: p outside [0,1)");
    return p / (1.0 - p);
}

/**
 * Second-order autocorrelation of a stored single photon read on a 50/50
 * splitter with two threshold detectors. conditioned treats the photon as
 * absorbed (eta_m = 1).
 */
inline CriterionReport g2_memory(const DetectorModel &det, bool conditioned = false)
{
    det.validate();
    const double e = conditioned ? det.eta_d : det.total();
    const double q = 1.0 - det.p_dc;
    const double num = 1.0 - 2.0 * q * (1.0 - e / 2.0) + q * q * (1.0 - e);
    const double den = 1.0 - q * (1.0 - e / 2.0);
    CriterionReport r;
    r.criterion = CriterionKind::g2;
    r.threshold = 1.0;
    r.value = den > 0.0 ? num / (den * den) : 1.0;
    r.passes_quantum = r.value < r.threshold;
    return r;
}

/* autocorrelation of the spontaneous 2PE emission, gain G = e^d */
inline double g2_2pe(double d, double eta_d)
{
    require(d > 0.0, "g2_2pe: d must be positive");
    require(eta_d > 0.0 && eta_d <= 1.0, "g2_2pe: eta_d outside (0,1]");
    const double gm1 = std::expm1(d);
    const double a = 1.0 + 0.5 * eta_d * gm1;
    const double b = 1.0 + eta_d * gm1;
    // 1 - 1/a^2 loses precision for small d
    const double c = 0.5 * eta_d * gm1;
    const double single = c * (2.0 + c) / (a * a);
    const double both = 1.0 - 2.0 / (a * a) + 1.0 / (b * b);
    return both / (single * single);
}

/* click probability of the amplified 2PE field: 1 - 1/(1 + eta (G-1))^2 */
inline double click_probability_2pe(double gain, double eta)
{
    require(gain >= 1.0, "click_probability_2pe: G must be >= 1");
    require(eta >= 0.0 && eta <= 1.0, "click_probability_2pe: eta outside [0,1]");
    const double b = 1.0 + eta * (gain - 1.0);
    return 1.0 - 1.0 / (b * b);
}

/**
 * Cauchy-Schwarz parameter for a two-mode squeezed source, arm a stored
 * in the memory (det_a.eta_m) and each arm split on two detectors.
 */
inline CriterionReport cauchy_schwarz(const DetectorModel &det_a,
                                      const DetectorModel &det_b, double p)
{
    det_a.validate();
    det_b.validate();
    require(p >= 0.0 && p < 1.0, "cauchy_schwarz: p outside [0,1)");
    const double ea = det_a.total();
    const double eb = det_b.total();
    const double qa = 1.0 - det_a.p_dc;
    const double qb = 1.0 - det_b.p_dc;
    auto A = [p](double x) { return (1.0 - p) / (1.0 - p * x); };
    const double num = 1.0 - qa * A(1.0 - ea / 2.0) - qb * A(1.0 - eb / 2.0) +
        qa * qb * (1.0 - p) /
            (1.0 - p * (1.0 - ea / 2.0) * (1.0 - eb / 2.0));
    const double da = 1.0 - 2.0 * qa * A(1.0 - ea / 2.0) + qa * qa * A(1.0 - ea);
    const double db = 1.0 - 2.0 * qb * A(1.0 - eb / 2.0) + qb * qb * A(1.0 - eb);
    CriterionReport r;
    r.criterion = CriterionKind::cauchy_schwarz;
    r.threshold = 1.0;
    r.value = num * num / (da * db);
    r.passes_quantum = r.value > r.threshold;
    return r;
}

/**
 * Visibility of the polarization correlation of a polarization-entangled
 * pair built from two squeezed sources of parameter p.
 */
inline CriterionReport bell_visibility(const DetectorModel &det_a,
                                       const DetectorModel &det_b, double p)
{
    det_a.validate();
    det_b.validate();
    require(p >= 0.0 && p < 1.0, "bell_visibility: p outside [0,1)");
    const double ea = det_a.total();
    const double eb = det_b.total();
    const double qa = 1.0 - det_a.p_dc;
    const double qb = 1.0 - det_b.p_dc;
    const double a = (1.0 - p) * qa * qb / (1.0 - p * (1.0 - ea) * (1.0 - eb));
    const double b = (1.0 - p) * (1.0 - p) * qa * qb /
        ((1.0 - p * (1.0 - ea)) * (1.0 - p * (1.0 - eb)));
    const double den = 2.0 - 2.0 * qa * (1.0 - p) / (1.0 - p * (1.0 - ea)) -
        2.0 * qb * (1.0 - p) / (1.0 - p * (1.0 - eb)) + a + b;
    CriterionReport r;
    r.criterion = CriterionKind::bell_visibility;
    r.threshold = 1.0 / 3.0;
    r.value = den > 0.0 ? (a - b) / den : 0.0;
    r.passes_quantum = r.value > r.threshold;
    return r;
}

enum class TvProtocol { crib, tpe, slowlight };

struct TvParams {
    double d = 1.0;
    /* slow-light gain, loss and length */
    double alpha = 0.0;
    double beta = 1.0;
    double length = 1.0;
};

/**
 * Conditional variance V and transfer coefficient T. The slow-light branch
 * uses eta = e^{(alpha-beta)L}, N_f = 2 alpha/(beta-alpha),
 * V_noise = 1 + (1-eta) N_f, V = 1 - eta + V_noise, T = 2 eta/(1+V_noise);
 * alpha == beta returns the series limit (1-eta) N_f -> 2 alpha L with a
 * warning.
 */
inline CriterionReport tv_criterion(TvProtocol proto, const TvParams &prm)
{
    CriterionReport r;
    r.criterion = CriterionKind::tv;
    r.threshold = 1.0;
    switch (proto) {
    case TvProtocol::crib: {
        require(prm.d >= 0.0, "tv_criterion: d must be >= 0");
        double a = -std::expm1(-prm.d);
        r.value = 2.0 * a * a;
        r.second = 1.0 - a * a;
        break;
    }
    case TvProtocol::tpe: {
        require(prm.d >= 0.0, "tv_criterion: d must be >= 0");
        double s = std::sinh(prm.d / 2.0);
        r.value = 4.0 * s * s / (2.0 * std::exp(prm.d) - 1.0);
        r.second = 1.0 - std::exp(-prm.d) + std::exp(prm.d);
        break;
    }
    case TvProtocol::slowlight: {
        require(prm.alpha >= 0.0 && prm.beta >= 0.0 && prm.length >= 0.0,
                "tv_criterion: alpha, beta, L must be >= 0");
        const double x = (prm.alpha - prm.beta) * prm.length;
        const double eta = std::exp(x);
        double excess;
        if (prm.alpha == prm.beta) {
            r.warnings.push_back({ErrorKind::DegenerateGainLoss,
                                  "alpha == beta, N_f singular; series limit used"});
            excess = 2.0 * prm.alpha * prm.length;
        } else {
            // (1 - eta) N_f = 2 alpha L (1 - e^x) / (-x)
            excess = 2.0 * prm.alpha * prm.length * (-std::expm1(x)) / (-x);
        }
        const double vnoise = 1.0 + excess;
        r.value = 2.0 * eta / (1.0 + vnoise);
        r.second = 1.0 - eta + vnoise;
        r.consistency_flag = true;
        break;
    }
    }
    r.passes_quantum = r.value > 1.0 && r.second < 1.0;
    return r;
}

/**
 * Joint photon-number distribution over a few modes, truncated at n_max
 * per mode. The click POVMs are diagonal in the Fock basis so diagonal
 * elements suffice. leak is the probability lost to truncation.
 */
class PhotonState {
public:
    PhotonState(std::size_t modes, std::size_t n_max)
        : m_modes(modes), m_nmax(n_max),
          m_p(ipow(n_max + 1, modes), 0.0)
    {
        require(modes >= 1 && modes <= 6, "PhotonState: 1..6 modes");
    }

    static PhotonState vacuum(std::size_t modes, std::size_t n_max)
    {
        PhotonState s(modes, n_max);
        s.m_p[0] = 1.0;
        return s;
    }

    static PhotonState fock(std::size_t n, std::size_t n_max)
    {
        require(n <= n_max, "PhotonState::fock: n above n_max");
        PhotonState s(1, n_max);
        s.m_p[n] = 1.0;
        return s;
    }

    static PhotonState thermal(double nbar, std::size_t n_max)
    {
        require(nbar >= 0.0, "PhotonState::thermal: nbar must be >= 0");
        PhotonState s(1, n_max);
        const double x = nbar / (nbar + 1.0);
        double total = 0.0;
        for (std::size_t n = 0; n <= n_max; ++n) {
            s.m_p[n] = (1.0 - x) * std::pow(x, static_cast<double>(n));
            total += s.m_p[n];
        }
        s.m_leak = 1.0 - total;
        return s;
    }

    /* two independent thermal modes summed into one: (n+1) x^n (1-x)^2 */
    static PhotonState two_mode_thermal(double nbar, std::size_t n_max)
    {
        PhotonState s(1, n_max);
        const double x = nbar / (nbar + 1.0);
        double total = 0.0;
        for (std::size_t n = 0; n <= n_max; ++n) {
            s.m_p[n] = static_cast<double>(n + 1) *
                std::pow(x, static_cast<double>(n)) * (1.0 - x) * (1.0 - x);
            total += s.m_p[n];
        }
        s.m_leak = 1.0 - total;
        return s;
    }

    /* two-mode squeezed vacuum: P(n, n) = (1-p) p^n */
    static PhotonState two_mode_squeezed(double p, std::size_t n_max)
    {
        require(p >= 0.0 && p < 1.0, "two_mode_squeezed: p outside [0,1)");
        PhotonState s(2, n_max);
        double total = 0.0;
        for (std::size_t n = 0; n <= n_max; ++n) {
            s.at({n, n}) = (1.0 - p) * std::pow(p, static_cast<double>(n));
            total += s.at({n, n});
        }
        s.m_leak = 1.0 - total;
        return s;
    }

    std::size_t modes() const { return m_modes; }
    std::size_t n_max() const { return m_nmax; }
    double leak() const { return m_leak; }

    double &at(const std::vector<std::size_t> &n) { return m_p[index(n)]; }
    double at(const std::vector<std::size_t> &n) const { return m_p[index(n)]; }

    double total() const
    {
        double s = 0.0;
        for (double v : m_p) {
            s += v;
        }
        return s;
    }

    /* independent product of two states, modes of b appended */
    static PhotonState product(const PhotonState &a, const PhotonState &b)
    {
        require(a.m_nmax == b.m_nmax, "PhotonState::product: n_max differs");
        PhotonState s(a.m_modes + b.m_modes, a.m_nmax);
        const std::size_t nb = b.m_p.size();
        for (std::size_t i = 0; i < a.m_p.size(); ++i) {
            for (std::size_t j = 0; j < nb; ++j) {
                s.m_p[i * nb + j] = a.m_p[i] * b.m_p[j];
            }
        }
        s.m_leak = a.m_leak + b.m_leak - a.m_leak * b.m_leak;
        return s;
    }

    /* binomial loss with transmission eta on one mode */
    PhotonState thinned(std::size_t mode, double eta) const
    {
        require(mode < m_modes, "thinned: mode out of range");
        PhotonState s(m_modes, m_nmax);
        s.m_leak = m_leak;
        for_each([&](const std::vector<std::size_t> &n, double w) {
            if (w == 0.0) {
                return;
            }
            auto k = n;
            for (std::size_t j = 0; j <= n[mode]; ++j) {
                k[mode] = j;
                s.at(k) += w * binomial(n[mode], j) *
                    std::pow(eta, static_cast<double>(j)) *
                    std::pow(1.0 - eta, static_cast<double>(n[mode] - j));
            }
        });
        return s;
    }

    /* 50/50 splitter on one mode; the second output is a new last mode */
    PhotonState split(std::size_t mode) const
    {
        require(mode < m_modes, "split: mode out of range");
        PhotonState s(m_modes + 1, m_nmax);
        s.m_leak = m_leak;
        for_each([&](const std::vector<std::size_t> &n, double w) {
            if (w == 0.0) {
                return;
            }
            auto k = n;
            k.push_back(0);
            const double scale = std::pow(0.5, static_cast<double>(n[mode]));
            for (std::size_t j = 0; j <= n[mode]; ++j) {
                k[mode] = j;
                k.back() = n[mode] - j;
                s.at(k) += w * binomial(n[mode], j) * scale;
            }
        });
        return s;
    }

    void for_each(const std::function<void(const std::vector<std::size_t> &, double)> &f) const
    {
        std::vector<std::size_t> n(m_modes, 0);
        for (std::size_t i = 0; i < m_p.size(); ++i) {
            std::size_t r = i;
            for (std::size_t m = m_modes; m-- > 0;) {
                n[m] = r % (m_nmax + 1);
                r /= m_nmax + 1;
            }
            f(n, m_p[i]);
        }
    }

private:
    static std::size_t ipow(std::size_t b, std::size_t e)
    {
        std::size_t r = 1;
        for (std::size_t i = 0; i < e; ++i) {
            r *= b;
        }
        return r;
    }

    static double binomial(std::size_t n, std::size_t k)
    {
        return std::exp(std::lgamma(static_cast<double>(n) + 1.0) -
                        std::lgamma(static_cast<double>(k) + 1.0) -
                        std::lgamma(static_cast<double>(n - k) + 1.0));
    }

    std::size_t index(const std::vector<std::size_t> &n) const
    {
        require(n.size() == m_modes, "PhotonState: wrong number of modes");
        std::size_t i = 0;
        for (std::size_t m = 0; m < m_modes; ++m) {
            require(n[m] <= m_nmax, "PhotonState: photon number above n_max");
            i = i * (m_nmax + 1) + n[m];
        }
        return i;
    }

    std::size_t m_modes;
    std::size_t m_nmax;
    std::vector<double> m_p;
    double m_leak = 0.0;
};

struct ClickDetector {
    std::size_t mode;
    double eta;
    double p_dc;
};

/**
 * Joint click probability E[prod_i (1 - (1-p_dc_i)(1-eta_i)^{n_i})]
 * over the listed modes.
 */
inline double povm_clicks(const PhotonState &state,
                          const std::vector<ClickDetector> &dets)
{
    if (state.leak() > 1e-10) {
        throw Error(ErrorKind::TruncationOverflow,
                    "photon state truncation leak " + std::to_string(state.leak()));
    }
    for (const auto &d : dets) {
        require(d.mode < state.modes(), "povm_clicks: mode out of range");
        require(d.eta >= 0.0 && d.eta <= 1.0 && d.p_dc >= 0.0 && d.p_dc < 1.0,
                "povm_clicks: detector parameters out of range");
    }
    double s = 0.0;
    state.for_each([&](const std::vector<std::size_t> &n, double w) {
        if (w == 0.0) {
            return;
        }
        double v = w;
        for (const auto &d : dets) {
            v *= 1.0 - (1.0 - d.p_dc) *
                std::pow(1.0 - d.eta, static_cast<double>(n[d.mode]));
        }
        s += v;
    });
    return s;
}

inline double povm_click(const PhotonState &state, std::size_t mode,
                         double eta, double p_dc)
{
    return povm_clicks(state, {{mode, eta, p_dc}});
}

} // namespace qmem

#endif
