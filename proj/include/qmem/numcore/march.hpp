#ifndef QMEM_NUMCORE_MARCH_HPP
#define QMEM_NUMCORE_MARCH_HPP

#include <algorithm>
#include <array>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <qmem/numcore/distribution.hpp>
#include <qmem/numcore/grid.hpp>

namespace qmem {

enum class ZScheme { euler, trapezoid };

struct ConvergenceInfo {
    std::size_t nz = 0;
    std::size_t substeps = 0;
    std::size_t nclasses = 0;
    double step_error = 0.0;
    bool gate_checked = false;
    double metric = 0.0;
    double metric_refined = 0.0;
    double rel_change = 0.0;
};

struct SimulationResult {
    /* total field entering the medium (signal plus strong pulses) */
    ComplexEnvelope input;
    ComplexEnvelope output;
    /* per-slice envelopes, filled when requested */
    std::vector<double> z;
    std::vector<ComplexEnvelope> slices;
    /* class detunings and end-of-run excitation averaged over slices */
    std::vector<double> class_delta;
    std::vector<double> final_excited;
    double max_norm_deviation = 0.0;
    /* Lambda bookkeeping, per sample: 2 int dz sum kappa (|P|^2+|S|^2) and
     * 4 Gamma int dz sum kappa int |P|^2 dt */
    std::vector<double> stored;
    std::vector<double> decayed;
    ConvergenceInfo convergence;
    Warnings warnings;

    /* mean and minimum final excitation over classes with |delta| <= band */
    std::pair<double, double> excitation_in_band(double band) const
    {
        double sum = 0.0;
        double mn = 1e300;
        std::size_t cnt = 0;
        for (std::size_t c = 0; c < class_delta.size(); ++c) {
            if (std::abs(class_delta[c]) <= band) {
                sum += final_excited[c];
                mn = std::min(mn, final_excited[c]);
                ++cnt;
            }
        }
        if (cnt == 0) {
            return {0.0, 0.0};
        }
        return {sum / static_cast<double>(cnt), mn};
    }
};

namespace detail {

using State = std::array<cplx, 2>;

/* per-run data shared by all slices */
struct MarchPlan {
    TimeGrid grid;
    std::vector<cplx> field0;
    std::vector<DetuningClass> classes;
    /* source = -i sum kappa_c P_c */
    std::vector<double> kappa;
    std::size_t nz = 50;
    ZScheme scheme = ZScheme::trapezoid;
    std::size_t substeps = 1;
    /* +1 / -1 detuning sign for the step starting at each sample */
    std::vector<signed char> sign;
    /* sample indices where the slice order reverses */
    std::vector<std::size_t> medium_flips;
    /* 1 where the radiated source is suppressed */
    std::vector<unsigned char> silent;
    /* source += -wing * dE/dt */
    double wing = 0.0;
    bool keep_slices = false;
    bool budget = false;
    int threads = 0;
};

/* 4-point Lagrange weights at fraction f of [x1, x2] for nodes -1,0,1,2 */
inline std::array<double, 4> cubic_weights(double f)
{
    return {-f * (f - 1.0) * (f - 2.0) / 6.0,
            (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
            -(f + 1.0) * f * (f - 2.0) / 2.0,
            (f + 1.0) * f * (f - 1.0) / 6.0};
}

/*
 * Field at res points per sample over samples [a, b] of e (e indexed from
 * a). Stencils are shifted inward at the segment ends.
 */
inline std::vector<cplx> refine(const std::vector<cplx> &e, std::size_t res)
{
    const std::size_t m = e.size();
    std::vector<cplx> out((m - 1) * res + 1);
    std::vector<std::array<double, 4>> w(res);
    for (std::size_t s = 0; s < res; ++s) {
        w[s] = cubic_weights(static_cast<double>(s) / static_cast<double>(res));
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
        /* stencil start and shift of the evaluation point */
        std::ptrdiff_t st = static_cast<std::ptrdiff_t>(i) - 1;
        double shift = 0.0;
        if (m < 4) {
            /* linear fallback */
            for (std::size_t s = 0; s < res; ++s) {
                double f = static_cast<double>(s) / static_cast<double>(res);
                out[i * res + s] = (1.0 - f) * e[i] + f * e[i + 1];
            }
            continue;
        }
        if (st < 0) {
            st = 0;
        } else if (static_cast<std::size_t>(st) + 3 >= m) {
            st = static_cast<std::ptrdiff_t>(m) - 4;
        }
        /* evaluation point relative to the second stencil node */
        shift = static_cast<double>(st) + 1.0 - static_cast<double>(i);
        for (std::size_t s = 0; s < res; ++s) {
            std::array<double, 4> ww;
            if (shift == 0.0) {
                ww = w[s];
            } else {
                ww = cubic_weights(static_cast<double>(s) / static_cast<double>(res) - shift);
            }
            cplx v(0.0, 0.0);
            for (int q = 0; q < 4; ++q) {
                v += ww[q] * e[static_cast<std::size_t>(st) + q];
            }
            out[i * res + s] = v;
        }
    }
    out.back() = e.back();
    return out;
}

struct ClassFactors {
    /* [sign index][e^{lam h/2}, e^{lam h}] for lambda0 and lambda1 */
    cplx f0h2[2], f0h[2], f1h2[2], f1h[2];
};

template <class Model>
ClassFactors class_factors(const Model &m, double delta, double h)
{
    ClassFactors f;
    for (int s = 0; s < 2; ++s) {
        double dl = s == 0 ? delta : -delta;
        cplx l0 = m.lambda0(dl);
        cplx l1 = m.lambda1(dl);
        f.f0h2[s] = std::exp(0.5 * h * l0);
        f.f0h[s] = std::exp(h * l0);
        f.f1h2[s] = std::exp(0.5 * h * l1);
        f.f1h[s] = std::exp(h * l1);
    }
    return f;
}

/* one Lawson RK4 step; s selects the detuning sign */
template <class Model>
inline void lawson_step(State &y, double h, const ClassFactors &f, int s,
                        cplx e0, cplx em, cplx e1, cplx o0, cplx om, cplx o1)
{
    const double hh = 0.5 * h;
    State k1 = Model::rhs(y, e0, o0);
    State u{f.f0h2[s] * (y[0] + hh * k1[0]), f.f1h2[s] * (y[1] + hh * k1[1])};
    State k2 = Model::rhs(u, em, om);
    State v{f.f0h2[s] * y[0] + hh * k2[0], f.f1h2[s] * y[1] + hh * k2[1]};
    State k3 = Model::rhs(v, em, om);
    State w{f.f0h[s] * y[0] + h * f.f0h2[s] * k3[0],
            f.f1h[s] * y[1] + h * f.f1h2[s] * k3[1]};
    State k4 = Model::rhs(w, e1, o1);
    const double h6 = h / 6.0;
    y[0] = f.f0h[s] * y[0] +
        h6 * (f.f0h[s] * k1[0] + 2.0 * f.f0h2[s] * (k2[0] + k3[0]) + k4[0]);
    y[1] = f.f1h[s] * y[1] +
        h6 * (f.f1h[s] * k1[1] + 2.0 * f.f1h2[s] * (k2[1] + k3[1]) + k4[1]);
}

/* control amplitude at res points per sample over the whole grid, with
 * left and right limits so that a switch on a sample is exact */
struct ControlTrack {
    std::vector<cplx> lo;
    std::vector<cplx> hi;

    bool empty() const { return hi.empty(); }
};

template <class Model>
ControlTrack control_track(const Model &m, const TimeGrid &g, std::size_t res)
{
    ControlTrack out;
    if (!m.has_control()) {
        return out;
    }
    const std::size_t n = (g.n - 1) * res + 1;
    out.lo.resize(n);
    out.hi.resize(n);
    const double h = g.dt / static_cast<double>(res);
    const double tol = 1e-6 * h;
    for (std::size_t k = 0; k < n; ++k) {
        double t = g.t0 + h * static_cast<double>(k);
        out.lo[k] = m.omega(t, -1, tol);
        out.hi[k] = m.omega(t, 1, tol);
    }
    return out;
}

/**
 * Largest local error of one RK4 substep against two half steps for a few
 * probe classes driven by the entrance field.
 */
template <class Model>
double step_error(const Model &m, const MarchPlan &p, std::size_t sub)
{
    const auto &g = p.grid;
    const std::size_t res = 4 * sub;
    auto ef = refine(p.field0, res);
    auto of = control_track(m, g, res);
    const double h = g.dt / static_cast<double>(sub);

    std::vector<std::size_t> probes;
    const auto nc = p.classes.size();
    for (double frac : {0.5, 0.25, 0.75, 0.0, 1.0}) {
        auto c = static_cast<std::size_t>(std::round(frac * static_cast<double>(nc - 1)));
        if (std::find(probes.begin(), probes.end(), c) == probes.end()) {
            probes.push_back(c);
        }
    }
    double worst = 0.0;
    for (auto c : probes) {
        auto fh = class_factors(m, p.classes[c].delta, h);
        auto fh2 = class_factors(m, p.classes[c].delta, 0.5 * h);
        State y = m.initial();
        auto L = [&](std::size_t k) {
            return of.empty() ? cplx{} : of.lo[k];
        };
        auto H = [&](std::size_t k) {
            return of.empty() ? cplx{} : of.hi[k];
        };
        for (std::size_t i = 0; i + 1 < g.n; ++i) {
            int s = p.sign[i] > 0 ? 0 : 1;
            for (std::size_t q = 0; q < sub; ++q) {
                std::size_t k = i * res + 4 * q;
                State big = y;
                lawson_step<Model>(big, h, fh, s, ef[k], ef[k + 2], ef[k + 4],
                                   H(k), H(k + 2), L(k + 4));
                lawson_step<Model>(y, 0.5 * h, fh2, s, ef[k], ef[k + 1],
                                   ef[k + 2], H(k), H(k + 1), L(k + 2));
                lawson_step<Model>(y, 0.5 * h, fh2, s, ef[k + 2], ef[k + 3],
                                   ef[k + 4], H(k + 2), H(k + 3), L(k + 4));
                double e = std::max(std::abs(big[0] - y[0]),
                                    std::abs(big[1] - y[1])) * 16.0 / 15.0;
                worst = std::max(worst, e);
            }
        }
    }
    return worst;
}

struct SliceOutput {
    std::vector<cplx> source;
    std::vector<double> stored;
    std::vector<double> dissipative;
};

/* classes of one block in structure-of-arrays layout */
struct BlockState {
    static constexpr std::size_t B = 16;
    double y0r[B], y0i[B], y1r[B], y1i[B];
    /* [sign][factor] real/imag: f0h2, f0h, f1h2, f1h */
    double fr[2][4][B], fi[2][4][B];
    double kap[B];

    void load(const std::vector<State> &st, const std::vector<ClassFactors> &f,
              const std::vector<double> &kappa, std::size_t base,
              std::size_t c0, std::size_t w)
    {
        for (std::size_t c = 0; c < B; ++c) {
            std::size_t src = c < w ? c : 0;
            const auto &y = st[base + c0 + src];
            y0r[c] = y[0].real();
            y0i[c] = y[0].imag();
            y1r[c] = y[1].real();
            y1i[c] = y[1].imag();
            const auto &ff = f[c0 + src];
            for (int s = 0; s < 2; ++s) {
                const cplx v[4] = {ff.f0h2[s], ff.f0h[s], ff.f1h2[s], ff.f1h[s]};
                for (int q = 0; q < 4; ++q) {
                    fr[s][q][c] = v[q].real();
                    fi[s][q][c] = v[q].imag();
                }
            }
            kap[c] = c < w ? kappa[c0 + c] : 0.0;
        }
    }

    void store(std::vector<State> &st, std::size_t base, std::size_t c0,
               std::size_t w) const
    {
        for (std::size_t c = 0; c < w; ++c) {
            st[base + c0 + c] = y(c);
        }
    }

    /* sum over lanes of kappa * coherence, fixed lane order */
    template <class Model>
    cplx source() const
    {
        double pr[B], pi_[B];
#pragma omp simd
        for (std::size_t c = 0; c < B; ++c) {
            double r, i;
            Model::coherence_real(y0r[c], y0i[c], y1r[c], y1i[c], r, i);
            pr[c] = kap[c] * r;
            pi_[c] = kap[c] * i;
        }
        double sr = 0.0;
        double si = 0.0;
        for (std::size_t c = 0; c < B; ++c) {
            sr += pr[c];
            si += pi_[c];
        }
        return {sr, si};
    }

    double norm_deviation(std::size_t w) const
    {
        double dev = 0.0;
        for (std::size_t c = 0; c < w; ++c) {
            double n = y0r[c] * y0r[c] + y0i[c] * y0i[c] + y1r[c] * y1r[c] +
                y1i[c] * y1i[c];
            dev = std::max(dev, std::abs(n - 1.0));
        }
        return dev;
    }

    State y(std::size_t c) const
    {
        return {cplx(y0r[c], y0i[c]), cplx(y1r[c], y1i[c])};
    }

    /* Lawson RK4 over all lanes; Model::rhs_real gives the coupling */
    template <class Model>
    void step(std::size_t, int s, double h, cplx e0, cplx em, cplx e1,
              cplx o0, cplx om, cplx o1)
    {
        const double hh = 0.5 * h;
        const double h6 = h / 6.0;
        const double *ar = fr[s][0], *ai = fi[s][0]; /* f0h2 */
        const double *br = fr[s][1], *bi = fi[s][1]; /* f0h */
        const double *cr = fr[s][2], *ci = fi[s][2]; /* f1h2 */
        const double *dr = fr[s][3], *di = fi[s][3]; /* f1h */
#define QMEM_CMUL_R(xr, xi, yr, yi) ((xr) * (yr) - (xi) * (yi))
#define QMEM_CMUL_I(xr, xi, yr, yi) ((xr) * (yi) + (xi) * (yr))
        const double e0r = e0.real(), e0i = e0.imag();
        const double emr = em.real(), emi = em.imag();
        const double e1r = e1.real(), e1i = e1.imag();
        const double o0r = o0.real(), o0i = o0.imag();
        const double omr = om.real(), omi = om.imag();
        const double o1r = o1.real(), o1i = o1.imag();
#pragma omp simd
        for (std::size_t c = 0; c < B; ++c) {
            double p0r = y0r[c], p0i = y0i[c], p1r = y1r[c], p1i = y1i[c];
            double k10r, k10i, k11r, k11i;
            Model::rhs_real(p0r, p0i, p1r, p1i, e0r, e0i, o0r, o0i,
                            k10r, k10i, k11r, k11i);
            double t0r = p0r + hh * k10r, t0i = p0i + hh * k10i;
            double t1r = p1r + hh * k11r, t1i = p1i + hh * k11i;
            double u0r = QMEM_CMUL_R(ar[c], ai[c], t0r, t0i);
            double u0i = QMEM_CMUL_I(ar[c], ai[c], t0r, t0i);
            double u1r = QMEM_CMUL_R(cr[c], ci[c], t1r, t1i);
            double u1i = QMEM_CMUL_I(cr[c], ci[c], t1r, t1i);
            double k20r, k20i, k21r, k21i;
            Model::rhs_real(u0r, u0i, u1r, u1i, emr, emi, omr, omi,
                            k20r, k20i, k21r, k21i);
            double a0r = QMEM_CMUL_R(ar[c], ai[c], p0r, p0i);
            double a0i = QMEM_CMUL_I(ar[c], ai[c], p0r, p0i);
            double a1r = QMEM_CMUL_R(cr[c], ci[c], p1r, p1i);
            double a1i = QMEM_CMUL_I(cr[c], ci[c], p1r, p1i);
            double k30r, k30i, k31r, k31i;
            Model::rhs_real(a0r + hh * k20r, a0i + hh * k20i,
                            a1r + hh * k21r, a1i + hh * k21i, emr, emi, omr,
                            omi, k30r, k30i, k31r, k31i);
            double b0r = QMEM_CMUL_R(br[c], bi[c], p0r, p0i);
            double b0i = QMEM_CMUL_I(br[c], bi[c], p0r, p0i);
            double b1r = QMEM_CMUL_R(dr[c], di[c], p1r, p1i);
            double b1i = QMEM_CMUL_I(dr[c], di[c], p1r, p1i);
            double w0r = b0r + h * QMEM_CMUL_R(ar[c], ai[c], k30r, k30i);
            double w0i = b0i + h * QMEM_CMUL_I(ar[c], ai[c], k30r, k30i);
            double w1r = b1r + h * QMEM_CMUL_R(cr[c], ci[c], k31r, k31i);
            double w1i = b1i + h * QMEM_CMUL_I(cr[c], ci[c], k31r, k31i);
            double k40r, k40i, k41r, k41i;
            Model::rhs_real(w0r, w0i, w1r, w1i, e1r, e1i, o1r, o1i,
                            k40r, k40i, k41r, k41i);
            double s0r = k20r + k30r, s0i = k20i + k30i;
            double s1r = k21r + k31r, s1i = k21i + k31i;
            y0r[c] = b0r + h6 * (QMEM_CMUL_R(br[c], bi[c], k10r, k10i) +
                                 2.0 * QMEM_CMUL_R(ar[c], ai[c], s0r, s0i) + k40r);
            y0i[c] = b0i + h6 * (QMEM_CMUL_I(br[c], bi[c], k10r, k10i) +
                                 2.0 * QMEM_CMUL_I(ar[c], ai[c], s0r, s0i) + k40i);
            y1r[c] = b1r + h6 * (QMEM_CMUL_R(dr[c], di[c], k11r, k11i) +
                                 2.0 * QMEM_CMUL_R(cr[c], ci[c], s1r, s1i) + k41r);
            y1i[c] = b1i + h6 * (QMEM_CMUL_I(dr[c], di[c], k11r, k11i) +
                                 2.0 * QMEM_CMUL_I(cr[c], ci[c], s1r, s1i) + k41i);
        }
#undef QMEM_CMUL_R
#undef QMEM_CMUL_I
    }
};

template <class Model>
class Marcher {
public:
    Marcher(const Model &m, const MarchPlan &p)
        : m_model(m), m_plan(p),
          m_natoms(p.scheme == ZScheme::euler ? p.nz : p.nz + 1),
          m_states(m_natoms * p.classes.size(), m.initial())
    {
        const double h = p.grid.dt / static_cast<double>(p.substeps);
        m_factors.reserve(p.classes.size());
        for (const auto &c : p.classes) {
            m_factors.push_back(class_factors(m, c.delta, h));
        }
        m_omega = control_track(m, p.grid, 2 * p.substeps);
    }

    SimulationResult run()
    {
        const auto &p = m_plan;
        const auto &g = p.grid;
        SimulationResult res;
        res.input = ComplexEnvelope(g, p.field0);
        res.output = ComplexEnvelope(g);
        if (p.budget) {
            res.stored.assign(g.n, 0.0);
            res.decayed.assign(g.n, 0.0);
        }
        const double dz = 1.0 / static_cast<double>(p.nz);

        std::vector<std::size_t> bounds{0};
        for (auto f : p.medium_flips) {
            if (f > bounds.back() && f < g.n - 1) {
                bounds.push_back(f);
            }
        }
        bounds.push_back(g.n - 1);
        const bool keep = p.keep_slices && bounds.size() == 2;
        if (keep) {
            res.z.resize(p.nz + 1);
            res.slices.assign(p.nz + 1, ComplexEnvelope(g));
        }

        for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
            const std::size_t a = bounds[seg];
            const std::size_t b = bounds[seg + 1];
            const bool last = seg + 2 == bounds.size();
            const bool fwd = seg % 2 == 0;
            std::vector<cplx> e(p.field0.begin() + a, p.field0.begin() + b + 1);
            auto atom = [&](std::size_t j) { return fwd ? j : m_natoms - 1 - j; };
            auto store = [&](std::size_t j) {
                if (keep) {
                    res.z[j] = dz * static_cast<double>(j);
                    std::copy(e.begin(), e.end(), res.slices[j].samples.begin());
                }
            };
            auto account = [&](const SliceOutput &so, double w) {
                if (!p.budget) {
                    return;
                }
                for (std::size_t i = 0; i < so.stored.size(); ++i) {
                    res.stored[a + i] += w * so.stored[i];
                    res.decayed[a + i] += w * so.dissipative[i];
                }
            };
            store(0);
            if (p.scheme == ZScheme::euler) {
                for (std::size_t j = 0; j < p.nz; ++j) {
                    auto so = slice(atom(j), e, a, b, last);
                    add_wing(so.source, e, a);
                    for (std::size_t i = 0; i < e.size(); ++i) {
                        e[i] += dz * so.source[i];
                    }
                    account(so, dz);
                    store(j + 1);
                }
            } else {
                auto prev = slice(atom(0), e, a, b, last);
                add_wing(prev.source, e, a);
                account(prev, 0.5 * dz);
                std::vector<cplx> pred(e.size());
                for (std::size_t j = 0; j < p.nz; ++j) {
                    for (std::size_t i = 0; i < e.size(); ++i) {
                        pred[i] = e[i] + dz * prev.source[i];
                    }
                    auto next = slice(atom(j + 1), pred, a, b, last);
                    add_wing(next.source, pred, a);
                    for (std::size_t i = 0; i < e.size(); ++i) {
                        e[i] += 0.5 * dz * (prev.source[i] + next.source[i]);
                    }
                    account(next, j + 1 == p.nz ? 0.5 * dz : dz);
                    prev = std::move(next);
                    store(j + 1);
                }
            }
            std::copy(e.begin(), e.end(), res.output.samples.begin() + a);
        }
        if (p.budget) {
            for (std::size_t i = 0; i < g.n; ++i) {
                res.stored[i] *= 2.0;
            }
            /* trapezoid running integral of the dissipative rate */
            std::vector<double> rate = res.decayed;
            double acc = 0.0;
            res.decayed[0] = 0.0;
            for (std::size_t i = 1; i < g.n; ++i) {
                acc += 0.5 * g.dt * (rate[i - 1] + rate[i]);
                res.decayed[i] = acc;
            }
            for (auto &v : res.decayed) {
                v *= 4.0 * m_model.gamma_p();
            }
        }

        const auto nc = p.classes.size();
        res.class_delta.resize(nc);
        res.final_excited.assign(nc, 0.0);
        for (std::size_t c = 0; c < nc; ++c) {
            res.class_delta[c] = p.classes[c].delta;
            double acc = 0.0;
            for (std::size_t j = 0; j < m_natoms; ++j) {
                acc += m_model.excited(m_states[j * nc + c]);
            }
            res.final_excited[c] = acc / static_cast<double>(m_natoms);
        }
        res.max_norm_deviation = m_norm_dev;
        return res;
    }

private:
    void add_wing(std::vector<cplx> &src, const std::vector<cplx> &e,
                  std::size_t a) const
    {
        const auto &p = m_plan;
        const std::size_t m = e.size();
        const double inv = 1.0 / p.grid.dt;
        if (p.wing != 0.0 && m >= 3) {
            for (std::size_t i = 0; i < m; ++i) {
                cplx de;
                if (i == 0) {
                    de = (e[1] - e[0]) * inv;
                } else if (i + 1 == m) {
                    de = (e[m - 1] - e[m - 2]) * inv;
                } else {
                    de = 0.5 * (e[i + 1] - e[i - 1]) * inv;
                }
                src[i] -= p.wing * de;
            }
        }
        if (!p.silent.empty()) {
            for (std::size_t i = 0; i < m; ++i) {
                if (p.silent[a + i]) {
                    src[i] = 0.0;
                }
            }
        }
    }

    /* evolve all classes of one atom slice over samples [a, b] */
    SliceOutput slice(std::size_t atom, const std::vector<cplx> &e,
                      std::size_t a, std::size_t b, bool last)
    {
        const auto &p = m_plan;
        const std::size_t sub = p.substeps;
        const std::size_t res = 2 * sub;
        const std::size_t m = b - a + 1;
        const double h = p.grid.dt / static_cast<double>(sub);
        auto ef = refine(e, res);
        const auto nc = p.classes.size();
        const std::size_t bs = BlockState::B;
        const std::size_t nb = (nc + bs - 1) / bs;
        const bool budget = p.budget;

        std::vector<std::vector<cplx>> part(nb);
        std::vector<std::vector<double>> pst(budget ? nb : 0);
        std::vector<std::vector<double>> pds(budget ? nb : 0);
        std::vector<double> ndev(nb, 0.0);
        const std::size_t off = a * res;
        const bool ctrl = !m_omega.empty();

        int nthreads = p.threads;
#ifdef _OPENMP
        if (nthreads <= 0) {
            nthreads = omp_get_max_threads();
        }
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#endif
        for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(nb); ++bi) {
            auto &acc = part[bi];
            acc.assign(m, cplx{});
            if (budget) {
                pst[bi].assign(m, 0.0);
                pds[bi].assign(m, 0.0);
            }
            double dev = 0.0;
            const std::size_t c0 = static_cast<std::size_t>(bi) * bs;
            const std::size_t c1 = std::min(nc, c0 + bs);
            const std::size_t w = c1 - c0;
            BlockState blk;
            blk.load(m_states, m_factors, p.kappa, atom * nc, c0, w);
            const bool cons = m_model.conservative();
            auto record = [&](std::size_t i) {
                acc[i] += blk.template source<Model>();
                if (budget) {
                    double st = 0.0;
                    double ds = 0.0;
                    for (std::size_t c = 0; c < w; ++c) {
                        auto y = blk.y(c);
                        st += blk.kap[c] * (std::norm(y[0]) + std::norm(y[1]));
                        ds += blk.kap[c] * m_model.dissipative(y);
                    }
                    pst[bi][i] += st;
                    pds[bi][i] += ds;
                }
                if (cons) {
                    dev = std::max(dev, blk.norm_deviation(w));
                }
            };
            for (std::size_t i = 0; i + 1 < m; ++i) {
                record(i);
                const int s = p.sign[a + i] > 0 ? 0 : 1;
                for (std::size_t q = 0; q < sub; ++q) {
                    const std::size_t k = i * res + 2 * q;
                    cplx o0, om, o1;
                    if (ctrl) {
                        o0 = m_omega.hi[off + k];
                        om = m_omega.hi[off + k + 1];
                        o1 = m_omega.lo[off + k + 2];
                    }
                    blk.template step<Model>(w, s, h, ef[k], ef[k + 1], ef[k + 2],
                                             o0, om, o1);
                }
            }
            if (last) {
                record(m - 1);
            } else if (cons) {
                dev = std::max(dev, blk.norm_deviation(w));
            }
            blk.store(m_states, atom * nc, c0, w);
            ndev[bi] = dev;
        }

        SliceOutput so;
        so.source.assign(m, cplx{});
        if (budget) {
            so.stored.assign(m, 0.0);
            so.dissipative.assign(m, 0.0);
        }
        for (std::size_t bi = 0; bi < nb; ++bi) {
            for (std::size_t i = 0; i < m; ++i) {
                so.source[i] += part[bi][i];
            }
            if (budget) {
                for (std::size_t i = 0; i < m; ++i) {
                    so.stored[i] += pst[bi][i];
                    so.dissipative[i] += pds[bi][i];
                }
            }
            m_norm_dev = std::max(m_norm_dev, ndev[bi]);
        }
        const cplx mi(0.0, -1.0);
        for (auto &v : so.source) {
            v *= mi;
        }
        return so;
    }

    const Model &m_model;
    const MarchPlan &m_plan;
    std::size_t m_natoms;
    std::vector<State> m_states;
    std::vector<ClassFactors> m_factors;
    ControlTrack m_omega;
    double m_norm_dev = 0.0;
};

} // namespace detail
} // namespace qmem

#endif
