#include "cascade/degeneracy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cascade {

namespace detail {

Pchip Pchip::fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw std::invalid_argument("pchip: need at least two samples");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x[i] < x[i + 1]))
            throw std::invalid_argument("pchip: abscissae must be strictly increasing");

    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        del[i] = (y[i + 1] - y[i]) / h[i];
    }

    Pchip p;
    p.x = x;
    p.y = y;
    p.d.assign(n, 0.0);

    if (n == 2) {
        p.d[0] = p.d[1] = del[0];
        return p;
    }

    // Interior slopes: weighted harmonic mean when the secants agree in sign.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (del[i - 1] * del[i] > 0.0) {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            p.d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }

    // One-sided three-point endpoint slopes, clipped to preserve monotonicity.
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0)
            s = 0.0;
        else if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0))
            s = 3.0 * d0;
        return s;
    };
    p.d[0] = endpoint(h[0], h[1], del[0], del[1]);
    p.d[n - 1] = endpoint(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    return p;
}

namespace {

std::size_t cell_of(const std::vector<double>& x, double xq) {
    // Out-of-range queries continue the boundary cubic.
    if (xq <= x.front()) return 0;
    if (xq >= x.back()) return x.size() - 2;
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    return static_cast<std::size_t>(it - x.begin()) - 1;
}

} // namespace

double Pchip::eval(double xq) const {
    const std::size_t i = cell_of(x, xq);
    const double h = x[i + 1] - x[i];
    const double t = (xq - x[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y[i] + h * h10 * d[i] + h01 * y[i + 1] + h * h11 * d[i + 1];
}

double Pchip::deriv(double xq) const {
    const std::size_t i = cell_of(x, xq);
    const double h = x[i + 1] - x[i];
    const double t = (xq - x[i]) / h;
    const double t2 = t * t;
    const double g00 = (6 * t2 - 6 * t) / h;
    const double g10 = 3 * t2 - 4 * t + 1;
    const double g01 = (-6 * t2 + 6 * t) / h;
    const double g11 = 3 * t2 - 2 * t;
    return g00 * y[i] + g10 * d[i] + g01 * y[i + 1] + g11 * d[i + 1];
}

double Pchip::deriv2(double xq) const {
    const std::size_t i = cell_of(x, xq);
    const double h = x[i + 1] - x[i];
    const double t = (xq - x[i]) / h;
    const double q00 = (12 * t - 6) / (h * h);
    const double q10 = (6 * t - 4) / h;
    const double q01 = (-12 * t + 6) / (h * h);
    const double q11 = (6 * t - 2) / h;
    return q00 * y[i] + q10 * d[i] + q01 * y[i + 1] + q11 * d[i + 1];
}

} // namespace detail

KModel KModel::power_at_0(double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("power_at_0: exponent must be positive");
    KModel m;
    m.kind = Kind::power_at_0;
    m.exponent = alpha;
    m.declared_side = DegenerateSide::at0;
    return m;
}

KModel KModel::power_at_1(double beta) {
    if (!(beta > 0.0))
        throw std::invalid_argument("power_at_1: exponent must be positive");
    KModel m;
    m.kind = Kind::power_at_1;
    m.exponent = beta;
    m.declared_side = DegenerateSide::at1;
    return m;
}

KModel KModel::tabulated(std::vector<double> xs, std::vector<double> ks,
                         DegenerateSide side) {
    if (xs.size() != ks.size() || xs.size() < 4)
        throw std::invalid_argument("tabulated: need at least four samples");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < 0.0 || xs[i] > 1.0)
            throw std::invalid_argument("tabulated: abscissae must lie in [0,1]");
        if (!(ks[i] > 0.0))
            throw std::invalid_argument("tabulated: samples must be strictly positive");
        if (i > 0 && !(xs[i] > xs[i - 1]))
            throw std::invalid_argument("tabulated: abscissae must be strictly increasing");
    }
    KModel m;
    m.kind = Kind::tabulated;
    m.xs = std::move(xs);
    m.ks = std::move(ks);
    m.declared_side = side;
    return m;
}

namespace {

void require_domain(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("coefficient evaluated outside [0,1]");
}

detail::Pchip fit_of(const KModel& m) {
    return detail::Pchip::fit(m.xs, m.ks);
}

} // namespace

double eval_k(const KModel& m, double x) {
    require_domain(x);
    switch (m.kind) {
        case KModel::Kind::power_at_0: return std::pow(x, m.exponent);
        case KModel::Kind::power_at_1: return std::pow(1.0 - x, m.exponent);
        case KModel::Kind::tabulated:  return fit_of(m).eval(x);
    }
    throw std::logic_error("eval_k: bad kind");
}

double eval_k_derivative(const KModel& m, double x) {
    require_domain(x);
    switch (m.kind) {
        case KModel::Kind::power_at_0:
            return m.exponent * std::pow(x, m.exponent - 1.0);
        case KModel::Kind::power_at_1:
            return -m.exponent * std::pow(1.0 - x, m.exponent - 1.0);
        case KModel::Kind::tabulated:
            return fit_of(m).deriv(x);
    }
    throw std::logic_error("eval_k_derivative: bad kind");
}

namespace {

struct RatioEval {
    // r(x) = x k'/k near 0, (x-1) k'/k near 1; r'(x) for the derivative check.
    const KModel& m;
    detail::Pchip fit;   // only used for tabulated
    bool tab;

    explicit RatioEval(const KModel& model)
        : m(model),
          fit(model.kind == KModel::Kind::tabulated ? fit_of(model) : detail::Pchip{}),
          tab(model.kind == KModel::Kind::tabulated) {}

    double k(double x) const { return tab ? fit.eval(x) : eval_k(m, x); }
    double kp(double x) const { return tab ? fit.deriv(x) : eval_k_derivative(m, x); }
    double kpp(double x) const {
        if (tab) return fit.deriv2(x);
        if (m.kind == KModel::Kind::power_at_0)
            return m.exponent * (m.exponent - 1.0) * std::pow(x, m.exponent - 2.0);
        return m.exponent * (m.exponent - 1.0) * std::pow(1.0 - x, m.exponent - 2.0);
    }
    double q(double x) const {
        return m.declared_side == DegenerateSide::at0 ? x : x - 1.0;
    }
    double r(double x) const { return q(x) * kp(x) / k(x); }
    double rp(double x) const {
        const double kk = k(x), dk = kp(x);
        return (dk + q(x) * kpp(x)) / kk - q(x) * dk * dk / (kk * kk);
    }
};

// Innermost abscissa the model can resolve on its degenerate side.  A table
// says nothing about scales below its first interior knot: inside the first
// cell the interpolant's leading term is linear, so probing there would
// reclassify every vanishing table as M = 1.
double resolution_limit(const KModel& m) {
    if (m.kind != KModel::Kind::tabulated) return 1e-12;
    if (m.declared_side == DegenerateSide::at0) {
        for (double x : m.xs)
            if (x > 0.0) return std::max(x, 1e-12);
        return 1e-12;
    }
    for (auto it = m.xs.rbegin(); it != m.xs.rend(); ++it)
        if (*it < 1.0) return std::max(1.0 - *it, 1e-12);
    return 1e-12;
}

// Dyadic windows marching toward the degenerate endpoint.  Window l covers
// distances [2^-(l+1), 2^-l] from the endpoint.
std::vector<std::vector<double>> refinement_windows(const KModel& m,
                                                    std::size_t per_level) {
    const double lim = resolution_limit(m);
    std::vector<std::vector<double>> levels;
    for (int l = 1; l < 60; ++l) {
        const double hi = std::pow(2.0, -l);
        const double lo = hi * 0.5;
        if (lo < lim) break;
        std::vector<double> pts;
        pts.reserve(per_level);
        for (std::size_t i = 0; i < per_level; ++i) {
            const double s = lo + (hi - lo) * (double(i) + 0.5) / double(per_level);
            pts.push_back(m.declared_side == DegenerateSide::at0 ? s : 1.0 - s);
        }
        levels.push_back(std::move(pts));
    }
    return levels;
}

bool grows_without_bound(const std::vector<double>& per_level_sup) {
    // Flags monotone growth by >=1.3x per level over the innermost levels.
    const std::size_t n = per_level_sup.size();
    if (n < 4) return false;
    int growing = 0;
    for (std::size_t i = n - 3; i < n; ++i)
        if (per_level_sup[i] > 1.3 * per_level_sup[i - 1]) ++growing;
    return growing == 3;
}

} // namespace

DegeneracyReport classify_degeneracy(const KModel& m, std::size_t n_samples) {
    if (n_samples < 8) n_samples = 8;
    RatioEval ratio(m);

    DegeneracyReport rep;
    rep.side = m.declared_side;

    double sup = -std::numeric_limits<double>::infinity();
    std::size_t used = 0;

    for (std::size_t i = 1; i < n_samples; ++i) {
        const double x = double(i) / double(n_samples);
        sup = std::max(sup, ratio.r(x));
        ++used;
    }
    const auto levels = refinement_windows(m, 32);
    double innermost = sup;
    for (const auto& level : levels) {
        double lsup = -std::numeric_limits<double>::infinity();
        for (double x : level) {
            lsup = std::max(lsup, ratio.r(x));
            ++used;
        }
        sup = std::max(sup, lsup);
        innermost = lsup;
    }

    rep.M_best = sup;
    rep.n_samples = used;
    if (sup > 0.0 && sup < 1.0)
        rep.cls = DegeneracyClass::weak;
    else if (sup >= 1.0 && sup < 2.0)
        rep.cls = DegeneracyClass::strong;
    else
        rep.cls = DegeneracyClass::none;

    std::ostringstream note;
    note << "endpoint ratio limit from innermost level: " << innermost;
    rep.note = note.str();
    return rep;
}

std::vector<HypothesisItem> check_carleman_hypotheses(const KModel& m) {
    RatioEval ratio(m);
    std::vector<HypothesisItem> items;

    {
        HypothesisItem it;
        it.name = "interior_positivity";
        double kmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < 512; ++i)
            kmin = std::min(kmin, ratio.k(double(i) / 512.0));
        it.pass = kmin > 0.0;
        it.detail = "min k over interior samples: " + std::to_string(kmin);
        items.push_back(std::move(it));
    }

    const auto levels = refinement_windows(m, 64);
    std::vector<double> sup_r, sup_rp;
    for (const auto& level : levels) {
        double sr = 0.0, srp = 0.0;
        for (double x : level) {
            sr = std::max(sr, std::abs(ratio.r(x)));
            // r'(x) is the difference of two terms that both blow up like
            // 1/x when r is nearly constant, so the raw value is dominated
            // by cancellation noise near the endpoint; values below the
            // rounding floor of the two terms count as zero.
            const double kk = ratio.k(x), dk = ratio.kp(x);
            const double t1 = (dk + ratio.q(x) * ratio.kpp(x)) / kk;
            const double t2 = ratio.q(x) * dk * dk / (kk * kk);
            const double val = std::abs(t1 - t2);
            const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                                 (std::abs(t1) + std::abs(t2));
            srp = std::max(srp, val <= floor ? 0.0 : val);
        }
        sup_r.push_back(sr);
        sup_rp.push_back(srp);
    }

    {
        HypothesisItem it;
        it.name = "ratio_bounded_near_endpoint";
        const bool growing = grows_without_bound(sup_r);
        bool finite = true;
        for (double s : sup_r) finite = finite && std::isfinite(s);
        it.pass = finite && !growing;
        std::ostringstream d;
        d << "per-level sup |x k'/k| near endpoint:";
        for (double s : sup_r) d << " " << s;
        it.detail = d.str();
        items.push_back(std::move(it));
    }

    {
        HypothesisItem it;
        it.name = "ratio_below_2";
        const auto rep = classify_degeneracy(m);
        it.pass = rep.M_best < 2.0;
        it.detail = "M_best = " + std::to_string(rep.M_best);
        items.push_back(std::move(it));
    }

    {
        HypothesisItem it;
        it.name = "ratio_derivative_bounded";
        const bool growing = grows_without_bound(sup_rp);
        bool finite = true;
        for (double s : sup_rp) finite = finite && std::isfinite(s);
        it.pass = finite && !growing;
        std::ostringstream d;
        d << "per-level sup |d/dx (x k'/k)| near endpoint:";
        for (double s : sup_rp) d << " " << s;
        it.detail = d.str();
        items.push_back(std::move(it));
    }

    return items;
}

PairOrdering check_pair_ordering(const KModel& k1, const KModel& k2,
                                 std::size_t n_samples) {
    PairOrdering ord;
    ord.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= n_samples; ++i) {
        const double x = double(i) / double(n_samples);
        const double margin = eval_k(k1, x) - eval_k(k2, x);
        if (margin < ord.min_margin) {
            ord.min_margin = margin;
            ord.at_x = x;
        }
    }
    ord.ordered = ord.min_margin >= 0.0;
    return ord;
}

} // namespace cascade
