#include "cascade/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace cascade {

namespace {

// 7-point Gauss-Legendre on [-1,1]
constexpr double gl_x[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double gl_w[7] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189, 0.2797053914892767, 0.1294849661688697};

} // namespace

double CarlemanWeights::integrand(double y) const {
    if (at0_) return y / eval_k(k_, y) * std::exp(R_ * y * y);
    const double z = y - 1.0;
    return z / eval_k(k_, y) * std::exp(R_ * z * z);
}

double CarlemanWeights::partial_cell(double lo, double hi) const {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double s = 0.0;
    for (int q = 0; q < 7; ++q) s += gl_w[q] * integrand(c + h * gl_x[q]);
    return s * h;
}

CarlemanWeights CarlemanWeights::build(const KModel& k, double R, const CarlemanWindow& w,
                                       std::size_t table_cells) {
    if (!(w.t_hi > w.t_lo))
        throw std::invalid_argument("carleman weights: empty time window");
    if (table_cells < 16)
        throw std::invalid_argument("carleman weights: table too coarse");

    CarlemanWeights cw;
    cw.window_ = w;
    cw.R_ = R;
    cw.k_ = k;
    cw.at0_ = !(k.kind == KModel::Kind::power_at_1 ||
                (k.kind == KModel::Kind::tabulated &&
                 k.declared_side == DegenerateSide::at1));

    // Cell edges graded cubically toward the degenerate endpoint.
    cw.cell_edges_.resize(table_cells + 1);
    for (std::size_t m = 0; m <= table_cells; ++m) {
        const double s = double(m) / double(table_cells);
        cw.cell_edges_[m] = cw.at0_ ? s * s * s : 1.0 - std::pow(1.0 - s, 3.0);
    }
    cw.cell_edges_.front() = 0.0;
    cw.cell_edges_.back() = 1.0;

    cw.cum_.assign(table_cells + 1, 0.0);
    for (std::size_t m = 0; m < table_cells; ++m)
        cw.cum_[m + 1] = cw.cum_[m] + cw.partial_cell(cw.cell_edges_[m], cw.cell_edges_[m + 1]);

    // p is monotone (integrand has one sign), so the sup sits at x = 1.
    cw.sup_p_ = std::max(std::abs(cw.cum_.front()), std::abs(cw.cum_.back()));
    return cw;
}

double CarlemanWeights::p(double x) const {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("carleman weights: p evaluated outside [0,1]");
    // innermost cell edge <= x
    std::size_t lo = 0, hi = cell_edges_.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (cell_edges_[mid] <= x)
            lo = mid;
        else
            hi = mid;
    }
    if (x == cell_edges_[lo]) return cum_[lo];
    return cum_[lo] + partial_cell(cell_edges_[lo], x);
}

double CarlemanWeights::theta(double t, double a) const {
    const double dt1 = t - window_.t_lo;
    const double dt2 = window_.t_hi - t;
    const double da1 = a - window_.a_lo;
    const double d = std::pow(dt1, 4) * std::pow(dt2, 4) * std::pow(da1, 4);
    return 1.0 / d;
}

double CarlemanWeights::log_theta(double t, double a) const {
    const double dt1 = t - window_.t_lo;
    const double dt2 = window_.t_hi - t;
    const double da1 = a - window_.a_lo;
    return -4.0 * (std::log(dt1) + std::log(dt2) + std::log(da1));
}

double CarlemanWeights::phi(double t, double a, double x) const {
    return theta(t, a) * (p(x) - 2.0 * sup_p_);
}

double CarlemanWeights::product(double theta_pow, double s, double t, double a,
                                double x) const {
    const double dt1 = t - window_.t_lo;
    const double dt2 = window_.t_hi - t;
    const double da1 = a - window_.a_lo;
    if (dt1 <= 0.0 || dt2 <= 0.0 || da1 <= 0.0) return 0.0;  // edge limit

    const double lt = log_theta(t, a);
    const double th = theta(t, a);
    const double expo = theta_pow * lt + 2.0 * s * th * (p(x) - 2.0 * sup_p_);
    if (expo < -700.0) return 0.0;
    return std::exp(expo);
}

} // namespace cascade
