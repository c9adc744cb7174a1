#include "cascade/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace cascade {

double birth_ramp(double a, double abar, double A, double scale) {
    if (a <= abar) return 0.0;
    const double span = A - abar;
    if (!(span > 0.0)) return 0.0;
    double s = (a - abar) / span;
    if (s > 1.0) s = 1.0;
    return scale * s * s * (3.0 - 2.0 * s);
}

RatePack RatePack::constant_rates(double mu11, double mu22, double mu21,
                                  double abar1, double abar2, double A,
                                  double beta_scale1, double beta_scale2) {
    RatePack r;
    r.mu11 = [mu11](double, double, double) { return mu11; };
    r.mu22 = [mu22](double, double, double) { return mu22; };
    r.mu21 = [mu21](double, double, double) { return mu21; };
    r.beta1 = [abar1, A, beta_scale1](double a, double) {
        return birth_ramp(a, abar1, A, beta_scale1);
    };
    r.beta2 = [abar2, A, beta_scale2](double a, double) {
        return birth_ramp(a, abar2, A, beta_scale2);
    };
    r.abar1 = abar1;
    r.abar2 = abar2;
    return r;
}

void RatePack::validate(const TensorGrid& g) const {
    if (!mu11 || !mu22 || !mu21 || !beta1 || !beta2)
        throw std::invalid_argument("rates: all rate callbacks must be set");
    if (!(abar1 > 0.0) || !(abar2 > 0.0))
        throw std::invalid_argument("rates: birth bands abar_i must be positive");

    const double eps = 1e-12 * (1.0 + g.A);
    for (std::size_t n = 0; n <= g.Nt; n += std::max<std::size_t>(1, g.Nt / 8)) {
        for (std::size_t j = 0; j <= g.Na; ++j) {
            for (std::size_t i = 0; i <= g.Nx; i += std::max<std::size_t>(1, g.Nx / 16)) {
                const double t = g.t(n), a = g.a(j), x = g.x(i);
                if (mu11(t, a, x) < 0.0 || mu22(t, a, x) < 0.0 || mu21(t, a, x) < 0.0)
                    throw std::invalid_argument("rates: reaction/coupling rates must be >= 0");
                const double b1 = beta1(a, x), b2 = beta2(a, x);
                if (b1 < 0.0 || b2 < 0.0)
                    throw std::invalid_argument("rates: birth kernels must be >= 0");
                if (a <= abar1 + eps && b1 != 0.0)
                    throw std::invalid_argument("rates: beta1 must vanish for a <= abar1");
                if (a <= abar2 + eps && b2 != 0.0)
                    throw std::invalid_argument("rates: beta2 must vanish for a <= abar2");
            }
        }
    }
}

MortalitySchedule MortalitySchedule::zero() { return {}; }

MortalitySchedule MortalitySchedule::constant(double c, double A, double eta) {
    MortalitySchedule m;
    m.kind = Kind::constant;
    m.c = c;
    m.A = A;
    m.eta = eta;
    return m;
}

MortalitySchedule MortalitySchedule::reciprocal(double c, double A, double eta) {
    if (!(eta > 0.0))
        throw std::invalid_argument("mortality: reciprocal schedule needs a clamp width");
    MortalitySchedule m;
    m.kind = Kind::reciprocal;
    m.c = c;
    m.A = A;
    m.eta = eta;
    return m;
}

double MortalitySchedule::primitive(double a) const {
    const double ac = std::min(a, A - eta);
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::constant: return c * std::max(ac, 0.0);
        case Kind::reciprocal:
            if (ac <= 0.0) return 0.0;
            return c * std::log(A / (A - ac));
    }
    return 0.0;
}

TransformedModel transform_model(const TensorGrid& g, const Field& y0, const Field& w0,
                                 const MortalitySchedule& m13, const MortalitySchedule& m23,
                                 const BirthFn& gamma1, const BirthFn& gamma2,
                                 const RateFn& mu11, const RateFn& mu22, const RateFn& mu,
                                 double abar1, double abar2,
                                 const Trajectory* gbar) {
    TransformedModel out;
    out.u0 = Field(g);
    out.v0 = Field(g);
    out.beta1 = Field(g);
    out.beta2 = Field(g);

    for (std::size_t j = 0; j <= g.Na; ++j) {
        const double a = g.a(j);
        const double e1 = m13.growth(a), e2 = m23.growth(a);
        for (std::size_t i = 0; i <= g.Nx; ++i) {
            const double x = g.x(i);
            out.u0.at(j, i) = e1 * y0.at(j, i);
            out.v0.at(j, i) = e2 * w0.at(j, i);
            out.beta1.at(j, i) = gamma1(a, x) / e1;
            out.beta2.at(j, i) = gamma2(a, x) / e2;
        }
    }

    out.rates.mu11 = mu11;
    out.rates.mu22 = mu22;
    out.rates.mu21 = [m13, m23, mu](double t, double a, double x) {
        return std::exp(m23.primitive(a) - m13.primitive(a)) * mu(t, a, x);
    };
    out.rates.beta1 = [m13, gamma1](double a, double x) {
        return gamma1(a, x) / m13.growth(a);
    };
    out.rates.beta2 = [m23, gamma2](double a, double x) {
        return gamma2(a, x) / m23.growth(a);
    };
    out.rates.abar1 = abar1;
    out.rates.abar2 = abar2;

    if (gbar) {
        Trajectory tg;
        tg.first_node = gbar->first_node;
        tg.slices.reserve(gbar->slices.size());
        for (const auto& s : gbar->slices) {
            Field f = s;
            for (std::size_t j = 0; j <= g.Na; ++j) {
                const double e1 = m13.growth(g.a(j));
                for (std::size_t i = 0; i <= g.Nx; ++i) f.at(j, i) *= e1;
            }
            tg.slices.push_back(std::move(f));
        }
        out.g = std::move(tg);
    }

    return out;
}

} // namespace cascade
