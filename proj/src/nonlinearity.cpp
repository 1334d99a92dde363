#include "subdif/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace subdif {

Nonlinearity Nonlinearity::identity() {
    Nonlinearity f;
    f.phi = [](double r) { return r; };
    f.dphi = [](double) { return 1.0; };
    f.primitive = [](double r) { return 0.5 * r * r; };
    f.mu = 1.0;
    f.R = 0.0;
    f.c0 = 1.0;
    f.c1 = 1.0;
    return f;
}

Nonlinearity Nonlinearity::porous_medium(double m) {
    if (!(m > 1.0)) throw std::invalid_argument("porous_medium: exponent must exceed 1");
    Nonlinearity f;
    f.phi = [m](double r) { return std::copysign(std::pow(std::abs(r), m), r); };
    f.dphi = [m](double r) { return m * std::pow(std::abs(r), m - 1.0); };
    f.primitive = [m](double r) { return std::pow(std::abs(r), m + 1.0) / (m + 1.0); };
    f.R = 1.0;
    f.mu = m;  // phi'(r) = m |r|^{m-1} >= m for |r| >= 1
    f.c0 = 0.0;
    f.c1 = std::numeric_limits<double>::infinity();
    return f;
}

Nonlinearity truncate(const Nonlinearity& f, double M) {
    if (!(M > 0.0)) throw std::invalid_argument("truncate: M must be positive");
    const double pM = f.phi(M), pmM = f.phi(-M);
    const double sM = f.dphi(M), smM = f.dphi(-M);
    const double PM = f.primitive(M), PmM = f.primitive(-M);

    Nonlinearity g;
    auto base_phi = f.phi;
    auto base_dphi = f.dphi;
    auto base_prim = f.primitive;
    g.phi = [=](double r) {
        if (r > M) return pM + sM * (r - M);
        if (r < -M) return pmM + smM * (r + M);
        return base_phi(r);
    };
    g.dphi = [=](double r) {
        if (r > M) return sM;
        if (r < -M) return smM;
        return base_dphi(r);
    };
    g.primitive = [=](double r) {
        if (r > M) return PM + pM * (r - M) + 0.5 * sM * (r - M) * (r - M);
        if (r < -M) return PmM + pmM * (r + M) + 0.5 * smM * (r + M) * (r + M);
        return base_prim(r);
    };
    // slope bounds on the truncated range (sampled; exact for the families here)
    double hi = std::max(sM, smM), lo = std::min(sM, smM);
    for (int i = 0; i <= 256; ++i) {
        const double s = f.dphi(-M + 2.0 * M * i / 256.0);
        hi = std::max(hi, s);
        lo = std::min(lo, s);
    }
    g.c1 = hi;
    g.c0 = std::min(f.c0, lo);
    if (M >= f.R) {
        g.R = f.R;
        g.mu = std::min({f.mu, sM, smM});
    } else {
        g.R = M;
        g.mu = std::min(sM, smM);
    }
    return g;
}

Nonlinearity regularize(const Nonlinearity& f, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("regularize: eps must be positive");
    Nonlinearity g;
    auto base_phi = f.phi;
    auto base_dphi = f.dphi;
    auto base_prim = f.primitive;
    g.phi = [=](double r) { return base_phi(r) + eps * r; };
    g.dphi = [=](double r) { return base_dphi(r) + eps; };
    g.primitive = [=](double r) { return base_prim(r) + 0.5 * eps * r * r; };
    g.mu = f.mu + eps;
    g.R = f.R;
    g.c0 = f.c0 + eps;
    g.c1 = f.c1 + eps;
    return g;
}

double primitive_mass(const Nonlinearity& f, const Mesh1D& mesh, std::span<const double> u) {
    if (static_cast<int>(u.size()) != mesh.interior())
        throw std::invalid_argument("primitive_mass: interior vector expected");
    double s = 0.0;
    for (double x : u) s += f.primitive(x);
    return mesh.h() * s;
}

}  // namespace subdif
