#pragma once

// Mean-field (N -> infinity) limit on the Bloch sphere.  With
// (X, Y, Z) = (Jx, Jy, Jz)/j the energy density is
//
//   eps(X, Y, Z) = -(gx X^2 + gy Y^2)/2 - h Z
//
// and the spin precession equations restricted to the unit sphere read
//
//   X' = Y (h - gy Z),   Y' = X (gx Z - h),   Z' = X Y (gy - gx).
//
// Besides the poles Z = +-1 the flow admits in-plane pairs when the
// corresponding coupling dominates the field:
//
//   XZ+-: (+-sqrt(1 - (h/gx)^2), 0, h/gx),  eps = -(h^2 + gx^2)/(2 gx),  |h| < |gx|
//   YZ+-: (0, +-sqrt(1 - (h/gy)^2), h/gy),  eps = -(h^2 + gy^2)/(2 gy),  |h| < |gy|
//
// Saddles of eps mark excited-state criticalities; their energies are the
// esqpt_energies of a ZoneReport.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinlab/lmg.hpp"

namespace spinlab {

struct SpherePoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline void require_on_sphere(const SpherePoint& p, double tol = 1e-9) {
    const double r2 = p.x * p.x + p.y * p.y + p.z * p.z;
    if (std::abs(r2 - 1.0) > tol)
        throw std::invalid_argument("SpherePoint: not on the unit sphere");
}

inline std::array<double, 3> flow(const SpherePoint& p, const LmgParams& par) {
    validate_finite(par);
    require_on_sphere(p);
    return {p.y * (par.h - par.gamma_y * p.z),
            p.x * (par.gamma_x * p.z - par.h),
            p.x * p.y * (par.gamma_y - par.gamma_x)};
}

inline double classical_energy(const SpherePoint& p, const LmgParams& par) {
    validate_finite(par);
    require_on_sphere(p);
    return -0.5 * (par.gamma_x * p.x * p.x + par.gamma_y * p.y * p.y) - par.h * p.z;
}

enum class FixedPointLabel { z_plus, z_minus, xz_plus, xz_minus, yz_plus, yz_minus };

inline const char* to_string(FixedPointLabel label) {
    switch (label) {
        case FixedPointLabel::z_plus: return "Z+";
        case FixedPointLabel::z_minus: return "Z-";
        case FixedPointLabel::xz_plus: return "XZ+";
        case FixedPointLabel::xz_minus: return "XZ-";
        case FixedPointLabel::yz_plus: return "YZ+";
        default: return "YZ-";
    }
}

struct FixedPoint {
    FixedPointLabel label = FixedPointLabel::z_plus;
    bool exists = false;
    SpherePoint point;   // meaningful only if exists
    double h0 = 0.0;     // classical energy at the point
    bool stable = false; // center (true) vs saddle (false)
};

namespace detail {

// Eigenvalue structure of the flow linearized in the tangent plane.  The
// flow is Hamiltonian, so fixed points are either centers (conjugate
// imaginary pair) or saddles (real +- pair); "stable" means the former.
inline bool tangent_center(const SpherePoint& p, const LmgParams& par) {
    // full Jacobian of (X', Y', Z')
    const double J[3][3] = {
        {0.0, par.h - par.gamma_y * p.z, -par.gamma_y * p.y},
        {par.gamma_x * p.z - par.h, 0.0, par.gamma_x * p.x},
        {p.y * (par.gamma_y - par.gamma_x), p.x * (par.gamma_y - par.gamma_x), 0.0}};
    // orthonormal tangent frame at p
    std::array<double, 3> u = (std::abs(p.z) < 0.9) ? std::array<double, 3>{0.0, 0.0, 1.0}
                                                    : std::array<double, 3>{1.0, 0.0, 0.0};
    std::array<double, 3> t1 = {u[1] * p.z - u[2] * p.y, u[2] * p.x - u[0] * p.z,
                                u[0] * p.y - u[1] * p.x};
    const double n1 = std::sqrt(t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]);
    for (double& c : t1) c /= n1;
    const std::array<double, 3> t2 = {p.y * t1[2] - p.z * t1[1], p.z * t1[0] - p.x * t1[2],
                                      p.x * t1[1] - p.y * t1[0]};
    double b[2][2];
    const std::array<const std::array<double, 3>*, 2> frame = {&t1, &t2};
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < 3; ++k) s += (*frame[a])[i] * J[i][k] * (*frame[c])[k];
            b[a][c] = s;
        }
    const double tr = b[0][0] + b[1][1];
    const double det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    const double scale = 1.0 + std::abs(par.gamma_x) + std::abs(par.gamma_y) + std::abs(par.h);
    // center: purely imaginary pair, i.e. tr = 0 and det > 0
    return std::abs(tr) <= 1e-9 * scale && tr * tr - 4.0 * det < 0.0;
}

inline void require_nondegenerate(const LmgParams& par) {
    validate_finite(par);
    const double ah = std::abs(par.h);
    if (ah <= 1e-12)
        throw std::domain_error("classical: |h| = 0 is outside the supported parameter set");
    if (std::abs(std::abs(par.gamma_x) - ah) <= 1e-12)
        throw std::domain_error("classical: degenerate parameters, |gamma_x| = |h|");
    if (std::abs(std::abs(par.gamma_y) - ah) <= 1e-12)
        throw std::domain_error("classical: degenerate parameters, |gamma_y| = |h|");
}

}  // namespace detail

// The six candidate fixed points in a fixed order (Z+, Z-, XZ+, XZ-, YZ+,
// YZ-), with existence, energy and stability filled in.
inline std::vector<FixedPoint> fixed_points(const LmgParams& par) {
    detail::require_nondegenerate(par);
    std::vector<FixedPoint> out;
    out.reserve(6);
    const auto add = [&](FixedPointLabel label, bool exists, SpherePoint p) {
        FixedPoint fp;
        fp.label = label;
        fp.exists = exists;
        if (exists) {
            fp.point = p;
            fp.h0 = classical_energy(p, par);
            fp.stable = detail::tangent_center(p, par);
        }
        out.push_back(fp);
    };
    add(FixedPointLabel::z_plus, true, {0.0, 0.0, 1.0});
    add(FixedPointLabel::z_minus, true, {0.0, 0.0, -1.0});
    const bool has_xz = std::abs(par.h) < std::abs(par.gamma_x);
    const bool has_yz = std::abs(par.h) < std::abs(par.gamma_y);
    {
        const double z = has_xz ? par.h / par.gamma_x : 0.0;
        const double x = has_xz ? std::sqrt(std::max(0.0, 1.0 - z * z)) : 0.0;
        add(FixedPointLabel::xz_plus, has_xz, {x, 0.0, z});
        add(FixedPointLabel::xz_minus, has_xz, {-x, 0.0, z});
    }
    {
        const double z = has_yz ? par.h / par.gamma_y : 0.0;
        const double y = has_yz ? std::sqrt(std::max(0.0, 1.0 - z * z)) : 0.0;
        add(FixedPointLabel::yz_plus, has_yz, {0.0, y, z});
        add(FixedPointLabel::yz_minus, has_yz, {0.0, -y, z});
    }
    return out;
}

enum class Zone { I, II, III, IV, boundary };
enum class ZoneSubcase { none, a, b };

inline const char* to_string(Zone z) {
    switch (z) {
        case Zone::I: return "I";
        case Zone::II: return "II";
        case Zone::III: return "III";
        case Zone::IV: return "IV";
        default: return "boundary";
    }
}

struct ZoneReport {
    Zone zone = Zone::boundary;
    ZoneSubcase subcase = ZoneSubcase::none;
    std::vector<FixedPoint> points;
    std::vector<double> esqpt_energies;  // h0 of unstable points, deduplicated
};

// Partition of the (gamma_x, gamma_y) plane at field |h| (the spectrum is
// invariant under h -> -h):
//   I      |gx| < h and |gy| < h
//   II(a)  |gx| < h < |gy|        II(b)  |gy| < h < |gx|
//   III(a) gx > h, gy < -h        III(b) gx < -h, gy > h
//   IV(a)  gx > h, gy > h         IV(b)  gx < -h, gy < -h
// Parameters within 1e-12 of |gx| = |h| or |gy| = |h| are reported as
// boundary, with no fixed-point analysis attached.
inline ZoneReport classify_zone(const LmgParams& par) {
    validate_finite(par);
    const double h = std::abs(par.h);
    if (h <= 1e-12)
        throw std::domain_error("classify_zone: |h| = 0 is outside the supported parameter set");
    ZoneReport report;
    if (std::abs(std::abs(par.gamma_x) - h) <= 1e-12 ||
        std::abs(std::abs(par.gamma_y) - h) <= 1e-12) {
        report.zone = Zone::boundary;
        return report;
    }
    const bool x_weak = std::abs(par.gamma_x) < h;
    const bool y_weak = std::abs(par.gamma_y) < h;
    if (x_weak && y_weak) {
        report.zone = Zone::I;
    } else if (x_weak || y_weak) {
        report.zone = Zone::II;
        report.subcase = x_weak ? ZoneSubcase::a : ZoneSubcase::b;
    } else {
        const bool x_pos = par.gamma_x > 0.0;
        const bool y_pos = par.gamma_y > 0.0;
        if (x_pos != y_pos) {
            report.zone = Zone::III;
            report.subcase = x_pos ? ZoneSubcase::a : ZoneSubcase::b;
        } else {
            report.zone = Zone::IV;
            report.subcase = x_pos ? ZoneSubcase::a : ZoneSubcase::b;
        }
    }

    report.points = fixed_points(par);
    const FixedPoint& zp = report.points[0];
    const FixedPoint& zm = report.points[1];
    const FixedPoint& xzp = report.points[2];
    const FixedPoint& xzm = report.points[3];
    const FixedPoint& yzp = report.points[4];
    const FixedPoint& yzm = report.points[5];
    if (xzp.exists != xzm.exists || yzp.exists != yzm.exists ||
        (xzp.exists && xzp.stable != xzm.stable) ||
        (yzp.exists && yzp.stable != yzm.stable))
        throw std::runtime_error("classify_zone: fixed-point pair asymmetry");

    // every zone has a definite stability pattern; anything else means the
    // numerics and the partition disagree
    bool consistent = false;
    switch (report.zone) {
        case Zone::I:
            consistent = !xzp.exists && !yzp.exists && zp.stable && zm.stable;
            break;
        case Zone::II:
            consistent = (xzp.exists != yzp.exists) &&
                         (xzp.exists ? xzp.stable : yzp.stable) &&
                         (zp.stable != zm.stable);
            break;
        case Zone::III:
            consistent = xzp.exists && yzp.exists && xzp.stable && yzp.stable &&
                         !zp.stable && !zm.stable;
            break;
        case Zone::IV:
            consistent = xzp.exists && yzp.exists && (xzp.stable != yzp.stable) &&
                         zp.stable && zm.stable;
            break;
        default:
            break;
    }
    if (!consistent)
        throw std::runtime_error("classify_zone: stability pattern does not match the zone");

    std::vector<double> crit;
    for (const FixedPoint& fp : report.points)
        if (fp.exists && !fp.stable) crit.push_back(fp.h0);
    std::sort(crit.begin(), crit.end());
    for (double v : crit)
        if (report.esqpt_energies.empty() ||
            std::abs(report.esqpt_energies.back() - v) > 1e-12)
            report.esqpt_energies.push_back(v);
    return report;
}

}  // namespace spinlab
