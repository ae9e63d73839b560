#include "reebflow/steady_triple.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace reebflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double smoothstep(double t)
{
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

int sign_of(double x)
{
    return (x > 0) - (x < 0);
}

}  // namespace

CylinderAlpha interpolate_on_cylinder(const CollarField& B1, const CollarField& B2, const ScalarPoly& zeta_in,
                                      const std::function<double(double)>& eta, double s0, double s1,
                                      const CylinderInterpOptions& opt)
{
    if (!(s0 < s1))
        throw std::invalid_argument("cylinder chart needs s0 < s1");
    const RealPoly zeta = to_real(zeta_in);
    const int ns = opt.n_s, nt = opt.n_theta;
    const double w = opt.collar * (s1 - s0);
    const double dtheta = kTwoPi / nt;

    CylinderAlpha out;
    for (int i = 0; i < ns; ++i)
        out.s.push_back(s0 + (s1 - s0) * i / (ns - 1));
    for (int j = 0; j < nt; ++j)
        out.theta.push_back(dtheta * j);

    auto target = [&](double s) { return eta(zeta(s)); };
    const int sgn = sign_of(target(s0));
    for (double s : out.s)
        if (sign_of(target(s)) != sgn || sgn == 0)
            throw std::invalid_argument("eta(zeta(S)) vanishes or changes sign on the chart");

    // d/dS ∫B dΘ must equal 2π ζ for dα = ζ dS∧dΘ to be solvable
    const double hs = 1e-5 * (s1 - s0);
    for (double s : out.s) {
        double d = (target(s + hs) - target(s - hs)) / (2 * hs);
        if (std::fabs(d - kTwoPi * zeta(s)) > 1e-5 * std::max(1.0, std::fabs(d)))
            throw std::invalid_argument("reference profile is inconsistent with zeta at S = " + std::to_string(s));
    }

    auto check_collar = [&](const CollarField& B, double a, double b, const char* name) {
        for (int i = 0; i <= 10; ++i) {
            double s = a + (b - a) * i / 10.0;
            double avg = 0.0;
            for (int j = 0; j < nt; ++j) {
                double v = B(s, dtheta * j);
                if (sign_of(v) != sgn)
                    throw std::invalid_argument(std::string("collar ") + name
                                                + " sign mismatch: B must be nonzero with the sign of eta");
                avg += v * dtheta;
            }
            double ref = target(s);
            if (std::fabs(avg - ref) > opt.tol * std::max(1.0, std::fabs(ref)))
                throw std::invalid_argument(std::string("collar ") + name + " violates the Theta-average identity at S = "
                                            + std::to_string(s));
        }
    };
    check_collar(B1, s0, s0 + w, "B1");
    check_collar(B2, s1 - w, s1, "B2");

    // φ1 = 1 on the inner half of the lower collar, 0 past it; φ2 mirrors it
    auto blended = [&](double s, double th) {
        double p1 = 1.0 - smoothstep((s - s0 - 0.5 * w) / (0.5 * w));
        double p2 = smoothstep((s - s1 + w) / (0.5 * w));
        double v = (1.0 - p1 - p2) * target(s) / kTwoPi;
        if (p1 > 0)
            v += p1 * B1(s, th);
        if (p2 > 0)
            v += p2 * B2(s, th);
        return v;
    };
    // Richardson-extrapolated central difference in S
    auto dB_ds = [&](double s, double th) {
        auto cd = [&](double h) { return (blended(s + h, th) - blended(s - h, th)) / (2 * h); };
        double h = 1e-3 * (s1 - s0);
        return (4.0 * cd(0.5 * h) - cd(h)) / 3.0;
    };

    Eigen::FFT<double> fft;
    out.A.assign(ns, std::vector<double>(nt));
    out.B.assign(ns, std::vector<double>(nt));
    for (int i = 0; i < ns; ++i) {
        const double s = out.s[i];
        std::vector<double> g(nt);
        for (int j = 0; j < nt; ++j) {
            out.B[i][j] = blended(s, out.theta[j]);
            g[j] = dB_ds(s, out.theta[j]) - zeta(s);
        }
        std::vector<std::complex<double>> G;
        fft.fwd(G, g);
        std::vector<std::complex<double>> Ak(nt), dAk(nt);
        for (int k = 1; k < nt; ++k) {
            int freq = k <= nt / 2 ? k : k - nt;
            if (2 * k == nt)
                continue;  // Nyquist mode has no real antiderivative
            Ak[k] = G[k] / std::complex<double>(0.0, freq);
            dAk[k] = G[k];
        }
        std::vector<double> a, da;
        fft.inv(a, Ak);
        fft.inv(da, dAk);
        out.A[i] = a;
        double avg = 0.0;
        for (int j = 0; j < nt; ++j) {
            out.dalpha_residual = std::max(out.dalpha_residual, std::fabs(g[j] - da[j]));
            avg += out.B[i][j] * dtheta;
        }
        out.average_residual = std::max(out.average_residual, std::fabs(avg - target(s)));
    }
    return out;
}

}  // namespace reebflow
