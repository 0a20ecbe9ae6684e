#include "coremantle/fixedpoint.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "coremantle/probdist.hpp"

namespace coremantle::fixedpoint {

using probdist::poisson_head;
using probdist::poisson_pmf;
using probdist::poisson_tail;

void CoreParams::validate() const {
    if (!(d > 0.0))
        throw std::domain_error("CoreParams: average degree d must be positive");
    if (k < 3)
        throw std::domain_error("CoreParams: k must be at least 3");
}

double phi(const CoreParams& params, double p) {
    params.validate();
    if (p < 0.0 || p > 1.0)
        throw std::domain_error("phi: p must lie in [0,1]");
    return poisson_tail(params.d * p, static_cast<unsigned>(params.k - 1));
}

FixedPointResult solve_p_star(const CoreParams& params, double tol) {
    params.validate();
    if (!(tol > 0.0))
        throw std::domain_error("solve_p_star: tol must be positive");
    constexpr int kMaxIterations = 100000;

    double p = 1.0;
    int iter = 0;
    for (; iter < kMaxIterations; ++iter) {
        const double next = phi(params, p);
        if (next > p + 1e-12)
            throw std::logic_error("solve_p_star: iterates failed to decrease");
        if (next < 10.0 * tol) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "solve_p_star: subcritical (d=%.6g is below the k=%d threshold)",
                          params.d, params.k);
            throw SubcriticalError(buf);
        }
        const bool converged = (p - next) < tol;
        p = next;
        if (converged)
            break;
    }
    if (iter == kMaxIterations)
        throw std::runtime_error("solve_p_star: iteration cap exhausted");

    FixedPointResult result;
    result.p_star = p;
    result.iterations = iter + 1;
    result.residual = std::fabs(phi(params, p) - p);
    result.q = q_of(params, p);
    result.q_bar = q_bar_of(params, p);
    result.psi = poisson_tail(params.d * p, static_cast<unsigned>(params.k));
    return result;
}

double q_of(const CoreParams& params, double p) {
    params.validate();
    const double rate = params.d * p;
    const unsigned z = static_cast<unsigned>(params.k - 1);
    const double tail = poisson_tail(rate, z);
    if (tail <= 0.0)
        throw std::domain_error("q_of: conditioning event Po(dp) >= k-1 has zero probability");
    return poisson_pmf(rate, z) / tail;
}

double q_bar_of(const CoreParams& params, double p) {
    params.validate();
    const double rate = params.d * p;
    const unsigned z = static_cast<unsigned>(params.k - 2);
    return poisson_pmf(rate, z) / poisson_head(rate, z);
}

double threshold_d_k(int k, double tol) {
    if (k < 3 || k > 50)
        throw std::domain_error("threshold_d_k: supported range is 3 <= k <= 50");
    if (!(tol > 0.0))
        throw std::domain_error("threshold_d_k: tol must be positive");

    const auto objective = [k](double lambda) {
        return lambda / poisson_tail(lambda, static_cast<unsigned>(k - 1));
    };

    // Golden-section search; the objective is unimodal on (0, inf).
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1e-3, hi = 100.0;
    const double bracket_tol = std::max(std::sqrt(tol) * 0.1, 1e-9);
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = objective(c), fd = objective(d);
    while (hi - lo > bracket_tol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = objective(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = objective(d);
        }
    }
    return objective((lo + hi) / 2.0);
}

std::vector<double> density_trajectory(const CoreParams& params, int t_max) {
    params.validate();
    if (t_max < 0)
        throw std::domain_error("density_trajectory: t_max must be nonnegative");
    std::vector<double> traj;
    traj.reserve(static_cast<std::size_t>(t_max) + 1);
    traj.push_back(1.0);
    for (int t = 0; t < t_max; ++t)
        traj.push_back(phi(params, traj.back()));
    return traj;
}

double mark_density(const CoreParams& params, double p_prev) {
    params.validate();
    if (p_prev < 0.0 || p_prev > 1.0)
        throw std::domain_error("mark_density: p_prev must lie in [0,1]");
    return poisson_tail(params.d * p_prev, static_cast<unsigned>(params.k));
}

} // namespace coremantle::fixedpoint
