#include "coremantle/probdist.hpp"

#include <cmath>
#include <stdexcept>

namespace coremantle::probdist {

namespace {

// Upper bound on the support that still carries more than ~1e-13 of mass.
unsigned support_cap(double rate) {
    return static_cast<unsigned>(rate + 12.0 * std::sqrt(rate + 1.0) + 30.0);
}

} // namespace

double poisson_pmf(double rate, unsigned x) {
    if (rate < 0.0 || std::isnan(rate))
        throw std::domain_error("poisson_pmf: negative rate");
    if (rate == 0.0)
        return x == 0 ? 1.0 : 0.0;
    const double lx = static_cast<double>(x);
    return std::exp(lx * std::log(rate) - rate - std::lgamma(lx + 1.0));
}

double poisson_tail(double rate, unsigned z) {
    if (rate < 0.0 || std::isnan(rate))
        throw std::domain_error("poisson_tail: negative rate");
    if (z == 0)
        return 1.0;
    if (rate == 0.0)
        return 0.0;
    // Sum pmf(z) + pmf(z+1) + ... until the terms stop mattering.
    double term = poisson_pmf(rate, z);
    double sum = term;
    unsigned h = z;
    const unsigned cap = z + support_cap(rate);
    while (h < cap) {
        ++h;
        term *= rate / static_cast<double>(h);
        sum += term;
        if (term < sum * 1e-18 && h > rate)
            break;
    }
    return sum > 1.0 ? 1.0 : sum;
}

double poisson_head(double rate, unsigned z) {
    if (rate < 0.0 || std::isnan(rate))
        throw std::domain_error("poisson_head: negative rate");
    if (rate == 0.0)
        return 1.0;
    double term = poisson_pmf(rate, 0);
    double sum = term;
    for (unsigned h = 1; h <= z; ++h) {
        term *= rate / static_cast<double>(h);
        sum += term;
    }
    return sum > 1.0 ? 1.0 : sum;
}

void TruncatedPoissonSpec::validate() const {
    if (rate < 0.0 || std::isnan(rate))
        throw std::domain_error("TruncatedPoissonSpec: negative rate");
    switch (constraint) {
    case Constraint::none:
    case Constraint::at_most:
        return; // P[Po <= z] >= P[Po = 0] > 0 always
    case Constraint::less_than:
        if (threshold == 0)
            throw std::domain_error("TruncatedPoissonSpec: Po < 0 has zero probability");
        return;
    case Constraint::at_least:
        if (threshold > 0 && poisson_tail(rate, threshold) <= 0.0)
            throw std::domain_error("TruncatedPoissonSpec: zero-probability tail constraint");
        return;
    }
}

namespace {

// Inverse-CDF over {0, ..., max_value}; total_mass is the probability of
// that range. Returns max_value if rounding leaves u uncovered.
unsigned inverse_cdf_bounded(double rate, unsigned max_value, double total_mass, rng::Stream& rng) {
    const double u = rng.uniform01() * total_mass;
    double term = poisson_pmf(rate, 0);
    double acc = term;
    unsigned h = 0;
    while (acc < u && h < max_value) {
        ++h;
        term *= rate / static_cast<double>(h);
        acc += term;
    }
    return h;
}

unsigned inverse_cdf_tail(double rate, unsigned z, rng::Stream& rng) {
    const double tail = poisson_tail(rate, z);
    const double u = rng.uniform01() * tail;
    const double quantile_cap = tail * (1.0 - 1e-12);
    double term = poisson_pmf(rate, z);
    double acc = term;
    unsigned h = z;
    while (acc < u && acc < quantile_cap) {
        ++h;
        term *= rate / static_cast<double>(h);
        acc += term;
    }
    return h;
}

} // namespace

unsigned sample_truncated_poisson(const TruncatedPoissonSpec& spec, rng::Stream& rng) {
    spec.validate();
    const double rate = spec.rate;
    switch (spec.constraint) {
    case Constraint::none: {
        if (rate == 0.0)
            return 0;
        const unsigned cap = support_cap(rate);
        return inverse_cdf_bounded(rate, cap, 1.0, rng);
    }
    case Constraint::at_most: {
        if (rate == 0.0)
            return 0;
        return inverse_cdf_bounded(rate, spec.threshold, poisson_head(rate, spec.threshold), rng);
    }
    case Constraint::less_than: {
        if (rate == 0.0)
            return 0;
        const unsigned z = spec.threshold - 1;
        return inverse_cdf_bounded(rate, z, poisson_head(rate, z), rng);
    }
    case Constraint::at_least: {
        if (spec.threshold == 0) {
            if (rate == 0.0)
                return 0;
            return inverse_cdf_bounded(rate, support_cap(rate), 1.0, rng);
        }
        return inverse_cdf_tail(rate, spec.threshold, rng);
    }
    }
    throw std::logic_error("sample_truncated_poisson: unreachable");
}

unsigned sample_poisson(double rate, rng::Stream& rng) {
    return sample_truncated_poisson({rate, Constraint::none, 0}, rng);
}

} // namespace coremantle::probdist
