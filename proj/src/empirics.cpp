#include "coremantle/empirics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace coremantle::empirics {

void NeighborhoodDistribution::merge(const NeighborhoodDistribution& other) {
    if (depth != other.depth)
        throw std::invalid_argument("NeighborhoodDistribution::merge: depth mismatch");
    for (const auto& [code, count] : other.class_freq)
        class_freq[code] += count;
    total += other.total;
}

unsigned thread_budget() {
    if (const char* env = std::getenv("CORE_MANTLE_THREADS")) {
        const long value = std::strtol(env, nullptr, 10);
        if (value >= 1)
            return static_cast<unsigned>(std::min<long>(value, 256));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

namespace {

constexpr std::uint64_t kChunks = 256;

// Runs fn(chunk_index) for every chunk on the available threads and
// returns the per-chunk results in chunk order.
template <typename Fn>
auto run_chunked(Fn&& fn) {
    using Result = decltype(fn(std::uint64_t{0}));
    std::vector<Result> results(kChunks);
    const unsigned threads = std::min<unsigned>(thread_budget(), kChunks);
    if (threads <= 1) {
        for (std::uint64_t c = 0; c < kChunks; ++c)
            results[c] = fn(c);
        return results;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) {
        pool.emplace_back([&]() {
            for (std::uint64_t c = next.fetch_add(1); c < kChunks; c = next.fetch_add(1))
                results[c] = fn(c);
        });
    }
    for (auto& th : pool)
        th.join();
    return results;
}

std::uint64_t chunk_size(std::uint64_t total, std::uint64_t chunk) {
    const std::uint64_t base = total / kChunks;
    return base + (chunk < total % kChunks ? 1 : 0);
}

} // namespace

NeighborhoodDistribution empirical_neighborhoods(const graph::SparseGraph& g,
                                                 const kcore::CoreMarking& marking,
                                                 std::uint32_t s) {
    const std::uint32_t n = g.vertex_count();
    if (marking.membership.size() != n)
        throw std::invalid_argument("empirical_neighborhoods: marking does not match graph");

    auto per_chunk = run_chunked([&](std::uint64_t chunk) {
        const std::uint32_t lo = static_cast<std::uint32_t>(n * chunk / kChunks);
        const std::uint32_t hi = static_cast<std::uint32_t>(n * (chunk + 1) / kChunks);
        NeighborhoodDistribution local;
        local.depth = s;
        if (lo >= hi)
            return local;
        graph::NeighborhoodExtractor extractor(g);
        for (std::uint32_t v = lo; v < hi; ++v) {
            const auto nb = extractor.extract(v, s, marking.membership);
            local.add(canon::canonical_neighborhood_code(nb));
        }
        return local;
    });

    NeighborhoodDistribution out;
    out.depth = s;
    out.provenance = "graph n=" + std::to_string(n);
    for (const auto& local : per_chunk)
        out.merge(local);
    return out;
}

trees::MarkedTree TreeLaw::sample(std::uint32_t s, rng::Stream& rng) const {
    switch (kind) {
    case Kind::plain_gw:
        return trees::sample_gw(d, s, rng);
    case Kind::five_type: {
        const auto spec = trees::BranchingSpec::five_type(d, k, p);
        return trees::project_two_type(trees::sample_five_type(spec, s, rng));
    }
    case Kind::two_type_star: {
        const auto spec = trees::BranchingSpec::two_type_star(d, k, p);
        return trees::sample_two_type_star(spec, s, rng);
    }
    case Kind::boundary: {
        auto gw = trees::sample_gw(d, s, rng);
        return trees::tree_wp_boundary(gw, k, p, static_cast<int>(s), rng);
    }
    case Kind::bottomup:
        return trees::sample_bottomup_message_tree(d, k, t, s, rng);
    }
    throw std::logic_error("TreeLaw::sample: unreachable");
}

std::string TreeLaw::label() const {
    char buf[128];
    switch (kind) {
    case Kind::plain_gw:
        std::snprintf(buf, sizeof(buf), "plain_gw d=%.6g", d);
        break;
    case Kind::five_type:
        std::snprintf(buf, sizeof(buf), "five_type d=%.6g k=%d p=%.12g", d, k, p);
        break;
    case Kind::two_type_star:
        std::snprintf(buf, sizeof(buf), "two_type_star d=%.6g k=%d p=%.12g", d, k, p);
        break;
    case Kind::boundary:
        std::snprintf(buf, sizeof(buf), "boundary d=%.6g k=%d p=%.12g", d, k, p);
        break;
    case Kind::bottomup:
        std::snprintf(buf, sizeof(buf), "bottomup d=%.6g k=%d t=%d", d, k, t);
        break;
    }
    return buf;
}

NeighborhoodDistribution
mc_tree_codes(const std::function<trees::MarkedTree(rng::Stream&)>& sampler, std::uint32_t s,
              std::uint64_t samples, std::uint64_t seed, std::uint64_t stream_base,
              std::string provenance) {
    if (samples < 1)
        throw std::invalid_argument("mc_tree_codes: need at least one sample");

    auto per_chunk = run_chunked([&](std::uint64_t chunk) {
        NeighborhoodDistribution local;
        local.depth = s;
        rng::Stream rng(seed, stream_base + chunk);
        const std::uint64_t count = chunk_size(samples, chunk);
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto tree = sampler(rng);
            local.add(canon::canonical_tree_code(tree, s));
        }
        return local;
    });

    NeighborhoodDistribution out;
    out.depth = s;
    out.provenance = std::move(provenance);
    for (const auto& local : per_chunk)
        out.merge(local);
    return out;
}

NeighborhoodDistribution mc_tree_law(const TreeLaw& law, std::uint32_t s, std::uint64_t samples,
                                     std::uint64_t seed, std::uint64_t stream_base) {
    return mc_tree_codes([&law, s](rng::Stream& rng) { return law.sample(s, rng); }, s, samples,
                         seed, stream_base,
                         law.label() + " s=" + std::to_string(s) + " M=" + std::to_string(samples));
}

ComparisonReport tv_distance(const NeighborhoodDistribution& a,
                             const NeighborhoodDistribution& b) {
    if (a.depth != b.depth)
        throw std::invalid_argument("tv_distance: depth mismatch");
    if (a.total == 0 || b.total == 0)
        throw std::invalid_argument("tv_distance: empty distribution");

    ComparisonReport report;
    report.settings = "a{" + a.provenance + "} b{" + b.provenance + "}";

    const double ta = static_cast<double>(a.total);
    const double tb = static_cast<double>(b.total);
    double l1 = 0.0;

    // chi-square pooling accumulators: classes with expected >= 10 on
    // both sides are kept, the remainder is pooled into one bin
    double chi = 0.0;
    std::uint64_t bins = 0;
    std::uint64_t rest_a = 0, rest_b = 0;

    auto ia = a.class_freq.begin();
    auto ib = b.class_freq.begin();
    while (ia != a.class_freq.end() || ib != b.class_freq.end()) {
        canon::Code code;
        std::uint64_t ca = 0, cb = 0;
        if (ib == b.class_freq.end() || (ia != a.class_freq.end() && ia->first < ib->first)) {
            code = ia->first;
            ca = ia->second;
            ++ia;
        } else if (ia == a.class_freq.end() || ib->first < ia->first) {
            code = ib->first;
            cb = ib->second;
            ++ib;
        } else {
            code = ia->first;
            ca = ia->second;
            cb = ib->second;
            ++ia;
            ++ib;
        }
        const double fa = static_cast<double>(ca) / ta;
        const double fb = static_cast<double>(cb) / tb;
        l1 += std::fabs(fa - fb);
        ++report.support_union;
        report.per_class.push_back({code, fa, fb, std::fabs(fa - fb)});

        const double pooled = static_cast<double>(ca + cb) / (ta + tb);
        if (pooled * ta >= 10.0 && pooled * tb >= 10.0) {
            const double ea = pooled * ta, eb = pooled * tb;
            chi += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
            ++bins;
        } else {
            rest_a += ca;
            rest_b += cb;
        }
    }
    if (rest_a + rest_b > 0) {
        const double pooled = static_cast<double>(rest_a + rest_b) / (ta + tb);
        const double ea = pooled * ta, eb = pooled * tb;
        chi += (rest_a - ea) * (rest_a - ea) / ea + (rest_b - eb) * (rest_b - eb) / eb;
        ++bins;
    }

    report.tv = 0.5 * l1;
    report.mc_error_bound =
        std::sqrt(static_cast<double>(report.support_union) / std::min(ta, tb));
    report.chi_square = chi;
    report.chi_square_dof = bins > 1 ? bins - 1 : 0;
    return report;
}

} // namespace coremantle::empirics
