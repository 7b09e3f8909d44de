#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "oausa/rng.hpp"
#include "oausa/sensing.hpp"

using namespace oausa;
using namespace oausa::sensing;

namespace {

// Brute-force binomial tail in long double, summed smallest-first. Independent
// of the recurrence used by the library.
long double tail_brute(int k, int n, long double p) {
    std::vector<long double> terms;
    for (int i = k; i <= n; ++i) {
        long double c = 1.0L;
        for (int j = 1; j <= i; ++j)
            c *= static_cast<long double>(n - i + j) / j;
        terms.push_back(c * std::pow(p, i) * std::pow(1.0L - p, n - i));
    }
    long double s = 0.0L;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) s += *it;
    return s;
}

// Exhaustive falsified-QF oracle: enumerate all 2^(n-1) truthful peer
// outcomes under H0 and weight the deviator's report by its flip law.
long double falsified_qf_enum(double pf, double a1, double a2, int k, int n) {
    const long double pft = a1 + (1.0 - a1 - a2) * pf;
    long double total = 0.0L;
    const int peers = n - 1;
    for (std::uint32_t mask = 0; mask < (1u << peers); ++mask) {
        int ones = 0;
        for (int i = 0; i < peers; ++i) ones += (mask >> i) & 1u;
        long double pr = std::pow(static_cast<long double>(pf), ones) *
                         std::pow(1.0L - pf, peers - ones);
        if (ones + 1 >= k) total += pr * pft;
        if (ones >= k) total += pr * (1.0L - pft);
    }
    return total;
}

const ChannelPrior kPrior = ChannelPrior::from_pi0(0.8);
const SensorProfile kSensor{0.1, 0.9};

}  // namespace

TEST_CASE("optimal_k matches the closed form") {
    // raw value 4.68454 for the reference network
    CHECK(optimal_k(kPrior, kSensor, 10) == 5);
    // raw value 0.18454 rounds up to the clamp floor
    CHECK(optimal_k(kPrior, kSensor, 1) == 1);

    // symmetric sensor + flat prior forces the majority rule
    for (int n : {1, 2, 3, 7, 10, 15}) {
        SensorProfile sym{0.3, 0.7};
        CHECK(optimal_k(ChannelPrior::from_pi0(0.5), sym, n) == (n + 1) / 2);
    }

    CHECK(optimal_k(kPrior, kSensor, 5) == 3);
    CHECK(optimal_k(kPrior, kSensor, 20) == 10);
    CHECK(optimal_k(kPrior, kSensor, 50) == 25);
}

TEST_CASE("optimal_k rejects degenerate sensors") {
    CHECK_THROWS_AS(optimal_k(kPrior, SensorProfile(0.0, 0.9), 10), std::domain_error);
    CHECK_THROWS_AS(optimal_k(kPrior, SensorProfile(0.1, 1.0), 10), std::domain_error);
    CHECK_THROWS_AS(optimal_k(kPrior, SensorProfile(0.5, 0.5), 10), std::domain_error);
    CHECK_THROWS_AS(optimal_k(kPrior, SensorProfile(0.6, 0.4), 10), std::domain_error);
}

TEST_CASE("global_roc closed forms and brute-force agreement") {
    // AND rule: single term
    auto roc_and = global_roc(10, 10, kSensor);
    CHECK(roc_and.qf == doctest::Approx(std::pow(0.1, 10)).epsilon(1e-12));
    // OR rule: complement
    auto roc_or = global_roc(1, 10, kSensor);
    CHECK(roc_or.qf == doctest::Approx(1.0 - std::pow(0.9, 10)).epsilon(1e-12));

    // frozen value: exact rational 8174687/5000000000
    auto roc = global_roc(5, 10, kSensor);
    CHECK(roc.qf == doctest::Approx(1.6349374e-3).epsilon(1e-12));
    CHECK(roc.qd == doctest::Approx(0.9998530974).epsilon(1e-12));

    for (int n : {1, 3, 10, 31, 64}) {
        for (int k = 1; k <= n; k += (n > 8 ? 5 : 1)) {
            for (double p : {0.0, 1e-4, 0.1, 0.5, 0.9, 1.0}) {
                SensorProfile s{p, 1.0};
                auto got = global_roc(k, n, s);
                CHECK(got.qf ==
                      doctest::Approx(static_cast<double>(tail_brute(k, n, p))).epsilon(1e-12));
            }
        }
    }

    CHECK_THROWS_AS(global_roc(0, 10, kSensor), std::invalid_argument);
    CHECK_THROWS_AS(global_roc(11, 10, kSensor), std::invalid_argument);
}

TEST_CASE("global_roc is monotone non-increasing in k") {
    for (double p : {0.05, 0.3, 0.7}) {
        SensorProfile s{p, std::min(1.0, p + 0.2)};
        double prev_qf = 1.0, prev_qd = 1.0;
        for (int k = 1; k <= 16; ++k) {
            auto roc = global_roc(k, 16, s);
            CHECK(roc.qf <= prev_qf);
            CHECK(roc.qd <= prev_qd);
            prev_qf = roc.qf;
            prev_qd = roc.qd;
        }
    }
}

TEST_CASE("joint_probs identities") {
    auto certain = joint_probs(ChannelPrior::from_pi0(1.0), 0.0, 1.0);
    CHECK(certain.q0 == 1.0);
    auto perfect = joint_probs(ChannelPrior::from_pi0(0.8), 0.0, 1.0);
    CHECK(perfect.q1 == 0.0);

    auto jp = joint_probs(kPrior, 1.6349374e-3, 0.9998530974);
    CHECK(jp.q0 == doctest::Approx(0.79869205008).epsilon(1e-12));
    CHECK(jp.q1 == doctest::Approx(2.938052e-5).epsilon(1e-9));

    // total probability: q0 + pi0*Qf + q1 + pi1*Qd = 1
    Rng rng(7);
    for (int it = 0; it < 2000; ++it) {
        double pi0 = rng.uniform();
        double qf = rng.uniform(), qd = rng.uniform();
        ChannelPrior prior{pi0, 1.0 - pi0};
        auto j = joint_probs(prior, qf, qd);
        double total = j.q0 + prior.pi0 * qf + j.q1 + prior.pi1 * qd;
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("fuse counting rule") {
    std::vector<std::uint8_t> d{1, 1, 0, 0, 1};
    CHECK(fuse(d, 3) == true);
    std::vector<std::uint8_t> zeros{0, 0, 0};
    CHECK(fuse(zeros, 1) == false);
    std::vector<std::uint8_t> one{1, 0, 0, 0};
    CHECK(fuse(one, 1) == true);

    CHECK_THROWS_AS(fuse(std::vector<std::uint8_t>{}, 1), std::invalid_argument);
    CHECK_THROWS_AS(fuse(d, 0), std::invalid_argument);
    CHECK_THROWS_AS(fuse(d, 6), std::invalid_argument);
}

TEST_CASE("fuse is permutation invariant") {
    Rng rng(11);
    for (int it = 0; it < 500; ++it) {
        int n = 1 + static_cast<int>(rng.uniform() * 10);
        std::vector<std::uint8_t> d(n);
        for (auto& b : d) b = rng.bernoulli(0.4) ? 1 : 0;
        int k = 1 + static_cast<int>(rng.uniform() * n);
        bool base = fuse(d, k);
        for (int s = 0; s < 8; ++s) {
            std::size_t i = static_cast<std::size_t>(rng.uniform() * n);
            std::size_t j = static_cast<std::size_t>(rng.uniform() * n);
            std::swap(d[i], d[j]);
            CHECK(fuse(d, k) == base);
        }
    }
}

TEST_CASE("strategy_proof_fuse ignores excluded bits") {
    std::vector<std::uint8_t> d{1, 0, 0};
    std::vector<std::size_t> ex{0};
    CHECK(strategy_proof_fuse(d, ex, 1) == false);  // winner's 1 ignored

    for (std::uint8_t x : {0, 1}) {
        std::vector<std::uint8_t> v{x, 1, 1};
        CHECK(strategy_proof_fuse(v, ex, 2) == true);
    }

    std::vector<std::size_t> all{0, 1, 2};
    CHECK_THROWS_WITH_AS(strategy_proof_fuse(d, all, 1), "no sensing input",
                         std::invalid_argument);
}

TEST_CASE("strategy_proof_fuse equals fuse on the reduced vector") {
    const ChannelPrior prior = kPrior;
    const SensorProfile sensor = kSensor;
    const int n = 10;
    const int k9 = optimal_k(prior, sensor, n - 1);
    Rng rng(23);
    for (int it = 0; it < 2000; ++it) {
        std::vector<std::uint8_t> d(n);
        for (auto& b : d) b = rng.bernoulli(0.5) ? 1 : 0;
        std::size_t winner = static_cast<std::size_t>(rng.uniform() * n);
        std::vector<std::size_t> ex{winner};
        std::vector<std::uint8_t> reduced;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (i != winner) reduced.push_back(d[i]);
        CHECK(strategy_proof_fuse(d, ex, k9) == fuse(reduced, k9));
    }
}

TEST_CASE("strategy_proof_fuse exhaustive invariance for n <= 12") {
    for (int n : {3, 8, 12}) {
        for (std::size_t winner : {std::size_t{0}, static_cast<std::size_t>(n - 1)}) {
            std::vector<std::size_t> ex{winner};
            const int k = std::max(1, (n - 1) / 2);
            for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
                std::vector<std::uint8_t> d(n, 0);
                int j = 0;
                for (int i = 0; i < n; ++i) {
                    if (static_cast<std::size_t>(i) == winner) continue;
                    d[i] = (mask >> j) & 1u;
                    ++j;
                }
                d[winner] = 0;
                const bool r0 = strategy_proof_fuse(d, ex, k);
                d[winner] = 1;
                const bool r1 = strategy_proof_fuse(d, ex, k);
                REQUIRE(r0 == r1);
            }
        }
    }
}

TEST_CASE("falsified_qf formula vs exhaustive enumeration") {
    // truthful reporting recovers the plain global ROC
    CHECK(falsified_qf(kSensor, DeviationPolicy(0, 0), 5, 10) ==
          doctest::Approx(global_roc(5, 10, kSensor).qf).epsilon(1e-13));

    // frozen enumeration values (k=5, n=10, pf=0.1)
    CHECK(falsified_qf(kSensor, DeviationPolicy(1, 0), 5, 10) ==
          doctest::Approx(0.0083310940).epsilon(1e-11));
    CHECK(falsified_qf(kSensor, DeviationPolicy(0, 1), 5, 10) ==
          doctest::Approx(0.0008909200).epsilon(1e-11));
    CHECK(falsified_qf(kSensor, DeviationPolicy(0.5, 0.5), 5, 10) ==
          doctest::Approx(0.0046110070).epsilon(1e-11));

    for (double pf : {0.05, 0.1, 0.35}) {
        SensorProfile s{pf, 0.9};
        for (int n : {2, 5, 10, 14}) {
            for (int k = 1; k <= n; ++k) {
                for (auto [a1, a2] : {std::pair{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0},
                                      {0.25, 0.5}, {0.7, 0.1}}) {
                    double expect = static_cast<double>(falsified_qf_enum(pf, a1, a2, k, n));
                    CHECK(falsified_qf(s, DeviationPolicy(a1, a2), k, n) ==
                          doctest::Approx(expect).epsilon(1e-11));
                }
            }
        }
    }
}

TEST_CASE("falsified_qf is bracketed by the all-zero and all-one policies") {
    for (double pf : {0.1, 0.3}) {
        SensorProfile s{pf, 0.9};
        const double lo = falsified_qf(s, DeviationPolicy(0, 1), 5, 10);
        const double hi = falsified_qf(s, DeviationPolicy(1, 0), 5, 10);
        for (double a1 = 0.0; a1 <= 1.0; a1 += 0.25) {
            for (double a2 = 0.0; a2 <= 1.0; a2 += 0.25) {
                const double q = falsified_qf(s, DeviationPolicy(a1, a2), 5, 10);
                CHECK(q >= lo - 1e-15);
                CHECK(q <= hi + 1e-15);
            }
        }
    }
}

TEST_CASE("utility_gap_bound values and shape") {
    // degenerate sensor: pf=0, pd=1, k=n leaves only the absolute term
    SensorProfile ideal{0.0, 1.0};
    CHECK(utility_gap_bound(kPrior, ideal, 10, 10, 0.8, 5.0) ==
          doctest::Approx(0.2 * 5.0).epsilon(1e-12));

    // frozen values for pf=0.1, pd=0.9, pi0=0.8, c_coll=5, k=k_opt(N),
    // E[wmax] = closed form per N
    struct Row { int n; int k; double ew; double bound; };
    const Row rows[] = {
        {5, 3, 0.671875, 1.54130212},
        {10, 5, 0.8182705965909091, 1.34839348},
        {20, 10, 0.9047619501749674, 1.12157563},
        {50, 25, 0.9607843137254902, 1.00515378},
    };
    double prev = 1e9;
    for (const Row& r : rows) {
        const double b = utility_gap_bound(kPrior, kSensor, r.k, r.n, r.ew, 5.0);
        CHECK(b == doctest::Approx(r.bound).epsilon(1e-7));
        CHECK(b < prev);
        prev = b;
    }
}

TEST_CASE("type invariants") {
    CHECK_THROWS_AS(ChannelPrior(0.6, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(ChannelPrior(-0.1, 1.1), std::invalid_argument);
    CHECK_NOTHROW(ChannelPrior(0.8, 0.2));
    CHECK_NOTHROW(SensorProfile(0.5, 0.4));  // warns, does not throw
    CHECK_THROWS_AS(SensorProfile(-0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(DeviationPolicy(1.5, 0.0), std::invalid_argument);
}
