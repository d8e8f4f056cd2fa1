#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "counting.hpp"
#include "rng.hpp"

namespace occulex {

struct MomentSet {
    std::size_t n = 0;
    int k = 0;
    std::size_t ell = 0;
    int d = 0;
    Rational mu;
    // delta_{k,v} and the floor l^2 / (k^{2l} (l!)^2 (2l-1)); delta reaches
    // the floor only when 2k >= 2l - 1 and is negative below that.
    Rational delta;
    Rational delta_floor;
    Rational variance_floor; // delta * n^{2l-1}
    BigInt Delta;            // indices overlapping a fixed one, excluding itself
    BigInt K;                // C(n, l)
    // Upper bound on lim mu_n / (sigma_n sqrt n) implied by the variance floor.
    double j_from_floor = 0;
};

inline MomentSet exact_moments(const Pattern& v, int k, std::size_t n) {
    v.require_alphabet(k);
    const auto l = static_cast<long long>(v.length());
    const int d = v.distinct();
    const auto nn = static_cast<long long>(n);
    MomentSet m;
    m.n = n;
    m.k = k;
    m.ell = v.length();
    m.d = d;
    m.K = binomial(nn, l);
    const BigInt kl = ipow(BigInt(k), static_cast<unsigned long long>(l));
    m.mu = Rational(m.K * binomial(k, d), kl);
    m.Delta = nn < l ? BigInt(0) : BigInt(m.K - binomial(nn - l, l) - 1);

    const BigInt lf = factorial(l);
    const Rational base(BigInt(l * l), kl * kl * lf * lf);
    m.delta = Rational(binomial(k, d)) * base * (Rational(2 * k, 2 * l - 1) - 1);
    m.delta_floor = base / Rational(2 * l - 1);
    m.variance_floor = m.delta * Rational(ipow(BigInt(nn), static_cast<unsigned long long>(2 * l - 1)));
    m.j_from_floor = to_double(Rational(binomial(k, d), kl * lf)) / std::sqrt(to_double(m.delta_floor));
    return m;
}

// P(X_n = r) = f_r / k^n for every r, from exhaustive profiles.
inline std::vector<Rational> exact_pmf(const Pattern& v, int k, std::size_t n, const ProfileOptions& opt = {}) {
    const auto prof = brute_profile(v, k, n, opt);
    const BigInt total = ipow(BigInt(k), n);
    std::vector<Rational> out;
    for (const auto& f : prof.counts) out.emplace_back(f, total);
    return out;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// X_n for one uniform word drawn from stream (seed, index).
inline std::uint64_t sample_occurrences(const OccurrenceMatcher& m, std::size_t n, std::uint64_t seed,
                                        std::uint64_t index) {
    Stream rng(seed, index);
    auto counts = m.initial_counts<std::uint64_t>();
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) detail::add_to(total, m.step(counts, rng.letter(m.k())));
    return total;
}

// Samples X_n for indices [0, samples), split over `workers` threads.
inline std::vector<std::uint64_t> sample_many(const Pattern& v, int k, std::size_t n, std::size_t samples,
                                              std::uint64_t seed, unsigned workers = 1) {
    const OccurrenceMatcher m(v, k);
    std::vector<std::uint64_t> xs(samples);
    workers = std::max(1U, workers);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) xs[i] = sample_occurrences(m, n, seed, i);
    };
    if (workers == 1 || samples < 2 * workers) {
        work(0, samples);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (samples + workers - 1) / workers;
        for (std::size_t lo = 0; lo < samples; lo += chunk) pool.emplace_back(work, lo, std::min(samples, lo + chunk));
        for (auto& t : pool) t.join();
    }
    return xs;
}

// sup_x |F_N(x) - Phi(x)| for the standardized sample, with both one-sided
// limits of the empirical CDF taken at every atom.
inline double kolmogorov_to_normal(std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const double N = static_cast<double>(z.size());
    double worst = 0;
    std::size_t i = 0;
    while (i < z.size()) {
        std::size_t j = i;
        while (j < z.size() && z[j] == z[i]) ++j;
        const double phi = normal_cdf(z[i]);
        worst = std::max({worst, std::abs(static_cast<double>(i) / N - phi), std::abs(static_cast<double>(j) / N - phi)});
        i = j;
    }
    return worst;
}

struct ChernoffCheck {
    double multiple = 0; // t = multiple * sigma
    double t = 0;
    double upper_bound = 1;
    double upper_freq = 0;
    double upper_slack = 0;
    double lower_bound = 1;
    double lower_freq = 0;
    double lower_slack = 0;
    bool upper_ok = true;
    bool lower_ok = true;
};

struct SimReport {
    std::string pattern;
    int k = 0;
    std::size_t n = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double mu = 0;
    double mean = 0;
    double variance = 0;
    double stddev = 0;
    double mean_z = 0; // (mean - mu) / standard error
    double variance_ratio = 0; // variance / (mu^2 / n)
    double j_hat = 0;
    double kolmogorov = 0;
    double be_term = 0;
    std::vector<ChernoffCheck> chernoff;
    std::size_t chernoff_violations = 0;
    std::map<std::uint64_t, std::uint64_t> histogram;
    double seconds = 0;
};

// Leading term k^{l+2} l! / k! * sqrt(l / (pi n)) of the Berry-Esseen rate.
inline double berry_esseen_term(std::size_t ell, int k, std::size_t n) {
    const double l = static_cast<double>(ell);
    const double lead = std::exp((l + 2) * std::log(static_cast<double>(k)) + std::lgamma(l + 1) -
                                 std::lgamma(static_cast<double>(k) + 1));
    return lead * std::sqrt(l / (std::numbers::pi * static_cast<double>(n)));
}

// Tail bounds for X_n at deviation t; a bound of 1 means the inequality is vacuous there.
inline std::pair<double, double> chernoff_bounds(const MomentSet& m, double t) {
    if (m.K == 0 || m.Delta == 0 || t <= 0) return {1.0, 1.0};
    const double shrink = to_double(1 - Rational(m.Delta, 4 * m.K));
    if (shrink <= 0) return {1.0, 1.0};
    const double mu = to_double(m.mu);
    const double delta = to_double(Rational(m.Delta));
    const double room = to_double(1 - m.mu / Rational(m.K));
    const double up = std::exp(-t * t * shrink / (2 * delta * (mu + t / 3) * room));
    const double lo = mu > 0 ? std::exp(-t * t * shrink / (2 * delta * mu)) : 1.0;
    return {std::min(1.0, up), std::min(1.0, lo)};
}

inline SimReport simulate(const Pattern& v, int k, std::size_t n, std::size_t samples, std::uint64_t seed,
                          unsigned workers = 1) {
    if (samples == 0) throw invalid_argument("samples must be positive");
    const auto start = std::chrono::steady_clock::now();
    const MomentSet mom = exact_moments(v, k, n);
    const auto xs = sample_many(v, k, n, samples, seed, workers);

    SimReport rep;
    rep.pattern = v.str();
    rep.k = k;
    rep.n = n;
    rep.samples = samples;
    rep.seed = seed;
    rep.workers = std::max(1U, workers);
    rep.mu = to_double(mom.mu);
    const double N = static_cast<double>(samples);
    long double sum = 0;
    for (auto x : xs) {
        sum += static_cast<long double>(x);
        ++rep.histogram[x];
    }
    rep.mean = static_cast<double>(sum / N);
    long double ss = 0;
    for (auto x : xs) {
        const long double dx = static_cast<long double>(x) - rep.mean;
        ss += dx * dx;
    }
    rep.variance = samples > 1 ? static_cast<double>(ss / (N - 1)) : 0.0;
    rep.stddev = std::sqrt(rep.variance);
    const double se = rep.stddev / std::sqrt(N);
    rep.mean_z = se > 0 ? (rep.mean - rep.mu) / se : (rep.mean == rep.mu ? 0.0 : std::numeric_limits<double>::infinity());
    const double nn = static_cast<double>(n);
    if (rep.mu > 0) rep.variance_ratio = rep.variance / (rep.mu * rep.mu / nn);
    if (rep.stddev > 0) rep.j_hat = rep.mu / (rep.stddev * std::sqrt(nn));
    rep.be_term = berry_esseen_term(v.length(), k, n);

    if (rep.stddev > 0) {
        std::vector<double> z;
        z.reserve(samples);
        for (auto x : xs) z.push_back((static_cast<double>(x) - rep.mu) / rep.stddev);
        rep.kolmogorov = kolmogorov_to_normal(std::move(z));
    } else {
        rep.kolmogorov = 1.0;
    }

    for (double mult : {1.0, 2.0, 4.0}) {
        ChernoffCheck c;
        c.multiple = mult;
        c.t = mult * rep.stddev;
        std::tie(c.upper_bound, c.lower_bound) = chernoff_bounds(mom, c.t);
        std::size_t above = 0, below = 0;
        for (auto x : xs) {
            const double dx = static_cast<double>(x) - rep.mu;
            if (dx >= c.t) ++above;
            if (-dx >= c.t) ++below;
        }
        c.upper_freq = static_cast<double>(above) / N;
        c.lower_freq = static_cast<double>(below) / N;
        c.upper_slack = 3 * std::sqrt(c.upper_bound * (1 - c.upper_bound) / N);
        c.lower_slack = 3 * std::sqrt(c.lower_bound * (1 - c.lower_bound) / N);
        c.upper_ok = c.upper_freq <= c.upper_bound + c.upper_slack;
        c.lower_ok = c.lower_freq <= c.lower_bound + c.lower_slack;
        rep.chernoff_violations += (c.upper_ok ? 0 : 1) + (c.lower_ok ? 0 : 1);
        rep.chernoff.push_back(c);
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

// Shannon entropy (natural log) of X_n from an exact profile.
inline double entropy_of_profile(const OccurrenceProfile& p) {
    const BigInt total = ipow(BigInt(p.k), p.n);
    long double h = 0;
    for (const auto& f : p.counts) {
        if (f == 0) continue;
        const long double q = to_long_double(Rational(f, total));
        h -= q * std::log(q);
    }
    return static_cast<double>(std::max(0.0L, h));
}

inline double entropy_exact(const Pattern& v, int k, std::size_t n, const ProfileOptions& opt = {}) {
    return entropy_of_profile(brute_profile(v, k, n, opt));
}

// log(k / (d - 1)); needs at least two distinct pattern letters.
inline double entropy_rate_limit(const Pattern& v, int k) {
    if (v.distinct() <= 1) throw unsupported_pattern("entropy rate needs d > 1");
    return std::log(static_cast<double>(k) / (v.distinct() - 1));
}

struct EntropyPoint {
    std::size_t n = 0;
    double H = 0;
    double rate = 0;      // H / n
    double deviation = 0; // |H/n - log(k/(d-1))|
};

struct SubadditivityFailure {
    std::size_t n = 0;
    std::size_t m = 0;
    double lhs = 0; // H(n+m)
    double rhs = 0; // H(n) + H(m)
};

struct EntropyReport {
    std::string pattern;
    int k = 0;
    double limit = 0;
    std::vector<EntropyPoint> points; // n = 0..n_hi
    std::size_t pairs_checked = 0;
    std::vector<SubadditivityFailure> subadditivity_failures;
    bool deviation_decreasing = true;
};

// Exact entropies for n = 0..n_hi plus the subadditivity and deviation-trend
// checks over every pair with n + m <= n_hi, n, m >= 1. Values are compared
// with a relative tolerance of 1e-12 to absorb floating summation order.
inline EntropyReport entropy_series(const Pattern& v, int k, std::size_t n_hi, const ProfileOptions& opt = {}) {
    EntropyReport rep;
    rep.pattern = v.str();
    rep.k = k;
    rep.limit = entropy_rate_limit(v, k);
    for (const auto& p : brute_profiles_upto(v, k, n_hi, opt)) {
        EntropyPoint e;
        e.n = p.n;
        e.H = entropy_of_profile(p);
        e.rate = p.n ? e.H / static_cast<double>(p.n) : 0.0;
        e.deviation = std::abs(e.rate - rep.limit);
        rep.points.push_back(e);
    }
    for (std::size_t a = 1; a <= n_hi; ++a)
        for (std::size_t b = a; a + b <= n_hi; ++b) {
            ++rep.pairs_checked;
            const double lhs = rep.points[a + b].H;
            const double rhs = rep.points[a].H + rep.points[b].H;
            if (lhs > rhs + 1e-12 * std::max(1.0, rhs)) rep.subadditivity_failures.push_back({a, b, lhs, rhs});
        }
    for (std::size_t n = 2; n <= n_hi; ++n)
        if (rep.points[n].deviation >= rep.points[n - 1].deviation) rep.deviation_decreasing = false;
    return rep;
}

// Parameter schedule n -> (k_n, pattern v_n). Two forms:
//   "idpattern:beta=B[,A=a]"   v_n = 12..d_n with d_n = l_n = k_n = ceil(a n^B)
//   "fixed:pattern=P,k=K"      constant pattern and alphabet
struct PoissonSchedule {
    std::string spec;
    bool identity = true;
    double beta = 0.8;
    double A = 1.0;
    std::string fixed_pattern;
    int fixed_k = 0;

    static PoissonSchedule parse(const std::string& text) {
        PoissonSchedule s;
        s.spec = text;
        const auto colon = text.find(':');
        if (colon == std::string::npos) throw invalid_argument("schedule needs kind:params, got '" + text + "'");
        const std::string kind = text.substr(0, colon);
        std::map<std::string, std::string> kv;
        std::stringstream rest(text.substr(colon + 1));
        std::string item;
        while (std::getline(rest, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw invalid_argument("bad schedule parameter '" + item + "'");
            kv[item.substr(0, eq)] = item.substr(eq + 1);
        }
        auto number = [&](const std::string& key) {
            try {
                std::size_t used = 0;
                const double x = std::stod(kv.at(key), &used);
                if (used != kv.at(key).size() || !std::isfinite(x)) throw std::exception();
                return x;
            } catch (...) {
                throw invalid_argument("schedule parameter '" + key + "' missing or not a number");
            }
        };
        if (kind == "idpattern") {
            s.beta = number("beta");
            if (kv.count("A")) s.A = number("A");
            if (s.beta <= 0 || s.beta > 1 || s.A <= 0) throw invalid_argument("idpattern needs 0 < beta <= 1, A > 0");
            for (const auto& [key, val] : kv)
                if (key != "beta" && key != "A") throw invalid_argument("unknown schedule parameter '" + key + "'");
        } else if (kind == "fixed") {
            s.identity = false;
            if (!kv.count("pattern")) throw invalid_argument("fixed schedule needs pattern=");
            s.fixed_pattern = kv["pattern"];
            s.fixed_k = static_cast<int>(number("k"));
            Pattern::parse(s.fixed_pattern).require_alphabet(s.fixed_k);
        } else {
            throw invalid_argument("unknown schedule kind '" + kind + "'");
        }
        return s;
    }

    struct Params {
        int k = 0;
        Pattern v;
    };

    Params at(std::size_t n) const {
        if (!identity) return {fixed_k, Pattern::parse(fixed_pattern)};
        const double x = A * std::pow(static_cast<double>(n), beta);
        if (x > 250) throw invalid_argument("schedule pattern length exceeds 250 letters");
        const int d = std::max(1, static_cast<int>(std::ceil(x - 1e-9)));
        std::vector<Letter> letters(d);
        for (int i = 0; i < d; ++i) letters[i] = i + 1;
        return {d, Pattern(std::move(letters))};
    }
};

struct PoissonPoint {
    std::size_t n = 0;
    int k = 0;
    std::size_t ell = 0;
    int d = 0;
    std::string pattern;
    double mu = 0;
    std::vector<double> empirical; // r = 0..truncation
    std::vector<double> poisson;
    std::size_t truncation = 0;
    double poisson_tail = 0; // Poisson mass beyond the truncation
    double dtv = 0;
    double dtv_bias = 0; // plug-in bias scale 1/2 sum sqrt(p(1-p)/N)
    double b1 = 0;
    double b2 = 0;
    double budget = 0; // 2 (b1 + b2)
    std::optional<double> zero_term; // |f_0 / k^n - e^{-mu}|
    // Conditions of the limit theorem, recorded without adjudication.
    double d_over_ell = 0;
    double beta_threshold = 0; // 2 / (2 + d/l)
    bool ell_condition = false; // l_n >= A n^beta
    bool d_condition = false;   // d_n >= A n^beta
};

struct PoissonCheck {
    std::string schedule;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<PoissonPoint> points;
    bool dtv_decreasing = true;
};

inline double poisson_pmf(double mu, std::size_t r) {
    if (mu == 0) return r == 0 ? 1.0 : 0.0;
    const double x = static_cast<double>(r);
    return std::exp(x * std::log(mu) - mu - std::lgamma(x + 1));
}

// Dependency-graph terms for the indicators of the C(n, l) position sets:
// b1 sums p_i p_j over overlapping pairs (including i = j), b2 bounds the
// joint probabilities of distinct overlapping pairs by overlap size.
inline std::pair<Rational, Rational> chen_stein_terms(const Pattern& v, int k, std::size_t n) {
    const auto l = static_cast<long long>(v.length());
    const int d = v.distinct();
    const auto nn = static_cast<long long>(n);
    if (nn < l) return {Rational(0), Rational(0)};
    const BigInt kl = ipow(BigInt(k), static_cast<unsigned long long>(l));
    const Rational p(binomial(k, d), kl);
    const BigInt K = binomial(nn, l);
    const BigInt overlap = K - binomial(nn - l, l);
    const Rational b1 = Rational(K * overlap) * p * p;
    Rational sum = 0;
    for (long long i = 1; i <= l - 1; ++i)
        sum += Rational(binomial(nn - l, l - i) * binomial(l, i) * binomial(k, std::min<long long>(l - i, d)),
                        ipow(BigInt(k), static_cast<unsigned long long>(l - i)));
    return {b1, p * Rational(K) * sum};
}

struct PoissonOptions {
    unsigned workers = 1;
    std::size_t automaton_states = 2'000'000;
};

inline PoissonCheck poisson_regime(const PoissonSchedule& schedule, const std::vector<std::size_t>& ns,
                                   std::size_t samples, std::uint64_t seed, const PoissonOptions& opt = {}) {
    if (samples == 0) throw invalid_argument("samples must be positive");
    if (ns.empty()) throw invalid_argument("empty n list");
    PoissonCheck out;
    out.schedule = schedule.spec;
    out.samples = samples;
    out.seed = seed;
    const double N = static_cast<double>(samples);
    for (std::size_t idx = 0; idx < ns.size(); ++idx) {
        const std::size_t n = ns[idx];
        const auto [k, v] = schedule.at(n);
        PoissonPoint pt;
        pt.n = n;
        pt.k = k;
        pt.ell = v.length();
        pt.d = v.distinct();
        if (pt.d > std::min<long long>(k, static_cast<long long>(pt.ell)))
            throw invalid_argument("schedule violates d_n <= min(k_n, l_n)");
        pt.pattern = v.str();
        const MomentSet mom = exact_moments(v, k, n);
        pt.mu = to_double(mom.mu);

        // Substreams are offset per n so points are independent draws.
        const auto xs = sample_many(v, k, n, samples, seed ^ (0x100000001b3ULL * (idx + 1)), opt.workers);
        std::uint64_t max_x = 0;
        for (auto x : xs) max_x = std::max(max_x, x);
        std::size_t r_star = static_cast<std::size_t>(std::ceil(pt.mu));
        while (poisson_pmf(pt.mu, r_star) >= 1e-12) ++r_star;
        pt.truncation = std::max<std::size_t>(r_star, max_x);
        std::vector<std::size_t> hits(pt.truncation + 1, 0);
        for (auto x : xs) ++hits[x];
        for (auto h : hits) pt.empirical.push_back(static_cast<double>(h) / N);
        double l1 = 0, bias = 0;
        for (std::size_t r = 0; r <= pt.truncation; ++r) {
            const double q = poisson_pmf(pt.mu, r);
            pt.poisson.push_back(q);
            const double e = pt.empirical[r];
            l1 += (r == 0) ? std::abs((1 - e) + std::expm1(-pt.mu)) : std::abs(e - q);
            bias += std::sqrt(e * (1 - e) / N);
        }
        // Summed directly: 1 - (mass up to the cut) cancels badly when mu is tiny.
        for (std::size_t r = pt.truncation + 1;; ++r) {
            const double q = poisson_pmf(pt.mu, r);
            pt.poisson_tail += q;
            if (static_cast<double>(r) > pt.mu && q < 1e-300 + 1e-17 * pt.poisson_tail) break;
        }
        pt.dtv = std::clamp(0.5 * (l1 + pt.poisson_tail), 0.0, 1.0);
        pt.dtv_bias = 0.5 * bias;

        const auto [b1, b2] = chen_stein_terms(v, k, n);
        pt.b1 = to_double(b1);
        pt.b2 = to_double(b2);
        pt.budget = 2 * (pt.b1 + pt.b2);

        if (static_cast<double>(v.length()) * k <= static_cast<double>(opt.automaton_states)) {
            try {
                BuildOptions bo;
                bo.max_states = opt.automaton_states;
                const BigInt f0 = count_at_most(build_automaton(v, 0, k, bo), n);
                const BigInt total = ipow(BigInt(k), n);
                // Both sides are near 1 in the sparse regime; compare the complements.
                const double hit = to_double(Rational(total - f0, total));
                pt.zero_term = std::abs(hit + std::expm1(-pt.mu));
            } catch (const budget_exceeded&) {
                pt.zero_term.reset();
            }
        }

        const double ell = static_cast<double>(pt.ell);
        const double cut = schedule.A * std::pow(static_cast<double>(n), schedule.beta);
        pt.d_over_ell = pt.d / ell;
        pt.beta_threshold = 2 / (2 + pt.d_over_ell);
        pt.ell_condition = ell >= cut - 1e-9;
        pt.d_condition = pt.d >= cut - 1e-9;
        out.points.push_back(std::move(pt));
    }
    for (std::size_t i = 1; i < out.points.size(); ++i)
        if (!(out.points[i].dtv < out.points[i - 1].dtv)) out.dtv_decreasing = false;
    return out;
}

} // namespace occulex
