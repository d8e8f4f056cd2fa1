#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "counting.hpp"
#include "rng.hpp"

namespace occulex {

inline void require_unit_interval(const Rational& x) {
    if (x < 0 || x > 1) throw invalid_argument("x must lie in [0, 1], got " + to_string(x));
}

// sum_r f_r (1 - x)^r, exactly.
inline Rational partition_from_profile(const OccurrenceProfile& p, const Rational& x) {
    require_unit_interval(x);
    const Rational q = 1 - x;
    Rational acc = 0;
    for (std::size_t r = p.counts.size(); r-- > 0;) acc = acc * q + Rational(p.counts[r]);
    return acc;
}

struct PartitionValue {
    Rational value;
    bool exact = true;
    // Truncated mode: |c - value| <= error_bound, using f_r for r <= R.
    Rational error_bound = 0;
    int R = -1;
};

struct PartitionMode {
    enum class Kind { exact, truncated } kind = Kind::exact;
    // Fixed truncation level; negative selects R adaptively from rel_tol.
    int R = -1;
    Rational rel_tol = Rational(1, 1000000);
    int max_R = 250;
    std::size_t max_classes = 2'000'000;
    BuildOptions build{};

    static PartitionMode parse(const std::string& text) {
        PartitionMode m;
        if (text == "exact") return m;
        m.kind = Kind::truncated;
        if (text == "trunc" || text == "truncated") return m;
        const auto colon = text.find(':');
        if (colon == std::string::npos || text.substr(0, colon) != "trunc")
            throw invalid_argument("mode must be exact, trunc or trunc:R");
        try {
            std::size_t used = 0;
            m.R = std::stoi(text.substr(colon + 1), &used);
            if (used != text.size() - colon - 1 || m.R < 0) throw std::exception();
        } catch (...) {
            throw invalid_argument("bad truncation level in '" + text + "'");
        }
        return m;
    }
};

inline PartitionValue partition_function(const Pattern& v, int k, std::size_t n, const Rational& x,
                                         const PartitionMode& mode = {}) {
    require_unit_interval(x);
    v.require_alphabet(k);
    PartitionValue out;
    if (mode.kind == PartitionMode::Kind::exact) {
        out.value = partition_from_profile(exact_profile(v, k, n, mode.max_classes), x);
        return out;
    }
    const Rational q = 1 - x;
    const BigInt total = ipow(BigInt(k), n);
    out.exact = false;
    Rational sum = 0;
    BigInt below = 0; // g_{r-1}
    Rational qr = 1;  // q^r
    for (int r = 0;; ++r) {
        if (r > mode.max_R) throw budget_exceeded("truncation level would exceed " + std::to_string(mode.max_R));
        const BigInt g = count_at_most(build_automaton(v, r, k, mode.build), n);
        sum += Rational(g - below) * qr;
        below = g;
        qr *= q;
        const Rational bound = qr * Rational(total - g);
        const bool done = mode.R >= 0 ? r == mode.R : bound <= mode.rel_tol * sum;
        if (done) {
            out.value = sum;
            out.error_bound = bound;
            out.R = r;
            if (bound == 0) out.exact = true;
            return out;
        }
    }
}

struct SubmultiplicativityCheck {
    std::size_t n = 0, m = 0;
    Rational x;
    Rational c_n, c_m, c_nm;
    bool holds = false; // c(n+m) <= c(n) c(m)
    // (d-1)^len <= c(len) <= k^len at len = n, m, n+m.
    bool bracket = false;
};

inline SubmultiplicativityCheck submultiplicativity_check(const Pattern& v, int k, std::size_t n, std::size_t m,
                                                          const Rational& x, std::size_t max_classes = 2'000'000) {
    require_unit_interval(x);
    const auto profiles = exact_profiles_upto(v, k, n + m, max_classes);
    SubmultiplicativityCheck c;
    c.n = n;
    c.m = m;
    c.x = x;
    c.c_n = partition_from_profile(profiles[n], x);
    c.c_m = partition_from_profile(profiles[m], x);
    c.c_nm = partition_from_profile(profiles[n + m], x);
    c.holds = c.c_nm <= c.c_n * c.c_m;
    c.bracket = true;
    for (std::size_t len : {n, m, n + m}) {
        const Rational val = partition_from_profile(profiles[len], x);
        if (val < Rational(ipow(BigInt(v.distinct() - 1), len)) || val > Rational(ipow(BigInt(k), len)))
            c.bracket = false;
    }
    return c;
}

// Lexicographic index of a word over [k] (first letter most significant).
inline std::uint64_t word_index(std::span<const Letter> w, int k) {
    std::uint64_t idx = 0;
    for (Letter a : w) idx = idx * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(a - 1);
    return idx;
}

inline std::vector<Letter> word_at(std::uint64_t idx, int k, std::size_t n) {
    std::vector<Letter> w(n);
    for (std::size_t i = n; i-- > 0;) {
        w[i] = static_cast<Letter>(idx % static_cast<std::uint64_t>(k)) + 1;
        idx /= static_cast<std::uint64_t>(k);
    }
    return w;
}

struct ExactMeasure {
    Pattern v;
    int k = 0;
    std::size_t n = 0;
    Rational x;
    Rational normalizer;
    std::vector<std::uint64_t> occurrences; // by word index
    std::vector<Rational> probability;      // by word index
};

inline ExactMeasure exact_measure(const Pattern& v, int k, std::size_t n, const Rational& x,
                                  double max_words = 1e6) {
    require_unit_interval(x);
    v.require_alphabet(k);
    if (std::pow(static_cast<double>(k), static_cast<double>(n)) > max_words)
        throw budget_exceeded("word space " + std::to_string(k) + "^" + std::to_string(n) + " exceeds budget");
    const OccurrenceMatcher m(v, k);
    const std::uint64_t size = static_cast<std::uint64_t>(std::llround(std::pow(k, static_cast<double>(n))));
    ExactMeasure out{v, k, n, x, 0, {}, {}};
    out.occurrences.reserve(size);
    std::uint64_t max_occ = 0;
    for (std::uint64_t i = 0; i < size; ++i) {
        const auto w = word_at(i, k, n);
        out.occurrences.push_back(m.count<std::uint64_t>(w));
        max_occ = std::max(max_occ, out.occurrences.back());
    }
    const Rational q = 1 - x;
    std::vector<Rational> weight(max_occ + 1);
    Rational p = 1;
    for (auto& wgt : weight) {
        wgt = p;
        p *= q;
    }
    for (auto r : out.occurrences) out.normalizer += weight[r];
    if (out.normalizer == 0) throw invariant_violation("zero normalizer");
    out.probability.reserve(size);
    for (auto r : out.occurrences) out.probability.push_back(weight[r] / out.normalizer);
    return out;
}

// (1 - x)^e for integer e of either sign; x < 1.
inline Rational weight_power(const Rational& x, long long e) {
    const Rational q = 1 - x;
    if (e >= 0) return rpow(q, static_cast<unsigned long long>(e));
    if (q == 0) throw invalid_argument("negative power of zero weight");
    return rpow(1 / q, static_cast<unsigned long long>(-e));
}

// Metropolis transition probability between words differing in at most one
// position: propose a uniform position and a uniform letter, accept with
// min(1, (1 - x)^{occ(w') - occ(w)}).
inline Rational metropolis_probability(const OccurrenceMatcher& m, const Rational& x, std::span<const Letter> w,
                                       std::span<const Letter> w2) {
    if (w.size() != w2.size() || w.empty()) throw invalid_argument("words must share a positive length");
    std::size_t diff = w.size();
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] != w2[i]) {
            if (diff != w.size()) return 0;
            diff = i;
        }
    const Rational propose(1, static_cast<long long>(w.size()) * m.k());
    if (diff == w.size()) {
        // Staying put: every rejected move plus the n proposals of the current letter.
        std::vector<Letter> alt(w.begin(), w.end());
        Rational stay = 0;
        for (std::size_t i = 0; i < w.size(); ++i)
            for (int a = 1; a <= m.k(); ++a) {
                if (a == w[i]) {
                    stay += propose;
                    continue;
                }
                alt[i] = a;
                stay += propose * (1 - metropolis_probability(m, x, w, alt) / propose);
                alt[i] = w[i];
            }
        return stay;
    }
    const auto before = static_cast<long long>(m.count_through<std::uint64_t>(w, diff));
    const auto after = static_cast<long long>(m.count_through<std::uint64_t>(w2, diff));
    const Rational ratio = weight_power(x, after - before);
    return propose * (ratio < 1 ? ratio : Rational(1));
}

struct ChainOptions {
    std::size_t steps = 1'000'000;
    // Defaults: 10 n k burn-in steps, record every n steps.
    std::optional<std::size_t> burn_in;
    std::optional<std::size_t> thinning;
    std::uint64_t seed = 0;
    std::uint64_t chain = 0;
};

// Single-site Metropolis chain targeting the Boltzmann law (1 - x)^{occ(w)} / c.
class BoltzmannChain {
public:
    BoltzmannChain(const Pattern& v, int k, std::size_t n, double x, std::uint64_t seed, std::uint64_t chain = 0)
        : matcher_(v, k), n_(n), rng_(seed, chain) {
        if (!(x >= 0 && x <= 1)) throw invalid_argument("x must lie in [0, 1]");
        if (x == 1) throw invalid_argument("x = 1 leaves zero-weight words; sample the avoidance automaton instead");
        if (n == 0) throw invalid_argument("chain needs n >= 1");
        q_ = 1 - x;
        w_.resize(n);
        for (auto& a : w_) a = rng_.letter(k);
        occ_ = matcher_.count<std::uint64_t>(w_);
    }

    // One proposal; returns whether it was accepted.
    bool step() {
        ++proposals_;
        const auto pos = static_cast<std::size_t>(rng_.below(n_));
        const Letter a = rng_.letter(matcher_.k());
        if (a == w_[pos]) {
            ++accepted_;
            return true;
        }
        const std::uint64_t before = matcher_.count_through<std::uint64_t>(w_, pos);
        const Letter old = w_[pos];
        w_[pos] = a;
        const std::uint64_t after = matcher_.count_through<std::uint64_t>(w_, pos);
        const double delta = static_cast<double>(after) - static_cast<double>(before);
        if (delta > 0 && rng_.uniform() >= std::pow(q_, delta)) {
            w_[pos] = old;
            return false;
        }
        occ_ = occ_ + after - before;
        ++accepted_;
        return true;
    }

    std::span<const Letter> word() const noexcept { return w_; }
    std::uint64_t occurrences() const noexcept { return occ_; }
    std::uint64_t proposals() const noexcept { return proposals_; }
    double acceptance_rate() const {
        return proposals_ ? static_cast<double>(accepted_) / static_cast<double>(proposals_) : 0.0;
    }

private:
    OccurrenceMatcher matcher_;
    std::size_t n_;
    Stream rng_;
    double q_ = 1;
    std::vector<Letter> w_;
    std::uint64_t occ_ = 0;
    std::uint64_t proposals_ = 0;
    std::uint64_t accepted_ = 0;
};

struct ChainRun {
    std::size_t burn_in = 0;
    std::size_t thinning = 1;
    std::size_t steps = 0;
    double acceptance_rate = 0;
    std::vector<std::uint64_t> occurrences; // X at each recorded sample
    std::vector<std::vector<Letter>> words; // only when requested
    std::map<std::uint64_t, std::uint64_t> word_counts; // by word index, when k^n fits 64 bits
};

inline ChainRun mcmc_sample(const Pattern& v, int k, std::size_t n, double x, const ChainOptions& opt,
                            bool keep_words = false) {
    if (opt.steps == 0) throw invalid_argument("steps must be positive");
    BoltzmannChain chain(v, k, n, x, opt.seed, opt.chain);
    ChainRun run;
    run.burn_in = opt.burn_in.value_or(10 * n * static_cast<std::size_t>(k));
    run.thinning = std::max<std::size_t>(1, opt.thinning.value_or(n));
    run.steps = opt.steps;
    const bool index_words = static_cast<double>(n) * std::log2(static_cast<double>(k)) < 63;
    for (std::size_t i = 0; i < run.burn_in; ++i) chain.step();
    for (std::size_t i = 1; i <= opt.steps; ++i) {
        chain.step();
        if (i % run.thinning != 0) continue;
        run.occurrences.push_back(chain.occurrences());
        if (index_words) ++run.word_counts[word_index(chain.word(), k)];
        if (keep_words) run.words.emplace_back(chain.word().begin(), chain.word().end());
    }
    run.acceptance_rate = chain.acceptance_rate();
    return run;
}

// Total variation between the chain's recorded words and the exact measure.
inline double total_variation(const ChainRun& run, const ExactMeasure& exact) {
    double samples = 0;
    for (const auto& [idx, c] : run.word_counts) samples += static_cast<double>(c);
    if (samples == 0) throw invalid_argument("chain recorded no samples");
    double l1 = 0;
    for (std::size_t i = 0; i < exact.probability.size(); ++i) {
        const auto it = run.word_counts.find(i);
        const double e = it == run.word_counts.end() ? 0.0 : static_cast<double>(it->second) / samples;
        l1 += std::abs(e - to_double(exact.probability[i]));
    }
    return l1 / 2;
}

// rho_n = c n^a, or infinity (x = 0). Parsed from "n^a", "c*n^a" or "inf".
struct RhoSchedule {
    std::string spec;
    bool infinite = false;
    double c = 1;
    double a = 0;

    static RhoSchedule parse(const std::string& text) {
        RhoSchedule s;
        s.spec = text;
        if (text == "inf") {
            s.infinite = true;
            return s;
        }
        std::string rest = text;
        if (const auto star = rest.find('*'); star != std::string::npos) {
            s.c = to_double(parse_rational(rest.substr(0, star)));
            rest = rest.substr(star + 1);
        }
        if (rest.rfind("n^", 0) != 0) throw invalid_argument("rho schedule must look like n^a, c*n^a or inf");
        s.a = to_double(parse_rational(rest.substr(2)));
        if (!(s.c > 0)) throw invalid_argument("rho coefficient must be positive");
        return s;
    }

    // lim n^l / rho_n; infinite limits are rejected.
    double gamma(std::size_t ell) const {
        if (infinite) return 0;
        const double l = static_cast<double>(ell);
        if (a > l) return 0;
        if (a == l) return 1 / c;
        throw invalid_argument("rho = " + spec + " grows slower than n^" + std::to_string(ell) + "; gamma is infinite");
    }

    double x_at(std::size_t n) const {
        if (infinite) return 0;
        const double rho = c * std::pow(static_cast<double>(n), a);
        if (rho < 1) throw invalid_argument("rho_n < 1 at n = " + std::to_string(n) + " gives x > 1");
        return 1 / rho;
    }
};

struct WeakLimitPoint {
    std::size_t n = 0;
    double x = 0;
    bool exact = true; // false: MCMC estimates
    std::vector<double> mgf; // E_Q[exp(t X / n^l)] per t
    double mean_scaled = 0;  // E_Q[X / n^l]
    std::optional<double> entropy; // H_n under Q (exact only)
    std::optional<double> entropy_rate;
    std::vector<double> mgf_gap;
    double mean_gap = 0;
};

struct WeakAvoidanceReport {
    std::string pattern;
    int k = 0;
    std::string rho;
    double gamma = 0;
    std::vector<double> t;
    std::vector<double> mgf_target; // exp(t C(k,d) / (k^l l!))
    double mean_target = 0;         // C(k,d) / (k^l l!)
    std::optional<double> entropy_target; // log(k/(d-1)) + gamma C(k,d)/(k^l l!)
    std::vector<WeakLimitPoint> points;
    // Per t: |gap| strictly decreasing along the n list.
    std::vector<bool> mgf_gap_shrinking;
};

namespace detail {

inline double log_sum_exp(const std::vector<long double>& terms) {
    long double top = -std::numeric_limits<long double>::infinity();
    for (auto t : terms) top = std::max(top, t);
    if (!std::isfinite(top)) return static_cast<double>(top);
    long double s = 0;
    for (auto t : terms) s += std::exp(t - top);
    return static_cast<double>(top + std::log(s));
}

} // namespace detail

struct WeakLimitOptions {
    std::size_t samples = 200000;
    std::uint64_t seed = 0;
    std::size_t max_classes = 2'000'000;
    double enumerate_below = 2e7;
};

inline WeakAvoidanceReport weak_limit_report(const Pattern& v, int k, const RhoSchedule& rho,
                                             const std::vector<double>& ts, const std::vector<std::size_t>& ns,
                                             const WeakLimitOptions& opt = {}) {
    v.require_alphabet(k);
    if (ns.empty()) throw invalid_argument("empty n list");
    const std::size_t ell = v.length();
    const int d = v.distinct();
    WeakAvoidanceReport rep;
    rep.pattern = v.str();
    rep.k = k;
    rep.rho = rho.spec;
    rep.gamma = rho.gamma(ell);
    rep.t = ts;
    rep.mean_target = to_double(Rational(binomial(k, d), ipow(BigInt(k), ell) * factorial(static_cast<long long>(ell))));
    for (double t : ts) rep.mgf_target.push_back(std::exp(t * rep.mean_target));
    if (d > 1) rep.entropy_target = std::log(static_cast<double>(k) / (d - 1)) + rep.gamma * rep.mean_target;

    std::size_t exact_upto = 0;
    std::vector<OccurrenceProfile> profiles;
    const std::size_t n_hi = *std::max_element(ns.begin(), ns.end());
    try {
        profiles = exact_profiles_upto(v, k, n_hi, opt.max_classes, opt.enumerate_below);
        exact_upto = n_hi;
    } catch (const budget_exceeded&) {
        profiles.clear();
    }

    for (std::size_t idx = 0; idx < ns.size(); ++idx) {
        const std::size_t n = ns[idx];
        WeakLimitPoint pt;
        pt.n = n;
        pt.x = rho.x_at(n);
        const long double scale = std::pow(static_cast<long double>(n), static_cast<long double>(ell));
        const long double logq = pt.x < 1 ? std::log1p(-static_cast<long double>(pt.x))
                                          : -std::numeric_limits<long double>::infinity();
        if (!profiles.empty() && n <= exact_upto) {
            // Q(r) = f_r q^r / c, evaluated in log space.
            const auto& f = profiles[n].counts;
            std::vector<long double> base;
            std::vector<std::size_t> support;
            for (std::size_t r = 0; r < f.size(); ++r) {
                if (f[r] == 0) continue;
                if (r > 0 && !std::isfinite(logq)) continue;
                base.push_back(static_cast<long double>(log_big(f[r])) + (r ? static_cast<long double>(r) * logq : 0));
                support.push_back(r);
            }
            const double logc = detail::log_sum_exp(base);
            for (double t : ts) {
                std::vector<long double> shifted = base;
                for (std::size_t j = 0; j < shifted.size(); ++j)
                    shifted[j] += static_cast<long double>(t) * support[j] / scale;
                pt.mgf.push_back(std::exp(detail::log_sum_exp(shifted) - logc));
            }
            long double mean = 0, H = 0;
            for (std::size_t j = 0; j < base.size(); ++j) {
                const long double lq = base[j] - logc;
                const long double qv = std::exp(lq);
                mean += qv * support[j];
                H -= qv * lq;
            }
            pt.mean_scaled = static_cast<double>(mean / scale);
            pt.entropy = static_cast<double>(std::max(0.0L, H));
            pt.entropy_rate = n ? *pt.entropy / static_cast<double>(n) : 0.0;
        } else {
            pt.exact = false;
            if (pt.x >= 1) throw invalid_argument("MCMC needs x < 1");
            ChainOptions co;
            co.steps = opt.samples * n;
            co.seed = opt.seed;
            co.chain = idx;
            const auto run = mcmc_sample(v, k, n, pt.x, co);
            std::vector<long double> sums(ts.size(), 0);
            long double mean = 0;
            for (auto x : run.occurrences) {
                mean += x;
                for (std::size_t j = 0; j < ts.size(); ++j) sums[j] += std::exp(static_cast<long double>(ts[j]) * x / scale);
            }
            const long double N = static_cast<long double>(run.occurrences.size());
            for (auto s : sums) pt.mgf.push_back(static_cast<double>(s / N));
            pt.mean_scaled = static_cast<double>(mean / N / scale);
        }
        for (std::size_t j = 0; j < ts.size(); ++j) pt.mgf_gap.push_back(std::abs(pt.mgf[j] - rep.mgf_target[j]));
        pt.mean_gap = std::abs(pt.mean_scaled - rep.mean_target);
        rep.points.push_back(std::move(pt));
    }
    for (std::size_t j = 0; j < ts.size(); ++j) {
        bool shrink = true;
        for (std::size_t i = 1; i < rep.points.size(); ++i)
            if (!(rep.points[i].mgf_gap[j] < rep.points[i - 1].mgf_gap[j])) shrink = false;
        rep.mgf_gap_shrinking.push_back(shrink);
    }
    return rep;
}

// Euler's function prod_{j >= 1} 1 / (1 - q^j) truncated at j = terms, with a
// bound on the relative error of the truncation.
struct EulerProduct {
    double value = 1;
    double tail_bound = 0; // value_true / value <= exp(tail_bound)
};

inline EulerProduct euler_phi(double q, int terms = 60) {
    if (q < 0 || q >= 1) throw invalid_argument("Euler product needs 0 <= q < 1");
    EulerProduct e;
    for (int j = 1; j <= terms; ++j) e.value /= 1 - std::pow(q, j);
    // -log(1 - y) <= y / (1 - y); summing the geometric tail beyond `terms`.
    const double qt = std::pow(q, terms + 1);
    e.tail_bound = qt / ((1 - q) * (1 - qt));
    return e;
}

struct InversionSandwichRow {
    std::size_t n = 0;
    Rational c;
    BigInt lower;  // C(n+k-1, k-1)
    Rational upper; // C(n+k-1, k-1) / x^{k-1}
    bool lower_ok = false; // strict
    bool upper_ok = false; // strict
    double scaled = 0;     // c / n^{k-1}
    bool limit_window_ok = false;
};

struct InversionSandwich {
    int k = 0;
    Rational x;
    double phi = 0;
    double phi_tail_bound = 0;
    double limit_lower = 0; // phi(1-x)^{k-1} / (k-1)!
    double limit_upper = 0; // 1 / (x^{k-1} (k-1)!)
    double epsilon = 0;
    std::vector<InversionSandwichRow> rows;
    bool all_lower = true;
    bool all_upper = true;
};

// Partition function of the inversion pattern 21 against its two-sided
// bound in binomial(n+k-1, k-1), and c / n^{k-1} against the limit window
// [phi(1-x)^{k-1}/(k-1)! (1-eps), 1/(x^{k-1}(k-1)!) (1+eps)].
inline InversionSandwich inversion_sandwich(int k, const Rational& x, const std::vector<std::size_t>& ns,
                                            double epsilon = 0.05, std::size_t max_classes = 2'000'000) {
    if (!(x > 0 && x < 1)) throw invalid_argument("sandwich needs 0 < x < 1");
    if (k < 2) throw invalid_argument("sandwich needs k >= 2");
    if (ns.empty()) throw invalid_argument("empty n list");
    const Pattern v = Pattern::parse("21");
    InversionSandwich s;
    s.k = k;
    s.x = x;
    s.epsilon = epsilon;
    const auto phi = euler_phi(to_double(1 - x));
    s.phi = phi.value;
    s.phi_tail_bound = phi.tail_bound;
    const double fact = to_double(Rational(factorial(k - 1)));
    s.limit_lower = std::pow(s.phi, k - 1) / fact;
    s.limit_upper = 1 / (std::pow(to_double(x), k - 1) * fact);
    const auto profiles = exact_profiles_upto(v, k, *std::max_element(ns.begin(), ns.end()), max_classes);
    const Rational xk = rpow(x, static_cast<unsigned long long>(k - 1));
    for (std::size_t n : ns) {
        InversionSandwichRow row;
        row.n = n;
        row.c = partition_from_profile(profiles[n], x);
        row.lower = binomial(static_cast<long long>(n) + k - 1, k - 1);
        row.upper = Rational(row.lower) / xk;
        row.lower_ok = Rational(row.lower) < row.c;
        row.upper_ok = row.c < row.upper;
        row.scaled = n ? to_double(row.c) / std::pow(static_cast<double>(n), k - 1) : 0.0;
        row.limit_window_ok = row.scaled >= s.limit_lower * (1 - epsilon) && row.scaled <= s.limit_upper * (1 + epsilon);
        s.all_lower = s.all_lower && row.lower_ok;
        s.all_upper = s.all_upper && row.upper_ok;
        s.rows.push_back(std::move(row));
    }
    return s;
}

} // namespace occulex
