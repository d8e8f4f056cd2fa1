#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "occulex/cache.hpp"
#include "occulex/counting.hpp"
#include "occulex/genfunc.hpp"
#include "occulex/permutations.hpp"
#include "occulex/randomwords.hpp"
#include "occulex/verify.hpp"
#include "occulex/weakavoid.hpp"

using namespace occulex;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kCheckFailed = 1, kInvalid = 2, kBudget = 3, kInternal = 4 };

struct Globals {
    std::uint64_t seed = 1;
    std::size_t budget_states = 2'000'000;
    double budget_words = 1e8;
    std::size_t budget_samples = 10'000'000;
    std::string cache_dir;
    std::string format = "json";
    std::string out;
    unsigned workers = 1;
    bool timing = false;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Output {
    Json result = Json::object();
    Table table;
    std::vector<std::string> summary; // text format lines
    std::vector<std::string> anchors;
    int exit_code = kOk;
};

std::string big(const BigInt& v) { return v.str(); }

std::string dbl(double x) {
    std::ostringstream s;
    s.precision(10);
    s << x;
    return s.str();
}

// "7", "5..10" or "20,40,80".
std::vector<std::size_t> parse_ns(const std::string& text) {
    std::vector<std::size_t> out;
    auto number = [&](const std::string& t) {
        if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
            throw invalid_argument("bad n value '" + t + "' in '" + text + "'");
        return static_cast<std::size_t>(std::stoull(t));
    };
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const auto lo = number(text.substr(0, dots)), hi = number(text.substr(dots + 2));
        if (lo > hi) throw invalid_argument("empty range '" + text + "'");
        for (auto n = lo; n <= hi; ++n) out.push_back(n);
        return out;
    }
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) out.push_back(number(item));
    if (out.empty()) throw invalid_argument("empty n list");
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) out.push_back(to_double(parse_rational(item)));
    if (out.empty()) throw invalid_argument("empty list '" + text + "'");
    return out;
}

std::vector<int> parse_ids(const std::string& text) {
    std::vector<int> out;
    if (text.empty()) return out;
    for (auto n : parse_ns(text)) out.push_back(static_cast<int>(n));
    return out;
}

class Context {
public:
    explicit Context(const Globals& g) : g_(g) {
        build_.max_states = g.budget_states;
        if (!g.cache_dir.empty() || std::getenv("OCCULEX_CACHE"))
            cache_.emplace(resolve_cache_dir(g.cache_dir.empty() ? std::nullopt : std::optional(g.cache_dir)));
    }

    const Globals& g() const { return g_; }
    const BuildOptions& build() const { return build_; }

    ProfileOptions profile() const { return {g_.budget_words, g_.workers}; }

    void require_samples(std::size_t samples, const char* what) const {
        if (samples == 0) throw invalid_argument(std::string(what) + " must be positive");
        if (samples > g_.budget_samples)
            throw budget_exceeded(std::string(what) + " " + std::to_string(samples) + " exceed sample budget " +
                                  std::to_string(g_.budget_samples));
    }

    void require_word_space(int k, std::size_t n) const {
        if (std::pow(double(k), double(n)) > g_.budget_words)
            throw budget_exceeded("word space " + std::to_string(k) + "^" + std::to_string(n) + " exceeds budget");
    }

    // Through the disk cache when one is configured.
    Automaton automaton(const Pattern& v, int r, int k, Json* meta = nullptr) const {
        if (!cache_) {
            const auto start = std::chrono::steady_clock::now();
            auto a = build_automaton(v, r, k, build_);
            if (meta)
                *meta = {{"enabled", false},
                         {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
            return a;
        }
        auto hit = cache_->get(v, r, k, build_);
        if (hit.automaton.size() > build_.max_states)
            throw budget_exceeded("cached automaton has " + std::to_string(hit.automaton.size()) + " states");
        if (meta) {
            *meta = {{"enabled", true}, {"hit", hit.hit}, {"rebuilt", hit.rebuilt}, {"file", hit.file.string()},
                     {"seconds", hit.seconds}};
            if (hit.rebuilt) (*meta)["rejected"] = hit.rejected_reason;
        }
        return std::move(hit.automaton);
    }

private:
    Globals g_;
    BuildOptions build_;
    std::optional<AutomatonCache> cache_;
};

Pattern pattern_for(const std::string& text, int k) {
    auto v = Pattern::parse(text);
    if (k < 1) throw invalid_argument("k must be positive");
    v.require_alphabet(k);
    return v;
}

void require_r(int r) {
    if (r < 0) throw invalid_argument("r must be non-negative");
}

// ---- commands ------------------------------------------------------------

struct AutomatonArgs {
    std::string pattern;
    int r = 0, k = 0;
    std::string method = "refinement";
    bool dot = false;
};

Output cmd_automaton(const Context& ctx, const AutomatonArgs& a) {
    const auto v = pattern_for(a.pattern, a.k);
    require_r(a.r);
    Json meta;
    Automaton au;
    if (a.method == "signature") {
        auto opt = ctx.build();
        opt.method = BuildMethod::signature;
        au = build_automaton(v, a.r, a.k, opt);
    } else if (a.method == "refinement") {
        au = ctx.automaton(v, a.r, a.k, &meta);
    } else {
        throw invalid_argument("method must be refinement or signature");
    }
    const auto t = transition_matrix(au);
    Output o;
    o.anchors = {"automaton-construction"};
    Json states = Json::array();
    for (std::size_t i = 0; i < au.size(); ++i) {
        states.push_back({{"id", i}, {"witness", state_label(au, i)}, {"loops", au.state(i).loops}});
        o.table.rows.push_back({std::to_string(i), state_label(au, i), std::to_string(au.state(i).loops)});
    }
    o.table.header = {"state", "witness", "loops"};
    o.result = {{"pattern", v.str()}, {"r", a.r}, {"k", a.k}, {"states", au.size()},
                {"transitions", au.transition_count()}, {"absorbed", au.absorbed_count()},
                {"state_list", std::move(states)}, {"matrix", t.entries}};
    if (a.dot) o.result["dot"] = export_dot(au);
    if (ctx.g().timing && !meta.is_null()) o.result["cache"] = meta;
    o.summary.push_back("Au(" + v.str() + "," + std::to_string(a.r) + "," + std::to_string(a.k) + "): " +
                        std::to_string(au.size()) + " states");
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::string row;
        for (int x : t.entries[i]) row += (row.empty() ? "" : " ") + std::to_string(x);
        o.summary.push_back("  " + row);
    }
    if (a.dot) o.summary.push_back(export_dot(au));
    return o;
}

struct CountArgs {
    std::string pattern, n;
    int r = 0, k = 0;
};

Output cmd_count(const Context& ctx, const CountArgs& a) {
    const auto v = pattern_for(a.pattern, a.k);
    require_r(a.r);
    const auto ns = parse_ns(a.n);
    const std::size_t n_hi = *std::max_element(ns.begin(), ns.end());
    const auto g = count_at_most_series(ctx.automaton(v, a.r, a.k), n_hi);
    std::vector<BigInt> below(n_hi + 1, 0);
    if (a.r > 0) below = count_at_most_series(ctx.automaton(v, a.r - 1, a.k), n_hi);
    Output o;
    o.anchors = {"transfer-matrix-count"};
    o.table.header = {"n", "r", "f", "g"};
    Json rows = Json::array();
    for (auto n : ns) {
        const BigInt f = g[n] - below[n];
        rows.push_back({{"n", n}, {"f", big(f)}, {"g", big(g[n])}});
        o.table.rows.push_back({std::to_string(n), std::to_string(a.r), big(f), big(g[n])});
        o.summary.push_back("n=" + std::to_string(n) + " f=" + big(f) + " g=" + big(g[n]));
    }
    o.result = {{"pattern", v.str()}, {"r", a.r}, {"k", a.k}, {"rows", std::move(rows)}};
    return o;
}

struct GenfuncArgs {
    std::string pattern, kind = "G";
    int r = 0, k = 0;
    std::size_t terms = 10;
};

Output cmd_genfunc(const Context& ctx, const GenfuncArgs& a) {
    const auto v = pattern_for(a.pattern, a.k);
    require_r(a.r);
    if (a.kind != "G" && a.kind != "F") throw invalid_argument("kind must be G or F");
    const auto au = ctx.automaton(v, a.r, a.k);
    RationalFunction rf = generating_function(au);
    if (a.kind == "F" && a.r > 0) rf = rf - generating_function(ctx.automaton(v, a.r - 1, a.k));
    const auto series = series_coefficients(rf, a.terms);
    Output o;
    o.anchors = {"rational-generating-function"};
    Json coeffs = Json::array();
    o.table.header = {"n", "coefficient"};
    for (std::size_t n = 0; n < series.size(); ++n) {
        coeffs.push_back(big(series[n]));
        o.table.rows.push_back({std::to_string(n), big(series[n])});
    }
    Json factors = Json::array();
    for (auto [lambda, m] : rf.factors()) factors.push_back({{"lambda", lambda}, {"multiplicity", m}});
    o.result = {{"pattern", v.str()}, {"r", a.r}, {"k", a.k}, {"kind", a.kind},
                {"numerator", rf.numerator().str()}, {"denominator", rf.denominator().str()},
                {"factored", rf.str()}, {"factors", std::move(factors)}, {"residual", rf.residual().str()},
                {"series", std::move(coeffs)}};
    o.summary.push_back(a.kind + "_{" + std::to_string(a.r) + "," + std::to_string(a.k) + "}^{" + v.str() +
                        "}(x) = " + rf.str());
    if (v.distinct() >= 2) {
        const auto pole = pole_analysis(rf, v.distinct());
        const int M = compute_Mr(au);
        o.result["pole"] = {{"base", pole.base}, {"order", pole.order}, {"matches_d_minus_1", pole.matches_d_minus_1},
                            {"M_r", M}};
        o.summary.push_back("dominant pole 1/" + std::to_string(pole.base) + " of order " +
                            std::to_string(pole.order) + ", M_r = " + std::to_string(M));
    }
    return o;
}

struct LimitsArgs {
    std::string pattern;
    int r = 0, k = 0;
    std::size_t n_max = 512;
};

Json trend_json(const RatioTrend& t) {
    Json samples = Json::array();
    for (auto [n, v] : t.samples) samples.push_back({{"n", n}, {"value", v}});
    return {{"exponent", t.exponent}, {"last", t.last}, {"half", t.half}, {"richardson", t.richardson},
            {"error_bar", t.error_bar}, {"samples", std::move(samples)}};
}

Output cmd_limits(const Context& ctx, const LimitsArgs& a) {
    const auto v = pattern_for(a.pattern, a.k);
    require_r(a.r);
    const auto rep = asymptotic_constants(v, a.r, a.k, a.n_max, ctx.build());
    Output o;
    o.anchors = {"growth-rate-d-minus-1", "pole-order-equals-Mr"};
    Json roots = Json::array();
    o.table.header = {"n", "f_root", "g_root"};
    for (std::size_t i = 0; i < rep.f_root.size(); ++i) {
        roots.push_back({{"n", rep.f_root[i].first}, {"f", rep.f_root[i].second}, {"g", rep.g_root[i].second}});
        o.table.rows.push_back(
            {std::to_string(rep.f_root[i].first), dbl(rep.f_root[i].second), dbl(rep.g_root[i].second)});
    }
    o.result = {{"pattern", v.str()}, {"r", a.r}, {"k", a.k}, {"n_max", a.n_max}, {"base", rep.base},
                {"M_r", rep.M_r}, {"g_pole_order", rep.g_pole_order}, {"f_pole_order", rep.f_pole_order},
                {"C", trend_json(rep.C)}, {"K", trend_json(rep.K)}, {"C_literal", trend_json(rep.C_literal)},
                {"roots", std::move(roots)}, {"possible_K_zero", rep.possible_K_zero}};
    o.summary.push_back("base d-1 = " + std::to_string(rep.base) + ", M_r = " + std::to_string(rep.M_r) +
                        ", pole orders G " + std::to_string(rep.g_pole_order) + " F " +
                        std::to_string(rep.f_pole_order));
    o.summary.push_back("C ~ " + dbl(rep.C.richardson) + " +- " + dbl(rep.C.error_bar) + ", K ~ " +
                        dbl(rep.K.richardson) + " +- " + dbl(rep.K.error_bar));
    return o;
}

struct SimulateArgs {
    std::string pattern;
    int k = 0;
    std::size_t n = 0, samples = 100000;
};

Output cmd_simulate(const Context& ctx, const SimulateArgs& a) {
    const auto v = pattern_for(a.pattern, a.k);
    ctx.require_samples(a.samples, "samples");
    const auto rep = simulate(v, a.k, a.n, a.samples, ctx.g().seed, ctx.g().workers);
    Output o;
    o.anchors = {"exact-mean", "berry-esseen-rate", "chernoff-tail-bound"};
    Json chernoff = Json::array();
    for (const auto& c : rep.chernoff)
        chernoff.push_back({{"multiple", c.multiple}, {"t", c.t}, {"upper_bound", c.upper_bound},
                            {"upper_freq", c.upper_freq}, {"upper_slack", c.upper_slack}, {"upper_ok", c.upper_ok},
                            {"lower_bound", c.lower_bound}, {"lower_freq", c.lower_freq},
                            {"lower_slack", c.lower_slack}, {"lower_ok", c.lower_ok}});
    Json hist = Json::array();
    o.table.header = {"occurrences", "count"};
    for (auto [x, c] : rep.histogram) {
        hist.push_back({x, c});
        o.table.rows.push_back({std::to_string(x), std::to_string(c)});
    }
    o.result = {{"pattern", rep.pattern}, {"k", rep.k}, {"n", rep.n}, {"samples", rep.samples},
                {"mu", rep.mu}, {"mean", rep.mean}, {"variance", rep.variance}, {"stddev", rep.stddev},
                {"mean_z", rep.mean_z}, {"variance_ratio", rep.variance_ratio}, {"j_hat", rep.j_hat},
                {"kolmogorov", rep.kolmogorov}, {"berry_esseen_term", rep.be_term},
                {"chernoff", std::move(chernoff)}, {"chernoff_violations", rep.chernoff_violations},
                {"histogram", std::move(hist)}};
    if (ctx.g().timing) o.result["seconds"] = rep.seconds;
    o.summary.push_back("mu=" + dbl(rep.mu) + " mean=" + dbl(rep.mean) + " sd=" + dbl(rep.stddev) +
                        " z=" + dbl(rep.mean_z));
    o.summary.push_back("kolmogorov=" + dbl(rep.kolmogorov) + " berry_esseen_term=" + dbl(rep.be_term) +
                        " chernoff_violations=" + std::to_string(rep.chernoff_violations));
    return o;
}

struct EntropyArgs {
    std::string pattern;
    int k = 0;
    std::size_t n = 10;
};

Output cmd_entropy(const Context& ctx, const EntropyArgs& a) {
    const auto v = pattern_for(a.pattern, a.k);
    const auto rep = entropy_series(v, a.k, a.n, ctx.profile());
    Output o;
    o.anchors = {"entropy-rate", "entropy-subadditivity"};
    Json pts = Json::array();
    o.table.header = {"n", "H", "rate", "deviation"};
    for (const auto& p : rep.points) {
        pts.push_back({{"n", p.n}, {"H", p.H}, {"rate", p.rate}, {"deviation", p.deviation}});
        o.table.rows.push_back({std::to_string(p.n), dbl(p.H), dbl(p.rate), dbl(p.deviation)});
    }
    Json fails = Json::array();
    for (const auto& f : rep.subadditivity_failures)
        fails.push_back({{"n", f.n}, {"m", f.m}, {"lhs", f.lhs}, {"rhs", f.rhs}});
    o.result = {{"pattern", rep.pattern}, {"k", rep.k}, {"limit", rep.limit}, {"points", std::move(pts)},
                {"pairs_checked", rep.pairs_checked}, {"subadditivity_failures", std::move(fails)},
                {"deviation_decreasing", rep.deviation_decreasing}};
    o.summary.push_back("limit log(k/(d-1)) = " + dbl(rep.limit) + ", subadditivity failures " +
                        std::to_string(rep.subadditivity_failures.size()) + " of " +
                        std::to_string(rep.pairs_checked));
    return o;
}

struct PoissonArgs {
    std::string schedule = "idpattern:beta=0.8", n = "20,40,80";
    std::size_t samples = 50000;
};

Output cmd_poisson(const Context& ctx, const PoissonArgs& a) {
    ctx.require_samples(a.samples, "samples");
    PoissonOptions po;
    po.workers = ctx.g().workers;
    po.automaton_states = ctx.g().budget_states;
    const auto rep = poisson_regime(PoissonSchedule::parse(a.schedule), parse_ns(a.n), a.samples, ctx.g().seed, po);
    Output o;
    o.anchors = {"poisson-approximation"};
    Json pts = Json::array();
    o.table.header = {"n", "k", "ell", "d", "mu", "dtv", "dtv_bias", "budget", "zero_term"};
    for (const auto& p : rep.points) {
        Json pj = {{"n", p.n}, {"k", p.k}, {"ell", p.ell}, {"d", p.d}, {"pattern", p.pattern}, {"mu", p.mu},
                   {"empirical", p.empirical}, {"poisson", p.poisson}, {"truncation", p.truncation},
                   {"poisson_tail", p.poisson_tail}, {"dtv", p.dtv}, {"dtv_bias", p.dtv_bias}, {"b1", p.b1},
                   {"b2", p.b2}, {"budget", p.budget}, {"d_over_ell", p.d_over_ell},
                   {"beta_threshold", p.beta_threshold}, {"ell_condition", p.ell_condition},
                   {"d_condition", p.d_condition}};
        pj["zero_term"] = p.zero_term ? Json(*p.zero_term) : Json(nullptr);
        pts.push_back(std::move(pj));
        o.table.rows.push_back({std::to_string(p.n), std::to_string(p.k), std::to_string(p.ell), std::to_string(p.d),
                                dbl(p.mu), dbl(p.dtv), dbl(p.dtv_bias), dbl(p.budget),
                                p.zero_term ? dbl(*p.zero_term) : ""});
    }
    o.result = {{"schedule", rep.schedule}, {"samples", rep.samples}, {"points", std::move(pts)},
                {"dtv_decreasing", rep.dtv_decreasing}};
    o.summary.push_back("schedule " + rep.schedule + ": d_TV decreasing = " + (rep.dtv_decreasing ? "yes" : "no"));
    return o;
}

struct PartitionArgs {
    std::string pattern, x, mode = "exact";
    int k = 0;
    std::size_t n = 0;
    std::size_t m = 0; // > 0 adds a submultiplicativity check at (n, m)
};

Output cmd_partition(const Context& ctx, const PartitionArgs& a) {
    const auto v = pattern_for(a.pattern, a.k);
    const Rational x = parse_rational(a.x);
    auto mode = PartitionMode::parse(a.mode);
    mode.build = ctx.build();
    if (mode.kind == PartitionMode::Kind::exact) ctx.require_word_space(a.k, a.n + a.m);
    const auto val = partition_function(v, a.k, a.n, x, mode);
    Output o;
    o.anchors = {"partition-function"};
    o.result = {{"pattern", v.str()}, {"k", a.k}, {"n", a.n}, {"x", to_string(x)}, {"mode", a.mode},
                {"value", to_string(val.value)}, {"value_decimal", to_double(val.value)}, {"exact", val.exact},
                {"error_bound", to_string(val.error_bound)}, {"R", val.R}};
    o.table.header = {"n", "x", "value", "value_decimal", "exact"};
    o.table.rows.push_back({std::to_string(a.n), to_string(x), to_string(val.value), dbl(to_double(val.value)),
                            val.exact ? "true" : "false"});
    o.summary.push_back("c(" + std::to_string(a.n) + ", " + to_string(x) + ") = " + to_string(val.value) + " ~ " +
                        dbl(to_double(val.value)));
    if (a.m > 0) {
        const auto s = submultiplicativity_check(v, a.k, a.n, a.m, x, ctx.build().max_states);
        o.anchors.push_back("word-submultiplicativity");
        o.result["submultiplicativity"] = {{"n", s.n}, {"m", s.m}, {"c_n", to_string(s.c_n)},
                                           {"c_m", to_string(s.c_m)}, {"c_nm", to_string(s.c_nm)},
                                           {"holds", s.holds}, {"bracket", s.bracket}};
        o.summary.push_back(std::string("c(n+m) <= c(n) c(m): ") + (s.holds ? "holds" : "fails"));
    }
    return o;
}

struct BoltzmannArgs {
    std::string pattern, x;
    int k = 0;
    std::size_t n = 0, steps = 1'000'000;
    std::optional<std::size_t> burn_in, thinning;
    bool compare = false;
    std::size_t show = 0;
};

Output cmd_boltzmann(const Context& ctx, const BoltzmannArgs& a) {
    const auto v = pattern_for(a.pattern, a.k);
    const Rational x = parse_rational(a.x);
    require_unit_interval(x);
    ctx.require_samples(a.steps, "steps");
    ChainOptions co;
    co.steps = a.steps;
    co.burn_in = a.burn_in;
    co.thinning = a.thinning;
    co.seed = ctx.g().seed;
    const auto run = mcmc_sample(v, a.k, a.n, to_double(x), co, a.show > 0);
    Output o;
    o.anchors = {"boltzmann-sampler"};
    std::map<std::uint64_t, std::uint64_t> hist;
    double mean = 0;
    for (auto occ : run.occurrences) {
        ++hist[occ];
        mean += static_cast<double>(occ);
    }
    mean /= static_cast<double>(run.occurrences.size());
    Json hj = Json::array();
    o.table.header = {"occurrences", "count"};
    for (auto [occ, c] : hist) {
        hj.push_back({occ, c});
        o.table.rows.push_back({std::to_string(occ), std::to_string(c)});
    }
    o.result = {{"pattern", v.str()}, {"k", a.k}, {"n", a.n}, {"x", to_string(x)}, {"steps", run.steps},
                {"burn_in", run.burn_in}, {"thinning", run.thinning}, {"recorded", run.occurrences.size()},
                {"acceptance_rate", run.acceptance_rate}, {"mean_occurrences", mean},
                {"histogram", std::move(hj)}};
    if (a.show > 0) {
        Json words = Json::array();
        for (std::size_t i = 0; i < std::min(a.show, run.words.size()); ++i) words.push_back(format_letters(run.words[i], a.k));
        o.result["words"] = std::move(words);
    }
    o.summary.push_back("recorded " + std::to_string(run.occurrences.size()) + " states, acceptance " +
                        dbl(run.acceptance_rate) + ", mean occurrences " + dbl(mean));
    if (a.compare) {
        const auto exact = exact_measure(v, a.k, a.n, x, std::min(ctx.g().budget_words, 1e6));
        const double tv = total_variation(run, exact);
        o.result["exact_normalizer"] = to_string(exact.normalizer);
        o.result["total_variation"] = tv;
        o.summary.push_back("total variation to the exact law: " + dbl(tv));
    }
    return o;
}

struct WeakArgs {
    std::string pattern, rho = "inf", t = "1", n = "6,8,10,12";
    int k = 0;
    std::size_t samples = 200000;
};

Output cmd_weak(const Context& ctx, const WeakArgs& a) {
    const auto v = pattern_for(a.pattern, a.k);
    ctx.require_samples(a.samples, "samples");
    WeakLimitOptions wo;
    wo.samples = a.samples;
    wo.seed = ctx.g().seed;
    wo.max_classes = ctx.g().budget_states;
    wo.enumerate_below = std::min(ctx.g().budget_words, 2e7);
    const auto rep = weak_limit_report(v, a.k, RhoSchedule::parse(a.rho), parse_doubles(a.t), parse_ns(a.n), wo);
    Output o;
    o.anchors = {"weak-avoidance-limit"};
    Json pts = Json::array();
    o.table.header = {"n", "x", "exact", "t", "mgf", "mgf_gap", "mean_scaled"};
    for (const auto& p : rep.points) {
        Json pj = {{"n", p.n}, {"x", p.x}, {"exact", p.exact}, {"mgf", p.mgf}, {"mgf_gap", p.mgf_gap},
                   {"mean_scaled", p.mean_scaled}, {"mean_gap", p.mean_gap}};
        pj["entropy"] = p.entropy ? Json(*p.entropy) : Json(nullptr);
        pj["entropy_rate"] = p.entropy_rate ? Json(*p.entropy_rate) : Json(nullptr);
        pts.push_back(std::move(pj));
        for (std::size_t i = 0; i < rep.t.size(); ++i)
            o.table.rows.push_back({std::to_string(p.n), dbl(p.x), p.exact ? "true" : "false", dbl(rep.t[i]),
                                    dbl(p.mgf[i]), dbl(p.mgf_gap[i]), dbl(p.mean_scaled)});
    }
    std::vector<bool> shrinking(rep.mgf_gap_shrinking.begin(), rep.mgf_gap_shrinking.end());
    o.result = {{"pattern", rep.pattern}, {"k", rep.k}, {"rho", rep.rho}, {"gamma", rep.gamma}, {"t", rep.t},
                {"mgf_target", rep.mgf_target}, {"mean_target", rep.mean_target}, {"points", std::move(pts)},
                {"mgf_gap_shrinking", shrinking}};
    o.result["entropy_target"] = rep.entropy_target ? Json(*rep.entropy_target) : Json(nullptr);
    for (std::size_t i = 0; i < rep.t.size(); ++i)
        o.summary.push_back("t=" + dbl(rep.t[i]) + ": target " + dbl(rep.mgf_target[i]) + ", gap shrinking " +
                            (rep.mgf_gap_shrinking[i] ? "yes" : "no"));
    return o;
}

struct PermArgs {
    std::string xi, n, x = "1/2";
    int r = 0;
    std::size_t m = 0;
};

PermOptions perm_options(const Context& ctx) { return {ctx.g().budget_words, ctx.g().workers}; }

Output cmd_perm_profile(const Context& ctx, const PermArgs& a) {
    const auto xi = Permutation::parse(a.xi);
    const auto ns = parse_ns(a.n);
    if (ns.size() != 1) throw invalid_argument("perm-profile takes a single n");
    const auto p = perm_profile(xi, ns[0], perm_options(ctx));
    Output o;
    o.anchors = {"permutation-profile"};
    Json counts = Json::object();
    o.table.header = {"r", "count"};
    std::string text;
    for (std::size_t r = 0; r < p.counts.size(); ++r) {
        if (p.counts[r] == 0) continue;
        counts[std::to_string(r)] = big(p.counts[r]);
        o.table.rows.push_back({std::to_string(r), big(p.counts[r])});
        text += (text.empty() ? "" : ",") + std::to_string(r) + ":" + big(p.counts[r]);
    }
    o.result = {{"xi", xi.str()}, {"n", p.n}, {"total", big(p.total())}, {"counts", std::move(counts)}};
    o.summary.push_back("{" + text + "}");
    return o;
}

Output cmd_perm_partition(const Context& ctx, const PermArgs& a) {
    const auto xi = Permutation::parse(a.xi);
    const auto ns = parse_ns(a.n);
    if (ns.size() != 1) throw invalid_argument("perm-partition takes a single n");
    const Rational x = parse_rational(a.x);
    const auto val = perm_partition(xi, ns[0], x, perm_options(ctx));
    Output o;
    o.anchors = {"permutation-partition-function"};
    o.result = {{"xi", xi.str()}, {"n", ns[0]}, {"x", to_string(x)}, {"value", to_string(val)},
                {"value_decimal", to_double(val)}};
    if (xi == Permutation::parse("21")) {
        o.anchors.push_back("mahonian-partition");
        o.result["mahonian_product"] = to_string(mahonian_partition(ns[0], x));
        o.result["matches_mahonian"] = val == mahonian_partition(ns[0], x);
    }
    o.table.header = {"n", "x", "value", "value_decimal"};
    o.table.rows.push_back({std::to_string(ns[0]), to_string(x), to_string(val), dbl(to_double(val))});
    o.summary.push_back("c(" + std::to_string(ns[0]) + ", " + to_string(x) + ") = " + to_string(val) + " ~ " +
                        dbl(to_double(val)));
    if (a.m > 0) {
        const auto s = supermultiplicativity_check(xi, ns[0], a.m, x, perm_options(ctx));
        o.anchors.push_back("permutation-supermultiplicativity");
        o.result["supermultiplicativity"] = {{"n", s.n}, {"m", s.m}, {"c_n", to_string(s.c_n)},
                                             {"c_m", to_string(s.c_m)}, {"c_nm", to_string(s.c_nm)},
                                             {"holds", s.holds}};
        o.summary.push_back(std::string("c(n+m) >= c(n) c(m): ") + (s.holds ? "holds" : "fails"));
    }
    return o;
}

Output cmd_perm_sw(const Context& ctx, const PermArgs& a) {
    const auto xi = Permutation::parse(a.xi);
    const auto ns = parse_ns(a.n);
    const auto t = perm_sw_trend(xi, a.r, *std::min_element(ns.begin(), ns.end()),
                                 *std::max_element(ns.begin(), ns.end()), perm_options(ctx));
    Output o;
    o.anchors = {"permutation-growth-trend"};
    Json pts = Json::array();
    o.table.header = {"n", "f_r", "f_0", "root_r", "root_0", "gap"};
    for (const auto& p : t.points) {
        pts.push_back({{"n", p.n}, {"f_r", big(p.f_r)}, {"f_0", big(p.f_0)}, {"root_r", p.root_r},
                       {"root_0", p.root_0}, {"gap", p.gap}});
        o.table.rows.push_back({std::to_string(p.n), big(p.f_r), big(p.f_0), dbl(p.root_r), dbl(p.root_0), dbl(p.gap)});
    }
    o.result = {{"xi", xi.str()}, {"r", a.r}, {"points", std::move(pts)}, {"gap_shrinking", t.gap_shrinking}};
    o.summary.push_back(std::string("gap between f_r and f_0 roots shrinking: ") + (t.gap_shrinking ? "yes" : "no"));
    return o;
}

struct VerifyArgs {
    std::string suite = "acceptance", criteria;
};

Output cmd_verify(const Context& ctx, const VerifyArgs& a) {
    VerifyOptions vo;
    vo.seed = ctx.g().seed;
    vo.workers = ctx.g().workers;
    const auto suite = run_suite(a.suite, vo, parse_ids(a.criteria));
    Output o;
    Json crit = Json::array();
    o.table.header = {"criterion", "check", "anchor", "status", "measured", "target", "tolerance"};
    for (const auto& c : suite.criteria) {
        Json checks = Json::array();
        for (const auto& ch : c.checks) {
            checks.push_back({{"name", ch.name}, {"anchor", ch.anchor}, {"status", status_name(ch.status)},
                              {"measured", ch.measured}, {"target", ch.target}, {"tolerance", ch.tolerance},
                              {"note", ch.note}});
            o.table.rows.push_back({std::to_string(c.id), ch.name, ch.anchor, status_name(ch.status), ch.measured,
                                    ch.target, ch.tolerance});
            if (std::find(o.anchors.begin(), o.anchors.end(), ch.anchor) == o.anchors.end())
                o.anchors.push_back(ch.anchor);
        }
        Json cj = {{"id", c.id}, {"title", c.title}, {"passed", c.passed()}, {"checks", std::move(checks)}};
        if (!c.error.empty()) cj["error"] = c.error;
        if (ctx.g().timing) cj["seconds"] = c.seconds;
        crit.push_back(std::move(cj));
        o.summary.push_back(std::string(c.passed() ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + ": " +
                            c.title + (c.error.empty() ? "" : " (error: " + c.error + ")"));
        for (const auto& ch : c.checks)
            if (ch.status != CheckStatus::pass)
                o.summary.push_back("    [" + std::string(status_name(ch.status)) + "] " + ch.name + ": " +
                                    ch.measured + " vs " + ch.target);
    }
    o.result = {{"suite", suite.suite}, {"passed", suite.passed()}, {"criteria", std::move(crit)}};
    o.exit_code = suite.passed() ? kOk : kCheckFailed;
    return o;
}

// ---- rendering -----------------------------------------------------------

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string render(const Output& o, const Json& config, const std::string& format) {
    std::ostringstream out;
    if (format == "json") {
        Json doc = {{"tool", "occulex"}, {"version", kVersion}, {"config", config}, {"anchors", o.anchors},
                    {"result", o.result}};
        out << doc.dump(2) << '\n';
    } else if (format == "csv") {
        for (std::size_t i = 0; i < o.table.header.size(); ++i) out << (i ? "," : "") << csv_field(o.table.header[i]);
        out << '\n';
        for (const auto& row : o.table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
            out << '\n';
        }
    } else {
        for (const auto& line : o.summary) out << line << '\n';
    }
    return out.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"occulex: pattern occurrence statistics in words and permutations"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Seed for every stochastic step");
    app.add_option("--budget-states", g.budget_states, "Maximum automaton states or merged classes");
    app.add_option("--budget-words", g.budget_words, "Maximum words or permutations enumerated");
    app.add_option("--budget-samples", g.budget_samples, "Maximum samples or chain steps");
    app.add_option("--cache-dir", g.cache_dir, "Automaton cache directory (default: $OCCULEX_CACHE, else no cache)");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--out", g.out, "Write the report to this file instead of stdout");
    app.add_option("--workers", g.workers, "Worker threads; results do not depend on it")->check(CLI::Range(1U, 256U));
    app.add_flag("--timing", g.timing, "Include wall-clock and cache metadata (not reproducible)");

    Json params = Json::object();
    std::function<Output(const Context&)> action;

    AutomatonArgs au;
    auto* s_au = app.add_subcommand("automaton", "Build Au(v, r, k)");
    s_au->add_option("--pattern", au.pattern)->required();
    s_au->add_option("--r", au.r)->required();
    s_au->add_option("--k", au.k)->required();
    s_au->add_option("--method", au.method)->check(CLI::IsMember({"refinement", "signature"}));
    s_au->add_flag("--dot", au.dot, "Include a Graphviz rendering");
    s_au->callback([&] {
        params = {{"pattern", au.pattern}, {"r", au.r}, {"k", au.k}, {"method", au.method}, {"dot", au.dot}};
        action = [&](const Context& c) { return cmd_automaton(c, au); };
    });

    CountArgs ca;
    auto* s_count = app.add_subcommand("count", "Exact f_r and g_r");
    s_count->add_option("--pattern", ca.pattern)->required();
    s_count->add_option("--k", ca.k)->required();
    s_count->add_option("--r", ca.r)->required();
    s_count->add_option("--n", ca.n, "n, a..b or a,b,c")->required();
    s_count->callback([&] {
        params = {{"pattern", ca.pattern}, {"k", ca.k}, {"r", ca.r}, {"n", ca.n}};
        action = [&](const Context& c) { return cmd_count(c, ca); };
    });

    GenfuncArgs ga;
    auto* s_gf = app.add_subcommand("genfunc", "Generating function of g_r (G) or f_r (F)");
    s_gf->add_option("--pattern", ga.pattern)->required();
    s_gf->add_option("--r", ga.r)->required();
    s_gf->add_option("--k", ga.k)->required();
    s_gf->add_option("--kind", ga.kind)->check(CLI::IsMember({"G", "F"}));
    s_gf->add_option("--terms", ga.terms, "Series coefficients to list");
    s_gf->callback([&] {
        params = {{"pattern", ga.pattern}, {"r", ga.r}, {"k", ga.k}, {"kind", ga.kind}, {"terms", ga.terms}};
        action = [&](const Context& c) { return cmd_genfunc(c, ga); };
    });

    LimitsArgs la;
    auto* s_lim = app.add_subcommand("limits", "Growth rate and constant trends");
    s_lim->add_option("--pattern", la.pattern)->required();
    s_lim->add_option("--r", la.r)->required();
    s_lim->add_option("--k", la.k)->required();
    s_lim->add_option("--n-max", la.n_max);
    s_lim->callback([&] {
        params = {{"pattern", la.pattern}, {"r", la.r}, {"k", la.k}, {"n_max", la.n_max}};
        action = [&](const Context& c) { return cmd_limits(c, la); };
    });

    SimulateArgs sa;
    auto* s_sim = app.add_subcommand("simulate", "Monte Carlo law of the occurrence count");
    s_sim->add_option("--pattern", sa.pattern)->required();
    s_sim->add_option("--k", sa.k)->required();
    s_sim->add_option("--n", sa.n)->required();
    s_sim->add_option("--samples", sa.samples);
    s_sim->callback([&] {
        params = {{"pattern", sa.pattern}, {"k", sa.k}, {"n", sa.n}, {"samples", sa.samples}};
        action = [&](const Context& c) { return cmd_simulate(c, sa); };
    });

    EntropyArgs ea;
    auto* s_ent = app.add_subcommand("entropy", "Exact entropy of the occurrence count for n = 0..N");
    s_ent->add_option("--pattern", ea.pattern)->required();
    s_ent->add_option("--k", ea.k)->required();
    s_ent->add_option("--n", ea.n, "Largest n");
    s_ent->callback([&] {
        params = {{"pattern", ea.pattern}, {"k", ea.k}, {"n", ea.n}};
        action = [&](const Context& c) { return cmd_entropy(c, ea); };
    });

    PoissonArgs pa;
    auto* s_poi = app.add_subcommand("poisson", "Poisson approximation along a parameter schedule");
    s_poi->add_option("--schedule", pa.schedule, "idpattern:beta=B[,A=a] or fixed:pattern=P,k=K");
    s_poi->add_option("--n", pa.n);
    s_poi->add_option("--samples", pa.samples);
    s_poi->callback([&] {
        params = {{"schedule", pa.schedule}, {"n", pa.n}, {"samples", pa.samples}};
        action = [&](const Context& c) { return cmd_poisson(c, pa); };
    });

    PartitionArgs pta;
    auto* s_part = app.add_subcommand("partition", "Weak-avoidance partition function c(n, x)");
    s_part->add_option("--pattern", pta.pattern)->required();
    s_part->add_option("--k", pta.k)->required();
    s_part->add_option("--n", pta.n)->required();
    s_part->add_option("--x", pta.x)->required();
    s_part->add_option("--mode", pta.mode, "exact, trunc or trunc:R");
    s_part->add_option("--m", pta.m, "Also check c(n+m) <= c(n) c(m)");
    s_part->callback([&] {
        params = {{"pattern", pta.pattern}, {"k", pta.k}, {"n", pta.n}, {"x", pta.x}, {"mode", pta.mode}, {"m", pta.m}};
        action = [&](const Context& c) { return cmd_partition(c, pta); };
    });

    BoltzmannArgs ba;
    auto* s_bz = app.add_subcommand("boltzmann-sample", "Metropolis sampling of the Boltzmann law");
    s_bz->add_option("--pattern", ba.pattern)->required();
    s_bz->add_option("--k", ba.k)->required();
    s_bz->add_option("--n", ba.n)->required();
    s_bz->add_option("--x", ba.x)->required();
    s_bz->add_option("--steps", ba.steps);
    s_bz->add_option("--burn-in", ba.burn_in);
    s_bz->add_option("--thinning", ba.thinning);
    s_bz->add_option("--show", ba.show, "List this many recorded words");
    s_bz->add_flag("--compare", ba.compare, "Total variation against the exact law");
    s_bz->callback([&] {
        params = {{"pattern", ba.pattern}, {"k", ba.k}, {"n", ba.n}, {"x", ba.x}, {"steps", ba.steps},
                  {"compare", ba.compare}, {"show", ba.show}};
        params["burn_in"] = ba.burn_in ? Json(*ba.burn_in) : Json(nullptr);
        params["thinning"] = ba.thinning ? Json(*ba.thinning) : Json(nullptr);
        action = [&](const Context& c) { return cmd_boltzmann(c, ba); };
    });

    WeakArgs wa;
    auto* s_wl = app.add_subcommand("weak-limits", "Weak-avoidance limits along x_n = 1/rho_n");
    s_wl->add_option("--pattern", wa.pattern)->required();
    s_wl->add_option("--k", wa.k)->required();
    s_wl->add_option("--rho", wa.rho, "n^a, c*n^a or inf");
    s_wl->add_option("--t", wa.t, "Comma-separated t values");
    s_wl->add_option("--n", wa.n);
    s_wl->add_option("--samples", wa.samples, "Chain samples when enumeration is out of budget");
    s_wl->callback([&] {
        params = {{"pattern", wa.pattern}, {"k", wa.k}, {"rho", wa.rho}, {"t", wa.t}, {"n", wa.n},
                  {"samples", wa.samples}};
        action = [&](const Context& c) { return cmd_weak(c, wa); };
    });

    PermArgs pp, ppart, psw;
    auto* s_pp = app.add_subcommand("perm-profile", "Occurrence histogram over S_n");
    s_pp->add_option("--xi", pp.xi)->required();
    s_pp->add_option("--n", pp.n)->required();
    s_pp->callback([&] {
        params = {{"xi", pp.xi}, {"n", pp.n}};
        action = [&](const Context& c) { return cmd_perm_profile(c, pp); };
    });
    auto* s_ppart = app.add_subcommand("perm-partition", "Permutation partition function");
    s_ppart->add_option("--xi", ppart.xi)->required();
    s_ppart->add_option("--n", ppart.n)->required();
    s_ppart->add_option("--x", ppart.x)->required();
    s_ppart->add_option("--m", ppart.m, "Also check c(n+m) >= c(n) c(m)");
    s_ppart->callback([&] {
        params = {{"xi", ppart.xi}, {"n", ppart.n}, {"x", ppart.x}, {"m", ppart.m}};
        action = [&](const Context& c) { return cmd_perm_partition(c, ppart); };
    });
    auto* s_psw = app.add_subcommand("perm-sw", "n-th roots of f_r and f_0 over a range of n");
    s_psw->add_option("--xi", psw.xi)->required();
    s_psw->add_option("--r", psw.r)->required();
    s_psw->add_option("--n", psw.n, "a..b")->required();
    s_psw->callback([&] {
        params = {{"xi", psw.xi}, {"r", psw.r}, {"n", psw.n}};
        action = [&](const Context& c) { return cmd_perm_sw(c, psw); };
    });

    VerifyArgs va;
    auto* s_ver = app.add_subcommand("verify", "Run a verification suite");
    s_ver->add_option("--suite", va.suite)->check(CLI::IsMember({"acceptance", "paper-golden"}));
    s_ver->add_option("--criteria", va.criteria, "Restrict to these criterion ids, e.g. 1,3 or 1..5");
    s_ver->callback([&] {
        params = {{"suite", va.suite}, {"criteria", va.criteria}};
        action = [&](const Context& c) { return cmd_verify(c, va); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    Json config = {{"command", command},
                   {"parameters", params},
                   {"seed", g.seed},
                   {"budgets", {{"states", g.budget_states}, {"words", g.budget_words}, {"samples", g.budget_samples}}},
                   {"format", g.format}};
    config["cache_dir"] = g.cache_dir.empty() ? Json(nullptr) : Json(g.cache_dir);

    auto fail = [&](int code, const char* kind, const std::string& msg) {
        std::cerr << "occulex " << command << ": " << kind << ": " << msg << '\n';
        return code;
    };
    try {
        const Context ctx(g);
        const Output o = action(ctx);
        const std::string text = render(o, config, g.format);
        if (g.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(g.out);
            if (!f) return fail(kInvalid, "invalid argument", "cannot open " + g.out);
            f << text;
        }
        return o.exit_code;
    } catch (const invalid_argument& e) {
        return fail(kInvalid, "invalid argument", e.what());
    } catch (const unsupported_pattern& e) {
        return fail(kInvalid, "unsupported pattern", e.what());
    } catch (const budget_exceeded& e) {
        return fail(kBudget, "budget exceeded", e.what());
    } catch (const invariant_violation& e) {
        return fail(kInternal, "invariant violation", e.what());
    } catch (const cache_invalid& e) {
        return fail(kInternal, "cache invalid", e.what());
    } catch (const std::exception& e) {
        return fail(kInternal, "internal error", e.what());
    }
}
