#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "occurrence.hpp"

namespace occulex {

enum class BuildMethod { refinement, signature };

struct BuildOptions {
    BuildMethod method = BuildMethod::refinement;
    std::size_t max_states = 2'000'000;
    // Total signature entries evaluated by the signature method.
    std::size_t max_signature_entries = 10'000'000;
};

struct AutomatonState {
    int id = 0;
    int loops = 0;
    std::vector<Letter> witness;
    bool initial = false;
};

// Au(v, r, k): states are the classes of words with at most r occurrences
// that behave identically (occurrence count capped at r + 1) under every
// right extension. Words with more than r occurrences form an implicit sink;
// transitions into it are marked absorbed. States are stored in a
// triangular order with the class of the empty word first.
class Automaton {
public:
    static constexpr int kAbsorbed = -1;

    Automaton() = default;
    Automaton(Pattern v, int r, int k, std::vector<AutomatonState> states, std::vector<int> delta)
        : v_(std::move(v)), r_(r), k_(k), states_(std::move(states)), delta_(std::move(delta)) {
        if (delta_.size() != states_.size() * static_cast<std::size_t>(k_))
            throw invariant_violation("transition table has wrong size");
        for (std::size_t i = 0; i < states_.size(); ++i) {
            states_[i].id = static_cast<int>(i);
            states_[i].initial = i == 0;
            int loops = 0;
            for (int a = 1; a <= k_; ++a) {
                const int t = next(i, a);
                if (t != kAbsorbed && (t < 0 || t >= static_cast<int>(states_.size())))
                    throw invariant_violation("transition target out of range");
                if (t != kAbsorbed && t < static_cast<int>(i))
                    throw invariant_violation("state order is not triangular");
                if (t == static_cast<int>(i)) ++loops;
            }
            states_[i].loops = loops;
        }
    }

    const Pattern& pattern() const noexcept { return v_; }
    int r() const noexcept { return r_; }
    int k() const noexcept { return k_; }
    std::size_t size() const noexcept { return states_.size(); }
    const std::vector<AutomatonState>& states() const noexcept { return states_; }
    const AutomatonState& state(std::size_t i) const { return states_[i]; }

    // Target state, or kAbsorbed when the letter pushes the word into the sink.
    int next(std::size_t s, Letter a) const { return delta_[s * k_ + (a - 1)]; }
    bool absorbed(std::size_t s, Letter a) const { return next(s, a) == kAbsorbed; }

    std::size_t transition_count() const {
        return static_cast<std::size_t>(std::count_if(delta_.begin(), delta_.end(), [](int t) { return t != kAbsorbed; }));
    }
    std::size_t absorbed_count() const { return delta_.size() - transition_count(); }

    // Runs a word from the initial state; returns kAbsorbed once it hits the sink.
    int run(std::span<const Letter> w) const {
        int s = 0;
        for (Letter a : w) {
            if (a < 1 || a > k_) throw invalid_argument("letter outside alphabet");
            s = next(static_cast<std::size_t>(s), a);
            if (s == kAbsorbed) return kAbsorbed;
        }
        return s;
    }

    friend bool operator==(const Automaton& a, const Automaton& b) {
        if (!(a.v_ == b.v_) || a.r_ != b.r_ || a.k_ != b.k_ || a.delta_ != b.delta_) return false;
        if (a.states_.size() != b.states_.size()) return false;
        for (std::size_t i = 0; i < a.states_.size(); ++i)
            if (a.states_[i].witness != b.states_[i].witness || a.states_[i].loops != b.states_[i].loops) return false;
        return true;
    }

private:
    Pattern v_;
    int r_ = 0;
    int k_ = 1;
    std::vector<AutomatonState> states_;
    std::vector<int> delta_;
};

namespace detail {

// A graph found by BFS from the initial class with letters in increasing
// order: node 0 is the initial class, `delta` uses -1 for absorbed letters.
struct DiscoveredGraph {
    std::vector<std::vector<Letter>> witness;
    std::vector<int> delta;
};

// Reorders BFS-discovered states topologically (self-loops allowed), always
// taking the ready state with the smallest discovery index.
inline Automaton canonicalize(const Pattern& v, int r, int k, const DiscoveredGraph& g) {
    const std::size_t n = g.witness.size();
    std::vector<int> indegree(n, 0);
    for (std::size_t s = 0; s < n; ++s)
        for (int a = 1; a <= k; ++a) {
            const int t = g.delta[s * k + (a - 1)];
            if (t >= 0 && t != static_cast<int>(s)) ++indegree[t];
        }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (std::size_t s = 0; s < n; ++s)
        if (indegree[s] == 0) ready.push(static_cast<int>(s));
    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        const int s = ready.top();
        ready.pop();
        order.push_back(s);
        for (int a = 1; a <= k; ++a) {
            const int t = g.delta[static_cast<std::size_t>(s) * k + (a - 1)];
            if (t >= 0 && t != s && --indegree[t] == 0) ready.push(t);
        }
    }
    if (order.size() != n) throw invariant_violation("automaton has a cycle through distinct states");
    if (n == 0 || order.front() != 0) throw invariant_violation("initial state is not a source");

    std::vector<int> position(n);
    for (std::size_t i = 0; i < n; ++i) position[order[i]] = static_cast<int>(i);
    std::vector<AutomatonState> states(n);
    std::vector<int> delta(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        const int s = order[i];
        states[i].witness = g.witness[s];
        for (int a = 1; a <= k; ++a) {
            const int t = g.delta[static_cast<std::size_t>(s) * k + (a - 1)];
            delta[i * k + (a - 1)] = t < 0 ? Automaton::kAbsorbed : position[t];
        }
    }
    return Automaton(v, r, k, std::move(states), std::move(delta));
}

// Occurrence-DP machine with every count capped at r + 1. A raw state is the
// capped per-prefix tuple count vector plus the capped completed count.
// Capping is exact for the question "how many occurrences, up to r + 1",
// which is all the equivalence cares about.
inline Automaton build_by_refinement(const Pattern& v, int r, int k, const BuildOptions& opt) {
    const OccurrenceMatcher matcher(v, k);
    const auto cap = static_cast<std::uint8_t>(r + 1);
    using Raw = std::vector<std::uint8_t>; // matcher counts followed by completed count

    std::map<Raw, int> index;
    std::vector<Raw> raw;
    std::vector<int> raw_delta; // -1 marks the sink
    Raw start(matcher.state_count() + 1, 0);
    start[0] = 1;
    index.emplace(start, 0);
    raw.push_back(start);
    for (std::size_t s = 0; s < raw.size(); ++s) {
        for (int a = 1; a <= k; ++a) {
            Raw counts(raw[s].begin(), raw[s].end() - 1);
            std::uint8_t completed = raw[s].back();
            matcher.step_capped(counts, completed, a, cap);
            if (completed > r) {
                raw_delta.push_back(-1);
                continue;
            }
            counts.push_back(completed);
            auto [it, inserted] = index.emplace(std::move(counts), static_cast<int>(raw.size()));
            if (inserted) {
                if (raw.size() >= opt.max_states)
                    throw budget_exceeded("raw occurrence machine exceeds " + std::to_string(opt.max_states) + " states");
                raw.push_back(it->first);
            }
            raw_delta.push_back(it->second);
        }
    }

    // Moore refinement; class ids of the sink are -1 throughout.
    const std::size_t n = raw.size();
    std::vector<int> cls(n);
    for (std::size_t s = 0; s < n; ++s) cls[s] = raw[s].back();
    std::size_t classes = 0;
    while (true) {
        std::map<std::vector<int>, int> ids;
        std::vector<int> next_cls(n);
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<int> key;
            key.reserve(k + 1);
            key.push_back(cls[s]);
            for (int a = 1; a <= k; ++a) {
                const int t = raw_delta[s * k + (a - 1)];
                key.push_back(t < 0 ? -1 : cls[t]);
            }
            next_cls[s] = ids.emplace(std::move(key), static_cast<int>(ids.size())).first->second;
        }
        cls.swap(next_cls);
        if (ids.size() == classes) break;
        classes = ids.size();
    }

    // Quotient BFS from the class of the empty word.
    DiscoveredGraph g;
    std::vector<int> class_node(classes, -1);
    std::vector<int> node_raw;
    class_node[cls[0]] = 0;
    node_raw.push_back(0);
    g.witness.emplace_back();
    for (std::size_t q = 0; q < node_raw.size(); ++q) {
        const int s = node_raw[q];
        for (int a = 1; a <= k; ++a) {
            const int t = raw_delta[static_cast<std::size_t>(s) * k + (a - 1)];
            if (t < 0) {
                g.delta.push_back(-1);
                continue;
            }
            int& node = class_node[cls[t]];
            if (node < 0) {
                node = static_cast<int>(node_raw.size());
                node_raw.push_back(t);
                auto w = g.witness[q];
                w.push_back(a);
                g.witness.push_back(std::move(w));
            }
            g.delta.push_back(node);
        }
    }
    return canonicalize(v, r, k, g);
}

} // namespace detail

// Capped occurrence counts of w·u for every extension u with |u| <= depth,
// indexed length-first then lexicographically.
class StateSignature {
public:
    StateSignature(const OccurrenceMatcher& matcher, std::span<const Letter> w, int r, int depth)
        : r_(r), k_(matcher.k()), depth_(depth) {
        const auto cap = static_cast<std::uint8_t>(r + 1);
        std::vector<std::uint8_t> counts(matcher.state_count(), 0);
        counts[0] = 1;
        std::uint8_t completed = 0;
        for (Letter a : w) matcher.step_capped(counts, completed, a, cap);
        offsets_.assign(depth + 2, 0);
        std::size_t layer = 1;
        for (int len = 0; len <= depth; ++len) {
            offsets_[len + 1] = offsets_[len] + layer;
            layer *= static_cast<std::size_t>(k_);
        }
        values_.assign(offsets_[depth + 1], 0);
        fill(matcher, counts, completed, 0, 0, cap);
    }

    static std::size_t entries(int k, int depth) {
        std::size_t total = 0;
        std::size_t layer = 1;
        for (int len = 0; len <= depth; ++len) {
            total += layer;
            layer *= static_cast<std::size_t>(k);
        }
        return total;
    }

    // Entry for the extension u (letters in [k]).
    int at(std::span<const Letter> u) const {
        if (static_cast<int>(u.size()) > depth_) throw invalid_argument("extension longer than signature depth");
        std::size_t rank = 0;
        for (Letter a : u) rank = rank * k_ + (a - 1);
        return values_[offsets_[u.size()] + rank];
    }

    const std::vector<std::uint8_t>& values() const noexcept { return values_; }
    friend bool operator==(const StateSignature& a, const StateSignature& b) { return a.values_ == b.values_; }

private:
    void fill(const OccurrenceMatcher& matcher, const std::vector<std::uint8_t>& counts, std::uint8_t completed,
              int len, std::size_t rank, std::uint8_t cap) {
        values_[offsets_[len] + rank] = completed;
        if (len == depth_) return;
        for (int a = 1; a <= k_; ++a) {
            auto next = counts;
            std::uint8_t done = completed;
            matcher.step_capped(next, done, a, cap);
            fill(matcher, next, done, len + 1, rank * k_ + (a - 1), cap);
        }
    }

    int r_;
    int k_;
    int depth_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint8_t> values_;
};

// Extension length that separates all classes: r + 1 further occurrences
// never need more than (r + 1) * l letters.
inline int signature_depth(const Pattern& v, int r) { return (r + 1) * static_cast<int>(v.length()); }

namespace detail {

inline Automaton build_by_signature(const Pattern& v, int r, int k, const BuildOptions& opt) {
    const OccurrenceMatcher matcher(v, k);
    const int depth = signature_depth(v, r);
    const std::size_t per = StateSignature::entries(k, depth);
    std::size_t work = 0;
    auto signature_of = [&](const std::vector<Letter>& w) {
        work += per;
        if (work > opt.max_signature_entries)
            throw budget_exceeded("signature construction exceeds " + std::to_string(opt.max_signature_entries) +
                                  " entries");
        return StateSignature(matcher, w, r, depth).values();
    };

    DiscoveredGraph g;
    std::map<std::vector<std::uint8_t>, int> index;
    index.emplace(signature_of({}), 0);
    g.witness.emplace_back();
    for (std::size_t q = 0; q < g.witness.size(); ++q) {
        for (int a = 1; a <= k; ++a) {
            auto w = g.witness[q];
            w.push_back(a);
            if (matcher.count<std::uint64_t>(w) > static_cast<std::uint64_t>(r)) {
                g.delta.push_back(-1);
                continue;
            }
            auto [it, inserted] = index.emplace(signature_of(w), static_cast<int>(g.witness.size()));
            if (inserted) {
                if (g.witness.size() >= opt.max_states)
                    throw budget_exceeded("automaton exceeds " + std::to_string(opt.max_states) + " states");
                g.witness.push_back(std::move(w));
            }
            g.delta.push_back(it->second);
        }
    }
    return canonicalize(v, r, k, g);
}

} // namespace detail

inline Automaton build_automaton(const Pattern& v, int r, int k, const BuildOptions& opt = {}) {
    if (r < 0) throw invalid_argument("r must be non-negative");
    if (r > 250) throw invalid_argument("r above 250 is not supported");
    if (k < 1) throw invalid_argument("alphabet size must be positive");
    v.require_alphabet(k);
    return opt.method == BuildMethod::signature ? detail::build_by_signature(v, r, k, opt)
                                                : detail::build_by_refinement(v, r, k, opt);
}

struct TransitionMatrix {
    std::vector<std::vector<int>> entries;
    std::vector<int> loops;

    std::size_t size() const noexcept { return entries.size(); }
    int operator()(std::size_t i, std::size_t j) const { return entries[i][j]; }
};

inline TransitionMatrix transition_matrix(const Automaton& a) {
    TransitionMatrix m;
    const std::size_t p = a.size();
    m.entries.assign(p, std::vector<int>(p, 0));
    for (std::size_t i = 0; i < p; ++i)
        for (int c = 1; c <= a.k(); ++c)
            if (const int t = a.next(i, c); t != Automaton::kAbsorbed) ++m.entries[i][t];
    for (std::size_t i = 0; i < p; ++i) m.loops.push_back(m.entries[i][i]);
    return m;
}

// Loop counts per state; the initial state must carry exactly d - 1 loops and
// no state more than that.
inline std::vector<int> loop_profile(const Automaton& a) {
    std::vector<int> loops;
    for (const auto& s : a.states()) loops.push_back(s.loops);
    const int d = a.pattern().distinct();
    if (loops.empty() || loops.front() != d - 1)
        throw invariant_violation("initial state has " + std::to_string(loops.empty() ? -1 : loops.front()) +
                                  " loops, expected " + std::to_string(d - 1));
    for (std::size_t i = 0; i < loops.size(); ++i)
        if (loops[i] > d - 1)
            throw invariant_violation("state " + std::to_string(i) + " has " + std::to_string(loops[i]) + " loops");
    return loops;
}

inline std::string state_label(const Automaton& a, std::size_t i) {
    const auto& w = a.state(i).witness;
    return w.empty() ? std::string("ε") : format_letters(w, a.k());
}

// One edge per (source, target) pair, labelled with its letters.
inline std::string export_dot(const Automaton& a) {
    std::ostringstream out;
    out << "digraph \"Au(" << a.pattern().str() << "," << a.r() << "," << a.k() << ")\" {\n";
    out << "  rankdir=LR;\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        out << "  s" << i << " [label=\"<" << state_label(a, i) << ">\"";
        if (i == 0) out << ", shape=doublecircle";
        out << "];\n";
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::map<int, std::vector<Letter>> by_target;
        for (int c = 1; c <= a.k(); ++c)
            if (const int t = a.next(i, c); t != Automaton::kAbsorbed) by_target[t].push_back(c);
        for (const auto& [t, letters] : by_target) {
            out << "  s" << i << " -> s" << t << " [label=\"";
            for (std::size_t j = 0; j < letters.size(); ++j) out << (j ? "," : "") << letters[j];
            out << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace occulex
