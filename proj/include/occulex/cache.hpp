#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "automaton.hpp"

namespace occulex {

inline constexpr int kCacheVersion = 1;

inline nlohmann::json automaton_to_json(const Automaton& a) {
    nlohmann::json states = nlohmann::json::array();
    for (const auto& s : a.states()) states.push_back({{"witness", s.witness}, {"loops", s.loops}});
    std::vector<int> delta;
    delta.reserve(a.size() * static_cast<std::size_t>(a.k()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int c = 1; c <= a.k(); ++c) delta.push_back(a.next(i, c));
    const auto letters = a.pattern().letters();
    return {{"format", "occulex-automaton"},
            {"version", kCacheVersion},
            {"pattern", std::vector<Letter>(letters.begin(), letters.end())},
            {"r", a.r()},
            {"k", a.k()},
            {"states", std::move(states)},
            {"delta", std::move(delta)}};
}

// Rejects anything that is not a well-formed document of the current version.
inline Automaton automaton_from_json(const nlohmann::json& doc) {
    try {
        if (!doc.is_object() || doc.value("format", "") != "occulex-automaton")
            throw cache_invalid("not an automaton document");
        if (!doc.contains("version") || doc.at("version") != kCacheVersion)
            throw cache_invalid("cache version " + (doc.contains("version") ? doc.at("version").dump() : "missing") +
                                ", expected " + std::to_string(kCacheVersion));
        Pattern v(doc.at("pattern").get<std::vector<Letter>>());
        const int r = doc.at("r").get<int>();
        const int k = doc.at("k").get<int>();
        if (r < 0 || k < 1) throw cache_invalid("bad r or k");
        std::vector<AutomatonState> states;
        std::vector<int> stored_loops;
        for (const auto& s : doc.at("states")) {
            AutomatonState st;
            st.witness = s.at("witness").get<std::vector<Letter>>();
            stored_loops.push_back(s.at("loops").get<int>());
            states.push_back(std::move(st));
        }
        if (states.empty()) throw cache_invalid("no states");
        Automaton a(std::move(v), r, k, std::move(states), doc.at("delta").get<std::vector<int>>());
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.state(i).loops != stored_loops[i]) throw cache_invalid("loop count mismatch at state " + std::to_string(i));
        return a;
    } catch (const cache_invalid&) {
        throw;
    } catch (const std::exception& e) {
        throw cache_invalid(std::string("malformed automaton document: ") + e.what());
    }
}

// Explicit directory, else $OCCULEX_CACHE, else ./.occulex-cache.
inline std::filesystem::path resolve_cache_dir(const std::optional<std::string>& explicit_dir = std::nullopt) {
    if (explicit_dir && !explicit_dir->empty()) return *explicit_dir;
    if (const char* env = std::getenv("OCCULEX_CACHE"); env && *env) return env;
    return ".occulex-cache";
}

struct CacheLookup {
    Automaton automaton;
    bool hit = false;
    bool rebuilt = false;      // a file existed but was rejected
    std::string rejected_reason;
    double seconds = 0;        // wall time for load or build
    std::filesystem::path file;
};

class AutomatonCache {
public:
    explicit AutomatonCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& directory() const noexcept { return dir_; }

    std::filesystem::path file_for(const Pattern& v, int r, int k) const {
        std::string key;
        for (std::size_t i = 0; i < v.length(); ++i) {
            if (i && v.max_letter() > 9) key += '-';
            key += std::to_string(v.letters()[i]);
        }
        return dir_ / ("au_" + key + "_r" + std::to_string(r) + "_k" + std::to_string(k) + ".json");
    }

    // Nothing when no file exists; cache_invalid when one exists but is unusable.
    std::optional<Automaton> load(const Pattern& v, int r, int k) const {
        const auto path = file_for(v, r, k);
        if (!std::filesystem::exists(path)) return std::nullopt;
        std::ifstream in(path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            throw cache_invalid("unreadable cache file " + path.string() + ": " + e.what());
        }
        Automaton a = automaton_from_json(doc);
        if (!(a.pattern() == v) || a.r() != r || a.k() != k)
            throw cache_invalid("cache file " + path.string() + " holds a different automaton");
        return a;
    }

    void store(const Automaton& a) const {
        std::filesystem::create_directories(dir_);
        const auto path = file_for(a.pattern(), a.r(), a.k());
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw error("cannot write cache file " + tmp.string());
            out << automaton_to_json(a).dump() << '\n';
        }
        std::filesystem::rename(tmp, path);
    }

    CacheLookup get(const Pattern& v, int r, int k, const BuildOptions& opt = {}) const {
        CacheLookup out;
        out.file = file_for(v, r, k);
        const auto start = std::chrono::steady_clock::now();
        try {
            if (auto a = load(v, r, k)) {
                out.automaton = std::move(*a);
                out.hit = true;
            }
        } catch (const cache_invalid& e) {
            out.rebuilt = true;
            out.rejected_reason = e.what();
        }
        if (!out.hit) {
            out.automaton = build_automaton(v, r, k, opt);
            store(out.automaton);
        }
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return out;
    }

private:
    std::filesystem::path dir_;
};

inline Automaton cache_roundtrip(const Automaton& a, const std::filesystem::path& dir) {
    const AutomatonCache cache(dir);
    cache.store(a);
    auto back = cache.load(a.pattern(), a.r(), a.k());
    if (!back) throw cache_invalid("cache file vanished after store");
    return std::move(*back);
}

} // namespace occulex
