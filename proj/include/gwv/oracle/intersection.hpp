#pragma once

// psi-class intersection numbers on moduli of stable curves (the point target),
// computed by the DVV form of the KdV recursion.

#include "gwv/rational.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwv::oracle {

struct IntersectionKey {
    int genus = 0;
    std::vector<int> degrees;  // sorted non-increasing

    IntersectionKey() = default;
    IntersectionKey(int g, std::vector<int> d) : genus(g), degrees(std::move(d)) {
        std::sort(degrees.begin(), degrees.end(), std::greater<>());
    }
    auto operator<=>(const IntersectionKey&) const = default;
};

inline bool selection_rule(int g, const std::vector<int>& d) {
    long s = 0;
    for (int x : d) s += x;
    return s == 3L * g - 3 + static_cast<long>(d.size());
}

class CacheFormatError : public std::runtime_error {
public:
    CacheFormatError(std::size_t line, const std::string& what)
        : std::runtime_error("cache line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Memoized intersection numbers. Readers share the lock; an insertion takes it
/// exclusively. Values are computed outside the lock, so two threads may race
/// to compute the same entry; both produce the same exact value and the first
/// insertion wins.
class IntersectionCache {
public:
    Rational get(int g, std::vector<int> degrees) {
        for (int d : degrees)
            if (d < 0) return Rational(0);
        if (g < 0 || degrees.empty()) return Rational(0);
        IntersectionKey key(g, std::move(degrees));
        if (!selection_rule(key.genus, key.degrees)) return Rational(0);
        if (2 * key.genus - 2 + static_cast<int>(key.degrees.size()) <= 0) return Rational(0);
        {
            std::shared_lock lk(mu_);
            if (auto it = map_.find(key); it != map_.end()) return it->second;
        }
        Rational v = compute(key);
        std::unique_lock lk(mu_);
        return map_.emplace(key, v).first->second;
    }

    std::size_t size() const {
        std::shared_lock lk(mu_);
        return map_.size();
    }

    std::map<IntersectionKey, Rational> snapshot() const {
        std::shared_lock lk(mu_);
        return map_;
    }

    void clear() {
        std::unique_lock lk(mu_);
        map_.clear();
    }

    /// One "g | d1 d2 .. | p/q" line per entry, degrees non-increasing.
    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write cache file " + path);
        out << "# genus | degrees | value\n";
        for (const auto& [k, v] : snapshot()) {
            out << k.genus << " |";
            for (int d : k.degrees) out << ' ' << d;
            out << " | " << v.str() << '\n';
        }
        if (!out) throw std::runtime_error("write failed for cache file " + path);
    }

    /// Merges the entries of `path`; existing entries are kept. An entry that
    /// disagrees with a stored value is a format error.
    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read cache file " + path);
        std::map<IntersectionKey, Rational> parsed;
        std::string line;
        std::size_t no = 0;
        while (std::getline(in, line)) {
            ++no;
            auto hash = line.find('#');
            std::string body = hash == std::string::npos ? line : line.substr(0, hash);
            if (body.find_first_not_of(" \t\r") == std::string::npos) continue;
            auto p1 = body.find('|');
            auto p2 = p1 == std::string::npos ? p1 : body.find('|', p1 + 1);
            if (p2 == std::string::npos || body.find('|', p2 + 1) != std::string::npos)
                throw CacheFormatError(no, "expected 'g | degrees | p/q'");
            IntersectionKey key;
            try {
                key.genus = std::stoi(body.substr(0, p1));
                std::istringstream ds(body.substr(p1 + 1, p2 - p1 - 1));
                std::string tok;
                while (ds >> tok) {
                    std::size_t used = 0;
                    int d = std::stoi(tok, &used);
                    if (used != tok.size() || d < 0) throw std::invalid_argument(tok);
                    key.degrees.push_back(d);
                }
                std::istringstream vs(body.substr(p2 + 1));
                std::string val, extra;
                vs >> val;
                if (val.empty() || (vs >> extra)) throw std::invalid_argument("value");
                Rational v = Rational::parse(val);
                if (key.genus < 0 || key.degrees.empty()) throw std::invalid_argument("key");
                std::sort(key.degrees.begin(), key.degrees.end(), std::greater<>());
                if (!selection_rule(key.genus, key.degrees) && !v.is_zero())
                    throw CacheFormatError(no, "entry violates the selection rule");
                parsed[key] = v;
            } catch (const CacheFormatError&) {
                throw;
            } catch (const std::exception& e) {
                throw CacheFormatError(no, std::string("malformed entry: ") + e.what());
            }
        }
        std::unique_lock lk(mu_);
        for (auto& [k, v] : parsed) {
            auto [it, fresh] = map_.emplace(k, v);
            if (!fresh && it->second != v)
                throw std::runtime_error("cache file " + path + " conflicts with a stored value");
        }
    }

private:
    mutable std::shared_mutex mu_;
    std::map<IntersectionKey, Rational> map_;

    Rational compute(const IntersectionKey& key) {
        const int g = key.genus;
        std::vector<int> d = key.degrees;  // non-increasing
        const int n = static_cast<int>(d.size());
        if (g == 0 && n == 3) return Rational(1);  // all degrees 0 by selection
        if (g == 1 && n == 1) return Rational(1, 24);

        // string equation
        if (d.back() == 0) {
            d.pop_back();
            Rational s;
            for (std::size_t j = 0; j < d.size(); ++j) {
                if (d[j] == 0) continue;
                auto e = d;
                --e[j];
                s += get(g, e);
            }
            return s;
        }

        // DVV on the largest degree k+1
        const int k = d.front() - 1;
        std::vector<int> rest(d.begin() + 1, d.end());
        Rational s;
        for (std::size_t j = 0; j < rest.size(); ++j) {
            auto e = rest;
            e[j] = rest[j] + k;
            s += Rational(double_factorial(2 * k + 2 * rest[j] + 1), double_factorial(2 * rest[j] - 1)) * get(g, e);
        }
        Rational half;
        const std::size_t m = rest.size();
        for (int r = 0; r <= k - 1; ++r) {
            int t = k - 1 - r;
            Rational c(Integer(double_factorial(2 * r + 1) * double_factorial(2 * t + 1)));
            Rational inner;
            if (g >= 1) {
                auto e = rest;
                e.push_back(r);
                e.push_back(t);
                inner += get(g - 1, e);
            }
            for (unsigned mask = 0; mask < (1u << m); ++mask) {
                std::vector<int> a{r}, b{t};
                for (std::size_t j = 0; j < m; ++j) (mask >> j & 1u ? a : b).push_back(rest[j]);
                for (int g1 = 0; g1 <= g; ++g1) {
                    Rational x = get(g1, a);
                    if (x.is_zero()) continue;
                    inner += x * get(g - g1, b);
                }
            }
            half += c * inner;
        }
        s += half / Rational(2);
        return s / Rational(double_factorial(2 * k + 3));
    }
};

inline IntersectionCache& default_cache() {
    static IntersectionCache cache;
    return cache;
}

/// <tau_{d1} .. tau_{dk}>_g over the moduli of stable curves.
inline Rational intersection(int g, std::vector<int> degrees) { return default_cache().get(g, std::move(degrees)); }

/// (k-3)! / prod d_i! when the selection rule holds, else 0.
inline Rational genus0_closed_form(const std::vector<int>& degrees) {
    const int k = static_cast<int>(degrees.size());
    if (k < 3 || !selection_rule(0, degrees)) return Rational(0);
    Rational r = factorial(static_cast<unsigned>(k - 3));
    for (int d : degrees) r /= factorial(static_cast<unsigned>(d));
    return r;
}

}  // namespace gwv::oracle
