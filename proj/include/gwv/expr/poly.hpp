#pragma once

// Pure-correlator polynomials: products of k-point functions whose arguments
// are parallel basic vectors (slots or contracted basis classes, each shifted
// by some power of tau_+), with exact rational coefficients.

#include "gwv/rational.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gwv::expr {

class ExprError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DummyPairingError : public ExprError {
public:
    using ExprError::ExprError;
};

// ---------------------------------------------------------------------------
// Slot names. A slot is W[0-9]* or V[0-9]*; the id encodes the name so that
// ordering by id is independent of any registry.

using SlotId = std::int32_t;

inline SlotId slot_id(const std::string& name) {
    if (name.empty() || (name[0] != 'W' && name[0] != 'V'))
        throw ExprError("invalid slot name: " + name);
    SlotId letter = name[0] == 'V' ? 1 : 2;
    if (name.size() == 1) return letter * 10000;
    if (name.size() > 5) throw ExprError("slot index too large: " + name);
    SlotId n = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
        if (name[i] < '0' || name[i] > '9') throw ExprError("invalid slot name: " + name);
        n = n * 10 + (name[i] - '0');
    }
    if (n > 9998) throw ExprError("slot index too large: " + name);
    return letter * 10000 + n + 1;
}

inline std::string slot_name(SlotId id) {
    std::string s(1, id / 10000 == 1 ? 'V' : 'W');
    SlotId n = id % 10000;
    if (n > 0) s += std::to_string(n - 1);
    return s;
}

// ---------------------------------------------------------------------------

/// A parallel basic vector: tau_+^shift applied to a slot or to gamma_a.
struct Arg {
    enum Kind : std::uint8_t { Slot = 0, Dummy = 1 };
    Kind kind = Slot;
    std::int32_t id = 0;     // SlotId, or dummy id
    std::int32_t shift = 0;  // number of tau_+ applications
    bool raised = false;     // dummies only; irrelevant for ordering since eta is symmetric

    static Arg slot(SlotId s, int shift = 0) { return Arg{Slot, s, shift, false}; }
    static Arg dummy(std::int32_t d, bool raised, int shift = 0) { return Arg{Dummy, d, shift, raised}; }

    bool is_dummy() const { return kind == Dummy; }

    friend bool operator==(const Arg& a, const Arg& b) {
        return a.kind == b.kind && a.id == b.id && a.shift == b.shift;
    }
    friend bool operator<(const Arg& a, const Arg& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.id != b.id) return a.id < b.id;
        return a.shift < b.shift;
    }
};

/// <<args>>_genus. Argument order is irrelevant; canonical values keep them sorted.
struct Correlator {
    int genus = 0;
    std::vector<Arg> args;

    std::size_t arity() const { return args.size(); }
    int total_shift() const {
        int s = 0;
        for (const auto& a : args) s += a.shift;
        return s;
    }
};

using Key = std::vector<std::int32_t>;

struct Monomial {
    Rational coeff{1};
    std::vector<Correlator> factors;
};

// ---------------------------------------------------------------------------
// Dummy bookkeeping

inline std::int32_t max_dummy_id(const std::vector<Correlator>& fs) {
    std::int32_t m = -1;
    for (const auto& f : fs)
        for (const auto& a : f.args)
            if (a.is_dummy()) m = std::max(m, a.id);
    return m;
}

/// Shifts every dummy id in `fs` by `offset`.
inline void offset_dummies(std::vector<Correlator>& fs, std::int32_t offset) {
    for (auto& f : fs)
        for (auto& a : f.args)
            if (a.is_dummy()) a.id += offset;
}

/// Checks that every dummy id occurs exactly twice.
inline void check_pairing(const std::vector<Correlator>& fs) {
    std::map<std::int32_t, int> count;
    for (const auto& f : fs)
        for (const auto& a : f.args)
            if (a.is_dummy()) ++count[a.id];
    for (auto [id, c] : count)
        if (c != 2)
            throw DummyPairingError("dummy index " + std::to_string(id) + " occurs " + std::to_string(c) +
                                    " times (expected exactly 2)");
}

// ---------------------------------------------------------------------------
// Canonical form

namespace detail {

inline void encode_arg(Key& out, const Arg& a) {
    out.push_back(a.kind);
    out.push_back(a.id);
    out.push_back(a.shift);
}

inline Key encode_factor(const Correlator& c) {
    Key k;
    k.reserve(2 + 3 * c.args.size());
    k.push_back(c.genus);
    k.push_back(static_cast<std::int32_t>(c.args.size()));
    for (const auto& a : c.args) encode_arg(k, a);
    return k;
}

template <class T>
std::vector<int> rank_of(const std::vector<T>& sigs) {
    std::vector<T> sorted = sigs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> r(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i)
        r[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sigs[i]) - sorted.begin());
    return r;
}

struct End {
    int factor;
    int pos;
};

}  // namespace detail

/// Encoding of a canonical factor list.
inline Key encode(const std::vector<Correlator>& canonical_factors) {
    Key k;
    k.push_back(static_cast<std::int32_t>(canonical_factors.size()));
    for (const auto& f : canonical_factors) {
        k.push_back(f.genus);
        k.push_back(static_cast<std::int32_t>(f.args.size()));
        for (const auto& a : f.args) detail::encode_arg(k, a);
    }
    return k;
}

/// Canonical representative of a product of correlators: arguments sorted,
/// factors sorted, dummies relabeled 0..n-1 to the minimal encoding over all
/// relabelings compatible with an invariant coloring of the dummies.
/// Throws DummyPairingError when a dummy does not occur exactly twice.
inline std::vector<Correlator> canonical_factors(std::vector<Correlator> fs) {
    using detail::End;
    const int nf = static_cast<int>(fs.size());

    std::map<std::int32_t, std::vector<End>> ends_by_id;
    for (int f = 0; f < nf; ++f)
        for (int p = 0; p < static_cast<int>(fs[f].args.size()); ++p)
            if (fs[f].args[p].is_dummy()) ends_by_id[fs[f].args[p].id].push_back({f, p});

    auto finish_plain = [](std::vector<Correlator>& v) {
        for (auto& f : v) std::sort(f.args.begin(), f.args.end());
        std::sort(v.begin(), v.end(), [](const Correlator& a, const Correlator& b) {
            return detail::encode_factor(a) < detail::encode_factor(b);
        });
    };

    if (ends_by_id.empty()) {
        finish_plain(fs);
        return fs;
    }

    const int nd = static_cast<int>(ends_by_id.size());
    std::vector<std::array<End, 2>> ends(nd);
    std::vector<std::int32_t> ids;
    {
        int i = 0;
        for (auto& [id, e] : ends_by_id) {
            if (e.size() != 2)
                throw DummyPairingError("dummy index " + std::to_string(id) + " occurs " +
                                        std::to_string(e.size()) + " times (expected exactly 2)");
            ends[i] = {e[0], e[1]};
            ids.push_back(id);
            ++i;
        }
    }
    // position -> local dummy index
    std::vector<std::vector<int>> local(nf);
    for (int f = 0; f < nf; ++f) local[f].assign(fs[f].args.size(), -1);
    for (int d = 0; d < nd; ++d)
        for (const auto& e : ends[d]) local[e.factor][e.pos] = d;

    // Initial factor colors: everything except dummy identities.
    std::vector<Key> base(nf);
    for (int f = 0; f < nf; ++f) {
        std::vector<Arg> plain;
        std::vector<std::int32_t> dshifts;
        for (const auto& a : fs[f].args) {
            if (a.is_dummy())
                dshifts.push_back(a.shift);
            else
                plain.push_back(a);
        }
        std::sort(plain.begin(), plain.end());
        std::sort(dshifts.begin(), dshifts.end());
        Key& k = base[f];
        k.push_back(fs[f].genus);
        k.push_back(static_cast<std::int32_t>(fs[f].args.size()));
        for (const auto& a : plain) detail::encode_arg(k, a);
        k.push_back(-1);
        k.insert(k.end(), dshifts.begin(), dshifts.end());
    }
    std::vector<int> color = detail::rank_of(base);
    int nclasses = *std::max_element(color.begin(), color.end()) + 1;
    for (int round = 0; round < nf; ++round) {
        std::vector<Key> sig(nf);
        for (int f = 0; f < nf; ++f) {
            std::vector<std::array<std::int32_t, 4>> nb;
            for (int p = 0; p < static_cast<int>(fs[f].args.size()); ++p) {
                int d = local[f][p];
                if (d < 0) continue;
                const End& other = (ends[d][0].factor == f && ends[d][0].pos == p) ? ends[d][1] : ends[d][0];
                nb.push_back({fs[f].args[p].shift, color[other.factor], fs[other.factor].args[other.pos].shift,
                              other.factor == f ? 1 : 0});
            }
            std::sort(nb.begin(), nb.end());
            Key& k = sig[f];
            k.push_back(color[f]);
            for (const auto& x : nb) k.insert(k.end(), x.begin(), x.end());
        }
        std::vector<int> next = detail::rank_of(sig);
        int nn = *std::max_element(next.begin(), next.end()) + 1;
        color = std::move(next);
        if (nn == nclasses) break;
        nclasses = nn;
    }

    // Dummy colors.
    std::vector<std::array<std::int32_t, 4>> dsig(nd);
    for (int d = 0; d < nd; ++d) {
        std::array<std::int32_t, 2> a{color[ends[d][0].factor], fs[ends[d][0].factor].args[ends[d][0].pos].shift};
        std::array<std::int32_t, 2> b{color[ends[d][1].factor], fs[ends[d][1].factor].args[ends[d][1].pos].shift};
        if (b < a) std::swap(a, b);
        dsig[d] = {a[0], a[1], b[0], b[1]};
    }
    std::vector<int> dcolor = detail::rank_of(dsig);
    // Group dummies by color (classes in color order).
    int ndc = *std::max_element(dcolor.begin(), dcolor.end()) + 1;
    std::vector<std::vector<int>> groups(ndc);
    for (int d = 0; d < nd; ++d) groups[dcolor[d]].push_back(d);

    // label[d] for the current labeling; labels of class c occupy a contiguous range.
    std::vector<int> label(nd);
    std::vector<int> start(ndc);
    {
        int s = 0;
        for (int c = 0; c < ndc; ++c) {
            start[c] = s;
            s += static_cast<int>(groups[c].size());
        }
    }
    std::vector<std::vector<int>> perm(ndc);
    for (int c = 0; c < ndc; ++c) {
        perm[c].resize(groups[c].size());
        std::iota(perm[c].begin(), perm[c].end(), 0);
    }

    Key best;
    std::vector<int> best_label;
    std::vector<Key> fenc(nf);
    auto evaluate = [&]() {
        for (int c = 0; c < ndc; ++c)
            for (std::size_t j = 0; j < groups[c].size(); ++j) label[groups[c][j]] = start[c] + perm[c][j];
        for (int f = 0; f < nf; ++f) {
            std::vector<Arg> args = fs[f].args;
            for (std::size_t p = 0; p < args.size(); ++p)
                if (local[f][p] >= 0) args[p].id = label[local[f][p]];
            std::sort(args.begin(), args.end());
            Key& k = fenc[f];
            k.clear();
            k.push_back(fs[f].genus);
            k.push_back(static_cast<std::int32_t>(args.size()));
            for (const auto& a : args) detail::encode_arg(k, a);
        }
        std::vector<const Key*> order(nf);
        for (int f = 0; f < nf; ++f) order[f] = &fenc[f];
        std::sort(order.begin(), order.end(), [](const Key* a, const Key* b) { return *a < *b; });
        Key full;
        full.push_back(nf);
        for (const Key* k : order) full.insert(full.end(), k->begin(), k->end());
        if (best_label.empty() || full < best) {
            best = std::move(full);
            best_label = label;
        }
    };
    // Enumerate the product of per-class permutations.
    std::function<void(int)> rec = [&](int c) {
        if (c == ndc) {
            evaluate();
            return;
        }
        std::sort(perm[c].begin(), perm[c].end());
        do {
            rec(c + 1);
        } while (std::next_permutation(perm[c].begin(), perm[c].end()));
    };
    rec(0);

    for (int f = 0; f < nf; ++f)
        for (std::size_t p = 0; p < fs[f].args.size(); ++p)
            if (local[f][p] >= 0) fs[f].args[p].id = best_label[local[f][p]];
    finish_plain(fs);
    std::vector<bool> seen(nd, false);
    for (auto& f : fs)
        for (auto& a : f.args)
            if (a.is_dummy()) {
                a.raised = !seen[a.id];
                seen[a.id] = true;
            }
    return fs;
}

inline Monomial canonicalize(const Monomial& m) {
    return Monomial{m.coeff, canonical_factors(m.factors)};
}

// ---------------------------------------------------------------------------

/// Product of two factor lists; dummies of `b` are renumbered above those of `a`.
inline std::vector<Correlator> multiply_factors(const std::vector<Correlator>& a, std::vector<Correlator> b) {
    std::int32_t off = max_dummy_id(a) + 1;
    std::vector<Correlator> out = a;
    if (off > 0) offset_dummies(b, off);
    out.insert(out.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
    return out;
}

/// Sum of canonical monomials with like terms merged. Ordered by encoding.
class TensorPoly {
public:
    using Map = std::map<Key, Monomial>;

    TensorPoly() = default;
    explicit TensorPoly(const Monomial& m) { add(m); }

    static TensorPoly constant(const Rational& c) {
        TensorPoly p;
        if (!c.is_zero()) p.add_canonical(Key{0}, Monomial{c, {}});
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const Map& terms() const { return terms_; }
    auto begin() const { return terms_.begin(); }
    auto end() const { return terms_.end(); }

    /// Adds an arbitrary (not necessarily canonical) monomial.
    void add(const Monomial& m) {
        if (m.coeff.is_zero()) return;
        auto cf = canonical_factors(m.factors);
        Key k = encode(cf);
        add_canonical(std::move(k), Monomial{m.coeff, std::move(cf)});
    }

    void add_canonical(Key k, Monomial m) {
        if (m.coeff.is_zero()) return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(std::move(k), std::move(m));
            return;
        }
        it->second.coeff += m.coeff;
        if (it->second.coeff.is_zero()) terms_.erase(it);
    }

    void add(const TensorPoly& o, const Rational& scale = Rational(1)) {
        if (scale.is_zero()) return;
        for (const auto& [k, m] : o.terms_) add_canonical(k, Monomial{m.coeff * scale, m.factors});
    }

    Rational coeff(const Key& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? Rational(0) : it->second.coeff;
    }

    TensorPoly scaled(const Rational& s) const {
        TensorPoly r;
        r.add(*this, s);
        return r;
    }

    friend TensorPoly operator+(TensorPoly a, const TensorPoly& b) {
        a.add(b);
        return a;
    }
    friend TensorPoly operator-(TensorPoly a, const TensorPoly& b) {
        a.add(b, Rational(-1));
        return a;
    }
    friend TensorPoly operator*(const TensorPoly& a, const TensorPoly& b) {
        TensorPoly r;
        for (const auto& [ka, ma] : a.terms_)
            for (const auto& [kb, mb] : b.terms_) r.add(Monomial{ma.coeff * mb.coeff, multiply_factors(ma.factors, mb.factors)});
        return r;
    }
    friend bool operator==(const TensorPoly& a, const TensorPoly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        auto i = a.terms_.begin();
        auto j = b.terms_.begin();
        for (; i != a.terms_.end(); ++i, ++j)
            if (i->first != j->first || i->second.coeff != j->second.coeff) return false;
        return true;
    }

private:
    Map terms_;
};

}  // namespace gwv::expr
