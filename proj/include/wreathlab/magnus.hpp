#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "conjugacy.hpp"

namespace wreathlab {

/// Freely reduced word over generators x1..xm.
struct FreeWord {
    std::uint32_t rank;
    std::vector<std::pair<std::uint32_t, int>> letters;  // (generator 1..rank, +-1)

    static FreeWord empty(std::uint32_t rank) { return FreeWord{rank, {}}; }

    static FreeWord generator(std::uint32_t rank, std::uint32_t i, int sign = 1) {
        FreeWord w{rank, {{i, sign}}};
        return w;
    }

    FreeWord operator*(const FreeWord& other) const {
        FreeWord out{rank, letters};
        for (const auto& l : other.letters) {
            if (!out.letters.empty() && out.letters.back().first == l.first &&
                out.letters.back().second == -l.second)
                out.letters.pop_back();
            else
                out.letters.push_back(l);
        }
        return out;
    }

    FreeWord inverse() const {
        FreeWord out{rank, {}};
        for (auto it = letters.rbegin(); it != letters.rend(); ++it)
            out.letters.emplace_back(it->first, -it->second);
        return out;
    }

    FreeWord conj_by(const FreeWord& u) const { return u * (*this) * u.inverse(); }

    std::string str() const {
        std::string s;
        for (const auto& [g, e] : letters) {
            if (!s.empty()) s += " ";
            s += (e > 0 ? "x" : "X") + std::to_string(g);
        }
        return s.empty() ? "1" : s;
    }
};

/// Word grammar: letters `x1 x2 X1` (capital = inverse), commutators
/// `[w1, w2]` expanded as w1 w2 w1^-1 w2^-1, nesting allowed.
inline FreeWord parse_word(const std::string& text, std::uint32_t rank) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    std::function<FreeWord(char)> parse_seq = [&](char stop) -> FreeWord {
        FreeWord acc = FreeWord::empty(rank);
        while (true) {
            skip_ws();
            if (pos >= text.size() || text[pos] == stop) return acc;
            char c = text[pos];
            if (c == '[') {
                ++pos;
                FreeWord u = parse_seq(',');
                if (pos >= text.size() || text[pos] != ',') throw ParseError("expected ',' in commutator");
                ++pos;
                FreeWord v = parse_seq(']');
                if (pos >= text.size() || text[pos] != ']') throw ParseError("expected ']' in commutator");
                ++pos;
                acc = acc * (u * v * u.inverse() * v.inverse());
            } else if (c == 'x' || c == 'X') {
                int sign = (c == 'x') ? 1 : -1;
                ++pos;
                std::size_t start = pos;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
                if (start == pos) throw ParseError("generator letter needs an index");
                std::uint32_t idx = static_cast<std::uint32_t>(std::stoul(text.substr(start, pos - start)));
                if (idx < 1 || idx > rank) throw ParseError("generator index out of range");
                acc = acc * FreeWord::generator(rank, idx, sign);
            } else {
                throw ParseError(std::string("unexpected character '") + c + "' in word");
            }
        }
    };
    auto w = parse_seq('\0');
    skip_ws();
    if (pos != text.size()) throw ParseError("trailing input in word");
    return w;
}

/// Z^m wr Z^m, the target of the Magnus embedding for S_{m,2}.
inline WreathPtr magnus_wreath(std::uint32_t m) {
    return WreathProduct::make(GroupDescriptor::free_abelian(m), GroupDescriptor::free_abelian(m));
}

/// Magnus embedding of the free metabelian group: x_i maps to
/// ({identity -> e_i}, a_i) with e_i the i-th base unit vector and a_i the
/// i-th acting generator; extended multiplicatively over the word.
inline WreathElement magnus_embed(const FreeWord& w, const WreathPtr& target) {
    auto acc = wr_identity(target);
    auto id_act = identity(target->act);
    for (const auto& [g, e] : w.letters) {
        std::vector<std::int64_t> unit(w.rank, 0);
        unit[g - 1] = 1;
        auto gen = make_wreath(target, {{id_act, make_element(target->base, unit)}},
                               make_element(target->act, unit));
        acc = wr_mul(acc, e > 0 ? gen : wr_inv(gen));
    }
    return acc;
}

inline WreathElement magnus_embed(const FreeWord& w) { return magnus_embed(w, magnus_wreath(w.rank)); }

/// Free metabelian group element: a representative word plus its faithful
/// wreath image (the canonical form; words are kept for reporting).
struct MetabelianElement {
    FreeWord word;
    WreathElement image;

    static MetabelianElement make(FreeWord w) {
        auto img = magnus_embed(w);
        return MetabelianElement{std::move(w), std::move(img)};
    }

    bool operator==(const MetabelianElement& o) const { return image == o.image; }
    MetabelianElement operator*(const MetabelianElement& o) const {
        return MetabelianElement{word * o.word, wr_mul(image, o.image)};
    }
};

/// w represents the identity of S_{m,2} iff its embedding is trivial
/// (the embedding is faithful with kernel F'').
inline bool metabelian_is_identity(const FreeWord& w) {
    return wr_is_identity(magnus_embed(w));
}

/// Conjugacy in S_{m,2} through the wreath image (conjugacy transfers along
/// the Magnus embedding).
inline ConjVerdict metabelian_conjugate(const FreeWord& w1, const FreeWord& w2) {
    if (w1.rank != w2.rank)
        throw MixedOwnersError("metabelian_conjugate: words of different rank");
    auto target = magnus_wreath(w1.rank);
    return conj_abelianA_wreath(magnus_embed(w1, target), magnus_embed(w2, target));
}

} // namespace wreathlab
