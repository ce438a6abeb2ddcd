#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "quotients.hpp"

namespace wreathlab {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

/// Split on a separator character at parenthesis/brace depth 0.
inline std::vector<std::string> split_top_level(const std::string& s, char sep) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '{' || c == '[') ++depth;
        if (c == ')' || c == '}' || c == ']') --depth;
        if (c == sep && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline std::int64_t parse_int(const std::string& s) {
    auto t = trim(s);
    if (t.empty()) throw ParseError("expected an integer");
    std::size_t used = 0;
    std::int64_t v = std::stoll(t, &used);
    if (used != t.size()) throw ParseError("bad integer: " + t);
    return v;
}

} // namespace detail

/// Group atoms: `Z`, `Z/6`, `Z^3`, `H`; products joined by `x`.
inline GroupPtr parse_group(const std::string& text) {
    auto t = detail::trim(text);
    auto parts = detail::split_top_level(t, 'x');
    if (parts.size() > 1) {
        std::vector<GroupPtr> children;
        for (const auto& p : parts) children.push_back(parse_group(p));
        return GroupDescriptor::direct_product(std::move(children));
    }
    if (t.empty()) throw ParseError("empty group spec");
    if (t == "Z") return GroupDescriptor::free_abelian(1);
    if (t == "H") return GroupDescriptor::heisenberg();
    if (t.rfind("Z/", 0) == 0) {
        auto n = detail::parse_int(t.substr(2));
        if (n < 1) throw ParseError("bad cyclic order: " + t);
        return GroupDescriptor::finite_cyclic(static_cast<std::uint64_t>(n));
    }
    if (t.rfind("Z^", 0) == 0) {
        auto m = detail::parse_int(t.substr(2));
        if (m < 1) throw ParseError("bad free abelian rank: " + t);
        return GroupDescriptor::free_abelian(static_cast<std::uint64_t>(m));
    }
    throw ParseError("unrecognised group: " + t);
}

/// Wreath product spec `A wr B`, e.g. "Z/2 wr Z".
inline WreathPtr parse_wreath_group(const std::string& text) {
    auto pos = text.find(" wr ");
    if (pos == std::string::npos) throw ParseError("expected '<base> wr <acting>': " + text);
    return WreathProduct::make(parse_group(text.substr(0, pos)),
                               parse_group(text.substr(pos + 4)));
}

/// Element literals: `5`, `(2,3)`, `3 mod 5`, `H(a,b,c)`; interpreted against
/// the descriptor.
inline GroupElement parse_element(const GroupPtr& desc, const std::string& text) {
    auto t = detail::trim(text);
    if (t.empty()) throw ParseError("empty element literal");
    switch (desc->kind) {
        case GroupKind::HeisenbergZ: {
            if (t.rfind("H(", 0) != 0 || t.back() != ')')
                throw ParseError("Heisenberg literal is H(a,b,c): " + t);
            auto inner = detail::split_top_level(t.substr(2, t.size() - 3), ',');
            if (inner.size() != 3) throw ParseError("Heisenberg literal needs 3 entries");
            return make_element(desc, {detail::parse_int(inner[0]), detail::parse_int(inner[1]),
                                       detail::parse_int(inner[2])});
        }
        case GroupKind::FreeAbelian:
        case GroupKind::FiniteAbelian:
        case GroupKind::DirectProduct: {
            if (t.front() == '(') {
                if (t.back() != ')') throw ParseError("unbalanced vector literal: " + t);
                auto inner = detail::split_top_level(t.substr(1, t.size() - 2), ',');
                std::vector<std::int64_t> p;
                for (const auto& c : inner) p.push_back(detail::parse_int(c));
                return make_element(desc, std::move(p));
            }
            if (desc->payload_size() != 1)
                throw ParseError("vector literal required for " + desc->label);
            return make_element(desc, {detail::parse_int(t)});
        }
        case GroupKind::FiniteCyclic: {
            auto pos = t.find(" mod ");
            if (pos != std::string::npos) {
                auto m = detail::parse_int(t.substr(pos + 5));
                if (m != static_cast<std::int64_t>(desc->n))
                    throw ParseError("modulus mismatch: " + t + " vs " + desc->label);
                return make_element(desc, {detail::parse_int(t.substr(0, pos))});
            }
            return make_element(desc, {detail::parse_int(t)});
        }
        case GroupKind::FiniteTable:
            return make_element(desc, {detail::parse_int(t)});
    }
    throw ParseError("cannot parse element: " + t);
}

/// Wreath literal `{<B-elt>:<A-elt>,...}@<B-elt>`, empty base `{}@b`.
inline WreathElement parse_wreath_element(const WreathPtr& w, const std::string& text) {
    auto t = detail::trim(text);
    if (t.empty() || t.front() != '{') throw ParseError("wreath literal starts with '{': " + t);
    int depth = 0;
    std::size_t close = std::string::npos;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == '{') ++depth;
        if (t[i] == '}') {
            if (--depth == 0) {
                close = i;
                break;
            }
        }
    }
    if (close == std::string::npos) throw ParseError("unbalanced '{' in wreath literal");
    auto rest = detail::trim(t.substr(close + 1));
    if (rest.empty() || rest.front() != '@') throw ParseError("wreath literal needs '@top'");
    auto top = parse_element(w->act, rest.substr(1));
    BaseMap f;
    auto inner = detail::trim(t.substr(1, close - 1));
    if (!inner.empty()) {
        for (const auto& entry : detail::split_top_level(inner, ',')) {
            auto kv = detail::split_top_level(entry, ':');
            if (kv.size() != 2) throw ParseError("bad base entry: " + entry);
            f.emplace_back(parse_element(w->act, kv[0]), parse_element(w->base, kv[1]));
        }
    }
    return make_wreath(w, std::move(f), std::move(top));
}

/// `all` or `p<prime>`.
inline CoCFamily parse_family(const std::string& text) {
    auto t = detail::trim(text);
    if (t == "all") return CoCFamily::all();
    if (t.size() > 1 && t[0] == 'p') {
        auto p = detail::parse_int(t.substr(1));
        bool prime = p >= 2;
        for (std::int64_t d = 2; d * d <= p; ++d)
            if (p % d == 0) prime = false;
        if (!prime) throw ParseError("bad prime in family: " + t);
        return CoCFamily::pgroups(static_cast<std::uint64_t>(p));
    }
    throw ParseError("family must be 'all' or 'p<prime>': " + t);
}

} // namespace wreathlab
