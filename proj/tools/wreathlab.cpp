// Command-line front end: conjugacy deciders, depth measurements, and CSV
// campaign output for restricted wreath products.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "wreathlab/wreathlab.hpp"

using namespace wreathlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUndecided = 2;

struct CommonOpts {
    std::string group;
    std::string family = "all";
    std::uint64_t max_index = 64;
    std::uint64_t cap = default_cell_cap();
};

void add_common(CLI::App* cmd, CommonOpts& o, bool wreath_group) {
    cmd->add_option("--group", o.group,
                    wreath_group ? "wreath product, e.g. \"Z/2 wr Z\"" : "group, e.g. Z, Z^2, Z/6, H")
        ->required();
    cmd->add_option("--family", o.family, "quotient family: all or p<prime>");
    cmd->add_option("--max-index", o.max_index, "largest quotient index to search");
    cmd->add_option("--cap", o.cap, "ball-size cap (WREATHLAB_MAX_CELLS overrides the default)");
}

/// Flat key=value config lines become injected arguments; explicit flags
/// override because every option takes the last value given.
std::vector<std::string> load_config_args(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot read config file: " + path);
    std::vector<std::string> args;
    std::string line;
    while (std::getline(is, line)) {
        auto t = wreathlab::detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("config line needs key=value: " + t);
        auto key = wreathlab::detail::trim(t.substr(0, eq));
        auto val = wreathlab::detail::trim(t.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        if (val == "true") {
            args.push_back("--" + key);
        } else if (val != "false") {
            args.push_back("--" + key);
            args.push_back(val);
        }
    }
    return args;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out_path, std::ios::binary);
        os << text;
    }
}

std::string measured_str(const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : std::string("unreached");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wreathlab: conjugacy separability toolkit for restricted wreath products"};
    app.require_subcommand(1);

    // decide
    CommonOpts dec;
    std::string dec_x, dec_y;
    std::uint64_t dec_radius = 8;
    auto* decide = app.add_subcommand("decide", "decide conjugacy by the Mal'tsev-Mostowski engine");
    add_common(decide, dec, true);
    decide->add_option("--x", dec_x, "first element, e.g. {0:1}@0")->required();
    decide->add_option("--y", dec_y, "second element")->required();
    decide->add_option("--radius", dec_radius, "conjugator search radius");

    // depth
    CommonOpts dep;
    std::string dep_x, dep_y;
    auto* depth = app.add_subcommand("depth", "minimal separating quotient index for a pair");
    add_common(depth, dep, true);
    depth->add_option("--x", dep_x)->required();
    depth->add_option("--y", dep_y)->required();

    // profile
    CommonOpts prof;
    std::uint64_t prof_nmax = 2;
    std::string prof_bound = "none", prof_out;
    unsigned prof_jobs = 1;
    bool prof_nostamp = false;
    auto* profile = app.add_subcommand("profile", "conjugacy depth profile as CSV");
    add_common(profile, prof, true);
    profile->add_option("--n-max", prof_nmax, "largest ball radius");
    profile->add_option("--bound", prof_bound, "bound column: none, thmc, thmb");
    profile->add_option("--out", prof_out, "output CSV path (default stdout)");
    profile->add_option("--jobs", prof_jobs, "worker threads for pair evaluation");
    profile->add_flag("--no-stamp", prof_nostamp, "omit the timestamp header line");

    // girth
    CommonOpts gir;
    std::uint64_t gir_n = 3;
    auto* girth = app.add_subcommand("girth", "residual girth of a group at radius n");
    add_common(girth, gir, false);
    girth->add_option("--n", gir_n, "ball radius")->required();
    gir.max_index = 4096;

    // cyclic
    CommonOpts cyc;
    std::string cyc_b, cyc_x;
    auto* cyclic = app.add_subcommand("cyclic", "cyclic-subgroup separation depth");
    add_common(cyclic, cyc, false);
    cyclic->add_option("--b", cyc_b, "subgroup generator")->required();
    cyclic->add_option("--x", cyc_x, "element outside <b>")->required();

    // short
    CommonOpts sho;
    std::uint64_t sho_nmax = 2;
    std::string sho_out;
    bool sho_nostamp = false;
    auto* shortc = app.add_subcommand("short", "shortest-conjugator profile of a group");
    add_common(shortc, sho, false);
    shortc->add_option("--n-max", sho_nmax, "largest ball radius");
    shortc->add_option("--out", sho_out, "output CSV path (default stdout)");
    shortc->add_flag("--no-stamp", sho_nostamp, "omit the timestamp header line");

    // magnus
    std::uint64_t mag_rank = 2;
    std::string mag_w1, mag_w2;
    auto* magnus = app.add_subcommand("magnus", "free metabelian identity/conjugacy via the wreath image");
    magnus->add_option("--rank", mag_rank, "number of generators");
    magnus->add_option("--w1", mag_w1, "word, e.g. \"[x1,x2]\" or \"x1 x2 X1\"")->required();
    magnus->add_option("--w2", mag_w2, "optional second word: decide conjugacy");

    // witness-nonsep
    std::string wn_base = "Z/3";
    std::int64_t wn_b = 2;
    std::uint64_t wn_p = 3, wn_kmax = 3;
    auto* witness = app.add_subcommand("witness-nonsep",
                                       "pro-p non-separability witness for A wr Z");
    witness->add_option("--base", wn_base, "finite abelian p-group A, e.g. Z/3");
    witness->add_option("--b", wn_b, "Z-element generating the subgroup");
    witness->add_option("--p", wn_p, "prime");
    witness->add_option("--k-max", wn_kmax, "largest acting quotient exponent Z/p^k");

    // check-bounds
    CommonOpts chk;
    std::uint64_t chk_nmax = 2;
    std::string chk_formula = "thmc", chk_out;
    unsigned chk_jobs = 1;
    bool chk_nostamp = false;
    auto* check = app.add_subcommand("check-bounds", "compare measured depths with a theorem bound");
    add_common(check, chk, true);
    check->add_option("--n-max", chk_nmax, "largest ball radius");
    check->add_option("--formula", chk_formula, "bound formula: thmc or thmb");
    check->add_option("--out", chk_out, "output CSV path (default stdout)");
    check->add_option("--jobs", chk_jobs, "worker threads");
    check->add_flag("--no-stamp", chk_nostamp, "omit the timestamp header line");

    for (auto* sub : app.get_subcommands(nullptr)) {
        sub->add_option("--config", "flat key=value config file (flags override)")
            ->expected(1);
        for (auto* opt : sub->get_options())
            if (opt->get_expected_min() > 0)
                opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }

    try {
        // pull out --config and splice its key=value pairs in right after the
        // subcommand name, so explicit flags override them
        std::vector<std::string> args;
        std::string config_path;
        for (int i = 1; i < argc; ++i) {
            std::string a = argv[i];
            if (a == "--config" && i + 1 < argc) {
                config_path = argv[++i];
            } else if (a.rfind("--config=", 0) == 0) {
                config_path = a.substr(9);
            } else {
                args.push_back(std::move(a));
            }
        }
        if (!config_path.empty()) {
            auto injected = load_config_args(config_path);
            auto at = args.empty() ? args.end() : args.begin() + 1;
            args.insert(at, injected.begin(), injected.end());
        }
        app.parse(args.empty() ? std::vector<std::string>{}
                               : std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*decide) {
            auto w = parse_wreath_group(dec.group);
            auto x = parse_wreath_element(w, dec_x);
            auto y = parse_wreath_element(w, dec_y);
            auto v = malcev_mostowski(x, y, parse_family(dec.family), dec.max_index, dec_radius,
                                      dec.cap);
            std::cout << v.to_line() << "\n";
            return v.status == ConjVerdict::Status::Exhausted ? kExitUndecided : kExitOk;
        }
        if (*depth) {
            auto w = parse_wreath_group(dep.group);
            auto x = parse_wreath_element(w, dep_x);
            auto y = parse_wreath_element(w, dep_y);
            auto d = depth_conjugacy(w, x, y, parse_family(dep.family), dep.max_index);
            std::cout << measured_str(d) << "\n";
            return d ? kExitOk : kExitUndecided;
        }
        if (*profile || *check) {
            const CommonOpts& o = *profile ? prof : chk;
            std::uint64_t nmax = *profile ? prof_nmax : chk_nmax;
            std::string bound_name = *profile ? prof_bound : chk_formula;
            std::string out_path = *profile ? prof_out : chk_out;
            unsigned jobs = *profile ? prof_jobs : chk_jobs;
            bool nostamp = *profile ? prof_nostamp : chk_nostamp;

            auto w = parse_wreath_group(o.group);
            auto family = parse_family(o.family);
            std::optional<BoundFormula> formula;
            if (bound_name == "thmc") {
                BoundFormula f;
                f.name = BoundFormula::Name::ThmC_abelian;
                f.finite_a = w->base->finite();
                formula = f;
            } else if (bound_name == "thmb") {
                MeasuredComponents comp_b{w->act, family, o.max_index, o.cap};
                std::optional<MeasuredComponents> comp_a;
                if (!w->base->finite())
                    comp_a = MeasuredComponents{w->base, family, o.max_index, o.cap};
                formula = thmb_formula(comp_b, w->base->finite(), comp_a);
            } else if (bound_name != "none") {
                std::cerr << "unknown bound formula: " << bound_name << "\n";
                return kExitUsage;
            }
            auto p = conj_profile(w, nmax, family, o.max_index, formula, jobs, o.cap);
            std::string text = p.to_csv(!nostamp);
            bool unreached = false;
            for (const auto& r : p.rows) unreached |= !r.measured;
            if (*check) {
                std::ostringstream flags;
                for (const auto& r : p.rows) {
                    if (r.n < 1) continue;
                    if (!r.measured || r.bound.kind == BoundResult::Kind::Undefined) continue;
                    bool ok = r.bound.kind == BoundResult::Kind::Overflow ||
                              BigNat(*r.measured) <= r.bound.value;
                    flags << (ok ? "BOUND-OK" : "BOUND-VIOLATION") << " n=" << r.n
                          << " measured=" << *r.measured << " bound=" << r.bound.str()
                          << " (shape check, constants = 1)\n";
                }
                text += flags.str();
            }
            emit(text, out_path);
            return unreached ? kExitUndecided : kExitOk;
        }
        if (*girth) {
            auto g = parse_group(gir.group);
            auto v = residual_girth(g, parse_family(gir.family), gir_n, gir.max_index, gir.cap);
            std::cout << measured_str(v) << "\n";
            return v ? kExitOk : kExitUndecided;
        }
        if (*cyclic) {
            auto g = parse_group(cyc.group);
            auto b = parse_element(g, cyc_b);
            auto x = parse_element(g, cyc_x);
            auto v = depth_cyclic(g, b, x, parse_family(cyc.family), cyc.max_index);
            std::cout << measured_str(v) << "\n";
            return v ? kExitOk : kExitUndecided;
        }
        if (*shortc) {
            auto g = parse_group(sho.group);
            auto p = short_profile(g, sho_nmax, sho.cap);
            emit(p.to_csv(!sho_nostamp), sho_out);
            return kExitOk;
        }
        if (*magnus) {
            auto w1 = parse_word(mag_w1, static_cast<std::uint32_t>(mag_rank));
            if (mag_w2.empty()) {
                bool id = metabelian_is_identity(w1);
                std::cout << (id ? "identity" : "nontrivial") << "\n";
                return kExitOk;
            }
            auto w2 = parse_word(mag_w2, static_cast<std::uint32_t>(mag_rank));
            auto v = metabelian_conjugate(w1, w2);
            std::cout << v.to_line() << "\n";
            return v.status == ConjVerdict::Status::Exhausted ? kExitUndecided : kExitOk;
        }
        if (*witness) {
            auto a = parse_group(wn_base);
            auto report = pro_p_nonsep_witness(a, wn_b, wn_p, wn_kmax);
            std::cout << report.to_text();
            return report.positive() ? kExitOk : kExitUndecided;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
