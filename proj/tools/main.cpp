// smoothval command-line front end: every library operation as a subcommand
// with JSON/CSV output. Exit codes: 0 success, 2 domain error, 3 config
// error. All runs are seed-free and deterministic for any --threads value.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "smoothval/arith.hpp"
#include "smoothval/dickman.hpp"
#include "smoothval/io.hpp"
#include "smoothval/localroots.hpp"
#include "smoothval/multsum.hpp"
#include "smoothval/poly.hpp"
#include "smoothval/sieve.hpp"
#include "smoothval/smooth.hpp"

using namespace smoothval;
using nlohmann::json;

namespace {

struct Output {
    std::string path;    // empty = stdout
    std::string format;  // "json" or "csv"

    void emit(const json& j, const std::string& csv) const {
        std::string text = format == "csv" ? csv : j.dump(2) + "\n";
        if (path.empty()) {
            std::fputs(text.c_str(), stdout);
        } else {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::invalid_argument("cannot open output: " + path);
            out << text;
        }
    }
};

json g_config;  // from --config, flags override

template <typename T>
T cfg_or(const char* key, T fallback) {
    if (g_config.contains(key)) return g_config[key].get<T>();
    return fallback;
}

PrimeTable make_table(uint64_t limit) {
    limit = std::max<uint64_t>(limit, 1000);
    if (limit > 20'000'000)
        throw std::domain_error("prime table limit " + std::to_string(limit) +
                                " beyond the desk-scale bound 2e7");
    PrimeTable t = PrimeTable::build(limit);
    t.ensure_spf();
    return t;
}

uint64_t need_u64(double v, const char* what) {
    if (!(v >= 0) || v != std::floor(v))
        throw std::invalid_argument(std::string(what) + " must be a nonnegative integer");
    return static_cast<uint64_t>(v);
}

MultiplicativeSpec make_spec(const std::string& g, const std::string& poly,
                             double kappa) {
    if (g == "one") return MultiplicativeSpec::one();
    if (g == "phi-over-n") return MultiplicativeSpec::phi_over_n();
    if (g == "unit") return MultiplicativeSpec::unit_only();
    if (poly.empty())
        throw std::invalid_argument("--g " + g + " requires --poly");
    if (g == "sigma") return MultiplicativeSpec::for_sigma(parse_poly(poly), kappa);
    if (g == "sigma-lambda")
        return MultiplicativeSpec::for_sigma_lambda(parse_poly(poly), kappa);
    throw std::invalid_argument("unknown multiplicative function: " + g);
}

struct Common {
    Output out;
    int threads = 1;
};

void attach_common(CLI::App* sub, Common& c) {
    c.out.path = cfg_or<std::string>("out", "");
    c.out.format = cfg_or<std::string>("format", "json");
    c.threads = static_cast<int>(cfg_or<double>("threads", 1));
    sub->add_option("--out", c.out.path, "output file (default: stdout)");
    sub->add_option("--format", c.out.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", c.threads, "worker threads (results identical)");
}

json kv_json(std::initializer_list<std::pair<std::string, json>> items) {
    json j;
    for (auto& [k, v] : items) j[k] = v;
    return j;
}

std::string kv_csv(const json& j) {
    std::string hdr, row;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!hdr.empty()) {
            hdr += ",";
            row += ",";
        }
        hdr += it.key();
        if (it->is_number_float()) row += f17(it->get<double>());
        else if (it->is_string()) row += it->get<std::string>();
        else row += it->dump();
    }
    return hdr + "\n" + row + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smoothval: counting machinery for smooth values of polynomials"};
    app.require_subcommand(1);

    // --config is handled before CLI11 so its values become defaults
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream in(argv[i + 1]);
            if (!in) {
                std::fprintf(stderr, "error: config: cannot open %s\n", argv[i + 1]);
                return 3;
            }
            try {
                in >> g_config;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: config: %s\n", e.what());
                return 3;
            }
        }
    }
    app.add_option("--config", "JSON config file; flags override its values")
        ->expected(1);

    std::string poly = cfg_or<std::string>("poly", "");
    double x = cfg_or<double>("x", 0), L = cfg_or<double>("L", 0);
    double y = cfg_or<double>("y", 0), delta = cfg_or<double>("delta", 0);
    double z = cfg_or<double>("z", 0), D = cfg_or<double>("D", 0);
    double Q = cfg_or<double>("Q", 0), M = cfg_or<double>("M", 0);
    double h = cfg_or<double>("h", 0), d = cfg_or<double>("d", 0);
    double q = cfg_or<double>("q", 1), u = cfg_or<double>("u", 0);
    double s = cfg_or<double>("s", 0);
    double w1 = cfg_or<double>("w1", 2), w2 = cfg_or<double>("w2", 0);
    double kappa = cfg_or<double>("kappa", 1);
    double k_param = cfg_or<double>("k", 1);
    std::string filter = cfg_or<std::string>("filter", "all");
    std::string gname = cfg_or<std::string>("g", "");
    std::string delta_grid = cfg_or<std::string>("delta_grid", "");
    std::string mode = cfg_or<std::string>("mode", "direct");
    double P = cfg_or<double>("P", 0);
    bool use_lambda = false, exhaustive = false;

    auto add_poly = [&](CLI::App* sub) {
        sub->add_option("--poly", poly, "polynomial in t, e.g. \"t^2+1\"");
    };

    // ---- sigma ----
    Common c_sigma;
    auto* sub_sigma = app.add_subcommand("sigma", "root count sigma(h) or sigma_Lambda(h)");
    add_poly(sub_sigma);
    sub_sigma->add_option("--h", h)->required();
    sub_sigma->add_flag("--lambda", use_lambda, "count only roots coprime to h");
    attach_common(sub_sigma, c_sigma);
    sub_sigma->callback([&] {
        auto f = parse_poly(poly);
        uint64_t hh = need_u64(h, "--h");
        auto table = make_table(hh + 1);
        json j;
        j["h"] = hh;
        if (use_lambda) j["sigma_lambda"] = sigma_lambda(f, hh, table);
        else j["sigma"] = sigma(f, hh, table);
        c_sigma.out.emit(j, kv_csv(j));
    });

    // ---- sigma-star ----
    Common c_star;
    double p_opt = 0, r_opt = 1;
    auto* sub_star = app.add_subcommand("sigma-star", "sigma*(h) or sigma*(p^r)");
    add_poly(sub_star);
    sub_star->add_option("--h", h);
    sub_star->add_option("--p", p_opt);
    sub_star->add_option("--r", r_opt);
    sub_star->add_flag("--lambda", use_lambda);
    attach_common(sub_star, c_star);
    sub_star->callback([&] {
        auto f = parse_poly(poly);
        json j;
        if (p_opt > 0) {
            uint64_t pp = need_u64(p_opt, "--p");
            unsigned rr = static_cast<unsigned>(need_u64(r_opt, "--r"));
            mpq_class v = sigma_star_pp(f, pp, rr, use_lambda);
            j["p"] = pp;
            j["r"] = rr;
            j["sigma_star"] = rational_to_string(v);
            j["positive"] = v > 0;
        } else {
            uint64_t hh = need_u64(h, "--h");
            if (hh == 0) throw std::invalid_argument("need --h or --p/--r");
            auto table = make_table(hh + 1);
            mpq_class v = sigma_star(f, hh, table, use_lambda);
            j["h"] = hh;
            j["sigma_star"] = rational_to_string(v);
            j["positive"] = sigma_star_positive(f, hh, table, use_lambda);
        }
        c_star.out.emit(j, kv_csv(j));
    });

    // ---- nagel ----
    Common c_nagel;
    int points = static_cast<int>(cfg_or<double>("points", 20));
    auto* sub_nagel = app.add_subcommand("nagel", "sum_{p<w} sigma(p) log p / p and its slope");
    add_poly(sub_nagel);
    sub_nagel->add_option("--w1", w1);
    sub_nagel->add_option("--w2", w2)->required();
    sub_nagel->add_option("--points", points);
    attach_common(sub_nagel, c_nagel);
    sub_nagel->callback([&] {
        auto f = parse_poly(poly);
        auto table = make_table(static_cast<uint64_t>(w2) + 1);
        json j;
        j["w2"] = w2;
        j["sum"] = nagel_sum(f, w2, table);
        if (w1 >= 2 && w1 < w2 && points >= 2) {
            j["w1"] = w1;
            j["kappa_hat"] = nagel_slope(f, w1, w2, points, table);
        }
        c_nagel.out.emit(j, kv_csv(j));
    });

    // ---- mertens ----
    Common c_mert;
    auto* sub_mert = app.add_subcommand("mertens", "prod_{w1<=p<w2} (1 - sigma(p)/p)^{-1}");
    add_poly(sub_mert);
    sub_mert->add_option("--w1", w1)->required();
    sub_mert->add_option("--w2", w2)->required();
    attach_common(sub_mert, c_mert);
    sub_mert->callback([&] {
        auto f = parse_poly(poly);
        auto table = make_table(static_cast<uint64_t>(w2) + 1);
        auto m = mertens_sigma_product(f, w1, w2, table);
        json j;
        j["w1"] = w1;
        j["w2"] = w2;
        if (m.exact_valid) j["exact"] = rational_to_string(m.exact);
        j["value"] = m.value;
        j["main_term"] = m.main_term;
        c_mert.out.emit(j, kv_csv(j));
    });

    // ---- meanvalue ----
    Common c_mean;
    auto* sub_mean = app.add_subcommand("meanvalue", "M_g(x, q) = sum_{n<=x,(n,q)=1} g(n)/n");
    add_poly(sub_mean);
    sub_mean->add_option("--g", gname, "one|sigma|sigma-lambda|phi-over-n|unit");
    sub_mean->add_option("--kappa", kappa);
    sub_mean->add_option("--x", x)->required();
    sub_mean->add_option("--q", q);
    sub_mean->add_option("--P", P, "also report the Euler constant c(g) at cutoff P");
    attach_common(sub_mean, c_mean);
    sub_mean->callback([&] {
        if (gname.empty()) gname = poly.empty() ? "one" : "sigma";
        auto spec = make_spec(gname, poly, kappa);
        uint64_t qq = need_u64(q, "--q");
        uint64_t Pu = need_u64(P, "--P");
        auto table = make_table(std::max<uint64_t>(static_cast<uint64_t>(x),
                                                   2 * Pu));
        json j;
        j["g"] = spec.name();
        j["x"] = x;
        j["q"] = qq;
        j["M"] = mean_value(spec, x, qq, table);
        if (Pu >= 2) {
            auto c = euler_constant(spec, Pu, qq, table);
            j["c"] = c.value;
            j["c_tail_estimate"] = c.tail_estimate;
        }
        c_mean.out.emit(j, kv_csv(j));
    });

    // ---- zeta-g ----
    Common c_zeta;
    auto* sub_zeta = app.add_subcommand("zeta-g", "zeta_g(s), direct sum or Euler product");
    add_poly(sub_zeta);
    sub_zeta->add_option("--g", gname);
    sub_zeta->add_option("--kappa", kappa);
    sub_zeta->add_option("--s", s)->required();
    sub_zeta->add_option("--mode", mode)->check(CLI::IsMember({"direct", "euler"}));
    sub_zeta->add_option("--M", M, "cutoff (terms for direct, primes for euler)");
    attach_common(sub_zeta, c_zeta);
    sub_zeta->callback([&] {
        if (gname.empty()) gname = poly.empty() ? "one" : "sigma";
        auto spec = make_spec(gname, poly, kappa);
        uint64_t cutoff = need_u64(M, "--M");
        if (cutoff == 0) cutoff = mode == "euler" ? 100'000 : 1'000'000;
        auto table = make_table(cutoff);
        json j;
        j["g"] = spec.name();
        j["s"] = s;
        j["mode"] = mode;
        j["cutoff"] = cutoff;
        j["zeta_g"] = zeta_g(spec, s,
                             mode == "euler" ? ZetaMode::Euler : ZetaMode::Direct,
                             cutoff, table);
        c_zeta.out.emit(j, kv_csv(j));
    });

    // ---- rho ----
    Common c_rho;
    auto* sub_rho = app.add_subcommand("rho", "Dickman rho(u)");
    sub_rho->add_option("--u", u)->required();
    attach_common(sub_rho, c_rho);
    sub_rho->callback([&] {
        json j;
        j["u"] = u;
        j["rho"] = dickman_rho(u);
        c_rho.out.emit(j, kv_csv(j));
    });

    // ---- smooth-count ----
    Common c_count;
    auto* sub_count = app.add_subcommand(
        "smooth-count", "count y-smooth values of f(n) for n <= x (or an interval)");
    add_poly(sub_count);
    sub_count->add_option("--x", x)->required();
    sub_count->add_option("--y", y)->required();
    sub_count->add_option("--L", L, "short interval (x-L, x]");
    sub_count->add_option("--filter", filter)
        ->check(CLI::IsMember({"all", "primes", "lambda", "squarefree"}));
    attach_common(sub_count, c_count);
    sub_count->callback([&] {
        auto f = parse_poly(poly);
        uint64_t xx = need_u64(x, "--x");
        mpz_class xi = max_abs_value(f, xx);
        mpz_class bnd;
        mpz_sqrt(bnd.get_mpz_t(), xi.get_mpz_t());
        uint64_t need = std::min<uint64_t>(static_cast<uint64_t>(y),
                                           bnd.get_ui() + 1);
        auto table = make_table(std::max<uint64_t>(xx, need));
        json j;
        j["poly"] = f.to_string();
        j["x"] = xx;
        j["y"] = y;
        if (filter == "all") {
            if (L > 0) {
                auto rep = psi_interval(f, xx, need_u64(L, "--L"), y, table,
                                        c_count.threads);
                j["L"] = L;
                j["count"] = static_cast<uint64_t>(rep.rows[0].count);
            } else {
                auto rep = psi_count(f, xx, y, table, c_count.threads);
                j["count"] = static_cast<uint64_t>(rep.rows[0].count);
            }
        } else if (filter == "primes") {
            auto rep = phi_primes(f, xx, y, table, c_count.threads);
            j["count"] = static_cast<uint64_t>(rep.rows[0].count);
        } else if (filter == "lambda") {
            auto rep = psi_lambda(f, xx, y, table, c_count.threads);
            j["count"] = static_cast<uint64_t>(rep.rows[0].count);
            j["weight_sum"] = rep.rows[0].weight_sum;
            j["c_lambda"] = static_cast<double>(xx) - rep.rows[0].weight_sum;
        } else {  // squarefree
            auto flags = squarefree_flags(1, xx + 1, table);
            auto rep = psi_set(
                f, xx, y, [&](uint64_t n) { return flags[n - 1] != 0; },
                6.0 / (M_PI * M_PI), table, c_count.threads);
            j["count"] = static_cast<uint64_t>(rep.rows[0].count);
        }
        c_count.out.emit(j, kv_csv(j));
    });

    // ---- smooth-spectrum ----
    Common c_spec;
    auto* sub_spec = app.add_subcommand(
        "smooth-spectrum", "Psi(f; x, x^{g-delta})/x across a delta grid");
    add_poly(sub_spec);
    sub_spec->add_option("--kappa", kappa);
    sub_spec->add_option("--k", k_param);
    sub_spec->add_option("--x", x)->required();
    sub_spec->add_option("--delta-grid", delta_grid, "comma-separated deltas")
        ->required();
    sub_spec->add_option("--filter", filter)
        ->check(CLI::IsMember({"all", "primes", "lambda"}));
    attach_common(sub_spec, c_spec);
    sub_spec->callback([&] {
        auto f = parse_poly(poly);
        PolyProfile prof(f, static_cast<unsigned>(need_u64(kappa, "--kappa")),
                         static_cast<unsigned>(need_u64(k_param, "--k")));
        uint64_t xx = need_u64(x, "--x");
        std::vector<double> grid;
        std::string tok;
        for (char ch : delta_grid + ",") {
            if (ch == ',') {
                if (!tok.empty()) grid.push_back(std::stod(tok));
                tok.clear();
            } else {
                tok += ch;
            }
        }
        SmoothFilter fil = filter == "primes"   ? SmoothFilter::Primes
                           : filter == "lambda" ? SmoothFilter::Lambda
                                                : SmoothFilter::All;
        // table must cover x and the largest sieve bound over the grid
        mpz_class xi = max_abs_value(f, xx);
        mpz_class bnd;
        mpz_sqrt(bnd.get_mpz_t(), xi.get_mpz_t());
        auto table = make_table(std::max<uint64_t>(xx, bnd.get_ui() + 1));
        auto rep = delta_spectrum(prof, xx, grid, fil, table, c_spec.threads);
        c_spec.out.emit(smooth_report_json(rep), smooth_report_csv(rep));
    });

    // ---- smooth-primes ----
    Common c_primes;
    auto* sub_primes = app.add_subcommand("smooth-primes",
                                          "Phi(f; x, y): smooth values at primes");
    add_poly(sub_primes);
    sub_primes->add_option("--x", x)->required();
    sub_primes->add_option("--y", y)->required();
    attach_common(sub_primes, c_primes);
    sub_primes->callback([&] {
        auto f = parse_poly(poly);
        uint64_t xx = need_u64(x, "--x");
        mpz_class xi = max_abs_value(f, xx);
        mpz_class bnd;
        mpz_sqrt(bnd.get_mpz_t(), xi.get_mpz_t());
        uint64_t need = std::min<uint64_t>(static_cast<uint64_t>(y),
                                           bnd.get_ui() + 1);
        auto table = make_table(std::max<uint64_t>(xx, need));
        auto rep = phi_primes(f, xx, y, table, c_primes.threads);
        json j;
        j["poly"] = f.to_string();
        j["x"] = xx;
        j["y"] = y;
        j["count"] = static_cast<uint64_t>(rep.rows[0].count);
        j["ratio"] = rep.rows[0].ratio;
        c_primes.out.emit(j, kv_csv(j));
    });

    // ---- lambda-weights ----
    Common c_weights;
    double beta = cfg_or<double>("beta", 2);
    auto* sub_weights = app.add_subcommand("lambda-weights",
                                           "Rosser-Iwaniec upper sieve weights");
    sub_weights->add_option("--z", z)->required();
    sub_weights->add_option("--D", D)->required();
    sub_weights->add_option("--beta", beta);
    sub_weights->add_flag("--exhaustive", exhaustive,
                          "verify the fundamental property over all of P(z)");
    attach_common(sub_weights, c_weights);
    sub_weights->callback([&] {
        auto table = make_table(static_cast<uint64_t>(z) + 1);
        auto w = lambda_rosser(z, D, beta, table);
        bool ok = fundamental_check(w, exhaustive);
        json j = weights_json(w, table);
        j["fundamental_ok"] = ok;
        c_weights.out.emit(j, weights_csv(w, table));
    });

    // ---- sieve-sums ----
    Common c_sums;
    auto* sub_sums = app.add_subcommand(
        "sieve-sums", "S(z) and the S_d decomposition with the lambda_d bound");
    add_poly(sub_sums);
    sub_sums->add_option("--x", x)->required();
    sub_sums->add_option("--z", z)->required();
    sub_sums->add_option("--D", D, "default z^2");
    sub_sums->add_option("--delta", delta)->required();
    sub_sums->add_option("--filter", filter)->check(CLI::IsMember({"all", "lambda"}));
    attach_common(sub_sums, c_sums);
    sub_sums->callback([&] {
        auto f = parse_poly(poly);
        uint64_t xx = need_u64(x, "--x");
        bool weighted = filter == "lambda";
        if (D <= 0) D = z * z;
        mpz_class xi = max_abs_value(f, xx);
        mpz_class bnd;
        mpz_sqrt(bnd.get_mpz_t(), xi.get_mpz_t());
        auto table = make_table(std::max<uint64_t>(xx, bnd.get_ui() + 1));
        auto w = lambda_rosser(z, D, 2, table);
        double direct = S_direct(f, xx, z, delta, weighted, table, c_sums.threads);
        json rows = json::array();
        std::string csv = "d,lambda,S_d,main_term\n";
        Kahan bound;
        for (auto& [dd, lam] : w.support) {
            auto sd = S_d(f, xx, dd, delta, weighted, table, c_sums.threads);
            bound.add(lam * sd.value);
            rows.push_back(json{{"d", dd},
                                {"lambda", lam},
                                {"S_d", sd.value},
                                {"main_term", sd.main_term}});
            csv += std::to_string(dd) + "," + std::to_string(lam) + "," +
                   f17(sd.value) + "," + f17(sd.main_term) + "\n";
        }
        json j;
        j["poly"] = f.to_string();
        j["x"] = xx;
        j["z"] = z;
        j["D"] = D;
        j["delta"] = delta;
        j["weighted"] = weighted;
        j["S_direct"] = direct;
        j["lambda_bound"] = bound.value();
        j["rows"] = rows;
        c_sums.out.emit(j, csv);
    });

    // ---- cancel-sum ----
    Common c_cancel;
    auto* sub_cancel = app.add_subcommand(
        "cancel-sum", "sum_d (lambda_d/d) sum_h sigma(dh)/h, exact, with the bound");
    add_poly(sub_cancel);
    sub_cancel->add_option("--z", z)->required();
    sub_cancel->add_option("--D", D)->required();
    sub_cancel->add_option("--L", L)->required();
    sub_cancel->add_option("--delta", delta)->required();
    sub_cancel->add_option("--filter", filter)->check(CLI::IsMember({"all", "lambda"}));
    attach_common(sub_cancel, c_cancel);
    sub_cancel->callback([&] {
        auto f = parse_poly(poly);
        bool weighted = filter == "lambda";
        uint64_t dh_max = static_cast<uint64_t>(D * std::pow(L, delta)) + 2;
        auto table = make_table(std::max<uint64_t>(static_cast<uint64_t>(z) + 1,
                                                   isqrt_u64(dh_max) + 2));
        auto r = cancel_double_sum(f, z, D, L, delta, weighted, table);
        json j;
        j["poly"] = f.to_string();
        j["z"] = z;
        j["D"] = D;
        j["L"] = L;
        j["delta"] = delta;
        j["weighted"] = weighted;
        j["lhs"] = rational_to_string(r.lhs);
        j["lhs_float"] = r.lhs.get_d();
        j["rhs_leading"] = r.rhs_leading;
        j["s"] = r.s;
        c_cancel.out.emit(j, kv_csv(j));
    });

    // ---- ap-error ----
    Common c_ap;
    auto* sub_ap = app.add_subcommand("ap-error",
                                      "E(x,q): worst progression error for psi(x;q,a)");
    sub_ap->add_option("--x", x)->required();
    sub_ap->add_option("--q", q)->required();
    add_poly(sub_ap);
    sub_ap->add_option("--M", M, "also report sum_{m<M} d(m) sigma(m) E(x,m)");
    attach_common(sub_ap, c_ap);
    sub_ap->callback([&] {
        auto table = make_table(static_cast<uint64_t>(x) + 1);
        auto e = prime_ap_error(x, need_u64(q, "--q"), table);
        json j;
        j["x"] = x;
        j["q"] = e.q;
        j["E"] = e.E;
        j["x_over_phi_q"] = e.x_over_phi;
        j["worst_residue"] = e.worst_a;
        if (M > 0) {
            if (poly.empty())
                throw std::invalid_argument("--M requires --poly for sigma(m)");
            j["weighted_error_sum"] = weighted_error_sum(
                parse_poly(poly), x, need_u64(M, "--M"), table, c_ap.threads);
        }
        c_ap.out.emit(j, kv_csv(j));
    });

    // ---- bv-sum ----
    Common c_bv;
    auto* sub_bv = app.add_subcommand("bv-sum", "E(x,q) tabulated for q <= Q");
    sub_bv->add_option("--x", x)->required();
    sub_bv->add_option("--Q", Q)->required();
    attach_common(sub_bv, c_bv);
    sub_bv->callback([&] {
        auto table = make_table(static_cast<uint64_t>(x) + 1);
        auto rep = bv_sum(x, need_u64(Q, "--Q"), table, c_bv.threads);
        c_bv.out.emit(error_report_json(rep), error_report_csv(rep));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 3;
    } catch (const PolyParseError& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 3;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: domain: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 2;
    }
    return 0;
}
