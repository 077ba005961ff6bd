#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "smoothval/multsum.hpp"
#include "smoothval/sieve.hpp"
#include "smoothval/smooth.hpp"
#include "smoothval/util.hpp"

namespace smoothval {

// Floats serialize with 17 significant digits so fixtures are lossless.
inline std::string f17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

using json = nlohmann::json;

inline json smooth_row_json(const SmoothRow& r) {
    return json{{"delta", r.delta},       {"y", r.y},
                {"count", r.count},       {"weight_sum", r.weight_sum},
                {"baseline", r.baseline}, {"ratio", r.ratio},
                {"tag", r.tag}};
}

inline json smooth_report_json(const SmoothReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows) rows.push_back(smooth_row_json(r));
    json out{{"poly", rep.poly}, {"x", rep.x}, {"filter", rep.filter},
             {"rows", rows}};
    if (rep.L > 0) out["L"] = rep.L;
    return out;
}

inline std::string smooth_report_csv(const SmoothReport& rep) {
    std::string s = "delta,y,count,weight_sum,baseline,ratio\n";
    for (const auto& r : rep.rows) {
        s += f17(r.delta) + "," + f17(r.y) + "," + f17(r.count) + "," +
             f17(r.weight_sum) + "," + f17(r.baseline) + "," + f17(r.ratio) + "\n";
    }
    return s;
}

inline json error_report_json(const ErrorTermReport& rep) {
    json rows = json::array();
    for (const auto& e : rep.entries)
        rows.push_back(json{{"q", e.q},
                            {"E", e.E},
                            {"x_over_phi_q", e.x_over_phi},
                            {"worst_residue", e.worst_a}});
    return json{{"x", rep.x}, {"entries", rows}};
}

inline std::string error_report_csv(const ErrorTermReport& rep) {
    std::string s = "q,E,x_over_phi_q,worst_residue\n";
    for (const auto& e : rep.entries)
        s += std::to_string(e.q) + "," + f17(e.E) + "," + f17(e.x_over_phi) + "," +
             std::to_string(e.worst_a) + "\n";
    return s;
}

inline json weights_json(const SieveWeights& w, const PrimeTable& table) {
    json rows = json::array();
    for (auto& [d, lam] : w.support) {
        json pf = json::array();
        for (auto& [p, e] : factor_u64(d, table)) {
            (void)e;
            pf.push_back(p);
        }
        rows.push_back(json{{"d", d}, {"lambda", lam}, {"primes", pf}});
    }
    return json{{"z", w.z}, {"D", w.D}, {"beta", w.beta}, {"support", rows}};
}

inline std::string weights_csv(const SieveWeights& w, const PrimeTable& table) {
    std::string s = "d,lambda,primes\n";
    for (auto& [d, lam] : w.support) {
        std::string pf;
        for (auto& [p, e] : factor_u64(d, table)) {
            (void)e;
            if (!pf.empty()) pf += " ";
            pf += std::to_string(p);
        }
        s += std::to_string(d) + "," + std::to_string(lam) + "," + pf + "\n";
    }
    return s;
}

}  // namespace smoothval
