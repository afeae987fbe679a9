// Runs every primary acceptance check and prints one PASS/FAIL line each.
// Exit status is the number of failed checks.

#include "cds/attack.hpp"
#include "cds/http_server.hpp"
#include "cds/scheme.hpp"
#include "cds/service.hpp"
#include "cds/stats.hpp"
#include "cds/study.hpp"
#include "client.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

using namespace cds;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(const std::string& name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = check();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += out.pass ? 0 : 1;
    std::printf("%s  %-28s %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
}

std::vector<ImageId> ids(std::size_t n) {
    std::vector<ImageId> out;
    for (std::uint32_t i = 0; i < n; ++i) out.push_back(ImageId{i});
    return out;
}

Password random_password(Rng& rng, std::size_t universe, std::size_t n) {
    auto pool = ids(universe);
    for (std::size_t i = 0; i < n; ++i) {
        std::swap(pool[i], pool[i + uniform_below(rng, universe - i)]);
    }
    pool.resize(n);
    return Password{pool};
}

Outcome formula() {
    const auto L = max_trace_length(GridSpec(4, 6), 5);
    return {L == 60, "L(4x6, n=5) = " + std::to_string(L)};
}

Outcome length_nineteen() {
    const scenario::LengthNineteen s;
    const Decision ok = verify_trace(s.challenge(), s.password(), CellTrace{s.walk});
    const Decision bypass = verify_trace(s.challenge(), s.password(), CellTrace{s.bypass});
    const bool pass = trace_length(CellTrace{s.walk}) == 19 && ok == Decision::accept() &&
                      bypass == Decision::reject(Reason::OrderViolation);
    return {pass, "length-19 trace " + std::string(ok.accepted ? "accepted" : "rejected") + ", bypass " +
                      std::string(to_string(bypass.reason))};
}

Outcome feasibility() {
    Rng rng(20240601);
    int ok = 0;
    const int total = 1000;
    for (int i = 0; i < total; ++i) {
        const GridSpec g(3 + static_cast<int>(uniform_below(rng, 4)), 3 + static_cast<int>(uniform_below(rng, 6)));
        const std::size_t n = 1 + uniform_below(rng, 6);
        const Password pw = random_password(rng, g.cell_count(), n);
        const Challenge ch = generate_challenge(pw, ids(g.cell_count()), g, {}, rng());
        const CellTrace t = synthesize_trace(ch, pw);
        const std::size_t bound = 1 + (n + 1) * static_cast<std::size_t>(g.cols() + g.rows() - 2);
        ok += verify_trace(ch, pw, t).accepted && trace_length(t) <= bound && bound <= ch.max_len ? 1 : 0;
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " instances accepted within bound"};
}

Outcome oracle_equivalence() {
    const auto enumerated = enumerate_passwords(6, 2).size();
    const bool space_ok = password_space(6, 2) == 30 && enumerated == 30;

    const GridSpec g(3, 2);
    Rng rng(777);
    int agree = 0;
    const int total = 10000;
    for (int i = 0; i < total; ++i) {
        const std::size_t n = 1 + uniform_below(rng, 3);
        const Password pw = random_password(rng, 6, n);
        Challenge ch = generate_challenge(pw, ids(6), g, {}, rng());
        if (uniform_below(rng, 4) == 0) ch.max_len = 1 + uniform_below(rng, 12);
        std::vector<Cell> cells{uniform_below(rng, 2) ? ch.head_cell : uniform_below(rng, 6)};
        const auto len = 1 + uniform_below(rng, 16);
        while (cells.size() < len) {
            const auto roll = uniform_below(rng, 30);
            if (roll == 0) {
                cells.push_back(uniform_below(rng, 6));
            } else {
                std::vector<Cell> nbrs;
                for (Cell c = 0; c < 6; ++c) {
                    if (g.adjacent8(cells.back(), c)) nbrs.push_back(c);
                }
                cells.push_back(nbrs[uniform_below(rng, nbrs.size())]);
            }
        }
        if (uniform_below(rng, 2) && g.adjacent8(cells.back(), ch.tail_cell)) cells.push_back(ch.tail_cell);
        const Decision d = verify_trace(ch, pw, CellTrace{cells});
        const Reason expected = oracle::brute_verify(ch, pw, cells);
        agree += d.reason == expected && d.accepted == (expected == Reason::Ok) ? 1 : 0;
    }
    return {space_ok && agree == total, "space(6,2)=" + std::to_string(password_space(6, 2)) + ", enumerated " +
                                            std::to_string(enumerated) + "; verify agreed on " + std::to_string(agree) +
                                            "/" + std::to_string(total)};
}

Outcome guess_resistance() {
    const SchemeConfig cfg{GridSpec(3, 2), 2, {}};
    const auto r = simulate_guess_attack(cfg, 30000, 424242);
    const double p = 1.0 / 30.0;
    const double bound = 3 * std::sqrt(p * (1 - p) / 30000);
    char buf[256];
    std::snprintf(buf, sizeof buf, "guess rate %.5f vs 1/30 = %.5f (3 sigma %.5f); trace-accept rate %.5f (info)",
                  r.password_match.rate(), p, bound, r.trace_accept.rate());
    return {r.password_match.within_3sigma_of(p), buf};
}

Outcome shoulder_surf() {
    const SchemeConfig cfg{GridSpec(4, 6), 5, {}};
    ShoulderSurfParams params;
    params.sessions = 3;
    params.retention = 1.0;
    params.trials = 50;
    const auto report = shoulder_surf_experiment(cfg, params, 31337);
    std::size_t truth = 0, monotone_violations = 0;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        truth += report.rows[i].contains_truth ? 1 : 0;
        if (report.rows[i].observations > 1 && report.rows[i].candidates > report.rows[i - 1].candidates) {
            ++monotone_violations;
        }
    }

    const scenario::LengthNineteen s;
    const Observation obs = observe_session(s.challenge(), CellTrace{s.walk}, 1.0, 1);
    const auto tracked = intersect_candidates(std::span(&obs, 1), 5).size();
    const auto brute = oracle::brute_candidates(24, 5, {obs.image_sequence}, {obs.head_image, obs.tail_image}).size();

    std::ostringstream detail;
    detail << "truth present " << truth << "/" << report.rows.size() << ", monotone violations "
           << monotone_violations << ", medians k=1..3:";
    for (const auto& row : report.summary) detail << " " << row.median;
    detail << "; 19-crossing observation " << tracked << " candidates (brute force " << brute << ", C(17,5)="
           << oracle::binomial(17, 5) << ")";
    const bool pass = truth == report.rows.size() && monotone_violations == 0 && tracked == 6188 && brute == 6188;
    return {pass, detail.str()};
}

Outcome statistics() {
    const std::vector<double> a{2, 4, 6}, b{1, 2, 3};
    const double t = stats::t_test_two_tailed(a, b).statistic;
    const std::vector<std::vector<double>> g{{1, 2, 3}, {4, 5, 6}};
    const double f = stats::anova_f_one_tailed(g).statistic;

    Rng rng(99);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(2 + uniform_below(rng, 15)), y(2 + uniform_below(rng, 15));
        for (auto& v : x) v = 20 * uniform_unit(rng);
        for (auto& v : y) v = 5 + 20 * uniform_unit(rng);
        const double ti = stats::t_test_two_tailed(x, y).statistic;
        const std::vector<std::vector<double>> groups{x, y};
        const double fi = stats::anova_f_one_tailed(groups).statistic;
        worst = std::max(worst, std::abs(fi - ti * ti) / std::max(1.0, ti * ti));
    }

    const auto records = study::synthesize_sessions(
        {{"CDS", 20, 10, 18.0, 10.0, 5.97, 0.965}, {"DAS", 20, 10, 9.2, 9.2, 4.26, 0.982}}, 2011);
    const auto report = study::analyze_sessions(records);
    std::ostringstream table;
    study::write_report(table, report);
    const bool table_ok = report.groups.size() == 2 && report.between_groups &&
                          table.str().find("Avg.") != std::string::npos;

    char buf[256];
    std::snprintf(buf, sizeof buf, "t=%.6f, F=%.12f, max |F - t^2| rel %.2e over 100 pairs, synthetic t=%.3f p=%.2e",
                  t, f, worst, report.between_groups ? report.between_groups->statistic : NAN,
                  report.between_groups ? report.between_groups->p_value : NAN);
    const bool pass = std::abs(t - 1.549) <= 1e-3 && std::abs(f - 13.5) <= 1e-9 && worst <= 1e-9 && table_ok;
    return {pass, buf};
}

Outcome service_protocol() {
    ServiceConfig cfg;
    cfg.ttl = std::chrono::seconds(1);
    cfg.image_dims = Dims{48, 36};
    auto service = AuthService::open(cfg);
    HttpServer server(*service);
    const int port = server.bind("127.0.0.1", 0);
    std::thread thread([&] { server.run(); });
    for (int i = 0; i < 200 && !server.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));

    std::vector<std::string> steps;
    bool ok = true;
    auto expect = [&](const std::string& what, bool cond) {
        steps.push_back(what + (cond ? " ok" : " FAILED"));
        ok = ok && cond;
    };
    try {
        httplib::Client c("127.0.0.1", port);
        auto post = [&](const std::string& path, const json& body) {
            auto res = c.Post(path, body.dump(), "application/json");
            if (!res) throw std::runtime_error("no response from " + path);
            return std::pair<int, json>{res->status, json::parse(res->body)};
        };
        const json catalog = json::parse(c.Get("/api/catalog")->body);
        std::vector<std::string> keys;
        for (int i : {1, 6, 11, 16, 21}) keys.push_back(catalog["images"][i]["id"]);

        auto [s1, enrolled] = post("/api/enroll", {{"user", "alice"}, {"image_ids", keys}});
        expect("enroll", s1 == 201 && enrolled["state"] == "pending_confirmation");
        const json confirm = enrolled["challenge"];
        auto [s2, v1] = post("/api/verify", {{"user", "alice"},
                                             {"nonce", confirm["nonce"]},
                                             {"polyline", client::correct_stroke(confirm, keys)}});
        expect("confirm", s2 == 200 && v1["result"] == "accept");
        expect("activate", service->find_user("alice")->state == UserState::Active);

        auto [s3, ch] = post("/api/challenge", {{"user", "alice"}});
        bool leak = false;
        for (const auto& [field, value] : ch.items()) {
            leak = leak || field.find("pass") != std::string::npos;
        }
        expect("payload", s3 == 200 && !leak && ch.size() == 7);
        const json stroke = client::correct_stroke(ch, keys);
        auto [s4, v2] = post("/api/verify", {{"user", "alice"}, {"nonce", ch["nonce"]}, {"polyline", stroke}});
        expect("login", s4 == 200 && v2["result"] == "accept");
        auto [s5, v3] = post("/api/verify", {{"user", "alice"}, {"nonce", ch["nonce"]}, {"polyline", stroke}});
        expect("replay", s5 == 409 && v3["error"] == "ConsumedNonce");

        auto [s6, late] = post("/api/challenge", {{"user", "alice"}});
        std::this_thread::sleep_for(std::chrono::milliseconds(1200));
        auto [s7, v4] = post("/api/verify", {{"user", "alice"},
                                             {"nonce", late["nonce"]},
                                             {"polyline", client::correct_stroke(late, keys)}});
        expect("expiry", s6 == 200 && s7 == 410 && v4["error"] == "ExpiredNonce");
    } catch (const std::exception& e) {
        expect(std::string("exception ") + e.what(), false);
    }
    server.stop();
    thread.join();

    std::string detail;
    for (const auto& s : steps) detail += (detail.empty() ? "" : ", ") + s;
    return {ok, detail};
}

}  // namespace

int main() {
    run("formula-fidelity", formula);
    run("fig1-length-19", length_nineteen);
    run("feasibility", feasibility);
    run("oracle-equivalence", oracle_equivalence);
    run("guess-resistance", guess_resistance);
    run("shoulder-surf", shoulder_surf);
    run("statistics-engine", statistics);
    run("service-protocol", service_protocol);
    std::printf("%d failed\n", failures);
    return failures;
}
