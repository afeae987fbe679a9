#include "cds/attack.hpp"
#include "cds/config.hpp"
#include "cds/error.hpp"
#include "cds/http_server.hpp"
#include "cds/image.hpp"
#include "cds/service.hpp"
#include "cds/study.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

cds::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) {
        g_server->stop();
    }
}

int serve(const std::string& config_path) {
    const cds::ServiceConfig cfg = config_path.empty() ? cds::ServiceConfig{} : cds::load_config(config_path);
    auto service = cds::AuthService::open(cfg);
    cds::HttpServer server(*service);
    const auto [host, port] = cds::split_listen_addr(cfg.listen_addr);
    const int bound = server.bind(host, port);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on " << host << ":" << bound << "\n";
    server.run();
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CDS graphical password toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP authentication service");
    serve_cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

    auto* sim = app.add_subcommand("simulate", "Attack experiments");
    sim->require_subcommand(1);

    int cols = 4, rows = 6;
    std::size_t length = 5;
    std::uint64_t seed = 1;
    std::uint64_t trials = 1000;
    bool force_truth = false;
    auto* guess = sim->add_subcommand("guess", "Random-guess success rate");
    guess->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
    guess->add_option("--cols", cols, "grid columns");
    guess->add_option("--rows", rows, "grid rows");
    guess->add_option("--length", length, "password length");
    guess->add_option("--seed", seed, "rng seed");
    guess->add_flag("--force-truth", force_truth, "attacker always guesses the true password");

    cds::ShoulderSurfParams ss;
    std::string table_path;
    auto* shoulder = sim->add_subcommand("shoulder", "Shoulder-surfing candidate-set sizes");
    shoulder->add_option("--sessions", ss.sessions, "observed sessions per trial")->check(CLI::PositiveNumber);
    shoulder->add_option("--retention", ss.retention, "probability an interior crossing is seen")
        ->check(CLI::Range(0.0, 1.0));
    shoulder->add_option("--trials", ss.trials, "number of trials")->check(CLI::PositiveNumber);
    shoulder->add_option("--jitter", ss.jitter_budget, "detour budget added to each trace");
    shoulder->add_option("--guard", ss.guard, "maximum candidate-set size");
    shoulder->add_option("--cols", cols, "grid columns");
    shoulder->add_option("--rows", rows, "grid rows");
    shoulder->add_option("--length", length, "password length");
    shoulder->add_option("--seed", seed, "rng seed");
    shoulder->add_option("--table", table_path, "write the per-trial table here");

    std::uint64_t images = 24, pw_len = 5;
    auto* entropy = app.add_subcommand("entropy", "Password space and entropy");
    entropy->add_option("--images", images, "catalog size N")->required();
    entropy->add_option("--length", pw_len, "password length n")->required();

    std::string log_path;
    auto* analyze = app.add_subcommand("analyze", "Summarize a session log");
    analyze->add_option("--log", log_path, "session log")->required()->check(CLI::ExistingFile);

    std::size_t count = 24;
    std::string out_dir;
    int width = 160, height = 120;
    auto* synth = app.add_subcommand("synth-images", "Write a procedural image catalog");
    synth->add_option("--count", count, "number of images")->check(CLI::PositiveNumber);
    synth->add_option("--out", out_dir, "output directory")->required();
    synth->add_option("--seed", seed, "rng seed");
    synth->add_option("--width", width, "image width");
    synth->add_option("--height", height, "image height");

    std::string log_out;
    int users = 20, per_user = 10;
    auto* synth_log = app.add_subcommand("synth-log", "Write a synthetic two-scheme session log");
    synth_log->add_option("--out", log_out, "log file")->required();
    synth_log->add_option("--users", users, "participants per scheme")->check(CLI::PositiveNumber);
    synth_log->add_option("--trials", per_user, "logins per participant")->check(CLI::Range(2, 1000));
    synth_log->add_option("--seed", seed, "rng seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) {
            return serve(config_path);
        }
        if (*guess) {
            const cds::SchemeConfig cfg{cds::GridSpec(cols, rows), length, {}};
            const auto r = cds::simulate_guess_attack(cfg, trials, seed,
                                                      force_truth ? cds::GuessMode::ForceTruth : cds::GuessMode::Uniform);
            const double space = static_cast<double>(cds::password_space(cfg.grid.cell_count(), length));
            std::printf("trials %llu\n", static_cast<unsigned long long>(trials));
            std::printf("password_match %.6f [%.6f, %.6f]\n", r.password_match.rate(), r.password_match.lower_3sigma(),
                        r.password_match.upper_3sigma());
            std::printf("trace_accept %.6f [%.6f, %.6f]\n", r.trace_accept.rate(), r.trace_accept.lower_3sigma(),
                        r.trace_accept.upper_3sigma());
            std::printf("expected %.6f\n", 1.0 / space);
            return 0;
        }
        if (*shoulder) {
            const cds::SchemeConfig cfg{cds::GridSpec(cols, rows), length, {}};
            const auto report = cds::shoulder_surf_experiment(cfg, ss, seed);
            if (!table_path.empty()) {
                std::ofstream table(table_path);
                cds::write_table(table, report);
            }
            cds::write_summary(std::cout, report);
            return 0;
        }
        if (*entropy) {
            std::printf("space %llu\nbits %.6f\n",
                        static_cast<unsigned long long>(cds::password_space(images, pw_len)),
                        cds::entropy_bits(images, pw_len));
            return 0;
        }
        if (*analyze) {
            cds::study::write_report(std::cout, cds::study::analyze_sessions(cds::study::load_sessions(log_path)));
            return 0;
        }
        if (*synth) {
            const auto catalog = cds::synth_catalog(count, seed, cds::Dims{width, height});
            std::filesystem::create_directories(out_dir);
            for (auto id : catalog.ids()) {
                char name[32];
                std::snprintf(name, sizeof name, "img%03u.png", id.value);
                cds::write_png(std::filesystem::path(out_dir) / name, catalog.raster(id));
            }
            std::printf("wrote %zu images to %s\n", catalog.size(), out_dir.c_str());
            return 0;
        }
        if (*synth_log) {
            const auto records = cds::study::synthesize_sessions(
                {{"CDS", users, per_user, 18.0, 10.0, 5.97, 0.965}, {"DAS", users, per_user, 9.2, 9.2, 4.26, 0.982}},
                seed);
            std::filesystem::remove(log_out);
            for (const auto& r : records) {
                cds::study::append_session(log_out, r);
            }
            std::printf("wrote %zu records to %s\n", records.size(), log_out.c_str());
            return 0;
        }
    } catch (const cds::Error& e) {
        std::cerr << "error: " << cds::to_string(e.code()) << ": " << e.what() << "\n";
        return 2;
    }
    return 0;
}
