#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qbc/codestates.hpp"
#include "qbc/document.hpp"
#include "qbc/errors.hpp"
#include "qbc/mayers.hpp"
#include "qbc/phasespace.hpp"
#include "qbc/protocol.hpp"
#include "qbc/security.hpp"
#include "qbc/transport.hpp"

namespace qbc::cli {

namespace {

struct Config {
    std::optional<double> energy;
    std::optional<double> amplitude;
    int M = 8;
    long long k = 1;
    double epsilon = 1e-2;
    double tau = 1.0;
    std::uint64_t seed = default_seed;
    std::string out;
    std::string format = "text";

    double E() const {
        if (amplitude) return *amplitude * *amplitude;
        return energy.value_or(1.0);
    }
    double t() const {
        if (amplitude) return *amplitude;
        return std::sqrt(energy.value_or(1.0));
    }
    protocol::ProtocolParams params() const {
        if (k > INT32_MAX) throw ParameterError("k too large for a simulated run");
        protocol::ProtocolParams p{E(), M, static_cast<int>(k), epsilon, tau};
        p.validate();
        return p;
    }
};

void add_energy(CLI::App* sub, Config& c) {
    auto* e = sub->add_option("-E,--energy", c.energy, "Received mean photon number per mode (default 1)");
    auto* t = sub->add_option("-t,--amplitude", c.amplitude, "Field amplitude t = sqrt(E)");
    e->excludes(t);
    t->excludes(e);
}

void add_output(CLI::App* sub, Config& c) {
    sub->add_option("--out", c.out, "Write the result here instead of stdout");
    sub->add_option("--format", c.format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
}

void add_seed(CLI::App* sub, Config& c) {
    sub->add_option("--seed", c.seed, "Random seed (default " + std::to_string(default_seed) + ")");
}

class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw ParameterError("cannot open output file '" + path + "'");
        }
        os_ = file_ ? file_.get() : &fallback;
    }
    std::ostream& operator*() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

void emit(const Document& doc, const Config& c, std::ostream& out) {
    Sink sink(c.out, out);
    if (c.format == "structured")
        *sink << to_json_pretty(doc) << '\n';
    else
        *sink << to_text(doc);
}

Document params_doc(const protocol::ProtocolParams& p) {
    return {{"E", p.E}, {"M", p.M}, {"k", p.k}, {"epsilon", p.epsilon}, {"tau", p.tau}};
}

struct Interval {
    double lo, hi;
};

Interval wilson95(long long hits, long long n) {
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

Document rate_doc(long long hits, long long n, double predicted) {
    const double rate = static_cast<double>(hits) / static_cast<double>(n);
    const auto ci = wilson95(hits, n);
    const double sigma = std::sqrt(predicted * (1.0 - predicted) / static_cast<double>(n));
    return {{"count", hits},
            {"rate", rate},
            {"ci95_lo", ci.lo},
            {"ci95_hi", ci.hi},
            {"predicted", predicted},
            {"sigma", sigma},
            {"within_3sigma", std::abs(rate - predicted) <= 3.0 * sigma + 1e-15}};
}

std::unique_ptr<protocol::AliceStrategy> make_alice(const std::string& name, std::optional<int> bit) {
    if (name == "honest") return std::make_unique<protocol::HonestAlice>(bit);
    return std::make_unique<protocol::OpeningAttackAlice>(bit);
}

std::unique_ptr<protocol::BobStrategy> make_bob(const std::string& name) {
    if (name == "helstrom") return std::make_unique<protocol::HelstromBob>();
    return std::make_unique<protocol::HonestBob>();
}

// ---------------------------------------------------------------- commands

struct SimulateArgs {
    long long sessions = 1000;
    std::optional<int> bit;
    std::string strategy = "honest";
    std::string bob = "honest";
    std::string transport = "loopback";
    std::string transcript;
};

int cmd_simulate(const Config& c, const SimulateArgs& a, std::ostream& out) {
    const auto params = c.params();
    if (a.sessions < 1) throw ParameterError("-n must be >= 1");
    const bool adversarial = a.bob == "helstrom";
    if (adversarial && params.k != 1) throw ParameterError("--bob helstrom needs -k 1");
    auto alice = make_alice(a.strategy, a.bit);
    auto bob = make_bob(a.bob);

    std::unique_ptr<Sink> transcript;
    if (!a.transcript.empty()) transcript = std::make_unique<Sink>(a.transcript, out);

    long long accepted = 0, guesses = 0, correct = 0, aborted = 0;
    for (long long i = 0; i < a.sessions; ++i) {
        const transport::SessionOptions opts{"sim-" + std::to_string(i), adversarial};
        const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
        const auto tr = a.transport == "stream" ? transport::run_session_stream(*alice, *bob, params, seed, opts)
                                                : transport::run_session(*alice, *bob, params, seed, opts);
        if (transcript) **transcript << transport::transcript_bytes(tr);
        if (tr.abort_reason) ++aborted;
        if (tr.accepted()) ++accepted;
        if (tr.bob_guess) {
            ++guesses;
            // The committed bit is the one an honest opening reveals; the
            // opening attack reveals its flip.
            const auto opened = tr.opened_bit();
            if (opened) {
                const int committed = a.strategy == "honest" ? *opened : 1 - *opened;
                if (*tr.bob_guess == committed) ++correct;
            }
        }
    }

    const double predicted = a.strategy == "honest" ? 1.0 : security::pca_exact(params.E, params.k, params.M);
    Document d;
    d["command"] = "simulate";
    d["params"] = params_doc(params);
    d["seed"] = c.seed;
    d["strategy"] = a.strategy;
    d["bob"] = a.bob;
    d["transport"] = a.transport;
    d["sessions"] = a.sessions;
    d["aborted"] = aborted;
    d["acceptance"] = rate_doc(accepted, a.sessions, predicted);
    if (adversarial) {
        Document g = rate_doc(correct, guesses, 0.5);
        g.erase("predicted");
        g.erase("sigma");
        g.erase("within_3sigma");
        const double bound = 0.5 + security::pcb_bound(std::sqrt(params.E), params.M, 1) / 2.0;
        const double sigma = std::sqrt(std::min(bound, 1.0) * (1.0 - std::min(bound, 1.0)) / guesses);
        g["bound"] = bound;
        g["below_bound_plus_3sigma"] = g["rate"].get<double>() <= bound + 3.0 * sigma;
        d["guessing"] = g;
    }
    emit(d, c, out);
    return Exit::ok;
}

struct BoundsArgs {
    bool require_feasible = false;
};

int cmd_bounds(const Config& c, const BoundsArgs& a, std::ostream& out) {
    if (c.k < 1) throw ParameterError("k must be >= 1");
    if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
    if (c.M < 2) throw ParameterError("M must be >= 2");
    const auto report = security::make_report(c.t(), c.M, c.k, c.epsilon);
    const auto check = security::epsilon_secure_check(c.t(), c.M, c.k, c.epsilon);
    const auto tb = security::trace_norm_bound(c.t(), c.M);
    Document d;
    d["command"] = "bounds";
    d["report"] = security::to_document(report);
    d["trace_norm_bound"] = {{"general", tb.general},
                             {"valid", tb.valid},
                             {"simplified_applies", tb.simplified_applies},
                             {"simplified", tb.simplified}};
    d["pca_approx"] = security::pca_approx(c.E(), c.k, c.M);
    d["check"] = {{"alice_value", check.alice_value},
                  {"bob_value", check.bob_value},
                  {"secure", check.secure()},
                  {"failed", check.failed()},
                  {"sufficient_alice_value", check.sufficient_alice_value},
                  {"sufficient_bob_value", check.sufficient_bob_value},
                  {"sufficient_holds", check.sufficient_holds()}};
    emit(d, c, out);
    if (!report.bound_ok) return Exit::check_failed;
    if (a.require_feasible && !report.feasible) return Exit::check_failed;
    return Exit::ok;
}

int cmd_plan(const Config& c, int scan_limit, std::ostream& out) {
    const double t = c.t();
    const auto choice = security::find_params(c.epsilon, t, scan_limit);
    const auto check = security::epsilon_secure_check(t, choice.M, choice.k, c.epsilon);
    Document d;
    d["command"] = "plan";
    d["epsilon"] = c.epsilon;
    d["t"] = t;
    d["M"] = choice.M;
    d["k"] = choice.k;
    d["window_lo"] = choice.window.lo;
    d["window_hi"] = choice.window.hi;
    d["cube_in_window"] = choice.cube_in_window;
    d["secure"] = check.secure();
    Document table = Document::array();
    for (int M = 2; M <= choice.M; ++M) {
        const auto w = security::k_window(c.epsilon, t, M);
        const long long cube = static_cast<long long>(M) * M * M;
        table.push_back({{"M", M}, {"lo", w.lo}, {"hi", w.hi}, {"empty", w.empty()}, {"cube_in_window", w.contains(cube)}});
    }
    d["table"] = table;
    emit(d, c, out);
    return check.secure() ? Exit::ok : Exit::check_failed;
}

int cmd_mayers(const Config& c, std::optional<std::size_t> cutoff, std::ostream& out) {
    auto params = code::CodeParams::with_working_cutoff(c.t(), c.M);
    if (cutoff) params.N = *cutoff;
    params.validate();
    const auto report = mayers::verify(mayers::build_kit(params));
    Document d;
    d["command"] = "mayers";
    d["report"] = mayers::to_document(report);
    emit(d, c, out);
    return report.passes() ? Exit::ok : Exit::check_failed;
}

struct WignerArgs {
    int bit = 0;
    std::size_t points = 101;
    std::optional<double> half_width;
};

int cmd_wigner(const Config& c, const WignerArgs& a, std::ostream& out) {
    if (a.bit != 0 && a.bit != 1) throw ParameterError("-b must be 0 or 1");
    if (c.M < 1) throw ParameterError("M must be positive");
    auto spec = phase::GridSpec::around(c.t(), a.points);
    if (a.half_width) spec = {-*a.half_width, *a.half_width, -*a.half_width, *a.half_width, a.points, a.points};
    const auto grid = phase::wigner_mixture(phase::code_state_points(c.t(), c.M, a.bit), spec);
    Sink sink(c.out, out);
    phase::write_csv(*sink, grid);
    return Exit::ok;
}

struct RootsArgs {
    int bit = 0;
    int r = 0;
    double radius = -1.0;
    bool coherent = false;
    std::optional<std::size_t> cutoff;
};

int cmd_roots(const Config& c, const RootsArgs& a, std::ostream& out) {
    auto params = code::CodeParams::with_working_cutoff(c.t(), c.M);
    if (a.cutoff) params.N = *a.cutoff;
    params.validate();
    if (a.r < 0 || a.r >= c.M) throw ParameterError("-r must lie in [0, M)");
    const auto v = a.coherent ? fock::coherent_vector(c.t(), params.N)
                              : code::eigen_sigma(a.bit, params).vectors[static_cast<std::size_t>(a.r)];
    Document d;
    d["command"] = "roots";
    d["state"] = a.coherent ? "coherent" : "phi_r_b";
    d["t"] = c.t();
    d["M"] = c.M;
    d["r"] = a.r;
    d["b"] = a.bit;
    d["cutoff"] = params.N;
    d["roots"] = phase::to_document(phase::stellar_roots(v, a.radius));
    emit(d, c, out);
    return Exit::ok;
}

struct SessionArgs {
    std::string listen, connect, role;
    std::string strategy = "honest";
    std::string bob = "honest";
    std::optional<int> bit;
    std::string session_id = "session";
};

int cmd_session(const Config& c, const SessionArgs& a, std::ostream& out, std::ostream& err) {
    const auto params = c.params();
    const transport::SessionOptions opts{a.session_id, a.bob == "helstrom"};
    if (!a.listen.empty() && !a.connect.empty()) throw ParameterError("--listen and --connect are exclusive");
    std::string role = a.role;
    if (role.empty()) role = !a.listen.empty() ? "bob" : "alice";

    std::unique_ptr<transport::ByteStream> stream;
    std::unique_ptr<transport::Listener> listener;
    if (!a.listen.empty()) {
        const auto [host, port] = transport::parse_endpoint(a.listen);
        listener = std::make_unique<transport::Listener>(host, port);
        err << "listening on " << host << ':' << listener->port() << std::endl;
        stream = listener->accept();
    } else if (!a.connect.empty()) {
        const auto [host, port] = transport::parse_endpoint(a.connect);
        stream = transport::connect_to(host, port);
    }

    if (!stream) {
        auto alice = make_alice(a.strategy, a.bit);
        auto bob = make_bob(a.bob);
        const auto tr = transport::run_session_stream(*alice, *bob, params, c.seed, opts);
        Sink sink(c.out, out);
        *sink << transport::transcript_bytes(tr);
        return Exit::ok;
    }
    if (role == "alice") {
        auto alice = make_alice(a.strategy, a.bit);
        const auto tr = transport::run_alice_endpoint(*stream, *alice, params, c.seed, opts);
        Sink sink(c.out, out);
        *sink << transport::transcript_bytes(tr);
        return Exit::ok;
    }
    auto bob = make_bob(a.bob);
    const auto verdict = transport::run_bob_endpoint(*stream, *bob, params, c.seed, opts);
    Document d;
    d["command"] = "session";
    d["role"] = "bob";
    d["session_id"] = a.session_id;
    d["completed"] = verdict.has_value();
    if (verdict) {
        d["accepted"] = verdict->accepted;
        d["counts"] = verdict->counts;
    }
    emit(d, c, out);
    return Exit::ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phase-encoded coherent-state bit commitment: simulation, bounds and attack analysis", "qbc"};
    app.require_subcommand(1);

    Config cfg;
    const std::vector<std::string> alice_names{"honest", "cheat-open"};
    const std::vector<std::string> bob_names{"honest", "helstrom"};

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run n seeded sessions and report acceptance statistics");
    add_energy(simulate, cfg);
    simulate->add_option("-M", cfg.M, "Phase modulation order")->capture_default_str();
    simulate->add_option("-k", cfg.k, "Modes per commitment")->capture_default_str();
    simulate->add_option("--tau", cfg.tau, "Link transmittivity in (0, 1]")->capture_default_str();
    simulate->add_option("--epsilon", cfg.epsilon, "Security target carried in HELLO")->capture_default_str();
    simulate->add_option("-n,--sessions", sim.sessions, "Number of sessions")->capture_default_str();
    simulate->add_option("-b,--bit", sim.bit, "Committed bit (random per session when omitted)")
        ->check(CLI::Range(0, 1));
    simulate->add_option("--strategy", sim.strategy, "Alice: honest or cheat-open")
        ->check(CLI::IsMember(alice_names))
        ->capture_default_str();
    simulate->add_option("--bob", sim.bob, "Bob: honest, or helstrom (adversarial link, k = 1)")
        ->check(CLI::IsMember(bob_names))
        ->capture_default_str();
    simulate->add_option("--transport", sim.transport, "loopback or stream")
        ->check(CLI::IsMember({"loopback", "stream"}))
        ->capture_default_str();
    simulate->add_option("--transcript", sim.transcript, "Dump every session transcript to this file");
    add_seed(simulate, cfg);
    add_output(simulate, cfg);

    BoundsArgs bnd;
    auto* bounds = app.add_subcommand("bounds", "Security bounds and numeric trace-norm check for (t, M, k)");
    add_energy(bounds, cfg);
    bounds->add_option("-M", cfg.M, "Phase modulation order")->capture_default_str();
    bounds->add_option("-k", cfg.k, "Modes per commitment")->capture_default_str();
    bounds->add_option("--epsilon", cfg.epsilon, "Security target")->capture_default_str();
    bounds->add_flag("--require-feasible", bnd.require_feasible, "Exit 1 unless max(p_CA, p_CB) <= epsilon");
    add_output(bounds, cfg);

    int scan_limit = security::default_scan_limit;
    auto* plan = app.add_subcommand("plan", "Smallest (M, k) meeting epsilon-security");
    add_energy(plan, cfg);
    plan->add_option("--epsilon", cfg.epsilon, "Security target")->capture_default_str();
    plan->add_option("--scan-limit", scan_limit, "Largest M to try")->capture_default_str();
    add_output(plan, cfg);

    std::optional<std::size_t> mayers_cutoff;
    auto* mayers = app.add_subcommand("mayers", "Build and verify the delayed-choice attack");
    add_energy(mayers, cfg);
    mayers->add_option("-M", cfg.M, "Phase modulation order")->capture_default_str();
    mayers->add_option("--cutoff", mayers_cutoff, "Fock cutoff (default: working cutoff for E)");
    add_output(mayers, cfg);

    WignerArgs wig;
    auto* wigner = app.add_subcommand("wigner", "Wigner grid of sigma_b as CSV");
    add_energy(wigner, cfg);
    wigner->add_option("-M", cfg.M, "Phase modulation order")->capture_default_str();
    wigner->add_option("-b,--bit", wig.bit, "Bit")->check(CLI::Range(0, 1))->capture_default_str();
    wigner->add_option("--points", wig.points, "Grid points per axis")->capture_default_str();
    wigner->add_option("--half-width", wig.half_width, "Window half-width (default t + 4)");
    wigner->add_option("--out", cfg.out, "Write the CSV here instead of stdout");

    RootsArgs rts;
    auto* roots = app.add_subcommand("roots", "Stellar roots of phi_{r,b} or of a truncated coherent state");
    add_energy(roots, cfg);
    roots->add_option("-M", cfg.M, "Phase modulation order")->capture_default_str();
    roots->add_option("-r", rts.r, "Residue class")->capture_default_str();
    roots->add_option("-b,--bit", rts.bit, "Bit")->check(CLI::Range(0, 1))->capture_default_str();
    roots->add_option("--radius", rts.radius, "Report roots with |z| <= radius (default sqrt(N))");
    roots->add_option("--cutoff", rts.cutoff, "Fock cutoff (default: working cutoff for E)");
    roots->add_flag("--coherent", rts.coherent, "Use the truncated coherent state |t> instead");
    add_output(roots, cfg);

    SessionArgs ses;
    auto* session = app.add_subcommand("session", "One session over TCP, either end or both");
    add_energy(session, cfg);
    session->add_option("-M", cfg.M, "Phase modulation order")->capture_default_str();
    session->add_option("-k", cfg.k, "Modes per commitment")->capture_default_str();
    session->add_option("--tau", cfg.tau, "Link transmittivity in (0, 1]")->capture_default_str();
    session->add_option("--epsilon", cfg.epsilon, "Security target carried in HELLO")->capture_default_str();
    auto* listen = session->add_option("--listen", ses.listen, "Accept one connection on host:port");
    auto* connect = session->add_option("--connect", ses.connect, "Connect to host:port");
    listen->excludes(connect);
    connect->excludes(listen);
    session->add_option("--role", ses.role, "alice or bob (default: bob when listening, else alice)")
        ->check(CLI::IsMember({"alice", "bob"}));
    session->add_option("--strategy", ses.strategy, "Alice: honest or cheat-open")
        ->check(CLI::IsMember(alice_names))
        ->capture_default_str();
    session->add_option("--bob", ses.bob, "Bob: honest or helstrom")
        ->check(CLI::IsMember(bob_names))
        ->capture_default_str();
    session->add_option("-b,--bit", ses.bit, "Committed bit (random when omitted)")->check(CLI::Range(0, 1));
    session->add_option("--session-id", ses.session_id, "Session identifier")->capture_default_str();
    add_seed(session, cfg);
    add_output(session, cfg);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return Exit::usage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(cfg, sim, out);
        if (bounds->parsed()) return cmd_bounds(cfg, bnd, out);
        if (plan->parsed()) return cmd_plan(cfg, scan_limit, out);
        if (mayers->parsed()) return cmd_mayers(cfg, mayers_cutoff, out);
        if (wigner->parsed()) return cmd_wigner(cfg, wig, out);
        if (roots->parsed()) return cmd_roots(cfg, rts, out);
        if (session->parsed()) return cmd_session(cfg, ses, out, err);
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return Exit::usage;
    } catch (const SearchExhausted& e) {
        err << "error: " << e.what() << '\n';
        return Exit::check_failed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Exit::check_failed;
    }
    return Exit::usage;
}

}  // namespace qbc::cli
