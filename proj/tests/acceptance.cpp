// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "qbc/codestates.hpp"
#include "qbc/mayers.hpp"
#include "qbc/phasespace.hpp"
#include "qbc/protocol.hpp"
#include "qbc/security.hpp"
#include "qbc/transport.hpp"

using namespace qbc;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

const std::vector<double> grid_t{0.5, 1.0, 2.0};
const std::vector<int> grid_M{6, 8, 12, 16, 24};

// ||rho - sigma_0||_1 from the coherent-mixture oracle.
double oracle_gap(double t, int M, std::size_t N) {
    std::vector<oracle::cd> pts;
    for (int m = 0; m < M; ++m) pts.push_back(std::polar(t, 2.0 * pi * m / M));
    Eigen::MatrixXcd diff = -oracle::coherent_mixture(pts, N);
    for (Eigen::Index n = 0; n < diff.rows(); ++n) diff(n, n) = 0.0;
    return oracle::trace_norm(diff);
}

Outcome bound_soundness() {
    Outcome o;
    int checked = 0;
    double worst_ratio = 0.0;
    for (double t : grid_t)
        for (int M : grid_M) {
            const auto b = security::trace_norm_bound(t, M);
            if (!b.valid) continue;
            ++checked;
            const auto c = security::numeric_trace_norm_check(t, M);
            const double ref = oracle_gap(t, M, c.cutoff);
            const std::string at = "t=" + fmt("%g", t) + " M=" + std::to_string(M);
            o.require(std::abs(c.numeric - ref) <= 1e-12, at + ": library and oracle norms differ");
            o.require(c.numeric <= b.general + 1e-10, at + ": exceeds 2(2et^2/M)^{M/2}");
            if (M > 4 * std::numbers::e * t * t + 1)
                o.require(c.numeric <= std::pow(2.0, -M / 2.0) + 1e-10, at + ": exceeds 2^{-M/2}");
            o.require(!c.truncation_warning, at + ": truncation tail too large");
            worst_ratio = std::max(worst_ratio, c.numeric / b.general);
        }
    o.require(checked >= 8, "too few valid grid points");
    if (o.pass) o.detail = std::to_string(checked) + " valid grid points, max numeric/bound " + fmt("%.3g", worst_ratio);
    return o;
}

Outcome honest_completeness() {
    Outcome o;
    const protocol::ProtocolParams p{1.0, 8, 4, 1e-2, 1.0};
    protocol::HonestAlice alice;
    protocol::HonestBob bob;
    int accepted = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) accepted += transport::run_session(alice, bob, p, 500000 + i).accepted();
    o.require(accepted == n, std::to_string(n - accepted) + " honest sessions rejected");
    if (o.pass) o.detail = std::to_string(n) + "/" + std::to_string(n) + " accepted";
    return o;
}

Outcome alice_attack_law() {
    Outcome o;
    struct Case {
        double E;
        int k, M;
    };
    for (const Case c : {Case{1.0, 10, 4}, Case{1.0, 50, 8}, Case{2.0, 20, 8}}) {
        const protocol::ProtocolParams p{c.E, c.M, c.k, 1e-2, 1.0};
        auto rng = fock::make_rng(8675309, static_cast<std::uint64_t>(c.M * 1000 + c.k));
        const int n = 100000;
        int accepted = 0;
        for (int i = 0; i < n; ++i) {
            const int b = static_cast<int>(rng() & 1U);
            auto [commitment, payload] = protocol::commit(b, p, rng);
            const auto received = protocol::transmit(payload, p.tau);
            accepted += protocol::bob_verify(received, protocol::cheat_open(commitment, 1 - b), p, rng).accepted;
        }
        const double s = std::sin(pi / (2.0 * c.M));
        const double law = std::exp(-4.0 * c.E * c.k * s * s);
        const double rate = static_cast<double>(accepted) / n;
        const double sigma = std::sqrt(law * (1.0 - law) / n);
        const std::string at = "(E,k,M)=(" + fmt("%g", c.E) + "," + std::to_string(c.k) + "," + std::to_string(c.M) + ")";
        o.require(std::abs(rate - law) <= 3.0 * sigma, at + ": rate " + fmt("%.5g", rate) + " vs " + fmt("%.5g", law));
        o.require(std::abs(security::pca_exact(c.E, c.k, c.M) - law) <= 1e-15 * law, at + ": pca_exact disagrees");
        if (!o.detail.empty() && o.pass) o.detail += ", ";
        if (o.pass) o.detail += at + " " + fmt("%.5g", rate) + "/" + fmt("%.5g", law);
    }
    return o;
}

Outcome optimality() {
    Outcome o;
    for (int M = 3; M <= 12; ++M) {
        const protocol::ProtocolParams p{1.0, M, 1, 1e-2, 1.0};
        const protocol::Commitment committed{0, {0}};
        std::vector<double> f(M);
        double best = 0.0;
        for (int d = 0; d < M; ++d) {
            f[d] = protocol::acceptance_probability(committed, protocol::Reveal{1, {d}}, p);
            // |<alpha|beta>|^2 = exp(-|alpha - beta|^2) between committed and revealed code states.
            const double overlap = std::exp(-std::norm(std::polar(1.0, 0.0) - std::polar(1.0, 2.0 * pi * (d + 0.5) / M)));
            o.require(std::abs(f[d] - overlap) <= 1e-14, "M=" + std::to_string(M) + ": overlap disagrees");
            best = std::max(best, f[d]);
        }
        std::vector<int> argmax;
        for (int d = 0; d < M; ++d)
            if (f[d] >= best - 1e-12) argmax.push_back(d);
        o.require(argmax == std::vector<int>{0, M - 1}, "M=" + std::to_string(M) + ": maximizers differ from {0, M-1}");
    }
    if (o.pass) o.detail = "maximizers {0, M-1} for M = 3..12";
    return o;
}

Outcome mayers_kit() {
    Outcome o;
    double worst_one_sided = 1.0;
    for (int M : {2, 3, 4, 6}) {
        const auto r = mayers::verify(mayers::build_kit(code::CodeParams::with_working_cutoff(1.0, M)));
        const std::string at = "M=" + std::to_string(M);
        o.require(r.marginal_residual / 2.0 <= 1e-8, at + ": marginals");
        o.require(r.completeness_residual <= 1e-8, at + ": completeness");
        for (int b : {0, 1}) {
            for (int m = 0; m < M; ++m) {
                o.require(std::abs(r.outcomes[b][m] - 1.0 / M) <= 1e-8, at + ": outcome law");
                o.require(r.conditional_fidelity[b][m] >= 1.0 - 1e-8, at + ": conditional fidelity");
            }
            o.require(r.map_is_bijection[b], at + ": m -> m' not bijective");
        }
        o.require(std::abs(r.fidelities.two_sided - 1.0) <= 1e-8, at + ": two-sided fidelity");
        worst_one_sided = std::min(worst_one_sided, r.fidelities.one_sided);
    }
    if (o.pass) o.detail = "M = 2,3,4,6; one-sided fidelity down to " + fmt("%.4f", worst_one_sided);
    return o;
}

Outcome planner() {
    Outcome o;
    const auto choice = security::find_params(1e-2, 1.0);
    const auto [M_ref, k_ref] = oracle::scan_t1(1e-2);
    o.require(choice.M == M_ref && choice.k == k_ref, "find_params disagrees with the independent scan");
    o.require(security::epsilon_secure_check(1.0, choice.M, choice.k, 1e-2).secure(), "choice is not secure");
    int implications = 0;
    for (int M = 2; M <= 64; ++M)
        for (long long k : {1LL, 100LL, 1843LL, 10000LL, 1000000LL})
            for (double eps : {0.3, 1e-2, 1e-4}) {
                const auto c = security::epsilon_secure_check(1.0, M, k, eps);
                if (c.sufficient_alice_ok) o.require(c.alice_ok, "sufficient alice does not imply general");
                if (c.sufficient_bob_ok) o.require(c.bob_ok, "sufficient bob does not imply general");
                implications += c.sufficient_alice_ok + c.sufficient_bob_ok;
            }
    if (o.pass)
        o.detail = "(M, k) = (" + std::to_string(choice.M) + ", " + std::to_string(choice.k) + "); " +
                   std::to_string(implications) + " implications checked";
    return o;
}

Outcome helstrom() {
    Outcome o;
    for (double t : grid_t)
        for (int M : grid_M) {
            const auto p = code::CodeParams::with_working_cutoff(t, M);
            const double gain = fock::helstrom_success(code::build_sigma(0, p), code::build_sigma(1, p)) - 0.5;
            o.require(gain <= security::pcb_bound(t, M, 1) / 2.0 + 1e-12,
                      "t=" + fmt("%g", t) + " M=" + std::to_string(M) + ": Helstrom gain above bound");
        }
    struct Case {
        double E;
        int M, n;
    };
    for (const Case c : {Case{1.0, 8, 100000}, Case{0.25, 6, 20000}}) {
        const protocol::ProtocolParams p{c.E, c.M, 1, 1e-2, 1.0};
        protocol::HonestAlice alice;
        protocol::HelstromBob bob;
        int right = 0;
        for (int i = 0; i < c.n; ++i) {
            const auto tr = transport::run_session(alice, bob, p, 900000 + i, {"adv", true});
            right += tr.bob_guess && tr.opened_bit() && *tr.bob_guess == *tr.opened_bit();
        }
        const double rate = static_cast<double>(right) / c.n;
        const double bound = 0.5 + security::pcb_bound(std::sqrt(c.E), c.M, 1) / 2.0;
        const double sigma = std::sqrt(0.25 / c.n);
        o.require(rate <= std::min(1.0, bound) + 3.0 * sigma, "M=" + std::to_string(c.M) + ": guess rate " +
                                                                  fmt("%.4f", rate) + " above bound " + fmt("%.4f", bound));
        if (o.pass) o.detail += (o.detail.empty() ? "" : ", ") + std::string("guess rate ") + fmt("%.4f", rate) +
                                " <= " + fmt("%.4f", bound) + " (M=" + std::to_string(c.M) + ")";
    }
    return o;
}

Outcome phase_space() {
    Outcome o;
    double gaps[2];
    int idx = 0;
    for (int M : {6, 32}) {
        phase::WignerGrid g[2];
        for (int b : {0, 1}) {
            g[b] = phase::wigner_mixture(phase::code_state_points(1.0, M, b), phase::GridSpec::around(1.0));
            o.require(std::abs(g[b].integral() - 1.0) <= 1e-4, "M=" + std::to_string(M) + ": integral");
            o.require(g[b].min() >= -1e-15, "M=" + std::to_string(M) + ": negative value");
        }
        gaps[idx++] = phase::max_gap(g[0], g[1]);
    }
    o.require(gaps[0] > gaps[1], "M=6 gap not above M=32 gap");
    const auto p = code::CodeParams::with_working_cutoff(1.0, 4);
    for (int b : {0, 1}) {
        const auto sys = code::eigen_sigma(b, p);
        for (int r = 0; r < 4; ++r) {
            const auto rep = phase::stellar_roots(sys.vectors[r].normalized());
            o.require(rep.zero_multiplicity == static_cast<std::size_t>(r),
                      "phi_{" + std::to_string(r) + "," + std::to_string(b) + "}: origin multiplicity");
        }
    }
    if (o.pass) o.detail = "gap M=6 " + fmt("%.3g", gaps[0]) + " > gap M=32 " + fmt("%.3g", gaps[1]) + "; origin multiplicities r";
    return o;
}

std::string cli_out(const std::vector<std::string>& args, int* code = nullptr) {
    std::ostringstream out, err;
    const int c = cli::run(args, out, err);
    if (code) *code = c;
    return out.str();
}

Outcome determinism() {
    Outcome o;
    const std::vector<std::vector<std::string>> commands{
        {"simulate", "-E", "1", "-M", "6", "-k", "3", "-n", "200", "--tau", "0.6"},
        {"simulate", "-E", "1", "-M", "4", "-k", "10", "-n", "200", "--strategy", "cheat-open", "--seed", "4"},
        {"simulate", "-E", "1", "-M", "8", "-k", "1", "-n", "200", "--bob", "helstrom", "--format", "structured"},
        {"bounds", "-t", "1", "-M", "8"},
        {"plan", "--epsilon", "1e-2", "-t", "1"},
        {"mayers", "-t", "1", "-M", "4"},
        {"wigner", "-t", "1", "-M", "6", "--points", "31"},
        {"roots", "-t", "1", "-M", "4", "-r", "3"},
        {"session", "-t", "1", "-M", "6", "-k", "2", "--seed", "9"},
    };
    for (const auto& args : commands) {
        int c1 = -1, c2 = -1;
        const auto a = cli_out(args, &c1), b = cli_out(args, &c2);
        o.require(a == b && c1 == c2 && !a.empty(), "'" + args[0] + "' output differs between runs");
    }
    const protocol::ProtocolParams p{1.0, 5, 3, 1e-2, 0.8};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        protocol::OpeningAttackAlice a1(0), a2(0);
        protocol::HonestBob b1, b2;
        const transport::SessionOptions opt{"det-" + std::to_string(seed), false};
        o.require(transport::transcript_bytes(transport::run_session(a1, b1, p, seed, opt)) ==
                      transport::transcript_bytes(transport::run_session_stream(a2, b2, p, seed, opt)),
                  "loopback and stream transcripts differ for seed " + std::to_string(seed));
    }
    if (o.pass) o.detail = std::to_string(commands.size()) + " commands re-run; 10 seeds loopback == stream";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"bound soundness", bound_soundness},
        {"honest completeness", honest_completeness},
        {"Alice-attack law", alice_attack_law},
        {"optimality brute force", optimality},
        {"Mayers kit", mayers_kit},
        {"epsilon-security planner", planner},
        {"Helstrom consistency", helstrom},
        {"phase-space", phase_space},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::printf("%s %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
