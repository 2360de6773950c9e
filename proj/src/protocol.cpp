#include "qbc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "qbc/codestates.hpp"
#include "qbc/errors.hpp"

namespace qbc::protocol {

namespace {

Role sender_of(const Message& msg) {
    switch (msg.kind()) {
        case MessageKind::hello: return std::get<Hello>(msg.body).role;
        case MessageKind::commit:
        case MessageKind::open: return Role::alice;
        case MessageKind::verdict: return Role::bob;
        case MessageKind::abort: break;
    }
    return Role::alice;  // abort: sender is whoever sent it, checked by the caller
}

}  // namespace

void ProtocolParams::validate() const {
    if (!std::isfinite(E) || E < 0.0) throw ParameterError("E must be finite and >= 0");
    if (M < 2) throw ParameterError("M must be >= 2");
    if (k < 1) throw ParameterError("k must be >= 1");
    if (!(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < 1.0))
        throw ParameterError("epsilon must lie in (0, 1)");
    if (!(std::isfinite(tau) && tau > 0.0 && tau <= 1.0)) throw ParameterError("tau must lie in (0, 1]");
}

void ChannelModel::validate() const {
    if (!(std::isfinite(tau) && tau > 0.0 && tau <= 1.0)) throw ParameterError("tau must lie in (0, 1]");
}

// ------------------------------------------------------------------ payload

std::vector<unsigned> QuantumPayload::measure_displaced(std::span<const Complex> displacements,
                                                        Rng& rng) const {
    if (displacements.size() != amplitudes_.size())
        throw ProtocolError("displacement count " + std::to_string(displacements.size()) +
                            " does not match payload modes " + std::to_string(amplitudes_.size()));
    std::vector<unsigned> counts;
    counts.reserve(amplitudes_.size());
    for (std::size_t j = 0; j < amplitudes_.size(); ++j)
        counts.push_back(fock::sample_photon_count(amplitudes_[j] + displacements[j], rng));
    return counts;
}

QuantumPayload SimulatorAccess::make(std::vector<Complex> amplitudes) {
    for (auto a : amplitudes)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw ParameterError("payload amplitude must be finite");
    return QuantumPayload(std::move(amplitudes));
}

const std::vector<Complex>& SimulatorAccess::amplitudes(const QuantumPayload& payload) {
    return payload.amplitudes_;
}

QuantumPayload transmit(const QuantumPayload& emitted, double tau) {
    if (!(std::isfinite(tau) && tau > 0.0 && tau <= 1.0)) throw ParameterError("tau must lie in (0, 1]");
    auto amps = SimulatorAccess::amplitudes(emitted);
    const double scale = std::sqrt(tau);
    for (auto& a : amps) a *= scale;
    return SimulatorAccess::make(std::move(amps));
}

// --------------------------------------------------------- commit and open

std::pair<Commitment, QuantumPayload> commit(int b, const ProtocolParams& params, Rng& rng) {
    params.validate();
    if (b != 0 && b != 1) throw ParameterError("bit must be 0 or 1");
    std::uniform_int_distribution<int> symbol(0, params.M - 1);
    Commitment c{b, {}};
    std::vector<Complex> amps;
    const double magnitude = std::sqrt(params.E / params.tau);
    for (int j = 0; j < params.k; ++j) {
        c.m.push_back(symbol(rng));
        amps.push_back(std::polar(magnitude, code::code_phase(c.m.back(), b, params.M)));
    }
    return {std::move(c), SimulatorAccess::make(std::move(amps))};
}

std::vector<Complex> verification_displacements(const Reveal& reveal, const ProtocolParams& params) {
    if (reveal.m.size() != static_cast<std::size_t>(params.k))
        throw ProtocolError("revealed phase string has length " + std::to_string(reveal.m.size()) +
                            ", expected " + std::to_string(params.k));
    if (reveal.bit != 0 && reveal.bit != 1) throw ProtocolError("revealed bit is not 0 or 1");
    std::vector<Complex> out;
    out.reserve(reveal.m.size());
    const double magnitude = std::sqrt(params.E);
    for (int m : reveal.m) {
        if (m < 0 || m >= params.M) throw ProtocolError("revealed phase index out of range");
        out.push_back(-std::polar(magnitude, code::code_phase(m, reveal.bit, params.M)));
    }
    return out;
}

Verdict bob_verify(const QuantumPayload& received, const Reveal& revealed, const ProtocolParams& params,
                   Rng& rng) {
    if (received.modes() != static_cast<std::size_t>(params.k))
        throw ProtocolError("payload carries " + std::to_string(received.modes()) + " modes, expected " +
                            std::to_string(params.k));
    const auto displacements = verification_displacements(revealed, params);
    Verdict v;
    v.counts = received.measure_displaced(displacements, rng);
    v.accepted = true;
    for (unsigned c : v.counts) v.accepted = v.accepted && c == 0;
    return v;
}

Reveal cheat_open(const Commitment& commitment, int target_b) {
    if (target_b != 0 && target_b != 1) throw ParameterError("bit must be 0 or 1");
    return Reveal{target_b, commitment.m};
}

double acceptance_probability(const Commitment& commitment, const Reveal& reveal,
                              const ProtocolParams& params) {
    if (reveal.m.size() != commitment.m.size()) throw ProtocolError("reveal length mismatch");
    double log_p = 0.0;
    for (std::size_t j = 0; j < commitment.m.size(); ++j) {
        const double offset = (commitment.m[j] - reveal.m[j]) + 0.5 * (commitment.b - reveal.bit);
        const double s = std::sin(std::numbers::pi * offset / params.M);
        log_p -= 4.0 * params.E * s * s;
    }
    return std::exp(log_p);
}

// --------------------------------------------------------------- strategies

HonestAlice::HonestAlice(std::optional<int> bit) : bit_(bit) {
    if (bit_ && *bit_ != 0 && *bit_ != 1) throw ParameterError("bit must be 0 or 1");
}

int HonestAlice::choose_bit(Rng& rng) {
    if (bit_) return *bit_;
    return std::uniform_int_distribution<int>(0, 1)(rng);
}

Reveal HonestAlice::reveal(const Commitment& commitment, Rng&) { return cheat_open(commitment, commitment.b); }

Reveal OpeningAttackAlice::reveal(const Commitment& commitment, Rng&) {
    return cheat_open(commitment, 1 - commitment.b);
}

std::optional<int> BobStrategy::guess(std::span<const Complex>, const ProtocolParams&, Rng&) {
    return std::nullopt;
}

Verdict BobStrategy::verify(const QuantumPayload& received, const Reveal& revealed,
                            const ProtocolParams& params, Rng& rng) {
    return bob_verify(received, revealed, params, rng);
}

std::optional<int> HelstromBob::guess(std::span<const Complex> received, const ProtocolParams& params,
                                      Rng& rng) {
    if (received.size() != 1) throw ParameterError("HelstromBob handles single-mode commitments only");
    if (!cache_.projector || cache_.E != params.E || cache_.M != params.M) {
        const auto cp = code::CodeParams::with_working_cutoff(std::sqrt(params.E), params.M);
        cache_ = {params.E, params.M,
                  fock::helstrom_projector(code::build_sigma(0, cp), code::build_sigma(1, cp))};
    }
    const auto& p0 = *cache_.projector;
    const auto v = fock::coherent_vector(received[0], p0.cutoff());
    const double prob0 = std::clamp(v.inner(p0.apply(v)).real() / v.squared_norm(), 0.0, 1.0);
    return std::bernoulli_distribution(prob0)(rng) ? 0 : 1;
}

// ----------------------------------------------------------------- messages

std::string_view to_string(Role role) { return role == Role::alice ? "alice" : "bob"; }

std::string_view to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::hello: return "HELLO";
        case MessageKind::commit: return "COMMIT";
        case MessageKind::open: return "OPEN";
        case MessageKind::verdict: return "VERDICT";
        case MessageKind::abort: return "ABORT";
    }
    return "?";
}

std::string_view to_string(SessionState::Phase phase) {
    using P = SessionState::Phase;
    switch (phase) {
        case P::greeting: return "greeting";
        case P::committing: return "committing";
        case P::opening: return "opening";
        case P::verifying: return "verifying";
        case P::closed: return "closed";
        case P::aborted: return "aborted";
    }
    return "?";
}

MessageKind Message::kind() const {
    return static_cast<MessageKind>(body.index());
}

void SessionState::advance(MessageKind kind, Role sender) {
    auto reject = [&] {
        throw ProtocolStateError("unexpected " + std::string(to_string(kind)) + " from " +
                                 std::string(to_string(sender)) + " in phase " +
                                 std::string(to_string(phase_)));
    };
    if (terminal()) reject();
    if (kind == MessageKind::abort) {
        phase_ = Phase::aborted;
        return;
    }
    switch (phase_) {
        case Phase::greeting: {
            auto& seen = hello_from_[sender == Role::alice ? 0 : 1];
            if (kind != MessageKind::hello || seen) reject();
            seen = true;
            if (hello_from_[0] && hello_from_[1]) phase_ = Phase::committing;
            return;
        }
        case Phase::committing:
            if (kind != MessageKind::commit || sender != Role::alice) reject();
            phase_ = Phase::opening;
            return;
        case Phase::opening:
            if (kind != MessageKind::open || sender != Role::alice) reject();
            phase_ = Phase::verifying;
            return;
        case Phase::verifying:
            if (kind != MessageKind::verdict || sender != Role::bob) reject();
            phase_ = Phase::closed;
            return;
        default: reject();
    }
}

std::optional<int> SessionTranscript::opened_bit() const {
    for (const auto& m : messages)
        if (const auto* open = std::get_if<OpenBody>(&m.body)) return open->reveal.bit;
    return std::nullopt;
}

Rng alice_rng(std::uint64_t seed) { return fock::make_rng(seed, 1); }
Rng bob_rng(std::uint64_t seed) { return fock::make_rng(seed, 2); }

// -------------------------------------------------------------------- Alice

AliceParty::AliceParty(std::string session_id, ProtocolParams params, AliceStrategy& strategy, Rng rng)
    : session_id_(std::move(session_id)), params_(params), strategy_(strategy), rng_(std::move(rng)) {
    params_.validate();
}

std::vector<Message> AliceParty::send(Message msg) {
    state_.advance(msg.kind(), Role::alice);
    log_.push_back(msg);
    return {std::move(msg)};
}

std::vector<Message> AliceParty::abort(std::string reason) {
    abort_reason_ = reason;
    return send(Message{session_id_, AbortBody{std::move(reason)}});
}

std::vector<Message> AliceParty::start() { return send(Message{session_id_, Hello{Role::alice, params_}}); }

std::vector<Message> AliceParty::receive(const Message& msg) {
    if (state_.terminal()) throw ProtocolStateError("session is closed; message rejected");
    log_.push_back(msg);
    if (msg.kind() == MessageKind::abort) {
        state_.advance(MessageKind::abort, Role::bob);
        abort_reason_ = std::get<AbortBody>(msg.body).reason;
        return {};
    }
    if (msg.session_id != session_id_) return abort("session id mismatch");
    try {
        state_.advance(msg.kind(), sender_of(msg) == Role::alice ? Role::alice : Role::bob);
        if (sender_of(msg) != Role::bob) throw ProtocolStateError("message not sent by bob");
    } catch (const ProtocolStateError& e) {
        return abort(e.what());
    }

    if (const auto* hello = std::get_if<Hello>(&msg.body)) {
        if (!(hello->params == params_)) return abort("parameter mismatch in HELLO");
        const int b = strategy_.choose_bit(rng_);
        auto [c, payload] = commit(b, params_, rng_);
        commitment_ = c;
        auto out = send(Message{session_id_, CommitBody{SimulatorAccess::amplitudes(payload)}});
        auto open = send(Message{session_id_, OpenBody{strategy_.reveal(*commitment_, rng_)}});
        out.insert(out.end(), open.begin(), open.end());
        return out;
    }
    const auto& verdict = std::get<VerdictBody>(msg.body);
    verdict_ = verdict.verdict;
    guess_ = verdict.guess;
    return {};
}

SessionTranscript AliceParty::transcript() const {
    return SessionTranscript{session_id_, log_, verdict_, guess_, abort_reason_};
}

// ---------------------------------------------------------------------- Bob

BobParty::BobParty(std::string session_id, ProtocolParams params, BobStrategy& strategy,
                   ChannelModel channel, Rng rng)
    : session_id_(std::move(session_id)),
      params_(params),
      strategy_(strategy),
      channel_(channel),
      rng_(std::move(rng)) {
    params_.validate();
    channel_.validate();
}

std::vector<Message> BobParty::send(Message msg) {
    state_.advance(msg.kind(), Role::bob);
    return {std::move(msg)};
}

std::vector<Message> BobParty::abort(std::string reason) {
    return send(Message{session_id_, AbortBody{std::move(reason)}});
}

std::vector<Message> BobParty::start() { return send(Message{session_id_, Hello{Role::bob, params_}}); }

std::vector<Message> BobParty::receive(const Message& msg) {
    if (state_.terminal()) throw ProtocolStateError("session is closed; message rejected");
    if (msg.kind() == MessageKind::abort) {
        state_.advance(MessageKind::abort, Role::alice);
        return {};
    }
    if (msg.session_id != session_id_) return abort("session id mismatch");
    try {
        state_.advance(msg.kind(), sender_of(msg));
        if (sender_of(msg) != Role::alice) throw ProtocolStateError("message not sent by alice");
    } catch (const ProtocolStateError& e) {
        return abort(e.what());
    }

    try {
        if (const auto* hello = std::get_if<Hello>(&msg.body)) {
            if (!(hello->params == params_)) return abort("parameter mismatch in HELLO");
            return {};
        }
        if (const auto* c = std::get_if<CommitBody>(&msg.body)) {
            if (c->amplitudes.size() != static_cast<std::size_t>(params_.k))
                return abort("COMMIT carries " + std::to_string(c->amplitudes.size()) + " modes, expected " +
                             std::to_string(params_.k));
            received_ = transmit(SimulatorAccess::make(c->amplitudes), channel_.tau);
            if (channel_.adversarial_bob)
                guess_ = strategy_.guess(SimulatorAccess::amplitudes(*received_), params_, rng_);
            return {};
        }
        const auto& open = std::get<OpenBody>(msg.body);
        verdict_ = strategy_.verify(*received_, open.reveal, params_, rng_);
        return send(Message{session_id_, VerdictBody{*verdict_, guess_}});
    } catch (const ProtocolError& e) {
        return abort(e.what());
    } catch (const ParameterError& e) {
        return abort(e.what());
    }
}

// --------------------------------------------------------------- in-process

SessionTranscript run_protocol(AliceStrategy& alice, BobStrategy& bob, const ProtocolParams& params,
                               std::uint64_t seed, bool adversarial_bob, const std::string& session_id) {
    AliceParty a(session_id, params, alice, alice_rng(seed));
    BobParty b(session_id, params, bob, ChannelModel{params.tau, adversarial_bob}, bob_rng(seed));
    std::deque<Message> to_alice, to_bob;
    for (auto& m : a.start()) to_bob.push_back(std::move(m));
    for (auto& m : b.start()) to_alice.push_back(std::move(m));
    while (!to_alice.empty() || !to_bob.empty()) {
        if (!to_bob.empty()) {
            Message m = std::move(to_bob.front());
            to_bob.pop_front();
            if (!b.finished())
                for (auto& out : b.receive(m)) to_alice.push_back(std::move(out));
        }
        if (!to_alice.empty()) {
            Message m = std::move(to_alice.front());
            to_alice.pop_front();
            if (!a.finished())
                for (auto& out : a.receive(m)) to_bob.push_back(std::move(out));
        }
    }
    return a.transcript();
}

}  // namespace qbc::protocol
