#pragma once

// Commit/open state machines for Alice and Bob.
//
// Alice commits to bit b by sending k coherent states with phases
// 2 pi (m_j + b/2) / M for a uniformly random string m. To open she reveals
// (b, m); Bob displaces each mode back to the vacuum and counts photons,
// accepting only if every count is zero.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qbc/fockcore.hpp"

namespace qbc::protocol {

using fock::Complex;
using fock::Rng;

struct ProtocolParams {
    double E = 1.0;          // received mean photon number per mode
    int M = 8;               // phase modulation order
    int k = 1;               // number of modes per commitment
    double epsilon = 1e-2;   // security target
    double tau = 1.0;        // link transmittivity

    void validate() const;
    bool operator==(const ProtocolParams&) const = default;
};

struct Commitment {
    int b = 0;
    std::vector<int> m;
};

/// Bob's claim check input: the bit and phase string Alice reveals.
struct Reveal {
    int bit = 0;
    std::vector<int> m;
    bool operator==(const Reveal&) const = default;
};

struct Verdict {
    bool accepted = false;
    std::vector<unsigned> counts;
    bool operator==(const Verdict&) const = default;
};

class SimulatorAccess;

/// Simulated k-mode coherent-state payload. The public surface is
/// measurement-only: a holder can displace-and-count but cannot read the
/// amplitudes. Raw amplitudes are reachable only through SimulatorAccess,
/// which the channel, the wire codec and an explicitly adversarial link use.
class QuantumPayload {
public:
    std::size_t modes() const { return amplitudes_.size(); }

    /// Displaces mode j by displacements[j] and samples its photon count.
    std::vector<unsigned> measure_displaced(std::span<const Complex> displacements, Rng& rng) const;

private:
    friend class SimulatorAccess;
    explicit QuantumPayload(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {}
    std::vector<Complex> amplitudes_;
};

class SimulatorAccess {
public:
    static QuantumPayload make(std::vector<Complex> amplitudes);
    static const std::vector<Complex>& amplitudes(const QuantumPayload& payload);
};

/// Pure-loss channel: every amplitude is scaled by sqrt(tau).
QuantumPayload transmit(const QuantumPayload& emitted, double tau);

/// Samples m uniformly from [M]^k and prepares the emitted payload with
/// amplitudes sqrt(E / tau) e^{i code_phase}, so that after the channel each
/// mode carries energy E.
std::pair<Commitment, QuantumPayload> commit(int b, const ProtocolParams& params, Rng& rng);

/// Displacement Bob applies to mode j for a reveal: -sqrt(E) e^{i code_phase}.
std::vector<Complex> verification_displacements(const Reveal& reveal, const ProtocolParams& params);

/// Throws ProtocolError on length or range mismatch.
Verdict bob_verify(const QuantumPayload& received, const Reveal& revealed,
                   const ProtocolParams& params, Rng& rng);

/// Opening attack: reveal target_b with the committed phase string unchanged.
/// For target_b == commitment.b this is the honest opening.
Reveal cheat_open(const Commitment& commitment, int target_b);

/// Probability that Bob sees all-zero counts for a given reveal against a
/// commitment: prod_j exp(-4 E sin^2(pi ((m_j - mhat_j) + (b - bhat)/2) / M)).
double acceptance_probability(const Commitment& commitment, const Reveal& reveal,
                              const ProtocolParams& params);

// ------------------------------------------------------------ strategies

class AliceStrategy {
public:
    virtual ~AliceStrategy() = default;
    virtual std::string_view name() const = 0;
    virtual int choose_bit(Rng& rng) = 0;
    virtual Reveal reveal(const Commitment& commitment, Rng& rng) = 0;
};

/// Commits to a fixed bit, or to a uniformly random one when none is given.
class HonestAlice : public AliceStrategy {
public:
    explicit HonestAlice(std::optional<int> bit = std::nullopt);
    std::string_view name() const override { return "honest"; }
    int choose_bit(Rng& rng) override;
    Reveal reveal(const Commitment& commitment, Rng& rng) override;

private:
    std::optional<int> bit_;
};

/// Commits like HonestAlice but opens the flipped bit via cheat_open.
class OpeningAttackAlice : public HonestAlice {
public:
    using HonestAlice::HonestAlice;
    std::string_view name() const override { return "cheat-open"; }
    Reveal reveal(const Commitment& commitment, Rng& rng) override;
};

class BobStrategy {
public:
    virtual ~BobStrategy() = default;
    virtual std::string_view name() const = 0;

    /// Called only on an adversarial link, before the opening, with the
    /// amplitudes Bob received. Returns Bob's guess of the committed bit.
    virtual std::optional<int> guess(std::span<const Complex> received, const ProtocolParams& params,
                                     Rng& rng);

    virtual Verdict verify(const QuantumPayload& received, const Reveal& revealed,
                           const ProtocolParams& params, Rng& rng);
};

class HonestBob : public BobStrategy {
public:
    std::string_view name() const override { return "honest"; }
};

/// Cheating Bob for k = 1: performs the Helstrom measurement discriminating
/// sigma_0 from sigma_1 on the received mode.
class HelstromBob : public BobStrategy {
public:
    std::string_view name() const override { return "helstrom"; }
    std::optional<int> guess(std::span<const Complex> received, const ProtocolParams& params,
                             Rng& rng) override;

private:
    struct Cache {
        double E = -1.0;
        int M = 0;
        std::optional<fock::FockOperator> projector;
    } cache_;
};

// ------------------------------------------------------------- messages

enum class Role { alice, bob };
enum class MessageKind { hello, commit, open, verdict, abort };

std::string_view to_string(Role role);
std::string_view to_string(MessageKind kind);

struct Hello {
    Role role = Role::alice;
    ProtocolParams params;
    bool operator==(const Hello&) const = default;
};

/// Emitted (pre-channel) amplitudes of the commitment.
struct CommitBody {
    std::vector<Complex> amplitudes;
    bool operator==(const CommitBody&) const = default;
};

struct OpenBody {
    Reveal reveal;
    bool operator==(const OpenBody&) const = default;
};

struct VerdictBody {
    Verdict verdict;
    std::optional<int> guess;   // adversarial Bob's pre-opening guess
    bool operator==(const VerdictBody&) const = default;
};

struct AbortBody {
    std::string reason;
    bool operator==(const AbortBody&) const = default;
};

struct Message {
    std::string session_id;
    std::variant<Hello, CommitBody, OpenBody, VerdictBody, AbortBody> body;

    MessageKind kind() const;
    bool operator==(const Message&) const = default;
};

/// Conversation order shared by both parties:
/// HELLO (from each role) -> COMMIT -> OPEN -> VERDICT, ABORT legal anywhere.
/// Closed after VERDICT or ABORT; further messages raise ProtocolStateError.
class SessionState {
public:
    enum class Phase { greeting, committing, opening, verifying, closed, aborted };

    /// Throws ProtocolStateError if `kind` from `sender` is not legal now.
    void advance(MessageKind kind, Role sender);
    Phase phase() const { return phase_; }
    bool terminal() const { return phase_ == Phase::closed || phase_ == Phase::aborted; }

private:
    Phase phase_ = Phase::greeting;
    bool hello_from_[2] = {false, false};
};

std::string_view to_string(SessionState::Phase phase);

/// Channel between the parties. Built by the session runners only; neither
/// strategy can change it.
struct ChannelModel {
    double tau = 1.0;
    bool adversarial_bob = false;
    void validate() const;
};

struct SessionTranscript {
    std::string session_id;
    std::vector<Message> messages;   // Alice's view: everything she sent or received, in order
    std::optional<Verdict> verdict;
    std::optional<int> bob_guess;
    std::optional<std::string> abort_reason;

    bool accepted() const { return verdict && verdict->accepted; }
    /// Bit Alice opened to (from the OPEN message), if any.
    std::optional<int> opened_bit() const;
};

/// Alice as a reactive state machine: start() yields her first messages,
/// receive() yields replies. Order violations turn into an outgoing ABORT.
class AliceParty {
public:
    AliceParty(std::string session_id, ProtocolParams params, AliceStrategy& strategy, Rng rng);

    std::vector<Message> start();
    std::vector<Message> receive(const Message& msg);
    bool finished() const { return state_.terminal(); }
    SessionTranscript transcript() const;

private:
    std::vector<Message> send(Message msg);
    std::vector<Message> abort(std::string reason);

    std::string session_id_;
    ProtocolParams params_;
    AliceStrategy& strategy_;
    Rng rng_;
    SessionState state_;
    std::optional<Commitment> commitment_;
    std::vector<Message> log_;
    std::optional<Verdict> verdict_;
    std::optional<int> guess_;
    std::optional<std::string> abort_reason_;
};

class BobParty {
public:
    BobParty(std::string session_id, ProtocolParams params, BobStrategy& strategy,
             ChannelModel channel, Rng rng);

    std::vector<Message> start();
    std::vector<Message> receive(const Message& msg);
    bool finished() const { return state_.terminal(); }
    const std::optional<Verdict>& verdict() const { return verdict_; }

private:
    std::vector<Message> send(Message msg);
    std::vector<Message> abort(std::string reason);

    std::string session_id_;
    ProtocolParams params_;
    BobStrategy& strategy_;
    ChannelModel channel_;
    Rng rng_;
    SessionState state_;
    std::optional<QuantumPayload> received_;
    std::optional<int> guess_;
    std::optional<Verdict> verdict_;
};

/// Per-party generators derived from one session seed.
Rng alice_rng(std::uint64_t seed);
Rng bob_rng(std::uint64_t seed);

/// In-process run: commit -> open -> verify, messages passed by value.
/// Deterministic per seed.
SessionTranscript run_protocol(AliceStrategy& alice, BobStrategy& bob, const ProtocolParams& params,
                               std::uint64_t seed, bool adversarial_bob = false,
                               const std::string& session_id = "session");

}  // namespace qbc::protocol
