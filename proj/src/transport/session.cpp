#include "qbc/transport.hpp"

#include <deque>
#include <exception>
#include <thread>

#include "qbc/errors.hpp"

namespace qbc::transport {

using namespace protocol;

SessionTranscript run_alice_endpoint(ByteStream& stream, AliceStrategy& strategy, const ProtocolParams& params,
                                     std::uint64_t seed, const SessionOptions& options) {
    AliceParty alice(options.session_id, params, strategy, alice_rng(seed));
    for (const auto& m : alice.start()) stream.write_message(m);
    while (!alice.finished()) {
        auto msg = stream.read_message();
        if (!msg) throw ProtocolError("bob closed the stream before the session finished");
        for (const auto& out : alice.receive(*msg)) stream.write_message(out);
    }
    stream.close();
    return alice.transcript();
}

std::optional<Verdict> run_bob_endpoint(ByteStream& stream, BobStrategy& strategy, const ProtocolParams& params,
                                        std::uint64_t seed, const SessionOptions& options) {
    BobParty bob(options.session_id, params, strategy, ChannelModel{params.tau, options.adversarial_bob},
                 bob_rng(seed));
    for (const auto& m : bob.start()) stream.write_message(m);
    while (!bob.finished()) {
        auto msg = stream.read_message();
        if (!msg) throw ProtocolError("alice closed the stream before the session finished");
        for (const auto& out : bob.receive(*msg)) stream.write_message(out);
    }
    stream.close();
    return bob.verdict();
}

SessionTranscript run_session(AliceStrategy& alice_strategy, BobStrategy& bob_strategy, const ProtocolParams& params,
                              std::uint64_t seed, const SessionOptions& options) {
    AliceParty alice(options.session_id, params, alice_strategy, alice_rng(seed));
    BobParty bob(options.session_id, params, bob_strategy, ChannelModel{params.tau, options.adversarial_bob},
                 bob_rng(seed));
    std::deque<std::string> to_alice, to_bob;
    for (const auto& m : alice.start()) to_bob.push_back(encode(m));
    for (const auto& m : bob.start()) to_alice.push_back(encode(m));
    while (!to_alice.empty() || !to_bob.empty()) {
        if (!to_bob.empty()) {
            const Message m = decode(to_bob.front());
            to_bob.pop_front();
            if (!bob.finished())
                for (const auto& out : bob.receive(m)) to_alice.push_back(encode(out));
        }
        if (!to_alice.empty()) {
            const Message m = decode(to_alice.front());
            to_alice.pop_front();
            if (!alice.finished())
                for (const auto& out : alice.receive(m)) to_bob.push_back(encode(out));
        }
    }
    return alice.transcript();
}

SessionTranscript run_session_stream(AliceStrategy& alice, BobStrategy& bob, const ProtocolParams& params,
                                     std::uint64_t seed, const SessionOptions& options) {
    Listener listener("127.0.0.1", 0);
    std::exception_ptr bob_error;
    std::thread bob_thread([&] {
        try {
            auto stream = listener.accept();
            run_bob_endpoint(*stream, bob, params, seed, options);
        } catch (...) {
            bob_error = std::current_exception();
        }
    });
    SessionTranscript transcript;
    std::exception_ptr alice_error;
    try {
        auto stream = connect_to("127.0.0.1", listener.port());
        transcript = run_alice_endpoint(*stream, alice, params, seed, options);
    } catch (...) {
        alice_error = std::current_exception();
    }
    bob_thread.join();
    if (alice_error) std::rethrow_exception(alice_error);
    if (bob_error) std::rethrow_exception(bob_error);
    return transcript;
}

}  // namespace qbc::transport
