#pragma once

// Wire format and two-party session runners.
//
// Each protocol message is one line of JSON:
//   {"kind":"COMMIT","session_id":"s1","amplitudes":[[re,im],...]}
// Floats are written with 17 significant digits so decode(encode(m)) == m bit
// for bit. Endpoints talk over an ordered, reliable ByteStream: an in-memory
// pipe or a TCP socket.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "qbc/protocol.hpp"

namespace qbc::transport {

using protocol::Message;
using protocol::ProtocolParams;
using protocol::SessionTranscript;

/// One line, no trailing newline.
std::string encode(const Message& msg);

/// Throws DecodeError (with the byte offset of the fault) on malformed JSON,
/// an unknown kind tag or a missing/ill-typed field.
Message decode(std::string_view line);

/// Every message of the transcript, one encoded line each, '\n'-terminated.
std::string transcript_bytes(const SessionTranscript& transcript);

// ------------------------------------------------------------------ streams

class ByteStream {
public:
    virtual ~ByteStream() = default;
    virtual void write(std::string_view bytes) = 0;
    /// Next '\n'-terminated line without the terminator; nullopt at end of stream.
    virtual std::optional<std::string> read_line() = 0;
    /// Half-close: the peer sees end of stream after the bytes already written.
    virtual void close() = 0;

    void write_message(const Message& msg);
    std::optional<Message> read_message();
};

/// Two connected in-memory endpoints; safe to use from two threads.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe();

class SocketStream : public ByteStream {
public:
    explicit SocketStream(int fd);
    ~SocketStream() override;
    SocketStream(const SocketStream&) = delete;
    SocketStream& operator=(const SocketStream&) = delete;

    void write(std::string_view bytes) override;
    std::optional<std::string> read_line() override;
    void close() override;

private:
    int fd_;
    bool write_closed_ = false;
    std::string buffer_;
};

class Listener {
public:
    /// Binds host:port (port 0 picks an ephemeral port) and listens.
    Listener(const std::string& host, std::uint16_t port);
    ~Listener();
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    std::uint16_t port() const { return port_; }
    std::unique_ptr<SocketStream> accept();

private:
    int fd_;
    std::uint16_t port_;
};

std::unique_ptr<SocketStream> connect_to(const std::string& host, std::uint16_t port);

/// "host:port" or ":port" (host defaults to 127.0.0.1).
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& spec);

// ----------------------------------------------------------------- sessions

struct SessionOptions {
    std::string session_id = "session";
    /// Give Bob's strategy the raw received amplitudes before the opening.
    bool adversarial_bob = false;
};

/// Alice's side of one session over `stream`. Returns her transcript.
/// Throws ProtocolError if the peer hangs up early.
SessionTranscript run_alice_endpoint(ByteStream& stream, protocol::AliceStrategy& strategy,
                                     const ProtocolParams& params, std::uint64_t seed,
                                     const SessionOptions& options = {});

/// Bob's side. The link model is built here from params.tau and the options;
/// the strategy cannot change it. Returns Bob's verdict, if he reached one.
std::optional<protocol::Verdict> run_bob_endpoint(ByteStream& stream, protocol::BobStrategy& strategy,
                                                  const ProtocolParams& params, std::uint64_t seed,
                                                  const SessionOptions& options = {});

/// Both endpoints in one thread; every message is encoded and decoded.
SessionTranscript run_session(protocol::AliceStrategy& alice, protocol::BobStrategy& bob,
                              const ProtocolParams& params, std::uint64_t seed,
                              const SessionOptions& options = {});

/// Both endpoints on their own threads, connected by TCP over 127.0.0.1.
SessionTranscript run_session_stream(protocol::AliceStrategy& alice, protocol::BobStrategy& bob,
                                     const ProtocolParams& params, std::uint64_t seed,
                                     const SessionOptions& options = {});

}  // namespace qbc::transport
