#include "qbc/transport.hpp"

#include <cmath>

#include "qbc/document.hpp"
#include "qbc/errors.hpp"

namespace qbc::transport {

namespace {

using namespace protocol;

Document params_doc(const ProtocolParams& p) {
    return {{"E", p.E}, {"M", p.M}, {"k", p.k}, {"epsilon", p.epsilon}, {"tau", p.tau}};
}

struct Reader {
    const Document& doc;
    std::size_t offset;

    [[noreturn]] void fail(const std::string& what) const { throw DecodeError(what, offset); }

    const Document& field(const Document& obj, const char* name) const {
        if (!obj.is_object()) fail("expected an object");
        auto it = obj.find(name);
        if (it == obj.end()) fail(std::string("missing field '") + name + "'");
        return *it;
    }

    double number(const Document& obj, const char* name) const {
        const auto& v = field(obj, name);
        if (!v.is_number()) fail(std::string("field '") + name + "' is not a number");
        return v.get<double>();
    }

    long long integer(const Document& v, const char* name) const {
        if (!v.is_number_integer()) fail(std::string("field '") + name + "' is not an integer");
        return v.get<long long>();
    }

    int small_int(const Document& obj, const char* name) const {
        const long long x = integer(field(obj, name), name);
        if (x < INT32_MIN || x > INT32_MAX) fail(std::string("field '") + name + "' out of range");
        return static_cast<int>(x);
    }

    std::string string(const Document& obj, const char* name) const {
        const auto& v = field(obj, name);
        if (!v.is_string()) fail(std::string("field '") + name + "' is not a string");
        return v.get<std::string>();
    }

    bool boolean(const Document& obj, const char* name) const {
        const auto& v = field(obj, name);
        if (!v.is_boolean()) fail(std::string("field '") + name + "' is not a boolean");
        return v.get<bool>();
    }

    const Document& array(const Document& obj, const char* name) const {
        const auto& v = field(obj, name);
        if (!v.is_array()) fail(std::string("field '") + name + "' is not an array");
        return v;
    }
};

}  // namespace

std::string encode(const Message& msg) {
    Document d;
    d["kind"] = std::string(to_string(msg.kind()));
    d["session_id"] = msg.session_id;
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, Hello>) {
                d["role"] = std::string(to_string(body.role));
                d["params"] = params_doc(body.params);
            } else if constexpr (std::is_same_v<T, CommitBody>) {
                Document amps = Document::array();
                for (auto a : body.amplitudes) amps.push_back({a.real(), a.imag()});
                d["amplitudes"] = amps;
            } else if constexpr (std::is_same_v<T, OpenBody>) {
                d["bit"] = body.reveal.bit;
                d["m"] = body.reveal.m;
            } else if constexpr (std::is_same_v<T, VerdictBody>) {
                d["accepted"] = body.verdict.accepted;
                d["counts"] = body.verdict.counts;
                d["guess"] = body.guess ? Document(*body.guess) : Document(nullptr);
            } else {
                d["reason"] = body.reason;
            }
        },
        msg.body);
    return to_json_line(d);
}

Message decode(std::string_view line) {
    Document d;
    try {
        d = Document::parse(line.begin(), line.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw DecodeError(std::string("malformed message: ") + e.what(), e.byte == 0 ? 0 : e.byte - 1);
    }
    const Reader r{d, 0};
    if (!d.is_object()) r.fail("message is not an object");
    const std::string kind = r.string(d, "kind");
    Message msg;
    msg.session_id = r.string(d, "session_id");

    if (kind == "HELLO") {
        const std::string role = r.string(d, "role");
        if (role != "alice" && role != "bob") r.fail("unknown role '" + role + "'");
        const auto& p = r.field(d, "params");
        msg.body = Hello{role == "alice" ? Role::alice : Role::bob,
                         ProtocolParams{r.number(p, "E"), r.small_int(p, "M"), r.small_int(p, "k"),
                                        r.number(p, "epsilon"), r.number(p, "tau")}};
    } else if (kind == "COMMIT") {
        CommitBody body;
        for (const auto& pair : r.array(d, "amplitudes")) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
                r.fail("amplitude is not a [re, im] pair");
            body.amplitudes.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
        msg.body = std::move(body);
    } else if (kind == "OPEN") {
        Reveal rev{r.small_int(d, "bit"), {}};
        for (const auto& m : r.array(d, "m")) {
            const long long x = r.integer(m, "m");
            if (x < INT32_MIN || x > INT32_MAX) r.fail("phase index out of range");
            rev.m.push_back(static_cast<int>(x));
        }
        msg.body = OpenBody{std::move(rev)};
    } else if (kind == "VERDICT") {
        VerdictBody body;
        body.verdict.accepted = r.boolean(d, "accepted");
        for (const auto& c : r.array(d, "counts")) {
            const long long x = r.integer(c, "counts");
            if (x < 0 || x > UINT32_MAX) r.fail("photon count out of range");
            body.verdict.counts.push_back(static_cast<unsigned>(x));
        }
        const auto& g = r.field(d, "guess");
        if (!g.is_null()) body.guess = static_cast<int>(r.integer(g, "guess"));
        msg.body = std::move(body);
    } else if (kind == "ABORT") {
        msg.body = AbortBody{r.string(d, "reason")};
    } else {
        r.fail("unknown message kind '" + kind + "'");
    }
    return msg;
}

std::string transcript_bytes(const SessionTranscript& transcript) {
    std::string out;
    for (const auto& m : transcript.messages) {
        out += encode(m);
        out += '\n';
    }
    return out;
}

}  // namespace qbc::transport
