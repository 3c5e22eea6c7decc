#include "dnsgap/probe/dns_message.hpp"

#include "dnsgap/core/label_codec.hpp"

namespace dnsgap::dns {

namespace {

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) {
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
        buf_.push_back(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v >> 16));
        u16(static_cast<std::uint16_t>(v));
    }
    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    void name(std::string_view n) {
        if (!n.empty() && n.back() == '.') n.remove_suffix(1);
        std::size_t start = 0;
        while (start < n.size()) {
            auto dot = n.find('.', start);
            if (dot == std::string_view::npos) dot = n.size();
            const auto len = dot - start;
            if (len == 0 || len > 63) throw std::invalid_argument("bad DNS label in '" + std::string(n) + "'");
            u8(static_cast<std::uint8_t>(len));
            for (auto i = start; i < dot; ++i) u8(static_cast<std::uint8_t>(n[i]));
            start = dot + 1;
        }
        u8(0);
    }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> wire) : wire_(wire) {}

    std::uint8_t u8() {
        need(1);
        return wire_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(wire_[pos_] << 8 | wire_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t hi = u16();
        return hi << 16 | u16();
    }
    std::vector<std::uint8_t> bytes(std::size_t n) {
        need(n);
        std::vector<std::uint8_t> out(wire_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                      wire_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }

    std::string name() {
        std::string out;
        std::size_t pos = pos_;
        bool jumped = false;
        int jumps = 0;
        for (;;) {
            if (pos >= wire_.size()) throw DnsParseError("name runs past end of message");
            const std::uint8_t len = wire_[pos];
            if ((len & 0xC0) == 0xC0) {
                if (pos + 1 >= wire_.size()) throw DnsParseError("truncated compression pointer");
                const std::size_t target = static_cast<std::size_t>((len & 0x3F) << 8 | wire_[pos + 1]);
                if (++jumps > 64) throw DnsParseError("compression pointer loop");
                if (!jumped) pos_ = pos + 2;
                jumped = true;
                pos = target;
                continue;
            }
            if (len & 0xC0) throw DnsParseError("unsupported label type");
            if (len == 0) {
                if (!jumped) pos_ = pos + 1;
                break;
            }
            if (pos + 1 + len > wire_.size()) throw DnsParseError("label runs past end of message");
            if (!out.empty()) out.push_back('.');
            out.append(reinterpret_cast<const char*>(&wire_[pos + 1]), len);
            if (out.size() > 253) throw DnsParseError("name exceeds 255 octets");
            pos += 1 + len;
        }
        return out;
    }

    void need(std::size_t n) const {
        if (pos_ + n > wire_.size()) throw DnsParseError("message truncated");
    }

private:
    std::span<const std::uint8_t> wire_;
    std::size_t pos_ = 0;
};

void write_record(Writer& w, const AnswerRecord& r, const Message& msg) {
    if (!msg.questions.empty() && normalize_name(r.name) == normalize_name(msg.questions.front().name)) {
        w.u16(0xC00C);
    } else {
        w.name(r.name);
    }
    w.u16(r.type);
    w.u16(r.rrclass);
    w.u32(r.ttl);
    w.u16(static_cast<std::uint16_t>(r.rdata.size()));
    w.bytes(r.rdata);
}

AnswerRecord read_record(Reader& r) {
    AnswerRecord rec;
    rec.name = r.name();
    rec.type = r.u16();
    rec.rrclass = r.u16();
    rec.ttl = r.u32();
    const std::uint16_t len = r.u16();
    rec.rdata = r.bytes(len);
    return rec;
}

}  // namespace

std::string rcode_name(std::uint8_t rcode) {
    switch (rcode) {
        case NoError: return "NOERROR";
        case FormErr: return "FORMERR";
        case ServFail: return "SERVFAIL";
        case NxDomain: return "NXDOMAIN";
        case NotImp: return "NOTIMP";
        case Refused: return "REFUSED";
        default: return "RCODE" + std::to_string(rcode);
    }
}

std::vector<std::uint8_t> build_query(std::uint16_t id, std::string_view name, std::uint16_t qtype, bool rd) {
    Message m;
    m.id = id;
    m.rd = rd;
    m.questions.push_back({std::string(name), qtype, kClassIn});
    return encode(m);
}

std::vector<std::uint8_t> encode(const Message& msg) {
    Writer w;
    w.u16(msg.id);
    std::uint16_t flags = 0;
    if (msg.qr) flags |= 0x8000;
    flags |= static_cast<std::uint16_t>((msg.opcode & 0xF) << 11);
    if (msg.aa) flags |= 0x0400;
    if (msg.tc) flags |= 0x0200;
    if (msg.rd) flags |= 0x0100;
    if (msg.ra) flags |= 0x0080;
    flags |= msg.rcode & 0xF;
    w.u16(flags);
    w.u16(static_cast<std::uint16_t>(msg.questions.size()));
    w.u16(static_cast<std::uint16_t>(msg.answers.size()));
    w.u16(static_cast<std::uint16_t>(msg.authority.size()));
    w.u16(static_cast<std::uint16_t>(msg.additional.size()));
    for (const auto& q : msg.questions) {
        w.name(q.name);
        w.u16(q.qtype);
        w.u16(q.qclass);
    }
    for (const auto& r : msg.answers) write_record(w, r, msg);
    for (const auto& r : msg.authority) write_record(w, r, msg);
    for (const auto& r : msg.additional) write_record(w, r, msg);
    return w.take();
}

Message parse(std::span<const std::uint8_t> wire) {
    Reader r(wire);
    Message m;
    m.id = r.u16();
    const std::uint16_t flags = r.u16();
    m.qr = flags & 0x8000;
    m.opcode = static_cast<std::uint8_t>((flags >> 11) & 0xF);
    m.aa = flags & 0x0400;
    m.tc = flags & 0x0200;
    m.rd = flags & 0x0100;
    m.ra = flags & 0x0080;
    m.rcode = static_cast<std::uint8_t>(flags & 0xF);
    const std::uint16_t qd = r.u16(), an = r.u16(), ns = r.u16(), ar = r.u16();
    for (int i = 0; i < qd; ++i) {
        Question q;
        q.name = r.name();
        q.qtype = r.u16();
        q.qclass = r.u16();
        m.questions.push_back(std::move(q));
    }
    for (int i = 0; i < an; ++i) m.answers.push_back(read_record(r));
    for (int i = 0; i < ns; ++i) m.authority.push_back(read_record(r));
    for (int i = 0; i < ar; ++i) m.additional.push_back(read_record(r));
    return m;
}

bool peek_id(std::span<const std::uint8_t> wire, std::uint16_t& id) {
    if (wire.size() < 12) return false;
    id = static_cast<std::uint16_t>(wire[0] << 8 | wire[1]);
    return true;
}

AnswerRecord make_address_record(std::string_view owner, const IpAddress& addr, std::uint32_t ttl) {
    AnswerRecord r;
    r.name = std::string(owner);
    r.ttl = ttl;
    if (addr.is_v4()) {
        r.type = 1;
        const auto b = addr.v4().bytes();
        r.rdata.assign(b.begin(), b.end());
    } else {
        r.type = 28;
        const auto& b = addr.v6().bytes();
        r.rdata.assign(b.begin(), b.end());
    }
    return r;
}

bool same_question(const Question& a, const Question& b) {
    return a.qtype == b.qtype && a.qclass == b.qclass && normalize_name(a.name) == normalize_name(b.name);
}

}  // namespace dnsgap::dns
