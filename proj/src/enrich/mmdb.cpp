#include "dnsgap/enrich/mmdb.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_map>

namespace dnsgap {

using nlohmann::json;

namespace {

constexpr std::string_view kMetadataMarker = "\xAB\xCD\xEFMaxMind.com";

enum Type : int {
    Pointer = 1,
    Utf8 = 2,
    Double = 3,
    Bytes = 4,
    Uint16 = 5,
    Uint32 = 6,
    Map = 7,
    Int32 = 8,
    Uint64 = 9,
    Uint128 = 10,
    Array = 11,
    Container = 12,
    EndMarker = 13,
    Boolean = 14,
    Float = 15,
};

class Decoder {
public:
    explicit Decoder(std::span<const std::uint8_t> data) : data_(data) {}

    json decode(std::size_t& pos, int depth = 0) {
        if (depth > 64) throw DatasetUnreadable("mmdb: data nesting too deep");
        const std::uint8_t ctrl = byte(pos++);
        int type = ctrl >> 5;
        if (type == Pointer) {
            const std::size_t target = pointer(ctrl, pos);
            std::size_t p = target;
            return decode(p, depth + 1);
        }
        if (type == 0) type = 7 + byte(pos++);
        const std::size_t size = length(ctrl, pos);
        switch (type) {
            case Utf8: {
                need(pos, size);
                json s = std::string(reinterpret_cast<const char*>(&data_[pos]), size);
                pos += size;
                return s;
            }
            case Double: {
                if (size != 8) throw DatasetUnreadable("mmdb: bad double size");
                const std::uint64_t bits = uint(pos, 8);
                double d;
                std::memcpy(&d, &bits, 8);
                return d;
            }
            case Float: {
                if (size != 4) throw DatasetUnreadable("mmdb: bad float size");
                const auto bits = static_cast<std::uint32_t>(uint(pos, 4));
                float f;
                std::memcpy(&f, &bits, 4);
                return static_cast<double>(f);
            }
            case Bytes: {
                need(pos, size);
                json::binary_t b(std::vector<std::uint8_t>(data_.begin() + static_cast<std::ptrdiff_t>(pos),
                                                           data_.begin() + static_cast<std::ptrdiff_t>(pos + size)));
                pos += size;
                return json::binary(std::move(b));
            }
            case Uint16:
            case Uint32:
            case Uint64: {
                const std::size_t max = type == Uint16 ? 2 : type == Uint32 ? 4 : 8;
                if (size > max) throw DatasetUnreadable("mmdb: integer too wide");
                return uint(pos, size);
            }
            case Uint128: {
                if (size > 16) throw DatasetUnreadable("mmdb: integer too wide");
                need(pos, size);
                std::string hex = "0x";
                static const char* digits = "0123456789abcdef";
                for (std::size_t i = 0; i < size; ++i) {
                    hex += digits[data_[pos + i] >> 4];
                    hex += digits[data_[pos + i] & 0xF];
                }
                pos += size;
                return hex;
            }
            case Int32: {
                if (size > 4) throw DatasetUnreadable("mmdb: integer too wide");
                auto v = static_cast<std::uint32_t>(uint(pos, size));
                if (size == 4) return static_cast<std::int32_t>(v);
                return static_cast<std::int64_t>(v);
            }
            case Map: {
                json obj = json::object();
                for (std::size_t i = 0; i < size; ++i) {
                    json key = decode(pos, depth + 1);
                    if (!key.is_string()) throw DatasetUnreadable("mmdb: map key is not a string");
                    obj[key.get<std::string>()] = decode(pos, depth + 1);
                }
                return obj;
            }
            case Array: {
                json arr = json::array();
                for (std::size_t i = 0; i < size; ++i) arr.push_back(decode(pos, depth + 1));
                return arr;
            }
            case Boolean:
                if (size > 1) throw DatasetUnreadable("mmdb: bad boolean");
                return size == 1;
            default:
                throw DatasetUnreadable("mmdb: unsupported data type " + std::to_string(type));
        }
    }

private:
    std::uint8_t byte(std::size_t pos) const {
        if (pos >= data_.size()) throw DatasetUnreadable("mmdb: data runs past end");
        return data_[pos];
    }
    void need(std::size_t pos, std::size_t n) const {
        if (pos + n > data_.size()) throw DatasetUnreadable("mmdb: data runs past end");
    }
    std::uint64_t uint(std::size_t& pos, std::size_t n) {
        need(pos, n);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < n; ++i) v = v << 8 | data_[pos + i];
        pos += n;
        return v;
    }
    std::size_t length(std::uint8_t ctrl, std::size_t& pos) {
        const std::size_t s = ctrl & 0x1F;
        if (s < 29) return s;
        if (s == 29) return 29 + uint(pos, 1);
        if (s == 30) return 285 + uint(pos, 2);
        return 65821 + uint(pos, 3);
    }
    std::size_t pointer(std::uint8_t ctrl, std::size_t& pos) {
        const int ss = (ctrl >> 3) & 0x3;
        const std::size_t vvv = ctrl & 0x7;
        switch (ss) {
            case 0: return (vvv << 8 | uint(pos, 1));
            case 1: return (vvv << 16 | uint(pos, 2)) + 2048;
            case 2: return (vvv << 24 | uint(pos, 3)) + 526336;
            default: return uint(pos, 4);
        }
    }

    std::span<const std::uint8_t> data_;
};

void put_uint(std::vector<std::uint8_t>& out, std::uint64_t v, std::size_t n) {
    for (std::size_t i = n; i-- > 0;) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::size_t min_bytes(std::uint64_t v) {
    std::size_t n = 0;
    while (v) {
        ++n;
        v >>= 8;
    }
    return n;
}

void put_header(std::vector<std::uint8_t>& out, int type, std::size_t size) {
    std::uint8_t ctrl = 0;
    std::vector<std::uint8_t> extra;
    if (size < 29) {
        ctrl = static_cast<std::uint8_t>(size);
    } else if (size < 285) {
        ctrl = 29;
        put_uint(extra, size - 29, 1);
    } else if (size < 65821) {
        ctrl = 30;
        put_uint(extra, size - 285, 2);
    } else {
        ctrl = 31;
        put_uint(extra, size - 65821, 3);
    }
    if (type <= 7) {
        out.push_back(static_cast<std::uint8_t>(type << 5 | ctrl));
    } else {
        out.push_back(ctrl);
        out.push_back(static_cast<std::uint8_t>(type - 7));
    }
    out.insert(out.end(), extra.begin(), extra.end());
}

void encode_into(std::vector<std::uint8_t>& out, const json& v) {
    switch (v.type()) {
        case json::value_t::string: {
            const auto& s = v.get_ref<const std::string&>();
            put_header(out, Utf8, s.size());
            out.insert(out.end(), s.begin(), s.end());
            return;
        }
        case json::value_t::number_unsigned: {
            const auto u = v.get<std::uint64_t>();
            const auto n = min_bytes(u);
            put_header(out, n <= 4 ? Uint32 : Uint64, n);
            put_uint(out, u, n);
            return;
        }
        case json::value_t::number_integer: {
            const auto i = v.get<std::int64_t>();
            if (i >= 0) {
                encode_into(out, json(static_cast<std::uint64_t>(i)));
                return;
            }
            if (i < INT32_MIN) throw std::invalid_argument("mmdb: integer out of int32 range");
            put_header(out, Int32, 4);
            put_uint(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(i)), 4);
            return;
        }
        case json::value_t::number_float: {
            const double d = v.get<double>();
            std::uint64_t bits;
            std::memcpy(&bits, &d, 8);
            put_header(out, Double, 8);
            put_uint(out, bits, 8);
            return;
        }
        case json::value_t::boolean:
            put_header(out, Boolean, v.get<bool>() ? 1 : 0);
            return;
        case json::value_t::binary: {
            const auto& b = v.get_binary();
            put_header(out, Bytes, b.size());
            out.insert(out.end(), b.begin(), b.end());
            return;
        }
        case json::value_t::object:
            put_header(out, Map, v.size());
            for (const auto& [key, val] : v.items()) {
                encode_into(out, json(key));
                encode_into(out, val);
            }
            return;
        case json::value_t::array:
            put_header(out, Array, v.size());
            for (const auto& e : v) encode_into(out, e);
            return;
        default:
            throw std::invalid_argument("mmdb: value type not representable");
    }
}

Ipv6Address::Bytes tree_bits(const IpAddress& ip) {
    if (ip.is_v6()) return ip.v6().bytes();
    Ipv6Address::Bytes b{};
    const auto v4 = ip.v4().bytes();
    std::copy(v4.begin(), v4.end(), b.begin() + 12);
    return b;
}

int bit_at(const Ipv6Address::Bytes& b, int i) { return (b[static_cast<std::size_t>(i / 8)] >> (7 - i % 8)) & 1; }

}  // namespace

namespace mmdb {

std::vector<std::uint8_t> encode_value(const json& value) {
    std::vector<std::uint8_t> out;
    encode_into(out, value);
    return out;
}

json decode_value(std::span<const std::uint8_t> data, std::size_t offset) {
    Decoder d(data);
    return d.decode(offset);
}

}  // namespace mmdb

MmdbReader::MmdbReader(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetUnreadable("cannot open " + path.string());
    bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    try {
        init();
    } catch (const DatasetUnreadable& e) {
        throw DatasetUnreadable(path.string() + ": " + e.what());
    }
}

MmdbReader::MmdbReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) { init(); }

void MmdbReader::init() {
    const auto* begin = bytes_.data();
    const auto* end = begin + bytes_.size();
    const auto* marker = std::find_end(begin, end, kMetadataMarker.begin(), kMetadataMarker.end(),
                                       [](std::uint8_t a, char b) { return a == static_cast<std::uint8_t>(b); });
    if (marker == end) throw DatasetUnreadable("not an MMDB file (metadata marker missing)");
    const std::size_t meta_start = static_cast<std::size_t>(marker - begin) + kMetadataMarker.size();
    std::span<const std::uint8_t> meta(bytes_.data() + meta_start, bytes_.size() - meta_start);
    metadata_ = mmdb::decode_value(meta, 0);
    if (!metadata_.is_object()) throw DatasetUnreadable("metadata is not a map");
    try {
        node_count_ = metadata_.at("node_count").get<std::uint32_t>();
        record_size_ = metadata_.at("record_size").get<int>();
        ip_version_ = metadata_.at("ip_version").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw DatasetUnreadable(std::string("metadata: ") + e.what());
    }
    if (metadata_.value("binary_format_major_version", 0) != 2) throw DatasetUnreadable("unsupported format version");
    if (record_size_ != 24 && record_size_ != 28 && record_size_ != 32) {
        throw DatasetUnreadable("unsupported record size " + std::to_string(record_size_));
    }
    tree_size_ = static_cast<std::size_t>(node_count_) * static_cast<std::size_t>(record_size_) / 4;
    if (tree_size_ + 16 > static_cast<std::size_t>(marker - begin)) throw DatasetUnreadable("search tree truncated");

    ipv4_start_ = 0;
    if (ip_version_ == 6) {
        std::uint32_t node = 0;
        for (int i = 0; i < 96 && node < node_count_; ++i) node = read_record(node, 0);
        ipv4_start_ = node;
    }
}

std::uint32_t MmdbReader::read_record(std::uint32_t node, int bit) const {
    const std::uint8_t* p = bytes_.data() + static_cast<std::size_t>(node) * static_cast<std::size_t>(record_size_) / 4;
    auto be = [](const std::uint8_t* q, int n) {
        std::uint32_t v = 0;
        for (int i = 0; i < n; ++i) v = v << 8 | q[i];
        return v;
    };
    switch (record_size_) {
        case 24: return be(p + 3 * bit, 3);
        case 28:
            if (bit == 0) return (static_cast<std::uint32_t>(p[3] & 0xF0) << 20) | be(p, 3);
            return (static_cast<std::uint32_t>(p[3] & 0x0F) << 24) | be(p + 4, 3);
        default: return be(p + 4 * bit, 4);
    }
}

std::optional<json> MmdbReader::lookup(const IpAddress& ip) const {
    int bits = 128;
    std::uint32_t node = 0;
    Ipv6Address::Bytes addr{};
    int first = 0;
    if (ip.is_v4()) {
        const auto v4 = ip.v4().bytes();
        std::copy(v4.begin(), v4.end(), addr.begin() + 12);
        if (ip_version_ == 6) {
            node = ipv4_start_;
            first = 96;
        } else {
            bits = 32;
            std::copy(v4.begin(), v4.end(), addr.begin());
        }
    } else {
        if (ip_version_ == 4) return std::nullopt;
        addr = ip.v6().bytes();
    }
    for (int i = first; i < bits && node < node_count_; ++i) node = read_record(node, bit_at(addr, i));
    if (node <= node_count_) return std::nullopt;
    if (node < node_count_ + 16) throw DatasetUnreadable("mmdb: record points into the separator");
    const std::size_t offset = node - node_count_ - 16;
    std::span<const std::uint8_t> data(bytes_.data() + tree_size_ + 16, bytes_.size() - tree_size_ - 16);
    if (offset >= data.size()) throw DatasetUnreadable("mmdb: record points outside data section");
    return mmdb::decode_value(data, offset);
}

MmdbWriter::MmdbWriter(std::string database_type, int record_size, std::uint64_t build_epoch)
    : database_type_(std::move(database_type)), record_size_(record_size), build_epoch_(build_epoch) {
    if (record_size != 24 && record_size != 28 && record_size != 32) {
        throw std::invalid_argument("record size must be 24, 28 or 32");
    }
    nodes_.emplace_back();
}

void MmdbWriter::insert(const IpPrefix& network, const json& value) {
    const int depth = network.length + (network.network.is_v4() ? 96 : 0);
    if (depth == 0) throw std::invalid_argument("mmdb writer cannot store a zero-length network");
    const auto bits = tree_bits(network.network);

    std::int64_t data_ref = -2 - static_cast<std::int64_t>(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] == value) {
            data_ref = -2 - static_cast<std::int64_t>(i);
            break;
        }
    }
    if (data_ref == -2 - static_cast<std::int64_t>(values_.size())) values_.push_back(value);

    std::size_t node = 0;
    for (int i = 0; i < depth; ++i) {
        const int b = bit_at(bits, i);
        if (i == depth - 1) {
            nodes_[node].child[b] = data_ref;
            break;
        }
        const std::int64_t c = nodes_[node].child[b];
        if (c >= 0) {
            node = static_cast<std::size_t>(c);
            continue;
        }
        // Split an empty or data leaf: both halves inherit it.
        Node fresh;
        fresh.child[0] = fresh.child[1] = c;
        nodes_.push_back(fresh);
        const auto idx = nodes_.size() - 1;
        nodes_[node].child[b] = static_cast<std::int64_t>(idx);
        node = idx;
    }
}

std::vector<std::uint8_t> MmdbWriter::serialize() const {
    std::vector<std::uint8_t> data;
    std::vector<std::size_t> offsets;
    for (const auto& v : values_) {
        offsets.push_back(data.size());
        encode_into(data, v);
    }

    const auto node_count = static_cast<std::uint64_t>(nodes_.size());
    const std::uint64_t limit = record_size_ == 32 ? 0xFFFFFFFFull : (1ull << record_size_) - 1;
    auto record_value = [&](std::int64_t c) -> std::uint64_t {
        std::uint64_t v;
        if (c == -1) v = node_count;
        else if (c >= 0) v = static_cast<std::uint64_t>(c);
        else v = node_count + 16 + offsets[static_cast<std::size_t>(-2 - c)];
        if (v > limit) throw std::length_error("mmdb: record value exceeds record size");
        return v;
    };

    std::vector<std::uint8_t> out;
    for (const auto& n : nodes_) {
        const auto l = record_value(n.child[0]);
        const auto r = record_value(n.child[1]);
        switch (record_size_) {
            case 24:
                put_uint(out, l, 3);
                put_uint(out, r, 3);
                break;
            case 28:
                put_uint(out, l & 0xFFFFFF, 3);
                out.push_back(static_cast<std::uint8_t>(((l >> 24) & 0x0F) << 4 | ((r >> 24) & 0x0F)));
                put_uint(out, r & 0xFFFFFF, 3);
                break;
            default:
                put_uint(out, l, 4);
                put_uint(out, r, 4);
        }
    }
    out.insert(out.end(), 16, 0);
    out.insert(out.end(), data.begin(), data.end());
    out.insert(out.end(), kMetadataMarker.begin(), kMetadataMarker.end());
    json meta{{"binary_format_major_version", 2u},
              {"binary_format_minor_version", 0u},
              {"build_epoch", build_epoch_},
              {"database_type", database_type_},
              {"description", json{{"en", database_type_ + " fixture"}}},
              {"ip_version", 6u},
              {"languages", json::array({"en"})},
              {"node_count", static_cast<std::uint64_t>(nodes_.size())},
              {"record_size", static_cast<std::uint64_t>(record_size_)}};
    encode_into(out, meta);
    return out;
}

void MmdbWriter::write(const std::filesystem::path& path) const {
    const auto bytes = serialize();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace dnsgap
