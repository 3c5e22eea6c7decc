#include "dnsgap/discovery/correlate.hpp"

#include <cstdio>
#include <ctime>
#include <stdexcept>
#include <unordered_map>

#include "dnsgap/core/label_codec.hpp"
#include "dnsgap/core/util.hpp"

namespace dnsgap {

double parse_timestamp(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw RecordFormatError("timestamp must be a number or an ISO-8601 string");
    const auto s = j.get<std::string>();
    std::tm tm{};
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                    &tm.tm_min, &tm.tm_sec, &consumed) != 6) {
        throw RecordFormatError("bad timestamp '" + s + "'");
    }
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    double frac = 0;
    std::string_view rest(s.c_str() + consumed);
    if (!rest.empty() && rest.front() == '.') {
        std::size_t i = 1;
        double scale = 0.1;
        while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') {
            frac += (rest[i] - '0') * scale;
            scale /= 10;
            ++i;
        }
        rest.remove_prefix(i);
    }
    if (rest != "Z" && rest != "+00:00" && !rest.empty()) throw RecordFormatError("timestamp must be UTC: '" + s + "'");
    return static_cast<double>(timegm(&tm)) + frac;
}

json to_json(const NsLogEntry& e) { return json{{"fqdn", e.fqdn}, {"src", e.src.to_string()}, {"ts", e.ts}}; }

NsLogEntry ns_log_entry_from_json(const json& j) {
    NsLogEntry e;
    try {
        e.fqdn = j.at("fqdn").get<std::string>();
        e.src = Ipv6Address::parse(j.at("src").get<std::string>());
        e.ts = j.contains("ts") ? parse_timestamp(j["ts"]) : 0.0;
    } catch (const json::exception& ex) {
        throw RecordFormatError(std::string("bad NS log entry: ") + ex.what());
    } catch (const AddressParseError& ex) {
        throw RecordFormatError(ex.what());
    }
    return e;
}

std::vector<NsLogEntry> read_ns_log(const std::filesystem::path& path) {
    std::vector<NsLogEntry> out;
    read_jsonl(path, [&](const json& j) { out.push_back(ns_log_entry_from_json(j)); });
    return out;
}

Correlator::Correlator(std::string zone, std::optional<std::set<Ipv4Address>> solicited)
    : zone_(normalize_name(zone)), solicited_(std::move(solicited)) {}

void Correlator::add(const NsLogEntry& entry) {
    ++stats_.entries;
    if (!name_in_zone(entry.fqdn, zone_)) {
        ++stats_.outside_zone;
        return;
    }
    Ipv4Address v4;
    try {
        v4 = decode_probe_label(entry.fqdn, zone_);
    } catch (const MalformedLabel&) {
        ++stats_.malformed;
        return;
    }
    if (solicited_ && !solicited_->count(v4)) {
        ++stats_.unsolicited;
        return;
    }
    auto [it, fresh] = seen_.try_emplace({v4, entry.src}, entry.ts);
    if (!fresh && entry.ts < it->second) it->second = entry.ts;
    stats_.candidates = seen_.size();
}

std::vector<PairCandidate> Correlator::candidates() const {
    std::vector<PairCandidate> out;
    out.reserve(seen_.size());
    for (const auto& [key, ts] : seen_) out.push_back({key.first, key.second, ts});
    return out;
}

std::vector<PairCandidate> correlate_pairs(const std::vector<NsLogEntry>& log, const std::string& zone,
                                           CorrelationStats* stats) {
    Correlator c(zone);
    for (const auto& e : log) c.add(e);
    if (stats) *stats = c.stats();
    return c.candidates();
}

std::vector<PairCandidate> prune_infrastructure(const std::vector<PairCandidate>& cands, std::size_t max_sharing) {
    std::map<Ipv6Address, std::set<Ipv4Address>> sharers;
    for (const auto& c : cands) sharers[c.v6].insert(c.v4);
    std::vector<PairCandidate> out;
    for (const auto& c : cands) {
        if (sharers[c.v6].size() <= max_sharing) out.push_back(c);
    }
    return out;
}

std::vector<ResolverPair> prune_geo_mismatch(const std::vector<PairCandidate>& cands, const Enrichment& enrich,
                                             GeoFilterStats* stats) {
    if (!enrich.geo) throw std::invalid_argument("prune_geo_mismatch needs a geolocation provider");
    GeoFilterStats local;
    std::vector<ResolverPair> out;
    for (const auto& c : cands) {
        if (!c.v4.is_global()) {
            ++local.non_routable;
            continue;
        }
        const auto c4 = enrich.geo->country(c.v4);
        const auto c6 = enrich.geo->country(c.v6);
        if (!c4 || !c6) {
            ++local.unknown_geo;
            continue;
        }
        if (*c4 != *c6) {
            ++local.mismatched;
            continue;
        }
        ResolverPair p;
        p.v4 = c.v4;
        p.v6 = c.v6;
        p.v6_kind = classify_v6_kind(c.v6);
        p.country = *c4;
        if (enrich.asn) {
            if (auto a = enrich.asn->asn(c.v4)) {
                p.asn = a->asn;
                p.as_name = a->name;
            }
        }
        if (enrich.conn) {
            if (auto ct = enrich.conn->conn_type(c.v4)) p.conn_type = *ct;
        }
        out.push_back(std::move(p));
    }
    local.kept = out.size();
    if (stats) *stats = local;
    return out;
}

}  // namespace dnsgap
