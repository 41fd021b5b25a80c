#include "spectral/sieve_cache.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "spectral/sieve.hpp"

namespace spectral {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "spectral-sieve-cache";
constexpr int kVersion = 1;

json header_record() { return {{"type", "header"}, {"format", kFormat}, {"version", kVersion}}; }

json primitive_record(const PrimitiveRecord& p) {
    return {{"type", "primitive"},
            {"m", p.modulus},
            {"verdict", "incomplete"},
            {"decided_by", std::string(sieve_rule::interval_oracle)},
            {"witness", {{"points", p.witness.points}, {"digits", p.witness.digits}}}};
}

json checkpoint_record(const SieveReport& r) {
    return {{"type", "checkpoint"}, {"verified_through", r.max_bound}, {"filter_stats", r.filter_stats}};
}

}  // namespace

SieveCache SieveCache::load(const std::filesystem::path& path) {
    SieveCache cache;
    std::ifstream in(path);
    if (!in) return cache;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        try {
            const json rec = json::parse(line);
            const std::string type = rec.at("type").get<std::string>();
            if (type == "header") {
                if (rec.at("format") != kFormat || rec.at("version") != kVersion)
                    throw DomainError(where + ": unsupported cache format");
                saw_header = true;
            } else if (!saw_header) {
                throw DomainError(where + ": record before header");
            } else if (type == "primitive") {
                CachedPrimitive p;
                p.modulus = rec.at("m").get<u64>();
                p.witness.modulus = p.modulus;
                p.witness.points = rec.at("witness").at("points").get<std::vector<u64>>();
                p.witness.digits = rec.at("witness").at("digits").get<std::vector<u64>>();
                if (!validate_cycle(p.witness) || p.witness.is_trivial())
                    throw DomainError(where + ": invalid witness for " + std::to_string(p.modulus));
                cache.primitives_.push_back(std::move(p));
            } else if (type == "checkpoint") {
                CacheCheckpoint c;
                c.verified_through = rec.at("verified_through").get<u64>();
                c.filter_stats = rec.at("filter_stats").get<std::map<std::string, u64>>();
                cache.checkpoints_.push_back(std::move(c));
            } else {
                throw DomainError(where + ": unknown record type '" + type + "'");
            }
        } catch (const json::exception& e) {
            throw DomainError(where + ": " + e.what());
        }
    }
    std::sort(cache.primitives_.begin(), cache.primitives_.end(),
              [](const auto& a, const auto& b) { return a.modulus < b.modulus; });
    return cache;
}

const CacheCheckpoint* SieveCache::resume_point(u64 max_bound) const {
    const CacheCheckpoint* best = nullptr;
    for (const auto& c : checkpoints_)
        if (c.verified_through <= max_bound && (!best || c.verified_through > best->verified_through)) best = &c;
    return best;
}

void SieveCache::append(const std::filesystem::path& path, const SieveCache& existing, const SieveReport& report) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw DomainError("cannot open cache file " + path.string());
    if (fresh) out << header_record().dump() << '\n';
    const u64 recorded = existing.primitives_.empty() ? 0 : existing.primitives_.back().modulus;
    for (const auto& p : report.primitives)
        if (p.modulus > recorded) out << primitive_record(p).dump() << '\n';
    const bool have_checkpoint = std::any_of(existing.checkpoints_.begin(), existing.checkpoints_.end(),
                                             [&](const auto& c) { return c.verified_through == report.max_bound; });
    if (!have_checkpoint) out << checkpoint_record(report).dump() << '\n';
}

}  // namespace spectral
