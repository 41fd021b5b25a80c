#pragma once

// Append-only record file that lets long sieve runs resume.
//
//   {"type":"header","format":"spectral-sieve-cache","version":1}
//   {"type":"primitive","m":85,"verdict":"incomplete","decided_by":"oracle","witness":{...}}
//   {"type":"checkpoint","verified_through":100000,"filter_stats":{...}}
//
// A checkpoint states that every primitive up to verified_through appears
// among the primitive records above it.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spectral/cycles.hpp"

namespace spectral {

struct SieveReport;

struct CacheCheckpoint {
    u64 verified_through = 0;
    std::map<std::string, u64> filter_stats;
};

struct CachedPrimitive {
    u64 modulus = 0;
    ExtremeCycle witness;
};

class SieveCache {
public:
    /// Reads the file; a missing file yields an empty cache. Throws
    /// DomainError on malformed records.
    static SieveCache load(const std::filesystem::path& path);

    const std::vector<CachedPrimitive>& primitives() const { return primitives_; }
    const std::vector<CacheCheckpoint>& checkpoints() const { return checkpoints_; }

    /// Largest checkpoint not above max_bound, if any.
    const CacheCheckpoint* resume_point(u64 max_bound) const;

    /// Appends the primitives of `report` not yet recorded and a checkpoint
    /// for report.max_bound unless one exists. Writes the header when the file
    /// is new.
    static void append(const std::filesystem::path& path, const SieveCache& existing, const SieveReport& report);

private:
    std::vector<CachedPrimitive> primitives_;
    std::vector<CacheCheckpoint> checkpoints_;
};

}  // namespace spectral
