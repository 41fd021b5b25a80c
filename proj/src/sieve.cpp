#include "spectral/sieve.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>

#include "spectral/sieve_cache.hpp"

namespace spectral {

namespace {

using Clock = std::chrono::steady_clock;

// Odd moduli per work item.
constexpr u64 kChunk = 4096;

enum class Rule : std::uint8_t {
    multiple_of_3,
    prime_power,
    family,
    primitive_divisor,
    order_bound,
    gmembership,
    interval_oracle,
    count_,
};

constexpr std::array<std::string_view, static_cast<std::size_t>(Rule::count_)> kRuleNames{
    sieve_rule::multiple_of_3, sieve_rule::prime_power, sieve_rule::family, sieve_rule::primitive_divisor,
    sieve_rule::order_bound,   sieve_rule::gmembership, sieve_rule::interval_oracle,
};

using RuleCounts = std::array<u64, static_cast<std::size_t>(Rule::count_)>;

struct ChunkResult {
    RuleCounts counts{};
    std::vector<std::pair<u64, ExtremeCycle>> primitives;
};

// Shared read-only state for one run.
class SieveContext {
public:
    explicit SieveContext(u64 max_bound) : factors_(max_bound), prime_orders_(max_bound + 1, 0) {
        for (u64 p = 3; p <= max_bound; p += 2)
            if (factors_.is_prime(p)) prime_orders_[p] = order_of(FactoredInteger::from_factors({{p, 1}}));
    }

    const SmallestFactorTable& factors() const { return factors_; }
    u64 prime_order(u64 p) const { return prime_orders_[p]; }

    u64 order_of(const FactoredInteger& f) const {
        return order_of_4_refined(f, [this](u64 n) { return factors_.factorize_any(n); });
    }

    u64 order_of_4(const FactoredInteger& f) const {
        u64 order = 1;
        for (const auto& [p, k] : f.factors()) {
            const u64 part = k == 1 ? prime_orders_[p] : order_of(FactoredInteger::from_factors({{p, k}}));
            order = std::lcm(order, part);
        }
        return order;
    }

private:
    SmallestFactorTable factors_;
    std::vector<std::uint32_t> prime_orders_;
};

// Decides one modulus given every primitive number below the current block.
// Returns the settling rule; fills `witness` when m is primitive.
Rule decide(u64 m, const SieveContext& ctx, std::span<const u64> known, std::optional<ExtremeCycle>& witness) {
    if (m % 3 == 0 && m != 3) return Rule::multiple_of_3;
    if (m != 3) {
        const FactoredInteger f = ctx.factors().factorize(m);
        if (prime_power_filter(f).proves_complete()) return Rule::prime_power;
        if (family_filter(m).proves_complete()) return Rule::family;
        for (u64 p : known) {
            if (p > m / 5) break;
            if (m % p == 0) return Rule::primitive_divisor;
        }
        const u64 order = ctx.order_of_4(f);
        if (order_bound_filter(m, order).proves_not_primitive()) return Rule::order_bound;
        const Coset group = group_of_4(m);
        if (group.size() != order) throw InconsistencyError("|G_m| != o4(m) for m = " + std::to_string(m));
        if (gmembership_filter(group).proves_complete()) return Rule::gmembership;
    }
    CycleInventory inv = interval_cycle_search(m);
    if (!inv.empty()) witness = std::move(inv.cycles.front());
    return Rule::interval_oracle;
}

ChunkResult run_chunk(u64 first, u64 last, const SieveContext& ctx, std::span<const u64> known) {
    ChunkResult out;
    for (u64 m = first; m <= last; m += 2) {
        std::optional<ExtremeCycle> witness;
        const Rule r = decide(m, ctx, known, witness);
        ++out.counts[static_cast<std::size_t>(r)];
        if (witness) out.primitives.emplace_back(m, std::move(*witness));
    }
    return out;
}

// Processes the odd moduli of [lo, hi] with `workers` threads pulling chunks
// from a shared counter; results are merged in chunk order.
std::vector<ChunkResult> run_block(u64 lo, u64 hi, unsigned workers, const SieveContext& ctx,
                                   std::span<const u64> known) {
    const u64 odd_count = (hi - lo) / 2 + 1;
    const u64 chunks = (odd_count + kChunk - 1) / kChunk;
    std::vector<ChunkResult> results(chunks);
    std::atomic<u64> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto work = [&] {
        try {
            for (u64 c = next++; c < chunks; c = next++) {
                const u64 first = lo + 2 * c * kChunk;
                const u64 last = std::min(hi, first + 2 * (kChunk - 1));
                results[c] = run_chunk(first, last, ctx, known);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = chunks;
        }
    };

    const unsigned threads = static_cast<unsigned>(std::min<u64>(workers, chunks));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

PrimitiveRecord make_record(u64 m, ExtremeCycle witness, const SieveContext& ctx) {
    PrimitiveRecord r;
    r.modulus = m;
    r.factors = ctx.factors().factorize(m);
    for (u64 p : r.factors.primes()) r.prime_orders.push_back(ctx.prime_order(p));
    r.witness = std::move(witness);
    return r;
}

// Single-threaded re-check of every reported primitive with the cycle oracle.
void reverify(const PrimitiveRecord& r) {
    const std::string m = std::to_string(r.modulus);
    const CycleCheck check = validate_cycle(r.witness);
    if (!check || r.witness.is_trivial() || r.witness.modulus != r.modulus)
        throw InconsistencyError("witness for primitive " + m + " is invalid: " + check.detail);
    const CycleInventory inv = find_cycles(r.modulus);
    if (inv.empty() || inv.cycles.front() != r.witness)
        throw InconsistencyError("oracle does not reproduce the witness for " + m);
    for (u64 p : r.factors.primes()) {
        const u64 d = r.modulus / p;
        if (d > 1 && !find_cycles(d).empty())
            throw InconsistencyError(m + " has incomplete proper divisor " + std::to_string(d));
    }
}

}  // namespace

std::vector<u64> SieveReport::moduli() const {
    std::vector<u64> out;
    for (const auto& p : primitives) out.push_back(p.modulus);
    return out;
}

u64 SieveReport::examined() const { return max_bound < 3 ? 0 : (max_bound - 3) / 2 + 1; }

PrimitiveCache SieveReport::to_cache() const {
    std::vector<PrimitiveCache::Entry> entries;
    for (const auto& p : primitives) entries.push_back({p.modulus, p.factors, p.witness});
    return PrimitiveCache(std::move(entries), max_bound);
}

SieveReport sieve_primitives(u64 max_bound, unsigned workers) {
    SieveOptions opts;
    opts.workers = workers;
    return sieve_primitives(max_bound, opts);
}

SieveReport sieve_primitives(u64 max_bound, const SieveOptions& opts) {
    if (max_bound < 3) throw DomainError("sieve_primitives: max_bound must be >= 3");
    if (opts.workers == 0) throw DomainError("sieve_primitives: need at least one worker");
    if (max_bound > 0xFFFFFFFFu) throw DomainError("sieve_primitives: max_bound must be below 2^32");
    const auto started = Clock::now();

    SieveCache cache;
    const CacheCheckpoint* resume = nullptr;
    if (opts.cache_path) {
        cache = SieveCache::load(*opts.cache_path);
        resume = cache.resume_point(max_bound);
    }

    const SieveContext ctx(max_bound);
    SieveReport report;
    report.max_bound = max_bound;
    report.worker_count = opts.workers;
    RuleCounts totals{};
    std::vector<u64> known;

    u64 lo = 3;
    if (resume) {
        for (const auto& p : cache.primitives()) {
            if (p.modulus > resume->verified_through) break;
            known.push_back(p.modulus);
            report.primitives.push_back(make_record(p.modulus, p.witness, ctx));
        }
        for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
            auto it = resume->filter_stats.find(std::string(kRuleNames[i]));
            if (it != resume->filter_stats.end()) totals[i] = it->second;
        }
        lo = resume->verified_through + 1;
        if (lo % 2 == 0) ++lo;
    }

    while (lo <= max_bound) {
        const u64 hi = std::min<u64>(max_bound, lo * 5 - 1);
        for (auto& chunk : run_block(lo, hi, opts.workers, ctx, known)) {
            for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += chunk.counts[i];
            for (auto& [m, w] : chunk.primitives) {
                known.push_back(m);
                report.primitives.push_back(make_record(m, std::move(w), ctx));
            }
        }
        if (opts.progress) opts.progress(hi, max_bound);
        lo = hi % 2 == 0 ? hi + 1 : hi + 2;
    }

    for (const auto& p : report.primitives) reverify(p);
    for (std::size_t i = 0; i < totals.size(); ++i) report.filter_stats[std::string(kRuleNames[i])] = totals[i];

    u64 settled = 0;
    for (const auto& [rule, count] : report.filter_stats) settled += count;
    if (settled != report.examined())
        throw InconsistencyError("filter statistics cover " + std::to_string(settled) + " of " +
                                 std::to_string(report.examined()) + " moduli");

    if (opts.cache_path) SieveCache::append(*opts.cache_path, cache, report);
    report.elapsed = Clock::now() - started;
    return report;
}

std::vector<PrimeOrder> prime_order_table(u64 max_prime) {
    if (max_prime < 3) throw DomainError("prime_order_table: max_prime must be >= 3");
    const SmallestFactorTable table(max_prime);
    std::vector<PrimeOrder> out;
    for (u64 p = 3; p <= max_prime; p += 2) {
        if (!table.is_prime(p)) continue;
        const u64 order =
            order_of_4_refined(FactoredInteger::from_factors({{p, 1}}), [&](u64 n) { return table.factorize_any(n); });
        out.push_back({p, order});
    }
    return out;
}

InfinitudeWitness infinitude_witness(unsigned n) {
    if (n < 3) throw DomainError("infinitude_witness: n must be >= 3");
    InfinitudeWitness w;
    w.n = n;
    w.modulus = (BigInt(1) << (2 * (n + 1))) - 1;
    w.modulus /= 3;
    const BigInt start = 7;
    if (start * 3 > w.modulus) return w;
    BigInt x = start;
    for (unsigned i = 1; i <= n + 1; ++i) {
        if ((x & 3) == 0) {
            x >>= 2;
        } else if (((x + w.modulus) & 3) == 0) {
            x = (x + w.modulus) >> 2;
        } else {
            return w;
        }
        if (x == start) {
            w.verified = true;
            w.cycle_length = i;
            return w;
        }
    }
    return w;
}

ConjectureReport scan_conjectures(u64 max_bound, unsigned workers) {
    return scan_conjectures(sieve_primitives(max_bound, workers));
}

ConjectureReport scan_conjectures(const SieveReport& sieve) {
    ConjectureReport out;
    out.max_bound = sieve.max_bound;
    const u64 n = sieve.max_bound;

    for (const auto& p : sieve.primitives) {
        ++out.primitives_checked;
        const std::string m = std::to_string(p.modulus);
        if (!p.factors.is_square_free())
            out.conjecture1_squarefree.push_back({p.modulus, m + " has a repeated prime factor"});
        u64 l = 1;
        for (u64 o : p.prime_orders) l = std::lcm(l, o);
        if (std::find(p.prime_orders.begin(), p.prime_orders.end(), l) == p.prime_orders.end())
            out.conjecture1_lcm.push_back({p.modulus, "lcm of prime orders " + std::to_string(l) +
                                                          " is not the order of any prime factor of " + m});
    }

    // Odd m <= n is incomplete exactly when some primitive divides it.
    std::vector<bool> incomplete(n + 1, false);
    for (u64 p : sieve.moduli())
        for (u64 k = p; k <= n; k += 2 * p) incomplete[k] = true;

    const SmallestFactorTable table(n);
    std::vector<std::uint32_t> order_cache(n + 1, 0);
    const auto prime_order = [&](u64 p) {
        if (order_cache[p] == 0)
            order_cache[p] = static_cast<std::uint32_t>(order_of_4_refined(FactoredInteger::from_factors({{p, 1}}),
                                                [&](u64 x) { return table.factorize_any(x); }));
        return u64{order_cache[p]};
    };

    std::vector<u64> numbers;
    for (u64 m = 5; m <= n; m += 2) {
        if (m % 3 == 0 || table.is_prime(m)) continue;
        const auto factors = table.factorize_any(m);
        numbers.clear();
        for (const auto& [p, k] : factors) {
            numbers.push_back(p);
            numbers.push_back(prime_order(p));
        }
        bool coprime = true;
        for (std::size_t i = 0; i < numbers.size() && coprime; ++i)
            for (std::size_t j = i + 1; j < numbers.size() && coprime; ++j)
                if (std::gcd(numbers[i], numbers[j]) != 1) coprime = false;
        if (!coprime) continue;
        ++out.coprime_candidates;
        if (incomplete[m]) {
            const PrimitiveRecord* divisor = nullptr;
            for (const auto& p : sieve.primitives)
                if (m % p.modulus == 0) {
                    divisor = &p;
                    break;
                }
            out.conjecture2.push_back({m, std::to_string(m) + " has coprime prime orders but is divisible by primitive " +
                                              std::to_string(divisor ? divisor->modulus : 0)});
        }
    }
    return out;
}

}  // namespace spectral
