#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spectral/classify.hpp"
#include "spectral/cycles.hpp"
#include "spectral/modmath.hpp"
#include "spectral/numerics.hpp"
#include "spectral/sieve.hpp"
#include "spectral/sieve_cache.hpp"

namespace spectral::cli {

namespace {

using nlohmann::json;

std::string join(const std::vector<u64>& xs, const char* sep) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? sep : "") << xs[i];
    return os.str();
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_factors(const FactoredInteger& f) {
    if (f.is_one()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [p, k] : f.factors()) {
        os << (first ? "" : " * ") << p;
        if (k > 1) os << '^' << k;
        first = false;
    }
    return os.str();
}

json cycle_json(const ExtremeCycle& c) { return {{"points", c.points}, {"digits", c.digits}}; }

std::string cycle_text(const ExtremeCycle& c) {
    return "(" + join(c.points, ", ") + ") digits (" + join(c.digits, ", ") + ")";
}

json factors_json(const FactoredInteger& f) {
    json arr = json::array();
    for (const auto& [p, k] : f.factors()) arr.push_back({p, k});
    return arr;
}

void emit_json(std::ostream& out, const std::string& command, json input, json result) {
    json envelope = {{"command", command}, {"input", std::move(input)}, {"result", std::move(result)},
                     {"format", "json"}};
    out << envelope.dump() << '\n';
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot write " + path);
    return f;
}

std::optional<std::filesystem::path> cache_path(const std::string& flag) {
    if (!flag.empty()) return std::filesystem::path(flag);
    return std::nullopt;
}

// --- commands ----------------------------------------------------------------

void cmd_classify(u64 m, bool as_json, const std::string& cache_flag, std::ostream& out) {
    std::optional<PrimitiveCache> cache;
    if (auto path = cache_path(cache_flag)) {
        const SieveCache file = SieveCache::load(*path);
        if (!file.checkpoints().empty()) {
            u64 bound = 0;
            for (const auto& c : file.checkpoints()) bound = std::max(bound, c.verified_through);
            std::vector<PrimitiveCache::Entry> entries;
            for (const auto& p : file.primitives())
                if (p.modulus <= bound) entries.push_back({p.modulus, factorize(p.modulus), p.witness});
            cache.emplace(std::move(entries), bound);
        }
    }
    ClassifyOptions opts;
    if (cache) opts.cache = &*cache;
    const Classification c = classify(m, opts);
    if (as_json) {
        json result = {{"verdict", to_string(c.verdict)}, {"primitive", c.primitive}, {"decided_by", c.decided_by}};
        result["witness"] = c.witness ? cycle_json(*c.witness) : json(nullptr);
        emit_json(out, "classify", {{"m", m}}, std::move(result));
        return;
    }
    out << m << ": ";
    if (c.incomplete()) {
        out << "INCOMPLETE" << (c.primitive ? " (primitive)" : "") << ", witness cycle " << cycle_text(*c.witness);
    } else {
        out << "COMPLETE";
    }
    out << ", rule=" << c.decided_by << '\n';
}

void cmd_cycles(u64 m, bool as_json, std::ostream& out) {
    const CycleInventory inv = find_cycles(m);
    if (as_json) {
        json cycles = json::array();
        for (const auto& c : inv.cycles) cycles.push_back(cycle_json(c));
        emit_json(out, "cycles", {{"m", m}}, {{"cycles", cycles}, {"point_count", inv.point_count}});
        return;
    }
    out << "m=" << m << " cycles=" << inv.cycles.size() << " points=" << inv.point_count << '\n';
    for (const auto& c : inv.cycles) out << cycle_text(c) << '\n';
}

void cmd_order(u64 m, bool as_json, std::ostream& out) {
    const OrderRecord rec = order_of_4(m);
    const FactoredInteger f = factorize(m);
    json per_prime = json::array();
    std::ostringstream lines;
    for (const auto& [p, k] : f.factors()) {
        const u64 o = order_of_4(p).order;
        std::optional<unsigned> iota;
        try {
            iota = simplicity_index(p);
        } catch (const DomainError&) {
        }
        per_prime.push_back({{"prime", p}, {"exponent", k}, {"o4", o}, {"iota4", iota ? json(*iota) : json(nullptr)}});
        lines << p << ": o4=" << o << " iota4=" << (iota ? std::to_string(*iota) : "n/a") << '\n';
    }
    if (as_json) {
        emit_json(out, "order", {{"m", m}}, {{"o4", rec.order}, {"factors", factors_json(f)}, {"primes", per_prime}});
        return;
    }
    out << "o4=" << rec.order << '\n' << "factors: " << format_factors(f) << '\n' << lines.str();
}

void write_table1_csv(std::ostream& csv, const SieveReport& r) {
    csv << "m,prime_decomposition,o4_per_prime\n";
    for (const auto& p : r.primitives)
        csv << p.modulus << ',' << csv_field(join(p.factors.primes(), ",")) << ','
            << csv_field(join(p.prime_orders, ",")) << '\n';
}

void cmd_sieve(u64 max, unsigned workers, const std::string& csv_path, const std::string& cache_flag, bool as_json,
               std::ostream& out, std::ostream& err) {
    SieveOptions opts;
    opts.workers = workers;
    opts.cache_path = cache_path(cache_flag);
    opts.progress = [&err](u64 done, u64 total) { err << "sieve: " << done << " / " << total << '\n'; };
    const SieveReport r = sieve_primitives(max, opts);
    err << "sieve: " << r.primitives.size() << " primitives up to " << max << " in " << std::fixed
        << std::setprecision(2) << r.elapsed.count() << " s with " << r.worker_count << " worker(s)\n";
    if (!csv_path.empty()) {
        auto csv = open_output(csv_path);
        write_table1_csv(csv, r);
    }
    if (as_json) {
        json prims = json::array();
        for (const auto& p : r.primitives)
            prims.push_back({{"m", p.modulus},
                             {"factors", factors_json(p.factors)},
                             {"prime_orders", p.prime_orders},
                             {"witness", cycle_json(p.witness)}});
        emit_json(out, "sieve", {{"max", max}, {"workers", workers}},
                  {{"primitives", prims}, {"filter_stats", r.filter_stats}, {"examined", r.examined()}});
        return;
    }
    out << "m | prime decomposition | o4 for the primes\n";
    for (const auto& p : r.primitives)
        out << p.modulus << " | " << join(p.factors.primes(), ",") << " | " << join(p.prime_orders, ",") << '\n';
    out << "examined " << r.examined() << " odd moduli\n";
    for (const auto& [rule, count] : r.filter_stats) out << "  " << rule << ": " << count << '\n';
}

void cmd_table2(u64 max, const std::string& csv_path, bool as_json, std::ostream& out) {
    const auto table = prime_order_table(max);
    if (!csv_path.empty()) {
        auto csv = open_output(csv_path);
        csv << "p,o4\n";
        for (const auto& [p, o] : table) csv << p << ',' << o << '\n';
    }
    if (as_json) {
        json rows = json::array();
        for (const auto& [p, o] : table) rows.push_back({p, o});
        emit_json(out, "table2", {{"max", max}}, {{"primes", rows}, {"count", table.size()}});
        return;
    }
    out << "p | o4(p)\n";
    for (const auto& [p, o] : table) out << p << " | " << o << '\n';
    out << table.size() << " primes\n";
}

void cmd_witness(unsigned n, bool as_json, std::ostream& out) {
    const InfinitudeWitness w = infinitude_witness(n);
    if (as_json) {
        emit_json(out, "witness", {{"n", n}},
                  {{"m", w.modulus.str()}, {"verified", w.verified}, {"cycle_length", w.cycle_length}});
        return;
    }
    out << "n=" << n << " m=" << w.modulus.str() << " verified=" << (w.verified ? "true" : "false")
        << " cycle_length=" << w.cycle_length << '\n';
}

void cmd_conjectures(u64 max, unsigned workers, bool as_json, std::ostream& out, std::ostream& err) {
    const ConjectureReport r = scan_conjectures(max, workers);
    const auto violations = [](const std::vector<ConjectureViolation>& vs) {
        json arr = json::array();
        for (const auto& v : vs) arr.push_back({{"m", v.modulus}, {"evidence", v.evidence}});
        return arr;
    };
    if (!r.clean()) err << "WARNING: conjecture violations found up to " << max << "\n";
    if (as_json) {
        emit_json(out, "conjectures", {{"max", max}},
                  {{"conjecture1_squarefree", violations(r.conjecture1_squarefree)},
                   {"conjecture1_lcm", violations(r.conjecture1_lcm)},
                   {"conjecture2", violations(r.conjecture2)},
                   {"primitives_checked", r.primitives_checked},
                   {"coprime_candidates", r.coprime_candidates}});
        return;
    }
    out << "primitives checked: " << r.primitives_checked << '\n'
        << "coprime-order candidates checked: " << r.coprime_candidates << '\n';
    const auto report = [&out](const char* name, const std::vector<ConjectureViolation>& vs) {
        out << name << ": " << (vs.empty() ? "no violations" : std::to_string(vs.size()) + " VIOLATIONS") << '\n';
        for (const auto& v : vs) out << "  VIOLATION " << v.modulus << ": " << v.evidence << '\n';
    };
    report("square-free primitives", r.conjecture1_squarefree);
    report("lcm attained at a prime", r.conjecture1_lcm);
    report("coprime orders imply complete", r.conjecture2);
}

void cmd_muhat(double t, int depth, std::optional<double> to, unsigned points, bool as_json, std::ostream& out) {
    const TruncatedTransform<double> transform(depth);
    if (!to) {
        const auto v = transform(t);
        if (as_json) {
            emit_json(out, "muhat", {{"t", t}, {"depth", depth}},
                      {{"re", v.real()}, {"im", v.imag()}, {"abs", std::abs(v)}});
            return;
        }
        out << "t=" << format_double(t) << " depth=" << depth << " re=" << format_double(v.real())
            << " im=" << format_double(v.imag()) << " abs=" << format_double(std::abs(v)) << '\n';
        return;
    }
    if (points < 2) throw DomainError("muhat: --points must be >= 2");
    out << "t,re,im,abs\n";
    for (unsigned i = 0; i < points; ++i) {
        const double s = t + (*to - t) * i / (points - 1);
        const auto v = transform(s);
        out << format_double(s) << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << ','
            << format_double(std::abs(v)) << '\n';
    }
}

void cmd_gram(u64 m, int level, std::optional<int> depth_flag, bool as_json, std::ostream& out) {
    const SpectrumTruncation s(m, level);
    const int depth = depth_flag ? *depth_flag : std::max(kDefaultDepth, minimal_gram_depth(s));
    const auto g = gram_matrix<double>(s, depth);
    const double off = max_off_diagonal(g);
    if (as_json) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < g.cols(); ++j) row.push_back({g(i, j).real(), g(i, j).imag()});
            rows.push_back(row);
        }
        emit_json(out, "gram", {{"m", m}, {"level", level}, {"depth", depth}},
                  {{"elements", s.elements}, {"matrix", rows}, {"max_off_diagonal", off}});
        return;
    }
    out << "m=" << m << " level=" << level << " depth=" << depth << " size=" << s.size()
        << " max_off_diagonal=" << format_double(off) << '\n';
    out << "elements: " << join(s.elements, " ") << '\n';
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            out << (j ? " " : "") << format_double(g(i, j).real()) << (g(i, j).imag() < 0 ? "" : "+")
                << format_double(g(i, j).imag()) << 'i';
        out << '\n';
    }
}

}  // namespace

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Completeness of scaled spectra for the quarter-Cantor measure", "spectral"};
    app.require_subcommand(1);

    u64 m = 0;
    bool as_json = false;
    std::string cache_flag;

    auto* classify_cmd = app.add_subcommand("classify", "Complete / incomplete / primitive verdict for odd m");
    classify_cmd->add_option("m", m, "odd modulus")->required();
    classify_cmd->add_flag("--json", as_json);
    classify_cmd->add_option("--cache", cache_flag, "sieve cache file")->envname("SPECTRAL_CACHE");

    auto* cycles_cmd = app.add_subcommand("cycles", "All non-trivial extreme cycles for digits {0, m}");
    cycles_cmd->add_option("m", m, "odd modulus")->required();
    cycles_cmd->add_flag("--json", as_json);

    auto* order_cmd = app.add_subcommand("order", "o4(m), factorization, per-prime o4 and simplicity index");
    order_cmd->add_option("m", m, "odd modulus")->required();
    order_cmd->add_flag("--json", as_json);

    u64 max = 0;
    unsigned workers = 1;
    std::string csv_path;
    auto* sieve_cmd = app.add_subcommand("sieve", "All primitive numbers up to --max");
    sieve_cmd->add_option("--max", max, "upper bound")->required();
    sieve_cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sieve_cmd->add_option("--csv", csv_path, "write m, primes, orders as CSV");
    sieve_cmd->add_option("--cache", cache_flag, "resumable record file")->envname("SPECTRAL_CACHE");
    sieve_cmd->add_flag("--json", as_json);

    auto* table2_cmd = app.add_subcommand("table2", "Odd primes up to --max with o4(p)");
    table2_cmd->add_option("--max", max, "largest prime")->required();
    table2_cmd->add_option("--csv", csv_path, "write p, o4 as CSV");
    table2_cmd->add_flag("--json", as_json);

    unsigned n = 0;
    auto* witness_cmd = app.add_subcommand("witness", "Verify that (4^(n+1)-1)/3 has a cycle through 7");
    witness_cmd->add_option("--n", n, "exponent, >= 3")->required();
    witness_cmd->add_flag("--json", as_json);

    auto* conj_cmd = app.add_subcommand("conjectures", "Scan primitive numbers and coprime-order moduli");
    conj_cmd->add_option("--max", max, "upper bound")->required();
    conj_cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    conj_cmd->add_flag("--json", as_json);

    double t = 0;
    int depth = kDefaultDepth;
    std::optional<double> t_to;
    unsigned points = 0;
    auto* muhat_cmd = app.add_subcommand("muhat", "Truncated Fourier transform of the measure");
    muhat_cmd->add_option("--t", t, "frequency")->required();
    muhat_cmd->add_option("--depth", depth, "number of product factors")->check(CLI::PositiveNumber);
    auto* to_opt = muhat_cmd->add_option("--to", t_to, "end of a CSV grid starting at --t");
    muhat_cmd->add_option("--points", points, "grid points")->needs(to_opt);
    muhat_cmd->add_flag("--json", as_json);

    int level = 0;
    std::optional<int> gram_depth;
    auto* gram_cmd = app.add_subcommand("gram", "Gram matrix of exponentials over a truncated spectrum");
    gram_cmd->add_option("--m", m, "odd modulus")->required();
    gram_cmd->add_option("--level", level, "digits per frequency")->required();
    gram_cmd->add_option("--depth", gram_depth, "number of product factors");
    gram_cmd->add_flag("--json", as_json);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*classify_cmd) cmd_classify(m, as_json, cache_flag, out);
        else if (*cycles_cmd) cmd_cycles(m, as_json, out);
        else if (*order_cmd) cmd_order(m, as_json, out);
        else if (*sieve_cmd) cmd_sieve(max, workers, csv_path, cache_flag, as_json, out, err);
        else if (*table2_cmd) cmd_table2(max, csv_path, as_json, out);
        else if (*witness_cmd) cmd_witness(n, as_json, out);
        else if (*conj_cmd) cmd_conjectures(max, workers, as_json, out, err);
        else if (*muhat_cmd) cmd_muhat(t, depth, t_to, t_to ? (points ? points : 101) : 0, as_json, out);
        else if (*gram_cmd) cmd_gram(m, level, gram_depth, as_json, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InconsistencyError& e) {
        err << "internal inconsistency: " << e.what() << '\n';
        return kExitInconsistent;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInconsistent;
    }
    out.flush();
    return kExitOk;
}

}  // namespace spectral::cli
