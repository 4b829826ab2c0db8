#include <gmpxx.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "minetrace/attribution/attribution.hpp"
#include "minetrace/core/blob.hpp"
#include "minetrace/core/difficulty.hpp"
#include "minetrace/core/digest.hpp"
#include "minetrace/core/pow.hpp"
#include "minetrace/pool/session.hpp"
#include "minetrace/pool/simulator.hpp"
#include "minetrace/report/render.hpp"
#include "minetrace/report/scan.hpp"
#include "minetrace/shortlink/shortlink.hpp"
#include "minetrace/wasm/classify.hpp"
#include "minetrace/wasm/module.hpp"
#include "support/bigint.hpp"
#include "support/random.hpp"
#include "support/tree_oracle.hpp"
#include "support/wasm_builder.hpp"

using namespace minetrace;
using namespace std::chrono_literals;

namespace {

int failures = 0;

void verdict(const char* name, bool ok, const std::string& detail)
{
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

bool within(double value, double expected, double relative)
{
    return std::fabs(value - expected) <= relative * std::fabs(expected);
}

std::string fmt(const char* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

void estimator_arithmetic()
{
    const auto e = attribution::estimate_from_rates(55.4e9, 8.5);
    const double share_pct = std::round(e.pool_share * 10'000) / 100;
    const bool ok = within(e.network_hashrate, 462e6, 0.005) && share_pct == 1.18 &&
                    within(e.pool_hashrate, 5.5e6, 0.02) && within(e.users_low, 58e3, 0.10) &&
                    within(e.users_high, 292e3, 0.10);
    verdict("estimator arithmetic", ok,
            fmt("network %.2f MH/s, share %.2f%%, pool %.3f MH/s, users %.1fK..%.1fK", e.network_hashrate / 1e6,
                share_pct, e.pool_hashrate / 1e6, e.users_low / 1e3, e.users_high / 1e3));
}

void revenue_conservation()
{
    const auto r = attribution::revenue(1271 * atomic_units_per_xmr, attribution::Split{3, 10}, 120);
    bool conserved = r.operator_cut + r.user_payout == r.total;
    // odd totals and other splits
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const auto split = attribution::Split{rng() % 101, 100};
        const auto x = attribution::revenue(rng() >> 8, split, 1);
        conserved = conserved && x.operator_cut + x.user_payout == x.total && x.operator_cut <= x.total;
    }
    const bool ok = conserved && r.fiat() == 152'520.0 && within(r.fiat(), 150'000, 0.05);
    verdict("revenue conservation and fiat", ok,
            fmt("fiat %.2f USD, operator %.4f + users %.4f = %.4f XMR", r.fiat(), r.operator_xmr(), r.user_xmr(),
                r.total_xmr()));
}

struct RunScore {
    std::size_t truth = 0;
    std::size_t found = 0;
    std::size_t true_positive = 0;
};

// Collects every job over TCP while the script advances, then attributes.
RunScore attribution_run(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    pool::SimulatorConfig config;
    config.chain_script = pool::synthetic_chain_script({}, seed);
    const auto wins = std::uniform_int_distribution<std::size_t>(20, 40)(rng);
    config.pool_wins = pool::choose_pool_wins(100, wins, seed ^ 0x5eed);
    config.blobs_per_tip = 8;
    config.tokens = {"site"};
    config.key = {39, static_cast<std::uint8_t>(rng() | 1)};
    config.seed = seed;
    pool::PoolSimulator sim(config);
    pool::SimulatorServer server(sim);
    server.start();

    std::vector<pool::Job> log;
    auto session = pool::PoolSession::login({server.url(), "site"});
    log.push_back(session.initial_job());
    const auto drain = [&](std::chrono::milliseconds wait) {
        while (auto pushed = session.wait_push(std::chrono::steady_clock::now() + wait))
            log.push_back(*pushed);
    };
    const auto jobs_per_tip = 1 + rng() % 4;
    while (sim.remaining_steps() > 0) {
        for (std::size_t i = 0; i < jobs_per_tip; ++i)
            log.push_back(session.get_job());
        drain(0ms);
        sim.advance_tip();
    }
    drain(50ms);
    session.close();
    server.stop();

    const auto clusters = attribution::cluster_jobs(log, config.key);
    const auto chain = sim.chain();
    const auto report = attribution::attribute(clusters.clusters, chain);
    const auto won = sim.pool_won_heights();
    const std::set<std::uint64_t> truth(won.begin(), won.end());
    RunScore score;
    score.truth = truth.size();
    score.found = report.attributed.size();
    for (const auto& a : report.attributed)
        score.true_positive += truth.count(a.block.height);
    return score;
}

void attribution_equivalence()
{
    const auto start = std::chrono::steady_clock::now();
    std::size_t truth = 0, found = 0, tp = 0;
    bool wins_in_range = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = attribution_run(seed);
        truth += s.truth;
        found += s.found;
        tp += s.true_positive;
        wins_in_range = wins_in_range && s.truth >= 20 && s.truth <= 40;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double precision = found == 0 ? 0 : static_cast<double>(tp) / static_cast<double>(found);
    const double recall = truth == 0 ? 0 : static_cast<double>(tp) / static_cast<double>(truth);
    verdict("attribution oracle equivalence", precision == 1.0 && recall == 1.0 && wins_in_range && seconds < 60,
            fmt("20 runs over TCP, %zu pool blocks, precision %.3f, recall %.3f, %.2f s", truth, precision, recall,
                seconds));
}

void tree_hash_reference()
{
    std::mt19937_64 rng(32);
    std::size_t cases = 0, agree = 0;
    for (std::size_t count = 1; count <= 32; ++count)
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<HashDigest> leaves(count);
            for (auto& leaf : leaves)
                leaf = testing::random_digest(rng);
            ++cases;
            agree += tree_hash(leaves) == testing::reference_tree_hash(leaves, keccak256);
        }
    verdict("tree hash", agree == cases, fmt("%zu/%zu leaf sets agree with the recursive reference", agree, cases));
}

void difficulty_check()
{
    std::mt19937_64 rng(256);
    mpz_class two256 = 1;
    two256 <<= 256;
    std::size_t agree = 0, boundary = 0;
    constexpr std::size_t pairs = 1000;
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::uint64_t d = i % 2 == 0 ? rng() | 1 : (rng() >> (rng() % 64)) | 1;
        HashDigest h;
        if (i % 4 == 0) {
            h = testing::random_digest(rng);
        } else if (i % 4 == 1) {
            // a power of two: H * d = 2^256 exactly, and one below it
            const unsigned k = 1 + static_cast<unsigned>(rng() % 63);
            const mpz_class q = two256 >> k;
            const std::uint64_t dk = std::uint64_t{1} << k;
            const bool exact = rng() % 2 == 0;
            h = testing::from_mpz(exact ? q : q - 1);
            boundary += exact;
            agree += meets_difficulty(h, Difficulty(dk)) == testing::oracle_meets(h, dk);
            continue;
        } else {
            mpz_class q = two256 / mpz_class(std::to_string(d));
            q += static_cast<long>(rng() % 3) - 1;
            h = testing::from_mpz(q < two256 ? q : two256 - 1);
        }
        agree += meets_difficulty(h, Difficulty(d)) == testing::oracle_meets(h, d);
    }
    verdict("difficulty check", agree == pairs && boundary > 0,
            fmt("%zu/%zu pairs agree with GMP, %zu exact 2^256 products", agree, pairs, boundary));
}

void shortlink_math()
{
    const auto t = shortlink::time_to_resolve(1024, 20);
    const auto big = shortlink::time_to_resolve(10'000'000'000'000'000'000ULL, 20);
    const auto space = shortlink::id_space_size(4);
    shortlink::IdEnumerator ids(4);
    std::uint64_t enumerated = 0;
    while (ids.next())
        ++enumerated;
    const bool ok = t == shortlink::ExactSeconds{256, 5} && t.to_string() == "51.2" && big.years() >= 1e9 &&
                    space == 1'727'604 && enumerated == space && 1'709'203 <= space;
    verdict("short-link math", ok,
            fmt("1024 h at 20 h/s = %s s, 1e19 h = %.3g years, %llu IDs of length <= 4", t.to_string().c_str(),
                big.years(), static_cast<unsigned long long>(space)));
}

void solver_statistics()
{
    double total = 0;
    std::size_t shares = 0, verified = 0, resolved = 0;
    constexpr int runs = 100;
    for (int seed = 0; seed < runs; ++seed) {
        pool::SimulatorConfig c;
        pool::ScriptParams params;
        params.blocks = 8;
        c.chain_script = pool::synthetic_chain_script(params, 500 + seed);
        c.tokens = {"creator"};
        c.key = {39, static_cast<std::uint8_t>(seed)};
        c.share_difficulty = 16;
        c.links = {{"k9", 64, "https://example.org/"}};
        c.seed = 500 + seed;
        pool::PoolSimulator sim(c);
        pool::SimulatorServer server(sim);
        server.start();
        shortlink::SolveOptions options;
        options.key = c.key;
        shortlink::ShortLinkSolver solver({"k9", 64, "creator", {server.url(), ""}}, options);
        const auto progress = solver.run();
        resolved += progress.resolved_url.has_value();
        total += static_cast<double>(progress.hashes_done);
        for (const auto& share : solver.submitted()) {
            ++shares;
            const HashDigest pow = TestPow{}.evaluate(set_nonce(share.blob, share.nonce));
            verified += pow == share.result && meets_compact_target(pow, share.target) && share.accepted;
        }
    }
    const double mean = total / runs;
    verdict("solver statistics", within(mean, 64, 0.5) && verified == shares && resolved == runs,
            fmt("mean attempts %.2f over %d runs, %zu/%zu shares re-verify", mean, runs, verified, shares));
}

void fingerprinting()
{
    const auto empty = wasm::signature(wasm::parse_wasm(testing::wasm_fixture("empty")));
    const bool empty_ok = empty.hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";

    std::mt19937_64 rng(160);
    const auto base = wasm::parse_wasm(testing::wasm_fixture("miner_like"));
    const auto sig = wasm::signature(base);
    auto module = base;
    int invariant = 0;
    for (int i = 0; i < 100; ++i) {
        module = testing::mutate_non_code(module, rng);
        const auto reparsed = wasm::parse_wasm(wasm::encode_wasm(module));
        invariant += wasm::signature(reparsed) == sig;
    }

    // 160 records: even indices miners, odd non-miners, counts log-uniform
    // so no two records lie within tolerance of each other.
    const char* labels[] = {"coinhive", "cryptoloot", "webmine", "coinimp"};
    std::vector<wasm::SignatureRecord> db;
    std::uniform_real_distribution<double> log_count(std::log(50.0), std::log(200'000.0));
    const auto count = [&] { return static_cast<std::uint64_t>(std::exp(log_count(rng))); };
    for (std::size_t i = 0; i < 160; ++i) {
        wasm::FeatureVector f;
        f.xor_count = count();
        f.shift_count = count();
        f.load_count = count();
        f.store_count = count();
        f.function_count = count();
        f.total_instruction_count = count();
        db.push_back({testing::random_digest(rng).hex(), i % 2 == 0 ? labels[i / 2 % 4] : "non-miner", f, ""});
    }
    const auto perturb = [&](wasm::FeatureVector f, double scale) {
        for (auto* v : {&f.xor_count, &f.shift_count, &f.load_count, &f.store_count, &f.function_count,
                        &f.total_instruction_count})
            *v = static_cast<std::uint64_t>(std::llround(static_cast<double>(*v) * (1 + scale * (rng() % 2 ? 1 : -1))));
        return f;
    };
    int exact = 0, feature = 0, none = 0;
    for (std::size_t i = 0; i < db.size(); ++i) {
        const auto& r = db[i];
        const auto e = wasm::classify({HashDigest::from_hex(r.digest)}, perturb(r.features, 0.3), db);
        exact += e.kind == wasm::MatchKind::exact && e.record == i && e.label == r.label;
        const auto unseen = testing::random_digest(rng);
        const auto near = wasm::classify({unseen}, perturb(r.features, 0.05), db);
        const auto far = wasm::classify({unseen}, perturb(r.features, 0.3), db);
        if (r.is_miner())
            feature += near.kind == wasm::MatchKind::feature && near.record == i && near.label == r.label;
        else
            feature += near.kind == wasm::MatchKind::none;
        none += far.kind == wasm::MatchKind::none;
    }
    const bool ok = empty_ok && invariant == 100 && exact == 160 && feature == 160 && none == 160;
    verdict("fingerprinting", ok,
            fmt("empty module %s, %d/100 mutations invariant, exact %d/160, feature %d/160, none %d/160",
                empty_ok ? "matches" : "differs", invariant, exact, feature, none));
}

void table3()
{
    const std::vector<report::ScanSummary> rows = {report::summary_from_counts("alexa", 993, 737, 129),
                                                   report::summary_from_counts(".org", 978, 1372, 450)};
    const std::string text = report::render_detection(rows, report::Format::text);
    const bool ok = rows[0].missed() == 608 && rows[1].missed() == 922 && text.find("608 (82%)") != std::string::npos &&
                    text.find("922 (67%)") != std::string::npos;
    verdict("table 3 arithmetic", ok,
            fmt("missed %llu (%llu%%) and %llu (%llu%%)", static_cast<unsigned long long>(rows[0].missed()),
                static_cast<unsigned long long>(report::percent_half_up(rows[0].missed(), rows[0].wasm_hits)),
                static_cast<unsigned long long>(rows[1].missed()),
                static_cast<unsigned long long>(report::percent_half_up(rows[1].missed(), rows[1].wasm_hits))));
}

}  // namespace

int main()
{
    const auto guard = [](const char* name, void (*check)()) {
        try {
            check();
        } catch (const std::exception& e) {
            verdict(name, false, std::string("threw ") + e.what());
        }
    };
    guard("estimator arithmetic", estimator_arithmetic);
    guard("revenue conservation and fiat", revenue_conservation);
    guard("attribution oracle equivalence", attribution_equivalence);
    guard("tree hash", tree_hash_reference);
    guard("difficulty check", difficulty_check);
    guard("short-link math", shortlink_math);
    guard("solver statistics", solver_statistics);
    guard("fingerprinting", fingerprinting);
    guard("table 3 arithmetic", table3);
    std::printf("%d failed\n", failures);
    return failures == 0 ? 0 : 1;
}
