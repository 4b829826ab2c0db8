#include <doctest.h>

#include <set>
#include <thread>

#include "minetrace/core/blob.hpp"
#include "minetrace/core/difficulty.hpp"
#include "minetrace/core/pow.hpp"
#include "minetrace/pool/simulator.hpp"
#include "minetrace/shortlink/shortlink.hpp"

using namespace minetrace;
using namespace minetrace::shortlink;
using namespace std::chrono_literals;

namespace {

struct Harness {
    explicit Harness(std::uint64_t seed, std::uint64_t required, std::uint64_t share_difficulty = 16)
        : sim(config(seed, required, share_difficulty)), server(sim)
    {
        server.start();
    }

    static pool::SimulatorConfig config(std::uint64_t seed, std::uint64_t required, std::uint64_t share_difficulty)
    {
        pool::SimulatorConfig c;
        pool::ScriptParams params;
        params.blocks = 50;
        c.chain_script = pool::synthetic_chain_script(params, seed);
        c.tokens = {"creator"};
        c.key = {39, static_cast<std::uint8_t>(0x40 + seed % 64)};
        c.share_difficulty = share_difficulty;
        c.links = {{"ab3", required, "https://example.org/target"}};
        c.seed = seed;
        return c;
    }

    ShortLinkTask task(std::uint64_t required) const
    {
        return {"ab3", required, "creator", {server.url(), ""}};
    }

    SolveOptions options(std::size_t workers = 1) const
    {
        SolveOptions o;
        o.workers = workers;
        o.key = sim.key();
        return o;
    }

    pool::PoolSimulator sim;
    pool::SimulatorServer server;
};

bool reverifies(const SubmittedShare& share)
{
    const HashDigest pow = TestPow{}.evaluate(set_nonce(share.blob, share.nonce));
    return pow == share.result && meets_compact_target(pow, share.target);
}

}  // namespace

TEST_SUITE("id enumeration")
{
    TEST_CASE("space sizes")
    {
        CHECK(id_space_size(1) == 36);
        CHECK(id_space_size(2) == 36 + 1296);
        CHECK(id_space_size(3) == 36 + 1296 + 46'656);
        CHECK(id_space_size(4) == 1'727'604);
        CHECK(id_space_size(4) >= 1'709'203);
        CHECK_THROWS_AS(id_space_size(0), std::invalid_argument);
    }

    TEST_CASE("length-then-lexicographic order without duplicates")
    {
        IdEnumerator ids(3);
        std::set<std::string> seen;
        std::string previous;
        while (auto id = ids.next()) {
            CHECK(valid_link_id(*id));
            if (!previous.empty())
                CHECK((id->size() > previous.size() || (id->size() == previous.size() && *id > previous)));
            CHECK(seen.insert(*id).second);
            previous = *id;
        }
        CHECK(seen.size() == id_space_size(3));
        CHECK(*seen.begin() == "0");
        CHECK(previous == "zzz");
    }

    TEST_CASE("length four by count")
    {
        IdEnumerator ids(4);
        std::uint64_t n = 0;
        std::string last;
        while (auto id = ids.next()) {
            ++n;
            last = std::move(*id);
        }
        CHECK(n == 1'727'604);
        CHECK(last == "zzzz");
        CHECK(ids.position() == n);
    }

    TEST_CASE("index mapping")
    {
        CHECK(IdEnumerator::id_at(0) == "0");
        CHECK(IdEnumerator::id_at(10) == "a");
        CHECK(IdEnumerator::id_at(35) == "z");
        CHECK(IdEnumerator::id_at(36) == "00");
        for (std::uint64_t i = 0; i < id_space_size(4); i += 997)
            CHECK(IdEnumerator::index_of(IdEnumerator::id_at(i)) == i);
        CHECK_THROWS_AS(IdEnumerator::index_of("AB"), std::invalid_argument);
        CHECK_FALSE(valid_link_id("abcde"));
        CHECK_FALSE(valid_link_id(""));
    }
}

TEST_SUITE("time_to_resolve")
{
    TEST_CASE("1024 hashes at 20 h/s")
    {
        const auto t = time_to_resolve(1024, 20);
        CHECK(t.numerator == 256);
        CHECK(t.denominator == 5);
        CHECK(t.to_string() == "51.2");
    }

    TEST_CASE("1e19 hashes take billions of years")
    {
        const auto t = time_to_resolve(10'000'000'000'000'000'000ULL, 20);
        CHECK(t.to_string() == "500000000000000000");
        CHECK(t.years() >= 1e9);
        CHECK(t.years() == doctest::Approx(1.584e10).epsilon(1e-3));
    }

    TEST_CASE("small cases")
    {
        CHECK(time_to_resolve(20, 20).to_string() == "1");
        CHECK(time_to_resolve(0, 20).to_string() == "0");
        CHECK(time_to_resolve(1, 3, 2).to_string() == "2/3");
        CHECK_THROWS_AS(time_to_resolve(1, 0), std::invalid_argument);
    }

    TEST_CASE("doubling the hashes doubles the time exactly")
    {
        for (std::uint64_t h = 1; h < 5000; h += 37)
            for (const std::uint64_t rate : {1ULL, 3ULL, 20ULL, 97ULL, 1000ULL}) {
                const auto a = time_to_resolve(h, rate);
                const auto b = time_to_resolve(2 * h, rate);
                CHECK(b.numerator * a.denominator == 2 * a.numerator * b.denominator);
            }
    }
}

TEST_SUITE("solver")
{
    TEST_CASE("already satisfied link resolves without work")
    {
        Harness h(1, 0);
        const auto progress = solve(h.task(0), h.options());
        CHECK(progress.hashes_done == 0);
        CHECK(progress.shares_submitted == 0);
        CHECK(progress.resolved_url == std::optional<std::string>("https://example.org/target"));
    }

    TEST_CASE("mean attempts for 64 hash-equivalents at share difficulty 16")
    {
        double total = 0;
        constexpr int runs = 100;
        for (int seed = 0; seed < runs; ++seed) {
            Harness h(1000 + seed, 64);
            ShortLinkSolver solver(h.task(64), h.options());
            const auto progress = solver.run();
            REQUIRE(progress.resolved_url);
            CHECK(progress.shares_accepted == 4);
            CHECK(progress.credited == 64);
            for (const auto& share : solver.submitted())
                CHECK(reverifies(share));
            total += static_cast<double>(progress.hashes_done);
        }
        const double mean = total / runs;
        MESSAGE("mean attempts " << mean);
        CHECK(mean >= 32);
        CHECK(mean <= 96);
    }

    TEST_CASE("several workers partition the nonce space")
    {
        Harness h(7, 256);
        ShortLinkSolver solver(h.task(256), h.options(4));
        const auto progress = solver.run();
        CHECK(progress.resolved_url);
        CHECK(progress.credited >= 256);
        std::set<std::uint32_t> nonces;
        for (const auto& share : solver.submitted()) {
            CHECK(reverifies(share));
            nonces.insert(share.nonce);
        }
        CHECK(nonces.size() == solver.submitted().size());
    }

    TEST_CASE("avx2 and scalar solve the same link identically")
    {
        if (!kernels::isa_supported(kernels::Isa::avx2))
            return;
        std::vector<std::uint32_t> seen[2];
        std::uint64_t hashes[2];
        for (const int pass : {0, 1}) {
            Harness h(21, 128);
            auto options = h.options();
            options.isa = pass == 0 ? kernels::Isa::scalar : kernels::Isa::avx2;
            ShortLinkSolver solver(h.task(128), options);
            hashes[pass] = solver.run().hashes_done;
            for (const auto& share : solver.submitted())
                seen[pass].push_back(share.nonce);
        }
        CHECK(seen[0] == seen[1]);
        CHECK(hashes[0] == hashes[1]);
    }

    TEST_CASE("tip changes during a solve")
    {
        constexpr std::uint64_t required = 1 << 16;
        Harness h(9, required);
        const auto start_height = h.sim.tip_height();
        h.server.set_tip_interval(5ms);
        ShortLinkSolver solver(h.task(required), h.options(2));
        const auto progress = solver.run();
        h.server.set_tip_interval(0ms);
        CHECK(progress.resolved_url);
        CHECK(h.sim.tip_height() > start_height + 2);
        std::set<std::string> jobs;
        for (const auto& share : solver.submitted())
            jobs.insert(share.job_id);
        CHECK(jobs.size() > 2);
        for (const auto& share : solver.submitted())
            CHECK(reverifies(share));
    }

    TEST_CASE("cancellation and monotone progress")
    {
        Harness h(3, std::uint64_t{1} << 40);
        ShortLinkSolver solver(h.task(std::uint64_t{1} << 40), h.options());
        std::vector<std::uint64_t> samples;
        std::thread watcher([&] {
            for (int i = 0; i < 20; ++i) {
                samples.push_back(solver.progress().hashes_done);
                std::this_thread::sleep_for(10ms);
            }
            solver.cancel();
        });
        CHECK_THROWS_AS(solver.run(), Cancelled);
        watcher.join();
        CHECK(std::is_sorted(samples.begin(), samples.end()));
        CHECK(samples.back() > 0);
    }

    TEST_CASE("unknown link is rejected by the pool")
    {
        Harness h(4, 64);
        auto task = h.task(64);
        task.link_id = "zz";
        CHECK_THROWS_AS(solve(task, h.options()), pool::AuthRejected);
        task.link_id = "ABC";
        CHECK_THROWS_AS(solve(task, h.options()), std::invalid_argument);
    }

    TEST_CASE("parallel solves beat sequential ones")
    {
        if (std::thread::hardware_concurrency() < 2) {
            MESSAGE("single CPU, skipping wall-time comparison");
            return;
        }
        const auto timed = [](auto&& fn) {
            const auto t0 = std::chrono::steady_clock::now();
            fn();
            return std::chrono::steady_clock::now() - t0;
        };
        constexpr std::uint64_t required = 1 << 15;
        Harness a(31, required), b(32, required);
        const auto sequential = timed([&] {
            solve(a.task(required), a.options());
            Harness c(33, required);
            solve(c.task(required), c.options());
        });
        const auto parallel = timed([&] {
            std::thread t([&] { solve(b.task(required), b.options()); });
            Harness d(34, required);
            solve(d.task(required), d.options());
            t.join();
        });
        CHECK(parallel < sequential);
    }
}
