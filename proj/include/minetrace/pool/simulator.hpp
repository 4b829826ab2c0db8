#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "minetrace/core/chain.hpp"
#include "minetrace/core/hash_digest.hpp"
#include "minetrace/pool/job.hpp"
#include "minetrace/pool/session.hpp"

namespace minetrace::pool {

struct LinkSpec {
    std::string id;
    std::uint64_t required_hashes = 0;
    std::string url;
};

struct SimulatorConfig {
    /// Block templates. The first entry is the starting tip; each later
    /// entry supplies timestamp, difficulty, reward and (for blocks the pool
    /// does not win) the transaction list of the next height. block_hash and
    /// prev_id are recomputed.
    std::vector<ChainBlock> chain_script;
    std::size_t blobs_per_tip = 8;
    std::size_t endpoints = 1;
    std::size_t endpoints_per_backend = 1;
    std::set<std::string> tokens;
    ObfuscationKey key;
    std::uint64_t share_difficulty = 16;
    /// Scripted outcome per advance step: true when the pool wins that block.
    std::vector<bool> pool_wins;
    std::vector<LinkSpec> links;
    std::size_t pool_mempool = 3;  // non-Coinbase transactions in pool templates
    std::uint64_t seed = 1;
};

struct ScriptParams {
    std::size_t blocks = 101;
    std::uint64_t start_height = 1'500'000;
    std::uint64_t start_timestamp = 1'520'000'000;
    std::uint64_t block_time = 120;
    std::uint64_t difficulty = 55'400'000'000ULL;
    std::uint64_t reward = 4'500'000'000'000ULL;
    std::size_t max_transactions = 12;
};

/// Random block templates with plausible spacing, difficulty and rewards.
std::vector<ChainBlock> synthetic_chain_script(const ScriptParams& params, std::uint64_t seed);

/// Exactly `wins` true entries among `steps`, positions drawn uniformly.
std::vector<bool> choose_pool_wins(std::size_t steps, std::size_t wins, std::uint64_t seed);

struct IssuedJob {
    std::string job_id;
    Bytes blob;  // obfuscated as sent
    std::uint32_t target = 0;
};

struct IssuedRecord {
    std::string job_id;
    std::uint64_t tip_height = 0;
    std::size_t backend = 0;
    Bytes blob;  // plain
};

struct SubmitOutcome {
    std::optional<LinkStatus> link;
    bool block_found = false;
};

/// Authoritative pool state behind the mock server. All members are
/// thread-safe.
class PoolSimulator {
public:
    using SessionId = std::uint64_t;

    explicit PoolSimulator(SimulatorConfig config);

    /// Throws AuthRejected for an unknown token, endpoint name or link id.
    SessionId open_session(const std::string& token, const std::string& endpoint_name,
                           const std::optional<std::string>& link_id);
    void close_session(SessionId session);

    IssuedJob issue_job(SessionId session);

    /// Verifies by recomputing the PoW. Throws StaleJob or InvalidShare.
    SubmitOutcome submit(SessionId session, const std::string& job_id, std::uint32_t nonce,
                         const HashDigest& result);

    std::optional<LinkStatus> link_status(SessionId session) const;

    /// Moves to the next scripted block. Returns false once the script is
    /// exhausted.
    bool advance_tip();
    std::size_t remaining_steps() const;

    /// Called after every tip change, outside the simulator lock.
    void set_tip_listener(std::function<void()> listener);

    std::uint64_t tip_height() const;
    HashDigest tip_id() const;
    std::uint32_t share_target() const;
    const ObfuscationKey& key() const noexcept { return config_.key; }

    /// Realized chain, starting tip first.
    std::vector<ChainBlock> chain() const;
    std::vector<std::uint64_t> pool_won_heights() const;
    std::vector<IssuedRecord> issued() const;

    /// Every blob template of the current tip across all backends.
    std::vector<Bytes> tip_templates() const;

private:
    struct Template {
        Bytes blob;  // nonce zero
        std::vector<HashDigest> tx_hashes;
    };
    struct Session {
        std::size_t backend = 0;
        std::optional<std::string> link;
    };
    struct Ticket {
        std::uint64_t tip_height;
        std::size_t backend;
        std::size_t index;
    };
    struct LinkState {
        LinkSpec spec;
        std::uint64_t credited = 0;
    };

    void build_templates_locked();
    void advance_locked(std::optional<Ticket> winner);
    LinkStatus link_status_locked(const std::string& id) const;
    void notify();

    SimulatorConfig config_;
    mutable std::mutex mutex_;
    std::mt19937_64 rng_;
    std::vector<ChainBlock> chain_;
    std::vector<std::uint64_t> pool_won_;
    std::size_t step_ = 0;
    std::vector<std::vector<Template>> templates_;  // [backend][index]
    std::vector<std::vector<bool>> template_issued_;
    std::map<std::string, Ticket> tickets_;
    std::set<std::pair<std::string, std::uint32_t>> seen_shares_;
    std::vector<IssuedRecord> issued_;
    std::unordered_map<SessionId, Session> sessions_;
    std::map<std::string, LinkState> links_;
    SessionId next_session_ = 1;
    std::uint64_t next_job_ = 1;
    std::function<void()> listener_;
};

/// Serves a PoolSimulator over the line protocol, one thread per
/// connection. Tip changes push a fresh job to every live connection.
class SimulatorServer {
public:
    SimulatorServer(PoolSimulator& simulator, std::string host = "127.0.0.1", std::uint16_t port = 0);
    ~SimulatorServer();
    SimulatorServer(const SimulatorServer&) = delete;
    SimulatorServer& operator=(const SimulatorServer&) = delete;

    /// Binds (to the previous port after a stop) and starts accepting.
    void start();
    /// Closes the listener and every connection.
    void stop();
    bool running() const noexcept;

    std::uint16_t port() const noexcept { return port_; }
    std::string url(std::size_t endpoint = 0) const;

    /// Advances the tip on a timer while running; zero disables.
    void set_tip_interval(std::chrono::milliseconds interval);

    std::size_t connections_served() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::uint16_t port_ = 0;
};

}  // namespace minetrace::pool
