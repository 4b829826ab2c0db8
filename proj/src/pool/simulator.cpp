#include "minetrace/pool/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

#include "minetrace/core/blob.hpp"
#include "minetrace/core/difficulty.hpp"
#include "minetrace/core/digest.hpp"
#include "minetrace/core/pow.hpp"

namespace minetrace::pool {

namespace {

constexpr std::uint64_t header_major = 7;
constexpr std::uint64_t header_minor = 7;

HashDigest random_digest(std::mt19937_64& rng)
{
    HashDigest d;
    for (std::size_t i = 0; i < d.bytes.size(); i += 8) {
        const std::uint64_t word = rng();
        for (std::size_t k = 0; k < 8; ++k)
            d.bytes[i + k] = static_cast<std::uint8_t>(word >> (8 * k));
    }
    return d;
}

Bytes header_for(const HashDigest& prev_id, std::uint64_t timestamp, std::uint32_t nonce,
                 std::span<const HashDigest> txs)
{
    BlockHeaderBlob h;
    h.major_version = header_major;
    h.minor_version = header_minor;
    h.timestamp = timestamp;
    h.prev_id = prev_id;
    h.nonce = nonce;
    h.merkle_root = tree_hash(txs);
    h.tx_count = txs.size();
    return serialize_blob(h);
}

}  // namespace

std::vector<ChainBlock> synthetic_chain_script(const ScriptParams& params, std::uint64_t seed)
{
    if (params.blocks == 0 || params.max_transactions == 0 || params.difficulty == 0)
        throw std::invalid_argument("synthetic chain script needs blocks, transactions and difficulty");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> jitter(0, params.block_time);
    std::uniform_int_distribution<std::size_t> tx_count(1, params.max_transactions);
    std::uniform_real_distribution<double> spread(0.9, 1.1);

    std::vector<ChainBlock> script;
    script.reserve(params.blocks);
    HashDigest prev = random_digest(rng);
    std::uint64_t timestamp = params.start_timestamp;
    for (std::size_t i = 0; i < params.blocks; ++i) {
        ChainBlock b;
        b.height = params.start_height + i;
        b.prev_id = prev;
        b.timestamp = timestamp;
        b.difficulty = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(static_cast<double>(params.difficulty) * spread(rng)));
        b.reward = static_cast<std::uint64_t>(static_cast<double>(params.reward) * spread(rng));
        const std::size_t n = tx_count(rng);
        for (std::size_t t = 0; t < n; ++t)
            b.tx_hashes.push_back(random_digest(rng));
        b.header_blob = header_for(b.prev_id, b.timestamp, static_cast<std::uint32_t>(rng()), b.tx_hashes);
        b.block_hash = keccak256(*b.header_blob);
        prev = b.block_hash;
        timestamp += params.block_time / 2 + jitter(rng);
        script.push_back(std::move(b));
    }
    return script;
}

std::vector<bool> choose_pool_wins(std::size_t steps, std::size_t wins, std::uint64_t seed)
{
    if (wins > steps)
        throw std::invalid_argument("more pool wins than steps");
    std::vector<std::size_t> order(steps);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> out(steps, false);
    for (std::size_t i = 0; i < wins; ++i)
        out[order[i]] = true;
    return out;
}

PoolSimulator::PoolSimulator(SimulatorConfig config) : config_(std::move(config)), rng_(config_.seed)
{
    if (config_.chain_script.empty())
        throw std::invalid_argument("chain script is empty");
    if (config_.blobs_per_tip == 0 || config_.endpoints == 0 || config_.endpoints_per_backend == 0)
        throw std::invalid_argument("blobs_per_tip, endpoints and endpoints_per_backend must be positive");
    if (config_.share_difficulty == 0)
        throw std::invalid_argument("share difficulty must be positive");
    if (config_.pool_wins.size() > config_.chain_script.size() - 1)
        throw std::invalid_argument("pool_wins longer than the chain script");
    for (const LinkSpec& link : config_.links)
        links_[link.id] = LinkState{link, 0};

    ChainBlock start = config_.chain_script.front();
    if (start.tx_hashes.empty())
        start.tx_hashes.push_back(random_digest(rng_));
    if (start.block_hash == HashDigest{}) {
        start.header_blob = header_for(start.prev_id, start.timestamp, 0, start.tx_hashes);
        start.block_hash = keccak256(*start.header_blob);
    }
    chain_.push_back(std::move(start));
    build_templates_locked();
    if (config_.key.offset >= templates_[0][0].blob.size())
        throw std::invalid_argument("obfuscation offset outside the blob");
}

void PoolSimulator::build_templates_locked()
{
    const ChainBlock& tip = chain_.back();
    const std::uint64_t timestamp =
        step_ + 1 < config_.chain_script.size() ? config_.chain_script[step_ + 1].timestamp : tip.timestamp + 120;
    std::vector<HashDigest> mempool;
    for (std::size_t i = 0; i < config_.pool_mempool; ++i)
        mempool.push_back(random_digest(rng_));

    const std::size_t backends =
        (config_.endpoints + config_.endpoints_per_backend - 1) / config_.endpoints_per_backend;
    templates_.assign(backends, {});
    template_issued_.assign(backends, std::vector<bool>(config_.blobs_per_tip, false));
    for (std::size_t b = 0; b < backends; ++b) {
        for (std::size_t i = 0; i < config_.blobs_per_tip; ++i) {
            // The Coinbase extra field carries a per-template nonce, so every
            // template commits to its own Merkle root.
            Bytes extra(16);
            const std::uint64_t a = rng_(), c = rng_();
            for (int k = 0; k < 8; ++k) {
                extra[k] = static_cast<std::uint8_t>(a >> (8 * k));
                extra[8 + k] = static_cast<std::uint8_t>(c >> (8 * k));
            }
            Template t;
            t.tx_hashes.push_back(keccak256(extra));
            t.tx_hashes.insert(t.tx_hashes.end(), mempool.begin(), mempool.end());
            t.blob = header_for(tip.block_hash, timestamp, 0, t.tx_hashes);
            templates_[b].push_back(std::move(t));
        }
    }
}

PoolSimulator::SessionId PoolSimulator::open_session(const std::string& token, const std::string& endpoint_name,
                                                     const std::optional<std::string>& link_id)
{
    std::lock_guard lock(mutex_);
    if (!config_.tokens.contains(token))
        throw AuthRejected("unknown token");
    std::size_t endpoint = 0;
    if (!endpoint_name.empty()) {
        const auto [end, ec] =
            std::from_chars(endpoint_name.data(), endpoint_name.data() + endpoint_name.size(), endpoint);
        if (ec != std::errc{} || end != endpoint_name.data() + endpoint_name.size() || endpoint >= config_.endpoints)
            throw AuthRejected("unknown endpoint " + endpoint_name);
    }
    if (link_id && !links_.contains(*link_id))
        throw AuthRejected("unknown link " + *link_id);
    const SessionId id = next_session_++;
    sessions_[id] = Session{endpoint / config_.endpoints_per_backend, link_id};
    return id;
}

void PoolSimulator::close_session(SessionId session)
{
    std::lock_guard lock(mutex_);
    sessions_.erase(session);
}

IssuedJob PoolSimulator::issue_job(SessionId session)
{
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(session);
    if (it == sessions_.end())
        throw AuthRejected("no such session");
    const std::size_t backend = it->second.backend;
    const std::size_t index = std::uniform_int_distribution<std::size_t>(0, config_.blobs_per_tip - 1)(rng_);
    const std::string job_id = std::to_string(next_job_++);
    tickets_[job_id] = Ticket{chain_.back().height, backend, index};
    template_issued_[backend][index] = true;
    const Bytes& plain = templates_[backend][index].blob;
    issued_.push_back(IssuedRecord{job_id, chain_.back().height, backend, plain});
    return IssuedJob{job_id, deobfuscate(plain, config_.key), compact_target(Difficulty(config_.share_difficulty))};
}

SubmitOutcome PoolSimulator::submit(SessionId session, const std::string& job_id, std::uint32_t nonce,
                                    const HashDigest& result)
{
    SubmitOutcome outcome;
    {
        std::lock_guard lock(mutex_);
        const auto s = sessions_.find(session);
        if (s == sessions_.end())
            throw AuthRejected("no such session");
        const auto t = tickets_.find(job_id);
        if (t == tickets_.end())
            throw StaleJob("unknown job " + job_id);
        const Ticket ticket = t->second;
        if (ticket.tip_height != chain_.back().height)
            throw StaleJob("job " + job_id + " belongs to an old tip");
        if (seen_shares_.contains({job_id, nonce}))
            throw InvalidShare("duplicate share");

        const Template& tmpl = templates_[ticket.backend][ticket.index];
        const HashDigest pow = TestPow{}.evaluate(set_nonce(tmpl.blob, nonce));
        if (pow != result)
            throw InvalidShare("result does not match the recomputed hash");
        if (!meets_compact_target(pow, compact_target(Difficulty(config_.share_difficulty))))
            throw InvalidShare("hash above the share target");
        seen_shares_.insert({job_id, nonce});

        if (s->second.link) {
            links_[*s->second.link].credited += config_.share_difficulty;
            outcome.link = link_status_locked(*s->second.link);
        }
        if (step_ + 1 < config_.chain_script.size() &&
            meets_difficulty(pow, Difficulty(config_.chain_script[step_ + 1].difficulty))) {
            outcome.block_found = true;
            const Bytes header = set_nonce(tmpl.blob, nonce);
            ChainBlock block;
            const ChainBlock& script = config_.chain_script[step_ + 1];
            block.height = chain_.back().height + 1;
            block.prev_id = chain_.back().block_hash;
            block.timestamp = script.timestamp;
            block.difficulty = script.difficulty;
            block.reward = script.reward;
            block.tx_hashes = tmpl.tx_hashes;
            block.header_blob = header;
            block.block_hash = keccak256(header);
            chain_.push_back(std::move(block));
            pool_won_.push_back(chain_.back().height);
            ++step_;
            tickets_.clear();
            seen_shares_.clear();
            build_templates_locked();
        }
    }
    if (outcome.block_found)
        notify();
    return outcome;
}

LinkStatus PoolSimulator::link_status_locked(const std::string& id) const
{
    const LinkState& state = links_.at(id);
    LinkStatus status{id, state.credited, state.spec.required_hashes, std::nullopt};
    if (state.credited >= state.spec.required_hashes)
        status.url = state.spec.url;
    return status;
}

std::optional<LinkStatus> PoolSimulator::link_status(SessionId session) const
{
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(session);
    if (it == sessions_.end() || !it->second.link)
        return std::nullopt;
    return link_status_locked(*it->second.link);
}

bool PoolSimulator::advance_tip()
{
    {
        std::lock_guard lock(mutex_);
        if (step_ + 1 >= config_.chain_script.size())
            return false;
        const ChainBlock& script = config_.chain_script[step_ + 1];
        const ChainBlock& tip = chain_.back();
        ChainBlock block;
        block.height = tip.height + 1;
        block.prev_id = tip.block_hash;
        block.timestamp = script.timestamp;
        block.difficulty = script.difficulty;
        block.reward = script.reward;
        const bool pool_wins = step_ < config_.pool_wins.size() && config_.pool_wins[step_];
        const auto nonce = static_cast<std::uint32_t>(rng_());
        if (pool_wins) {
            // A pool block is mined on a template some miner was given.
            std::vector<std::pair<std::size_t, std::size_t>> candidates;
            for (std::size_t b = 0; b < templates_.size(); ++b)
                for (std::size_t i = 0; i < templates_[b].size(); ++i)
                    if (template_issued_[b][i])
                        candidates.emplace_back(b, i);
            if (candidates.empty())
                for (std::size_t b = 0; b < templates_.size(); ++b)
                    for (std::size_t i = 0; i < templates_[b].size(); ++i)
                        candidates.emplace_back(b, i);
            const auto [b, i] =
                candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
            block.tx_hashes = templates_[b][i].tx_hashes;
            block.header_blob = set_nonce(templates_[b][i].blob, nonce);
            pool_won_.push_back(block.height);
        } else {
            block.tx_hashes = script.tx_hashes;
            if (block.tx_hashes.empty())
                block.tx_hashes.push_back(random_digest(rng_));
            block.header_blob = header_for(block.prev_id, block.timestamp, nonce, block.tx_hashes);
        }
        block.block_hash = keccak256(*block.header_blob);
        chain_.push_back(std::move(block));
        ++step_;
        tickets_.clear();
        seen_shares_.clear();
        build_templates_locked();
    }
    notify();
    return true;
}

std::size_t PoolSimulator::remaining_steps() const
{
    std::lock_guard lock(mutex_);
    return config_.chain_script.size() - 1 - step_;
}

void PoolSimulator::set_tip_listener(std::function<void()> listener)
{
    std::lock_guard lock(mutex_);
    listener_ = std::move(listener);
}

void PoolSimulator::notify()
{
    std::function<void()> listener;
    {
        std::lock_guard lock(mutex_);
        listener = listener_;
    }
    if (listener)
        listener();
}

std::uint64_t PoolSimulator::tip_height() const
{
    std::lock_guard lock(mutex_);
    return chain_.back().height;
}

HashDigest PoolSimulator::tip_id() const
{
    std::lock_guard lock(mutex_);
    return chain_.back().block_hash;
}

std::uint32_t PoolSimulator::share_target() const
{
    return compact_target(Difficulty(config_.share_difficulty));
}

std::vector<ChainBlock> PoolSimulator::chain() const
{
    std::lock_guard lock(mutex_);
    return chain_;
}

std::vector<std::uint64_t> PoolSimulator::pool_won_heights() const
{
    std::lock_guard lock(mutex_);
    return pool_won_;
}

std::vector<IssuedRecord> PoolSimulator::issued() const
{
    std::lock_guard lock(mutex_);
    return issued_;
}

std::vector<Bytes> PoolSimulator::tip_templates() const
{
    std::lock_guard lock(mutex_);
    std::vector<Bytes> out;
    for (const auto& backend : templates_)
        for (const Template& t : backend)
            out.push_back(t.blob);
    return out;
}

}  // namespace minetrace::pool
