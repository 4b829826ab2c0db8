#include "minetrace/shortlink/shortlink.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "minetrace/core/blob.hpp"
#include "minetrace/core/difficulty.hpp"

namespace minetrace::shortlink {

namespace {

using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b)
{
    while (b != 0) {
        const u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::string u128_to_string(u128 v)
{
    if (v == 0)
        return "0";
    std::string s;
    while (v != 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

std::uint64_t power36(unsigned k)
{
    std::uint64_t p = 1;
    for (unsigned i = 0; i < k; ++i)
        p *= id_alphabet.size();
    return p;
}

}  // namespace

std::uint64_t id_space_size(unsigned max_length)
{
    if (max_length == 0 || max_length > 12)
        throw std::invalid_argument("ID length must be in 1..12");
    std::uint64_t total = 0;
    for (unsigned k = 1; k <= max_length; ++k)
        total += power36(k);
    return total;
}

bool valid_link_id(std::string_view id) noexcept
{
    return !id.empty() && id.size() <= max_id_length &&
           std::all_of(id.begin(), id.end(), [](char c) { return id_alphabet.find(c) != std::string_view::npos; });
}

IdEnumerator::IdEnumerator(unsigned max_length) : size_(id_space_size(max_length)) {}

std::optional<std::string> IdEnumerator::next()
{
    if (position_ >= size_)
        return std::nullopt;
    return id_at(position_++);
}

std::string IdEnumerator::id_at(std::uint64_t index)
{
    unsigned length = 1;
    while (index >= power36(length)) {
        index -= power36(length);
        ++length;
        if (length > 12)
            throw std::invalid_argument("ID index out of range");
    }
    std::string id(length, id_alphabet[0]);
    for (unsigned i = length; i-- > 0;) {
        id[i] = id_alphabet[index % id_alphabet.size()];
        index /= id_alphabet.size();
    }
    return id;
}

std::uint64_t IdEnumerator::index_of(std::string_view id)
{
    if (id.empty() || id.size() > 12)
        throw std::invalid_argument("ID length must be in 1..12");
    std::uint64_t offset = 0;
    for (unsigned k = 1; k < id.size(); ++k)
        offset += power36(k);
    std::uint64_t value = 0;
    for (const char c : id) {
        const std::size_t digit = id_alphabet.find(c);
        if (digit == std::string_view::npos)
            throw std::invalid_argument("ID outside [0-9a-z]: " + std::string(id));
        value = value * id_alphabet.size() + digit;
    }
    return offset + value;
}

double ExactSeconds::seconds() const noexcept
{
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

double ExactSeconds::years() const noexcept
{
    return seconds() / (365.25 * 86'400);
}

std::string ExactSeconds::to_string() const
{
    std::uint64_t d = denominator;
    while (d % 2 == 0)
        d /= 2;
    while (d % 5 == 0)
        d /= 5;
    if (d != 1)
        return u128_to_string(numerator) + "/" + u128_to_string(denominator);
    std::string s = u128_to_string(numerator / denominator);
    u128 rest = numerator % denominator;
    if (rest != 0) {
        s.push_back('.');
        while (rest != 0) {
            rest *= 10;
            s.push_back(static_cast<char>('0' + static_cast<int>(rest / denominator)));
            rest %= denominator;
        }
    }
    return s;
}

ExactSeconds time_to_resolve(std::uint64_t required_hashes, std::uint64_t rate_numerator,
                             std::uint64_t rate_denominator)
{
    if (rate_numerator == 0 || rate_denominator == 0)
        throw std::invalid_argument("client rate must be positive");
    const u128 num = static_cast<u128>(required_hashes) * rate_denominator;
    const u128 g = gcd128(num, rate_numerator);
    return ExactSeconds{num / g, static_cast<std::uint64_t>(rate_numerator / g)};
}

ShortLinkSolver::ShortLinkSolver(ShortLinkTask task, SolveOptions options)
    : task_(std::move(task)), options_(std::move(options))
{
    if (!valid_link_id(task_.link_id))
        throw std::invalid_argument("link id must be 1-4 chars of [a-z0-9]: " + task_.link_id);
    if (options_.workers == 0 || options_.batch == 0)
        throw std::invalid_argument("workers and batch must be positive");
}

bool ShortLinkSolver::settled_locked() const
{
    return progress_.credited + pending_ * share_difficulty_ >= progress_.required;
}

void ShortLinkSolver::work(std::uint64_t begin, std::uint64_t end, const Bytes& blob, std::size_t offset,
                           std::uint32_t target, std::uint64_t generation)
{
    const kernels::NonceHasher hasher(blob, offset, options_.isa);
    std::vector<HashDigest> out(options_.batch);
    for (std::uint64_t n = begin; n < end && !stop_workers_;) {
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(options_.batch, end - n));
        hasher.hash(static_cast<std::uint32_t>(n), std::span(out).first(count));
        for (std::size_t k = 0; k < count; ++k) {
            std::unique_lock lock(mutex_);
            if (stop_workers_ || generation != generation_)
                goto done;
            ++progress_.hashes_done;
            if (!meets_compact_target(out[k], target))
                continue;
            found_.push_back({static_cast<std::uint32_t>(n + k), out[k]});
            ++pending_;
            coordinator_cv_.notify_one();
            worker_cv_.wait(lock, [&] { return stop_workers_ || !settled_locked(); });
        }
        n += count;
    }
done:
    std::lock_guard lock(mutex_);
    --running_workers_;
    coordinator_cv_.notify_one();
}

SolveProgress ShortLinkSolver::run()
{
    pool::PoolEndpoint endpoint = task_.endpoint;
    if (!task_.creator_token.empty())
        endpoint.token = task_.creator_token;
    pool::SessionOptions session_options = options_.session;
    session_options.link_id = task_.link_id;
    auto session = pool::PoolSession::login(endpoint, session_options);

    const auto resolved = [&] {
        return progress_.resolved_url.has_value() ||
               (!session.link() && progress_.credited >= progress_.required);
    };
    {
        std::lock_guard lock(mutex_);
        progress_.required = task_.required_hashes;
        if (const auto& link = session.link()) {
            progress_.required = link->required;
            progress_.credited = link->credited;
            progress_.resolved_url = link->url;
        }
        if (resolved())
            return progress_;
    }

    pool::Job job = session.initial_job();
    for (;;) {
        const Bytes plain = pool::deobfuscate(job.blob, options_.key);
        const std::size_t offset = nonce_offset(plain);
        std::vector<std::jthread> workers;
        {
            std::lock_guard lock(mutex_);
            ++generation_;
            stop_workers_ = false;
            found_.clear();
            pending_ = 0;
            share_difficulty_ = target_difficulty(job.target);
            running_workers_ = options_.workers;
        }
        constexpr std::uint64_t space = std::uint64_t{1} << 32;
        for (std::size_t w = 0; w < options_.workers; ++w) {
            const std::uint64_t begin = space * w / options_.workers;
            const std::uint64_t end = space * (w + 1) / options_.workers;
            workers.emplace_back([this, begin, end, &plain, offset, target = job.target, g = generation_] {
                work(begin, end, plain, offset, target, g);
            });
        }
        const auto stop = [&] {
            {
                std::lock_guard lock(mutex_);
                stop_workers_ = true;
            }
            worker_cv_.notify_all();
            workers.clear();
        };

        std::optional<pool::Job> next;
        bool switch_job = false;
        while (!switch_job) {
            std::unique_lock lock(mutex_);
            coordinator_cv_.wait_for(lock, std::chrono::milliseconds(20),
                                     [&] { return !found_.empty() || running_workers_ == 0 || cancelled_; });
            if (cancelled_) {
                lock.unlock();
                stop();
                throw Cancelled("solve of link " + task_.link_id + " cancelled");
            }
            if (!found_.empty()) {
                const Found share = found_.front();
                found_.pop_front();
                lock.unlock();
                SubmittedShare record{job.job_id, plain, share.nonce, share.result, job.target, false};
                try {
                    const auto verdict = session.submit_share(job.job_id, share.nonce, share.result);
                    record.accepted = verdict.accepted;
                    lock.lock();
                    ++progress_.shares_accepted;
                    if (verdict.link) {
                        progress_.credited = verdict.link->credited;
                        progress_.required = verdict.link->required;
                        progress_.resolved_url = verdict.link->url;
                    } else {
                        progress_.credited += share_difficulty_;
                    }
                } catch (const pool::StaleJob&) {
                    lock.lock();
                    ++progress_.shares_rejected;
                    switch_job = true;
                } catch (const pool::InvalidShare&) {
                    lock.lock();
                    ++progress_.shares_rejected;
                }
                ++progress_.shares_submitted;
                --pending_;
                submitted_.push_back(std::move(record));
                const bool done = resolved();
                lock.unlock();
                worker_cv_.notify_all();
                if (done) {
                    stop();
                    return progress();
                }
                continue;
            }
            if (running_workers_ == 0)
                switch_job = true;
            lock.unlock();
            if (auto pushed = session.wait_push(std::chrono::steady_clock::now())) {
                next = std::move(pushed);
                switch_job = true;
            }
        }
        stop();
        job = next ? std::move(*next) : session.get_job();
    }
}

SolveProgress ShortLinkSolver::progress() const
{
    std::lock_guard lock(mutex_);
    return progress_;
}

void ShortLinkSolver::cancel() noexcept
{
    cancelled_ = true;
    coordinator_cv_.notify_all();
}

SolveProgress solve(const ShortLinkTask& task, const SolveOptions& options)
{
    return ShortLinkSolver(task, options).run();
}

}  // namespace minetrace::shortlink
