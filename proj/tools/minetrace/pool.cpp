#include <atomic>
#include <csignal>
#include <iostream>
#include <thread>

#include <json.hpp>

#include "common.hpp"
#include "minetrace/pool/collector.hpp"
#include "minetrace/pool/simulator.hpp"
#include "minetrace/shortlink/shortlink.hpp"

namespace minetrace::cli {

namespace {

using json = nlohmann::ordered_json;

std::atomic<bool> interrupted{false};

void on_signal(int)
{
    interrupted = true;
}

void install_signal_handlers()
{
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
}

struct SimulateArgs {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    std::vector<std::string> tokens{"public"};
    std::uint64_t seed = 1;
    std::size_t steps = 100;
    std::size_t wins = 30;
    std::size_t blobs_per_tip = 8;
    std::size_t endpoints = 1;
    std::size_t endpoints_per_backend = 1;
    std::string key = "0:00";
    std::uint64_t share_difficulty = 16;
    std::int64_t tip_interval_ms = 1000;
    std::int64_t duration_ms = 0;
    std::vector<std::string> links;
    std::string url_file;
    std::string chain_out;
    std::string truth_out;
};

pool::LinkSpec parse_link(const std::string& text)
{
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? first : text.find(':', first + 1);
    if (second == std::string::npos)
        throw UsageError("link must be id:hashes:url");
    pool::LinkSpec spec;
    spec.id = text.substr(0, first);
    spec.required_hashes = std::stoull(text.substr(first + 1, second - first - 1));
    spec.url = text.substr(second + 1);
    return spec;
}

void run_simulate(const SimulateArgs& args, RunState&)
{
    if (args.wins > args.steps)
        throw UsageError("--wins exceeds --steps");
    pool::ScriptParams params;
    params.blocks = args.steps + 1;
    pool::SimulatorConfig config;
    config.chain_script = pool::synthetic_chain_script(params, args.seed);
    config.pool_wins = pool::choose_pool_wins(args.steps, args.wins, args.seed);
    config.blobs_per_tip = args.blobs_per_tip;
    config.endpoints = args.endpoints;
    config.endpoints_per_backend = args.endpoints_per_backend;
    config.tokens = {args.tokens.begin(), args.tokens.end()};
    config.key = parse_key(args.key);
    config.share_difficulty = args.share_difficulty;
    config.seed = args.seed;
    for (const auto& link : args.links)
        config.links.push_back(parse_link(link));

    pool::PoolSimulator simulator(std::move(config));
    pool::SimulatorServer server(simulator, args.host, args.port);
    install_signal_handlers();
    server.start();
    for (std::size_t e = 0; e < args.endpoints; ++e)
        std::cerr << "listening " << server.url(e) << '\n';
    if (!args.url_file.empty()) {
        Output out(args.url_file);
        for (std::size_t e = 0; e < args.endpoints; ++e)
            out.stream() << server.url(e) << '\n';
    }
    server.set_tip_interval(std::chrono::milliseconds(args.tip_interval_ms));

    const auto start = std::chrono::steady_clock::now();
    while (!interrupted && simulator.remaining_steps() > 0 &&
           (args.duration_ms <= 0 || std::chrono::steady_clock::now() - start < std::chrono::milliseconds(args.duration_ms)))
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    // Give connected collectors one more poll at the final tip.
    if (!interrupted && args.tip_interval_ms > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(args.tip_interval_ms));
    server.stop();

    if (!args.chain_out.empty()) {
        Output out(args.chain_out);
        write_chain_snapshot(out.stream(), simulator.chain());
    }
    if (!args.truth_out.empty()) {
        Output out(args.truth_out);
        for (const auto height : simulator.pool_won_heights())
            out.stream() << json{{"height", height}}.dump() << '\n';
    }
    std::cerr << "tip " << simulator.tip_height() << "  pool blocks " << simulator.pool_won_heights().size()
              << "  connections " << server.connections_served() << '\n';
}

struct CollectArgs {
    std::vector<std::string> endpoints;
    std::string token = "public";
    std::int64_t duration_ms = 60'000;
    std::int64_t interval_ms = 500;
    std::int64_t io_timeout_ms = 5000;
    std::int64_t backoff_base_ms = 1000;
    std::int64_t backoff_cap_ms = 60'000;
    std::string out = "-";
};

void run_collect(const CollectArgs& args, RunState& state)
{
    Output out(args.out, true);
    pool::JobLogWriter writer(out.stream());
    install_signal_handlers();

    pool::PollOptions options;
    options.io_timeout = std::chrono::milliseconds(args.io_timeout_ms);
    options.backoff = {std::chrono::milliseconds(args.backoff_base_ms), std::chrono::milliseconds(args.backoff_cap_ms)};
    options.stop = &interrupted;

    std::vector<pool::PollResult> results(args.endpoints.size());
    std::vector<std::string> failures(args.endpoints.size());
    {
        std::vector<std::jthread> threads;
        for (std::size_t i = 0; i < args.endpoints.size(); ++i) {
            threads.emplace_back([&, i] {
                pool::PoolEndpoint endpoint{args.endpoints[i], args.token, std::chrono::milliseconds(args.interval_ms)};
                try {
                    pool::validate(endpoint);
                    results[i] = pool::poll_jobs(endpoint, std::chrono::milliseconds(args.duration_ms), &writer, options);
                } catch (const std::exception& e) {
                    failures[i] = e.what();
                }
            });
        }
    }

    std::size_t jobs = 0;
    bool fatal = false;
    for (std::size_t i = 0; i < args.endpoints.size(); ++i) {
        if (!failures[i].empty()) {
            std::cerr << "minetrace: " << args.endpoints[i] << ": " << failures[i] << '\n';
            fatal = true;
            continue;
        }
        jobs += results[i].jobs.size();
        for (const auto& gap : results[i].gaps) {
            std::cerr << json{{"type", "gap"},
                              {"endpoint", gap.endpoint},
                              {"start_ms", gap.start_ms},
                              {"end_ms", gap.end_ms},
                              {"reason", gap.reason}}
                             .dump()
                      << '\n';
            state.status = exit_partial;
        }
    }
    std::cerr << "jobs " << jobs << '\n';
    if (fatal)
        state.status = jobs > 0 ? exit_partial : exit_fatal;
}

struct EnumerateArgs {
    unsigned max_length = shortlink::max_id_length;
    bool count_only = false;
    std::uint64_t limit = 0;
};

void run_enumerate(const EnumerateArgs& args, RunState&)
{
    if (args.count_only) {
        std::cout << shortlink::id_space_size(args.max_length) << '\n';
        return;
    }
    shortlink::IdEnumerator ids(args.max_length);
    std::uint64_t emitted = 0;
    while (auto id = ids.next()) {
        if (args.limit != 0 && emitted++ == args.limit)
            break;
        std::cout << *id << '\n';
    }
}

struct EtaArgs {
    std::uint64_t hashes = 1024;
    std::string rate = "20";
};

void run_eta(const EtaArgs& args, RunState&)
{
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 1;
    const auto slash = args.rate.find('/');
    try {
        numerator = std::stoull(args.rate.substr(0, slash));
        if (slash != std::string::npos)
            denominator = std::stoull(args.rate.substr(slash + 1));
    } catch (const std::exception&) {
        throw UsageError("rate must be an integer or a fraction a/b");
    }
    const auto t = shortlink::time_to_resolve(args.hashes, numerator, denominator);
    std::cout << "seconds " << t.to_string() << '\n' << "years " << t.years() << '\n';
}

struct SolveArgs {
    std::string endpoint;
    std::string token = "public";
    std::string link;
    std::uint64_t required = 0;
    std::size_t workers = 1;
    std::string isa = std::string(kernels::isa_name(kernels::best_isa()));
    std::size_t batch = 64;
    std::string key = "0:00";
    std::int64_t io_timeout_ms = 5000;
};

void run_solve(const SolveArgs& args, RunState&)
{
    shortlink::ShortLinkTask task;
    task.link_id = args.link;
    task.required_hashes = args.required;
    task.creator_token = args.token;
    task.endpoint = {args.endpoint, args.token, std::chrono::milliseconds(500)};

    shortlink::SolveOptions options;
    options.workers = args.workers;
    if (args.isa == "scalar")
        options.isa = kernels::Isa::scalar;
    else if (args.isa == "avx2")
        options.isa = kernels::Isa::avx2;
    else
        throw UsageError("isa must be scalar or avx2");
    if (!kernels::isa_supported(options.isa))
        throw UsageError(args.isa + " is not available on this machine");
    options.batch = args.batch;
    options.key = parse_key(args.key);
    options.session.io_timeout = std::chrono::milliseconds(args.io_timeout_ms);

    shortlink::ShortLinkSolver solver(task, options);
    install_signal_handlers();
    std::jthread watcher([&](std::stop_token stop) {
        while (!stop.stop_requested()) {
            if (interrupted) {
                solver.cancel();
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
    });
    const auto progress = solver.run();
    watcher.request_stop();
    std::cout << json{{"link", args.link},
                      {"url", progress.resolved_url ? json(*progress.resolved_url) : json(nullptr)},
                      {"hashes", progress.hashes_done},
                      {"shares_submitted", progress.shares_submitted},
                      {"shares_accepted", progress.shares_accepted},
                      {"shares_rejected", progress.shares_rejected},
                      {"credited", progress.credited},
                      {"required", progress.required}}
                     .dump()
              << '\n';
}

}  // namespace

void add_pool_commands(CLI::App& app, RunState& state)
{
    auto* pool_cmd = app.add_subcommand("pool", "Pool job collection and the mock pool");
    pool_cmd->require_subcommand(1);

    auto sim = std::make_shared<SimulateArgs>();
    auto* simulate = pool_cmd->add_subcommand("simulate", "Serve a scripted mock pool over TCP");
    simulate->add_option("--host", sim->host)->capture_default_str();
    simulate->add_option("--port", sim->port, "0 picks a free port")->capture_default_str();
    simulate->add_option("--token", sim->tokens, "Accepted site keys")->capture_default_str();
    simulate->add_option("--seed", sim->seed)->capture_default_str();
    simulate->add_option("--steps", sim->steps, "Blocks after the starting tip")->capture_default_str();
    simulate->add_option("--wins", sim->wins, "Blocks the pool wins")->capture_default_str();
    simulate->add_option("--blobs-per-tip", sim->blobs_per_tip)->capture_default_str();
    simulate->add_option("--endpoints", sim->endpoints)->capture_default_str();
    simulate->add_option("--endpoints-per-backend", sim->endpoints_per_backend)->capture_default_str();
    simulate->add_option("--key", sim->key, "Blob obfuscation offset:hexbyte")->capture_default_str();
    simulate->add_option("--share-difficulty", sim->share_difficulty)->capture_default_str();
    simulate->add_option("--tip-interval-ms", sim->tip_interval_ms, "Time per block")->capture_default_str();
    simulate->add_option("--duration-ms", sim->duration_ms, "Stop after this long (0: end of script)");
    simulate->add_option("--link", sim->links, "Short link id:hashes:url");
    simulate->add_option("--url-file", sim->url_file, "Write endpoint URLs here once listening");
    simulate->add_option("--chain-out", sim->chain_out, "Write the realized chain snapshot");
    simulate->add_option("--truth-out", sim->truth_out, "Write the heights the pool won");
    simulate->callback([sim, &state] { run_simulate(*sim, state); });

    auto col = std::make_shared<CollectArgs>();
    auto* collect = pool_cmd->add_subcommand("collect", "Poll pool endpoints and append jobs to a log");
    collect->add_option("-e,--endpoint", col->endpoints, "host:port[/name]")->required();
    collect->add_option("--token", col->token)->capture_default_str();
    collect->add_option("--duration-ms", col->duration_ms)->capture_default_str();
    collect->add_option("--interval-ms", col->interval_ms)->capture_default_str();
    collect->add_option("--io-timeout-ms", col->io_timeout_ms)->capture_default_str();
    collect->add_option("--backoff-base-ms", col->backoff_base_ms)->capture_default_str();
    collect->add_option("--backoff-cap-ms", col->backoff_cap_ms)->capture_default_str();
    collect->add_option("-o,--out", col->out, "Job log (appended)")->capture_default_str();
    collect->callback([col, &state] { run_collect(*col, state); });

    auto* link_cmd = app.add_subcommand("shortlink", "Short-link ID space, cost and resolution");
    link_cmd->require_subcommand(1);

    auto en = std::make_shared<EnumerateArgs>();
    auto* enumerate = link_cmd->add_subcommand("enumerate", "List or count link IDs");
    enumerate->add_option("--max-length", en->max_length)->capture_default_str()->check(CLI::Range(1, 12));
    enumerate->add_flag("--count", en->count_only, "Print only the number of IDs");
    enumerate->add_option("--limit", en->limit, "Stop after this many IDs");
    enumerate->callback([en, &state] { run_enumerate(*en, state); });

    auto eta = std::make_shared<EtaArgs>();
    auto* eta_cmd = link_cmd->add_subcommand("eta", "Time to resolve a link at a client hash rate");
    eta_cmd->add_option("--hashes", eta->hashes)->capture_default_str();
    eta_cmd->add_option("--rate", eta->rate, "Hashes per second, integer or a/b")->capture_default_str();
    eta_cmd->callback([eta, &state] { run_eta(*eta, state); });

    auto so = std::make_shared<SolveArgs>();
    auto* solve = link_cmd->add_subcommand("solve", "Mine shares until a link resolves");
    solve->add_option("-e,--endpoint", so->endpoint)->required();
    solve->add_option("--token", so->token)->capture_default_str();
    solve->add_option("--link", so->link)->required();
    solve->add_option("--required", so->required, "Expected hash-equivalents, informational");
    solve->add_option("--workers", so->workers)->capture_default_str()->check(CLI::PositiveNumber);
    solve->add_option("--isa", so->isa, "scalar or avx2")->capture_default_str();
    solve->add_option("--batch", so->batch)->capture_default_str()->check(CLI::PositiveNumber);
    solve->add_option("--key", so->key, "Blob obfuscation offset:hexbyte")->capture_default_str();
    solve->add_option("--io-timeout-ms", so->io_timeout_ms)->capture_default_str();
    solve->callback([so, &state] { run_solve(*so, state); });
}

}  // namespace minetrace::cli
