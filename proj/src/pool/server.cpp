#include <atomic>
#include <condition_variable>
#include <list>
#include <thread>

#include "minetrace/pool/net.hpp"
#include "minetrace/pool/simulator.hpp"
#include "wire.hpp"

namespace minetrace::pool {

namespace {

using nlohmann::json;

struct Connection {
    LineSocket socket;
    std::mutex write_mutex;
    std::optional<PoolSimulator::SessionId> session;  // guarded by write_mutex
    std::atomic<bool> done{false};
    std::thread thread;

    void send(const json& message)
    {
        std::lock_guard lock(write_mutex);
        socket.send_line(message.dump());
    }
};

json error_reply(const json& id, const char* code, const std::string& message)
{
    return {{"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

}  // namespace

struct SimulatorServer::Impl {
    PoolSimulator& simulator;
    std::string host;
    std::unique_ptr<TcpListener> listener;
    std::thread accept_thread;
    std::atomic<bool> running{false};
    std::mutex connections_mutex;
    std::list<std::shared_ptr<Connection>> connections;
    std::atomic<std::size_t> served{0};

    std::thread timer_thread;
    std::mutex timer_mutex;
    std::condition_variable timer_cv;
    std::chrono::milliseconds tip_interval{0};
    bool timer_stop = false;

    Impl(PoolSimulator& sim, std::string h) : simulator(sim), host(std::move(h)) {}

    void accept_loop()
    {
        while (running) {
            auto socket = listener->accept(std::chrono::milliseconds(100));
            reap();
            if (!socket)
                continue;
            auto conn = std::make_shared<Connection>();
            conn->socket = std::move(*socket);
            ++served;
            std::lock_guard lock(connections_mutex);
            connections.push_back(conn);
            conn->thread = std::thread([this, conn] { serve(*conn); });
        }
    }

    void reap()
    {
        std::lock_guard lock(connections_mutex);
        for (auto it = connections.begin(); it != connections.end();) {
            if ((*it)->done) {
                (*it)->thread.join();
                it = connections.erase(it);
            } else {
                ++it;
            }
        }
    }

    void serve(Connection& conn)
    {
        try {
            for (;;) {
                const auto line = conn.socket.read_line(std::chrono::steady_clock::time_point::max());
                if (!line)
                    continue;
                handle(conn, *line);
            }
        } catch (const Error&) {
            // peer gone or server stopping
        }
        std::optional<PoolSimulator::SessionId> session;
        {
            std::lock_guard lock(conn.write_mutex);
            session = conn.session;
            conn.session.reset();
        }
        if (session)
            simulator.close_session(*session);
        conn.done = true;
    }

    void handle(Connection& conn, const std::string& line)
    {
        const json message = json::parse(line, nullptr, false);
        if (message.is_discarded() || !message.is_object()) {
            conn.send(error_reply(nullptr, wire::code::bad_request, "unparsable message"));
            return;
        }
        const json id = message.value("id", json());
        const std::string method = message.value("method", "");
        const json params = message.value("params", json::object());
        try {
            std::optional<PoolSimulator::SessionId> session;
            {
                std::lock_guard lock(conn.write_mutex);
                session = conn.session;
            }
            if (method == "login") {
                if (session)
                    throw ProtocolError("already logged in");
                std::optional<std::string> link;
                if (params.contains("link"))
                    link = params.at("link").get<std::string>();
                const auto opened = simulator.open_session(params.at("token").get<std::string>(),
                                                           params.value("endpoint", ""), link);
                const IssuedJob job = simulator.issue_job(opened);
                json result = {{"job", wire::job_json(job.job_id, job.blob, job.target)}};
                if (const auto status = simulator.link_status(opened))
                    result["link"] = wire::link_json(*status);
                std::lock_guard lock(conn.write_mutex);
                conn.session = opened;
                conn.socket.send_line(json{{"id", id}, {"result", result}}.dump());
                return;
            }
            if (!session)
                throw AuthRejected("login first");
            if (method == "getjob") {
                const IssuedJob job = simulator.issue_job(*session);
                conn.send({{"id", id}, {"result", {{"job", wire::job_json(job.job_id, job.blob, job.target)}}}});
            } else if (method == "submit") {
                const auto outcome =
                    simulator.submit(*session, params.at("job_id").get<std::string>(),
                                     wire::nonce_from_hex(params.at("nonce").get<std::string>()),
                                     HashDigest::from_hex(params.at("result").get<std::string>()));
                json result = {{"status", "OK"}, {"block_found", outcome.block_found}};
                if (outcome.link)
                    result["link"] = wire::link_json(*outcome.link);
                conn.send({{"id", id}, {"result", result}});
            } else {
                conn.send(error_reply(id, wire::code::bad_request, "unknown method " + method));
            }
        } catch (const AuthRejected& e) {
            conn.send(error_reply(id, wire::code::auth_rejected, e.what()));
        } catch (const StaleJob& e) {
            conn.send(error_reply(id, wire::code::stale_job, e.what()));
        } catch (const InvalidShare& e) {
            conn.send(error_reply(id, wire::code::invalid_share, e.what()));
        } catch (const ConnectFailure&) {
            throw;
        } catch (const std::exception& e) {
            conn.send(error_reply(id, wire::code::bad_request, e.what()));
        }
    }

    void push_jobs()
    {
        std::vector<std::shared_ptr<Connection>> live;
        {
            std::lock_guard lock(connections_mutex);
            live.assign(connections.begin(), connections.end());
        }
        for (const auto& conn : live) {
            std::lock_guard lock(conn->write_mutex);
            if (!conn->session || conn->done)
                continue;
            try {
                const IssuedJob job = simulator.issue_job(*conn->session);
                conn->socket.send_line(
                    json{{"method", "job"}, {"params", wire::job_json(job.job_id, job.blob, job.target)}}.dump());
            } catch (const Error&) {
                conn->socket.shutdown();
            }
        }
    }

    void timer_loop()
    {
        std::unique_lock lock(timer_mutex);
        while (!timer_stop) {
            if (tip_interval.count() <= 0) {
                timer_cv.wait(lock);
                continue;
            }
            if (timer_cv.wait_for(lock, tip_interval, [this] { return timer_stop; }))
                break;
            lock.unlock();
            simulator.advance_tip();
            lock.lock();
        }
    }
};

SimulatorServer::SimulatorServer(PoolSimulator& simulator, std::string host, std::uint16_t port)
    : impl_(std::make_unique<Impl>(simulator, std::move(host))), port_(port)
{
    simulator.set_tip_listener([impl = impl_.get()] { impl->push_jobs(); });
    impl_->timer_thread = std::thread([impl = impl_.get()] { impl->timer_loop(); });
}

SimulatorServer::~SimulatorServer()
{
    stop();
    impl_->simulator.set_tip_listener({});
    {
        std::lock_guard lock(impl_->timer_mutex);
        impl_->timer_stop = true;
    }
    impl_->timer_cv.notify_all();
    impl_->timer_thread.join();
}

void SimulatorServer::start()
{
    if (impl_->running)
        return;
    impl_->listener = std::make_unique<TcpListener>(impl_->host, port_);
    port_ = impl_->listener->port();
    impl_->running = true;
    impl_->accept_thread = std::thread([impl = impl_.get()] { impl->accept_loop(); });
}

void SimulatorServer::stop()
{
    if (!impl_->running)
        return;
    impl_->running = false;
    impl_->listener->shutdown();
    impl_->accept_thread.join();
    impl_->listener.reset();
    std::list<std::shared_ptr<Connection>> connections;
    {
        std::lock_guard lock(impl_->connections_mutex);
        connections.swap(impl_->connections);
    }
    for (const auto& conn : connections)
        conn->socket.shutdown();
    for (const auto& conn : connections)
        conn->thread.join();
}

bool SimulatorServer::running() const noexcept
{
    return impl_->running;
}

std::string SimulatorServer::url(std::size_t endpoint) const
{
    return impl_->host + ":" + std::to_string(port_) + "/" + std::to_string(endpoint);
}

void SimulatorServer::set_tip_interval(std::chrono::milliseconds interval)
{
    {
        std::lock_guard lock(impl_->timer_mutex);
        impl_->tip_interval = interval;
    }
    impl_->timer_cv.notify_all();
}

std::size_t SimulatorServer::connections_served() const noexcept
{
    return impl_->served;
}

}  // namespace minetrace::pool
