#include <doctest.h>

#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "minetrace/filter/fetch.hpp"
#include "minetrace/filter/rules.hpp"
#include "minetrace/filter/scripts.hpp"

using namespace minetrace::filter;

namespace {

class LocalServer {
public:
    LocalServer()
    {
        server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("0123456789", "text/html");
        });
        server_.Get("/big", [](const httplib::Request&, httplib::Response& res) {
            res.set_content_provider("text/html", [](std::size_t offset, httplib::DataSink& sink) {
                static const std::string chunk(4096, 'x');
                if (offset >= 400 * 1024) {
                    sink.done();
                    return true;
                }
                return sink.write(chunk.data(), chunk.size());
            });
        });
        server_.Get("/exact", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(std::string(256 * 1024, 'y'), "text/html");
        });
        server_.Get(R"(/hop/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
            const int n = std::stoi(req.matches[1]);
            if (n == 0)
                res.set_content("landed", "text/html");
            else
                res.set_redirect("/hop/" + std::to_string(n - 1));
        });
        server_.Get("/elsewhere", [](const httplib::Request&, httplib::Response& res) {
            res.set_redirect("http://other.invalid/");
        });
        server_.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(1500));
            res.set_content("late", "text/html");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer()
    {
        server_.stop();
        thread_.join();
    }

    std::string authority() const { return "127.0.0.1:" + std::to_string(port_); }

    FetchOptions options(std::string path) const
    {
        FetchOptions o;
        o.url_prefix = "http://";
        o.url_suffix = std::move(path);
        o.timeout = std::chrono::milliseconds(5000);
        return o;
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

LocalServer& server()
{
    static LocalServer s;
    return s;
}

}  // namespace

TEST_SUITE("fetch_landing")
{
    TEST_CASE("short response is kept whole")
    {
        const auto r = fetch_landing(server().authority(), server().options("/"));
        REQUIRE(r.error == FetchError::none);
        REQUIRE(r.page);
        CHECK(r.page->body == "0123456789");
        CHECK_FALSE(r.page->truncated_at);
        CHECK(r.page->source == PageSource::fetched);
        CHECK(r.status == 200);
    }

    TEST_CASE("long response is cut at the limit")
    {
        const auto r = fetch_landing(server().authority(), server().options("/big"));
        REQUIRE(r.error == FetchError::none);
        CHECK(r.page->body.size() == 262144);
        REQUIRE(r.page->truncated_at);
        CHECK(*r.page->truncated_at == 262144);
    }

    TEST_CASE("response exactly at the limit is not truncated")
    {
        const auto r = fetch_landing(server().authority(), server().options("/exact"));
        REQUIRE(r.error == FetchError::none);
        CHECK(r.page->body.size() == 262144);
        CHECK_FALSE(r.page->truncated_at);
    }

    TEST_CASE("custom limit")
    {
        auto o = server().options("/big");
        o.limit = 1000;
        const auto r = fetch_landing(server().authority(), o);
        CHECK(r.page->body.size() == 1000);
        CHECK(r.page->truncated_at == std::optional<std::size_t>(1000));
    }

    TEST_CASE("same-host redirects up to five hops")
    {
        const auto ok = fetch_landing(server().authority(), server().options("/hop/5"));
        REQUIRE(ok.error == FetchError::none);
        CHECK(ok.page->body == "landed");
        CHECK(ok.final_url.ends_with("/hop/0"));

        const auto too_many = fetch_landing(server().authority(), server().options("/hop/6"));
        CHECK(too_many.error == FetchError::too_many_redirects);
        CHECK_FALSE(too_many.page);
    }

    TEST_CASE("cross-host redirect is not followed")
    {
        const auto r = fetch_landing(server().authority(), server().options("/elsewhere"));
        REQUIRE(r.error == FetchError::none);
        CHECK(r.status / 100 == 3);
        CHECK(r.final_url.ends_with("/elsewhere"));
    }

    TEST_CASE("timeout is recorded")
    {
        auto o = server().options("/slow");
        o.timeout = std::chrono::milliseconds(300);
        const auto r = fetch_landing(server().authority(), o);
        CHECK(r.error == FetchError::timeout);
    }

    TEST_CASE("batch continues past failures and keeps order")
    {
        auto o = server().options("/");
        o.timeout = std::chrono::milliseconds(3000);
        const std::vector<std::string> domains = {server().authority(), "no-such-host.invalid",
                                                  "127.0.0.1:1", server().authority()};
        const auto results = fetch_batch(domains, o, 3);
        REQUIRE(results.size() == 4);
        CHECK(results[0].error == FetchError::none);
        CHECK(results[1].error == FetchError::dns_failure);
        CHECK(results[2].error == FetchError::connect_failure);
        CHECK(results[3].error == FetchError::none);
        CHECK(results[1].domain == "no-such-host.invalid");
    }
}

TEST_SUITE("extract_scripts")
{
    TEST_CASE("simple src")
    {
        const auto items = extract_scripts(R"(<script src="a.js"></script>)");
        REQUIRE(items.size() == 1);
        CHECK(items[0].src == std::optional<std::string>("a.js"));
        CHECK_FALSE(items[0].inline_code);
        CHECK(items[0].position == 0);
    }

    TEST_CASE("empty body") { CHECK(extract_scripts("").empty()); }

    TEST_CASE("agrees with lxml on sample pages")
    {
        std::ifstream in(std::string(MINETRACE_FIXTURE_DIR) + "/html/pages.json");
        const auto pages = nlohmann::json::parse(in);
        for (const auto& page : pages) {
            const std::string html = page["html"];
            const auto items = extract_scripts(html);
            const auto& want = page["scripts"];
            INFO(html);
            REQUIRE(items.size() == want.size());
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (want[i]["src"].is_null())
                    CHECK_FALSE(items[i].src);
                else
                    CHECK(items[i].src == std::optional<std::string>(want[i]["src"].get<std::string>()));
                if (want[i]["inline_code"].is_null())
                    CHECK_FALSE(items[i].inline_code);
                else
                    CHECK(items[i].inline_code ==
                          std::optional<std::string>(want[i]["inline_code"].get<std::string>()));
            }
        }
    }

    TEST_CASE("truncated inside an inline script keeps the partial body")
    {
        const std::string head = "<html><head><script src=\"x.js\"></script><script>";
        const std::string code = "var m = new CoinHive.Anonymous('k'); m.start(); // more";
        const std::string full = head + code + "</script></head></html>";
        for (std::size_t cut = head.size(); cut <= head.size() + code.size(); cut += 7) {
            const auto items = extract_scripts(std::string_view(full).substr(0, cut));
            REQUIRE(items.size() == 2);
            CHECK(items[1].inline_code == std::optional<std::string>(code.substr(0, cut - head.size())));
            CHECK(items[1].position == head.size() - 8);
        }
    }

    TEST_CASE("truncated inside an open tag")
    {
        const auto with_src = extract_scripts(R"(<p><script src="https://coinhive.com/a.js" asy)");
        REQUIRE(with_src.size() == 1);
        CHECK(with_src[0].src == std::optional<std::string>("https://coinhive.com/a.js"));

        const auto bare = extract_scripts("<p><script ty");
        REQUIRE(bare.size() == 1);
        CHECK_FALSE(bare[0].src);
        CHECK(bare[0].inline_code == std::optional<std::string>(""));
    }

    TEST_CASE("positions strictly increase and every item has content")
    {
        std::mt19937_64 rng(7);
        const std::vector<std::string> pieces = {"<script>",  "</script>", "<script src=\"a.js\">", "<!--",
                                                 "-->",       "<p>",       "text",                  "<",
                                                 ">",         "\"",        "<SCRIPT SRC=b>",        "</scr"};
        for (int round = 0; round < 500; ++round) {
            std::string doc;
            const int n = static_cast<int>(rng() % 30);
            for (int i = 0; i < n; ++i)
                doc += pieces[rng() % pieces.size()];
            const auto items = extract_scripts(doc);
            for (std::size_t i = 0; i < items.size(); ++i) {
                CHECK((items[i].src || items[i].inline_code));
                CHECK(items[i].position < doc.size());
                if (i > 0)
                    CHECK(items[i].position > items[i - 1].position);
            }
        }
    }

    TEST_CASE("url_host")
    {
        CHECK(url_host("https://CoinHive.com/lib/x.js") == std::optional<std::string>("coinhive.com"));
        CHECK(url_host("//cdn.example.org/x.js") == std::optional<std::string>("cdn.example.org"));
        CHECK(url_host("http://user@h.example:8080/p") == std::optional<std::string>("h.example"));
        CHECK_FALSE(url_host("/local/app.js"));
        CHECK_FALSE(url_host("a.js"));
    }
}

TEST_SUITE("filter rules")
{
    TEST_CASE("rule kinds")
    {
        const auto rules = load_filter_list(
            "! comment\n\n||coinhive.com^\n/miner\\.js/\ncoinhive.min.js\n||jsecoin.com/server$third-party\n"
            "/miner\\.js(/\n");
        REQUIRE(rules.size() == 6);
        CHECK(rules[0].kind == RuleKind::comment);
        CHECK(rules[1].kind == RuleKind::domain_anchor);
        CHECK(rules[1].host == "coinhive.com");
        CHECK(rules[1].label == "coinhive");
        CHECK(rules[2].kind == RuleKind::regex);
        CHECK(rules[2].usable);
        CHECK(rules[3].kind == RuleKind::substring);
        CHECK(rules[3].label == "coinhive.min.js");
        CHECK(rules[4].host == "jsecoin.com");
        CHECK(rules[4].path == "/server");
        CHECK(rules[4].label == "jsecoin");
        CHECK(rules[5].kind == RuleKind::regex);
        CHECK_FALSE(rules[5].usable);
        CHECK(rules[5].error.starts_with("BadRegex"));
    }

    TEST_CASE("anchor matches host and subdomains only")
    {
        const auto rules = load_filter_list("||coinhive.com^");
        const std::vector<ScriptItem> scripts = {
            {"https://coinhive.com/lib/coinhive.min.js", std::nullopt, 0},
            {"https://WS.CoinHive.com/x.js", std::nullopt, 10},
            {"https://notcoinhive.com/x.js", std::nullopt, 20},
            {"https://coinhive.com.evil.org/x.js", std::nullopt, 30},
            {std::nullopt, std::string("https://coinhive.com/"), 40},
        };
        const auto hits = match_page(scripts, rules);
        REQUIRE(hits.size() == 2);
        CHECK(hits[0].script == 0);
        CHECK(hits[0].label == "coinhive");
        CHECK(hits[1].script == 1);
        for (const auto& hit : hits)
            CHECK(url_host(*scripts[hit.script].src)->ends_with(rules[hit.rule].host));
    }

    TEST_CASE("anchor with a path")
    {
        const auto rules = load_filter_list("||example.com/miner/");
        const std::vector<ScriptItem> scripts = {{"https://example.com/miner/a.js", std::nullopt, 0},
                                                 {"https://example.com/other.js", std::nullopt, 1}};
        const auto hits = match_page(scripts, rules);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].script == 0);
    }

    TEST_CASE("substring case folding is opt-in")
    {
        const auto rules = load_filter_list("coinhive");
        const std::vector<ScriptItem> scripts = {
            {std::nullopt, std::string("var m = new CoinHive.Anonymous('key');"), 0}};
        CHECK(match_page(scripts, rules).empty());
        const auto hits = match_page(scripts, rules, MatchOptions{.fold_case = true});
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].label == "coinhive");
    }

    TEST_CASE("regex matches src and inline code")
    {
        const auto rules = load_filter_list("/miner\\.(js|min\\.js)/");
        const std::vector<ScriptItem> scripts = {{"https://x.org/miner.min.js", std::nullopt, 0},
                                                 {std::nullopt, std::string("load('Miner.js')"), 1},
                                                 {std::nullopt, std::string("load('miner.js')"), 2}};
        CHECK(match_page(scripts, rules).size() == 2);
        CHECK(match_page(scripts, rules, {.fold_case = true}).size() == 3);
    }

    TEST_CASE("empty and comment rules never hit")
    {
        const std::vector<ScriptItem> scripts = {{"https://coinhive.com/a.js", std::string("! comment"), 0}};
        CHECK(match_page(scripts, {}).empty());
        CHECK(match_page(scripts, load_filter_list("! comment\n")).empty());
    }

    TEST_CASE("adding rules never removes hits")
    {
        const std::string list =
            "||coinhive.com^\n||crypto-loot.com^\ncoinhive\n/mine[rs]?\\.js/\n! c\nauthedmine\n"
            "/(/\n||jsecoin.com^\nCoinHive\n";
        const auto all = load_filter_list(list);
        const std::vector<ScriptItem> scripts = {
            {"https://coinhive.com/lib/coinhive.min.js", std::nullopt, 0},
            {"https://ws.crypto-loot.com/a.js", std::nullopt, 1},
            {std::nullopt, std::string("new CoinHive.Anonymous('x'); load('miners.js')"), 2},
            {"https://authedmine.com/lib/authedmine.min.js", std::nullopt, 3},
        };
        for (const bool fold : {false, true}) {
            std::size_t previous = 0;
            for (std::size_t n = 0; n <= all.size(); ++n) {
                const auto hits = match_page(scripts, std::span(all).first(n), {.fold_case = fold});
                CHECK(hits.size() >= previous);
                previous = hits.size();
            }
        }
    }

    TEST_CASE("page labels are distinct in first-hit order")
    {
        const std::vector<Hit> hits = {{0, 0, "coinhive"}, {1, 2, "crypto-loot"}, {2, 0, "coinhive"}};
        CHECK(page_labels(hits) == std::vector<std::string>{"coinhive", "crypto-loot"});
    }
}
