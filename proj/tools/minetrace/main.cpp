#include <iostream>

#include "common.hpp"

int main(int argc, char** argv)
{
    using namespace minetrace::cli;

    CLI::App app{"Browser-mining detection and Monero pool attribution"};
    app.set_config("--config", "", "TOML config with option defaults")->envname("MINETRACE_CONFIG");
    app.require_subcommand(1);

    RunState state;
    add_web_commands(app, state);
    add_pool_commands(app, state);
    add_analysis_commands(app, state);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_fatal;
    } catch (const std::exception& e) {
        std::cerr << "minetrace: " << e.what() << '\n';
        return exit_fatal;
    }
    return state.status;
}
