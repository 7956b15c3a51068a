#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "ionloss/errors.hpp"

namespace
{
constexpr int exit_config = 2;
constexpr int exit_convergence = 3;

using Command = std::function<void(ionloss::cli::RunConfig const&, std::ostream&,
                                   std::ostream&)>;
}  // namespace

int main(int argc, char** argv)
{
    using namespace ionloss;

    CLI::App app{"Orientation-dependent electron loss of fast ions on diatomic molecules"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string units;
    double tolerance = 0;
    int threads = 0;
    long long seed = -1;

    std::map<std::string, Command> const commands{
        {"scan-theta", cli::cmd_scan_theta},
        {"average", cli::cmd_average},
        {"table", cli::cmd_table},
        {"validate", cli::cmd_validate},
    };
    std::map<std::string, char const*> const help{
        {"scan-theta", "sigma(theta) and delta(theta) on the configured grid"},
        {"average", "chaotic-orientation average against sigma_perp"},
        {"table", "dump the W_ion(s) table"},
        {"validate", "report sudden/charge/eikonal regime checks"},
    };
    for (auto const& [name, _] : commands)
    {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--out", out_path, "output file (default: stdout)");
        sub->add_option("--units", units, "cross-section units for averages")
            ->check(CLI::IsMember({"au", "cm2"}));
        sub->add_option("--tolerance", tolerance, "quadrature relative tolerance");
        sub->add_option("--threads", threads, "worker threads");
        sub->add_option("--seed", seed, "seed for the phi-invariance check");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    std::string const command = app.get_subcommands().front()->get_name();
    try
    {
        auto cfg = config_path.empty() ? cli::default_run_config()
                                       : cli::load_run_config(config_path);
        if (!out_path.empty())
        {
            cfg.output = out_path;
        }
        if (!units.empty())
        {
            cfg.units = cli::parse_units(units);
        }
        if (tolerance != 0)
        {
            cfg.tolerance = tolerance;
        }
        if (threads != 0)
        {
            cfg.threads = threads;
        }
        if (seed >= 0)
        {
            cfg.seed = static_cast<std::uint64_t>(seed);
        }
        cli::validate(cfg);

        // Buffer so that a failed run never leaves a partial file behind.
        std::ostringstream buffer;
        commands.at(command)(cfg, buffer, std::cerr);
        if (cfg.output)
        {
            std::ofstream file(*cfg.output, std::ios::binary);
            if (!file)
            {
                throw ConfigError("cannot write output file " + cfg.output->string());
            }
            file << buffer.str();
        }
        else
        {
            std::cout << buffer.str();
        }
    }
    catch (ConvergenceError const& e)
    {
        std::cerr << "ionloss: not converged: " << e.what() << '\n';
        return exit_convergence;
    }
    catch (ConfigError const& e)
    {
        std::cerr << "ionloss: " << e.what() << '\n';
        return exit_config;
    }
    catch (LoadError const& e)
    {
        std::cerr << "ionloss: " << e.what() << '\n';
        return exit_config;
    }
    catch (DomainError const& e)
    {
        std::cerr << "ionloss: invalid input: " << e.what() << '\n';
        return exit_config;
    }
    return 0;
}
