#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "ionloss/errors.hpp"

using namespace ionloss;
using namespace ionloss::cli;

namespace
{
namespace fs = std::filesystem;

RunConfig parse(std::string const& text)
{
    std::istringstream in(text);
    return parse_run_config(in);
}

std::string config_error(std::string const& text)
{
    try
    {
        parse(text);
    }
    catch (ConfigError const& e)
    {
        return e.what();
    }
    return "no error";
}

fs::path scratch_dir()
{
    static fs::path const dir = [] {
        auto d = fs::temp_directory_path() / ("ionloss_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(std::string const& name, std::string const& content)
{
    auto const path = scratch_dir() / name;
    std::ofstream(path) << content;
    return path;
}

std::string read_file(fs::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int run_cli(std::string const& args)
{
    std::string const command
        = std::string(IONLOSS_EXE) + " " + args + " 2>" + (scratch_dir() / "stderr.txt").string();
    int const status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string const small_scan = R"({
  "projectile": "Fe24+",
  "target": "N2",
  "energies_mev_u": [100],
  "theta_grid": [0, 0.6, 1.5707963267948966]
})";

int count_data_rows(std::string const& csv)
{
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
    {
        if (!line.empty() && line[0] != '#' && line.find("theta_rad") == std::string::npos
            && line.find("channel_m") != 0 && line.find("s,w_ion") != 0)
        {
            ++rows;
        }
    }
    return rows;
}
}  // namespace

TEST(RunConfig, Defaults)
{
    auto const cfg = parse("{}");
    EXPECT_EQ(cfg.projectile_label, "Fe25+");
    EXPECT_EQ(cfg.projectile().electrons(), 1);
    EXPECT_EQ(cfg.projectile().z_eff(), 26);
    EXPECT_EQ(cfg.geometry().size(), 2u);
    EXPECT_DOUBLE_EQ(cfg.geometry().extent(), 2.07);
    EXPECT_EQ(cfg.theta_grid.size(), 31u);
    ASSERT_EQ(cfg.energies_mev_u.size(), 3u);
    EXPECT_EQ(cfg.tolerance, 1e-3);
    EXPECT_EQ(cfg.units, Units::au);
}

TEST(RunConfig, PresetsAndOverrides)
{
    auto const cfg = parse(R"({"projectile": "Fe23+", "theta_grid": {"points": 7},
                               "energies_mev_u": 50, "units": "cm2", "seed": 12})");
    EXPECT_EQ(cfg.projectile().electrons(), 3);
    EXPECT_EQ(cfg.theta_grid.size(), 7u);
    EXPECT_EQ(cfg.energies_mev_u, std::vector<double>{50});
    EXPECT_EQ(cfg.units, Units::cm2);
    EXPECT_EQ(cfg.seed, 12u);

    auto const custom = parse(R"({"projectile": {"z": 26, "electrons": 2, "z_eff": 24},
                                  "target": {"molecule": "N2", "bond_length": 2.2}})");
    EXPECT_EQ(custom.projectile().z_eff(), 24);
    EXPECT_DOUBLE_EQ(custom.geometry().extent(), 2.2);
}

TEST(RunConfig, ShippedConfigsLoad)
{
    for (auto const& entry : fs::directory_iterator(IONLOSS_CONFIG_DIR))
    {
        EXPECT_NO_THROW(load_run_config(entry.path())) << entry.path();
    }
}

TEST(RunConfig, ErrorsNameTheField)
{
    EXPECT_NE(config_error(R"({"energies_mev_u": [10, -1]})").find("energies_mev_u[1]"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"tolerance": 0.5})").find("tolerance"), std::string::npos);
    EXPECT_NE(config_error(R"({"units": "barn"})").find("units"), std::string::npos);
    EXPECT_NE(config_error(R"({"bogus": 1})").find("bogus"), std::string::npos);
    EXPECT_NE(config_error(R"({"projectile": "U91+"})").find("projectile"), std::string::npos);
    EXPECT_NE(config_error(R"({"projectile": {"z": 26, "electrons": 5}})").find("projectile"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"target": {"atoms": [{"z": 92, "position": [0,0,0]}]}})")
                  .find("target.atoms[0].z"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"theta_grid": [0, 2.0]})").find("theta_grid[1]"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"table": {"n_points": 10}})").find("table"), std::string::npos);
    EXPECT_NE(config_error("{not json").find("invalid JSON"), std::string::npos);
    EXPECT_THROW(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST(RunConfig, EchoOmitsRuntimeSettings)
{
    auto cfg = parse(small_scan);
    auto const echo = config_echo(cfg);
    cfg.threads = 7;
    cfg.output = "/tmp/x.csv";
    EXPECT_EQ(config_echo(cfg), echo);
    EXPECT_EQ(echo.find('\n'), std::string::npos);
    EXPECT_NE(echo.find("Fe24+"), std::string::npos);
}

TEST(Commands, ScanThetaLayout)
{
    auto const cfg = parse(small_scan);
    std::ostringstream out;
    std::ostringstream log;
    cmd_scan_theta(cfg, out, log);
    auto const csv = out.str();
    EXPECT_NE(csv.find("theta_rad,channel_m,sigma_au,sigma_cm2,quad_error_au,delta"),
              std::string::npos);
    EXPECT_NE(csv.find("# config:"), std::string::npos);
    EXPECT_NE(csv.find("velocity_au="), std::string::npos);
    EXPECT_NE(csv.find("# ionloss "), std::string::npos);
    EXPECT_EQ(count_data_rows(csv), 6);
    EXPECT_NE(csv.find("1.57079633,2,"), std::string::npos);
    auto const last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
    EXPECT_EQ(last.substr(last.rfind(',') + 1), "0\n");
}

TEST(Commands, ScanThetaWarnsForLowCharge)
{
    auto const cfg = parse(R"({"projectile": {"z": 4, "electrons": 2},
                               "energies_mev_u": [100], "theta_grid": [0, 1.5707963267948966]})");
    std::ostringstream out;
    std::ostringstream log;
    cmd_scan_theta(cfg, out, log);
    EXPECT_NE(out.str().find("# warning: charge"), std::string::npos);
}

TEST(Commands, AverageLayoutAndSingleAtom)
{
    auto const cfg = load_run_config(IONLOSS_CONFIG_DIR "/single_nitrogen.json");
    std::ostringstream out;
    std::ostringstream log;
    cmd_average(cfg, out, log);
    auto const csv = out.str();
    EXPECT_NE(csv.find("channel_m,sigma_avg_au,sigma_perp_au,relative_correction"),
              std::string::npos);
    EXPECT_EQ(count_data_rows(csv), 2);
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
    {
        if (line.rfind("1,", 0) == 0 || line.rfind("2,", 0) == 0)
        {
            double const correction = std::stod(line.substr(line.rfind(',') + 1));
            EXPECT_LT(std::abs(correction), 5e-3) << line;
        }
    }
}

TEST(Commands, AverageUnits)
{
    auto cfg = load_run_config(IONLOSS_CONFIG_DIR "/single_nitrogen.json");
    cfg.units = Units::cm2;
    std::ostringstream out;
    std::ostringstream log;
    cmd_average(cfg, out, log);
    EXPECT_NE(out.str().find("channel_m,sigma_avg_cm2,sigma_perp_cm2,relative_correction"),
              std::string::npos);
}

TEST(Commands, TableDump)
{
    auto const cfg = parse("{}");
    std::ostringstream first;
    std::ostringstream second;
    std::ostringstream log;
    cmd_table(cfg, first, log);
    cmd_table(cfg, second, log);
    EXPECT_EQ(first.str(), second.str());
    std::istringstream in(first.str());
    std::string line;
    double prev = -1;
    bool first_row = true;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '#' || line == "s,w_ion")
        {
            continue;
        }
        double const w = std::stod(line.substr(line.find(',') + 1));
        if (first_row)
        {
            EXPECT_EQ(line, "0,0");
            first_row = false;
        }
        EXPECT_GE(w, prev);
        prev = w;
    }
}

TEST(Commands, ValidateReport)
{
    auto cfg = parse(R"({"energies_mev_u": [1000]})");
    std::ostringstream out;
    std::ostringstream log;
    cmd_validate(cfg, out, log);
    EXPECT_EQ(out.str().find("WARN"), std::string::npos) << out.str();

    cfg = parse(R"({"projectile": {"z": 4, "electrons": 2}, "energies_mev_u": [100]})");
    std::ostringstream charge;
    cmd_validate(cfg, charge, log);
    EXPECT_NE(charge.str().find("WARN"), std::string::npos);
    EXPECT_NE(charge.str().find("charge"), std::string::npos);

    cfg = parse(R"({"energies_mev_u": [0.0266]})");
    std::ostringstream slow;
    cmd_validate(cfg, slow, log);
    EXPECT_NE(slow.str().find("sudden"), std::string::npos);
    EXPECT_NE(slow.str().find("WARN"), std::string::npos);
}

TEST(Commands, PhiCheckAngleFromSeed)
{
    EXPECT_EQ(phi_check_angle(1), phi_check_angle(1));
    EXPECT_NE(phi_check_angle(1), phi_check_angle(2));
    EXPECT_GE(phi_check_angle(5), 0);
    EXPECT_LT(phi_check_angle(5), 6.283185307179587);
}

TEST(Executable, ExitCodes)
{
    auto const good = write_file("good.json", small_scan);
    auto const out = scratch_dir() / "good.csv";
    EXPECT_EQ(run_cli("validate --config " + good.string()), 0);
    EXPECT_EQ(run_cli("validate --config " + (scratch_dir() / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("validate --config " + write_file("bad.json", R"({"tolerance": 2})").string()),
              2);
    EXPECT_EQ(run_cli("validate --units furlong"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("scan-theta --config " + good.string() + " --tolerance 0.5"), 2);
    EXPECT_EQ(run_cli("scan-theta --config " + good.string() + " --out " + out.string()), 0);
    EXPECT_GT(fs::file_size(out), 0u);
}

TEST(Executable, ByteIdenticalAcrossRunsAndThreads)
{
    auto const cfg = write_file("det.json", small_scan);
    auto const a = scratch_dir() / "a.csv";
    auto const b = scratch_dir() / "b.csv";
    auto const c = scratch_dir() / "c.csv";
    ASSERT_EQ(run_cli("scan-theta --config " + cfg.string() + " --out " + a.string()), 0);
    ASSERT_EQ(run_cli("scan-theta --config " + cfg.string() + " --out " + b.string()), 0);
    ASSERT_EQ(run_cli("scan-theta --threads 3 --config " + cfg.string() + " --out " + c.string()),
              0);
    EXPECT_EQ(read_file(a), read_file(b));
    EXPECT_EQ(read_file(a), read_file(c));
}
