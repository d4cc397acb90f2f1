#include "vibroprobe/config.hpp"
#include "vibroprobe/runner.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace {

int guarded(const std::function<int()>& fn)
{
    try {
        return fn();
    } catch (const vp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const vp::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"vibroprobe: pump-probe vibrational signal simulator"};
    app.require_subcommand(1);

    std::string config, out_dir = ".";
    std::vector<std::string> sets;
    unsigned threads = 0;
    auto* run = app.add_subcommand("run", "run a config and write CSV files");
    run->add_option("config", config, "config file")->required();
    run->add_option("--set", sets, "override, section.key=value")->allow_extra_args(false);
    run->add_option("--threads", threads, "worker threads (default: config or 1)");
    run->add_option("--out", out_dir, "output directory");

    std::string vconfig;
    std::vector<std::string> vsets;
    auto* val = app.add_subcommand("validate", "check a config and list findings");
    val->add_option("config", vconfig, "config file")->required();
    val->add_option("--set", vsets, "override, section.key=value")->allow_extra_args(false);

    auto* pre = app.add_subcommand("presets", "bundled preset configs");
    pre->require_subcommand(1);
    pre->add_subcommand("list", "list preset names");
    std::string pname, pdest = ".";
    auto* copy = pre->add_subcommand("copy", "copy a preset into a directory");
    copy->add_option("name", pname, "preset name")->required();
    copy->add_option("--out", pdest, "destination directory");

    CLI11_PARSE(app, argc, argv);

    if (*run)
        return guarded([&] {
            auto raw = vp::parse_config_file(config);
            for (const auto& s : sets) vp::apply_override(raw, s);
            std::optional<unsigned> t;
            if (threads > 0) t = threads;
            vp::run_config(raw, out_dir, t, std::cout);
            return 0;
        });
    if (*val)
        return guarded([&] {
            auto raw = vp::parse_config_file(vconfig);
            for (const auto& s : vsets) vp::apply_override(raw, s);
            auto findings = vp::validate_config(raw);
            bool bad = false;
            for (const auto& f : findings) {
                std::cout << f.severity << ": " << f.message << "\n";
                bad = bad || f.severity == "error";
            }
            if (findings.empty()) std::cout << "ok\n";
            return bad ? 2 : 0;
        });
    return guarded([&] {
        if (pre->got_subcommand("list")) {
            for (const auto& n : vp::list_presets()) std::cout << n << "\n";
            return 0;
        }
        std::string name = fs::path(pname).stem().string();
        fs::path src = fs::path(vp::preset_dir()) / (name + ".toml");
        if (!fs::exists(src)) throw vp::ConfigError("no preset named '" + name + "'");
        fs::create_directories(pdest);
        fs::path dst = fs::path(pdest) / src.filename();
        fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
        std::cout << dst.string() << "\n";
        return 0;
    });
}
