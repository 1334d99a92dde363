#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subdif/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"subdif: nonlocal-in-time degenerate diffusion experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, param, values_csv;
    std::int64_t seed = -1;
    bool quiet = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory (default: $SUBDIF_OUT_DIR or ./out)");
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_flag("--quiet", quiet, "suppress progress output");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "execute one experiment");
    add_common(run_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run one experiment per parameter value");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--param", param, "dotted config path, e.g. problem.kernel.alpha")
        ->required();
    sweep_cmd->add_option("--values", values_csv, "comma-separated values")->required();

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return subdif::run(config_path, out_dir, seed, quiet);

    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= values_csv.size() && !values_csv.empty()) {
        const std::size_t comma = values_csv.find(',', pos);
        const std::string tok = values_csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            values.push_back(std::stod(tok));
        } catch (...) {
            std::fprintf(stderr, "error: bad value '%s'\n", tok.c_str());
            return 1;
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return subdif::sweep(config_path, param, values, out_dir, seed, quiet);
}
