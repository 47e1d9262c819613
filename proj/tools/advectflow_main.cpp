// advectflow: PW advection dataflow simulator and performance model.
//
// Subcommands:
//   verify     run the dataflow pipeline and the plain-loop reference on the
//              same inputs and check bitwise equality (exit 1 on mismatch)
//   run        run the pipeline and write su/sv/sw as PWAF field files
//   perfmodel  analytic throughput, transfer volumes, and overlap makespans
//   bench      throughput of this simulator across chunk/kernel sweeps (CSV)

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "advectflow/cli_support.hpp"

namespace {

void attach_common(CLI::App* cmd, advectflow::RunConfig& cfg) {
    cmd->add_option("--config", cfg.config_file,
                    "flat key=value config file; flags override");
    cmd->add_option("--nx", cfg.extents.nx, "interior cells in X");
    cmd->add_option("--ny", cfg.extents.ny, "interior cells in Y");
    cmd->add_option("--nz", cfg.extents.nz, "column height (Z cells)");
    cmd->add_option("--seed", cfg.seed,
                    "base seed for the default field generators (u, v, w use "
                    "seed, seed+1, seed+2)");
    cmd->add_option("--gen-u", cfg.gen_u,
                    "u generator: constant:<c> | ramp | seeded:<seed>:<lo>:<hi>");
    cmd->add_option("--gen-v", cfg.gen_v, "v generator");
    cmd->add_option("--gen-w", cfg.gen_w, "w generator");
    cmd->add_option("--u-file", cfg.file_u, "read u from a PWAF file");
    cmd->add_option("--v-file", cfg.file_v, "read v from a PWAF file");
    cmd->add_option("--w-file", cfg.file_w, "read w from a PWAF file");
    cmd->add_option("--coeffs", cfg.coeffs_file,
                    "coefficients file (tcx/tcy/tzc1/tzc2; defaults are 1.0)");
    cmd->add_option("--chunk-width", cfg.chunk_width, "interior Y cells per chunk");
    cmd->add_option("--kernels", cfg.num_kernels, "parallel pipeline instances");
    cmd->add_option("--channel-capacity", cfg.channel_capacity,
                    "inter-stage stream capacity in elements");
    cmd->add_flag("--sequential", cfg.sequential,
                  "run the stages single-threaded (identical output bits)");
    cmd->add_option("--stall-timeout", cfg.stall_timeout,
                    "seconds without progress before the pipeline aborts");
    cmd->add_flag("--inject-fault", cfg.inject_fault,
                  "test hook: flip one bit in the pipeline output");
    cmd->add_option("--clock-hz", cfg.clock_hz, "kernel clock for the perf model");
    cmd->add_option("--pcie-in-bw", cfg.pcie_in_bw, "host-to-device bytes/second");
    cmd->add_option("--pcie-out-bw", cfg.pcie_out_bw, "device-to-host bytes/second");
    cmd->add_option("--mem-efficiency", cfg.mem_efficiency,
                    "external memory derating in (0,1]");
    cmd->add_option("--n-transfer-chunks", cfg.n_transfer_chunks,
                    "transfer chunks for the overlap schedule");
    cmd->add_flag("--overlap,!--no-overlap", cfg.overlap,
                  "overlap transfers with compute in the perf model");
    cmd->add_option("--achieved-gflops", cfg.achieved_gflops,
                    "measured figure to report an efficiency percentage for");
    cmd->add_option("--report", cfg.report_format, "report format: json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", cfg.out_dir, "output directory for field files");
    cmd->add_option("--bench-chunk-widths", cfg.bench_chunk_widths,
                    "chunk widths to sweep in bench")
        ->delimiter(',');
    cmd->add_option("--bench-kernels", cfg.bench_kernels,
                    "kernel counts to sweep in bench")
        ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PW advection dataflow simulator and performance model"};
    app.require_subcommand(1);

    advectflow::RunConfig cfg;
    if (const char* cap = std::getenv("ADVECTFLOW_THREADS")) {
        cfg.max_threads = std::atoi(cap);
        if (cfg.max_threads < 0) cfg.max_threads = 0;
    }

    // The config file seeds the defaults; flags parsed below override it.
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc) {
                advectflow::load_run_config_file(argv[i + 1], cfg);
            } else if (arg.rfind("--config=", 0) == 0) {
                advectflow::load_run_config_file(arg.substr(9), cfg);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return advectflow::kExitUsage;
    }

    CLI::App* verify = app.add_subcommand("verify", "check pipeline vs reference");
    CLI::App* run = app.add_subcommand("run", "compute source terms and write PWAF files");
    CLI::App* perfmodel = app.add_subcommand("perfmodel", "analytic performance report");
    CLI::App* bench = app.add_subcommand("bench", "simulator throughput sweep (CSV)");
    for (CLI::App* cmd : {verify, run, perfmodel, bench}) {
        attach_common(cmd, cfg);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? advectflow::kExitOk : advectflow::kExitUsage;
    }

    try {
        if (verify->parsed()) return advectflow::cmd_verify(cfg, std::cout);
        if (run->parsed()) return advectflow::cmd_run(cfg, std::cout);
        if (perfmodel->parsed()) return advectflow::cmd_perfmodel(cfg, std::cout);
        if (bench->parsed()) return advectflow::cmd_bench(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return advectflow::kExitUsage;
    }
    return advectflow::kExitUsage;
}
