#include "advectflow/cli_support.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "advectflow/field_io.hpp"
#include "advectflow/perf_model.hpp"
#include "advectflow/pipeline.hpp"
#include "advectflow/reference.hpp"

namespace advectflow {

namespace {

using nlohmann::json;

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

json config_to_json(const RunConfig& c) {
    json j;
    j["nx"] = c.extents.nx;
    j["ny"] = c.extents.ny;
    j["nz"] = c.extents.nz;
    j["seed"] = c.seed;
    j["gen_u"] = c.gen_u;
    j["gen_v"] = c.gen_v;
    j["gen_w"] = c.gen_w;
    j["file_u"] = c.file_u;
    j["file_v"] = c.file_v;
    j["file_w"] = c.file_w;
    j["coeffs_file"] = c.coeffs_file;
    j["chunk_width"] = c.chunk_width;
    j["kernels"] = c.num_kernels;
    j["channel_capacity"] = c.channel_capacity;
    j["sequential"] = c.sequential;
    j["stall_timeout_seconds"] = c.stall_timeout;
    j["inject_fault"] = c.inject_fault;
    j["max_threads"] = c.max_threads;
    j["clock_hz"] = c.clock_hz;
    j["pcie_in_bw"] = c.pcie_in_bw;
    j["pcie_out_bw"] = c.pcie_out_bw;
    j["mem_efficiency"] = c.mem_efficiency;
    j["n_transfer_chunks"] = c.n_transfer_chunks;
    j["overlap"] = c.overlap;
    if (c.achieved_gflops) j["achieved_gflops"] = *c.achieved_gflops;
    j["report"] = c.report_format;
    j["out"] = c.out_dir;
    return j;
}

json stats_to_json(const CycleStats& s) {
    json j;
    j["elements_streamed"] = s.elements_streamed;
    j["windows_emitted"] = s.windows_emitted;
    j["achieved_ii"] = s.achieved_ii;
    json stalls = json::object();
    for (const auto& [stage, counts] : s.stage_stall_counts) {
        stalls[stage] = {{"send_blocks", counts.send_blocks},
                         {"recv_blocks", counts.recv_blocks}};
    }
    j["stage_stall_counts"] = stalls;
    return j;
}

void flatten_json(const json& j, const std::string& prefix, std::ostream& out) {
    for (const auto& [key, value] : j.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten_json(value, name, out);
        } else {
            out << name << "," << value.dump() << "\n";
        }
    }
}

/// JSON reports print as a single document; CSV reports flatten nested keys
/// with dots.
void emit_report(const json& j, const RunConfig& c, std::ostream& out) {
    if (c.report_format == "csv") {
        flatten_json(j, "", out);
    } else {
        out << j.dump(2) << "\n";
    }
}

Field3D build_field(const RunConfig& c, const std::string& gen,
                    const std::string& file, std::uint64_t default_seed) {
    if (!file.empty()) {
        Field3D f = read_field(file);
        if (!(f.extents() == c.extents)) {
            throw std::invalid_argument("field file '" + file +
                                        "' extents do not match --nx/--ny/--nz");
        }
        return f;
    }
    const GeneratorSpec spec = gen.empty()
                                   ? GeneratorSpec::seeded(default_seed, -1.0, 1.0)
                                   : GeneratorSpec::parse(gen);
    return make_field(c.extents, spec);
}

struct Inputs {
    Field3D u, v, w;
    AdvectionCoeffs coeffs;
};

Inputs build_inputs(const RunConfig& c) {
    Field3D u = build_field(c, c.gen_u, c.file_u, c.seed);
    Field3D v = build_field(c, c.gen_v, c.file_v, c.seed + 1);
    Field3D w = build_field(c, c.gen_w, c.file_w, c.seed + 2);
    AdvectionCoeffs coeffs = c.coeffs_file.empty()
                                 ? unit_coeffs(c.extents.nz)
                                 : load_coeffs(c.coeffs_file, c.extents.nz);
    return Inputs{std::move(u), std::move(v), std::move(w), std::move(coeffs)};
}

PipelineConfig pipeline_config(const RunConfig& c) {
    PipelineConfig pc;
    pc.channel_capacity = c.channel_capacity;
    pc.chunk_width = c.chunk_width;
    pc.num_kernels = c.num_kernels;
    pc.mode = c.sequential ? ExecutionMode::sequential : ExecutionMode::concurrent;
    pc.stall_timeout_seconds = c.stall_timeout;
    pc.inject_fault = c.inject_fault;
    pc.max_threads = c.max_threads;
    return pc;
}

PerfParams perf_params(const RunConfig& c) {
    PerfParams p;
    p.clock_hz = c.clock_hz;
    p.column_height = c.extents.nz;
    p.num_kernels = c.num_kernels;
    p.pcie_bw_h2d = c.pcie_in_bw;
    p.pcie_bw_d2h = c.pcie_out_bw;
    p.mem_efficiency = c.mem_efficiency;
    return p;
}

/// Bitwise field comparison; reports the largest absolute difference and
/// how many cells differ at all (differing bit patterns).
struct FieldDiff {
    bool bitwise_equal = true;
    double max_abs_diff = 0.0;
    std::int64_t mismatch_count = 0;
};

FieldDiff diff_fields(const Field3D& a, const Field3D& b) {
    FieldDiff d;
    const auto& da = a.data();
    const auto& db = b.data();
    for (std::size_t m = 0; m < da.size(); ++m) {
        std::uint64_t ba, bb;
        std::memcpy(&ba, &da[m], 8);
        std::memcpy(&bb, &db[m], 8);
        if (ba != bb) {
            d.bitwise_equal = false;
            ++d.mismatch_count;
            d.max_abs_diff = std::max(d.max_abs_diff, std::fabs(da[m] - db[m]));
        }
    }
    return d;
}

}  // namespace

void RunConfig::validate() const {
    if (!extents.valid()) {
        throw std::invalid_argument("extents need nx,ny >= 1 and nz >= 2");
    }
    const auto exclusive = [](const std::string& gen, const std::string& file,
                              const char* name) {
        if (!gen.empty() && !file.empty()) {
            throw std::invalid_argument(std::string("field ") + name +
                                        ": give a generator or a file, not both");
        }
    };
    exclusive(gen_u, file_u, "u");
    exclusive(gen_v, file_v, "v");
    exclusive(gen_w, file_w, "w");
    if (report_format != "json" && report_format != "csv") {
        throw std::invalid_argument("--report must be json or csv");
    }
    if (n_transfer_chunks < 1) {
        throw std::invalid_argument("--n-transfer-chunks must be >= 1");
    }
}

void load_run_config_file(const std::string& path, RunConfig& c) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file '" + path + "'");
    }
    const auto parse_bool = [&](const std::string& v) {
        if (v == "1" || v == "true" || v == "yes") return true;
        if (v == "0" || v == "false" || v == "no") return false;
        throw std::invalid_argument(path + ": expected a boolean, got '" + v + "'");
    };
    const auto parse_int_list = [](const std::string& v) {
        std::vector<int> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
        return out;
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "nx") c.extents.nx = std::stoi(value);
        else if (key == "ny") c.extents.ny = std::stoi(value);
        else if (key == "nz") c.extents.nz = std::stoi(value);
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "gen-u") c.gen_u = value;
        else if (key == "gen-v") c.gen_v = value;
        else if (key == "gen-w") c.gen_w = value;
        else if (key == "u-file") c.file_u = value;
        else if (key == "v-file") c.file_v = value;
        else if (key == "w-file") c.file_w = value;
        else if (key == "coeffs") c.coeffs_file = value;
        else if (key == "chunk-width") c.chunk_width = std::stoi(value);
        else if (key == "kernels") c.num_kernels = std::stoi(value);
        else if (key == "channel-capacity") c.channel_capacity = std::stoi(value);
        else if (key == "sequential") c.sequential = parse_bool(value);
        else if (key == "stall-timeout") c.stall_timeout = std::stod(value);
        else if (key == "inject-fault") c.inject_fault = parse_bool(value);
        else if (key == "clock-hz") c.clock_hz = std::stod(value);
        else if (key == "pcie-in-bw") c.pcie_in_bw = std::stod(value);
        else if (key == "pcie-out-bw") c.pcie_out_bw = std::stod(value);
        else if (key == "mem-efficiency") c.mem_efficiency = std::stod(value);
        else if (key == "n-transfer-chunks") c.n_transfer_chunks = std::stoi(value);
        else if (key == "overlap") c.overlap = parse_bool(value);
        else if (key == "achieved-gflops") c.achieved_gflops = std::stod(value);
        else if (key == "report") c.report_format = value;
        else if (key == "out") c.out_dir = value;
        else if (key == "bench-chunk-widths") c.bench_chunk_widths = parse_int_list(value);
        else if (key == "bench-kernels") c.bench_kernels = parse_int_list(value);
        else {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        }
    }
}

AdvectionCoeffs load_coeffs(const std::string& path, int nz) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open coefficients file '" + path + "'");
    }
    AdvectionCoeffs coeffs = unit_coeffs(nz);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        const auto parse_list = [&](std::vector<double>& dst) {
            std::vector<double> vals;
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
            if (vals.size() == 1) {
                dst.assign(static_cast<std::size_t>(nz), vals[0]);
            } else if (static_cast<int>(vals.size()) == nz) {
                dst = std::move(vals);
            } else {
                throw std::invalid_argument(path + ": " + key + " needs 1 or " +
                                            std::to_string(nz) + " values");
            }
        };
        if (key == "tcx") {
            coeffs.tcx = std::stod(value);
        } else if (key == "tcy") {
            coeffs.tcy = std::stod(value);
        } else if (key == "tzc1") {
            parse_list(coeffs.tzc1);
        } else if (key == "tzc2") {
            parse_list(coeffs.tzc2);
        } else {
            throw std::invalid_argument(path + ": unknown key '" + key + "'");
        }
    }
    return coeffs;
}

int cmd_verify(const RunConfig& config, std::ostream& out) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const Inputs in = build_inputs(config);

    const SourceTerms expected = advect_all(in.u, in.v, in.w, in.coeffs);
    auto [actual, stats] =
        run_multi_kernel(in.u, in.v, in.w, in.coeffs, pipeline_config(config));

    const FieldDiff du = diff_fields(expected.su, actual.su);
    const FieldDiff dv = diff_fields(expected.sv, actual.sv);
    const FieldDiff dw = diff_fields(expected.sw, actual.sw);
    const bool equal = du.bitwise_equal && dv.bitwise_equal && dw.bitwise_equal;

    json j;
    j["command"] = "verify";
    j["config"] = config_to_json(config);
    j["bitwise_equal"] = equal;
    j["max_abs_diff"] =
        std::max(du.max_abs_diff, std::max(dv.max_abs_diff, dw.max_abs_diff));
    j["mismatch_count"] = du.mismatch_count + dv.mismatch_count + dw.mismatch_count;
    j["cycle_stats"] = stats_to_json(stats);
    j["wall_seconds"] = elapsed_seconds(start);
    emit_report(j, config, out);
    return equal ? kExitOk : kExitVerifyFailed;
}

int cmd_run(const RunConfig& config, std::ostream& out) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const Inputs in = build_inputs(config);

    auto [terms, stats] =
        run_multi_kernel(in.u, in.v, in.w, in.coeffs, pipeline_config(config));

    const std::string su_path = config.out_dir + "/su.pwaf";
    const std::string sv_path = config.out_dir + "/sv.pwaf";
    const std::string sw_path = config.out_dir + "/sw.pwaf";
    write_field(terms.su, su_path);
    write_field(terms.sv, sv_path);
    write_field(terms.sw, sw_path);

    json j;
    j["command"] = "run";
    j["config"] = config_to_json(config);
    j["outputs"] = {{"su", su_path}, {"sv", sv_path}, {"sw", sw_path}};
    j["cycle_stats"] = stats_to_json(stats);
    j["wall_seconds"] = elapsed_seconds(start);
    emit_report(j, config, out);
    return kExitOk;
}

int cmd_perfmodel(const RunConfig& config, std::ostream& out) {
    config.validate();
    const PerfParams p = perf_params(config);
    const std::int64_t cells = config.extents.interior_cells();

    const double kernel_seconds =
        modeled_kernel_seconds(config.extents, config.chunk_width, p);
    const TransferPlan plan = build_transfer_plan(cells, config.n_transfer_chunks);
    const PerfReport report =
        schedule_overlap(plan, kernel_seconds, p, config.achieved_gflops);

    json j;
    j["command"] = "perfmodel";
    j["config"] = config_to_json(config);
    j["cells"] = cells;
    j["ops_per_cycle"] = ops_per_cycle(p);
    j["theoretical_gflops"] = report.theoretical_gflops;
    j["transfer"] = {{"bytes_in", report.transfer.bytes_in},
                     {"bytes_out", report.transfer.bytes_out},
                     {"bytes_total", report.transfer.total()}};
    j["modeled_kernel_seconds"] = report.modeled_kernel_seconds;
    j["serial_makespan_seconds"] = report.serial_makespan_seconds;
    j["overlapped_makespan_seconds"] = report.overlapped_makespan_seconds;
    j["makespan_seconds"] = config.overlap ? report.overlapped_makespan_seconds
                                           : report.serial_makespan_seconds;
    if (report.efficiency_pct) j["efficiency_pct"] = *report.efficiency_pct;
    emit_report(j, config, out);
    return kExitOk;
}

int cmd_bench(const RunConfig& config, std::ostream& out) {
    config.validate();
    const Inputs in = build_inputs(config);

    std::vector<int> widths = config.bench_chunk_widths;
    if (widths.empty()) widths.push_back(config.chunk_width);
    std::vector<int> kernel_counts = config.bench_kernels;
    if (kernel_counts.empty()) kernel_counts.push_back(config.num_kernels);

    out << "scenario,cells,wall_seconds,cells_per_second\n";
    const std::int64_t cells = config.extents.interior_cells();
    for (int cw : widths) {
        for (int k : kernel_counts) {
            RunConfig scenario = config;
            scenario.chunk_width = cw;
            scenario.num_kernels = k;
            const auto start = std::chrono::steady_clock::now();
            (void)run_multi_kernel(in.u, in.v, in.w, in.coeffs,
                                   pipeline_config(scenario));
            const double wall = elapsed_seconds(start);
            out << "nx" << config.extents.nx << "_ny" << config.extents.ny << "_nz"
                << config.extents.nz << "_cw" << cw << "_k" << k << "," << cells
                << "," << wall << "," << (static_cast<double>(cells) / wall) << "\n";
        }
    }
    return kExitOk;
}

}  // namespace advectflow
