#include "advectflow/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <exception>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "advectflow/advection_kernel.hpp"
#include "advectflow/channel.hpp"
#include "advectflow/chunk.hpp"
#include "advectflow/shift_buffer.hpp"

namespace advectflow {

namespace {

// read/shift/replicate/advect/write, three lanes each
constexpr int kThreadsPerInstance = 15;

struct Slab {
    int x0 = 0;
    int width = 0;
};

struct WindowMsg {
    StencilWindow win;
    int gi = 0, gj = 0, gk = 0;  // global interior coordinates
};

struct ResultMsg {
    int gi = 0, gj = 0, gk = 0;
    double value = 0.0;
};

/// Stream geometry of one (slab, chunk) pair. Columns of height two are
/// padded with a zero plane so a 27-point window can form; the pad never
/// reaches an output because the column-top expressions ignore dz = +1.
struct StreamGeometry {
    Slab slab;
    Chunk chunk;
    Extents e;

    int zc() const { return std::max(e.nz, 3); }
    int yc() const { return chunk.y_total; }
    int planes() const { return slab.width + 2; }
    std::int64_t plane_cells() const {
        return static_cast<std::int64_t>(yc()) * zc();
    }
    std::int64_t stream_values() const { return planes() * plane_cells(); }

    /// Trailing zero pushes needed for the final column-top window.
    std::int64_t drain_values() const {
        const std::int64_t last_center =
            (static_cast<std::int64_t>(planes() - 2) * yc() + (yc() - 2)) * zc() +
            (e.nz - 1);
        const std::int64_t completes_at =
            last_center + ShiftBuffer::warm_up(yc(), zc());
        return std::max<std::int64_t>(0, completes_at + 1 - stream_values());
    }
};

/// Streams one chunk of one field in X-outer / Y-middle / Z-inner order,
/// halo cells included, followed by the drain pad.
template <class Emit>
void stream_chunk(const Field3D& f, const StreamGeometry& g, Emit&& emit) {
    for (int cx = 0; cx < g.planes(); ++cx) {
        const int gi = g.slab.x0 + cx - 1;
        for (int cy = 0; cy < g.yc(); ++cy) {
            const int gj = g.chunk.y_start + cy - 1;
            for (int ck = 0; ck < g.zc(); ++ck) {
                emit(ck < g.e.nz ? f.at(gi, gj, ck) : 0.0);
            }
        }
    }
    const std::int64_t drain = g.drain_values();
    for (std::int64_t d = 0; d < drain; ++d) emit(0.0);
}

/// A shift buffer plus the interior-center filter and global coordinate
/// mapping. Keeps the per-chunk throughput numbers for CycleStats.
class WindowRouter {
  public:
    explicit WindowRouter(const StreamGeometry& g)
        : geo_(g), buffer_(g.yc(), g.zc(), g.planes()) {}

    std::optional<WindowMsg> push(double v) {
        std::optional<StencilWindow> win = buffer_.push(v);
        if (!win) return std::nullopt;
        if (win->cx < 1 || win->cx > geo_.planes() - 2) return std::nullopt;
        if (win->cy < 1 || win->cy > geo_.yc() - 2) return std::nullopt;
        if (win->ck < 1 || win->ck > geo_.e.nz - 1) return std::nullopt;
        WindowMsg msg;
        msg.win = *win;
        msg.gi = geo_.slab.x0 + win->cx - 1;
        msg.gj = geo_.chunk.y_start + win->cy - 1;
        msg.gk = win->ck;
        return msg;
    }

    std::int64_t structural_windows() const { return buffer_.windows_emitted(); }

    /// Pushes per structural window over the emitting span; 1.0 means a new
    /// window every cycle once warm.
    double achieved_ii() const {
        const std::int64_t windows = buffer_.windows_emitted();
        if (windows == 0) return 0.0;
        const std::int64_t span = buffer_.pushed() - 2 * buffer_.warm_up();
        return static_cast<double>(span) / static_cast<double>(windows);
    }

  private:
    StreamGeometry geo_;
    ShiftBuffer buffer_;
};

double advect_value(int field, const WindowMsg& mu, const WindowMsg& mv,
                    const WindowMsg& mw, const AdvectionCoeffs& c, int nz) {
    const bool top = mu.gk == nz - 1;
    const auto k = static_cast<std::size_t>(mu.gk);
    switch (field) {
        case 0:
            return su_cell<double>(mu.win, mv.win, mw.win, c.tcx, c.tcy, c.tzc1[k],
                                   c.tzc2[k], top);
        case 1:
            return sv_cell<double>(mu.win, mv.win, mw.win, c.tcx, c.tcy, c.tzc1[k],
                                   c.tzc2[k], top);
        default:
            return sw_cell<double>(mu.win, mv.win, mw.win, c.tcx, c.tcy, c.tzc1[k],
                                   c.tzc2[k], top);
    }
}

struct StatsCollector {
    std::mutex mu;
    CycleStats stats;

    void add_elements(std::int64_t n) {
        std::lock_guard<std::mutex> lock(mu);
        stats.elements_streamed += n;
    }
    void add_windows(std::int64_t n) {
        std::lock_guard<std::mutex> lock(mu);
        stats.windows_emitted += n;
    }
    void fold_ii(double ii) {
        std::lock_guard<std::mutex> lock(mu);
        stats.achieved_ii = std::max(stats.achieved_ii, ii);
    }
    void add_stalls(const std::string& stage, std::int64_t send, std::int64_t recv) {
        std::lock_guard<std::mutex> lock(mu);
        auto& s = stats.stage_stall_counts[stage];
        s.send_blocks += send;
        s.recv_blocks += recv;
    }
};

struct Outputs {
    Extents e;
    std::vector<double> su, sv, sw;

    explicit Outputs(const Extents& ext)
        : e(ext),
          su(static_cast<std::size_t>(ext.padded_cells()), 0.0),
          sv(su.size(), 0.0),
          sw(su.size(), 0.0) {}

    std::vector<double>& field(int f) { return f == 0 ? su : f == 1 ? sv : sw; }
};

// ---------------------------------------------------------------------------
// Sequential (degenerate single-threaded) driver: the three field streams
// advance in lockstep through the same routers and cell expressions as the
// concurrent stages, so the output bits cannot differ between modes.
// ---------------------------------------------------------------------------

void run_instance_sequential(const Field3D& u, const Field3D& v, const Field3D& w,
                             const AdvectionCoeffs& coeffs, const Slab& slab,
                             const ChunkPlan& plan, Outputs& out,
                             StatsCollector& collector) {
    const Extents& e = u.extents();
    for (const Chunk& chunk : plan.chunks) {
        const StreamGeometry g{slab, chunk, e};
        WindowRouter ru(g), rv(g), rw(g);
        std::int64_t forwarded = 0;

        const auto step = [&](double uval, double vval, double wval) {
            const auto mu = ru.push(uval);
            const auto mv = rv.push(vval);
            const auto mw = rw.push(wval);
            if (!mu) return;
            ++forwarded;
            const std::size_t m = static_cast<std::size_t>(
                linear_index(e, mu->gi, mu->gj, mu->gk));
            out.su[m] = advect_value(0, *mu, *mv, *mw, coeffs, e.nz);
            out.sv[m] = advect_value(1, *mu, *mv, *mw, coeffs, e.nz);
            out.sw[m] = advect_value(2, *mu, *mv, *mw, coeffs, e.nz);
        };

        for (int cx = 0; cx < g.planes(); ++cx) {
            const int gi = g.slab.x0 + cx - 1;
            for (int cy = 0; cy < g.yc(); ++cy) {
                const int gj = g.chunk.y_start + cy - 1;
                for (int ck = 0; ck < g.zc(); ++ck) {
                    if (ck < e.nz) {
                        step(u.at(gi, gj, ck), v.at(gi, gj, ck), w.at(gi, gj, ck));
                    } else {
                        step(0.0, 0.0, 0.0);
                    }
                }
            }
        }
        const std::int64_t drain = g.drain_values();
        for (std::int64_t d = 0; d < drain; ++d) step(0.0, 0.0, 0.0);

        collector.add_elements(g.stream_values());
        collector.add_windows(forwarded);
        collector.fold_ii(ru.achieved_ii());
    }
}

// ---------------------------------------------------------------------------
// Concurrent driver: one thread per stage, bounded channels in between.
// ---------------------------------------------------------------------------

/// Channels, threads, and shared inputs of one pipeline instance. Stage
/// threads only reference state owned here or by the caller of
/// run_multi_kernel, both of which outlive the joins.
struct Instance {
    Extents e;
    Slab slab;
    const Field3D* fields[3] = {nullptr, nullptr, nullptr};

    std::vector<std::unique_ptr<Channel<double>>> read_to_shift;       // [field]
    std::vector<std::unique_ptr<Channel<WindowMsg>>> shift_to_rep;     // [field]
    std::vector<std::unique_ptr<Channel<WindowMsg>>> rep_to_adv;       // [field*3+stage]
    std::vector<std::unique_ptr<Channel<ResultMsg>>> adv_to_write;     // [stage]
    std::vector<std::thread> threads;

    template <class F>
    void occupancy_report(F&& sink) const {
        for (const auto& c : read_to_shift) sink(c->name(), c->occupancy());
        for (const auto& c : shift_to_rep) sink(c->name(), c->occupancy());
        for (const auto& c : rep_to_adv) sink(c->name(), c->occupancy());
        for (const auto& c : adv_to_write) sink(c->name(), c->occupancy());
    }

    void interrupt_all() {
        for (const auto& c : read_to_shift) c->interrupt();
        for (const auto& c : shift_to_rep) c->interrupt();
        for (const auto& c : rep_to_adv) c->interrupt();
        for (const auto& c : adv_to_write) c->interrupt();
    }
};

struct ErrorSlot {
    std::mutex mu;
    std::exception_ptr first_error;   // a real defect
    std::exception_ptr first_stall;   // watchdog-induced unwind

    void capture(std::exception_ptr ep, bool is_stall) {
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = is_stall ? first_stall : first_error;
        if (!slot) slot = ep;
    }
    void rethrow_if_any() {
        std::lock_guard<std::mutex> lock(mu);
        if (first_error) std::rethrow_exception(first_error);
        if (first_stall) std::rethrow_exception(first_stall);
    }
};

const char* kFieldName[3] = {"u", "v", "w"};
const char* kStageName[3] = {"su", "sv", "sw"};

void launch_instance(Instance& inst, const Field3D& u, const Field3D& v,
                     const Field3D& w, const AdvectionCoeffs& coeffs,
                     const Slab& slab, const ChunkPlan& plan,
                     const PipelineConfig& config, RunControl& control,
                     ErrorSlot& errors, Outputs& out, StatsCollector& collector,
                     int instance_id) {
    inst.e = u.extents();
    inst.slab = slab;
    inst.fields[0] = &u;
    inst.fields[1] = &v;
    inst.fields[2] = &w;
    const std::size_t cap = static_cast<std::size_t>(config.channel_capacity);
    const std::string tag = "k" + std::to_string(instance_id) + ".";

    for (int f = 0; f < 3; ++f) {
        inst.read_to_shift.push_back(std::make_unique<Channel<double>>(
            cap, &control, tag + "read_" + kFieldName[f]));
        inst.shift_to_rep.push_back(std::make_unique<Channel<WindowMsg>>(
            cap, &control, tag + "shift_" + kFieldName[f]));
    }
    for (int f = 0; f < 3; ++f) {
        for (int s = 0; s < 3; ++s) {
            inst.rep_to_adv.push_back(std::make_unique<Channel<WindowMsg>>(
                cap, &control,
                tag + "rep_" + std::string(kFieldName[f]) + "_to_" + kStageName[s]));
        }
    }
    for (int s = 0; s < 3; ++s) {
        inst.adv_to_write.push_back(std::make_unique<Channel<ResultMsg>>(
            cap, &control, tag + "advect_" + kStageName[s]));
    }

    const auto guarded = [&errors, &control](std::function<void()> body) {
        return [&errors, &control, body = std::move(body)]() {
            try {
                body();
            } catch (const PipelineStalled&) {
                errors.capture(std::current_exception(), true);
            } catch (...) {
                errors.capture(std::current_exception(), false);
                control.failed.store(true);
            }
        };
    };

    // read stages
    for (int f = 0; f < 3; ++f) {
        inst.threads.emplace_back(guarded([&inst, &plan, &collector, f] {
            auto& chan = *inst.read_to_shift[static_cast<std::size_t>(f)];
            std::int64_t elements = 0;
            for (const Chunk& chunk : plan.chunks) {
                const StreamGeometry g{inst.slab, chunk, inst.e};
                stream_chunk(*inst.fields[f], g, [&](double val) { chan.push(val); });
                elements += g.stream_values();
            }
            chan.close();
            if (f == 0) collector.add_elements(elements);
        }));
    }

    // shift-buffer stages
    for (int f = 0; f < 3; ++f) {
        inst.threads.emplace_back(guarded([&inst, &plan, &collector, f] {
            auto& in = *inst.read_to_shift[static_cast<std::size_t>(f)];
            auto& outc = *inst.shift_to_rep[static_cast<std::size_t>(f)];
            for (const Chunk& chunk : plan.chunks) {
                const StreamGeometry g{inst.slab, chunk, inst.e};
                WindowRouter router(g);
                std::int64_t forwarded = 0;
                const std::int64_t expect = g.stream_values() + g.drain_values();
                for (std::int64_t n = 0; n < expect; ++n) {
                    double val;
                    if (!in.pop(val)) {
                        throw std::logic_error("value stream ended early");
                    }
                    if (auto msg = router.push(val)) {
                        outc.push(*msg);
                        ++forwarded;
                    }
                }
                if (f == 0) {
                    collector.add_windows(forwarded);
                    collector.fold_ii(router.achieved_ii());
                }
            }
            double leftover;
            if (in.pop(leftover)) {
                throw std::logic_error("value stream longer than the chunk plan");
            }
            outc.close();
        }));
    }

    // replicate stages: fan each field's window stream out to all three
    // advect stages, in a fixed stage order.
    for (int f = 0; f < 3; ++f) {
        inst.threads.emplace_back(guarded([&inst, f] {
            auto& in = *inst.shift_to_rep[static_cast<std::size_t>(f)];
            Channel<WindowMsg>* outs[3];
            for (int s = 0; s < 3; ++s) {
                outs[s] = inst.rep_to_adv[static_cast<std::size_t>(f * 3 + s)].get();
            }
            WindowMsg msg;
            while (in.pop(msg)) {
                for (int s = 0; s < 3; ++s) outs[s]->push(msg);
            }
            for (int s = 0; s < 3; ++s) outs[s]->close();
        }));
    }

    // advect stages: zip the three window streams by position and evaluate
    // the cell expressions.
    for (int s = 0; s < 3; ++s) {
        inst.threads.emplace_back(guarded([&inst, &coeffs, s] {
            Channel<WindowMsg>* ins[3];
            for (int f = 0; f < 3; ++f) {
                ins[f] = inst.rep_to_adv[static_cast<std::size_t>(f * 3 + s)].get();
            }
            auto& outc = *inst.adv_to_write[static_cast<std::size_t>(s)];
            WindowMsg mu, mv, mw;
            while (ins[0]->pop(mu)) {
                if (!ins[1]->pop(mv) || !ins[2]->pop(mw)) {
                    throw std::logic_error("window streams out of step");
                }
                if (mu.gi != mv.gi || mu.gj != mv.gj || mu.gk != mv.gk ||
                    mu.gi != mw.gi || mu.gj != mw.gj || mu.gk != mw.gk) {
                    throw std::logic_error("window centers out of step");
                }
                outc.push(ResultMsg{mu.gi, mu.gj, mu.gk,
                                    advect_value(s, mu, mv, mw, coeffs, inst.e.nz)});
            }
            outc.close();
        }));
    }

    // write stages
    for (int s = 0; s < 3; ++s) {
        inst.threads.emplace_back(guarded([&inst, &out, s] {
            auto& in = *inst.adv_to_write[static_cast<std::size_t>(s)];
            auto& data = out.field(s);
            ResultMsg r;
            while (in.pop(r)) {
                data[static_cast<std::size_t>(linear_index(inst.e, r.gi, r.gj, r.gk))] =
                    r.value;
            }
        }));
    }
}

void fold_instance_stalls(const Instance& inst, StatsCollector& collector) {
    const auto fold = [&](const auto& chan, bool sender_side) {
        // A channel's send blocks belong to its producer stage, receive
        // blocks to its consumer; the channel carries the producer's name.
        if (sender_side) {
            collector.add_stalls(chan.name(), chan.send_blocks(), 0);
        } else {
            collector.add_stalls(chan.name(), 0, chan.recv_blocks());
        }
    };
    for (const auto& c : inst.read_to_shift) fold(*c, true), fold(*c, false);
    for (const auto& c : inst.shift_to_rep) fold(*c, true), fold(*c, false);
    for (const auto& c : inst.rep_to_adv) fold(*c, true), fold(*c, false);
    for (const auto& c : inst.adv_to_write) fold(*c, true), fold(*c, false);
}

std::vector<Slab> split_slabs(int nx, int num_kernels) {
    std::vector<Slab> slabs;
    const int base = nx / num_kernels;
    const int extra = nx % num_kernels;
    int x0 = 0;
    for (int k = 0; k < num_kernels; ++k) {
        Slab s;
        s.x0 = x0;
        s.width = base + (k < extra ? 1 : 0);
        x0 += s.width;
        slabs.push_back(s);
    }
    return slabs;
}

void flip_one_bit(std::vector<double>& data, std::size_t index) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[index], sizeof(bits));
    bits ^= 1u;
    std::memcpy(&data[index], &bits, sizeof(bits));
}

}  // namespace

void PipelineConfig::validate() const {
    if (channel_capacity < 1) throw std::invalid_argument("channel_capacity must be >= 1");
    if (chunk_width < 1) throw std::invalid_argument("chunk_width must be >= 1");
    if (num_kernels < 1) throw std::invalid_argument("num_kernels must be >= 1");
    if (stall_timeout_seconds <= 0) {
        throw std::invalid_argument("stall_timeout_seconds must be positive");
    }
}

std::pair<SourceTerms, CycleStats> run_multi_kernel(const Field3D& u,
                                                    const Field3D& v,
                                                    const Field3D& w,
                                                    const AdvectionCoeffs& coeffs,
                                                    const PipelineConfig& config) {
    config.validate();
    if (!(u.extents() == v.extents()) || !(u.extents() == w.extents())) {
        throw std::invalid_argument("u, v, w must share extents");
    }
    const Extents e = u.extents();
    coeffs.validate(e);
    if (config.num_kernels > e.nx) {
        throw std::invalid_argument("num_kernels must not exceed nx");
    }

    const ChunkPlan plan = plan_chunks(e.ny, config.chunk_width);
    const std::vector<Slab> slabs = split_slabs(e.nx, config.num_kernels);

    Outputs out(e);
    StatsCollector collector;

    // A thread cap below one instance's stage count forces the degenerate
    // single-threaded mode.
    ExecutionMode mode = config.mode;
    if (mode == ExecutionMode::concurrent && config.max_threads > 0 &&
        config.max_threads < kThreadsPerInstance) {
        mode = ExecutionMode::sequential;
    }

    if (mode == ExecutionMode::sequential) {
        for (const Slab& slab : slabs) {
            run_instance_sequential(u, v, w, coeffs, slab, plan, out, collector);
        }
    } else {
        int wave = static_cast<int>(slabs.size());
        if (config.max_threads > 0) {
            wave = std::max(1, config.max_threads / kThreadsPerInstance);
        }

        for (std::size_t first = 0; first < slabs.size();
             first += static_cast<std::size_t>(wave)) {
            const std::size_t last =
                std::min(slabs.size(), first + static_cast<std::size_t>(wave));

            RunControl control;
            ErrorSlot errors;
            std::vector<std::unique_ptr<Instance>> instances;
            for (std::size_t s = first; s < last; ++s) {
                instances.push_back(std::make_unique<Instance>());
                launch_instance(*instances.back(), u, v, w, coeffs, slabs[s], plan,
                                config, control, errors, out, collector,
                                static_cast<int>(s));
            }

            // Watchdog: if nothing moves for the stall timeout, dump queue
            // occupancy and fail every blocked stage. Also broadcasts the
            // wakeup when a stage trips the failure flag itself.
            std::atomic<bool> done{false};
            std::thread monitor([&] {
                std::uint64_t last_progress = control.progress.load();
                auto last_change = std::chrono::steady_clock::now();
                while (!done.load()) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(50));
                    if (control.failed.load()) {
                        for (const auto& inst : instances) inst->interrupt_all();
                        return;
                    }
                    const std::uint64_t cur = control.progress.load();
                    if (cur != last_progress) {
                        last_progress = cur;
                        last_change = std::chrono::steady_clock::now();
                        continue;
                    }
                    const double idle =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                      last_change)
                            .count();
                    if (idle > config.stall_timeout_seconds) {
                        std::ostringstream dump;
                        dump << "pipeline made no progress for " << idle
                             << "s; queue occupancy:\n";
                        for (const auto& inst : instances) {
                            inst->occupancy_report([&](const std::string& name,
                                                       std::size_t n) {
                                dump << "  " << name << ": " << n << "\n";
                            });
                        }
                        std::cerr << dump.str();
                        control.failed.store(true);
                        for (const auto& inst : instances) inst->interrupt_all();
                        return;
                    }
                }
            });

            for (auto& inst : instances) {
                for (auto& t : inst->threads) t.join();
            }
            done.store(true);
            monitor.join();

            errors.rethrow_if_any();
            if (config.record_cycle_stats) {
                for (const auto& inst : instances) {
                    fold_instance_stalls(*inst, collector);
                }
            }
        }
    }

    if (config.inject_fault) {
        flip_one_bit(out.su, static_cast<std::size_t>(linear_index(e, 0, 0, 1)));
    }

    SourceTerms terms{Field3D(e, std::move(out.su)), Field3D(e, std::move(out.sv)),
                      Field3D(e, std::move(out.sw))};
    return {std::move(terms), std::move(collector.stats)};
}

std::pair<SourceTerms, CycleStats> run_pipeline(const Field3D& u, const Field3D& v,
                                                const Field3D& w,
                                                const AdvectionCoeffs& coeffs,
                                                const PipelineConfig& config) {
    PipelineConfig single = config;
    single.num_kernels = 1;
    return run_multi_kernel(u, v, w, coeffs, single);
}

}  // namespace advectflow
