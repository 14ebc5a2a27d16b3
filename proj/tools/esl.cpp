// esl: experiments on the evolution of the Euler axis and angle.
//
// Exit codes: 0 ok, 1 verification failure, 2 mathematical singularity,
// 3 I/O, schema or argument error.

#include "esl/acceptance.hpp"
#include "esl/analysis.hpp"
#include "esl/closed_form.hpp"
#include "esl/csv.hpp"
#include "esl/dynamics.hpp"
#include "esl/error.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace esl;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify = 1;
constexpr int exit_singular = 2;
constexpr int exit_io = 3;

int exit_code_for(ErrorCode c) {
    switch (c) {
    case ErrorCode::gibbs_singularity:
    case ErrorCode::axis_undefined:
    case ErrorCode::not_differentiable:
    case ErrorCode::boundary_singularity:
    case ErrorCode::gibbs_overflow:
    case ErrorCode::parity_undetermined:
    case ErrorCode::parallel_axis:
    case ErrorCode::trajectory_aborted:
        return exit_singular;
    default:
        return exit_io;
    }
}

Vec3 parse_vec3(const std::string &s) {
    std::stringstream ss(s);
    std::string item;
    std::vector<double> v;
    while (std::getline(ss, item, ',')) {
        char *end = nullptr;
        const double x = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0') throw Error(ErrorCode::invalid_argument, "bad vector '" + s + "'");
        v.push_back(x);
    }
    if (v.size() != 3) throw Error(ErrorCode::invalid_argument, "expected x,y,z but got '" + s + "'");
    return {v[0], v[1], v[2]};
}

json vec_json(const Vec3 &v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json &j) {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::schema_mismatch, "expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void write_json(const fs::path &path, const json &j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

fs::path prepare_out(const std::string &dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir + ": " + ec.message());
    return p;
}

std::size_t worker_count(std::size_t jobs) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("ESL_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) n = static_cast<std::size_t>(v);
    }
    return std::min(n, std::max<std::size_t>(jobs, 1));
}

// ------------------------------------------------------------ configuration

/// Experiment configuration: JSON file first, then flag overrides.
struct Config {
    std::string rep = "euler";
    std::string omega = "rotplane:40";
    Vec3 e0{1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
    std::optional<Vec3> axis;
    std::optional<double> theta;
    double t0 = 0.0;
    double t_end = 100.0;
    std::vector<double> dts{1e-3};
    std::string out = "esl_out";
    json analyses = json::object();

    json to_json() const {
        json j;
        j["rep"] = rep;
        j["omega"] = omega;
        if (axis) {
            j["axis"] = vec_json(*axis);
            j["theta"] = theta.value_or(0.0);
        } else {
            j["e0"] = vec_json(e0);
        }
        j["t0"] = t0;
        j["t_end"] = t_end;
        j["dt"] = dts.size() == 1 ? json(dts.front()) : json(dts);
        j["out"] = out;
        if (!analyses.empty()) j["analyses"] = analyses;
        return j;
    }

    AnyRotation initial() const {
        if (axis) return AxisAngle{normalized(*axis), theta.value_or(0.0)};
        return EulerVector{e0};
    }

    void validate() const {
        if (!(t_end > t0)) throw Error(ErrorCode::invalid_argument, "t_end must exceed t0");
        for (double dt : dts)
            if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be positive");
        representation_from_string(rep);
        if (axis && !(norm(*axis) > 0.0)) throw Error(ErrorCode::invalid_argument, "axis must be non-zero");
    }
};

Config load_config(const std::string &path) {
    Config c;
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open config " + path);
    json j;
    try {
        in >> j;
        if (j.contains("rep")) c.rep = j["rep"].get<std::string>();
        if (j.contains("omega")) c.omega = j["omega"].get<std::string>();
        if (j.contains("e0")) c.e0 = vec_from_json(j["e0"]);
        if (j.contains("axis")) c.axis = vec_from_json(j["axis"]);
        if (j.contains("theta")) c.theta = j["theta"].get<double>();
        if (j.contains("t0")) c.t0 = j["t0"].get<double>();
        if (j.contains("t_end")) c.t_end = j["t_end"].get<double>();
        if (j.contains("dt")) {
            if (j["dt"].is_array())
                c.dts = j["dt"].get<std::vector<double>>();
            else
                c.dts = {j["dt"].get<double>()};
        }
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        if (j.contains("analyses")) c.analyses = j["analyses"];
    } catch (const json::exception &e) {
        throw Error(ErrorCode::schema_mismatch, path + ": " + e.what());
    }
    return c;
}

/// Flags shared by every command that builds a trajectory.
struct ConfigFlags {
    std::string config;
    std::optional<std::string> rep, omega, e0, axis, out;
    std::optional<double> theta, t0, t_end;
    std::vector<double> dts;

    void add(CLI::App *app, bool multi_dt) {
        app->add_option("--config", config, "JSON experiment configuration");
        app->add_option("--rep", rep, "euler | quat | gibbs | axisangle");
        app->add_option("--omega", omega, "const:x,y,z | rotplane:T[,amp] | pathological | csv:PATH");
        app->add_option("--e0", e0, "initial Euler vector x,y,z");
        app->add_option("--axis", axis, "initial axis x,y,z (with --theta, instead of --e0)");
        app->add_option("--theta", theta, "initial angle for --axis");
        app->add_option("--t0", t0, "start time");
        app->add_option("--t-end", t_end, "end time");
        auto *dt = app->add_option("--dt", dts, multi_dt ? "step size; repeat to sweep" : "step size");
        if (!multi_dt) dt->expected(1);
        app->add_option("--out", out, "output directory");
    }

    Config resolve() const {
        Config c = config.empty() ? Config{} : load_config(config);
        if (rep) c.rep = *rep;
        if (omega) c.omega = *omega;
        if (e0) {
            c.e0 = parse_vec3(*e0);
            c.axis.reset();
        }
        if (axis) c.axis = parse_vec3(*axis);
        if (theta) c.theta = *theta;
        if (t0) c.t0 = *t0;
        if (t_end) c.t_end = *t_end;
        if (!dts.empty()) c.dts = dts;
        if (out) c.out = *out;
        c.validate();
        return c;
    }
};

// ------------------------------------------------------------ simulate

json continuation_json(const ContinuationRecord &r) {
    json j;
    j["initial_branch"] = r.initial_branch;
    j["branch"] = r.branch;
    j["zero_times"] = r.zero_times;
    j["parity_used"] = r.parity_used;
    json axes = json::array();
    for (const auto &a : r.limit_axes) axes.push_back(vec_json(a));
    j["limit_axes"] = axes;
    j["branches_after"] = r.branches_after;
    return j;
}

json trajectory_json(const Trajectory &tr) {
    const auto &m = tr.meta();
    json j;
    j["representation"] = std::string(to_string(tr.representation()));
    json cols = json::array({"t"});
    for (const auto &c : Trajectory::columns(tr.representation())) cols.push_back(c);
    j["columns"] = cols;
    j["samples"] = tr.size();
    j["omega"] = m.omega;
    j["t0"] = m.t0;
    j["t_end"] = m.t_end;
    j["dt"] = m.dt;
    j["aborted"] = m.aborted;
    if (m.aborted) {
        j["abort_time"] = m.abort_time;
        j["abort_code"] = std::string(to_string(m.abort_code));
        j["abort_reason"] = m.abort_reason;
    }
    j["bridge_steps"] = m.bridge_steps;
    if (tr.representation() == Representation::quaternion || m.norm_drift_total > 0.0) {
        j["norm_drift_total"] = m.norm_drift_total;
        j["norm_drift_max"] = m.norm_drift_max;
    }
    if (m.continuation) j["continuation"] = continuation_json(*m.continuation);
    return j;
}

/// Integrates one step size. The axis/angle representation is produced by
/// continuing a quaternion run so that it passes through theta = 2*pi*k.
Trajectory simulate_one(const Config &c, const OmegaModel &omega, double dt) {
    const Representation rep = representation_from_string(c.rep);
    if (rep != Representation::axis_angle) return integrate(rep, c.initial(), omega, c.t0, c.t_end, dt);
    const auto q = integrate(Representation::quaternion, c.initial(), omega, c.t0, c.t_end, dt);
    ContinuationOptions opt;
    opt.initial_theta = c.axis ? c.theta.value_or(0.0) : norm(c.e0);
    auto aa = continue_axis_angle(q, omega, opt);
    aa.meta().norm_drift_total = q.meta().norm_drift_total;
    aa.meta().norm_drift_max = q.meta().norm_drift_max;
    return aa;
}

json run_analyses(const Config &c, const Trajectory &tr, const fs::path &dir, const std::string &stem);

int cmd_simulate(const ConfigFlags &flags) {
    const Config c = flags.resolve();
    const OmegaModel omega = OmegaModel::from_spec(c.omega);
    const fs::path dir = prepare_out(c.out);

    struct Job {
        double dt;
        std::string stem;
        std::optional<Trajectory> result;
        std::string error;
        ErrorCode code = ErrorCode::invalid_argument;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < c.dts.size(); ++i) {
        std::ostringstream stem;
        stem << "trajectory";
        if (c.dts.size() > 1) stem << "_dt" << i;
        jobs.push_back({c.dts[i], stem.str(), std::nullopt, {}, {}});
    }

    // Distinct trajectories share nothing mutable; each worker takes the next job.
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                jobs[i].result = simulate_one(c, omega, jobs[i].dt);
            } catch (const Error &e) {
                jobs[i].error = e.what();
                jobs[i].code = e.code();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < worker_count(jobs.size()); ++w) pool.emplace_back(work);
    work();
    for (auto &t : pool) t.join();

    int code = exit_ok;
    for (auto &job : jobs) {
        if (!job.result) {
            std::cerr << "esl simulate: dt=" << job.dt << ": " << job.error << '\n';
            code = std::max(code, exit_code_for(job.code));
            continue;
        }
        const Trajectory &tr = *job.result;
        const fs::path csv = dir / (job.stem + ".csv");
        tr.write_csv(csv);
        json side;
        side["command"] = "simulate";
        Config single = c;
        single.dts = {job.dt};
        side["config"] = single.to_json();
        side["csv"] = csv.filename().string();
        side["trajectory"] = trajectory_json(tr);
        if (!c.analyses.empty()) side["analyses"] = run_analyses(c, tr, dir, job.stem);
        write_json(dir / (job.stem + ".json"), side);
        std::cout << csv.string() << ": " << tr.size() << " samples";
        if (tr.meta().aborted) {
            std::cout << ", aborted at t=" << tr.meta().abort_time << " (" << tr.meta().abort_reason << ")";
            code = std::max(code, exit_singular);
        }
        std::cout << '\n';
    }
    return code;
}

// ------------------------------------------------------------ analyses

json strobe_to_files(const Trajectory &tr, double period, double offset, const fs::path &dir,
                     const std::string &stem) {
    const auto st = strobe(tr, period, offset);
    const fs::path csv = dir / (stem + "_strobe.csv");
    std::ofstream out(csv);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + csv.string());
    std::vector<std::string> header{"k", "t"};
    for (const auto &col : Trajectory::columns(tr.representation())) header.push_back(col);
    write_csv_header(out, header);
    for (std::size_t k = 0; k < st.points.size(); ++k) {
        std::vector<double> row{static_cast<double>(k), st.times[k]};
        row.insert(row.end(), st.points[k].begin(), st.points[k].end());
        write_csv_row(out, row);
    }
    const auto gaps = nearest_neighbor_gaps(st.points);
    json j;
    j["csv"] = csv.filename().string();
    j["period"] = period;
    j["offset"] = offset;
    j["points"] = st.points.size();
    j["nearest_gap"] = {{"min", gaps.min}, {"median", gaps.median}, {"max", gaps.max}};
    return j;
}

std::vector<double> psd_series(const Trajectory &tr, const std::string &which) {
    if (which == "norm") return tr.norms();
    const auto cols = Trajectory::columns(tr.representation());
    for (std::size_t c = 0; c < cols.size(); ++c)
        if (cols[c] == which) return tr.component(c);
    throw Error(ErrorCode::invalid_argument, "series must be 'norm' or a trajectory column, not '" + which + "'");
}

json psd_to_files(const Trajectory &tr, const std::string &series, Window window, std::size_t max_peaks,
                  double min_prominence, const fs::path &dir, const std::string &stem) {
    const double dt = tr.time(1) - tr.time(0);
    const auto spec = power_spectrum(psd_series(tr, series), dt, window);
    const fs::path csv = dir / (stem + "_psd.csv");
    {
        std::ofstream out(csv);
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + csv.string());
        write_csv_header(out, std::vector<std::string>{"freq", "power"});
        for (std::size_t k = 0; k < spec.freqs.size(); ++k)
            write_csv_row(out, std::vector<double>{spec.freqs[k], spec.power[k]});
    }
    const auto peaks = detect_peaks(spec, min_prominence, max_peaks);
    const fs::path pcsv = dir / (stem + "_peaks.csv");
    {
        std::ofstream out(pcsv);
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + pcsv.string());
        write_csv_header(out, std::vector<std::string>{"freq", "power", "prominence_db", "period"});
        for (const auto &p : peaks) write_csv_row(out, std::vector<double>{p.freq, p.power, p.prominence_db, 1.0 / p.freq});
    }
    json j;
    j["csv"] = csv.filename().string();
    j["peaks_csv"] = pcsv.filename().string();
    j["series"] = series;
    j["window"] = std::string(to_string(window));
    j["dt"] = dt;
    j["reference_power"] = spec.reference_power;
    json pk = json::array();
    for (const auto &p : peaks)
        pk.push_back({{"freq", p.freq}, {"period", 1.0 / p.freq}, {"db", 10.0 * std::log10(p.power / spec.reference_power)},
                      {"prominence_db", p.prominence_db}});
    j["peaks"] = pk;
    return j;
}

json recurrence_to_files(const Trajectory &tr, double epsilon, std::size_t stride, const fs::path &dir,
                         const std::string &stem) {
    const auto r = recurrence(tr, epsilon, stride);
    const fs::path csv = dir / (stem + "_recurrence.csv");
    std::ofstream out(csv);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + csv.string());
    out << "i,j\n";
    std::size_t set = 0;
    for (std::size_t i = 0; i < r.n; ++i)
        for (std::size_t j = 0; j < r.n; ++j)
            if (r.at(i, j)) {
                out << i << ',' << j << '\n';
                ++set;
            }
    json j;
    j["csv"] = csv.filename().string();
    j["epsilon"] = epsilon;
    j["stride"] = stride;
    j["samples"] = r.n;
    j["set_entries"] = set;
    j["band_lags"] = band_lags(r, 0.05);
    return j;
}

json lyapunov_to_files(const LyapunovEstimate &est, const fs::path &dir, const std::string &stem) {
    const fs::path csv = dir / (stem + "_lyapunov.csv");
    std::ofstream out(csv);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + csv.string());
    std::vector<std::string> header{"step"};
    for (std::size_t i = 0; i < est.exponents.size(); ++i) header.push_back("l" + std::to_string(i + 1));
    write_csv_header(out, header);
    for (std::size_t r = 0; r < est.history.size(); ++r) {
        std::vector<double> row{static_cast<double>(est.history_steps[r])};
        row.insert(row.end(), est.history[r].begin(), est.history[r].end());
        write_csv_row(out, row);
    }
    json j;
    j["csv"] = csv.filename().string();
    j["steps"] = est.steps;
    j["exponents"] = est.exponents;
    return j;
}

json run_analyses(const Config &c, const Trajectory &tr, const fs::path &dir, const std::string &stem) {
    json out = json::object();
    const json &a = c.analyses;
    try {
        if (a.contains("strobe"))
            out["strobe"] = strobe_to_files(tr, a["strobe"].value("period", 40.0), a["strobe"].value("offset", 0.0),
                                            dir, stem);
        if (a.contains("psd"))
            out["psd"] = psd_to_files(tr, a["psd"].value("series", std::string("norm")),
                                      window_from_string(a["psd"].value("window", std::string("hann"))),
                                      a["psd"].value("peaks", std::size_t{5}), a["psd"].value("min_prominence_db", 6.0),
                                      dir, stem);
        if (a.contains("recurrence"))
            out["recurrence"] = recurrence_to_files(tr, a["recurrence"].value("epsilon", 0.1),
                                                    a["recurrence"].value("stride", std::size_t{10}), dir, stem);
        if (a.contains("lyapunov")) {
            const json &l = a["lyapunov"];
            const auto est = lyapunov_spectrum(representation_from_string(l.value("rep", std::string("quat"))),
                                               OmegaModel::from_spec(c.omega), c.initial(),
                                               l.value("steps", std::size_t{100000}), l.value("dt", 0.01),
                                               l.value("renorm", std::size_t{10}));
            out["lyapunov"] = lyapunov_to_files(est, dir, stem);
        }
    } catch (const json::exception &e) {
        throw Error(ErrorCode::schema_mismatch, std::string("analyses: ") + e.what());
    }
    return out;
}

/// Trajectory for an analysis: read from --in, or simulated from the
/// configuration flags.
Trajectory analysis_input(const std::string &in, const ConfigFlags &flags, json &provenance) {
    if (!in.empty()) {
        provenance["input"] = in;
        return Trajectory::read_csv(in);
    }
    const Config c = flags.resolve();
    provenance["config"] = c.to_json();
    auto tr = simulate_one(c, OmegaModel::from_spec(c.omega), c.dts.front());
    if (tr.meta().aborted)
        throw Error(ErrorCode::trajectory_aborted, "simulation aborted at t=" + std::to_string(tr.meta().abort_time));
    return tr;
}

// ------------------------------------------------------------ spinor

int cmd_spinor(const std::string &n0s, double theta0, const std::string &ws, double t_end, double dt,
               const std::string &outdir) {
    const auto sol = spinor_params(parse_vec3(n0s), theta0, parse_vec3(ws));
    const fs::path dir = prepare_out(outdir);
    const fs::path csv = dir / "spinor.csv";
    Trajectory tr(Representation::axis_angle, TrajectoryMeta{"const:" + ws, 0.0, t_end, dt});
    const std::size_t n = grid_count(0.0, t_end, dt);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const auto s = spinor_state(sol, t);
        tr.push_back(t, std::array<double, 4>{s.n.x, s.n.y, s.n.z, s.theta});
    }
    tr.write_csv(csv);
    const double wn = dot(sol.omega_hat, sol.n0);
    const double sh = std::sin(0.5 * theta0);
    json j;
    j["command"] = "spinor";
    j["inputs"] = {{"n0", vec_json(sol.n0)}, {"theta0", theta0}, {"omega_hat", vec_json(sol.omega_hat)},
                   {"t_end", t_end}, {"dt", dt}};
    j["csv"] = csv.filename().string();
    j["a"] = sol.a;
    j["b"] = sol.b;
    j["cos_b"] = sol.cos_b;
    j["sin_b"] = sol.sin_b;
    j["k"] = sol.k;
    j["e1"] = vec_json(sol.e1);
    j["e2"] = vec_json(sol.e2);
    j["u"] = vec_json(sol.u);
    j["u1"] = vec_json(sol.u1);
    j["u2"] = vec_json(sol.u2);
    j["theta_range"] = json::array({2.0 * std::acos(sol.a), two_pi - 2.0 * std::acos(sol.a)});
    j["identity_residual"] = (1.0 - sol.a * sol.a) - (1.0 - wn * wn) * sh * sh;
    write_json(dir / "spinor.json", j);
    std::cout << csv.string() << ": a=" << sol.a << " b=" << sol.b << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Euler axis/angle kinematics experiments"};
    app.require_subcommand(1);

    ConfigFlags sim_flags;
    auto *sim = app.add_subcommand("simulate", "integrate a trajectory and write CSV + JSON");
    sim_flags.add(sim, true);

    std::string n0 = "1,0,0", w = "0,0,1", sp_out = "esl_out";
    double theta0 = pi / 2, sp_t_end = 4 * pi, sp_dt = 1e-3;
    auto *sp = app.add_subcommand("spinor", "closed-form solution for constant omega direction");
    sp->add_option("--n0", n0, "initial axis x,y,z");
    sp->add_option("--theta0", theta0, "initial angle in (0, 2pi)");
    sp->add_option("--omega-hat", w, "omega direction x,y,z");
    sp->add_option("--t-end", sp_t_end, "end time");
    sp->add_option("--dt", sp_dt, "sample spacing");
    sp->add_option("--out", sp_out, "output directory");

    auto *an = app.add_subcommand("analyze", "strobe | lyapunov | psd | recurrence");
    an->require_subcommand(1);

    ConfigFlags st_flags, psd_flags, rec_flags, ly_flags;
    std::string st_in, psd_in, rec_in;
    double st_period = 40.0, st_offset = 0.0;
    auto *st = an->add_subcommand("strobe", "sample a trajectory once per driving period");
    st->add_option("--in", st_in, "trajectory CSV (otherwise simulate from the flags)");
    st->add_option("--period", st_period, "strobe period");
    st->add_option("--offset", st_offset, "first strobe time after t0");
    st_flags.add(st, false);

    std::string psd_series_name = "norm", psd_window = "hann";
    std::size_t psd_peaks = 5;
    double psd_prom = 6.0;
    auto *psd = an->add_subcommand("psd", "power spectrum and peaks");
    psd->add_option("--in", psd_in, "trajectory CSV (otherwise simulate from the flags)");
    psd->add_option("--series", psd_series_name, "norm or a column name");
    psd->add_option("--window", psd_window, "hann | none");
    psd->add_option("--peaks", psd_peaks, "number of peaks to report");
    psd->add_option("--min-prominence", psd_prom, "minimum peak prominence in dB");
    psd_flags.add(psd, false);

    double rec_eps = 0.1;
    std::size_t rec_stride = 10;
    auto *rec = an->add_subcommand("recurrence", "thresholded recurrence matrix");
    rec->add_option("--in", rec_in, "trajectory CSV (otherwise simulate from the flags)");
    rec->add_option("--epsilon", rec_eps, "distance threshold");
    rec->add_option("--stride", rec_stride, "sample stride");
    rec_flags.add(rec, false);

    bool ly_self = false;
    std::size_t ly_steps = 100000, ly_renorm = 10;
    auto *ly = an->add_subcommand("lyapunov", "Lyapunov spectrum by the tangent-space method");
    ly->add_flag("--self-test", ly_self, "run the linear diag(0.1, -0.2) system instead");
    ly->add_option("--steps", ly_steps, "integration steps");
    ly->add_option("--renorm", ly_renorm, "steps between re-orthonormalisations");
    ly_flags.add(ly, false);

    std::optional<std::string> only;
    double tol_scale = 1.0;
    bool list = false;
    auto *ver = app.add_subcommand("verify", "run the acceptance checks");
    ver->add_option("--only", only, "run a single named check");
    ver->add_option("--tol-scale", tol_scale, "multiply every tolerance");
    ver->add_flag("--list", list, "list check names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_io;
    }

    try {
        if (*sim) return cmd_simulate(sim_flags);
        if (*sp) return cmd_spinor(n0, theta0, w, sp_t_end, sp_dt, sp_out);
        if (*ver) {
            if (list) {
                for (const auto &n : acceptance_check_names()) std::cout << n << '\n';
                return exit_ok;
            }
            VerifyOptions opt;
            opt.only = only;
            opt.tol_scale = tol_scale;
            const auto results = run_acceptance(opt);
            print_report(std::cout, results);
            return std::all_of(results.begin(), results.end(), [](const CheckResult &r) { return r.pass; })
                       ? exit_ok
                       : exit_verify;
        }
        json side;
        side["command"] = "analyze";
        if (*st) {
            side["analysis"] = "strobe";
            const auto tr = analysis_input(st_in, st_flags, side);
            const Config c = st_flags.resolve();
            const fs::path dir = prepare_out(c.out);
            side["result"] = strobe_to_files(tr, st_period, st_offset, dir, "analysis");
            write_json(dir / "analysis_strobe.json", side);
        } else if (*psd) {
            side["analysis"] = "psd";
            const auto tr = analysis_input(psd_in, psd_flags, side);
            const fs::path dir = prepare_out(psd_flags.resolve().out);
            side["result"] = psd_to_files(tr, psd_series_name, window_from_string(psd_window), psd_peaks, psd_prom,
                                          dir, "analysis");
            write_json(dir / "analysis_psd.json", side);
            for (const auto &p : side["result"]["peaks"])
                std::cout << "peak freq=" << p["freq"].get<double>() << " period=" << p["period"].get<double>()
                          << '\n';
        } else if (*rec) {
            side["analysis"] = "recurrence";
            const auto tr = analysis_input(rec_in, rec_flags, side);
            const fs::path dir = prepare_out(rec_flags.resolve().out);
            side["result"] = recurrence_to_files(tr, rec_eps, rec_stride, dir, "analysis");
            write_json(dir / "analysis_recurrence.json", side);
        } else if (*ly) {
            side["analysis"] = "lyapunov";
            const Config c = ly_flags.resolve();
            const fs::path dir = prepare_out(c.out);
            LyapunovEstimate est;
            if (ly_self) {
                const double dt = ly_flags.dts.empty() ? 0.01 : c.dts.front();
                side["self_test"] = {{"system", "diag(0.1, -0.2)"}, {"steps", ly_steps}, {"dt", dt}};
                est = lyapunov_self_test(ly_steps, dt);
            } else {
                const double dt = ly_flags.dts.empty() ? 0.01 : c.dts.front();
                const std::string rep = ly_flags.rep ? c.rep : "quat";
                json cfg = c.to_json();
                cfg["rep"] = rep;
                cfg["dt"] = dt;
                side["config"] = cfg;
                side["steps"] = ly_steps;
                side["renorm"] = ly_renorm;
                est = lyapunov_spectrum(representation_from_string(rep), OmegaModel::from_spec(c.omega), c.initial(),
                                        ly_steps, dt, ly_renorm);
            }
            side["result"] = lyapunov_to_files(est, dir, "analysis");
            write_json(dir / "analysis_lyapunov.json", side);
            std::cout << "exponents:";
            for (double l : est.exponents) std::cout << ' ' << l;
            std::cout << '\n';
        }
        return exit_ok;
    } catch (const Error &e) {
        std::cerr << "esl: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception &e) {
        std::cerr << "esl: " << e.what() << '\n';
        return exit_io;
    }
}
