#include "mxgs/runner.hpp"

#include "mxgs/error.hpp"
#include "mxgs/functionals.hpp"
#include "mxgs/io.hpp"
#include "mxgs/kernels.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <set>

namespace mxgs {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kExperimentNames[] = {"solve", "sweep", "spectrum", "kernel", "kato", "decay", "continuation"};

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// JSON cannot carry NaN or infinities; they become null.
ojson number(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ojson numbers(const std::vector<double>& xs) {
    ojson a = ojson::array();
    for (double x : xs) a.push_back(number(x));
    return a;
}

void check_keys(const nlohmann::json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw InvalidArgument("config: '" + where + "' must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key())) throw InvalidArgument("config: unknown key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
}

template <typename T>
void read(const nlohmann::json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidArgument(std::string("config: key '") + key + "' has the wrong type");
    }
}

ojson breakdown_json(const EnergyBreakdown& b) {
    ojson j;
    j["kinetic_local"] = number(b.kinetic_local);
    j["kinetic_nonlocal"] = number(b.kinetic_nonlocal);
    j["mass"] = number(b.mass);
    j["potential"] = number(b.potential);
    j["j_value"] = number(b.j_value);
    j["f_value"] = number(b.f_value);
    j["nehari_defect"] = number(b.nehari_defect);
    return j;
}

ojson state_json(const GroundStateResult& r) {
    ojson j;
    j["n"] = r.field.grid.n;
    j["N"] = r.field.grid.N();
    j["L"] = r.field.grid.L();
    j["s"] = r.s();
    j["p"] = r.p();
    j["shift"] = r.params.shift;
    j["lambda_s"] = number(r.lambda_s);
    const auto lr = lambda_from_state(r.field, r.params);
    j["norm_s_sq"] = number(lr.norm_s_sq);
    j["lambda_consistency"] = number(lr.consistency);
    j["residual_linf"] = number(r.residual_linf);
    j["residual_rel"] = number(r.residual_linf / std::max(r.field.max_abs(), 1e-300));
    j["nehari_rel"] = number(r.nehari_rel);
    j["u_max"] = number(r.field.max_abs());
    j["u_min"] = number(r.field.values.minCoeff());
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["method"] = r.method;
    j["center"] = std::vector<double>(r.center.begin(), r.center.begin() + r.field.grid.n);
    j["monotonicity_defect"] = number(r.monotonicity_defect);
    j["energy"] = breakdown_json(r.breakdown);
    return j;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Session {
public:
    Session(const RunConfig& cfg, std::string hash) : cfg_(cfg), hash_(std::move(hash)), dir_(cfg.output_dir) {}

    const RunConfig& cfg() const { return cfg_; }
    const std::string& hash() const { return hash_; }
    fs::path path(const std::string& name) {
        files_.push_back(name);
        return dir_ / name;
    }
    const std::vector<std::string>& files() const { return files_; }

    ojson header() const {
        ojson j;
        j["config_hash"] = hash_;
        j["experiment"] = to_string(cfg_.experiment);
        j["seed"] = cfg_.seed;
        j["threads"] = cfg_.threads;
        j["config"] = ojson::parse(canonical_config(cfg_));
        return j;
    }

    void write_json(const std::string& name, const ojson& body) {
        ojson j = header();
        for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
        write_text_file(path(name), j.dump(2) + "\n");
    }

    SymbolParams params(double s) const { return SymbolParams{cfg_.n, s, cfg_.p, 1.0}; }
    GridSpec grid() const { return build_grid(cfg_.n, cfg_.N, cfg_.L); }

    void save(const std::string& name, const GroundStateResult& r) {
        save_state(path(name), r, hash_);
        files_.push_back(sidecar_path(name).string());
    }

    // Loads cfg.state_path or solves at cfg.s; a non-converged solve is saved and then reported as a failure.
    GroundStateResult state() {
        if (!cfg_.state_path.empty()) {
            auto r = load_state(cfg_.state_path);
            if (static_cast<int>(r.field.grid.n) != cfg_.n)
                throw InvalidArgument("loaded state has dimension " + std::to_string(r.field.grid.n));
            return r;
        }
        auto r = solve_ground_state(params(cfg_.s), grid(), std::nullopt, cfg_.solver);
        save("u.field", r);
        if (!r.converged) throw ComputeError("ground-state solve did not converge (nehari_rel " + std::to_string(r.nehari_rel) + ")");
        return r;
    }

private:
    const RunConfig& cfg_;
    std::string hash_;
    fs::path dir_;
    std::vector<std::string> files_;
};

void run_solve(Session& ss) {
    const auto& cfg = ss.cfg();
    auto r = solve_ground_state(ss.params(cfg.s), ss.grid(), std::nullopt, cfg.solver);
    ss.save("u.field", r);
    std::vector<std::vector<double>> rows;
    for (const auto& rec : r.log) rows.push_back({double(rec.iteration), rec.nehari_rel, rec.step, rec.stabilizer});
    write_csv(ss.path("iterations.csv"), {"iteration", "nehari_rel", "step", "stabilizer"}, rows, ss.hash());

    ojson body;
    body["state"] = state_json(r);
    if (cfg.n == 1) {
        const double l0 = endpoint_lambda(1, cfg.p, Endpoint::s0);
        const double l1 = endpoint_lambda(1, cfg.p, Endpoint::s1);
        ojson e;
        e["lambda_0"] = l0;
        e["lambda_1"] = l1;
        e["sandwich_lower"] = std::pow(2.0, -0.5 + 1.0 / (cfg.p + 2.0)) * l1;
        e["sandwich_upper"] = 2.0 * l1;
        body["endpoints"] = e;
    }
    ss.write_json("results.json", body);
    if (!r.converged) throw ComputeError("ground-state solve did not converge after " + std::to_string(r.iterations) + " iterations");
}

void run_sweep(Session& ss) {
    const auto& cfg = ss.cfg();
    auto cc = cfg.continuation;
    cc.threads = cfg.threads;
    cc.solver = cfg.solver;
    const auto trace = sweep_s(cfg.s_values, ss.params(cfg.s_values.front()), ss.grid(), cc);
    emit_lambda_curve(ss.path("lambda_curve.csv"), trace, ss.hash());

    ojson body;
    body["direction"] = trace.direction;
    body["failed"] = trace.failed;
    if (trace.failed) body["failure"] = trace.failure;
    ojson recs = ojson::array();
    double umax_hi = 0.0, umax_lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& rec = trace.records[i];
        char name[32];
        std::snprintf(name, sizeof name, "u_%03zu.field", i);
        ss.save(name, rec.result);
        ojson j;
        j["s"] = rec.s;
        j["lambda_s"] = number(rec.lambda_s);
        j["norm_w"] = number(rec.norm_w);
        j["contraction_estimate"] = number(rec.contraction_estimate);
        j["substeps"] = rec.substeps;
        j["scratch_h1"] = rec.scratch_h1 ? number(*rec.scratch_h1) : ojson(nullptr);
        j["scratch_lambda"] = rec.scratch_lambda ? number(*rec.scratch_lambda) : ojson(nullptr);
        j["endpoint_h1"] = rec.endpoint_h1 ? number(*rec.endpoint_h1) : ojson(nullptr);
        j["residual_linf"] = number(rec.result.residual_linf);
        j["field_file"] = name;
        recs.push_back(j);
        umax_hi = std::max(umax_hi, rec.result.field.max_abs());
        umax_lo = std::min(umax_lo, rec.result.field.max_abs());
    }
    body["records"] = recs;
    if (!trace.records.empty()) body["u_max_ratio"] = number(umax_hi / umax_lo);
    if (trace.endpoint) body["endpoint_lambda"] = number(trace.endpoint->lambda_s);
    ss.write_json("results.json", body);
    if (trace.failed) throw ComputeError("sweep failed: " + trace.failure);
}

void run_continuation(Session& ss) {
    const auto& cfg = ss.cfg();
    auto cc = cfg.continuation;
    cc.threads = cfg.threads;
    cc.solver = cfg.solver;
    const auto anchor = ss.state();
    const auto steps = advance(anchor, cfg.s_target, cc);
    emit_continuation_steps(ss.path("continuation.csv"), steps, anchor.s(), ss.hash());
    const auto& final_state = steps.back().result;
    ss.save("u_target.field", final_state);

    ojson body;
    body["anchor"] = state_json(anchor);
    body["target"] = state_json(final_state);
    double q = 0.0, w = 0.0;
    for (const auto& st : steps) q = std::max(q, st.contraction_estimate), w += st.norm_w;
    body["contraction_estimate"] = number(q);
    body["norm_w"] = number(w);
    body["substeps"] = steps.size();
    if (cfg.scratch_check) {
        const auto scratch = solve_ground_state(ss.params(cfg.s_target), anchor.field.grid, std::nullopt, cfg.solver);
        body["scratch_h1"] = number(h1_distance(final_state.field, scratch.field));
        body["scratch_lambda"] = number(scratch.lambda_s);
        body["scratch_converged"] = scratch.converged;
    }
    ss.write_json("results.json", body);
}

void run_spectrum(Session& ss) {
    const auto& cfg = ss.cfg();
    const auto state = ss.state();
    SpectrumOptions opt;
    opt.m = cfg.m;
    opt.sector = cfg.sector;
    opt.seed = cfg.seed;
    auto report = eigen_lowest(state, opt);
    if (cfg.compute_radial_gap) {
        const auto gap = radial_gap(state, opt);
        if (gap.converged) report.radial_gap = gap.value;
    }
    const auto summary = morse_and_kernel_report(report, state);
    emit_eigenvalues(ss.path("eigenvalues.csv"), report, ss.hash());
    if (cfg.dump_eigenvectors)
        for (std::size_t i = 0; i < report.eigenvectors.size(); ++i)
            save_field(ss.path("eigvec_" + std::to_string(i) + ".field"), report.eigenvectors[i], state.s(), state.p());

    ojson sp;
    sp["sector"] = to_string(report.sector);
    sp["eigenvalues"] = numbers(report.eigenvalues);
    sp["residuals"] = numbers(report.residuals);
    sp["sector_labels"] = report.sector_labels;
    sp["morse_index"] = summary.morse_index;
    sp["kernel_dim"] = summary.kernel_dim;
    sp["kernel_candidates"] = report.kernel_candidates;
    sp["translation_overlaps"] = numbers(summary.translation_overlaps);
    sp["derivative_capture"] = numbers(summary.derivative_capture);
    sp["unexplained"] = number(summary.unexplained);
    sp["ambiguous"] = summary.ambiguous;
    sp["radial_gap"] = report.radial_gap ? number(*report.radial_gap) : ojson(nullptr);
    sp["tol_ker"] = report.tol_ker;
    sp["tol_neg"] = report.tol_neg;
    sp["iterations"] = report.iterations;
    sp["converged"] = report.converged;
    ojson body;
    body["state"] = state_json(state);
    body["spectrum"] = sp;
    ss.write_json("spectrum.json", sp);
    ss.write_json("results.json", body);
    if (!report.converged) throw ComputeError("eigensolver did not converge");
}

void run_kernel(Session& ss) {
    const auto& cfg = ss.cfg();
    std::vector<std::vector<std::string>> rows;
    ojson body;
    auto add = [&](const KernelSample& ks) {
        for (std::size_t i = 0; i < ks.values.size(); ++i) {
            double ratio = nan_value();
            if (!ks.bound_ratio.empty()) ratio = ks.bound_ratio[i];
            else if (ks.points[i] > 0.0) ratio = ks.values[i] * std::pow(ks.points[i], cfg.n);
            rows.push_back({ks.kind, format_real(ks.points[i]), format_real(ks.times_or_shift[i]),
                            format_real(ks.values[i]), format_real(ratio)});
        }
    };
    if (cfg.kernel_kind == "heat" || cfg.kernel_kind == "both") {
        const auto ks = sample_heat_kernel(cfg.n, cfg.s, cfg.radii, cfg.times);
        add(ks);
        ojson h;
        h["method"] = ks.method;
        h["error_estimate"] = number(ks.error_estimate);
        ojson mass = ojson::array();
        for (double t : cfg.times) {
            ojson m;
            m["t"] = t;
            m["mass"] = number(heat_kernel_mass(cfg.n, cfg.s, t));
            mass.push_back(m);
        }
        h["mass"] = mass;
        if (cfg.s > 0.0 && cfg.s < 1.0) {
            const auto base = heat_bound_check(cfg.n, cfg.s, log_grid(0.1, 10.0, 10, 0.01, 100.0, 10));
            h["bound_max_ratio"] = number(base.max_ratio);
            h["bound_min_ratio"] = number(base.min_ratio);
            h["bound_finite"] = base.finite;
            h["bound_outliers"] = base.outliers.size();
        }
        body["heat"] = h;
    }
    if (cfg.kernel_kind == "resolvent" || cfg.kernel_kind == "both") {
        std::vector<double> radii;
        for (double r : cfg.radii)
            if (cfg.n == 1 || r > 0.0) radii.push_back(r);
        const auto ks = sample_resolvent_kernel(cfg.n, cfg.s, cfg.kernel_lambda, radii);
        add(ks);
        ojson k;
        k["method"] = ks.method;
        k["lambda"] = cfg.kernel_lambda;
        k["error_estimate"] = number(ks.error_estimate);
        ojson cross = ojson::array();
        for (double r : {0.5, 1.0, 2.0}) {
            ojson c;
            c["r"] = r;
            c["direct"] = number(resolvent_kernel_eval(cfg.n, cfg.s, cfg.kernel_lambda, r));
            c["laplace_of_heat"] = number(resolvent_via_heat(cfg.n, cfg.s, cfg.kernel_lambda, r));
            cross.push_back(c);
        }
        k["cross_check"] = cross;
        body["resolvent"] = k;
    }
    write_csv_text(ss.path("kernel.csv"), {"kind", "r", "t_or_lambda", "value", "bound_ratio"}, rows, ss.hash());
    ss.write_json("results.json", body);
}

void run_kato(Session& ss) {
    const auto& cfg = ss.cfg();
    const auto state = ss.state();
    RealField V(state.field.grid);
    V.values = (state.p() + 1.0) * state.field.values.cwiseAbs().array().pow(state.p()).matrix();
    std::vector<std::vector<double>> rows;
    std::vector<double> norms;
    for (double beta : cfg.betas) {
        norms.push_back(kato_norm(V, beta, state.s()));
        rows.push_back({beta, norms.back()});
    }
    write_csv(ss.path("kato.csv"), {"beta", "kato_norm"}, rows, ss.hash());
    bool decreasing = true;
    for (std::size_t i = 1; i < norms.size(); ++i) decreasing = decreasing && norms[i] < norms[i - 1];
    ojson body;
    body["state"] = state_json(state);
    body["betas"] = numbers(cfg.betas);
    body["kato_norms"] = numbers(norms);
    body["strictly_decreasing"] = decreasing;
    body["last_over_first"] = number(norms.back() / norms.front());
    ss.write_json("results.json", body);
}

void run_decay(Session& ss) {
    const auto& cfg = ss.cfg();
    const auto state = ss.state();
    const double L = state.field.grid.L();
    const double r_max = cfg.fit_r_max > 0.0 ? cfg.fit_r_max : L / 2.0;
    std::vector<double> radii;
    for (double r = 0.0; r <= r_max * (1.0 + 1e-12); r += cfg.tail_step) radii.push_back(std::min(r, L / 2.0));
    const auto tail = free_space_tail(state, radii);
    const double dx = state.field.grid.spacing();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < tail.radii.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(std::llround(tail.radii[i] / dx));
        std::array<int, 3> ijk{static_cast<int>(k), 0, 0};
        const double grid_value = state.field.values[static_cast<Eigen::Index>(state.field.grid.flatten(ijk))];
        rows.push_back({tail.radii[i], tail.values[i], tail.error_estimates[i], grid_value});
    }
    write_csv(ss.path("tail.csv"), {"r", "value", "error_estimate", "grid_value"}, rows, ss.hash());
    const auto fit = tail_exponent(tail.radii, tail.values, cfg.fit_r_min, r_max, state.field.grid.n, state.s());
    ojson f;
    f["r_min"] = fit.r_min;
    f["r_max"] = fit.r_max;
    f["points"] = fit.points;
    f["fitted_exponent"] = number(fit.fitted_exponent);
    f["fitted_constant"] = number(fit.fitted_constant);
    f["r_squared"] = number(fit.r_squared);
    f["expected_exponent"] = fit.expected_exponent;
    f["small_s_reference"] = fit.small_s_reference ? ojson(*fit.small_s_reference) : ojson(nullptr);
    ojson body;
    body["state"] = state_json(state);
    body["tail_fit"] = f;
    ss.write_json("results.json", body);
}

}  // namespace

std::string to_string(Experiment e) { return kExperimentNames[static_cast<int>(e)]; }

Experiment experiment_from_string(const std::string& name) {
    for (int i = 0; i < 7; ++i)
        if (name == kExperimentNames[i]) return static_cast<Experiment>(i);
    throw InvalidArgument("unknown experiment '" + name + "'");
}

RunConfig parse_config(const std::string& json_text, const RunConfig& defaults) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "", {"experiment", "n", "s", "s_values", "p", "N", "L", "seed", "threads", "output_dir", "state",
                       "solver", "continuation", "spectrum", "kernel", "kato", "decay"});
    RunConfig c = defaults;
    if (j.contains("experiment")) {
        std::string name;
        read(j, "experiment", name);
        c.experiment = experiment_from_string(name);
    }
    read(j, "n", c.n);
    read(j, "s", c.s);
    read(j, "s_values", c.s_values);
    read(j, "p", c.p);
    read(j, "N", c.N);
    read(j, "L", c.L);
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);
    read(j, "output_dir", c.output_dir);
    read(j, "state", c.state_path);
    if (j.contains("solver")) {
        const auto& o = j["solver"];
        check_keys(o, "solver", {"max_iterations", "nehari_tol", "step_tol", "symmetrize", "force_fallback", "fallback_tau",
                                 "fallback_max_iterations"});
        read(o, "max_iterations", c.solver.max_iterations);
        read(o, "nehari_tol", c.solver.nehari_tol);
        read(o, "step_tol", c.solver.step_tol);
        read(o, "symmetrize", c.solver.symmetrize);
        read(o, "force_fallback", c.solver.force_fallback);
        read(o, "fallback_tau", c.solver.fallback_tau);
        read(o, "fallback_max_iterations", c.solver.fallback_max_iterations);
    }
    if (j.contains("continuation")) {
        const auto& o = j["continuation"];
        check_keys(o, "continuation", {"picard_tol", "max_picard", "inner_tol", "inner_max_iterations", "min_step",
                                       "residual_tol", "scratch_every", "endpoint_distances", "s_target", "scratch_check"});
        auto& cc = c.continuation;
        read(o, "picard_tol", cc.picard_tol);
        read(o, "max_picard", cc.max_picard);
        read(o, "inner_tol", cc.inner_tol);
        read(o, "inner_max_iterations", cc.inner_max_iterations);
        read(o, "min_step", cc.min_step);
        read(o, "residual_tol", cc.residual_tol);
        read(o, "scratch_every", cc.scratch_every);
        read(o, "endpoint_distances", cc.endpoint_distances);
        read(o, "s_target", c.s_target);
        read(o, "scratch_check", c.scratch_check);
    }
    if (j.contains("spectrum")) {
        const auto& o = j["spectrum"];
        check_keys(o, "spectrum", {"m", "sector", "radial_gap", "dump_eigenvectors"});
        read(o, "m", c.m);
        if (o.contains("sector")) {
            std::string name;
            read(o, "sector", name);
            c.sector = sector_from_string(name);
        }
        read(o, "radial_gap", c.compute_radial_gap);
        read(o, "dump_eigenvectors", c.dump_eigenvectors);
    }
    if (j.contains("kernel")) {
        const auto& o = j["kernel"];
        check_keys(o, "kernel", {"kind", "radii", "times", "lambda"});
        read(o, "kind", c.kernel_kind);
        read(o, "radii", c.radii);
        read(o, "times", c.times);
        read(o, "lambda", c.kernel_lambda);
    }
    if (j.contains("kato")) {
        const auto& o = j["kato"];
        check_keys(o, "kato", {"betas"});
        read(o, "betas", c.betas);
    }
    if (j.contains("decay")) {
        const auto& o = j["decay"];
        check_keys(o, "decay", {"step", "fit_r_min", "fit_r_max"});
        read(o, "step", c.tail_step);
        read(o, "fit_r_min", c.fit_r_min);
        read(o, "fit_r_max", c.fit_r_max);
    }
    return c;
}

std::string canonical_config(const RunConfig& c) {
    ojson j;
    j["experiment"] = to_string(c.experiment);
    j["n"] = c.n;
    j["s"] = c.s;
    j["s_values"] = c.s_values;
    j["p"] = c.p;
    j["N"] = c.N;
    j["L"] = c.L;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["state"] = c.state_path;
    j["solver"] = {{"max_iterations", c.solver.max_iterations},
                   {"nehari_tol", c.solver.nehari_tol},
                   {"step_tol", c.solver.step_tol},
                   {"symmetrize", c.solver.symmetrize},
                   {"force_fallback", c.solver.force_fallback},
                   {"fallback_tau", c.solver.fallback_tau},
                   {"fallback_max_iterations", c.solver.fallback_max_iterations}};
    const auto& cc = c.continuation;
    j["continuation"] = {{"picard_tol", cc.picard_tol},
                         {"max_picard", cc.max_picard},
                         {"inner_tol", cc.inner_tol},
                         {"inner_max_iterations", cc.inner_max_iterations},
                         {"min_step", cc.min_step},
                         {"residual_tol", cc.residual_tol},
                         {"scratch_every", cc.scratch_every},
                         {"endpoint_distances", cc.endpoint_distances},
                         {"s_target", c.s_target},
                         {"scratch_check", c.scratch_check}};
    j["spectrum"] = {{"m", c.m},
                     {"sector", to_string(c.sector)},
                     {"radial_gap", c.compute_radial_gap},
                     {"dump_eigenvectors", c.dump_eigenvectors}};
    j["kernel"] = {{"kind", c.kernel_kind}, {"radii", c.radii}, {"times", c.times}, {"lambda", c.kernel_lambda}};
    j["kato"] = {{"betas", c.betas}};
    j["decay"] = {{"step", c.tail_step}, {"fit_r_min", c.fit_r_min}, {"fit_r_max", c.fit_r_max}};
    return j.dump();
}

std::string config_hash(const RunConfig& cfg) { return fnv1a_hex(canonical_config(cfg)); }

void validate_config(const RunConfig& c) {
    const auto grid = build_grid(c.n, c.N, c.L);
    if (c.threads < 1) throw InvalidArgument("threads must be >= 1");
    const bool needs_state = c.experiment == Experiment::spectrum || c.experiment == Experiment::kato ||
                             c.experiment == Experiment::decay || c.experiment == Experiment::continuation;
    const bool solves = c.experiment == Experiment::solve || c.experiment == Experiment::sweep ||
                        (needs_state && c.state_path.empty());
    if (c.experiment != Experiment::sweep) validate(SymbolParams{c.n, c.s, c.p, 1.0});
    if (solves && grid.N() * M_PI / grid.L() < 8.0) throw InvalidArgument("grid too coarse to resolve the soliton core");
    if (!c.state_path.empty() && !fs::exists(c.state_path)) throw InvalidArgument("state file not found: " + c.state_path);
    if (c.solver.max_iterations < 1 || !(c.solver.nehari_tol > 0.0) || !(c.solver.step_tol > 0.0) ||
        !(c.solver.fallback_tau > 0.0))
        throw InvalidArgument("solver tolerances and iteration limits must be positive");

    switch (c.experiment) {
        case Experiment::sweep: {
            if (c.s_values.empty()) throw InvalidArgument("sweep needs a non-empty s_values list");
            for (double s : c.s_values) validate(SymbolParams{c.n, s, c.p, 1.0});
            for (std::size_t i = 2; i < c.s_values.size(); ++i)
                if ((c.s_values[i] - c.s_values[i - 1]) * (c.s_values[1] - c.s_values[0]) <= 0.0)
                    throw InvalidArgument("s values must be strictly monotone");
            if (c.s_values.size() == 2 && c.s_values[0] == c.s_values[1]) throw InvalidArgument("s values must be strictly monotone");
            break;
        }
        case Experiment::spectrum:
            if (c.m < 1 || c.m > 12) throw InvalidArgument("spectrum.m must lie in 1..12");
            if ((c.sector == Sector::even || c.sector == Sector::odd) && c.n != 1)
                throw InvalidArgument("even/odd sectors exist only for n = 1");
            break;
        case Experiment::kernel:
            if (c.kernel_kind != "heat" && c.kernel_kind != "resolvent" && c.kernel_kind != "both")
                throw InvalidArgument("kernel.kind must be heat, resolvent or both");
            if (c.radii.empty()) throw InvalidArgument("kernel.radii is empty");
            for (double r : c.radii)
                if (!(r >= 0.0)) throw InvalidArgument("kernel radii must be >= 0");
            if (c.kernel_kind != "resolvent") {
                if (c.times.empty()) throw InvalidArgument("kernel.times is empty");
                for (double t : c.times)
                    if (!(t > 0.0)) throw InvalidArgument("heat kernel times must be > 0");
            }
            if (!(c.kernel_lambda > 0.0)) throw InvalidArgument("kernel.lambda must be > 0");
            break;
        case Experiment::kato:
            if (c.betas.empty()) throw InvalidArgument("kato.betas is empty");
            for (double b : c.betas)
                if (!(b > 0.0)) throw InvalidArgument("Kato norm requires beta > 0");
            break;
        case Experiment::decay: {
            if (!(c.tail_step > 0.0)) throw InvalidArgument("decay.step must be > 0");
            const double r_max = c.fit_r_max > 0.0 ? c.fit_r_max : c.L / 2.0;
            if (c.fit_r_min < 1.0) throw InvalidArgument("tail fit window must start at r >= 1");
            if (r_max > c.L / 2.0) throw InvalidArgument("tail radii beyond L/2 are not trusted");
            if (!(r_max > c.fit_r_min)) throw InvalidArgument("degenerate tail fit window");
            break;
        }
        case Experiment::continuation:
            validate(SymbolParams{c.n, c.s_target, c.p, 1.0});
            if (!(c.continuation.min_step > 0.0)) throw InvalidArgument("continuation.min_step must be > 0");
            break;
        default:
            break;
    }
}

RunOutcome run(const RunConfig& cfg) {
    RunOutcome out;
    const std::string started = utc_now();
    const std::string hash = config_hash(cfg);
    Session ss(cfg, hash);

    auto fail = [&](int status, const std::string& kind, const std::string& message) {
        out.status = status;
        out.error = message;
        ojson e;
        e["config_hash"] = hash;
        e["status"] = status;
        e["kind"] = kind;
        e["message"] = message;
        try {
            write_text_file(ss.path("error.json"), e.dump(2) + "\n");
        } catch (const std::exception&) {
        }
    };

    try {
        fs::create_directories(cfg.output_dir);
    } catch (const std::exception& e) {
        out.status = kExitConfigError;
        out.error = std::string("cannot create output directory: ") + e.what();
        return out;
    }

    try {
        validate_config(cfg);
        switch (cfg.experiment) {
            case Experiment::solve: run_solve(ss); break;
            case Experiment::sweep: run_sweep(ss); break;
            case Experiment::spectrum: run_spectrum(ss); break;
            case Experiment::kernel: run_kernel(ss); break;
            case Experiment::kato: run_kato(ss); break;
            case Experiment::decay: run_decay(ss); break;
            case Experiment::continuation: run_continuation(ss); break;
        }
    } catch (const InvalidArgument& e) {
        fail(kExitConfigError, "config", e.what());
    } catch (const FormatError& e) {
        fail(kExitConfigError, "config", e.what());
    } catch (const std::exception& e) {
        fail(kExitComputeError, "compute", e.what());
    }

    out.files = ss.files();
    ojson m;
    m["config_hash"] = hash;
    m["experiment"] = to_string(cfg.experiment);
    m["seed"] = cfg.seed;
    m["threads"] = cfg.threads;
    m["status"] = out.status;
    m["started_at"] = started;
    m["finished_at"] = utc_now();
    m["files"] = out.files;
    try {
        write_text_file(fs::path(cfg.output_dir) / "manifest.json", m.dump(2) + "\n");
    } catch (const std::exception& e) {
        if (out.status == kExitOk) {
            out.status = kExitComputeError;
            out.error = e.what();
        }
    }
    return out;
}

void emit_lambda_curve(const fs::path& path, const ContinuationTrace& trace, const std::string& hash) {
    auto opt = [](const std::optional<double>& x) { return x ? *x : nan_value(); };
    std::vector<std::vector<double>> rows;
    for (const auto& r : trace.records)
        rows.push_back({r.s, r.lambda_s, r.norm_w, r.contraction_estimate, double(r.substeps), opt(r.scratch_h1),
                        opt(r.scratch_lambda), opt(r.endpoint_h1)});
    write_csv(path, {"s", "lambda_s", "norm_w", "contraction_estimate", "substeps", "scratch_h1", "scratch_lambda", "endpoint_h1"},
              rows, hash);
}

void emit_eigenvalues(const fs::path& path, const SpectrumReport& report, const std::string& hash) {
    std::vector<std::size_t> order(report.eigenvalues.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return report.eigenvalues[a] < report.eigenvalues[b]; });
    std::vector<std::vector<std::string>> rows;
    for (auto i : order) {
        const std::string label = i < report.sector_labels.size() ? report.sector_labels[i] : "";
        const double res = i < report.residuals.size() ? report.residuals[i] : nan_value();
        rows.push_back({std::to_string(i), format_real(report.eigenvalues[i]), format_real(res), label});
    }
    write_csv_text(path, {"index", "eigenvalue", "residual", "sector_label"}, rows, hash);
}

void emit_continuation_steps(const fs::path& path, const std::vector<ContinuationStep>& steps, double sigma,
                             const std::string& hash) {
    std::vector<std::vector<double>> rows;
    double from = sigma;
    for (const auto& st : steps) {
        rows.push_back({from, st.result.s(), st.norm_w, st.contraction_estimate, double(st.picard_iterations),
                        double(st.inner_iterations), st.result.residual_linf});
        from = st.result.s();
    }
    write_csv(path, {"sigma", "s", "norm_w", "contraction_estimate", "picard_iterations", "inner_iterations", "residual_linf"},
              rows, hash);
}

}  // namespace mxgs
