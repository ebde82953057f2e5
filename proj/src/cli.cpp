#include "robust_interp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "robust_interp/config.hpp"
#include "robust_interp/errors.hpp"
#include "robust_interp/synthesis.hpp"

namespace robust_interp {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitInfeasible = 2;
constexpr int kRegionPoints = 256;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path resolve(const CliOptions& opts, const std::string& path) {
    const fs::path p(path);
    return p.is_absolute() ? p : fs::path(opts.out_dir) / p;
}

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ojson complex_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ojson provenance(const std::string& config_text, const char* command) {
    return {{"tool", std::string(kToolName)},
            {"version", std::string(kToolVersion)},
            {"command", command},
            {"config_hash", "fnv1a64:" + fnv1a_hex(config_text)},
            {"timestamp", utc_timestamp()}};
}

ojson plant_json(const PoleZeroData& pz) {
    ojson j;
    j["unstable_poles"] = ojson::array();
    for (const cplx& p : pz.unstable_poles) j["unstable_poles"].push_back(complex_json(p));
    j["nonmin_phase_zeros"] = ojson::array();
    for (const cplx& z : pz.nonmin_phase_zeros) j["nonmin_phase_zeros"].push_back(complex_json(z));
    j["relative_degree"] = pz.relative_degree;
    return j;
}

ojson coefficients_json(const RationalFunction& f) {
    return {{"num", f.num().is_zero() ? std::vector<double>{0.0} : f.num().coefficients()},
            {"den", f.den().coefficients()}};
}

ojson verification_json(const VerificationReport& r) {
    ojson j;
    j["passed"] = r.passed;
    j["stabilizes_nominal"] = r.stabilizes_nominal;
    j["winding"] = r.winding;
    j["expected_winding"] = r.expected_winding;
    j["plant_unstable_poles"] = r.plant_unstable_poles;
    j["controller_unstable_poles"] = r.controller_unstable_poles;
    j["nyquist_margin"] = number_or_null(r.nyquist_margin);
    j["nyquist_margin_omega"] = r.nyquist_margin_omega;
    j["margin_threshold"] = r.margin_threshold;
    j["max_open_loop"] = r.max_open_loop;
    j["grid_points"] = r.grid_size;
    j["small_gain_sup"] = number_or_null(r.small_gain_sup);
    j["lambda_distance"] = number_or_null(r.lambda_distance);
    j["interp_residuals"] = ojson::array();
    for (const cplx& z : r.interp_residuals) j["interp_residuals"].push_back(complex_json(z));
    j["t_inf"] = r.t_inf;
    j["t_inf_ok"] = r.t_inf_ok;
    j["t_inf_exact"] = r.t_inf_exact;
    j["note"] = r.note;
    return j;
}

ojson data_json(const WeightedData& wd) {
    ojson nodes = ojson::array();
    for (std::size_t i = 0; i < wd.data_rat.size(); ++i) {
        nodes.push_back({{"node", complex_json(wd.data_rat.nodes[i])},
                         {"kind", wd.data_rat.kinds[i] == NodeKind::Pole ? "pole" : "zero"},
                         {"value_outer", complex_json(wd.data_eps.values[i])},
                         {"value_rational", complex_json(wd.data_rat.values[i])}});
    }
    return {{"verdict", wd.feasible_rat ? "feasible" : "infeasible"},
            {"positive_definite", wd.feasible_rat},
            {"pick_min_eigenvalue", number_or_null(wd.pick_rat.min_eigenvalue)},
            {"positive_definite_outer", wd.feasible_eps},
            {"pick_min_eigenvalue_outer", number_or_null(wd.pick_eps.min_eigenvalue)},
            {"nodes", nodes}};
}

ojson weight_json(const WeightedData& wd) {
    return {{"epsilon", wd.epsilon},
            {"degree", wd.fit.degree},
            {"rel_deg_offset", wd.fit.relative_degree_offset},
            {"overshoot", wd.fit.overshoot},
            {"fit_gap", wd.fit.fit_report},
            {"w_rat", coefficients_json(wd.fit.w_rat)}};
}

ojson assumptions_json(const AssumptionReport& a) {
    return {{"passed", a.passed},
            {"identity_member", a.identity_member},
            {"norm_bound_ok", a.norm_bound_ok},
            {"violations", a.violations}};
}

void write_nyquist(const fs::path& path, const RationalFunction& open_loop, const FrequencyGridSpec& grid) {
    std::string csv = "omega,re_pk,im_pk\n";
    for (double w : verification_frequencies(open_loop, grid)) {
        const cplx v = open_loop.at_frequency(w);
        csv += fmt17(w) + "," + fmt17(v.real()) + "," + fmt17(v.imag()) + "\n";
    }
    write_file(path, csv);
}

void write_regions(const fs::path& path, const DisturbanceFamily& family, const std::vector<double>& freqs) {
    std::string csv = "omega,region,re,im,segment_id\n";
    for (double w : freqs) {
        for (Region region : {Region::Gamma, Region::Lambda}) {
            const RegionSample rs = family.region_boundary(region, w, kRegionPoints);
            const char* name = region == Region::Gamma ? "gamma" : "lambda";
            for (std::size_t i = 0; i < rs.boundary_points.size(); ++i) {
                csv += fmt17(w) + "," + name + "," + fmt17(rs.boundary_points[i].real()) + "," +
                       fmt17(rs.boundary_points[i].imag()) + "," + std::to_string(rs.segment_ids[i]) + "\n";
            }
        }
    }
    write_file(path, csv);
}

void summarize_verification(std::ostream& out, const VerificationReport& r) {
    out << "verification: " << (r.passed ? "PASSED" : "FAILED") << "\n"
        << "  winding of PK about -1: " << r.winding << " (expected n + n_K = " << r.plant_unstable_poles << " + "
        << r.controller_unstable_poles << ")\n"
        << "  Nyquist margin to Gamma: " << r.nyquist_margin << " at w = " << r.nyquist_margin_omega
        << " (threshold " << r.margin_threshold << ", " << r.grid_size << " frequencies)\n"
        << "  small-gain sup: " << r.small_gain_sup << ", T(inf) outside Lambda(inf): " << (r.t_inf_ok ? "yes" : "no")
        << "\n";
    if (!r.note.empty()) out << "  note: " << r.note << "\n";
}

struct Loaded {
    std::string text;
    RunConfig config;
};

Loaded load(const CliOptions& opts) {
    Loaded l;
    l.text = read_file(opts.config_path);
    l.config = parse_config(l.text, opts.config_path);
    return l;
}

RationalFunction load_controller(const std::string& path) {
    return parse_controller(read_file(path), path).build();
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitFail;
}

}  // namespace

int cmd_synthesize(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Loaded l = load(opts);
        const RunConfig& cfg = l.config;
        const SynthesisProblem prob = cfg.problem();
        const WeightedData wd = prepare(prob);

        ojson report;
        report["provenance"] = provenance(l.text, "synthesize");
        report["plant"] = plant_json(wd.pz);
        report["assumptions"] = assumptions_json(wd.assumptions);
        report["weight"] = weight_json(wd);
        report["feasibility"] = data_json(wd);
        const fs::path report_path = resolve(opts, cfg.outputs.report_path);

        if (!opts.quiet) {
            out << "plant: " << wd.pz.unstable_poles.size() << " unstable pole(s), " << wd.pz.nonmin_phase_zeros.size()
                << " nonminimum-phase zero(s), relative degree " << wd.pz.relative_degree << "\n"
                << "weight: epsilon " << wd.epsilon << ", overshoot " << wd.fit.overshoot << "\n"
                << "Pick matrix: min eigenvalue " << wd.pick_rat.min_eigenvalue << " (outer weight "
                << wd.pick_eps.min_eigenvalue << "), "
                << (wd.feasible_rat ? "positive definite" : "NOT positive definite") << "\n";
        }
        if (!wd.feasible_rat) {
            report["status"] = "infeasible";
            write_file(report_path, report.dump(2) + "\n");
            if (!opts.quiet) out << "sufficient condition fails: no controller certified\nwrote " << report_path.string() << "\n";
            return kExitInfeasible;
        }

        const SynthesisResult res = synthesize(prob, wd);
        report["controller"] = coefficients_json(res.controller);
        report["verification"] = verification_json(res.report);
        report["status"] = res.report.passed ? "passed" : "failed";

        const fs::path controller_path = resolve(opts, cfg.outputs.controller_path);
        const fs::path nyquist_path = resolve(opts, cfg.outputs.nyquist_csv_path);
        write_file(controller_path, emit_controller(res.controller));
        write_nyquist(nyquist_path, prob.plant * res.controller, cfg.grids);
        ojson written = {controller_path.string(), nyquist_path.string()};
        if (!cfg.outputs.region_frequencies.empty()) {
            const fs::path regions_path = resolve(opts, cfg.outputs.regions_csv_path);
            write_regions(regions_path, prob.family, cfg.outputs.region_frequencies);
            written.push_back(regions_path.string());
        }
        report["outputs"] = written;
        write_file(report_path, report.dump(2) + "\n");

        if (!opts.quiet) {
            out << "controller: degree " << res.controller.num().degree() << "/" << res.controller.den().degree() << "\n";
            summarize_verification(out, res.report);
            out << "wrote " << report_path.string() << "\n";
        }
        return res.report.passed ? kExitOk : kExitFail;
    });
}

int cmd_verify(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (opts.controller_path.empty()) throw Error(ErrorCode::InvalidConfig, "verify needs --controller");
        const Loaded l = load(opts);
        const RunConfig& cfg = l.config;
        const SynthesisProblem prob = cfg.problem();
        const RationalFunction k = load_controller(opts.controller_path);
        const VerificationReport rep = verify(prob.plant, k, prob.family, cfg.grids, prob.t0);

        ojson report;
        report["provenance"] = provenance(l.text, "verify");
        report["plant"] = plant_json(classify(prob.plant));
        report["controller"] = coefficients_json(k);
        report["verification"] = verification_json(rep);
        report["status"] = rep.passed ? "passed" : "failed";
        const fs::path nyquist_path = resolve(opts, cfg.outputs.nyquist_csv_path);
        write_nyquist(nyquist_path, prob.plant * k, cfg.grids);
        report["outputs"] = {nyquist_path.string()};
        const fs::path report_path = resolve(opts, cfg.outputs.report_path);
        write_file(report_path, report.dump(2) + "\n");
        if (!opts.quiet) {
            summarize_verification(out, rep);
            out << "wrote " << report_path.string() << "\n";
        }
        return rep.passed ? kExitOk : kExitFail;
    });
}

int cmd_regions(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Loaded l = load(opts);
        const RunConfig& cfg = l.config;
        if (cfg.outputs.region_frequencies.empty()) {
            const auto pos = l.text.find("\"outputs\"");
            const auto line = pos == std::string::npos ? 1 : 1 + std::count(l.text.begin(), l.text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
            throw Error(ErrorCode::InvalidConfig, opts.config_path + ":" + std::to_string(line) +
                                                      ": outputs.region_frequencies: must be non-empty for regions");
        }
        const SynthesisProblem prob = cfg.problem();
        const fs::path regions_path = resolve(opts, cfg.outputs.regions_csv_path);
        write_regions(regions_path, prob.family, cfg.outputs.region_frequencies);
        if (!opts.quiet) out << "wrote " << regions_path.string() << "\n";

        std::optional<RationalFunction> k;
        if (!opts.controller_path.empty()) {
            k = load_controller(opts.controller_path);
        } else {
            try {
                k = synthesize(prob).controller;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Infeasible) throw;
                err << "warning: " << e.what() << "; Nyquist trace skipped\n";
            }
        }
        if (k) {
            const fs::path nyquist_path = resolve(opts, cfg.outputs.nyquist_csv_path);
            write_nyquist(nyquist_path, prob.plant * *k, cfg.grids);
            if (!opts.quiet) out << "wrote " << nyquist_path.string() << "\n";
        }
        return kExitOk;
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust stabilization by analytic interpolation"};
    app.require_subcommand(1);
    CliOptions opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "run configuration (JSON)")->required();
        sub->add_option("--out-dir", opts.out_dir, "directory for relative output paths");
        sub->add_flag("--quiet", opts.quiet, "suppress the human-readable summary");
    };
    CLI::App* synth = app.add_subcommand("synthesize", "synthesize and verify a robust controller");
    add_common(synth);
    CLI::App* ver = app.add_subcommand("verify", "verify a given controller");
    add_common(ver);
    ver->add_option("--controller", opts.controller_path, "controller JSON {num, den}")->required();
    CLI::App* reg = app.add_subcommand("regions", "emit Gamma/Lambda boundary traces and the PK Nyquist trace");
    add_common(reg);
    reg->add_option("--controller", opts.controller_path, "controller JSON; synthesized when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? kExitOk : kExitFail;
    }
    if (*synth) return cmd_synthesize(opts, out, err);
    if (*ver) return cmd_verify(opts, out, err);
    return cmd_regions(opts, out, err);
}

}  // namespace robust_interp
