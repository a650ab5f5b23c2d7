// relu-certify: injectivity certification, maximal-bias estimation and exact
// reconstruction for ReLU layers on bounded domains.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <algorithm>

#include <CLI11.hpp>

#include "relucert/bias_estimation.hpp"
#include "relucert/domain.hpp"
#include "relucert/errors.hpp"
#include "relucert/experiments.hpp"
#include "relucert/io.hpp"
#include "relucert/parallel.hpp"
#include "relucert/polytope.hpp"
#include "relucert/reconstruction.hpp"
#include "relucert/stability.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

struct CommonArgs {
    std::string frame_path;
    std::string bias_path;
    std::string domain_text;
    std::string method = "pbe";
    std::string out_path;
    std::size_t n_samples = 100000;
    std::uint64_t seed = 42;
    double correction_factor = 0.05;
    double tol_rank = relucert::kRankTolScale;
    double tol_face = relucert::kFaceTol;
    std::string facets_out;
};

relucert::Frame load_frame(const std::string& path) {
    if (path.rfind("builtin:", 0) == 0) return relucert::builtin_frame(path.substr(8));
    return relucert::read_frame_csv(path);
}

relucert::Bias load_bias(const std::string& path, const relucert::Frame& frame) {
    if (path.empty()) return relucert::Bias(static_cast<std::size_t>(frame.m), 0.0);
    if (path.rfind("const:", 0) == 0)
        return relucert::Bias(static_cast<std::size_t>(frame.m), std::stod(path.substr(6)));
    return relucert::read_bias_file(path, frame.m);
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-")
        std::cout << content << "\n";
    else
        relucert::write_text_file(out_path, content);
}

relucert::BiasEstimate run_estimate(const CommonArgs& args, const relucert::Frame& unit,
                                    const std::vector<double>& norms,
                                    const relucert::DomainSpec& domain) {
    using namespace relucert;
    (void)norms;
    if (args.method == "sample") {
        SamplingOptions opts;
        opts.correction_factor = args.correction_factor;
        return sampling_bias_estimate(unit, domain, args.n_samples, args.seed, opts);
    }
    if (args.method != "pbe")
        throw parse_error("unknown method '" + args.method + "' (expected sample or pbe)");

    if (!is_omnidirectional(unit, args.tol_face))
        throw infeasible_error("frame is not omnidirectional: the origin is not interior "
                               "to its convex hull");
    FacetStructure fs = enumerate_facets(unit, args.tol_face);
    if (!args.facets_out.empty()) write_text_file(args.facets_out, facet_structure_to_json(fs));
    switch (domain.kind) {
        case DomainKind::sphere:
            return pbe_sphere(unit, fs);
        case DomainKind::ball:
            return pbe_donut(unit, fs, domain.r, 0.0);
        case DomainKind::donut:
            return pbe_donut(unit, fs, domain.r, domain.s);
        case DomainKind::nonneg_ball:
            return pbe_nonneg_ball(unit, fs, domain.r);
        case DomainKind::ball_complement:
            return pbe_ball_complement(unit, fs, domain.s);
        case DomainKind::polytope_boundary: {
            BiasEstimate est = pbe_boundary(unit, fs);
            est.domain = domain;
            return est;
        }
        default:
            throw infeasible_error("PBE supports sphere, ball, donut, nonneg_ball, "
                                   "ball_complement and boundary domains");
    }
}

int cmd_certify(const CommonArgs& args) {
    using namespace relucert;
    Frame frame = load_frame(args.frame_path);
    Bias given = load_bias(args.bias_path, frame);
    Normalized unit = normalize(frame, given);
    DomainSpec domain = parse_domain(args.domain_text, frame.n, &frame);

    BiasEstimate est;
    try {
        est = run_estimate(args, unit.frame, unit.norms, domain);
    } catch (const infeasible_error& e) {
        std::string msg(e.what());
        if (msg.find("omnidirectional") != std::string::npos)
            msg += "\nhint: append the negative normalized mean (make_omnidirectional) "
                   "or use --method sample";
        if (msg.find("full-spark") != std::string::npos)
            msg += "\nhint: PBE (--method pbe) has no full-spark requirement";
        throw infeasible_error(msg);
    }
    if (!est.domain) est.domain = domain;
    Certificate cert = certify(unit.frame, unit.bias, est);
    emit(args.out_path, certificate_to_json(cert, frame, given));
    return 0;
}

int cmd_estimate_bias(const CommonArgs& args) {
    using namespace relucert;
    Frame frame = load_frame(args.frame_path);
    Normalized unit = normalize(frame, Bias(static_cast<std::size_t>(frame.m), 0.0));
    DomainSpec domain = parse_domain(args.domain_text, frame.n, &frame);
    BiasEstimate est = run_estimate(args, unit.frame, unit.norms, domain);
    emit(args.out_path, bias_estimate_to_json(est));
    if (!args.out_path.empty() && args.out_path != "-") {
        // Companion CSV next to the JSON.
        write_bias_csv(args.out_path + ".csv", est.values);
    }
    return 0;
}

int cmd_reconstruct(const CommonArgs& args, const std::string& outputs_path) {
    using namespace relucert;
    Frame frame = load_frame(args.frame_path);
    Bias bias = load_bias(args.bias_path, frame);
    Points outputs = read_points_csv(outputs_path);
    std::ostringstream os;
    os << "# x_1..x_n,residual,status\n";
    for (std::size_t i = 0; i < outputs.count; ++i) {
        auto z = outputs.point(i);
        if (static_cast<int>(z.size()) != frame.m) {
            os << "error: row " << (i + 1) << " has " << z.size() << " columns, expected "
               << frame.m << "\n";
            continue;
        }
        ReconstructionResult res = reconstruct(frame, bias, z);
        if (!res.ok) {
            os << "not_invertible\n";
            continue;
        }
        for (std::size_t j = 0; j < res.x.size(); ++j) os << (j ? "," : "") << res.x[j];
        os << "," << res.residual << "," << (res.ambiguous_zeros ? "ambiguous" : "ok") << "\n";
    }
    emit(args.out_path, os.str());
    return 0;
}

int cmd_bounds(const CommonArgs& args) {
    using namespace relucert;
    Frame frame = load_frame(args.frame_path);
    Bias bias = load_bias(args.bias_path, frame);
    DomainSpec domain = parse_domain(args.domain_text, frame.n, &frame);
    SampleSequence seq = sample(domain, args.n_samples, args.seed);
    StabilityReport rep = relu_frame_bounds(frame, bias, seq.points);
    emit(args.out_path, stability_report_to_json(rep));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ReLU-layer injectivity certification via alpha-rectifying frames"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string outputs_path;

    auto add_common = [&args](CLI::App* cmd, bool needs_domain) {
        cmd->add_option("--frame", args.frame_path,
                        "frame CSV (rows = weight vectors) or builtin:<name>")
            ->required();
        cmd->add_option("--bias", args.bias_path, "bias file (CSV column or JSON array) or const:<v>");
        if (needs_domain)
            cmd->add_option("--domain", args.domain_text, "domain: JSON or shorthand (ball:1.0)")
                ->required();
        cmd->add_option("--method", args.method, "estimation method: sample | pbe");
        cmd->add_option("--n-samples", args.n_samples, "sample count for Monte-Carlo paths");
        cmd->add_option("--seed", args.seed, "RNG seed");
        cmd->add_option("--correction-factor", args.correction_factor,
                        "covering-radius correction factor");
        cmd->add_option("--out", args.out_path, "output path (default stdout)");
        cmd->add_option("--tol-rank", args.tol_rank, "numerical-rank tolerance scale");
        cmd->add_option("--tol-face", args.tol_face, "facet coplanarity tolerance");
        cmd->add_option("--facets-out", args.facets_out,
                        "write the facet structure as JSON (PBE methods)");
    };

    CLI::App* certify = app.add_subcommand("certify", "certify injectivity of a ReLU layer");
    add_common(certify, true);

    CLI::App* estimate = app.add_subcommand("estimate-bias", "estimate a maximal bias");
    add_common(estimate, true);

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "reconstruct inputs from outputs");
    add_common(reconstruct, false);
    reconstruct->add_option("--outputs", outputs_path, "CSV of layer outputs, one per row")
        ->required();

    CLI::App* bounds = app.add_subcommand("bounds", "empirical ReLU-frame bounds");
    add_common(bounds, true);

    std::string duals_frame, duals_subset, duals_out;
    CLI::App* duals = app.add_subcommand("duals", "export canonical dual vectors as CSV");
    duals->add_option("--frame", duals_frame, "frame CSV or builtin:<name>")->required();
    duals->add_option("--subset", duals_subset, "comma-separated indices (default: all)");
    duals->add_option("--out", duals_out, "output path (default stdout)");

    CLI::App* experiment = app.add_subcommand("experiment", "paper-style experiments");
    experiment->require_subcommand(1);

    relucert::EvolutionConfig evo;
    CLI::App* evolution = experiment->add_subcommand("evolution", "injectivity over iterations");
    evolution->add_option("--n", evo.n, "dimension");
    evolution->add_option("--q", evo.q, "redundancy m/n");
    evolution->add_option("--trials", evo.trials, "independent trials");
    evolution->add_option("--iterations", evo.max_iterations, "min-update iterations");
    evolution->add_option("--test-points", evo.test_points, "test sequence size");
    evolution->add_option("--seed", evo.seed, "RNG seed");
    std::string evo_out;
    evolution->add_option("--out", evo_out, "output CSV path");

    relucert::TransitionConfig trans;
    bool paper_scale = false;
    CLI::App* transition = experiment->add_subcommand("transition", "redundancy transition heatmap");
    transition->add_option("--n", trans.n_values, "dimensions (repeatable)");
    transition->add_option("--q-max", trans.q_max, "maximal redundancy");
    transition->add_option("--m-step", trans.m_step, "m grid step (0: n/2)");
    transition->add_option("--n-samples", trans.n_samples, "samples per cell");
    transition->add_option("--trials", trans.trials, "trials per cell");
    transition->add_option("--sigma2", trans.sigma2, "bias variances (repeatable)");
    transition->add_option("--correction-factor", trans.correction_factor, "correction factor");
    transition->add_option("--seed", trans.seed, "RNG seed");
    transition->add_flag("--paper-scale", paper_scale,
                         "full grid 2<=n<=30, m<=150, N=5e5 (slow)");
    std::string trans_out;
    transition->add_option("--out", trans_out, "output CSV path");

    relucert::MaxbiasConfig maxb;
    CLI::App* maxbias = experiment->add_subcommand("maxbias", "sampling vs PBE on the tetrahedron");
    maxbias->add_option("--iterations", maxb.iterations, "sampling iterations");
    maxbias->add_option("--seed", maxb.seed, "RNG seed");
    std::string maxb_out;
    maxbias->add_option("--out", maxb_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (certify->parsed()) return cmd_certify(args);
        if (estimate->parsed()) return cmd_estimate_bias(args);
        if (reconstruct->parsed()) return cmd_reconstruct(args, outputs_path);
        if (bounds->parsed()) return cmd_bounds(args);
        if (duals->parsed()) {
            relucert::Frame frame = load_frame(duals_frame);
            relucert::IndexSet subset;
            if (duals_subset.empty()) {
                for (int i = 0; i < frame.m; ++i) subset.push_back(i);
            } else {
                std::stringstream ss(duals_subset);
                std::string tok;
                while (std::getline(ss, tok, ',')) subset.push_back(std::stoi(tok));
                std::sort(subset.begin(), subset.end());
            }
            relucert::DualSynthesis dual = relucert::canonical_dual(frame, subset);
            std::ostringstream os;
            for (int i = 0; i < dual.duals.rows; ++i) {
                auto row = dual.duals.row(i);
                for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j];
                os << "\n";
            }
            emit(duals_out, os.str());
            return 0;
        }
        if (evolution->parsed()) {
            relucert::EvolutionResult result = relucert::experiment_evolution(evo);
            emit(evo_out, relucert::evolution_csv(result));
            return 0;
        }
        if (transition->parsed()) {
            if (paper_scale) {
                trans.n_values.clear();
                for (int n = 2; n <= 30; ++n) trans.n_values.push_back(n);
                trans.q_max = 150.0;
                trans.m_max_abs = 150;
                trans.m_step = 1;
                trans.n_samples = 500000;
            }
            auto cells = relucert::experiment_transition(trans);
            emit(trans_out, relucert::transition_csv(cells));
            return 0;
        }
        if (maxbias->parsed()) {
            relucert::MaxbiasResult result = relucert::experiment_maxbias(maxb);
            emit(maxb_out, relucert::maxbias_csv(result));
            return 0;
        }
    } catch (const relucert::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const relucert::infeasible_error& e) {
        std::cerr << "method infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const relucert::numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
