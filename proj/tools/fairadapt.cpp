// fairadapt: adapt a black-box score or embedding to a minimax-fair
// classifier from per-sub-population second-order statistics, evaluate it,
// and exactly solve small finite instances.
//
// Exit codes: 0 ok, 2 parse error, 3 I/O error, 4 precondition violated,
// 5 algorithmic infeasibility (non-separable instance).

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rawls/eval.hpp"
#include "rawls/fat.hpp"
#include "rawls/flat.hpp"
#include "rawls/io.hpp"
#include "rawls/moments.hpp"
#include "rawls/oracle.hpp"
#include "rawls/stats.hpp"
#include "rawls/synth.hpp"
#include "rawls/types.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kParse = 2;
constexpr int kIo = 3;
constexpr int kPrecondition = 4;
constexpr int kInfeasible = 5;

int cmd_synth(const std::string& preset_name, std::uint64_t seed,
              const std::string& out) {
    rawls::synth::SynthSpec spec;
    try {
        spec = rawls::synth::preset(preset_name);
    } catch (const std::invalid_argument& ex) {
        throw rawls::io::ParseError(ex.what());  // bad preset name is a parse error
    }
    spec.seed = seed;
    auto data = rawls::synth::generate(spec);
    rawls::io::write_dataset_csv(data, out);
    std::cout << "wrote " << data.rows.size() << " rows to " << out << "\n";
    return kOk;
}

int cmd_stats(const std::string& in, const std::string& mode, const std::string& out) {
    auto data = rawls::io::read_dataset_csv(in);
    rawls::stats::MomentMode m;
    if (mode == "full") {
        m = rawls::stats::MomentMode::full;
    } else if (mode == "spherical") {
        m = rawls::stats::MomentMode::spherical;
    } else if (mode == "score") {
        if (data.d != 1)
            throw rawls::io::ParseError("score mode requires 1 feature column, got " +
                                        std::to_string(data.d));
        m = rawls::stats::MomentMode::score;
    } else {
        throw rawls::io::ParseError("mode must be full, spherical or score");
    }
    auto table = rawls::stats::estimate_moments(data, m);
    rawls::io::write_json_file(rawls::io::stats_to_json(table), out);
    std::cout << "estimated moments for " << 2 * table.p << " sub-populations (d="
              << table.d << ")\n";
    return kOk;
}

int cmd_fat(const std::string& stats_path, const std::string& out) {
    auto table = rawls::io::stats_from_json(rawls::io::read_json_file(stats_path));
    auto res = rawls::fat::fat_adapt(table);
    rawls::ScoreThresholdModel model;
    model.b = res.b_star;
    model.guarantee = rawls::Guarantee{res.r_star, res.j_star};
    rawls::io::write_json_file(rawls::io::model_to_json(model, "fat"), out);
    std::cout << "r_star=" << rawls::io::format_double(res.r_star)
              << " j_star=" << res.j_star << "\n";
    if (res.high_error_warning)
        std::cerr << "warning: certified worst-case error is >= 0.5\n";
    return kOk;
}

int cmd_flat(const std::string& stats_path, const std::string& mode, double tol,
             const std::string& out) {
    auto table = rawls::io::stats_from_json(rawls::io::read_json_file(stats_path));
    rawls::flat::FlatResult res;
    std::string method;
    if (mode == "spherical") {
        res = rawls::flat::solve_flat_spherical(table);
        method = "flat1";
    } else if (mode == "general") {
        res = rawls::flat::solve_flat_general(table, tol);
        method = "flat2";
    } else {
        throw rawls::io::ParseError("mode must be spherical or general");
    }
    rawls::LinearThresholdModel model;
    model.w = res.w_star;
    model.b = res.b_star;
    model.guarantee = rawls::Guarantee{res.r_star, res.j_star};
    rawls::io::write_json_file(rawls::io::model_to_json(model, method), out);
    std::cout << "r_star=" << rawls::io::format_double(res.r_star)
              << " j_star=" << res.j_star << "\n";
    return kOk;
}

int cmd_eval(const std::string& in, const std::string& model_path,
             const std::string& out) {
    auto data = rawls::io::read_dataset_csv(in);
    auto [model, method] = rawls::io::model_from_json(rawls::io::read_json_file(model_path));
    auto report = rawls::eval::evaluate(data, model);
    auto j = rawls::io::report_to_json(report);
    j["method"] = method;
    rawls::io::write_json_file(j, out);
    std::cout << "max_error=" << rawls::io::format_double(report.max_error)
              << " accuracy=" << rawls::io::format_double(report.accuracy) << "\n";
    return kOk;
}

int cmd_oracle(const std::string& dist_path, const std::string& out) {
    auto dist = rawls::io::distribution_from_json(rawls::io::read_json_file(dist_path));
    auto result = rawls::oracle::brute_force_rawls(dist);

    json optima = json::array();
    for (const auto& f : result.optima) {
        json assignment;
        for (const auto& [pt, label] : f.assignment) assignment[pt] = label;
        optima.push_back(assignment);
    }
    json argmax_sets = json::array();
    for (const auto& s : result.argmax_sets) {
        json ids = json::array();
        for (const auto& id : s) ids.push_back({{"y", id.label}, {"z", id.group}});
        argmax_sets.push_back(ids);
    }
    json dual_check = nullptr;
    if (2 * dist.p <= 4) {
        int resolution = dist.p == 1 ? 2000 : 100;
        auto grid = rawls::oracle::dual_grid_maximize(dist, resolution);
        dual_check = {{"value", grid.value},
                      {"gap", result.r_star - grid.value},
                      {"resolution", resolution}};
    }
    json j = {{"tool_version", rawls::io::kToolVersion},
              {"r_star", result.r_star},
              {"optima", optima},
              {"argmax_sets", argmax_sets},
              {"truncated", result.truncated},
              {"dual_value_check", dual_check}};
    rawls::io::write_json_file(j, out);
    std::cout << "r_star=" << rawls::io::format_double(result.r_star) << " optima="
              << result.optima.size() << (result.truncated ? "+ (truncated)" : "")
              << "\n";
    return kOk;
}

int cmd_boundary(const std::string& model_path, const std::string& bbox, int res,
                 const std::string& out) {
    auto [model, method] = rawls::io::model_from_json(rawls::io::read_json_file(model_path));
    (void)method;
    if (!std::holds_alternative<rawls::LinearThresholdModel>(model))
        throw std::invalid_argument("boundary requires a linear model");

    double coords[4];
    std::stringstream ss(bbox);
    std::string cell;
    int k = 0;
    while (std::getline(ss, cell, ',')) {
        if (k >= 4) throw rawls::io::ParseError("bbox must be xmin,ymin,xmax,ymax");
        try {
            std::size_t used = 0;
            coords[k] = std::stod(cell, &used);
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw rawls::io::ParseError("bbox: bad number '" + cell + "'");
        }
        ++k;
    }
    if (k != 4) throw rawls::io::ParseError("bbox must be xmin,ymin,xmax,ymax");

    auto grid = rawls::eval::boundary_grid(std::get<rawls::LinearThresholdModel>(model),
                                           coords[0], coords[1], coords[2], coords[3], res);
    std::ostringstream text;
    text << "x,y,label\n";
    for (const auto& pt : grid)
        text << rawls::io::format_double(pt.x) << "," << rawls::io::format_double(pt.y)
             << "," << pt.label << "\n";
    rawls::io::write_text_file(text.str(), out);
    std::cout << "wrote " << grid.size() << " grid points to " << out << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rawlsian fair adaptation of black-box classifiers"};
    app.require_subcommand(1);

    std::string preset_name, in, out, mode, stats_path, model_path, dist_path, bbox;
    std::uint64_t seed = 0;
    double tol = 1e-6;
    int res = 0;

    auto* synth = app.add_subcommand("synth", "generate a benchmark dataset CSV");
    synth->add_option("--preset", preset_name, "synthetic1 or synthetic2")->required();
    synth->add_option("--seed", seed, "RNG seed")->required();
    synth->add_option("--out", out, "output CSV path")->required();

    auto* stats = app.add_subcommand("stats", "estimate sub-population moments");
    stats->add_option("--in", in, "dataset CSV")->required();
    stats->add_option("--mode", mode, "full, spherical or score")->required();
    stats->add_option("--out", out, "output stats JSON")->required();

    auto* fat = app.add_subcommand("fat", "robust threshold from 1-D score stats");
    fat->add_option("--stats", stats_path, "stats JSON (d=1)")->required();
    fat->add_option("--out", out, "output model JSON")->required();

    auto* flat = app.add_subcommand("flat", "minimax-fair linear head from stats");
    flat->add_option("--stats", stats_path, "stats JSON")->required();
    flat->add_option("--mode", mode, "spherical or general")->required();
    flat->add_option("--tol", tol, "kappa tolerance (general mode)");
    flat->add_option("--out", out, "output model JSON")->required();

    auto* evalc = app.add_subcommand("eval", "evaluate a model on labeled data");
    evalc->add_option("--in", in, "dataset CSV")->required();
    evalc->add_option("--model", model_path, "model JSON")->required();
    evalc->add_option("--out", out, "output report JSON")->required();

    auto* oraclec = app.add_subcommand("oracle", "exact Rawls optimum on a finite pmf");
    oraclec->add_option("--dist", dist_path, "distribution JSON")->required();
    oraclec->add_option("--out", out, "output JSON")->required();

    auto* boundary = app.add_subcommand("boundary", "decision-boundary grid CSV");
    boundary->add_option("--model", model_path, "linear model JSON")->required();
    boundary->add_option("--bbox", bbox, "xmin,ymin,xmax,ymax")->required();
    boundary->add_option("--res", res, "grid resolution per axis")->required();
    boundary->add_option("--out", out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kParse;
    }

    try {
        if (synth->parsed()) return cmd_synth(preset_name, seed, out);
        if (stats->parsed()) return cmd_stats(in, mode, out);
        if (fat->parsed()) return cmd_fat(stats_path, out);
        if (flat->parsed()) return cmd_flat(stats_path, mode, tol, out);
        if (evalc->parsed()) return cmd_eval(in, model_path, out);
        if (oraclec->parsed()) return cmd_oracle(dist_path, out);
        if (boundary->parsed()) return cmd_boundary(model_path, bbox, res, out);
    } catch (const rawls::NonSeparableError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kInfeasible;
    } catch (const rawls::io::ParseError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kParse;
    } catch (const rawls::io::IoError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kIo;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kPrecondition;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kPrecondition;
    }
    return kOk;
}
