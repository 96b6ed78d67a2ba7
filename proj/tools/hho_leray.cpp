// hho-leray: convergence studies, the acceptance suite and mesh inspection.

#include "hho/hho.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

int
cmd_run(const hho::RunConfig& cfg, const std::string& out_dir)
{
    const auto results = hho::run_study(cfg);

    std::ostringstream csv;
    hho::write_csv(csv, results, cfg.deterministic);
    const std::string table = hho::emit_table(results);

    if (out_dir.empty()) {
        std::cout << csv.str();
    } else {
        std::filesystem::create_directories(out_dir);
        const auto base = std::filesystem::path(out_dir) / cfg.case_name;
        std::ofstream(base.string() + ".csv") << csv.str();
        std::ofstream(base.string() + ".md") << table;
        std::cout << table;
    }

    for (const auto& s : results)
        if (!s.ok()) {
            std::cerr << "hho-leray: study " << s.case_name << " p=" << s.p << " k=" << s.k
                      << " failed at " << *s.failure << '\n';
            return 1;
        }
    return 0;
}

int
cmd_accept(const hho::AcceptanceOptions& opts)
{
    const auto rs = hho::run_acceptance(opts, [](const hho::CriterionResult& c) {
        std::cout << hho::format_result(c) << std::endl;
    });
    const bool ok = hho::all_passed(rs);
    std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: FAILED") << '\n';
    return ok ? 0 : 1;
}

int
cmd_mesh_info(const std::string& path)
{
    const hho::Mesh mesh = hho::load_mesh(path);
    const hho::MeshStats s = hho::mesh_stats(mesh);
    std::printf("elements            %zu\n", s.num_elements);
    std::printf("faces               %zu (%zu boundary, %zu internal)\n", s.num_faces, s.num_boundary_faces,
                s.num_faces - s.num_boundary_faces);
    std::printf("vertices            %zu\n", mesh.vertices().size());
    std::printf("h                   %.6g\n", s.h);
    std::printf("element diameter    %.6g .. %.6g\n", s.min_element_diameter, s.max_element_diameter);
    std::printf("min angle (deg)     %.6g\n", s.min_angle_deg);
    std::printf("h_F / h_T           %.6g .. %.6g\n", s.min_face_element_ratio, s.max_face_element_ratio);
    double area = 0.0;
    for (const auto& el : mesh.elements())
        area += el.area;
    std::printf("total area          %.12g\n", area);
    return 0;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"Hybrid High-Order solver for degenerate Leray-Lions problems"};
    app.require_subcommand(1);

    hho::RunConfig cfg;
    std::string out_dir;
    std::string solver = "direct";
    auto* run = app.add_subcommand("run", "convergence study over mesh sizes for one case");
    run->add_option("--case", cfg.case_name, "nondeg-flux, nondeg-potential, nondeg-couple or degenerate")->required();
    run->add_option("--p", cfg.p, "flux exponents in (1, 2]")->required()->delimiter(',');
    run->add_option("--k", cfg.k, "polynomial degrees")->required()->delimiter(',');
    run->add_option("--n", cfg.n, "cells per side, ascending")->required()->delimiter(',');
    run->add_option("--delta", cfg.delta, "degeneracy parameter of nondeg-flux")->capture_default_str();
    run->add_option("--quad-degree", cfg.quad_degree, "quadrature degree for nonlinear integrands");
    run->add_option("--tol", cfg.newton.tolerance, "relative Newton residual tolerance")->capture_default_str();
    run->add_option("--max-iter", cfg.newton.max_iterations, "Newton iteration cap")->capture_default_str();
    run->add_option("--linear-solver", solver, "direct or cg")
        ->check(CLI::IsMember({"direct", "cg"}))
        ->capture_default_str();
    run->add_option("--out", out_dir, "directory for <case>.csv and <case>.md; CSV goes to stdout otherwise");
    run->add_flag("--deterministic", cfg.deterministic, "write wall_ms as 0");

    hho::AcceptanceOptions aopts;
    auto* acc = app.add_subcommand("accept", "run the acceptance suite");
    acc->add_flag("--smoke", aopts.smoke, "mesh sizes n <= 16 only");
    acc->add_option("--quad-degree", aopts.quad_degree, "quadrature degree for the rate studies");

    std::string mesh_path;
    auto* info = app.add_subcommand("mesh-info", "print statistics of a mesh file");
    info->add_option("file", mesh_path, "mesh file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            cfg.newton.linear_solver = solver == "cg" ? hho::LinearSolver::cg : hho::LinearSolver::direct;
            return cmd_run(cfg, out_dir);
        }
        if (*acc)
            return cmd_accept(aopts);
        if (*info)
            return cmd_mesh_info(mesh_path);
    } catch (const hho::MeshParseError& e) {
        std::cerr << "hho-leray: " << mesh_path << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hho-leray: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
