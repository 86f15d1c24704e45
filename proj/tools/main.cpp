// emdtn: pseudodifferential symbol expansion of the electromagnetic
// Dirichlet-to-Neumann map and boundary-jet reconstruction by layer
// stripping.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Electromagnetic Dirichlet-to-Neumann symbol calculus"};
    app.require_subcommand(1);

    emdtn::VerifyOptions vopt;
    vopt.tol = emdtn::default_tolerance(1e-9);
    auto* verify = app.add_subcommand("verify", "run the identity suites on a scenario");
    verify->add_option("--scenario", vopt.scenario_path, "scenario file")->required();
    int vdepth = -1;
    verify->add_option("--depth", vdepth, "number of symbol degree slots");
    verify->add_option("--tol", vopt.tol, "residual tolerance");
    verify->add_option("--jobs", vopt.jobs, "data-parallel worker threads");
    verify->add_option("--json", vopt.json_path, "write a machine-readable report");

    emdtn::SymbolsOptions sopt;
    auto* symbols = app.add_subcommand("symbols", "compute the DtN symbol table psi");
    symbols->add_option("--scenario", sopt.scenario_path, "scenario file")->required();
    int sdepth = -1;
    symbols->add_option("--depth", sdepth, "number of symbol degree slots");
    symbols->add_option("--out", sopt.out_path, "output symbol table")->required();

    emdtn::ApplyOptions aopt;
    auto* apply = app.add_subcommand("apply", "apply the DtN map to a boundary field grid");
    apply->add_option("--scenario", aopt.scenario_path, "scenario file")->required();
    apply->add_option("--field", aopt.field_in, "input field grid")->required();
    apply->add_option("--out", aopt.field_out, "output field grid")->required();
    int adepth = -1;
    apply->add_option("--depth", adepth, "number of symbol degree slots");
    apply->add_option("--frame", aopt.frame, "input frame: pnu (p(nu x E)) or e (tangential E)");
    apply->add_option("--jobs", aopt.jobs, "data-parallel worker threads");

    emdtn::ReconstructOptions ropt;
    ropt.tol = emdtn::default_tolerance(1e-6);
    auto* reconstruct = app.add_subcommand("reconstruct", "layer-strip boundary jets from a symbol table");
    reconstruct->add_option("--symbols", ropt.symbols_path, "measured symbol table")->required();
    reconstruct->add_option("--mode", ropt.mode, "metric or parameter")->required();
    reconstruct->add_option("--known", ropt.known_path, "scenario supplying the complementary jets")->required();
    reconstruct->add_option("--out", ropt.out_path, "write the recovered scenario here");
    reconstruct->add_option("--tol", ropt.tol, "forward-mismatch tolerance");
    reconstruct->add_option("--jobs", ropt.jobs, "data-parallel worker threads");
    reconstruct->add_option("--json", ropt.json_path, "write a machine-readable report");

    emdtn::RoundtripOptions topt;
    topt.tol = emdtn::default_tolerance(1e-7);
    auto* roundtrip = app.add_subcommand("roundtrip", "random scenario -> symbols -> reconstruct -> diff");
    roundtrip->add_option("--seed", topt.seed, "scenario seed");
    roundtrip->add_option("--order", topt.order, "jet truncation order N");
    roundtrip->add_option("--depth", topt.depth, "number of symbol degree slots");
    roundtrip->add_option("--tol", topt.tol, "per-order tolerance");
    roundtrip->add_option("--jobs", topt.jobs, "data-parallel worker threads");
    roundtrip->add_option("--json", topt.json_path, "write a machine-readable report");

    CLI11_PARSE(app, argc, argv);

    if (verify->parsed()) {
        if (vdepth > 0) vopt.depth = vdepth;
        return emdtn::cmd_verify(vopt, std::cout);
    }
    if (symbols->parsed()) {
        if (sdepth > 0) sopt.depth = sdepth;
        return emdtn::cmd_symbols(sopt, std::cout);
    }
    if (apply->parsed()) {
        if (adepth > 0) aopt.depth = adepth;
        return emdtn::cmd_apply(aopt, std::cout);
    }
    if (reconstruct->parsed()) return emdtn::cmd_reconstruct(ropt, std::cout);
    if (roundtrip->parsed()) return emdtn::cmd_roundtrip(topt, std::cout);
    return 2;
}
