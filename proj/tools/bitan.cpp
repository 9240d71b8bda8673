#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "bitan/cli/commands.hpp"

using namespace bitan;

int main(int argc, char** argv) {
    CLI::App app{"Bitangents of plane quartics and reconstruction from them"};
    app.require_subcommand(1);
    app.fallthrough();
    cli::Flags flags;
    app.add_option("--tol-geo", flags.tol.geo, "on-variety residual tolerance")->check(CLI::PositiveNumber);
    app.add_option("--tol-sq", flags.tol.sq, "square-certificate tolerance")->check(CLI::PositiveNumber);
    app.add_option("--tol-dup", flags.tol.dup, "distance below which two points coincide")->check(CLI::PositiveNumber);
    app.add_option("--threads", flags.threads, "worker threads for tuple detection")->check(CLI::PositiveNumber);
    app.add_option("-o,--output", flags.output, "output file (default: standard output)");

    std::string input, reference, precision = "standard";
    std::uint64_t seed = 1;
    double perturb = 0.0;
    cli::Family family = cli::Family::random;
    const std::map<std::string, cli::Family> families{
        {"fermat", cli::Family::fermat}, {"klein", cli::Family::klein}, {"random", cli::Family::random}};

    auto* bit = app.add_subcommand("bitangents", "the 28 certified bitangents of a quartic file");
    bit->add_option("input", input, "quartic file")->required();

    auto* rec = app.add_subcommand("reconstruct", "the quartic from a file of 28 lines");
    rec->add_option("input", input, "line-set file")->required();
    rec->add_option("--reference", reference, "quartic file to compare against");
    rec->add_option("--precision", precision, "standard or extended")->check(CLI::IsMember({"standard", "extended"}));

    auto* self = app.add_subcommand("selftest", "check the theta-characteristic model");

    auto* c9 = app.add_subcommand("complete9", "the last three points of a twelve-tuple from nine and one pair");
    c9->add_option("input", input, "file with 9 lines and marked_pair")->required();

    auto* gen = app.add_subcommand("gen", "emit a quartic file");
    auto* rt = app.add_subcommand("roundtrip", "gen, bitangents, reconstruct and compare");
    for (auto* sub : {gen, rt}) {
        sub->add_option("--family", family, "fermat, klein or random")->transform(CLI::CheckedTransformer(families));
        sub->add_option("--seed", seed, "seed for the random family");
        sub->add_option("--perturb", perturb, "relative size of seeded coefficient noise")->check(CLI::NonNegativeNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::schema;
    }
    try {
        flags.tol.validate();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::schema;
    }

    if (*bit) return cli::cmd_bitangents(input, flags, std::cout, std::cerr);
    if (*rec) return cli::cmd_reconstruct(input, reference, precision == "extended", flags, std::cout, std::cerr);
    if (*self) return cli::cmd_selftest(std::cout);
    if (*c9) return cli::cmd_complete9(input, flags, std::cout, std::cerr);
    if (*gen) return cli::cmd_gen(family, seed, perturb, flags, std::cout, std::cerr);
    return cli::cmd_roundtrip(family, seed, perturb, flags, std::cout, std::cerr);
}
