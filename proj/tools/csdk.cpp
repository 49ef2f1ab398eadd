#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "csdk/cli.hpp"
#include "csdk/errors.hpp"

using namespace csdk;

int main(int argc, char** argv) {
  CLI::App app{"CS decomposition via two polar decompositions and one Hermitian eigendecomposition"};
  app.require_subcommand(1);

  cli::ComputeConfig compute;
  std::string method = "qdwh", rank_mode = "auto", extraction = "diag", format = "table";
  bool no_postprocess = false;
  long long m1 = 0;
  auto* c = app.add_subcommand("compute", "Decompose a matrix read from a file");
  c->add_option("--input", compute.input, "Matrix file (cmat or MatrixMarket array)")->required();
  c->add_option("--m1", m1, "Rows in the top block")->required();
  c->add_option("--method", method, "Polar decomposition method")->check(CLI::IsMember({"svd", "qdwh", "zolo"}));
  c->add_option("--rank-mode", rank_mode, "Rank handling")->check(CLI::IsMember({"full", "deficient", "auto"}));
  c->add_option("--epsilon", compute.options.epsilon, "Interval threshold for ill-conditioned blocks");
  c->add_option("--cs-extraction", extraction, "How C and S are read off")->check(CLI::IsMember({"diag", "lambda"}));
  c->add_flag("--no-postprocess", no_postprocess, "Keep the raw projected diagonals");
  c->add_option("--out", compute.out_prefix, "Output prefix")->required();
  c->add_option("--format", format, "Report format")->check(CLI::IsMember({"table", "csv", "jsonl"}));

  cli::BenchConfig bench;
  std::string classes = "1,2,3,4", sizes = "30,42,60,85,120", seeds = "1..3";
  std::string bench_method = "qdwh", bench_format = "table";
  auto* b = app.add_subcommand("bench", "Residual and orthogonality table over generated test classes");
  b->add_option("--classes", classes, "Comma-separated test classes in 1..4");
  b->add_flag("--noisy", bench.noisy, "Perturb inputs by 1e-10 complex Gaussian noise");
  b->add_option("--sizes", sizes, "Comma-separated n values");
  b->add_option("--seeds", seeds, "Seeds, e.g. 1..5 or 1,4,9");
  b->add_option("--method", bench_method, "Polar decomposition method")->check(CLI::IsMember({"svd", "qdwh", "zolo"}));
  b->add_option("--format", bench_format, "Output format")->check(CLI::IsMember({"table", "csv", "jsonl"}));

  auto* s = app.add_subcommand("selftest", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::exit_parse;
  }

  cli::apply_thread_env();
  try {
    if (c->parsed()) {
      compute.m1 = static_cast<index_t>(m1);
      compute.options.polar_method = cli::parse_method(method);
      compute.options.rank_mode = cli::parse_rank_mode(rank_mode);
      compute.options.cs_extraction = cli::parse_cs_extraction(extraction);
      compute.options.postprocess = !no_postprocess;
      compute.format = cli::parse_format(format);
      return cli::run_compute(compute, std::cout, std::cerr);
    }
    if (b->parsed()) {
      bench.classes.clear();
      for (const long long v : cli::parse_int_list(classes)) bench.classes.push_back(static_cast<int>(v));
      bench.sizes.clear();
      for (const long long v : cli::parse_int_list(sizes)) bench.sizes.push_back(static_cast<index_t>(v));
      bench.seeds = cli::parse_seeds(seeds);
      bench.method = cli::parse_method(bench_method);
      bench.format = cli::parse_format(bench_format);
      return cli::run_bench(bench, std::cout, std::cerr);
    }
    if (s->parsed()) return cli::run_selftest(std::cout);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_parse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_internal;
  }
  return cli::exit_internal;
}
