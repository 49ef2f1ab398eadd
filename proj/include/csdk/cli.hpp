#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "csdk/csd.hpp"

// Drivers behind the csdk command-line tool. They return process exit codes.
namespace csdk::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_rejected = 2;
inline constexpr int exit_parse = 3;

enum class Format { table, csv, jsonl };

struct ComputeConfig {
  std::string input;
  index_t m1 = 0;
  CsdOptions options;
  std::string out_prefix;
  Format format = Format::table;
};

struct BenchConfig {
  std::vector<int> classes{1, 2, 3, 4};
  bool noisy = false;
  std::vector<index_t> sizes{30, 42, 60, 85, 120};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  PolarMethod method = PolarMethod::qdwh;
  Format format = Format::table;
};

int run_compute(const ComputeConfig& cfg, std::ostream& out, std::ostream& err);
int run_bench(const BenchConfig& cfg, std::ostream& out, std::ostream& err);
int run_selftest(std::ostream& out);

/// "1..5", "1,3,8" or a mix such as "1..3,7". Throws ParseError.
std::vector<std::uint64_t> parse_seeds(const std::string& spec);
/// Comma-separated integers. Throws ParseError.
std::vector<long long> parse_int_list(const std::string& spec);

PolarMethod parse_method(const std::string& s);
RankMode parse_rank_mode(const std::string& s);
CsExtraction parse_cs_extraction(const std::string& s);
Format parse_format(const std::string& s);

/// Caps the OpenMP runtime at the CSDK_THREADS limit the kernels already honour.
void apply_thread_env();

}  // namespace csdk::cli
