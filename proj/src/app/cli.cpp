#include "csdk/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

#include "csdk/acceptance.hpp"
#include "csdk/config.hpp"
#include "csdk/errors.hpp"
#include "csdk/io.hpp"
#include "csdk/isometry.hpp"
#include "csdk/testgen.hpp"

namespace csdk::cli {
namespace {

using json = nlohmann::ordered_json;

long long parse_integer(const std::string& tok) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("bad integer '" + tok + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

// One record as ordered (key, value) pairs, rendered in any of the formats.
void emit_records(std::ostream& out, Format format, const std::vector<json>& rows) {
  if (rows.empty()) return;
  const auto text = [](const json& v) {
    if (v.is_number_float()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4g", v.get<double>());
      return std::string(buf);
    }
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  switch (format) {
    case Format::jsonl:
      for (const auto& r : rows) out << r.dump() << '\n';
      break;
    case Format::csv: {
      bool first = true;
      for (const auto& [k, v] : rows.front().items()) {
        out << (first ? "" : ",") << k;
        first = false;
      }
      out << '\n';
      for (const auto& r : rows) {
        first = true;
        for (const auto& [k, v] : r.items()) {
          out << (first ? "" : ",") << (v.is_number_float() ? io::format_double(v.get<double>()) : text(v));
          first = false;
        }
        out << '\n';
      }
      break;
    }
    case Format::table: {
      std::vector<std::size_t> width;
      for (const auto& [k, v] : rows.front().items()) width.push_back(k.size());
      for (const auto& r : rows) {
        std::size_t i = 0;
        for (const auto& [k, v] : r.items()) width[i] = std::max(width[i], text(v).size()), ++i;
      }
      std::size_t i = 0;
      for (const auto& [k, v] : rows.front().items()) out << std::setw(static_cast<int>(width[i++]) + 2) << k;
      out << '\n';
      for (const auto& r : rows) {
        i = 0;
        for (const auto& [k, v] : r.items()) out << std::setw(static_cast<int>(width[i++]) + 2) << text(v);
        out << '\n';
      }
      break;
    }
  }
}

json report_record(const StabilityReport& rep, const CsdResult& r) {
  json j;
  j["n"] = rep.n;
  j["k"] = rep.k;
  j["rank"] = r.rank;
  j["branch"] = to_string(r.branch);
  j["residual"] = rep.residual_2norm;
  j["d_of_a"] = rep.d_of_a;
  j["scaled_residual"] = rep.scaled_residual;
  j["orth_u1"] = rep.orth_u1;
  j["orth_u2"] = rep.orth_u2;
  j["orth_v1"] = rep.orth_v1;
  j["cs_identity_err"] = rep.cs_identity_err;
  return j;
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : split(spec, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      const long long v = parse_integer(part);
      if (v < 0) throw ParseError("negative seed '" + part + "'");
      seeds.push_back(static_cast<std::uint64_t>(v));
      continue;
    }
    const long long lo = parse_integer(part.substr(0, dots));
    const long long hi = parse_integer(part.substr(dots + 2));
    if (lo < 0 || hi < lo) throw ParseError("bad seed range '" + part + "'");
    for (long long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (seeds.empty()) throw ParseError("empty seed list");
  return seeds;
}

std::vector<long long> parse_int_list(const std::string& spec) {
  std::vector<long long> v;
  for (const auto& part : split(spec, ',')) v.push_back(parse_integer(part));
  if (v.empty()) throw ParseError("empty list");
  return v;
}

PolarMethod parse_method(const std::string& s) {
  if (s == "svd") return PolarMethod::svd;
  if (s == "qdwh") return PolarMethod::qdwh;
  if (s == "zolo") return PolarMethod::zolo;
  throw ParseError("unknown method '" + s + "'");
}

RankMode parse_rank_mode(const std::string& s) {
  if (s == "full") return RankMode::full;
  if (s == "deficient") return RankMode::deficient;
  if (s == "auto") return RankMode::automatic;
  throw ParseError("unknown rank mode '" + s + "'");
}

CsExtraction parse_cs_extraction(const std::string& s) {
  if (s == "diag") return CsExtraction::diag_projection;
  if (s == "lambda") return CsExtraction::from_lambda;
  throw ParseError("unknown cs extraction '" + s + "'");
}

Format parse_format(const std::string& s) {
  if (s == "table") return Format::table;
  if (s == "csv") return Format::csv;
  if (s == "jsonl") return Format::jsonl;
  throw ParseError("unknown format '" + s + "'");
}

void apply_thread_env() {
#ifdef _OPENMP
  omp_set_num_threads(thread_limit());
#endif
}

int run_compute(const ComputeConfig& cfg, std::ostream& out, std::ostream& err) {
  Matrix a;
  try {
    a = io::read_matrix_file(cfg.input);
  } catch (const ParseError& e) {
    err << "error: " << cfg.input << ": " << e.what() << '\n';
    return exit_parse;
  }
  CsdResult r;
  try {
    r = csd(a, cfg.m1, cfg.options);
  } catch (const InputRejected& e) {
    err << "rejected: " << e.what() << '\n';
    return exit_rejected;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_internal;
  }
  try {
    const std::string& p = cfg.out_prefix;
    io::write_cmat_file(p + ".u1.cmat", r.u1);
    io::write_cmat_file(p + ".u2.cmat", r.u2);
    io::write_cmat_file(p + ".v1.cmat", r.v1);
    io::write_cmat_file(p + ".c.cmat", Matrix::diagonal(r.c), io::Field::real);
    io::write_cmat_file(p + ".s.cmat", Matrix::diagonal(r.s), io::Field::real);
    io::write_cmat_file(p + ".theta.cmat", io::column(r.theta), io::Field::real);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_parse;
  }
  emit_records(out, cfg.format, {report_record(stability_report(a, r), r)});
  return exit_ok;
}

int run_bench(const BenchConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<json> rows;
  int status = exit_ok;
  for (const int cls : cfg.classes) {
    if (cls < 1 || cls > 4) {
      err << "error: test class must be in 1..4, got " << cls << '\n';
      return exit_internal;
    }
    for (const index_t n : cfg.sizes) {
      // Worst case over the seeds, one row per (class, n).
      json row;
      row["class"] = std::to_string(cls) + (cfg.noisy ? "'" : "");
      row["n"] = n;
      row["method"] = to_string(cfg.method);
      index_t k = -1;
      double d = 0.0, res = 0.0, o1 = 0.0, o2 = 0.0, ov = 0.0, secs = 0.0;
      std::string failure;
      for (const auto seed : cfg.seeds) {
        const testgen::TestCase tc{cls, cfg.noisy, n, seed};
        const Matrix a = testgen::generate(tc);
        CsdOptions opts;
        opts.polar_method = cfg.method;
        try {
          const auto t0 = std::chrono::steady_clock::now();
          const CsdResult r = csd(a, n, opts);
          secs += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          const auto rep = stability_report(a, r);
          k = std::max(k, rep.k);
          d = std::max(d, rep.d_of_a);
          res = std::max(res, rep.scaled_residual);
          o1 = std::max(o1, rep.orth_u1);
          o2 = std::max(o2, rep.orth_u2);
          ov = std::max(ov, rep.orth_v1);
        } catch (const std::exception& e) {
          failure = e.what();
          status = exit_internal;
        }
      }
      row["k"] = k;
      row["d_of_a"] = d;
      row["scaled_residual"] = res;
      row["orth_u1"] = o1;
      row["orth_u2"] = o2;
      row["orth_v1"] = ov;
      row["seconds"] = secs / static_cast<double>(cfg.seeds.size());
      row["status"] = failure.empty() ? "ok" : failure;
      rows.push_back(std::move(row));
    }
  }
  emit_records(out, cfg.format, rows);
  return status;
}

int run_selftest(std::ostream& out) {
  const auto outcomes = acceptance::run_all(out);
  for (const auto& o : outcomes) {
    if (!o.pass) return exit_internal;
  }
  return exit_ok;
}

}  // namespace csdk::cli
