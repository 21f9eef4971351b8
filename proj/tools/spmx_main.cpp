#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spmx/gen.hpp"
#include "spmx/oracle.hpp"
#include "spmx/scan.hpp"
#include "spmx/spm.hpp"
#include "spmx/stream.hpp"
#include "spmx/ttree.hpp"

namespace {

using namespace spmx;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

void warn_dead_rules(const DtdTree& dtd, const XsltProgram& program) {
  const TransformationTree tree = build_ttree(dtd, program);
  for (const TemplateRule* rule : tree.dead_rules()) {
    std::cerr << "warning: rule match=\"" << rule->pattern.to_string()
              << "\" is never reached from the root rule\n";
  }
}

uint64_t parse_size(const std::string& text) {
  if (text.empty()) throw Error(ErrorCode::IoError, "empty size value");
  uint64_t multiplier = 1;
  std::string digits = text;
  switch (text.back()) {
    case 'k': case 'K': multiplier = 1024; digits.pop_back(); break;
    case 'm': case 'M': multiplier = 1024 * 1024; digits.pop_back(); break;
    case 'g': case 'G': multiplier = 1024ull * 1024 * 1024; digits.pop_back(); break;
    default: break;
  }
  try {
    return std::stoull(digits) * multiplier;
  } catch (const std::exception&) {
    throw Error(ErrorCode::IoError, "bad size value '" + text + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double millis_since(std::chrono::steady_clock::time_point start) {
  const auto d = std::chrono::steady_clock::now() - start;
  return std::chrono::duration<double, std::milli>(d).count();
}

struct CommonPaths {
  std::string dtd_path;
  std::string xslt_path;
};

int cmd_check(const CommonPaths& paths) {
  DtdTree dtd = parse_dtd(read_file(paths.dtd_path));
  XsltProgram program = parse_xslt(read_file(paths.xslt_path));
  warn_dead_rules(dtd, program);
  try {
    convert(dtd, program);
  } catch (const Error& e) {
    if (is_not_streamable(e.code())) {
      std::cout << e.what() << "\n";
      return 2;
    }
    throw;
  }
  std::cout << "STREAMABLE\n";
  return 0;
}

int cmd_compile(const CommonPaths& paths, const std::string& out_path, bool dump_tree) {
  DtdTree dtd = parse_dtd(read_file(paths.dtd_path));
  XsltProgram program = parse_xslt(read_file(paths.xslt_path));
  warn_dead_rules(dtd, program);
  if (dump_tree) {
    const TransformationTree tree = build_ttree(dtd, program);
    std::cerr << dump_ttree(tree);
  }
  const SpmModel model = convert(dtd, program);
  const std::string json = model.to_json();
  if (out_path.empty()) {
    std::cout << json;
  } else {
    write_file(out_path, json);
  }
  return 0;
}

int cmd_transform(const CommonPaths& paths, const std::string& in_path,
                  const std::string& out_path, const std::string& engine) {
  DtdTree dtd = parse_dtd(read_file(paths.dtd_path));
  XsltProgram program = parse_xslt(read_file(paths.xslt_path));
  warn_dead_rules(dtd, program);

  if (engine == "stream") {
    const SpmModel model = convert(dtd, program);
    FileSource in(in_path);
    TransformStats stats;
    if (out_path == "-") {
      FileSink out(stdout);
      stats = transform_stream(model, in, out);
      out.flush();
    } else {
      FileSink out(out_path);
      stats = transform_stream(model, in, out);
      out.flush();
    }
    std::cerr << "bytesIn=" << stats.bytes_in << "\n"
              << "bytesOut=" << stats.bytes_out << "\n"
              << "events=" << stats.events << "\n"
              << "peakAuxBytes=" << stats.peak_aux_bytes << "\n";
    return 0;
  }
  if (engine == "oracle") {
    const std::string input = read_file(in_path);
    const auto doc = parse_document(input);
    const std::string output = transform_dom(program, dtd, *doc);
    if (out_path == "-") {
      std::fwrite(output.data(), 1, output.size(), stdout);
    } else {
      write_file(out_path, output);
    }
    std::cerr << "bytesIn=" << input.size() << "\n"
              << "bytesOut=" << output.size() << "\n"
              << "peakTreeBytes=" << doc->footprint_bytes() << "\n";
    return 0;
  }
  throw Error(ErrorCode::IoError, "unknown engine '" + engine + "'");
}

int cmd_gen(const std::string& dtd_path, const std::string& size_text, uint64_t seed,
            const std::string& out_path, uint32_t star_fanout, uint32_t text_len) {
  DtdTree dtd = parse_dtd(read_file(dtd_path));
  GenConfig config;
  config.target_bytes = parse_size(size_text);
  config.seed = seed;
  config.star_fanout = star_fanout;
  config.text_len = text_len;
  if (out_path.empty() || out_path == "-") {
    FileSink out(stdout);
    generate(dtd, config, out);
    out.flush();
  } else {
    FileSink out(out_path);
    generate(dtd, config, out);
    out.flush();
  }
  return 0;
}

struct BenchRow {
  std::string engine;
  uint64_t input_bytes = 0;
  double wall_millis = -1;
  uint64_t peak_bytes = 0;
};

int cmd_bench(const CommonPaths& paths, const std::string& sizes_text,
              const std::string& engines_text, int repeat, uint64_t seed,
              const std::string& out_path) {
  const std::string dtd_text = read_file(paths.dtd_path);
  const std::string xslt_text = read_file(paths.xslt_path);
  DtdTree dtd = parse_dtd(dtd_text);
  XsltProgram program = parse_xslt(xslt_text);

  const std::vector<std::string> engines = split_list(engines_text);
  for (const auto& engine : engines) {
    if (engine != "stream" && engine != "oracle") {
      throw Error(ErrorCode::IoError, "unknown engine '" + engine + "'");
    }
    if (engine == "stream") {
      convert(dtd, program);  // streamability gate before any timing
    }
  }

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  std::vector<BenchRow> rows;
  std::vector<fs::path> temp_files;

  for (const std::string& size_text : split_list(sizes_text)) {
    GenConfig config;
    config.target_bytes = parse_size(size_text);
    config.seed = seed;
    const fs::path file =
        dir / ("spmx-bench-" + std::to_string(::getpid()) + "-" + size_text + ".xml");
    uint64_t actual_bytes;
    {
      FileSink out(file.string());
      actual_bytes = generate(dtd, config, out);
      out.flush();
    }
    temp_files.push_back(file);

    for (const std::string& engine : engines) {
      BenchRow row;
      row.engine = engine;
      row.input_bytes = actual_bytes;
      for (int r = 0; r < repeat; ++r) {
        try {
          const auto start = std::chrono::steady_clock::now();
          if (engine == "stream") {
            const SpmModel model = convert(parse_dtd(dtd_text), parse_xslt(xslt_text));
            FileSource in(file.string());
            NullSink out;
            const TransformStats stats = transform_stream(model, in, out);
            const double ms = millis_since(start);
            row.peak_bytes = stats.peak_aux_bytes;
            if (row.wall_millis < 0 || ms < row.wall_millis) row.wall_millis = ms;
          } else {
            const DtdTree d = parse_dtd(dtd_text);
            const XsltProgram p = parse_xslt(xslt_text);
            const std::string input = read_file(file.string());
            const auto doc = parse_document(input);
            const std::string output = transform_dom(p, d, *doc);
            const double ms = millis_since(start);
            row.peak_bytes = doc->footprint_bytes();
            if (row.wall_millis < 0 || ms < row.wall_millis) row.wall_millis = ms;
          }
        } catch (const Error& e) {
          std::cerr << "bench: " << engine << " on " << size_text << " failed: " << e.what()
                    << "\n";
          row.wall_millis = -1;
          break;
        }
      }
      rows.push_back(std::move(row));
    }
  }
  for (const fs::path& f : temp_files) {
    std::error_code ec;
    fs::remove(f, ec);
  }

  std::ostringstream csv;
  csv << "engine,inputBytes,wallMillis,peakAuxBytes,throughputMBps\n";
  for (const BenchRow& row : rows) {
    csv << row.engine << ',' << row.input_bytes << ',';
    if (row.wall_millis < 0) {
      csv << "-1," << row.peak_bytes << ",0\n";
      continue;
    }
    const double mbps =
        (static_cast<double>(row.input_bytes) / 1e6) / (row.wall_millis / 1e3);
    char line[128];
    std::snprintf(line, sizeof line, "%.3f,%llu,%.2f\n", row.wall_millis,
                  static_cast<unsigned long long>(row.peak_bytes), mbps);
    csv << line;
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_file(out_path, csv.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming XSLT engine: compiles a stylesheet plus a simple DTD "
               "into per-event output fragments and transforms XML in one pass"};
  app.require_subcommand(1);

  bool scalar_scan = false;
  app.add_flag("--scalar-scan", scalar_scan,
               "disable the SIMD byte-scan kernels (default backend: " +
                   std::string(spmx::scan::backend_name()) + ")");

  CommonPaths paths;
  std::string in_path, out_path, engine = "stream";
  std::string sizes = "1M,10M", engines = "stream,oracle", size_text = "1M";
  uint64_t seed = 42;
  uint32_t star_fanout = 8, text_len = 32;
  int repeat = 3;
  bool dump_tree = false;

  CLI::App* check = app.add_subcommand("check", "report whether the program is streamable");
  check->add_option("-d,--dtd", paths.dtd_path, "DTD file")->required();
  check->add_option("-s,--xslt", paths.xslt_path, "stylesheet file")->required();

  CLI::App* compile = app.add_subcommand("compile", "emit the streaming model as JSON");
  compile->add_option("-d,--dtd", paths.dtd_path, "DTD file")->required();
  compile->add_option("-s,--xslt", paths.xslt_path, "stylesheet file")->required();
  compile->add_option("-o,--output", out_path, "output file (default stdout)");
  compile->add_flag("--dump-ttree", dump_tree, "print the transformation tree to stderr");

  CLI::App* transform = app.add_subcommand("transform", "transform a document");
  transform->add_option("-d,--dtd", paths.dtd_path, "DTD file")->required();
  transform->add_option("-s,--xslt", paths.xslt_path, "stylesheet file")->required();
  transform->add_option("-i,--input", in_path, "input XML file")->required();
  transform->add_option("-o,--output", out_path, "output file ('-' for stdout)")->required();
  transform->add_option("--engine", engine, "stream|oracle")->capture_default_str();

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic instance of a DTD");
  gen->add_option("-d,--dtd", paths.dtd_path, "DTD file")->required();
  gen->add_option("--size", size_text, "target size in bytes (K/M/G suffix)")
      ->capture_default_str();
  gen->add_option("--seed", seed, "random seed")->capture_default_str();
  gen->add_option("-o,--output", out_path, "output file ('-' for stdout)");
  gen->add_option("--star-fanout", star_fanout, "mean repetition of starred children")
      ->capture_default_str();
  gen->add_option("--text-len", text_len, "mean text length in bytes")->capture_default_str();

  CLI::App* bench = app.add_subcommand("bench", "time both engines over generated corpora");
  bench->add_option("-d,--dtd", paths.dtd_path, "DTD file")->required();
  bench->add_option("-s,--xslt", paths.xslt_path, "stylesheet file")->required();
  bench->add_option("--sizes", sizes, "comma list of sizes")->capture_default_str();
  bench->add_option("--engines", engines, "comma list of engines")->capture_default_str();
  bench->add_option("--repeat", repeat, "repeats per cell (min is reported)")
      ->capture_default_str();
  bench->add_option("--seed", seed, "generator seed")->capture_default_str();
  bench->add_option("-o,--output", out_path, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  spmx::scan::use_scalar(scalar_scan);

  try {
    if (check->parsed()) return cmd_check(paths);
    if (compile->parsed()) return cmd_compile(paths, out_path, dump_tree);
    if (transform->parsed()) return cmd_transform(paths, in_path, out_path, engine);
    if (gen->parsed()) return cmd_gen(paths.dtd_path, size_text, seed, out_path, star_fanout,
                                      text_len);
    if (bench->parsed()) return cmd_bench(paths, sizes, engines, repeat, seed, out_path);
  } catch (const spmx::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_not_streamable(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
