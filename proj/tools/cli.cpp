#include "tapered/cli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "tapered/analysis.hpp"
#include "tapered/conformance.hpp"
#include "tapered/frame.hpp"

namespace tapered::cli {

namespace {

// Unreadable or malformed input; maps to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_scene_flags(CLI::App* cmd, SphereSceneParams& p)
{
  cmd->add_option("--width", p.width, "frame width");
  cmd->add_option("--height", p.height, "frame height");
  cmd->add_option("--radius", p.radius, "sphere radius in pixels");
  cmd->add_option("--frequency", p.frequency, "texture frequency");
  cmd->add_option("--angle", p.angle, "rotation per frame, radians");
  cmd->add_option("--seed", p.seed, "texture phase seed");
}

struct Inputs {
  std::vector<std::string> paths;
  SphereSceneParams scene;
};

// Two PGM paths, or a generated sphere pair when none are given.
std::pair<Frame, Frame> load_inputs(const Inputs& in)
{
  if (in.paths.empty()) {
    auto p = in.scene;
    p.frames = 2;
    auto f = gen_sphere(p);
    return {std::move(f[0]), std::move(f[1])};
  }
  if (in.paths.size() != 2) throw std::invalid_argument("expected two input frames");
  auto read = [](const std::string& path) {
    try {
      return read_pgm_file(path);
    } catch (const PgmError& e) {
      throw InputError(path + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw InputError(e.what());
    }
  };
  Frame a = read(in.paths[0]);
  Frame b = read(in.paths[1]);
  if (a.width() != b.width() || a.height() != b.height()) throw InputError("input frames differ in size");
  return {std::move(a), std::move(b)};
}

// CSV to --out when given, otherwise to stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback)
  {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }
  bool to_stdout() const { return !file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

std::string hex(std::uint64_t x, int digits)
{
  std::ostringstream os;
  os << std::hex << std::setw(digits) << std::setfill('0') << x;
  return os.str();
}

std::string csv_name(std::string s)
{
  for (auto& c : s) {
    if (c == ',') c = '_';
  }
  return s;
}

FlowOptions flow_options(int window, double tau, unsigned threads)
{
  if (window < 0) throw std::invalid_argument("--window must be non-negative");
  if (!(tau >= 0.0)) throw std::invalid_argument("--tau must be non-negative");
  return {window, tau, threads};
}

int check_norm(int norm)
{
  if (norm < 1 || norm > 255) throw std::invalid_argument("norm must lie in 1..255");
  return norm;
}

int cmd_gen(const SphereSceneParams& p, const std::string& dir, std::ostream& out)
{
  const auto frames = gen_sphere(p);
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.pgm", i);
    write_pgm_file(std::filesystem::path(dir) / name, frames[i]);
    out << name << ' ' << hex(frame_checksum(frames[i]), 16) << '\n';
  }
  return kOk;
}

void write_flow_csv(std::ostream& os, const FlowField<double>& f)
{
  os << "x,y,u,v,status\n";
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      os << x << ',' << y << ',' << format_double(f.u(y, x)) << ',' << format_double(f.v(y, x)) << ','
         << status_name(f.status(y, x)) << '\n';
    }
  }
}

int cmd_flow(const Inputs& in, const std::string& format, int norm, const FlowOptions& opts,
             const std::string& out_path, const std::string& heatmap, std::ostream& out)
{
  const auto fmt = parse_format(format);
  check_norm(norm);
  const auto [f1, f2] = load_inputs(in);
  const auto field = flow_any(f1, f2, norm, opts, fmt);

  std::size_t counts[3] = {};
  for (auto s : field.status.reshaped()) ++counts[static_cast<int>(s)];

  Sink sink(out_path, out);
  write_flow_csv(*sink, field);

  if (!heatmap.empty()) {
    const auto ref = flow(f1, f2, norm, opts, ReferenceFormat{});
    const auto c = compare(field, ref, format_name(fmt), norm);
    std::ofstream hm(heatmap, std::ios::binary);
    if (!hm) throw std::runtime_error("cannot write " + heatmap);
    hm << "x,y,err_u,err_v,exception\n";
    for (int y = 0; y < field.height(); ++y) {
      for (int x = 0; x < field.width(); ++x) {
        hm << x << ',' << y << ',' << format_double(c.u.error(y, x)) << ',' << format_double(c.v.error(y, x))
           << ',' << (c.u.exception(y, x) ? 1 : 0) << '\n';
      }
    }
  }

  std::ostream& s = out;
  s << (sink.to_stdout() ? "# " : "") << "format=" << format_name(fmt) << " norm=" << norm
    << " ok=" << counts[0] << " singular=" << counts[1] << " exceptions=" << counts[2];
  // q16 saturation is the only way a q16 pixel becomes an exception.
  if (std::holds_alternative<FixedQ16Format>(fmt)) s << " overflows=" << counts[2];
  s << '\n';
  return kOk;
}

int cmd_sweep(const Inputs& in, const std::string& format, const std::string& norms_text, const FlowOptions& opts,
              const std::string& out_path, std::ostream& out)
{
  const auto fmt = parse_format(format);
  const auto norms = parse_norms(norms_text);
  const auto [f1, f2] = load_inputs(in);
  const auto r = sweep_any(f1, f2, fmt, norms, opts);

  Sink sink(out_path, out);
  *sink << "norm,max,rms,std,exceptions,singulars\n";
  for (const auto& x : r.reports) {
    *sink << x.norm << ',' << format_double(x.max_abs_error) << ',' << format_double(x.rms_error) << ','
          << format_double(x.std_deviation) << ',' << x.exception_count << ',' << x.singular_count << '\n';
  }
  out << (sink.to_stdout() ? "# " : "") << "best_norm="
      << (r.best_norm ? std::to_string(*r.best_norm) : std::string("none")) << '\n';
  return kOk;
}

int cmd_hist(const Inputs& in, int norm, const FlowOptions& opts, const std::string& out_path, std::ostream& out)
{
  check_norm(norm);
  const auto [f1, f2] = load_inputs(in);
  ValueTap tap;
  flow(f1, f2, norm, opts, ReferenceFormat{&tap});
  const auto values = tap_unique_values(tap);
  const std::vector<BinadeCensus> censuses{representable_census(PositConfig{16, 2}),
                                           representable_census(PositConfig{16, 1}),
                                           representable_census_binary16()};
  const auto h = histogram_overlap(values, censuses);

  Sink sink(out_path, out);
  *sink << "binade,data";
  for (const auto& f : h.formats) *sink << ',' << csv_name(f);
  *sink << '\n';
  // Zero has no binade; it gets its own leading row.
  *sink << "zero," << h.zero_count;
  for (std::size_t i = 0; i < h.formats.size(); ++i) *sink << ",0";
  *sink << '\n';
  for (const auto& row : h.rows) {
    *sink << row.binade << ',' << row.data;
    for (auto n : row.representable) *sink << ',' << n;
    *sink << '\n';
  }

  const char* prefix = sink.to_stdout() ? "# " : "";
  out << prefix << "unique_values=" << h.total_values << " zero=" << h.zero_count << '\n';
  for (std::size_t i = 0; i < h.formats.size(); ++i) {
    out << prefix << "coverage " << csv_name(h.formats[i]) << '=' << format_double(h.coverage[i]) << '\n';
  }
  return kOk;
}

int cmd_verify(const std::string& format, const std::string& mode, std::uint64_t samples, std::uint64_t seed,
               const std::string& out_path, std::ostream& out)
{
  const auto fmt = parse_format(format);
  conformance::ConformanceReport report;
  int width = 0;
  if (const auto* p = std::get_if<PositFormat>(&fmt)) {
    width = (p->config.n() + 3) / 4;
    if (mode == "exhaustive") {
      if (p->config.n() > 12) throw std::invalid_argument("exhaustive mode needs n <= 12; use sampled");
      report = conformance::verify_posit_exhaustive(p->config);
    } else if (mode == "sampled") {
      report = conformance::verify_posit_sampled(p->config, samples, seed);
    } else {
      throw std::invalid_argument("posit modes are exhaustive and sampled");
    }
  } else if (std::holds_alternative<Binary16Format>(fmt)) {
    width = 4;
    if (mode == "basis") {
      report = conformance::verify_binary16_basis();
    } else if (mode == "sampled") {
      report = conformance::verify_binary16_sampled(samples, seed);
    } else {
      throw std::invalid_argument("float16 modes are basis and sampled");
    }
  } else {
    throw std::invalid_argument("verify supports posit:n,es and float16");
  }

  Sink sink(out_path, out);
  *sink << "op,checked,mismatches\n";
  for (auto op : conformance::kAllOps) {
    const auto& t = report.ops[static_cast<int>(op)];
    *sink << conformance::op_name(op) << ',' << t.checked << ',' << t.mismatches << '\n';
  }
  const char* prefix = sink.to_stdout() ? "# " : "";
  for (const auto& m : report.dump) {
    out << prefix << "mismatch " << conformance::op_name(m.op) << " a=0x" << hex(m.a, width) << " b=0x"
        << hex(m.b, width) << " expected=0x" << hex(m.expected, width) << " actual=0x" << hex(m.actual, width)
        << '\n';
  }
  out << prefix << "format=" << report.format << " mode=" << report.mode << " checked=" << report.checked()
      << " mismatches=" << report.mismatches() << (report.passed() ? " PASS" : " FAIL") << '\n';
  return report.passed() ? kOk : kMismatch;
}

}  // namespace

const char* status_name(FlowStatus s) noexcept
{
  switch (s) {
    case FlowStatus::Ok: return "ok";
    case FlowStatus::Singular: return "singular";
    case FlowStatus::Exception: return "exception";
  }
  return "?";
}

std::string format_double(double x)
{
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, r.ptr};
}

std::vector<int> parse_norms(std::string_view text)
{
  auto number = [&](std::string_view s) {
    int v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
      throw std::invalid_argument("bad norm '" + std::string(s) + "'");
    }
    return check_norm(v);
  };
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const int a = number(text.substr(0, dots));
    const int b = number(text.substr(dots + 2));
    if (a > b) throw std::invalid_argument("empty norm range");
    for (int n = a; n <= b; ++n) out.push_back(n);
    return out;
  }
  while (true) {
    const auto comma = text.find(',');
    out.push_back(number(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

FlowField<double> parse_flow_csv(std::istream& in)
{
  struct Row {
    int x, y;
    double u, v;
    FlowStatus s;
  };
  std::vector<Row> rows;
  std::string line;
  bool header = false;
  int w = 0, h = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "x,y,u,v,status") throw std::invalid_argument("not a flow CSV");
      header = true;
      continue;
    }
    std::string_view rest = line;
    auto field = [&]() {
      const auto comma = rest.find(',');
      const auto f = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      return f;
    };
    auto parse = [](std::string_view f, auto& v) {
      const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
      if (r.ec != std::errc{} || r.ptr != f.data() + f.size()) throw std::invalid_argument("bad CSV field");
    };
    Row r{};
    parse(field(), r.x);
    parse(field(), r.y);
    parse(field(), r.u);
    parse(field(), r.v);
    const auto st = field();
    if (st == "ok") r.s = FlowStatus::Ok;
    else if (st == "singular") r.s = FlowStatus::Singular;
    else if (st == "exception") r.s = FlowStatus::Exception;
    else throw std::invalid_argument("bad status");
    if (r.x < 0 || r.y < 0) throw std::invalid_argument("negative coordinate");
    w = std::max(w, r.x + 1);
    h = std::max(h, r.y + 1);
    rows.push_back(r);
  }
  if (rows.size() != static_cast<std::size_t>(w) * h) throw std::invalid_argument("flow CSV is not a full grid");
  FlowField<double> f{Field<double>::Zero(h, w), Field<double>::Zero(h, w),
                      Field<FlowStatus>::Constant(h, w, FlowStatus::Singular)};
  for (const auto& r : rows) {
    f.u(r.y, r.x) = r.u;
    f.v(r.y, r.x) = r.v;
    f.status(r.y, r.x) = r.s;
  }
  return f;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Posit, binary16 and Q16.16 Lucas-Kanade optical flow harness", "tapered"};
  app.require_subcommand(1);

  std::string format = "posit:16,2";
  int norm = 32;
  std::string norms = "1..255";
  int window = 2;
  double tau = 1e-9;
  unsigned threads = 1;
  std::string out_path;
  std::string heatmap;
  std::string mode = "sampled";
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  Inputs in;
  SphereSceneParams gen_params;
  std::string gen_dir = ".";

  auto* gen = app.add_subcommand("gen", "write a synthetic rotating-sphere sequence");
  add_scene_flags(gen, gen_params);
  gen->add_option("--frames", gen_params.frames, "number of frames");
  gen->add_option("--out", gen_dir, "output directory");

  auto add_flow_flags = [&](CLI::App* cmd, bool with_format) {
    cmd->add_option("frames", in.paths, "two PGM frames; a generated sphere pair when omitted");
    add_scene_flags(cmd, in.scene);
    if (with_format) cmd->add_option("--format", format, "reference | posit:n,es | float16 | q16");
    cmd->add_option("--window", window, "window radius");
    cmd->add_option("--tau", tau, "singular determinant threshold");
    cmd->add_option("--threads", threads, "worker threads");
    cmd->add_option("--out", out_path, "CSV path (stdout when omitted)");
  };

  auto* flow_cmd = app.add_subcommand("flow", "dense flow for one format and norm");
  add_flow_flags(flow_cmd, true);
  flow_cmd->add_option("--norm", norm, "normalization factor 1..255");
  flow_cmd->add_option("--heatmap", heatmap, "per-pixel error CSV against the reference");

  auto* sweep_cmd = app.add_subcommand("sweep", "error statistics across norms");
  add_flow_flags(sweep_cmd, true);
  sweep_cmd->add_option("--norms", norms, "a..b or a,b,c");

  auto* hist_cmd = app.add_subcommand("hist", "value histogram against 16-bit format censuses");
  add_flow_flags(hist_cmd, false);
  hist_cmd->add_option("--norm", norm, "normalization factor 1..255");

  auto* verify_cmd = app.add_subcommand("verify", "check arithmetic against the exact oracle");
  verify_cmd->add_option("--format", format, "posit:n,es | float16");
  verify_cmd->add_option("--mode", mode, "exhaustive | sampled | basis");
  verify_cmd->add_option("--samples", samples, "random pairs in sampled mode");
  verify_cmd->add_option("--seed", seed, "sampling seed");
  verify_cmd->add_option("--out", out_path, "CSV path (stdout when omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_params, gen_dir, out);
    const auto opts = flow_options(window, tau, threads);
    if (*flow_cmd) return cmd_flow(in, format, norm, opts, out_path, heatmap, out);
    if (*sweep_cmd) return cmd_sweep(in, format, norms, opts, out_path, out);
    if (*hist_cmd) return cmd_hist(in, norm, opts, out_path, out);
    if (*verify_cmd) return cmd_verify(format, mode, samples, seed, out_path, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputParse;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputParse;
  }
  return kUsage;
}

}  // namespace tapered::cli
