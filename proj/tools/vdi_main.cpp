// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// vdi: command-line entry point.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "vdi/bench.hpp"
#include "vdi/dvr.hpp"
#include "vdi/error.hpp"
#include "vdi/generate.hpp"
#include "vdi/image.hpp"
#include "vdi/net.hpp"
#include "vdi/preview.hpp"
#include "vdi/raycast.hpp"
#include "vdi/remote.hpp"
#include "vdi/synth.hpp"
#include "vdi/vdi_io.hpp"
#include "vdi/volume.hpp"
#ifdef VDI_HAS_VIEWER
#include "vdi/viewer.hpp"
#endif

namespace fs = std::filesystem;
using namespace vdi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }

bool parse_on_off(const std::string& s) {
  if (s == "on") return true;
  if (s == "off") return false;
  throw Error(ErrorCode::kInvalidArgument, "expected on|off, got '" + s + "'");
}

std::vector<double> parse_angles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad angle '" + tok + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "empty angle list");
  return out;
}

std::uint64_t now_ms() {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::system_clock::now().time_since_epoch())
                                        .count());
}

void print_gen_report(const GenStats& s, int n_sg) {
  std::cout << std::fixed << std::setprecision(3);
  std::cout << "rays            " << s.rays << "\n";
  std::cout << "rays_hit        " << s.rays_hit << "\n";
  std::cout << "n_sg            " << n_sg << "\n";
  std::cout << "supersegments   " << s.supersegments << "\n";
  std::cout << "mean_passes     "
            << (s.rays_hit ? static_cast<double>(s.total_passes) / s.rays_hit : 0.0) << "\n";
  std::cout << "max_passes      " << s.max_passes << "\n";
  std::cout << "smeared_rays    " << s.smeared_rays << "\n";
  std::cout << "wall_ms         " << s.wall_ms << "\n";
  std::cout << "passes histogram (passes: rays)\n";
  for (std::size_t p = 0; p < s.pass_histogram.size(); ++p) {
    if (s.pass_histogram[p]) std::cout << "  " << p << ": " << s.pass_histogram[p] << "\n";
  }
}

// ---- synth ----------------------------------------------------------------------

struct SynthArgs {
  std::string preset = "sphere";
  int dims = 128;
  std::string type = "u8";
  std::uint64_t seed = 1;
  fs::path out;
  fs::path tf_out;
  fs::path camera_out;
  int width = 256;
  int height = 256;
};

int run_synth(const SynthArgs& a) {
  const Preset preset = parse_preset(a.preset);
  const Volume vol = make_synthetic(preset, a.dims, parse_voxel_type(a.type), a.seed);
  write_raw_volume(a.out, vol);
  VolumeMeta meta;
  meta.dims = vol.dims();
  meta.voxel_type = vol.voxel_type();
  meta.spacing = vol.spacing();
  meta.raw_file = a.out.filename();
  fs::path sidecar = a.out;
  sidecar.replace_extension(".json");
  write_volume_meta(sidecar, meta);
  std::cout << "wrote " << a.out.string() << " and " << sidecar.string() << "\n";
  if (!a.tf_out.empty()) {
    default_transfer_function(preset).save(a.tf_out);
    std::cout << "wrote " << a.tf_out.string() << "\n";
  }
  if (!a.camera_out.empty()) {
    save_camera(a.camera_out, default_camera(vol, a.width, a.height));
    std::cout << "wrote " << a.camera_out.string() << "\n";
  }
  return kExitOk;
}

// ---- generate ----------------------------------------------------------------

struct GenerateArgs {
  fs::path volume, tf, camera, out;
  GenParams params;
};

int run_generate(const GenerateArgs& a) {
  const Volume vol = load_volume(a.volume);
  const TransferFunction tf = TransferFunction::load(a.tf);
  const Camera cam = load_camera(a.camera);
  const GeneratedVdi g = generate_vdi(vol, tf, cam, a.params);
  g.vdi.validate();
  save_vdi(a.out, g.vdi, g.grid);
  print_gen_report(g.stats, a.params.n_sg);
  std::cout << "wrote " << a.out.string() << " (" << fs::file_size(a.out) << " bytes)\n";
  return kExitOk;
}

// ---- render --------------------------------------------------------------------

struct RenderArgs {
  fs::path vdi, camera, out, stats;
  std::string ess = "on";
  std::optional<double> d_i, d_r;
};

int run_render(const RenderArgs& a) {
  const DecodedVdi d = load_vdi(a.vdi);
  const Camera cam = load_camera(a.camera);
  RenderOptions opts;
  opts.use_ess = parse_on_off(a.ess);
  Image img;
  std::ostringstream row;
  row << std::setprecision(9);
  std::string header;
  if (a.d_i || a.d_r) {
    PreviewParams p;
    p.d_i = a.d_i.value_or(1.0);
    p.d_r = a.d_r.value_or(1.0);
    p.validate();
    PreviewStats s;
    img = render_preview(d.vdi, d.grid, cam, p, opts, &s);
    header = "mode,width,height,ms,d_i,d_r,rays_hit,cells_visited,empty_cells,samples,"
             "samples_in_empty_cells,list_lookups,samples_hit";
    row << "preview," << img.width << ',' << img.height << ',' << s.ms << ',' << p.d_i << ','
        << p.d_r << ',' << s.rays_hit << ',' << s.cells_visited << ',' << s.empty_cells << ','
        << s.samples << ',' << s.samples_in_empty_cells << ',' << s.list_lookups << ','
        << s.samples_hit;
    std::cout << "preview " << img.width << "x" << img.height << " in " << s.ms << " ms\n";
  } else {
    RenderStats s;
    img = render_vdi(d.vdi, d.grid, cam, opts, &s);
    header = "mode,width,height,ms,ess,rays_hit,lists_visited,supersegments_intersected,ess_jumps";
    row << "full," << img.width << ',' << img.height << ',' << s.ms << ',' << a.ess << ','
        << s.rays_hit << ',' << s.lists_visited << ',' << s.supersegments_intersected << ','
        << s.ess_jumps;
    std::cout << "render " << img.width << "x" << img.height << " in " << s.ms << " ms, "
              << s.lists_visited << " lists, " << s.supersegments_intersected
              << " supersegments\n";
  }
  write_image(a.out, img);
  if (!a.stats.empty()) {
    std::ofstream out(a.stats);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + a.stats.string());
    out << header << '\n' << row.str() << '\n';
  }
  return kExitOk;
}

// ---- dvr -------------------------------------------------------------------------

struct DvrArgs {
  fs::path volume, tf, camera, out;
  double step = 0.0;
};

int run_dvr(const DvrArgs& a) {
  const Volume vol = load_volume(a.volume);
  const TransferFunction tf = TransferFunction::load(a.tf);
  const Camera cam = load_camera(a.camera);
  DvrOptions o;
  o.step = a.step;
  write_image(a.out, render_dvr(vol, tf, cam, o));
  std::cout << "wrote " << a.out.string() << "\n";
  return kExitOk;
}

// ---- bench ---------------------------------------------------------------------

struct BenchArgs {
  fs::path volume, tf, camera, path, out, vdi;
  std::string angles = "5,10,20,40";
  std::string ess = "on";
  GenParams params;
};

int run_bench_cmd(const BenchArgs& a) {
  const Volume vol = load_volume(a.volume);
  const TransferFunction tf = TransferFunction::load(a.tf);
  std::optional<DecodedVdi> held;
  if (!a.vdi.empty()) {
    held = load_vdi(a.vdi);
  } else {
    const Camera gen = load_camera(a.camera);
    GeneratedVdi g = generate_vdi(vol, tf, gen, a.params);
    print_gen_report(g.stats, a.params.n_sg);
    held = DecodedVdi{std::move(g.vdi), std::move(g.grid)};
  }
  std::vector<Camera> path;
  if (!a.path.empty()) {
    path = load_camera_path(a.path);
  } else {
    path = deviation_sweep(held->vdi.gen_camera(), vol.world_bounds().center(),
                           parse_angles(a.angles));
  }
  RenderOptions opts;
  opts.use_ess = parse_on_off(a.ess);
  const auto rows = run_bench(vol, tf, held->vdi, held->grid, path, opts);
  write_bench_csv(a.out, rows);
  for (const auto& r : rows) {
    std::cout << std::fixed << std::setprecision(2) << "frame " << r.frame_index << " angle "
              << r.angle_deg << " ms " << r.frame_ms << " ssim " << std::setprecision(4) << r.ssim
              << " psnr " << std::setprecision(2) << r.psnr << " lists " << r.lists_visited
              << "\n";
  }
  std::cout << "wrote " << a.out.string() << "\n";
  return kExitOk;
}

// ---- path --------------------------------------------------------------------------

struct PathArgs {
  fs::path camera, out;
  int steps = 36;
  double degrees = 360.0;
  std::vector<double> center{0.0, 0.0, 0.0};
};

int run_path(const PathArgs& a) {
  if (a.steps < 1) throw Error(ErrorCode::kInvalidArgument, "--steps must be >= 1");
  if (a.center.size() != 3) throw Error(ErrorCode::kInvalidArgument, "--center needs 3 values");
  const Camera cam = load_camera(a.camera);
  const Vec3 c(a.center[0], a.center[1], a.center[2]);
  std::vector<Camera> path;
  for (int i = 0; i <= a.steps; ++i) {
    path.push_back(orbit(cam, c, deg_to_rad(a.degrees * i / a.steps)));
  }
  save_camera_path(a.out, path);
  std::cout << "wrote " << path.size() << " poses to " << a.out.string() << "\n";
  return kExitOk;
}

// ---- serve -----------------------------------------------------------------------

struct ServeArgs {
  fs::path volume, tf;
  std::string listen = "127.0.0.1:7000";
  double duration_s = 0.0;
  GenParams params;
};

int run_serve(const ServeArgs& a) {
  auto vol = std::make_shared<const Volume>(load_volume(a.volume));
  auto tf = std::make_shared<const TransferFunction>(TransferFunction::load(a.tf));
  const auto [host, port] = parse_endpoint(a.listen);
  SessionConfig defaults;
  defaults.n_sg = a.params.n_sg;
  StreamServer server(make_vdi_generator(vol, tf, a.params), defaults, host, port);
  server.set_sent_hook([](const VdiPacket& p, const GeneratedItem&) {
    std::cout << "sent packet " << p.seq << " for pose " << p.gen_pose_seq << " ("
              << p.body.size() << " of " << p.uncompressed_len << " bytes)" << std::endl;
  });
  server.start();
  std::cout << "listening on " << host << ":" << server.port() << std::endl;
  const auto t0 = std::chrono::steady_clock::now();
  while (!g_stop) {
    if (a.duration_s > 0 &&
        std::chrono::steady_clock::now() - t0 > std::chrono::duration<double>(a.duration_s)) {
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  server.stop();
  std::cout << "generations " << server.pipeline().generations() << ", packets "
            << server.packets_written() << "\n";
  return kExitOk;
}

// ---- client ---------------------------------------------------------------------

struct ClientArgs {
  std::string connect = "127.0.0.1:7000";
  bool headless = false;
  int viewer_port = -1;
  fs::path path, out_dir = "frames", camera;
  int width = 256, height = 256, n_sg = 12;
  double target_fps = 30.0;
  double d_r = 1.0;
  double frame_interval_ms = 33.0;
  double wait_s = 30.0;
  double duration_s = 0.0;
  int repeat = 1;
};

int run_client_headless(const ClientArgs& a, StreamClient& client, ClientRenderer& renderer) {
  std::vector<Camera> path = load_camera_path(a.path);
  if (path.empty()) throw Error(ErrorCode::kInvalidArgument, "camera path is empty");
  fs::create_directories(a.out_dir);
  std::ofstream csv(a.out_dir / "frames.csv");
  if (!csv) throw Error(ErrorCode::kIo, "cannot write " + (a.out_dir / "frames.csv").string());
  csv << "frame_index,pose_seq,vdi_seq,vdi_gen_pose_seq,mode,new_vdi,frame_ms,d_i,"
         "deviation_deg,vdi_age_ms,vdi_sha256\n";
  csv << std::setprecision(9);

  std::uint64_t seq = 0;
  auto send = [&](const Camera& cam) {
    PoseMsg p;
    p.seq = ++seq;
    p.camera = cam;
    p.timestamp_ms = now_ms();
    client.send_pose(p);
  };
  // First VDI before the timed playback.
  send(path.front());
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(a.wait_s);
  while (!client.buffer().acquire()) {
    if (std::chrono::steady_clock::now() > deadline || g_stop) {
      throw Error(ErrorCode::kIo, "no VDI received within " + std::to_string(a.wait_s) + " s");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  std::size_t frame = 0;
  for (int rep = 0; rep < a.repeat && !g_stop; ++rep) {
    for (std::size_t i = 0; i < path.size() && !g_stop; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      if (rep > 0 || i > 0) send(path[i]);
      auto out = renderer.render(path[i].with_viewport(a.width, a.height), seq);
      if (out) {
        const auto& [img, r] = *out;
        std::ostringstream name;
        name << "frame_" << std::setw(5) << std::setfill('0') << frame++ << ".png";
        write_png(a.out_dir / name.str(), img);
        csv << r.frame_index << ',' << r.pose_seq << ',' << r.vdi_seq << ','
            << r.vdi_gen_pose_seq << ',' << to_string(r.mode) << ',' << (r.new_vdi ? 1 : 0)
            << ',' << r.frame_ms << ',' << r.d_i << ',' << r.deviation_deg << ','
            << r.vdi_age_ms << ',' << to_hex(r.vdi_sha256) << '\n';
      }
      const auto spent = std::chrono::steady_clock::now() - t0;
      const auto budget = std::chrono::duration<double, std::milli>(a.frame_interval_ms);
      if (spent < budget) std::this_thread::sleep_for(budget - spent);
    }
  }
  std::cout << "rendered " << frame << " frames, received " << client.packets_received()
            << " VDIs, dropped " << client.packets_dropped() << "\n";
  return kExitOk;
}

#ifdef VDI_HAS_VIEWER
int run_client_viewer(const ClientArgs& a, StreamClient& client, ClientRenderer& renderer) {
  ViewerBridge bridge("127.0.0.1", static_cast<std::uint16_t>(a.viewer_port));
  std::mutex m;
  std::optional<ViewerPose> latest;
  Camera base;
  if (!a.camera.empty()) {
    base = load_camera(a.camera);
    const Vec3 c = Vec3::Zero();
    const Vec3 off = base.position - c;
    const double r = off.norm();
    bridge.set_hello({{"type", "hello"},
                      {"center", {c.x(), c.y(), c.z()}},
                      {"orbit",
                       {{"azimuth", std::atan2(off.x(), off.z())},
                        {"elevation", std::asin(std::clamp(off.y() / r, -1.0, 1.0))},
                        {"radius", r}}}});
  } else {
    bridge.set_hello({{"type", "hello"}, {"center", {0, 0, 0}}});
  }
  bridge.set_pose_handler([&](const ViewerPose& p) {
    std::lock_guard lock(m);
    latest = p;
  });
  bridge.start();
  std::cout << "viewer at http://127.0.0.1:" << bridge.port() << "/" << std::endl;

  std::optional<ViewerPose> current;
  std::uint64_t fps_frames = 0;
  auto fps_t0 = std::chrono::steady_clock::now();
  double fps = 0.0;
  const auto start = std::chrono::steady_clock::now();
  while (!g_stop) {
    if (a.duration_s > 0 &&
        std::chrono::steady_clock::now() - start > std::chrono::duration<double>(a.duration_s)) {
      break;
    }
    std::optional<ViewerPose> fresh;
    {
      std::lock_guard lock(m);
      fresh = std::exchange(latest, std::nullopt);
    }
    if (fresh) {
      current = fresh;
      PoseMsg msg;
      msg.seq = fresh->seq;
      msg.camera = base;
      msg.camera.position = fresh->position;
      msg.camera.orientation = fresh->orientation;
      msg.timestamp_ms = now_ms();
      client.send_pose(msg);
    }
    if (!current) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      continue;
    }
    Camera cam = base.with_viewport(a.width, a.height);
    cam.position = current->position;
    cam.orientation = current->orientation;
    auto out = renderer.render(cam, current->seq);
    if (!out) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      continue;
    }
    ++fps_frames;
    const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - fps_t0).count();
    if (el >= 0.5) {
      fps = fps_frames / el;
      fps_frames = 0;
      fps_t0 = std::chrono::steady_clock::now();
    }
    const auto& [img, r] = *out;
    bridge.send_hud({fps, r.mode, r.vdi_age_ms, r.deviation_deg, r.new_vdi});
    bridge.send_frame(img, r.mode);
    std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<int>(a.frame_interval_ms / 2)));
  }
  bridge.stop();
  return kExitOk;
}
#endif

int run_client(const ClientArgs& a) {
  if (a.headless == (a.viewer_port >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "client needs exactly one of --headless or --viewer-port");
  }
  if (a.headless && a.path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--headless needs --path");
  }
  const auto [host, port] = parse_endpoint(a.connect);
  SessionConfig hello;
  hello.width = a.width;
  hello.height = a.height;
  hello.n_sg = a.n_sg;
  StreamClient client(host, port, hello);
  client.connect(std::chrono::milliseconds(static_cast<int>(a.wait_s * 1000)));
  PreviewParams pp;
  pp.d_r = a.d_r;
  pp.target_fps = a.target_fps;
  ClientRenderer renderer(client.buffer(), pp, RenderOptions{});
  int rc;
  if (a.headless) {
    rc = run_client_headless(a, client, renderer);
  } else {
#ifdef VDI_HAS_VIEWER
    rc = run_client_viewer(a, client, renderer);
#else
    throw Error(ErrorCode::kInvalidArgument, "built without the viewer bridge");
#endif
  }
  client.close();
  return rc;
}

void add_gen_options(CLI::App* cmd, GenParams& p) {
  cmd->add_option("--n-sg", p.n_sg, "supersegments per list")->check(CLI::Range(1, 65535));
  cmd->add_option("--delta", p.delta, "accepted count slack (default 15% of n-sg)");
  cmd->add_option("--epsilon", p.epsilon, "bisection bracket cutoff");
  cmd->add_option("--gamma-init", p.gamma_init, "initial gamma");
  cmd->add_option("--step", p.step, "sampling step in world units (default half a voxel)");
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    case ErrorCode::kInvariantViolation:
      return kExitInvariant;
    default:
      return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  CLI::App app{"Volumetric depth image toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "write a deterministic synthetic volume");
  c_synth->add_option("--preset", synth.preset, "sphere|bands|engineoid");
  c_synth->add_option("--dims", synth.dims, "edge length")->check(CLI::Range(2, 2048));
  c_synth->add_option("--type", synth.type, "u8|u16");
  c_synth->add_option("--seed", synth.seed);
  c_synth->add_option("--out", synth.out, "raw output; sidecar gets the .json extension")->required();
  c_synth->add_option("--tf-out", synth.tf_out, "also write the preset's transfer function");
  c_synth->add_option("--camera-out", synth.camera_out, "also write the default camera");
  c_synth->add_option("--width", synth.width);
  c_synth->add_option("--height", synth.height);

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "generate a VDI");
  c_gen->add_option("--volume", gen.volume, "volume sidecar json")->required();
  c_gen->add_option("--tf", gen.tf, "transfer function json")->required();
  c_gen->add_option("--camera", gen.camera, "camera json")->required();
  c_gen->add_option("--out", gen.out)->required();
  add_gen_options(c_gen, gen.params);

  RenderArgs ren;
  auto* c_ren = app.add_subcommand("render", "render a VDI from a camera");
  c_ren->add_option("--vdi", ren.vdi)->required();
  c_ren->add_option("--camera", ren.camera)->required();
  c_ren->add_option("--out", ren.out)->required();
  c_ren->add_option("--ess", ren.ess, "on|off");
  c_ren->add_option("--d-i", ren.d_i, "preview image-space factor");
  c_ren->add_option("--d-r", ren.d_r, "preview sampling rate");
  c_ren->add_option("--stats", ren.stats, "csv with per-frame counters");

  DvrArgs dvr;
  auto* c_dvr = app.add_subcommand("dvr", "ground-truth raycast of the volume");
  c_dvr->add_option("--volume", dvr.volume)->required();
  c_dvr->add_option("--tf", dvr.tf)->required();
  c_dvr->add_option("--camera", dvr.camera)->required();
  c_dvr->add_option("--out", dvr.out)->required();
  c_dvr->add_option("--step", dvr.step);

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "VDI vs DVR over a camera path or angle sweep");
  c_bench->add_option("--volume", bench.volume)->required();
  c_bench->add_option("--tf", bench.tf)->required();
  c_bench->add_option("--camera", bench.camera, "generation camera");
  c_bench->add_option("--vdi", bench.vdi, "use an existing VDI instead of generating");
  c_bench->add_option("--path", bench.path, "camera path json; default is an angle sweep");
  c_bench->add_option("--angles", bench.angles, "comma-separated degrees for the sweep");
  c_bench->add_option("--ess", bench.ess, "on|off");
  c_bench->add_option("--out", bench.out)->required();
  add_gen_options(c_bench, bench.params);

  PathArgs pth;
  auto* c_path = app.add_subcommand("path", "write an orbit camera path about a center");
  c_path->add_option("--camera", pth.camera, "start camera")->required();
  c_path->add_option("--out", pth.out)->required();
  c_path->add_option("--steps", pth.steps, "poses after the first");
  c_path->add_option("--degrees", pth.degrees, "total orbit angle");
  c_path->add_option("--center", pth.center, "orbit center x y z")->expected(3);

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "stream VDIs for received poses");
  c_serve->add_option("--volume", serve.volume)->required();
  c_serve->add_option("--tf", serve.tf)->required();
  c_serve->add_option("--listen", serve.listen, "host:port");
  c_serve->add_option("--duration", serve.duration_s, "seconds; 0 runs until interrupted");
  add_gen_options(c_serve, serve.params);

  ClientArgs cli;
  auto* c_cli = app.add_subcommand("client", "receive VDIs and render locally");
  c_cli->add_option("--connect", cli.connect, "host:port");
  c_cli->add_flag("--headless", cli.headless, "play --path and write frames to --out-dir");
  c_cli->add_option("--viewer-port", cli.viewer_port, "serve the browser viewer on this port");
  c_cli->add_option("--path", cli.path, "camera path json");
  c_cli->add_option("--camera", cli.camera, "projection and initial orbit for the viewer");
  c_cli->add_option("--out-dir", cli.out_dir);
  c_cli->add_option("--width", cli.width);
  c_cli->add_option("--height", cli.height);
  c_cli->add_option("--n-sg", cli.n_sg);
  c_cli->add_option("--target-fps", cli.target_fps);
  c_cli->add_option("--d-r", cli.d_r, "preview sampling rate");
  c_cli->add_option("--frame-interval-ms", cli.frame_interval_ms);
  c_cli->add_option("--wait", cli.wait_s, "seconds to wait for the server and first VDI");
  c_cli->add_option("--repeat", cli.repeat, "path repetitions (headless)");
  c_cli->add_option("--duration", cli.duration_s, "seconds; 0 runs until interrupted (viewer)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_synth) return run_synth(synth);
    if (*c_gen) {
      gen.params.validate();
      return run_generate(gen);
    }
    if (*c_ren) return run_render(ren);
    if (*c_path) return run_path(pth);
    if (*c_dvr) return run_dvr(dvr);
    if (*c_bench) {
      if (bench.vdi.empty() && bench.camera.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "bench needs --camera or --vdi");
      }
      bench.params.validate();
      return run_bench_cmd(bench);
    }
    if (*c_serve) {
      serve.params.validate();
      return run_serve(serve);
    }
    if (*c_cli) return run_client(cli);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
