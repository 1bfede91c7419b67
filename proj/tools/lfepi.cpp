// Command-line front end: dataset generation, training, reconstruction,
// evaluation, spectrum diagnostics and depth-assisted rendering.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lfepi/lfepi.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string config_path_placeholder;  // bound to every subcommand's --config

void add_config_option(CLI::App* sub) {
  sub->add_option("--config", config_path_placeholder,
                  "flat JSON config file; explicit flags override it");
}

/// Expands a `--config file.json` argument into option tokens inserted right
/// after the subcommand, so later (explicit) flags take precedence through
/// the take-last policy.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string cfg_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) cfg_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) cfg_path = args[i].substr(9);
  }
  if (cfg_path.empty() || args.empty()) return args;
  std::ifstream in(cfg_path);
  if (!in) throw std::invalid_argument("cannot open config file " + cfg_path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("malformed config file " + cfg_path + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  auto scalar = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      tokens.push_back("--" + key + "=" + (value.get<bool>() ? "true" : "false"));
    } else if (value.is_array()) {
      tokens.push_back("--" + key);
      for (const auto& v : value) tokens.push_back(scalar(v));
    } else {
      tokens.push_back("--" + key);
      tokens.push_back(scalar(value));
    }
  }
  // insert after the subcommand token (the first argument)
  args.insert(args.begin() + 1, tokens.begin(), tokens.end());
  return args;
}

/// Later occurrences of a flag override earlier (config-injected) ones.
void apply_take_last(CLI::App& app) {
  for (CLI::App* sub : app.get_subcommands({}))
    for (CLI::Option* opt : sub->get_options())
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

struct KernelFlags {
  std::string kind = "gaussian";
  double sigma = 0.0;   // 0 = derive from d_max
  double d_max = 4.0;
};

void add_kernel_flags(CLI::App* sub, KernelFlags& kf) {
  sub->add_option("--kernel", kf.kind, "blur kernel kind")
      ->check(CLI::IsMember({"sinc", "butterworth", "gaussian"}));
  sub->add_option("--sigma", kf.sigma, "kernel shape parameter (overrides --d-max)");
  sub->add_option("--d-max", kf.d_max,
                  "largest disparity between input neighbors; sets sigma = 1.5*d/4");
}

lfepi::BlurKernel kernel_from_flags(const KernelFlags& kf) {
  const double sigma = kf.sigma > 0.0 ? kf.sigma : lfepi::sigma_for_max_disparity(kf.d_max);
  return lfepi::make_kernel(lfepi::kernel_kind_from_string(kf.kind), sigma);
}

std::vector<std::pair<long, double>> parse_schedule(const std::string& s) {
  // "0:0.01,25000:0.001,50000:0.0001"
  std::vector<std::pair<long, double>> sched;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("bad --lr-schedule entry '" + item + "' (want iter:lr)");
    sched.emplace_back(std::stol(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  if (sched.empty()) throw std::invalid_argument("--lr-schedule is empty");
  return sched;
}

json scene_meta_json(const lfepi::SceneMeta& m) {
  return json{{"name", m.name},
              {"split", m.split},
              {"kind", m.kind},
              {"sparse_disparity", m.sparse_disparity},
              {"dense_views", m.dense_views},
              {"sparse_step", m.sparse_step}};
}

int cmd_gen(std::uint64_t seed, const fs::path& out) {
  const auto suite = lfepi::make_benchmark_suite(seed);
  fs::create_directories(out);
  json index;
  index["seed"] = seed;
  index["scenes"] = json::array();
  for (const auto& sc : suite) {
    const fs::path dir = out / sc.meta.name;
    lfepi::save_lightfield(sc.dense, dir / "dense");
    lfepi::save_lightfield(sc.sparse, dir / "sparse");
    std::ofstream meta(dir / "scene.json", std::ios::trunc);
    meta << scene_meta_json(sc.meta).dump(2) << "\n";
    index["scenes"].push_back(scene_meta_json(sc.meta));
  }
  std::ofstream idx(out / "suite.json", std::ios::trunc);
  idx << index.dump(2) << "\n";
  std::cout << "wrote " << suite.size() << " scenes to " << out.string() << "\n";
  return 0;
}

std::vector<lfepi::SceneMeta> load_suite_index(const fs::path& suite_dir) {
  std::ifstream in(suite_dir / "suite.json");
  if (!in) throw std::runtime_error("cannot open " + (suite_dir / "suite.json").string());
  json index;
  in >> index;
  std::vector<lfepi::SceneMeta> metas;
  for (const auto& s : index.at("scenes")) {
    lfepi::SceneMeta m;
    m.name = s.at("name").get<std::string>();
    m.split = s.at("split").get<std::string>();
    m.kind = s.at("kind").get<std::string>();
    m.sparse_disparity = s.at("sparse_disparity").get<double>();
    m.dense_views = s.at("dense_views").get<int>();
    m.sparse_step = s.at("sparse_step").get<int>();
    metas.push_back(std::move(m));
  }
  return metas;
}

lfepi::DisparityMap load_disparity(const fs::path& pgm, double d_min, double d_max,
                                   bool range_given) {
  if (!range_given) {
    const fs::path sidecar = fs::path(pgm).replace_extension(".json");
    std::ifstream in(sidecar);
    if (!in)
      throw std::runtime_error("disparity range missing: pass --disp-min/--disp-max or provide " +
                               sidecar.string());
    json j;
    in >> j;
    d_min = j.at("d_min").get<double>();
    d_max = j.at("d_max").get<double>();
  }
  const lfepi::PnmImage img = lfepi::read_pnm(pgm);
  if (img.channels != 1) throw std::runtime_error("disparity map must be a PGM");
  lfepi::DisparityMap dm;
  dm.d_min = d_min;
  dm.d_max = d_max;
  dm.values = lfepi::Image2D(img.height, img.width);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      dm.values.at(y, x) = d_min + (d_max - d_min) * img.at(y, x, 0);
  dm.validate();
  return dm;
}

lfepi::EPI epi_from_pgm(const fs::path& pgm) {
  const lfepi::PnmImage img = lfepi::read_pnm(pgm);
  if (img.channels != 1) throw std::runtime_error("EPI input must be a PGM (rows = views)");
  lfepi::EPI e(img.height, img.width);
  for (int a = 0; a < img.height; ++a)
    for (int x = 0; x < img.width; ++x) e.at(a, x) = img.at(a, x, 0);
  return e;
}

void write_epi_pgm(const lfepi::EPI& e, const fs::path& path) {
  std::vector<double> px(e.pix);
  lfepi::write_pnm(path, e.n_views, e.width, 1, 65535, px);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EPI-based light-field angular super-resolution toolkit"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate the deterministic benchmark suite");
  std::uint64_t gen_seed = 7;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "suite seed");
  gen->add_option("--out", gen_out, "output directory")->required();
  add_config_option(gen);

  // ---- train ----------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "build the training set and train the network");
  std::string tr_suite, tr_out, tr_loss_csv, tr_schedule = "0:0.01,25000:0.001,50000:0.0001";
  std::string tr_factors = "2,4";
  lfepi::TrainConfig tr_cfg;
  tr_cfg.total_iterations = 20000;
  KernelFlags tr_kf;
  double tr_min_disparity = 0.0;
  int tr_threads = 1;
  tr->add_option("--suite", tr_suite, "suite directory from `gen`")->required();
  tr->add_option("--out", tr_out, "weights output file")->required();
  tr->add_option("--iterations", tr_cfg.total_iterations, "training iterations");
  tr->add_option("--batch", tr_cfg.batch_size, "mini-batch size");
  tr->add_option("--momentum", tr_cfg.momentum, "SGD momentum");
  tr->add_option("--lr-schedule", tr_schedule, "comma list of iter:lr plateaus");
  tr->add_option("--seed", tr_cfg.seed, "training seed");
  tr->add_option("--init-std", tr_cfg.init_std, "weight init standard deviation");
  tr->add_option("--patch-size", tr_cfg.patch_size, "training patch size");
  tr->add_option("--patch-stride", tr_cfg.patch_stride, "training patch stride");
  tr->add_option("--factors", tr_factors, "comma list of downsampling factors");
  tr->add_option("--min-disparity", tr_min_disparity,
                 "train only on scenes with at least this sparse disparity");
  tr->add_option("--noise-std", tr_cfg.noise_std, "augmentation noise std");
  tr->add_flag("--flip,!--no-flip", tr_cfg.aug_flip, "flip augmentation");
  tr->add_flag("--scale-aug,!--no-scale-aug", tr_cfg.aug_scale, "scale augmentation");
  tr->add_flag("--noise", tr_cfg.aug_gaussian_noise, "noisy-input augmentation");
  tr->add_flag("--spatial-downsample", tr_cfg.aug_spatial_downsample,
               "spatially downsampled variant");
  tr->add_option("--threads", tr_threads, "worker threads");
  tr->add_option("--loss-csv", tr_loss_csv, "write the recorded loss curve here");
  add_kernel_flags(tr, tr_kf);
  add_config_option(tr);

  // ---- reconstruct ----------------------------------------------------------
  auto* rc = app.add_subcommand("reconstruct", "sparse light field -> dense light field");
  std::string rc_in, rc_out, rc_weights, rc_baseline;
  std::vector<int> rc_out_views;
  KernelFlags rc_kf;
  double rc_reg_eps = 1e-3;
  int rc_cascade = 2, rc_threads = 1, rc_bitdepth = 16;
  rc->add_option("--in", rc_in, "input light-field directory")->required();
  rc->add_option("--out", rc_out, "output light-field directory")->required();
  rc->add_option("--weights", rc_weights, "trained weights (omit for a zero network)");
  rc->add_option("--out-views", rc_out_views, "output angular size: T S")
      ->expected(2)
      ->required();
  rc->add_option("--reg-eps", rc_reg_eps, "deblur regularization");
  rc->add_option("--cascade-threshold", rc_cascade, "max per-stage upsampling factor");
  rc->add_option("--baseline", rc_baseline, "replace the restoration step")
      ->check(CLI::IsMember({"bicubic"}));
  rc->add_option("--threads", rc_threads, "worker threads");
  rc->add_option("--bitdepth", rc_bitdepth, "output bit depth")->check(CLI::IsMember({8, 16}));
  add_kernel_flags(rc, rc_kf);
  add_config_option(rc);

  // ---- reconstruct-seq --------------------------------------------------------
  auto* rs = app.add_subcommand("reconstruct-seq", "3D (view sequence) reconstruction");
  std::string rs_in, rs_out, rs_weights, rs_baseline;
  int rs_out_views = 0;
  KernelFlags rs_kf;
  double rs_reg_eps = 1e-3;
  int rs_cascade = 2, rs_threads = 1, rs_bitdepth = 16;
  rs->add_option("--in", rs_in, "input light-field directory (T = 1)")->required();
  rs->add_option("--out", rs_out, "output light-field directory")->required();
  rs->add_option("--weights", rs_weights, "trained weights (omit for a zero network)");
  rs->add_option("--out-views", rs_out_views, "output view count")->required();
  rs->add_option("--reg-eps", rs_reg_eps, "deblur regularization");
  rs->add_option("--cascade-threshold", rs_cascade, "max per-stage upsampling factor");
  rs->add_option("--baseline", rs_baseline, "replace the restoration step")
      ->check(CLI::IsMember({"bicubic"}));
  rs->add_option("--threads", rs_threads, "worker threads");
  rs->add_option("--bitdepth", rs_bitdepth, "output bit depth")->check(CLI::IsMember({8, 16}));
  add_kernel_flags(rs, rs_kf);
  add_config_option(rs);

  // ---- eval ----------------------------------------------------------------
  auto* ev = app.add_subcommand("eval", "compare a reconstruction against ground truth");
  std::string ev_recon, ev_truth, ev_report;
  std::vector<int> ev_in_views;
  bool ev_rgb = false;
  ev->add_option("--recon", ev_recon, "reconstructed light-field directory")->required();
  ev->add_option("--truth", ev_truth, "ground-truth light-field directory")->required();
  ev->add_option("--report", ev_report, "CSV report path")->required();
  ev->add_option("--in-views", ev_in_views,
                 "input lattice size T S; aggregates cover novel views only")
      ->expected(2);
  ev->add_flag("--rgb", ev_rgb, "evaluate RGB channels instead of luma");
  add_config_option(ev);

  // ---- spectrum --------------------------------------------------------------
  auto* sp = app.add_subcommand("spectrum", "Fourier diagnostics of one EPI");
  std::string sp_in, sp_out, sp_orient = "h";
  int sp_row = 0, sp_view = 0, sp_channel = 0, sp_pad = 0;
  double sp_cutoff = 0.0;
  sp->add_option("--in", sp_in, "light-field directory")->required();
  sp->add_option("--orientation", sp_orient, "EPI orientation")
      ->check(CLI::IsMember({"h", "v"}));
  sp->add_option("--row", sp_row, "fixed spatial index (y* or x*)");
  sp->add_option("--view", sp_view, "fixed angular index (t* or s*)");
  sp->add_option("--channel", sp_channel, "channel index");
  sp->add_option("--pad", sp_pad, "transform size (power of two; 0 = auto)");
  sp->add_option("--out", sp_out, "output prefix for .pgm/.csv")->required();
  sp->add_option("--cutoff", sp_cutoff, "also print the high-band energy ratio");
  add_config_option(sp);

  // ---- render-depth ------------------------------------------------------------
  auto* rd = app.add_subcommand("render-depth", "depth-assisted EPI rendering");
  std::string rd_epi, rd_disp, rd_out, rd_weights, rd_baseline;
  double rd_dmin = 0.0, rd_dmax = 0.0, rd_reg_eps = 1e-3;
  int rd_levels = 1, rd_out_views = 0, rd_cascade = 2;
  KernelFlags rd_kf;
  rd->add_option("--epi", rd_epi, "input EPI as PGM (rows are views)")->required();
  rd->add_option("--disparity", rd_disp, "disparity map PGM")->required();
  auto* omin = rd->add_option("--disp-min", rd_dmin, "disparity at gray level 0");
  auto* omax = rd->add_option("--disp-max", rd_dmax, "disparity at full gray");
  rd->add_option("--n-levels", rd_levels, "number of discretized disparity levels");
  rd->add_option("--out-views", rd_out_views, "output view count")->required();
  rd->add_option("--out", rd_out, "output EPI PGM")->required();
  rd->add_option("--weights", rd_weights, "trained weights (omit for a zero network)");
  rd->add_option("--reg-eps", rd_reg_eps, "deblur regularization");
  rd->add_option("--cascade-threshold", rd_cascade, "max per-stage upsampling factor");
  rd->add_option("--baseline", rd_baseline, "replace the restoration step")
      ->check(CLI::IsMember({"bicubic"}));
  add_kernel_flags(rd, rd_kf);
  add_config_option(rd);

  apply_take_last(app);
  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes reversed vectors
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      std::cout << app.help();
      return 0;
    }
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_seed, gen_out);

    if (tr->parsed()) {
      tr_cfg.lr_schedule = parse_schedule(tr_schedule);
      std::set<int> factors;
      {
        std::istringstream in(tr_factors);
        std::string item;
        while (std::getline(in, item, ',')) factors.insert(std::stoi(item));
      }
      const auto metas = load_suite_index(tr_suite);
      std::vector<lfepi::LightField4D> dense;
      for (const auto& m : metas) {
        if (m.split != "train" || m.sparse_disparity < tr_min_disparity) continue;
        dense.push_back(lfepi::load_lightfield(fs::path(tr_suite) / m.name / "dense"));
      }
      if (dense.empty()) throw std::runtime_error("no training scenes selected");
      const lfepi::BlurKernel kernel = kernel_from_flags(tr_kf);
      const auto pairs = lfepi::build_training_set(dense, kernel, factors, tr_cfg);
      lfepi::Network net = lfepi::init_network(tr_cfg.seed, tr_cfg.init_std);
      const lfepi::TrainState st = lfepi::train(net, pairs, tr_cfg, tr_threads);
      lfepi::save_weights(net, tr_out);
      if (!tr_loss_csv.empty()) {
        std::ofstream csv(tr_loss_csv, std::ios::trunc);
        csv << "iteration,loss\n";
        char buf[64];
        for (const auto& [it, loss] : st.loss_history) {
          std::snprintf(buf, sizeof(buf), "%ld,%.12g\n", it, loss);
          csv << buf;
        }
      }
      std::cout << "trained " << tr_cfg.total_iterations << " iterations on " << pairs.size()
                << " patch pairs\n";
      return 0;
    }

    if (rc->parsed() || rs->parsed()) {
      const bool seq = rs->parsed();
      lfepi::PipelineConfig cfg;
      cfg.kernel = kernel_from_flags(seq ? rs_kf : rc_kf);
      cfg.deblur_reg_eps = seq ? rs_reg_eps : rc_reg_eps;
      cfg.cascade_threshold = seq ? rs_cascade : rc_cascade;
      const std::string weights = seq ? rs_weights : rc_weights;
      const std::string baseline = seq ? rs_baseline : rc_baseline;
      if (!weights.empty() && baseline.empty()) cfg.net = lfepi::load_weights(weights);
      // baseline "bicubic" keeps the zero network: identity restoration
      const lfepi::LightField4D in = lfepi::load_lightfield(seq ? rs_in : rc_in);
      lfepi::LightField4D out;
      if (seq) {
        cfg.out_views_s = rs_out_views;
        cfg.out_views_t = 1;
        out = lfepi::reconstruct_view_sequence(in, cfg, rs_threads);
      } else {
        cfg.out_views_t = rc_out_views[0];
        cfg.out_views_s = rc_out_views[1];
        out = lfepi::reconstruct_lightfield(in, cfg, rc_threads);
      }
      lfepi::save_lightfield(out, seq ? rs_out : rc_out, seq ? rs_bitdepth : rc_bitdepth);
      std::cout << "wrote " << out.T << "x" << out.S << " light field\n";
      return 0;
    }

    if (ev->parsed()) {
      const lfepi::LightField4D recon = lfepi::load_lightfield(ev_recon);
      const lfepi::LightField4D truth = lfepi::load_lightfield(ev_truth);
      lfepi::MetricReport rep;
      if (ev_rgb && recon.C == 3) {
        for (int t = 0; t < recon.T; ++t)
          for (int s = 0; s < recon.S; ++s) {
            lfepi::ViewMetrics m;
            m.t = t;
            m.s = s;
            double mse = 0.0, ssim = 0.0;
            for (int c = 0; c < 3; ++c) {
              lfepi::Image2D a(recon.H, recon.W), b(recon.H, recon.W);
              for (int y = 0; y < recon.H; ++y)
                for (int x = 0; x < recon.W; ++x) {
                  a.at(y, x) = recon.at(t, s, y, x, c);
                  b.at(y, x) = truth.at(t, s, y, x, c);
                }
              mse += lfepi::mse_between(a.data, b.data);
              ssim += lfepi::ms_ssim(a, b);
            }
            mse /= 3.0;
            m.psnr_db = mse == 0.0 ? std::numeric_limits<double>::infinity()
                                   : 10.0 * std::log10(1.0 / mse);
            m.ms_ssim = ssim / 3.0;
            rep.views.push_back(m);
          }
      } else {
        rep = lfepi::evaluate_lightfield(recon, truth);
      }
      lfepi::write_metric_report(rep, ev_report);
      double mp, ms;
      if (ev_in_views.size() == 2) {
        const lfepi::ViewGrid grid =
            lfepi::make_view_grid(ev_in_views[0], ev_in_views[1], recon.T, recon.S);
        std::tie(mp, ms) = rep.mean_where(
            [&](int t, int s) { return grid.role(t, s) != lfepi::ViewRole::Input; });
      } else {
        std::tie(mp, ms) = rep.mean_where([](int, int) { return true; });
      }
      std::printf("mean_psnr=%.6f mean_ms_ssim=%.8f\n", mp, ms);
      return 0;
    }

    if (sp->parsed()) {
      const lfepi::LightField4D lf = lfepi::load_lightfield(sp_in);
      const lfepi::EpiOrientation o =
          sp_orient == "h" ? lfepi::EpiOrientation::Horizontal : lfepi::EpiOrientation::Vertical;
      const lfepi::EPI e = lfepi::extract_epi(lf, o, sp_row, sp_view, sp_channel);
      const int pad =
          sp_pad > 0 ? sp_pad : lfepi::next_power_of_two(std::max(e.n_views, e.width));
      const lfepi::Spectrum spec = lfepi::epi_power_spectrum(e, pad);
      lfepi::export_spectrum(spec, sp_out);
      if (sp_cutoff > 0.0)
        std::printf("highband_ratio=%.9f\n", lfepi::highband_energy_ratio(e, sp_cutoff));
      return 0;
    }

    if (rd->parsed()) {
      const lfepi::EPI epi = epi_from_pgm(rd_epi);
      const bool range_given = omin->count() > 0 && omax->count() > 0;
      const lfepi::DisparityMap dm = load_disparity(rd_disp, rd_dmin, rd_dmax, range_given);
      lfepi::PipelineConfig cfg;
      cfg.kernel = kernel_from_flags(rd_kf);
      cfg.deblur_reg_eps = rd_reg_eps;
      cfg.cascade_threshold = rd_cascade;
      if (!rd_weights.empty() && rd_baseline.empty()) cfg.net = lfepi::load_weights(rd_weights);
      lfepi::EPI out = lfepi::depth_assisted_render(epi, dm, cfg, rd_levels, rd_out_views);
      for (double& v : out.pix) v = std::clamp(v, 0.0, 1.0);
      write_epi_pgm(out, rd_out);
      std::cout << "wrote " << out.n_views << "-view EPI\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
