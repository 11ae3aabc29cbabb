// dlcli: dead-leaves image generation and exact Bayesian segmentation of
// small pixel windows. Subcommands: generate | prior | likelihood | observe |
// oracle | partitions. Exit codes: 0 ok, 1 computation error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "deadleaves/deadleaves.hpp"

namespace dl = deadleaves;
using dl::json;

namespace {

// --color gaussian:mu1[,mu2,mu3]:sigma | uniform:levels
// --texture gaussian:sigma | uniform:halfwidth
std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& piece : split(s, ',')) out.push_back(std::stod(piece));
  return out;
}

dl::ColorTextureModel parse_model(const std::string& color, const std::string& texture,
                                  int channels) {
  dl::ColorTextureModel model;
  model.channels = channels;
  const auto cp = split(color, ':');
  const auto tp = split(texture, ':');
  if (cp.empty() || tp.empty()) throw CLI::ValidationError("empty model spec");
  if (cp[0] == "uniform") {
    if (cp.size() != 2 || tp.size() != 2 || tp[0] != "uniform")
      throw CLI::ValidationError("uniform color requires --color uniform:levels and "
                                 "--texture uniform:halfwidth");
    dl::UniformDiscreteModel u;
    u.color_levels = std::stoi(cp[1]);
    u.texture_halfwidth = std::stoi(tp[1]);
    model.variant = u;
  } else if (cp[0] == "gaussian") {
    if (cp.size() != 3 || tp.size() != 2 || tp[0] != "gaussian")
      throw CLI::ValidationError("gaussian color requires --color gaussian:mu[,mu,mu]:sigma and "
                                 "--texture gaussian:sigma");
    dl::GaussianModel g;
    g.mu_c = parse_doubles(cp[1]);
    if (g.mu_c.size() == 1) g.mu_c.assign(static_cast<std::size_t>(channels), g.mu_c[0]);
    g.sigma_c.assign(static_cast<std::size_t>(channels), std::stod(cp[2]));
    g.sigma_t.assign(static_cast<std::size_t>(channels), std::stod(tp[1]));
    model.variant = g;
  } else {
    throw CLI::ValidationError("unknown color model '" + cp[0] + "'");
  }
  dl::validate_model(model);
  return model;
}

// --likelihood gaussian:mu:sigma_c:sigma_t | uniform:texture_levels
dl::ColorTextureModel parse_likelihood_model(const std::string& spec, int channels) {
  const auto p = split(spec, ':');
  dl::ColorTextureModel model;
  model.channels = channels;
  if (p.empty()) throw CLI::ValidationError("empty likelihood spec");
  if (p[0] == "gaussian") {
    if (p.size() != 4)
      throw CLI::ValidationError("expected --likelihood gaussian:mu:sigma_c:sigma_t");
    dl::GaussianModel g;
    g.mu_c.assign(static_cast<std::size_t>(channels), std::stod(p[1]));
    g.sigma_c.assign(static_cast<std::size_t>(channels), std::stod(p[2]));
    g.sigma_t.assign(static_cast<std::size_t>(channels), std::stod(p[3]));
    model.variant = g;
  } else if (p[0] == "uniform") {
    if (p.size() < 2) throw CLI::ValidationError("expected --likelihood uniform:texture_levels");
    dl::UniformDiscreteModel u;
    const int levels = std::stoi(p[1]);
    if (levels < 1 || levels % 2 == 0)
      throw CLI::ValidationError("uniform likelihood: texture level count must be odd");
    u.texture_halfwidth = (levels - 1) / 2;
    u.color_levels = p.size() > 2 ? std::stoi(p[2]) : 256;
    model.variant = u;
  } else {
    throw CLI::ValidationError("unknown likelihood model '" + p[0] + "'");
  }
  dl::validate_model(model);
  return model;
}

json json_from_arg(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw std::runtime_error("cannot open " + arg.substr(1));
    json j;
    in >> j;
    return j;
  }
  return json::parse(arg);
}

// pixel window: either a rectangle x0,y0,w,h over integer pixels (origin at
// the bottom-left) or an explicit JSON list of [x, y] points
dl::PixelSet parse_window(const std::string& window, const std::string& pixels) {
  dl::PixelSet a;
  if (!window.empty()) {
    const auto p = split(window, ',');
    if (p.size() != 4) throw CLI::ValidationError("--window expects x0,y0,w,h");
    const int x0 = std::stoi(p[0]), y0 = std::stoi(p[1]);
    const int w = std::stoi(p[2]), h = std::stoi(p[3]);
    if (w < 1 || h < 1) throw CLI::ValidationError("--window needs positive extent");
    for (int y = y0; y < y0 + h; ++y)
      for (int x = x0; x < x0 + w; ++x)
        a.points.push_back({static_cast<double>(x), static_cast<double>(y)});
  } else if (!pixels.empty()) {
    a = dl::pixel_set_from_json(json_from_arg(pixels));
    dl::sort_row_major(a);
  } else {
    throw CLI::ValidationError("one of --window or --pixels is required");
  }
  dl::validate_pixel_set(a);
  return a;
}

dl::PixelSet parse_grid(const std::string& grid) {
  const auto p = split(grid, 'x');
  if (p.size() != 2) throw CLI::ValidationError("--grid expects WxH");
  dl::PixelSet a;
  const int w = std::stoi(p[0]), h = std::stoi(p[1]);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) a.points.push_back({static_cast<double>(x), static_cast<double>(y)});
  return a;
}

void write_output(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
  }
}

std::string partition_string(const dl::Partition& m, const dl::PixelSet& a) {
  return dl::partition_to_json(m, a).dump();
}

int default_threads() {
  if (const char* env = std::getenv("DEADLEAVES_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

json config_echo(const dl::RadiusLaw& law) {
  return json{{"r_min", law.r_min}, {"r_max", law.r_max}, {"s", law.s}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dead-leaves generator and exact segmentation observer"};
  app.require_subcommand(1);
  app.set_config("--config");
  app.failure_message(CLI::FailureMessage::help);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "sample a dead-leaves scene and render it");
  int g_size = 500;
  double g_rmin = 5.0, g_rmax = 50.0;
  std::uint64_t g_seed = 0;
  std::string g_color = "gaussian:0.5,0.5,0.5:0.1", g_texture = "gaussian:0.05";
  int g_channels = 3;
  std::string g_scene = "scene.json", g_image = "image.pfm", g_preview;
  gen->add_option("--size", g_size, "image side length in pixels")->check(CLI::PositiveNumber);
  gen->add_option("--rmin", g_rmin, "minimal leaf radius");
  gen->add_option("--rmax", g_rmax, "maximal leaf radius");
  gen->add_option("--seed", g_seed, "master seed");
  gen->add_option("--color", g_color, "color model: gaussian:mu[,mu,mu]:sigma | uniform:levels");
  gen->add_option("--texture", g_texture, "texture model: gaussian:sigma | uniform:halfwidth");
  gen->add_option("--channels", g_channels, "1 or 3");
  gen->add_option("--scene", g_scene, "output scene file (JSON)");
  gen->add_option("--image", g_image, "output image file (PFM float)");
  gen->add_option("--preview", g_preview, "optional 16-bit PPM/PGM preview");

  // ---- prior ----
  auto* pri = app.add_subcommand("prior", "analytic partition prior");
  std::string p_grid, p_pixels, p_partition, p_table_out, p_out;
  double p_rmin = 1.0, p_rmax = 2.0, p_s = 0.0;
  bool p_all = false;
  int p_cap = dl::PartitionEnumerator::kDefaultCap;
  pri->add_option("--grid", p_grid, "pixel grid WxH at integer coordinates");
  pri->add_option("--pixels", p_pixels, "explicit pixel list, JSON or @file");
  pri->add_option("--partition", p_partition, "partition as JSON blocks of [x,y], or @file");
  pri->add_option("--rmin", p_rmin, "minimal leaf radius");
  pri->add_option("--rmax", p_rmax, "maximal leaf radius");
  pri->add_option("--frame", p_s, "visible-area side length s (does not change the prior)");
  pri->add_flag("--all", p_all, "sweep every partition of the set instead");
  pri->add_option("--cap", p_cap, "enumeration cap on |a|");
  pri->add_option("--export-table", p_table_out, "write the leaf-probability table JSON here");
  pri->add_option("-o,--out", p_out, "output path, - for stdout");

  // ---- likelihood ----
  auto* lik = app.add_subcommand("likelihood", "log-likelihood of an image window");
  std::string l_image, l_window, l_pixels, l_partition, l_model = "gaussian:0.6:0.1:0.01", l_out;
  lik->add_option("--image", l_image, "PFM image file")->required();
  lik->add_option("--window", l_window, "rectangle x0,y0,w,h");
  lik->add_option("--pixels", l_pixels, "explicit pixel list, JSON or @file");
  lik->add_option("--partition", l_partition, "partition JSON or @file")->required();
  lik->add_option("--model", l_model,
                  "gaussian:mu:sigma_c:sigma_t | uniform:texture_levels[:color_levels]");
  lik->add_option("-o,--out", l_out, "output path, - for stdout");

  // ---- observe ----
  auto* obs = app.add_subcommand("observe", "full posterior sweep and MAP");
  std::string o_image, o_window, o_pixels, o_model = "gaussian:0.6:0.1:0.01";
  std::string o_records, o_csv, o_out;
  double o_rmin = 1.0, o_rmax = 2.0;
  int o_topk = 15, o_cap = dl::PartitionEnumerator::kDefaultCap, o_threads = default_threads();
  obs->add_option("--image", o_image, "PFM image file")->required();
  obs->add_option("--window", o_window, "rectangle x0,y0,w,h");
  obs->add_option("--pixels", o_pixels, "explicit pixel list, JSON or @file");
  obs->add_option("--rmin", o_rmin, "minimal leaf radius");
  obs->add_option("--rmax", o_rmax, "maximal leaf radius");
  obs->add_option("--likelihood", o_model, "likelihood model spec");
  obs->add_option("--top-k", o_topk, "rows kept in the summary table");
  obs->add_option("--cap", o_cap, "enumeration cap on |a|");
  obs->add_option("--threads", o_threads, "worker threads (same numbers for any N)");
  obs->add_option("--records", o_records, "write every record as JSON-lines here");
  obs->add_option("--csv", o_csv, "write the top-k table as CSV here");
  obs->add_option("-o,--out", o_out, "summary output path, - for stdout");

  // ---- oracle ----
  auto* ora = app.add_subcommand("oracle", "independent estimators for validation");
  ora->require_subcommand(1);
  std::string or_pixels, or_subset, or_partition, or_out;
  double or_rmin = 1.0, or_rmax = 2.0, or_s = 0.0;
  std::uint64_t or_samples = 1'000'000, or_seed = 1;
  int or_pos_res = 500, or_rad_res = 200;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--pixels", or_pixels, "pixel list JSON or @file")->required();
    cmd->add_option("--rmin", or_rmin, "minimal leaf radius");
    cmd->add_option("--rmax", or_rmax, "maximal leaf radius");
    cmd->add_option("--frame", or_s, "visible-area side length");
    cmd->add_option("-o,--out", or_out, "output path, - for stdout");
  };
  auto* mc_leaf = ora->add_subcommand("mc-leaf", "Monte Carlo leaf probability");
  add_common(mc_leaf);
  mc_leaf->add_option("--subset", or_subset, "target subset as JSON points or @file")->required();
  mc_leaf->add_option("--samples", or_samples, "sample count");
  mc_leaf->add_option("--seed", or_seed, "rng seed");
  auto* grid_leaf = ora->add_subcommand("grid-leaf", "grid-approximated leaf probability");
  add_common(grid_leaf);
  grid_leaf->add_option("--subset", or_subset, "target subset as JSON points or @file")->required();
  grid_leaf->add_option("--pos-res", or_pos_res, "positions per axis");
  grid_leaf->add_option("--rad-res", or_rad_res, "radius cells");
  auto* mc_prior = ora->add_subcommand("mc-prior", "Monte Carlo partition prior");
  add_common(mc_prior);
  mc_prior->add_option("--partition", or_partition, "target partition JSON or @file")->required();
  mc_prior->add_option("--samples", or_samples, "sample count");
  mc_prior->add_option("--seed", or_seed, "rng seed");

  // ---- partitions ----
  auto* par = app.add_subcommand("partitions", "set-partition counts and enumeration");
  int pa_count = -1, pa_list = -1, pa_cap = dl::PartitionEnumerator::kDefaultCap;
  std::string pa_out;
  par->add_option("--count", pa_count, "print Bell(n), the number of partitions");
  par->add_option("--list", pa_list, "stream all partitions of {0..n-1} as JSON lines");
  par->add_option("--cap", pa_cap, "enumeration cap");
  par->add_option("-o,--out", pa_out, "output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      dl::RadiusLaw law{g_rmin, g_rmax, static_cast<double>(g_size)};
      dl::validate_law(law);
      const auto model = parse_model(g_color, g_texture, g_channels);
      const dl::Scene scene = dl::generate_scene(g_size, law, g_seed);
      const dl::Image image = dl::render_image(scene, model, g_seed);
      dl::write_scene(scene, g_scene);
      dl::write_image_pfm(image, g_image);
      if (!g_preview.empty()) dl::write_image_quant16(image, g_preview);
      json summary{{"law", config_echo(scene.law)},
                   {"seed", g_seed},
                   {"channels", g_channels},
                   {"color", g_color},
                   {"texture", g_texture},
                   {"leaves", scene.leaves.size()},
                   {"scene", g_scene},
                   {"image", g_image}};
      if (!g_preview.empty()) summary["preview"] = g_preview;
      std::cout << summary.dump(2) << "\n";
    } else if (pri->parsed()) {
      dl::PixelSet a = p_grid.empty() ? parse_window("", p_pixels) : parse_grid(p_grid);
      dl::RadiusLaw law{p_rmin, p_rmax, p_s};
      dl::validate_law(law);
      dl::PriorEngine engine(a, law);
      json out{{"law", config_echo(law)}, {"pixels", dl::pixel_set_to_json(a)}};
      if (!p_table_out.empty()) {
        const auto table = engine.table_for((dl::SubsetMask{1} << a.size()) - 1u);
        write_output(dl::leaf_table_to_json(*table), p_table_out);
      }
      if (p_all) {
        dl::PartitionEnumerator en(a.size(), p_cap);
        dl::Partition m;
        json rows = json::array();
        while (en.next(m)) {
          const auto r = engine.prior_unordered(m);
          rows.push_back({{"partition", dl::partition_to_json(m, a)},
                          {"prior", r.value},
                          {"log_prior", r.log_value}});
        }
        out["partitions"] = std::move(rows);
      } else {
        if (p_partition.empty())
          throw CLI::ValidationError("prior: --partition required unless --all");
        const dl::Partition m = dl::partition_from_json(json_from_arg(p_partition), a);
        dl::validate_partition(m, (dl::SubsetMask{1} << a.size()) - 1u);
        const auto ord = engine.prior_ordered(m);
        const auto uno = engine.prior_unordered(m);
        out["partition"] = dl::partition_to_json(m, a);
        out["ordered"] = {{"prior", ord.value}, {"log_prior", ord.log_value}};
        out["unordered"] = {{"prior", uno.value}, {"log_prior", uno.log_value}};
      }
      write_output(out, p_out);
    } else if (lik->parsed()) {
      const dl::Image image = dl::read_image_pfm(l_image);
      const dl::PixelSet a = parse_window(l_window, l_pixels);
      const dl::ObservationWindow w = dl::window_from_image(image, a);
      const auto model = parse_likelihood_model(l_model, image.channels);
      const dl::Partition m = dl::partition_from_json(json_from_arg(l_partition), a);
      dl::validate_partition(m, (dl::SubsetMask{1} << a.size()) - 1u);
      json blocks = json::array();
      double total = 0.0;
      for (dl::SubsetMask b : m.blocks) {
        double lb;
        if (const auto* g = std::get_if<dl::GaussianModel>(&model.variant)) {
          lb = dl::log_likelihood_gaussian_block(w, b, *g);
        } else {
          dl::ObservationWindow sw;  // likelihood of one block = restriction
          for (int k = 0; k < a.size(); ++k)
            if (b >> k & 1u) {
              sw.pixels.points.push_back(a[k]);
              sw.values.push_back(w.values[static_cast<std::size_t>(k)]);
            }
          sw.channels = w.channels;
          dl::Partition whole{{(dl::SubsetMask{1} << sw.pixels.size()) - 1u}};
          lb = dl::log_likelihood_uniform(sw, whole,
                                          std::get<dl::UniformDiscreteModel>(model.variant));
        }
        blocks.push_back({{"block", dl::partition_to_json(dl::Partition{{b}}, a)[0]},
                          {"log_likelihood", lb}});
        total += lb;
      }
      json out{{"model", l_model},
               {"blocks", blocks},
               {"log_likelihood", total},
               {"pixels", dl::pixel_set_to_json(a)}};
      write_output(out, l_out);
    } else if (obs->parsed()) {
      const dl::Image image = dl::read_image_pfm(o_image);
      const dl::PixelSet a = parse_window(o_window, o_pixels);
      const dl::ObservationWindow w = dl::window_from_image(image, a);
      const auto model = parse_likelihood_model(o_model, image.channels);
      dl::RadiusLaw law{o_rmin, o_rmax, static_cast<double>(image.side)};
      dl::validate_law(law);
      dl::SweepOptions opts;
      opts.cap = o_cap;
      opts.threads = o_threads;
      std::ofstream records;
      if (!o_records.empty()) {
        records.open(o_records);
        if (!records) throw std::runtime_error("cannot open " + o_records);
      }
      const auto sink = [&](const dl::PosteriorRecord& rec) {
        if (!records.is_open()) return;
        records << json{{"partition", dl::partition_to_json(rec.partition, a)},
                        {"log_prior", rec.log_prior},
                        {"log_likelihood", rec.log_likelihood},
                        {"posterior", rec.posterior},
                        {"tie", rec.tie}}
                       .dump()
                << "\n";
      };
      const dl::SweepResult result = dl::posterior_sweep(w, law, model, opts, sink);
      const auto top = dl::top_k(result, static_cast<std::size_t>(std::max(1, o_topk)));
      if (!o_csv.empty()) {
        std::ofstream csv(o_csv);
        if (!csv) throw std::runtime_error("cannot open " + o_csv);
        csv << "partition,log_prior,log_likelihood,posterior\n";
        for (const auto& rec : top) {
          csv << '"' << partition_string(rec.partition, a) << '"';
          char buf[64];
          std::snprintf(buf, sizeof buf, ",%.6g,%.6g,%.6g\n", rec.log_prior,
                        rec.log_likelihood, rec.posterior);
          csv << buf;
        }
      }
      const auto& map = dl::map_partition(result);
      json top_json = json::array();
      for (const auto& rec : top)
        top_json.push_back({{"partition", dl::partition_to_json(rec.partition, a)},
                            {"log_prior", rec.log_prior},
                            {"log_likelihood", rec.log_likelihood},
                            {"posterior", rec.posterior},
                            {"tie", rec.tie}});
      json out{{"law", config_echo(law)},
               {"model", o_model},
               {"pixels", dl::pixel_set_to_json(a)},
               {"n_partitions", result.n_partitions},
               {"map", {{"partition", dl::partition_to_json(map.partition, a)},
                        {"posterior", map.posterior},
                        {"tie", map.tie}}},
               {"top", top_json}};
      write_output(out, o_out);
    } else if (ora->parsed()) {
      dl::PixelSet a = dl::pixel_set_from_json(json_from_arg(or_pixels));
      dl::sort_row_major(a);
      dl::RadiusLaw law{or_rmin, or_rmax, or_s};
      dl::validate_law(law);
      json out{{"law", config_echo(law)}, {"pixels", dl::pixel_set_to_json(a)}};
      if (mc_leaf->parsed() || grid_leaf->parsed()) {
        const dl::PixelSet sub = dl::pixel_set_from_json(json_from_arg(or_subset));
        dl::SubsetMask v = 0;
        for (const dl::Point2& p : sub.points)
          v |= dl::SubsetMask{1} << dl::pixel_index(a, p.x, p.y);
        const dl::Estimate est =
            mc_leaf->parsed()
                ? dl::mc_leaf_probability(a, v, law, or_samples, or_seed)
                : dl::grid_leaf_probability(a, v, law, or_pos_res, or_rad_res);
        const dl::RadiusLaw framed = dl::framed_law(a, law);
        const auto table = dl::leaf_prob_table(a, framed);
        const double analytic = table.mass(v) * dl::mass_scale_factor(framed);
        out.update(dl::estimate_to_json(est));
        out["target"] = mc_leaf->parsed() ? "mc_leaf_probability" : "grid_leaf_probability";
        out["analytic"] = analytic;
        out["z_score"] =
            est.std_error > 0.0 ? (est.value - analytic) / est.std_error : 0.0;
      } else {
        const dl::Partition m = dl::partition_from_json(json_from_arg(or_partition), a);
        dl::validate_partition(m, (dl::SubsetMask{1} << a.size()) - 1u);
        const dl::Estimate est = dl::mc_partition_prior(a, m, law, or_samples, or_seed);
        const auto analytic = dl::prior_unordered(a, m, law);
        out.update(dl::estimate_to_json(est));
        out["target"] = "mc_partition_prior";
        out["analytic"] = analytic.value;
        out["z_score"] =
            est.std_error > 0.0 ? (est.value - analytic.value) / est.std_error : 0.0;
      }
      write_output(out, or_out);
    } else if (par->parsed()) {
      json out;
      if (pa_count >= 0) out["count"] = dl::bell_number(pa_count);
      if (pa_list >= 0) {
        dl::PixelSet a;
        for (int k = 0; k < pa_list; ++k) a.points.push_back({static_cast<double>(k), 0.0});
        dl::PartitionEnumerator en(pa_list, pa_cap);
        dl::Partition m;
        json rows = json::array();
        std::uint64_t count = 0;
        while (en.next(m)) {
          rows.push_back(dl::partition_to_json(m, a));
          ++count;
        }
        out["partitions"] = std::move(rows);
        out["count"] = count;
      }
      if (pa_count < 0 && pa_list < 0)
        throw CLI::ValidationError("partitions: one of --count or --list is required");
      write_output(out, pa_out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
