// hoi: compute connectivity views from multichannel time series.
//
//   hoi views   --input rec.csv | --manifest m.json  --views mi,oinfo --out dir
//   hoi inspect --tensor rec_oinfo.hoi --index 0,1,2 [--recompute --input rec.csv]

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hoi/batch.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pairwise mutual-information and O-information views of multichannel recordings"};
  app.set_version_flag("--version", hoi::kToolVersion);
  app.require_subcommand(1);

  double sigma = 5.0;
  double alpha = 1.01;
  unsigned threads = 0;
  std::string orientation = "rows-are-channels";
  std::string input;

  auto* views_cmd = app.add_subcommand("views", "Compute and write views");
  std::string manifest;
  std::string out_dir = ".";
  std::vector<std::string> views{"mi", "oinfo"};
  views_cmd->add_option("--input", input, "Recording CSV");
  views_cmd->add_option("--manifest", manifest, "Dataset manifest JSON");
  views_cmd->add_option("--views", views, "Comma-separated subset of pearson,mi,oinfo")
      ->delimiter(',');
  views_cmd->add_option("--sigma", sigma, "Gaussian kernel width")->capture_default_str();
  views_cmd->add_option("--alpha", alpha, "Renyi order")->capture_default_str();
  views_cmd->add_option("--threads", threads, "Worker threads (default: HOI_THREADS or all cores)");
  views_cmd->add_option("--orientation", orientation, "rows-are-channels | rows-are-timepoints")
      ->capture_default_str();
  views_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* inspect_cmd = app.add_subcommand("inspect", "Print one cell of an HOI1 tensor");
  std::string tensor;
  std::vector<std::size_t> index;
  bool recompute = false;
  inspect_cmd->add_option("--tensor", tensor, "HOI1 tensor file")->required();
  inspect_cmd->add_option("--index", index, "Cell index i,j,k")
      ->delimiter(',')
      ->expected(3)
      ->required();
  inspect_cmd->add_flag("--recompute", recompute, "Recompute TC/DTC/O from --input");
  inspect_cmd->add_option("--input", input, "Source recording CSV (with --recompute)");
  inspect_cmd->add_option("--sigma", sigma, "Gaussian kernel width")->capture_default_str();
  inspect_cmd->add_option("--alpha", alpha, "Renyi order")->capture_default_str();
  inspect_cmd->add_option("--orientation", orientation, "rows-are-channels | rows-are-timepoints")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hoi::exit_code::kConfigError;
  }

  try {
    if (*views_cmd) {
      hoi::RunConfig config;
      config.params = {sigma, alpha};
      config.threads = threads;
      config.orientation = hoi::parse_orientation(orientation);
      config.output_dir = out_dir;
      config.views.clear();
      for (const auto& v : views) config.views.insert(hoi::parse_view(v));
      if (!input.empty()) config.input = input;
      if (!manifest.empty()) config.manifest = manifest;
      return hoi::run_views(config, std::cerr);
    }
    hoi::InspectRequest req;
    req.tensor_path = tensor;
    req.i = index.at(0);
    req.j = index.at(1);
    req.k = index.at(2);
    req.recompute = recompute;
    if (!input.empty()) req.input = input;
    req.orientation = hoi::parse_orientation(orientation);
    req.params = {sigma, alpha};
    return hoi::run_inspect(req, std::cout, std::cerr);
  } catch (const hoi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return hoi::exit_code::kConfigError;
  }
}
