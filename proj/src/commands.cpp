#include "hazealign/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hazealign/error.hpp"
#include "hazealign/png_io.hpp"

namespace hazealign::cli {

namespace {

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string gamma_text(const GammaTriple& g) {
    return format_double(g.r) + "," + format_double(g.g) + "," + format_double(g.b);
}

}  // namespace

GammaTriple parse_gamma_triple(std::string_view text) {
    std::vector<double> values;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw InvalidArgument("bad gamma value '" + item + "'");
        values.push_back(v);
    }
    GammaTriple g;
    if (values.size() == 1) {
        g = {values[0], values[0], values[0]};
    } else if (values.size() == 3) {
        g = {values[0], values[1], values[2]};
    } else {
        throw InvalidArgument("gamma must be one value or three comma-separated values, got '" +
                              std::string(text) + "'");
    }
    g.validate();
    return g;
}

RgbStats cmd_stats(const StatsCommand& cmd) {
    const DatasetManifest manifest = read_manifest(cmd.manifest);
    const RgbStats stats = stats_from_histogram(manifest_histogram(manifest, cmd.subset));
    const ConfigEcho config{{"subcommand", "stats"},
                            {"manifest", cmd.manifest.string()},
                            {"subset", std::string(subset_name(cmd.subset))},
                            {"out", cmd.out.string()}};
    write_text_file(cmd.out, format_stats_report(stats, config));
    return stats;
}

AlignmentReport cmd_align(const AlignCommand& cmd) {
    const DatasetManifest source = read_manifest(cmd.source);
    const DatasetManifest target = read_manifest(cmd.target);
    const AlignmentReport report =
        align_dataset(source, target, cmd.out_dir, {.tolerance = cmd.tolerance, .subset = cmd.subset});
    const fs::path report_path = cmd.report.empty() ? cmd.out_dir / "alignment_report.txt" : cmd.report;
    const ConfigEcho config{{"subcommand", "align"},
                            {"source", cmd.source.string()},
                            {"target", cmd.target.string()},
                            {"out_dir", cmd.out_dir.string()},
                            {"tolerance", format_double(cmd.tolerance)},
                            {"subset", std::string(subset_name(cmd.subset))},
                            {"report", report_path.string()}};
    write_text_file(report_path, format_alignment_report(report, config));
    return report;
}

DatasetManifest cmd_transform(const TransformCommand& cmd) {
    cmd.gammas.validate();
    const DatasetManifest source = read_manifest(cmd.manifest);
    DatasetManifest out = transform_dataset(source, cmd.gammas, cmd.subset, cmd.out_dir);
    const ConfigEcho config{{"subcommand", "transform"},
                            {"manifest", cmd.manifest.string()},
                            {"gamma", gamma_text(cmd.gammas)},
                            {"subset", std::string(subset_name(cmd.subset))},
                            {"out_dir", cmd.out_dir.string()}};
    KeyValueWriter report;
    report.add("format", "hazealign-transform/1");
    report.add("tool_version", kToolVersion);
    report.add_config(config);
    report.add("records", static_cast<std::uint64_t>(out.records.size()));
    write_text_file(cmd.out_dir / "transform_report.txt", report.str());
    return out;
}

MetricReport cmd_eval(const EvalCommand& cmd) {
    const DatasetManifest manifest = read_manifest(cmd.gt_manifest);
    std::vector<PairRecord> records;
    for (const auto& r : manifest.records) {
        if (!cmd.split || r.split == *cmd.split) records.push_back(r);
    }
    if (records.empty()) throw InvalidArgument("no records to evaluate in " + cmd.gt_manifest.string());

    std::vector<fs::path> predictions;
    for (const auto& r : records) {
        const fs::path candidates[] = {cmd.pred_dir / r.gt_path.filename(), cmd.pred_dir / (r.id + ".png"),
                                       cmd.pred_dir / r.hazy_path.filename()};
        const auto found = std::find_if(std::begin(candidates), std::end(candidates),
                                        [](const fs::path& p) { return fs::is_regular_file(p); });
        if (found == std::end(candidates)) {
            throw IoError("missing prediction for pair " + r.id + " in " + cmd.pred_dir.string());
        }
        predictions.push_back(*found);
    }

    // One pair in memory at a time; SSIM itself is parallel.
    std::vector<PairMetrics> pairs;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ImageBuffer pred = load_image(predictions[i]);
        const ImageBuffer gt = load_image(manifest.gt_file(records[i]));
        pairs.push_back(evaluate_pair(records[i].id, pred, gt));
    }
    MetricReport report = summarize(std::move(pairs));

    const ConfigEcho config{{"subcommand", "eval"},
                            {"pred_dir", cmd.pred_dir.string()},
                            {"gt_manifest", cmd.gt_manifest.string()},
                            {"split", cmd.split ? std::string(split_name(*cmd.split)) : "all"},
                            {"out_report", cmd.out_report.string()},
                            {"out_csv", cmd.out_csv.string()}};
    if (!cmd.out_report.empty()) write_text_file(cmd.out_report, format_metric_report(report, config));
    if (!cmd.out_csv.empty()) write_text_file(cmd.out_csv, format_metric_csv(report));
    return report;
}

RgbHistogram cmd_hist(const HistCommand& cmd) {
    const DatasetManifest manifest = read_manifest(cmd.manifest);
    const RgbHistogram histogram = manifest_histogram(manifest, cmd.subset);
    write_text_file(cmd.out_csv, format_histogram_csv(histogram));
    return histogram;
}

AugmentPlan cmd_augment_sample(const AugmentSampleCommand& cmd) {
    const ImageBuffer hazy = load_image(cmd.hazy);
    const ImageBuffer gt = load_image(cmd.gt);
    const AugmentPlan plan = cmd.replay_plan.empty() ? sample_plan(cmd.seed, hazy.width(), hazy.height(), cmd.crop_size)
                                                     : parse_plan(read_text_file(cmd.replay_plan));
    const auto [hazy_out, gt_out] = sample_pair_augment(hazy, gt, plan);
    save_image(hazy_out, cmd.out_dir / "hazy.png");
    save_image(gt_out, cmd.out_dir / "gt.png");
    write_text_file(cmd.out_dir / "plan.txt", serialize_plan(plan));
    return plan;
}

SplitResult cmd_split(const SplitCommand& cmd) {
    const DatasetManifest manifest = read_manifest(cmd.manifest);
    SplitResult result = apply_split(manifest, cmd.policy, cmd.params);
    write_manifest(result.manifest, cmd.out);
    return result;
}

namespace {

std::string one_line(std::string text) {
    std::replace(text.begin(), text.end(), '\n', ' ');
    std::replace(text.begin(), text.end(), '\r', ' ');
    return text;
}

void print_stats(std::ostream& out, const RgbStats& stats) {
    for (Channel c : kChannels) {
        out << channel_name(c) << " mean=" << format_double(stats[c].mean)
            << " variance=" << format_double(stats[c].variance) << " pixels=" << stats[c].pixel_count << '\n';
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Per-channel gamma alignment and evaluation for paired hazy/clean datasets", "hazealign"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: hardware concurrency)")
        ->check(CLI::NonNegativeNumber);

    StatsCommand stats;
    auto* stats_cmd = app.add_subcommand("stats", "Per-channel mean, variance and histogram of a dataset");
    stats_cmd->add_option("--manifest", stats.manifest)->required();
    stats_cmd->add_option("--out", stats.out, "Report file")->required();

    AlignCommand align;
    auto* align_cmd = app.add_subcommand("align", "Solve per-channel gammas against a target dataset and write aligned copies");
    align_cmd->add_option("--source", align.source, "Source manifest")->required();
    align_cmd->add_option("--target", align.target, "Target manifest")->required();
    align_cmd->add_option("--out-dir", align.out_dir)->required();
    align_cmd->add_option("--tolerance", align.tolerance, "Mean residual tolerance (intensity levels)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    align_cmd->add_option("--report", align.report, "Report path (default OUT_DIR/alignment_report.txt)");

    TransformCommand transform;
    std::string gamma_text_arg;
    auto* transform_cmd = app.add_subcommand("transform", "Apply fixed per-channel gammas to a dataset");
    transform_cmd->add_option("--manifest", transform.manifest)->required();
    transform_cmd->add_option("--gamma", gamma_text_arg, "G or R,G,B")->required();
    transform_cmd->add_option("--out-dir", transform.out_dir)->required();

    EvalCommand eval;
    std::string eval_split;
    auto* eval_cmd = app.add_subcommand("eval", "PSNR, SSIM and MS-SSIM of predictions against ground truth");
    eval_cmd->add_option("--pred-dir", eval.pred_dir)->required();
    eval_cmd->add_option("--gt-manifest", eval.gt_manifest)->required();
    eval_cmd->add_option("--out-report", eval.out_report)->required();
    eval_cmd->add_option("--out-csv", eval.out_csv)->required();
    eval_cmd->add_option("--split", eval_split, "Only evaluate records tagged train, test, val or unassigned");

    HistCommand hist;
    auto* hist_cmd = app.add_subcommand("hist", "Per-channel normalized 256-bin histogram as CSV");
    hist_cmd->add_option("--manifest", hist.manifest)->required();
    hist_cmd->add_option("--out-csv", hist.out_csv)->required();

    AugmentSampleCommand augment;
    auto* augment_cmd = app.add_subcommand("augment-sample", "Sample and apply one paired augmentation plan");
    augment_cmd->add_option("--hazy", augment.hazy)->required();
    augment_cmd->add_option("--gt", augment.gt)->required();
    augment_cmd->add_option("--seed", augment.seed)->capture_default_str();
    augment_cmd->add_option("--crop-size", augment.crop_size)->check(CLI::PositiveNumber)->capture_default_str();
    augment_cmd->add_option("--out-dir", augment.out_dir)->required();
    augment_cmd->add_option("--plan", augment.replay_plan, "Replay a serialized plan instead of sampling");

    SplitCommand split;
    std::size_t split_train = 0;
    std::size_t split_val = 0;
    std::size_t split_test = 0;
    auto* split_cmd = app.add_subcommand("split", "Tag records with train/val/test by policy");
    split_cmd->add_option("--manifest", split.manifest)->required();
    split_cmd->add_option("--policy", split.policy)
        ->required()
        ->check(CLI::IsMember({"nh23-comparison", "nh23-ablation", "nh21", "official-split", "custom"}));
    split_cmd->add_option("--out", split.out)->required();
    split_cmd->add_option("--list", split.params.list_file, "official-split list file (id split per line)");
    split_cmd->add_option("--train", split_train, "custom: leading records tagged train");
    split_cmd->add_option("--val", split_val, "custom: following records tagged val");
    split_cmd->add_option("--test", split_test, "custom: following records tagged test");

    // --subset lives on several subcommands with different defaults.
    std::string stats_subset = "both";
    std::string align_subset = "both";
    std::string transform_subset = "both";
    std::string hist_subset = "gt";
    for (auto [sub, target] : {std::pair{stats_cmd, &stats_subset}, std::pair{align_cmd, &align_subset},
                               std::pair{transform_cmd, &transform_subset}, std::pair{hist_cmd, &hist_subset}}) {
        sub->add_option("--subset", *target, "gt, hazy or both")
            ->check(CLI::IsMember({"gt", "hazy", "both"}))
            ->capture_default_str();
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

#ifdef _OPENMP
    omp_set_num_threads(threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
#endif

    try {
        if (stats_cmd->parsed()) {
            stats.subset = parse_subset(stats_subset);
            print_stats(out, cmd_stats(stats));
        } else if (align_cmd->parsed()) {
            align.subset = parse_subset(align_subset);
            const AlignmentReport report = cmd_align(align);
            out << "gt gamma " << gamma_text(report.gt.gammas) << '\n'
                << "hazy gamma " << gamma_text(report.hazy.gammas) << '\n';
            print_stats(out, report.gt.source_after);
        } else if (transform_cmd->parsed()) {
            transform.gammas = parse_gamma_triple(gamma_text_arg);
            transform.subset = parse_subset(transform_subset);
            const DatasetManifest m = cmd_transform(transform);
            out << "wrote " << m.records.size() << " pairs to " << transform.out_dir.string() << '\n';
        } else if (eval_cmd->parsed()) {
            if (!eval_split.empty()) {
                eval.split = parse_split(eval_split);
                if (!eval.split) throw InvalidArgument("unknown split '" + eval_split + "'");
            }
            const MetricReport report = cmd_eval(eval);
            out << "pairs=" << report.pairs.size() << " psnr=" << format_double(report.mean_psnr)
                << " ssim=" << format_double(report.mean_ssim) << " ms_ssim=" << format_double(report.mean_ms_ssim)
                << '\n';
        } else if (hist_cmd->parsed()) {
            hist.subset = parse_subset(hist_subset);
            cmd_hist(hist);
            out << "wrote " << hist.out_csv.string() << '\n';
        } else if (augment_cmd->parsed()) {
            out << serialize_plan(cmd_augment_sample(augment));
        } else if (split_cmd->parsed()) {
            split.params.train = split_train;
            split.params.val = split_val;
            split.params.test = split_test;
            const SplitResult result = cmd_split(split);
            for (const auto& w : result.warnings) err << "warning: " << w << '\n';
            out << "train=" << result.manifest.count(Split::train) << " val=" << result.manifest.count(Split::val)
                << " test=" << result.manifest.count(Split::test)
                << " unassigned=" << result.manifest.count(Split::unassigned) << '\n';
        }
    } catch (const Error& e) {
        err << "error: " << e.code() << ": " << one_line(e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}

}  // namespace hazealign::cli
