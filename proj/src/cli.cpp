#include "vsal/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vsal/augment.hpp"
#include "vsal/graph_json.hpp"
#include "vsal/image_io.hpp"
#include "vsal/metrics.hpp"
#include "vsal/rng.hpp"
#include "vsal/salience.hpp"
#include "vsal/topology.hpp"

namespace fs = std::filesystem;

namespace vsal {
namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int usage_error(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return 2;
}

// ---- batch plumbing ----------------------------------------------------

class BatchRunner {
  public:
    explicit BatchRunner(int jobs) : jobs_(std::max(1, jobs)) {}

    void add(std::string label, std::function<void()> fn) {
        tasks_.push_back({std::move(label), std::move(fn)});
    }

    // Runs every task; returns the sorted per-task error messages.
    std::vector<std::string> run() {
        std::atomic<std::size_t> next{0};
        std::mutex mu;
        std::vector<std::string> errors;
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks_.size()) return;
                try {
                    tasks_[i].fn();
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(mu);
                    errors.push_back(tasks_[i].label + ": " + e.what());
                }
            }
        };
        const std::size_t threads =
            std::min<std::size_t>(static_cast<std::size_t>(jobs_), tasks_.size());
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(threads);
            for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
            for (std::thread& t : pool) t.join();
        }
        std::sort(errors.begin(), errors.end());
        return errors;
    }

  private:
    struct Task {
        std::string label;
        std::function<void()> fn;
    };
    int jobs_;
    std::vector<Task> tasks_;
};

int finish_batch(const std::vector<std::string>& errors) {
    for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
    return errors.empty() ? 0 : 1;
}

bool has_extension(const fs::path& p, std::initializer_list<const char*> exts) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const char* e : exts)
        if (ext == e) return true;
    return false;
}

// Maps filename stem -> path for the recognised files in dir. Colliding
// stems keep the lexicographically smallest path and report an error.
std::map<std::string, fs::path> list_inputs(const fs::path& dir,
                                            std::initializer_list<const char*> exts,
                                            std::vector<std::string>& errors) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || !has_extension(entry.path(), exts)) continue;
        const std::string stem = entry.path().stem().string();
        auto [it, inserted] = out.emplace(stem, entry.path());
        if (!inserted) {
            errors.push_back("ambiguous inputs for stem '" + stem + "' in " + dir.string());
            if (entry.path() < it->second) it->second = entry.path();
        }
    }
    return out;
}

constexpr std::initializer_list<const char*> kImageExts = {".png", ".pgm"};
constexpr std::initializer_list<const char*> kFieldExts = {".pfm"};

bool parse_double_range(const std::string& text, double& lo, double& hi) {
    int consumed = 0;
    if (std::sscanf(text.c_str(), " %lf , %lf %n", &lo, &hi, &consumed) != 2) return false;
    return consumed == static_cast<int>(text.size()) && lo <= hi;
}

bool parse_int_range(const std::string& text, int& lo, int& hi) {
    int consumed = 0;
    if (std::sscanf(text.c_str(), " %d , %d %n", &lo, &hi, &consumed) != 2) return false;
    return consumed == static_cast<int>(text.size()) && lo <= hi;
}

std::optional<std::vector<double>> parse_threshold_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        try {
            std::size_t used = 0;
            const std::string token = text.substr(pos, comma - pos);
            out.push_back(std::stod(token, &used));
            while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
                ++used;
            if (used != token.size()) return std::nullopt;
        } catch (const std::exception&) {
            return std::nullopt;
        }
        pos = comma + 1;
    }
    if (out.empty()) return std::nullopt;
    return out;
}

// ---- graph -------------------------------------------------------------

struct GraphOpts {
    std::string mask, mask_dir, out, out_dir;
    double prune{5.0};
    double merge_radius{3.0};
};

VesselGraph build_graph(const BinaryMask& mask, double prune, double merge_radius) {
    VesselGraph graph = extract_graph(skeletonize(mask));
    graph = prune_graph(graph, prune);
    return merge_nodes(graph, merge_radius);
}

int cmd_graph(const GraphOpts& o, int jobs) {
    const bool single = !o.mask.empty();
    const bool batch = !o.mask_dir.empty();
    if (single == batch) return usage_error("graph: give exactly one of --mask or --mask-dir");
    if (single && o.out.empty()) return usage_error("graph: --mask requires --out");
    if (batch && o.out_dir.empty()) return usage_error("graph: --mask-dir requires --out-dir");

    auto process = [&](const fs::path& mask_path, const fs::path& out_path) {
        save_graph_json(build_graph(load_mask(mask_path), o.prune, o.merge_radius), out_path);
    };

    if (single) {
        try {
            process(o.mask, o.out);
        } catch (const std::exception& e) {
            std::cerr << "error: " << o.mask << ": " << e.what() << "\n";
            return 1;
        }
        return 0;
    }

    std::vector<std::string> errors;
    std::map<std::string, fs::path> masks;
    try {
        masks = list_inputs(o.mask_dir, kImageExts, errors);
        fs::create_directories(o.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (masks.empty() && errors.empty()) {
        std::cerr << "warning: no input files in " << o.mask_dir << "\n";
        return 0;
    }
    BatchRunner runner(jobs);
    for (const auto& [stem, path] : masks)
        runner.add(stem, [&, path = path, out = fs::path(o.out_dir) / (stem + ".json")] {
            process(path, out);
        });
    auto task_errors = runner.run();
    errors.insert(errors.end(), task_errors.begin(), task_errors.end());
    std::sort(errors.begin(), errors.end());
    return finish_batch(errors);
}

// ---- lvs ---------------------------------------------------------------

struct LvsOpts {
    std::string image, mask, out_field, out_viz;
    std::string image_dir, mask_dir, out_dir, viz_dir;
    double r_b{4.0};
    int k{15};
    double prune{5.0};
    double merge_radius{3.0};
};

int cmd_lvs(const LvsOpts& o, int jobs) {
    const bool single = !o.image.empty() || !o.mask.empty();
    const bool batch = !o.image_dir.empty() || !o.mask_dir.empty();
    if (single == batch)
        return usage_error("lvs: give --image/--mask or --image-dir/--mask-dir");
    if (single && (o.image.empty() || o.mask.empty() || o.out_field.empty()))
        return usage_error("lvs: single mode needs --image, --mask and --out-field");
    if (batch && (o.image_dir.empty() || o.mask_dir.empty() || o.out_dir.empty()))
        return usage_error("lvs: batch mode needs --image-dir, --mask-dir and --out-dir");

    const LvsParams params{o.r_b, o.k};
    const GraphParams graph_params{o.prune, o.merge_radius};
    auto process = [&](const fs::path& image_path, const fs::path& mask_path,
                       const fs::path& field_path, const fs::path& viz_path) {
        const ScalarField field =
            compute_lvs_map(load_gray(image_path), load_mask(mask_path), params, graph_params);
        save_field_pfm(field, field_path);
        if (!viz_path.empty()) save_field_viz_png(field, viz_path);
    };

    if (single) {
        try {
            process(o.image, o.mask, o.out_field, o.out_viz);
        } catch (const std::exception& e) {
            std::cerr << "error: " << o.image << ": " << e.what() << "\n";
            return 1;
        }
        return 0;
    }

    std::vector<std::string> errors;
    std::map<std::string, fs::path> images, masks;
    try {
        images = list_inputs(o.image_dir, kImageExts, errors);
        masks = list_inputs(o.mask_dir, kImageExts, errors);
        fs::create_directories(o.out_dir);
        if (!o.viz_dir.empty()) fs::create_directories(o.viz_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (images.empty() && masks.empty() && errors.empty()) {
        std::cerr << "warning: no input files in " << o.image_dir << "\n";
        return 0;
    }

    BatchRunner runner(jobs);
    for (const auto& [stem, image_path] : images) {
        auto mask_it = masks.find(stem);
        if (mask_it == masks.end()) {
            errors.push_back(stem + ": no matching mask");
            continue;
        }
        const fs::path field_path = fs::path(o.out_dir) / (stem + ".pfm");
        const fs::path viz_path =
            o.viz_dir.empty() ? fs::path() : fs::path(o.viz_dir) / (stem + ".png");
        runner.add(stem, [&, image_path = image_path, mask_path = mask_it->second, field_path,
                          viz_path] { process(image_path, mask_path, field_path, viz_path); });
    }
    for (const auto& [stem, path] : masks)
        if (!images.count(stem)) errors.push_back(stem + ": no matching image");
    auto task_errors = runner.run();
    errors.insert(errors.end(), task_errors.begin(), task_errors.end());
    std::sort(errors.begin(), errors.end());
    return finish_batch(errors);
}

// ---- metrics -----------------------------------------------------------

struct MetricsOpts {
    std::string gt, pred, lvs_field;
    std::string gt_dir, pred_dir, lvs_dir;
    std::string out, out_dir, csv;
    std::string thresholds;
};

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json();
}

nlohmann::json report_to_json(const std::string& sample_id, const MetricsReport& r) {
    nlohmann::json j;
    j["sample_id"] = sample_id;
    j["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn},
                   {"tn", r.counts.tn}};
    j["dice"] = optional_json(r.dice);
    j["precision"] = optional_json(r.precision);
    j["recall"] = optional_json(r.recall);
    j["unscored_pixels"] = r.unscored_pixels;
    j["lsrecall"] = nlohmann::json::array();
    for (const LsRecallEntry& e : r.lsrecall)
        j["lsrecall"].push_back({{"threshold", e.threshold},
                                 {"value", optional_json(e.value)},
                                 {"g_t_size", e.g_t_size},
                                 {"tp", e.tp},
                                 {"fn", e.fn}});
    return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

// RFC-4180 aggregate: one row per sample, then a mean row over the defined
// cells and a row counting the undefined ones.
std::string metrics_csv(std::span<const double> thresholds,
                        const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    const std::size_t columns = 3 + thresholds.size();
    std::string text = "sample_id,dice,precision,recall";
    for (double t : thresholds) text += ",lsrecall@" + format_double(t);
    text += "\r\n";

    std::vector<double> sums(columns, 0.0);
    std::vector<std::int64_t> defined(columns, 0);
    auto cell = [&](std::size_t column, const std::optional<double>& v) {
        if (!v) return std::string();
        sums[column] += *v;
        ++defined[column];
        return format_double(*v);
    };
    for (const auto& [stem, report] : rows) {
        text += csv_field(stem);
        text += ',' + cell(0, report.dice);
        text += ',' + cell(1, report.precision);
        text += ',' + cell(2, report.recall);
        for (std::size_t i = 0; i < thresholds.size(); ++i)
            text += ',' + cell(3 + i, i < report.lsrecall.size() ? report.lsrecall[i].value
                                                                 : std::nullopt);
        text += "\r\n";
    }
    text += "mean";
    for (std::size_t i = 0; i < columns; ++i)
        text += ',' + (defined[i] ? format_double(sums[i] / static_cast<double>(defined[i]))
                                  : std::string());
    text += "\r\nundefined";
    for (std::size_t i = 0; i < columns; ++i)
        text += ',' + std::to_string(static_cast<std::int64_t>(rows.size()) - defined[i]);
    text += "\r\n";
    return text;
}

int cmd_metrics(const MetricsOpts& o, int jobs) {
    const bool single = !o.gt.empty() || !o.pred.empty() || !o.lvs_field.empty();
    const bool batch = !o.gt_dir.empty() || !o.pred_dir.empty() || !o.lvs_dir.empty();
    if (single == batch)
        return usage_error("metrics: give --gt/--pred/--lvs-field or the --*-dir variants");
    if (single && (o.gt.empty() || o.pred.empty() || o.lvs_field.empty()))
        return usage_error("metrics: single mode needs --gt, --pred and --lvs-field");
    if (batch && (o.gt_dir.empty() || o.pred_dir.empty() || o.lvs_dir.empty()))
        return usage_error("metrics: batch mode needs --gt-dir, --pred-dir and --lvs-dir");

    std::vector<double> thresholds = default_thresholds();
    if (!o.thresholds.empty()) {
        auto parsed = parse_threshold_list(o.thresholds);
        if (!parsed) return usage_error("metrics: bad --thresholds list: " + o.thresholds);
        thresholds = std::move(*parsed);
    }

    auto compute = [&](const fs::path& gt_path, const fs::path& pred_path,
                       const fs::path& lvs_path) {
        return compute_metrics(load_mask(gt_path), load_mask(pred_path),
                               load_field_pfm(lvs_path), thresholds);
    };

    if (single) {
        const std::string stem = fs::path(o.gt).stem().string();
        try {
            const MetricsReport report = compute(o.gt, o.pred, o.lvs_field);
            const std::string json_text = report_to_json(stem, report).dump(2) + "\n";
            if (o.out.empty())
                std::cout << json_text;
            else
                write_text_file(o.out, json_text);
            if (!o.csv.empty()) write_text_file(o.csv, metrics_csv(thresholds, {{stem, report}}));
        } catch (const std::exception& e) {
            std::cerr << "error: " << stem << ": " << e.what() << "\n";
            return 1;
        }
        return 0;
    }

    std::vector<std::string> errors;
    std::map<std::string, fs::path> gts, preds, fields;
    try {
        gts = list_inputs(o.gt_dir, kImageExts, errors);
        preds = list_inputs(o.pred_dir, kImageExts, errors);
        fields = list_inputs(o.lvs_dir, kFieldExts, errors);
        if (!o.out_dir.empty()) fs::create_directories(o.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (gts.empty() && preds.empty() && fields.empty() && errors.empty()) {
        std::cerr << "warning: no input files in " << o.gt_dir << "\n";
        return 0;
    }

    struct Row {
        std::string stem;
        std::optional<MetricsReport> report;
    };
    std::vector<Row> results;
    BatchRunner runner(jobs);
    for (const auto& [stem, gt_path] : gts) {
        auto pred_it = preds.find(stem);
        auto field_it = fields.find(stem);
        if (pred_it == preds.end()) errors.push_back(stem + ": no matching prediction");
        if (field_it == fields.end()) errors.push_back(stem + ": no matching salience field");
        if (pred_it == preds.end() || field_it == fields.end()) continue;
        const std::size_t slot = results.size();
        results.push_back({stem, std::nullopt});
        runner.add(stem, [&, slot, gt_path = gt_path, pred_path = pred_it->second,
                          lvs_path = field_it->second] {
            const MetricsReport report = compute(gt_path, pred_path, lvs_path);
            if (!o.out_dir.empty())
                write_text_file(fs::path(o.out_dir) / (results[slot].stem + ".json"),
                                report_to_json(results[slot].stem, report).dump(2) + "\n");
            results[slot].report = report;
        });
    }
    for (const auto& [stem, path] : preds)
        if (!gts.count(stem)) errors.push_back(stem + ": no matching ground truth");
    for (const auto& [stem, path] : fields)
        if (!gts.count(stem)) errors.push_back(stem + ": no matching ground truth");

    auto task_errors = runner.run();
    errors.insert(errors.end(), task_errors.begin(), task_errors.end());
    std::sort(errors.begin(), errors.end());

    if (!o.csv.empty()) {
        std::vector<std::pair<std::string, MetricsReport>> rows;
        for (const Row& r : results)
            if (r.report) rows.emplace_back(r.stem, *r.report);
        try {
            write_text_file(o.csv, metrics_csv(thresholds, rows));
        } catch (const std::exception& e) {
            errors.push_back(std::string("aggregate csv: ") + e.what());
        }
    }
    return finish_batch(errors);
}

// ---- augment -----------------------------------------------------------

struct AugmentOpts {
    std::string image, mask, image_dir, mask_dir, out_dir;
    std::uint64_t seed{0};
    std::string n_range{"50,100"};
    std::string l_range{"20,100"};
    std::string l_d_range{"0,30"};
    double t_b{5.0};
    int copies{1};
    int max_attempts{100};
    double prune{5.0};
    double merge_radius{3.0};
};

nlohmann::json edits_to_json(const AugmentResult& result, std::uint64_t stream_seed) {
    nlohmann::json j;
    j["stream_seed"] = stream_seed;
    j["edits"] = nlohmann::json::array();
    for (const AppliedEdit& e : result.edits) {
        nlohmann::json je;
        je["segment"] = e.segment;
        je["p_c"] = {e.p_c.row, e.p_c.col};
        je["l"] = e.l;
        je["l_d"] = e.l_d;
        je["patch_offset"] = e.patch_offset
                                 ? nlohmann::json({e.patch_offset->drow, e.patch_offset->dcol})
                                 : nlohmann::json();
        j["edits"].push_back(std::move(je));
    }
    j["skips"] = nlohmann::json::array();
    for (const SkippedAttempt& s : result.skips) j["skips"].push_back(s.reason);
    return j;
}

int cmd_augment(const AugmentOpts& o, int jobs) {
    const bool single = !o.image.empty() || !o.mask.empty();
    const bool batch = !o.image_dir.empty() || !o.mask_dir.empty();
    if (single == batch)
        return usage_error("augment: give --image/--mask or --image-dir/--mask-dir");
    if (single && (o.image.empty() || o.mask.empty()))
        return usage_error("augment: single mode needs --image and --mask");
    if (batch && (o.image_dir.empty() || o.mask_dir.empty()))
        return usage_error("augment: batch mode needs --image-dir and --mask-dir");
    if (o.out_dir.empty()) return usage_error("augment: --out-dir is required");
    if (o.copies < 1) return usage_error("augment: --copies must be >= 1");

    AugmentParams params;
    params.t_b = o.t_b;
    params.max_attempts = o.max_attempts;
    if (!parse_int_range(o.n_range, params.n_range.lo, params.n_range.hi) ||
        params.n_range.lo < 0)
        return usage_error("augment: bad --n range: " + o.n_range);
    if (!parse_double_range(o.l_range, params.l_range.lo, params.l_range.hi) ||
        params.l_range.lo < 0)
        return usage_error("augment: bad --l range: " + o.l_range);
    if (!parse_double_range(o.l_d_range, params.l_d_range.lo, params.l_d_range.hi) ||
        params.l_d_range.lo < 0)
        return usage_error("augment: bad --l-d range: " + o.l_d_range);

    auto process = [&](const std::string& stem, const fs::path& image_path,
                       const fs::path& mask_path) {
        const GrayImage image = load_gray(image_path);
        const BinaryMask mask = load_mask(mask_path);
        const VesselGraph graph = build_graph(mask, o.prune, o.merge_radius);
        for (int copy = 1; copy <= o.copies; ++copy) {
            const std::uint64_t stream_seed =
                derive_seed(o.seed, stem, static_cast<std::uint64_t>(copy));
            Rng rng(stream_seed);
            const AugmentResult result = augment_image(image, mask, graph, params, rng);
            const std::string base = stem + "_aug" + std::to_string(copy);
            save_gray_png(result.image, fs::path(o.out_dir) / (base + ".png"));
            write_text_file(fs::path(o.out_dir) / (base + ".json"),
                            edits_to_json(result, stream_seed).dump(2) + "\n");
        }
    };

    if (single) {
        const std::string stem = fs::path(o.image).stem().string();
        try {
            fs::create_directories(o.out_dir);
            process(stem, o.image, o.mask);
        } catch (const std::exception& e) {
            std::cerr << "error: " << stem << ": " << e.what() << "\n";
            return 1;
        }
        return 0;
    }

    std::vector<std::string> errors;
    std::map<std::string, fs::path> images, masks;
    try {
        images = list_inputs(o.image_dir, kImageExts, errors);
        masks = list_inputs(o.mask_dir, kImageExts, errors);
        fs::create_directories(o.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (images.empty() && masks.empty() && errors.empty()) {
        std::cerr << "warning: no input files in " << o.image_dir << "\n";
        return 0;
    }

    BatchRunner runner(jobs);
    for (const auto& [stem, image_path] : images) {
        auto mask_it = masks.find(stem);
        if (mask_it == masks.end()) {
            errors.push_back(stem + ": no matching mask");
            continue;
        }
        runner.add(stem, [&, stem = stem, image_path = image_path,
                          mask_path = mask_it->second] { process(stem, image_path, mask_path); });
    }
    for (const auto& [stem, path] : masks)
        if (!images.count(stem)) errors.push_back(stem + ": no matching image");
    auto task_errors = runner.run();
    errors.insert(errors.end(), task_errors.begin(), task_errors.end());
    std::sort(errors.begin(), errors.end());
    return finish_batch(errors);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"vessel salience toolkit: graph extraction, local vessel salience, "
                 "low-salience recall metrics, and segment augmentation"};
    app.require_subcommand(1);
    int jobs = 1;
    app.add_option("--jobs", jobs, "worker threads for batch processing")
        ->capture_default_str();
    app.set_config("--config", "", "key=value config file (sections per subcommand)");

    GraphOpts graph_opts;
    CLI::App* graph_cmd = app.add_subcommand("graph", "extract vessel graphs from masks");
    graph_cmd->fallthrough();  // lets --jobs follow the subcommand
    graph_cmd->add_option("--mask", graph_opts.mask, "input mask (PNG/PGM)");
    graph_cmd->add_option("--mask-dir", graph_opts.mask_dir, "directory of input masks");
    graph_cmd->add_option("--out", graph_opts.out, "output graph JSON");
    graph_cmd->add_option("--out-dir", graph_opts.out_dir, "output directory");
    graph_cmd->add_option("--prune", graph_opts.prune, "minimum branch length kept")
        ->capture_default_str();
    graph_cmd->add_option("--merge-radius", graph_opts.merge_radius, "node merge radius")
        ->capture_default_str();

    LvsOpts lvs_opts;
    CLI::App* lvs_cmd = app.add_subcommand("lvs", "compute local vessel salience fields");
    lvs_cmd->fallthrough();
    lvs_cmd->add_option("--image", lvs_opts.image, "input grayscale image");
    lvs_cmd->add_option("--mask", lvs_opts.mask, "input vessel mask");
    lvs_cmd->add_option("--out-field", lvs_opts.out_field, "output PFM field");
    lvs_cmd->add_option("--out-viz", lvs_opts.out_viz, "optional PNG rendering");
    lvs_cmd->add_option("--image-dir", lvs_opts.image_dir, "directory of images");
    lvs_cmd->add_option("--mask-dir", lvs_opts.mask_dir, "directory of masks");
    lvs_cmd->add_option("--out-dir", lvs_opts.out_dir, "output directory for PFM fields");
    lvs_cmd->add_option("--viz-dir", lvs_opts.viz_dir, "optional directory for PNG renderings");
    lvs_cmd->add_option("--r-b", lvs_opts.r_b, "background sampling radius")
        ->capture_default_str();
    lvs_cmd->add_option("--k", lvs_opts.k, "smoothing half-window")->capture_default_str();
    lvs_cmd->add_option("--prune", lvs_opts.prune, "minimum branch length kept")
        ->capture_default_str();
    lvs_cmd->add_option("--merge-radius", lvs_opts.merge_radius, "node merge radius")
        ->capture_default_str();

    MetricsOpts metrics_opts;
    CLI::App* metrics_cmd =
        app.add_subcommand("metrics", "score predictions, including low-salience recall");
    metrics_cmd->fallthrough();
    metrics_cmd->add_option("--gt", metrics_opts.gt, "ground-truth mask");
    metrics_cmd->add_option("--pred", metrics_opts.pred, "predicted mask");
    metrics_cmd->add_option("--lvs-field", metrics_opts.lvs_field, "salience field (PFM)");
    metrics_cmd->add_option("--gt-dir", metrics_opts.gt_dir, "directory of ground-truth masks");
    metrics_cmd->add_option("--pred-dir", metrics_opts.pred_dir,
                            "directory of predicted masks");
    metrics_cmd->add_option("--lvs-dir", metrics_opts.lvs_dir, "directory of salience fields");
    metrics_cmd->add_option("--out", metrics_opts.out, "output JSON report (single mode)");
    metrics_cmd->add_option("--out-dir", metrics_opts.out_dir,
                            "output directory for per-sample JSON reports");
    metrics_cmd->add_option("--csv", metrics_opts.csv, "aggregate CSV path");
    metrics_cmd
        ->add_option("--thresholds", metrics_opts.thresholds,
                     "comma-separated salience thresholds (default 0.05..1.00)")
        ->join(',');  // config files split list values on commas

    AugmentOpts augment_opts;
    CLI::App* augment_cmd =
        app.add_subcommand("augment", "synthesize low-salience / discontinuous vessels");
    augment_cmd->fallthrough();
    augment_cmd->add_option("--image", augment_opts.image, "input grayscale image");
    augment_cmd->add_option("--mask", augment_opts.mask, "input vessel mask");
    augment_cmd->add_option("--image-dir", augment_opts.image_dir, "directory of images");
    augment_cmd->add_option("--mask-dir", augment_opts.mask_dir, "directory of masks");
    augment_cmd->add_option("--out-dir", augment_opts.out_dir, "output directory");
    augment_cmd->add_option("--seed", augment_opts.seed, "base RNG seed")
        ->capture_default_str();
    augment_cmd->add_option("--n", augment_opts.n_range, "edits per image, \"min,max\"")
        ->capture_default_str()
        ->join(',');
    augment_cmd->add_option("--l", augment_opts.l_range, "attenuation length, \"min,max\"")
        ->capture_default_str()
        ->join(',');
    augment_cmd->add_option("--l-d", augment_opts.l_d_range,
                            "discontinuity length, \"min,max\"")
        ->capture_default_str()
        ->join(',');
    augment_cmd->add_option("--t-b", augment_opts.t_b, "patch acceptance threshold")
        ->capture_default_str();
    augment_cmd->add_option("--copies", augment_opts.copies, "augmented copies per input")
        ->capture_default_str();
    augment_cmd->add_option("--max-attempts", augment_opts.max_attempts,
                            "failed draws before giving up")
        ->capture_default_str();
    augment_cmd->add_option("--prune", augment_opts.prune, "minimum branch length kept")
        ->capture_default_str();
    augment_cmd->add_option("--merge-radius", augment_opts.merge_radius, "node merge radius")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (graph_cmd->parsed()) return cmd_graph(graph_opts, jobs);
        if (lvs_cmd->parsed()) return cmd_lvs(lvs_opts, jobs);
        if (metrics_cmd->parsed()) return cmd_metrics(metrics_opts, jobs);
        if (augment_cmd->parsed()) return cmd_augment(augment_opts, jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return usage_error("no subcommand given");
}

}  // namespace vsal
