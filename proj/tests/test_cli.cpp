#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fixtures.hpp"
#include "vsal/graph_json.hpp"
#include "vsal/image_io.hpp"
#include "vsal/topology.hpp"

using namespace vsal;
namespace fs = std::filesystem;

namespace {

int run_cli_process(const std::string& args) {
    const std::string cmd = std::string(VSAL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

// Y-shaped width-1 mask: one bifurcation, three arms.
BinaryMask y_mask() {
    BinaryMask m(21, 21);
    for (int r = 2; r <= 10; ++r) m.set(r, 10, true);           // north arm + centre
    for (int i = 1; i <= 7; ++i) m.set(10 + i, 10 - i, true);   // south-west arm
    for (int i = 1; i <= 7; ++i) m.set(10 + i, 10 + i, true);   // south-east arm
    return m;
}

fixtures::BarSample cli_bar() {
    return fixtures::bar_sample(128, 128, 60, 64, 14, 113, 200, 50);
}

nlohmann::json load_json(const fs::path& p) {
    return nlohmann::json::parse(fixtures::read_file_bytes(p));
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = text.find("\r\n", pos);
        REQUIRE(end != std::string::npos);  // every line CRLF-terminated
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 2;
    }
    return lines;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(pos));
            break;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return cells;
}

}  // namespace

// ---- graph ---------------------------------------------------------------

TEST_CASE("graph single mode writes a loadable graph with the right shape") {
    fixtures::TempDir tmp;
    save_mask_png(y_mask(), tmp / "y.png");
    const int rc = run_cli_process("graph --mask " + (tmp / "y.png").string() + " --out " +
                                   (tmp / "y.json").string());
    CHECK(rc == 0);

    const VesselGraph g = load_graph_json(tmp / "y.json");
    int terminations = 0, bifurcations = 0;
    for (const GraphNode& n : g.nodes) {
        if (n.kind == NodeKind::termination) ++terminations;
        if (n.kind == NodeKind::bifurcation) ++bifurcations;
    }
    CHECK(terminations == 3);
    CHECK(bifurcations == 1);
    CHECK(g.edges.size() == 3);
    for (const GraphEdge& e : g.edges) CHECK(e.mas.size() >= 2);
}

TEST_CASE("graph batch mode processes every mask and keeps going past bad files") {
    fixtures::TempDir tmp;
    fs::create_directories(tmp / "masks");
    save_mask_png(y_mask(), tmp / "masks" / "a.png");
    save_mask_pgm(y_mask(), tmp / "masks" / "b.pgm");
    fixtures::write_file_bytes(tmp / "masks" / "broken.png", "not an image");
    const int rc = run_cli_process("graph --mask-dir " + (tmp / "masks").string() +
                                   " --out-dir " + (tmp / "graphs").string());
    CHECK(rc == 1);  // one failure
    CHECK(fs::exists(tmp / "graphs" / "a.json"));
    CHECK(fs::exists(tmp / "graphs" / "b.json"));
    CHECK(!fs::exists(tmp / "graphs" / "broken.json"));
}

TEST_CASE("graph batch mode over an empty directory warns but succeeds") {
    fixtures::TempDir tmp;
    fs::create_directories(tmp / "empty");
    const int rc = run_cli_process("graph --mask-dir " + (tmp / "empty").string() +
                                   " --out-dir " + (tmp / "out").string());
    CHECK(rc == 0);
}

// ---- lvs -----------------------------------------------------------------

TEST_CASE("lvs single mode produces the expected field and reruns byte-identically") {
    fixtures::TempDir tmp;
    const fixtures::BarSample s = cli_bar();
    save_gray_png(s.image, tmp / "bar.png");
    save_mask_png(s.mask, tmp / "bar_mask.png");

    const std::string args = "lvs --image " + (tmp / "bar.png").string() + " --mask " +
                             (tmp / "bar_mask.png").string() + " --out-field " +
                             (tmp / "bar.pfm").string() + " --out-viz " +
                             (tmp / "bar_viz.png").string();
    CHECK(run_cli_process(args) == 0);

    const ScalarField field = load_field_pfm(tmp / "bar.pfm");
    REQUIRE(field.width() == 128);
    REQUIRE(field.height() == 128);
    CHECK(field.valid({62, 60}));
    CHECK(field.value({62, 60}) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(!field.valid({10, 10}));
    CHECK(fs::exists(tmp / "bar_viz.png"));

    const std::string first = fixtures::read_file_bytes(tmp / "bar.pfm");
    CHECK(run_cli_process(args) == 0);
    CHECK(fixtures::read_file_bytes(tmp / "bar.pfm") == first);
}

TEST_CASE("lvs batch mode pairs stems and reports unmatched ones") {
    fixtures::TempDir tmp;
    fs::create_directories(tmp / "images");
    fs::create_directories(tmp / "masks");
    const fixtures::BarSample s = cli_bar();
    save_gray_png(s.image, tmp / "images" / "a.png");
    save_mask_png(s.mask, tmp / "masks" / "a.png");
    save_gray_png(s.image, tmp / "images" / "orphan.png");  // no mask

    const int rc = run_cli_process("lvs --image-dir " + (tmp / "images").string() +
                                   " --mask-dir " + (tmp / "masks").string() + " --out-dir " +
                                   (tmp / "fields").string());
    CHECK(rc == 1);
    CHECK(fs::exists(tmp / "fields" / "a.pfm"));
    CHECK(!fs::exists(tmp / "fields" / "orphan.pfm"));
}

TEST_CASE("lvs batch results do not depend on the worker count") {
    fixtures::TempDir tmp;
    fs::create_directories(tmp / "images");
    fs::create_directories(tmp / "masks");
    const fixtures::BarSample s = cli_bar();
    for (const char* stem : {"s1", "s2", "s3", "s4"}) {
        save_gray_png(s.image, tmp / "images" / (std::string(stem) + ".png"));
        save_mask_png(s.mask, tmp / "masks" / (std::string(stem) + ".png"));
    }
    const std::string common = "lvs --image-dir " + (tmp / "images").string() +
                               " --mask-dir " + (tmp / "masks").string() + " --out-dir ";
    CHECK(run_cli_process(common + (tmp / "serial").string() + " --jobs 1") == 0);
    CHECK(run_cli_process(common + (tmp / "parallel").string() + " --jobs 4") == 0);
    for (const char* stem : {"s1", "s2", "s3", "s4"}) {
        const std::string f = std::string(stem) + ".pfm";
        CHECK(fixtures::read_file_bytes(tmp / "serial" / f) ==
              fixtures::read_file_bytes(tmp / "parallel" / f));
    }
}

TEST_CASE("config file values act as defaults for subcommand options") {
    fixtures::TempDir tmp;
    const fixtures::BarSample s = cli_bar();
    save_gray_png(s.image, tmp / "bar.png");
    save_mask_png(s.mask, tmp / "bar_mask.png");
    fixtures::write_file_bytes(tmp / "cfg.ini", "[lvs]\nk=3\n");

    const std::string io = " --image " + (tmp / "bar.png").string() + " --mask " +
                           (tmp / "bar_mask.png").string() + " --out-field ";
    CHECK(run_cli_process("--config " + (tmp / "cfg.ini").string() + " lvs" + io +
                          (tmp / "via_config.pfm").string()) == 0);
    CHECK(run_cli_process("lvs" + io + (tmp / "via_flag.pfm").string() + " --k 3") == 0);
    CHECK(run_cli_process("lvs" + io + (tmp / "default_k.pfm").string()) == 0);

    CHECK(fixtures::read_file_bytes(tmp / "via_config.pfm") ==
          fixtures::read_file_bytes(tmp / "via_flag.pfm"));
    // The uniform bar is insensitive to k; prove the option took effect via
    // the run with a graded bar instead.
    GrayImage graded = s.image;
    for (int c = 14; c <= 113; ++c)
        for (int r = 60; r <= 64; ++r)
            graded.set(r, c, 200.0 - (c - 14) * 1.2);
    save_gray_png(graded, tmp / "graded.png");
    const std::string io2 = " --image " + (tmp / "graded.png").string() + " --mask " +
                            (tmp / "bar_mask.png").string() + " --out-field ";
    CHECK(run_cli_process("--config " + (tmp / "cfg.ini").string() + " lvs" + io2 +
                          (tmp / "graded_k3.pfm").string()) == 0);
    CHECK(run_cli_process("lvs" + io2 + (tmp / "graded_k15.pfm").string()) == 0);
    CHECK(fixtures::read_file_bytes(tmp / "graded_k3.pfm") !=
          fixtures::read_file_bytes(tmp / "graded_k15.pfm"));
}

TEST_CASE("comma-separated range options survive the config file") {
    // The INI reader splits "1,3" into two tokens; the range options must
    // stitch them back together.
    fixtures::TempDir tmp;
    const fixtures::BarSample s = cli_bar();
    save_gray_png(s.image, tmp / "bar.png");
    save_mask_png(s.mask, tmp / "bar_mask.png");
    fixtures::write_file_bytes(tmp / "cfg.ini",
                               "[augment]\nseed = 5\nn = 1,1\nl = 20,40\nl-d = 0,8\n");
    fixtures::write_file_bytes(tmp / "thr.ini", "[metrics]\nthresholds = 0.25,0.5,1\n");

    const std::string io = " --image " + (tmp / "bar.png").string() + " --mask " +
                           (tmp / "bar_mask.png").string() + " --out-dir ";
    CHECK(run_cli_process("--config " + (tmp / "cfg.ini").string() + " augment" + io +
                          (tmp / "via_config").string()) == 0);
    CHECK(run_cli_process("augment" + io + (tmp / "via_flags").string() +
                          " --seed 5 --n 1,1 --l 20,40 --l-d 0,8") == 0);
    for (const char* f : {"bar_aug1.png", "bar_aug1.json"})
        CHECK(fixtures::read_file_bytes(tmp / "via_config" / f) ==
              fixtures::read_file_bytes(tmp / "via_flags" / f));

    CHECK(run_cli_process("lvs --image " + (tmp / "bar.png").string() + " --mask " +
                          (tmp / "bar_mask.png").string() + " --out-field " +
                          (tmp / "bar.pfm").string()) == 0);
    const std::string mio = " metrics --gt " + (tmp / "bar_mask.png").string() + " --pred " +
                            (tmp / "bar_mask.png").string() + " --lvs-field " +
                            (tmp / "bar.pfm").string() + " --out ";
    CHECK(run_cli_process("--config " + (tmp / "thr.ini").string() + mio +
                          (tmp / "m_config.json").string()) == 0);
    CHECK(run_cli_process(mio + (tmp / "m_flags.json").string() +
                          " --thresholds 0.25,0.5,1") == 0);
    const std::string got = fixtures::read_file_bytes(tmp / "m_config.json");
    CHECK(got == fixtures::read_file_bytes(tmp / "m_flags.json"));
    CHECK(got.find("0.25") != std::string::npos);
    CHECK(got.find("0.05") == std::string::npos);  // defaults really overridden
}

// ---- metrics ---------------------------------------------------------------

namespace {

// gt bar plus a field valid exactly on it; prediction covers `hit` of the
// gt columns.
void write_metrics_sample(const fs::path& dir, const std::string& stem, int hit_cols) {
    BinaryMask gt(12, 6), pred(12, 6);
    fixtures::paint_rect(gt, 2, 2, 3, 9);  // 2 rows x 8 cols
    if (hit_cols > 0) fixtures::paint_rect(pred, 2, 2, 3, 1 + hit_cols);
    ScalarField lvs(12, 6);
    for (int r = 2; r <= 3; ++r)
        for (int c = 2; c <= 9; ++c) lvs.set(r, c, 0.3f);
    save_mask_png(gt, dir / "gt" / (stem + ".png"));
    save_mask_png(pred, dir / "pred" / (stem + ".png"));
    save_field_pfm(lvs, dir / "lvs" / (stem + ".pfm"));
}

}  // namespace

TEST_CASE("metrics single mode reports a perfect prediction as ones") {
    fixtures::TempDir tmp;
    fs::create_directories(tmp / "gt");
    fs::create_directories(tmp / "pred");
    fs::create_directories(tmp / "lvs");
    write_metrics_sample(tmp.path(), "a", 8);

    const int rc = run_cli_process(
        "metrics --gt " + (tmp / "gt" / "a.png").string() + " --pred " +
        (tmp / "pred" / "a.png").string() + " --lvs-field " + (tmp / "lvs" / "a.pfm").string() +
        " --out " + (tmp / "a.json").string() + " --thresholds 0.5,1");
    CHECK(rc == 0);

    const nlohmann::json j = load_json(tmp / "a.json");
    CHECK(j["sample_id"] == "a");
    CHECK(j["recall"] == 1.0);
    CHECK(j["precision"] == 1.0);
    CHECK(j["dice"] == 1.0);
    CHECK(j["counts"]["tp"] == 16);
    CHECK(j["counts"]["fn"] == 0);
    CHECK(j["unscored_pixels"] == 0);
    REQUIRE(j["lsrecall"].size() == 2);
    CHECK(j["lsrecall"][0]["threshold"] == 0.5);
    CHECK(j["lsrecall"][0]["value"] == 1.0);
    CHECK(j["lsrecall"][0]["g_t_size"] == 16);
    CHECK(j["lsrecall"][1]["value"] == 1.0);
}

TEST_CASE("metrics batch mode aggregates a csv with mean and undefined rows") {
    fixtures::TempDir tmp;
    fs::create_directories(tmp / "gt");
    fs::create_directories(tmp / "pred");
    fs::create_directories(tmp / "lvs");
    write_metrics_sample(tmp.path(), "a", 8);  // perfect
    write_metrics_sample(tmp.path(), "b", 4);  // half the columns
    write_metrics_sample(tmp.path(), "c", 8);  // perfect

    const int rc = run_cli_process(
        "metrics --gt-dir " + (tmp / "gt").string() + " --pred-dir " + (tmp / "pred").string() +
        " --lvs-dir " + (tmp / "lvs").string() + " --out-dir " + (tmp / "reports").string() +
        " --csv " + (tmp / "agg.csv").string() + " --thresholds 0.5,1");
    CHECK(rc == 0);

    const nlohmann::json ja = load_json(tmp / "reports" / "a.json");
    CHECK(ja["recall"] == 1.0);
    const nlohmann::json jb = load_json(tmp / "reports" / "b.json");
    CHECK(jb["recall"] == 0.5);

    const std::vector<std::string> lines =
        csv_lines(fixtures::read_file_bytes(tmp / "agg.csv"));
    REQUIRE(lines.size() == 6);  // header + 3 samples + mean + undefined
    CHECK(lines[0] == "sample_id,dice,precision,recall,lsrecall@0.5,lsrecall@1");

    const std::vector<std::string> row_b = split_csv_row(lines[2]);
    REQUIRE(row_b.size() == 6);
    CHECK(row_b[0] == "b");
    CHECK(std::stod(row_b[1]) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));  // dice
    CHECK(std::stod(row_b[2]) == 1.0);                                       // precision
    CHECK(std::stod(row_b[3]) == 0.5);                                       // recall

    const std::vector<std::string> mean_row = split_csv_row(lines[4]);
    CHECK(mean_row[0] == "mean");
    CHECK(std::stod(mean_row[1]) == doctest::Approx(8.0 / 9.0).epsilon(1e-9));
    CHECK(std::stod(mean_row[3]) == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
    CHECK(std::stod(mean_row[4]) == doctest::Approx(5.0 / 6.0).epsilon(1e-9));

    const std::vector<std::string> undef_row = split_csv_row(lines[5]);
    CHECK(undef_row[0] == "undefined");
    for (std::size_t i = 1; i < undef_row.size(); ++i) CHECK(undef_row[i] == "0");
}

TEST_CASE("metrics batch mode fails on unpaired stems") {
    fixtures::TempDir tmp;
    fs::create_directories(tmp / "gt");
    fs::create_directories(tmp / "pred");
    fs::create_directories(tmp / "lvs");
    write_metrics_sample(tmp.path(), "a", 8);
    BinaryMask extra(12, 6);
    extra.set(0, 0, true);
    save_mask_png(extra, tmp / "gt" / "lonely.png");  // no pred, no field

    const int rc = run_cli_process(
        "metrics --gt-dir " + (tmp / "gt").string() + " --pred-dir " + (tmp / "pred").string() +
        " --lvs-dir " + (tmp / "lvs").string() + " --out-dir " + (tmp / "reports").string());
    CHECK(rc == 1);
    CHECK(fs::exists(tmp / "reports" / "a.json"));  // the paired sample still ran
    CHECK(!fs::exists(tmp / "reports" / "lonely.json"));
}

// ---- augment ----------------------------------------------------------------

TEST_CASE("augment writes per-copy outputs that rerun byte-identically") {
    fixtures::TempDir tmp;
    const fixtures::BarSample s = cli_bar();
    save_gray_png(s.image, tmp / "bar.png");
    save_mask_png(s.mask, tmp / "bar_mask.png");

    const std::string common = "augment --image " + (tmp / "bar.png").string() + " --mask " +
                               (tmp / "bar_mask.png").string() +
                               " --seed 7 --n 1,1 --l 20,30 --l-d 0,5 --copies 2 --out-dir ";
    CHECK(run_cli_process(common + (tmp / "out1").string()) == 0);
    for (const char* name : {"bar_aug1.png", "bar_aug1.json", "bar_aug2.png", "bar_aug2.json"})
        CHECK(fs::exists(tmp / "out1" / name));

    // Copies draw from distinct streams.
    CHECK(fixtures::read_file_bytes(tmp / "out1" / "bar_aug1.json") !=
          fixtures::read_file_bytes(tmp / "out1" / "bar_aug2.json"));

    const nlohmann::json j = load_json(tmp / "out1" / "bar_aug1.json");
    REQUIRE(j["edits"].size() == 1);
    CHECK(j["edits"][0]["l"].get<double>() >= 20.0);
    CHECK(j["edits"][0]["l"].get<double>() <= 30.0);
    CHECK(j["edits"][0]["p_c"].size() == 2);
    CHECK(j.contains("stream_seed"));
    CHECK(j.contains("skips"));

    CHECK(run_cli_process(common + (tmp / "out2").string()) == 0);
    for (const char* name : {"bar_aug1.png", "bar_aug1.json", "bar_aug2.png", "bar_aug2.json"})
        CHECK(fixtures::read_file_bytes(tmp / "out1" / name) ==
              fixtures::read_file_bytes(tmp / "out2" / name));
}

TEST_CASE("augment with zero edits reproduces the input image bytes") {
    fixtures::TempDir tmp;
    const fixtures::BarSample s = cli_bar();
    save_gray_png(s.image, tmp / "bar.png");
    save_mask_png(s.mask, tmp / "bar_mask.png");
    CHECK(run_cli_process("augment --image " + (tmp / "bar.png").string() + " --mask " +
                          (tmp / "bar_mask.png").string() + " --n 0,0 --out-dir " +
                          (tmp / "out").string()) == 0);
    CHECK(fixtures::read_file_bytes(tmp / "out" / "bar_aug1.png") ==
          fixtures::read_file_bytes(tmp / "bar.png"));
    const nlohmann::json j = load_json(tmp / "out" / "bar_aug1.json");
    CHECK(j["edits"].empty());
}

TEST_CASE("augment batch mode handles multiple stems") {
    fixtures::TempDir tmp;
    fs::create_directories(tmp / "images");
    fs::create_directories(tmp / "masks");
    const fixtures::BarSample s = cli_bar();
    save_gray_png(s.image, tmp / "images" / "u.png");
    save_mask_png(s.mask, tmp / "masks" / "u.png");
    save_gray_png(s.image, tmp / "images" / "v.png");
    save_mask_png(s.mask, tmp / "masks" / "v.png");
    CHECK(run_cli_process("augment --image-dir " + (tmp / "images").string() + " --mask-dir " +
                          (tmp / "masks").string() + " --n 1,1 --out-dir " +
                          (tmp / "out").string()) == 0);
    for (const char* name : {"u_aug1.png", "u_aug1.json", "v_aug1.png", "v_aug1.json"})
        CHECK(fs::exists(tmp / "out" / name));
}

// ---- usage errors ----------------------------------------------------------------

TEST_CASE("usage problems exit with code two") {
    fixtures::TempDir tmp;
    CHECK(run_cli_process("") == 2);                      // no subcommand
    CHECK(run_cli_process("frobnicate") == 2);            // unknown subcommand
    CHECK(run_cli_process("graph") == 2);                 // neither --mask nor --mask-dir
    CHECK(run_cli_process("graph --mask a.png") == 2);    // missing --out
    CHECK(run_cli_process("lvs --image a.png") == 2);     // incomplete single mode
    CHECK(run_cli_process("augment --image a.png --mask b.png") == 2);  // no --out-dir
    CHECK(run_cli_process("augment --image a.png --mask b.png --out-dir " +
                          (tmp / "o").string() + " --n 5") == 2);       // bad range
    CHECK(run_cli_process("augment --image a.png --mask b.png --out-dir " +
                          (tmp / "o").string() + " --n 9,3") == 2);     // inverted range
    CHECK(run_cli_process("metrics --gt a.png --pred b.png --lvs-field c.pfm "
                          "--thresholds nope") == 2);
}

TEST_CASE("runtime failures exit with code one") {
    fixtures::TempDir tmp;
    CHECK(run_cli_process("graph --mask " + (tmp / "missing.png").string() + " --out " +
                          (tmp / "g.json").string()) == 1);
    fixtures::write_file_bytes(tmp / "junk.png", "junk");
    CHECK(run_cli_process("graph --mask " + (tmp / "junk.png").string() + " --out " +
                          (tmp / "g.json").string()) == 1);
}
