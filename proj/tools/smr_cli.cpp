/*
 * Copyright (c) 2026 The smrtrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// smr: command-line front end over the smrtrack C API.
//
//   smr track    --frames DIR --init X Y W H --out results.csv [tracker flags]
//   smr eval     --results results.csv --truth truth.csv --out eval.csv
//   smr synth    --spec scene.txt --out-dir DIR
//   smr diagnose --frame F --template-frame T --template-box X Y W H
//                --box-a X Y W H --box-b X Y W H --out-dir DIR
//   smr compare  (--report TRACKER SEQ FILE | --sequence SEQ DIR TRUTH)... --out table.csv

#include "smr.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Carries a C status out of a command; main() prints it as one line.
struct Failure {
    smr_status status;
    std::string message;
};

void check(smr_status status, const std::string& context = {}) {
    if (status == SMR_OK) return;
    std::string msg = smr_last_error();
    if (!context.empty()) msg = context + ": " + msg;
    throw Failure{status, msg};
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
    void operator()(T* p) const noexcept { Destroy(p); }
};
using FramePtr = std::unique_ptr<smr_frame, Deleter<smr_frame, smr_frame_destroy>>;
using SequencePtr = std::unique_ptr<smr_sequence, Deleter<smr_sequence, smr_sequence_destroy>>;
using ResultsPtr = std::unique_ptr<smr_results, Deleter<smr_results, smr_results_destroy>>;
using TruthPtr = std::unique_ptr<smr_truth, Deleter<smr_truth, smr_truth_destroy>>;
using ReportPtr = std::unique_ptr<smr_report, Deleter<smr_report, smr_report_destroy>>;
using TablePtr = std::unique_ptr<smr_table, Deleter<smr_table, smr_table_destroy>>;
using SynthPtr = std::unique_ptr<smr_synth, Deleter<smr_synth, smr_synth_destroy>>;

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

smr_box to_box(const std::vector<int>& v) { return smr_box{v[0], v[1], v[2], v[3]}; }

json box_json(smr_box b) { return json::array({b.x, b.y, b.w, b.h}); }

smr_box read_box_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure{SMR_ERR_IO, "no such input: " + path};
    std::vector<int> v(4);
    if (!(in >> v[0] >> v[1] >> v[2] >> v[3])) throw Failure{SMR_ERR_PARSE, path + ": expected \"x y w h\""};
    if (v[2] < 1 || v[3] < 1) throw Failure{SMR_ERR_PARSE, path + ": box size must be positive"};
    return to_box(v);
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Written last, via rename, so its presence means every listed output exists.
void write_manifest(const fs::path& path, const std::string& command, const json& config, const json& inputs,
                    const std::vector<std::string>& outputs, const Stopwatch& clock) {
    for (const auto& o : outputs)
        if (!fs::exists(o)) throw Failure{SMR_ERR_IO, "declared output missing: " + o};
    json m;
    m["tool"] = "smr";
    m["version"] = smr_version();
    m["command"] = command;
    m["config"] = config;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["timing"] = {{"wall_seconds", clock.seconds()}};
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Failure{SMR_ERR_IO, "cannot write " + path.string()};
        out << m.dump(2) << "\n";
    }
    fs::rename(tmp, path);
}

fs::path manifest_for(const std::string& output_file) { return fs::path(output_file + ".manifest.json"); }

// Tracker flags shared by track and compare. Unset flags leave the config file value.
struct TrackerFlags {
    std::string config_path;
    std::optional<double> k, alpha0, alpha_min, beta;
    std::optional<int> radius;
    std::optional<std::string> metric;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key=value tracker config file")->check(CLI::ExistingFile);
        app->add_option("--k", k, "dynamic threshold factor (default 0.25)");
        app->add_option("--radius", radius, "search radius in pixels (default 20)");
        app->add_option("--alpha0", alpha0, "initial threshold (default 63.75)");
        app->add_option("--alpha-min", alpha_min, "threshold floor (default 1.0)");
        app->add_option("--beta", beta, "exp(-beta*d) scale (default 1.0)");
        app->add_option("--metric", metric, "smr or sad (default smr)");
    }

    smr_config resolve() const {
        smr_config c;
        smr_config_default(&c);
        if (!config_path.empty()) check(smr_config_load(config_path.c_str(), &c), "config");
        if (k) c.k = *k;
        if (radius) c.search_radius = *radius;
        if (alpha0) c.alpha0 = *alpha0;
        if (alpha_min) c.alpha_min = *alpha_min;
        if (beta) c.beta = *beta;
        if (metric) check(smr_metric_parse(metric->c_str(), &c.metric), "config");
        check(smr_config_validate(&c), "config");
        return c;
    }
};

json config_json(const smr_config& c) {
    return {{"k", c.k},
            {"search_radius", c.search_radius},
            {"alpha0", c.alpha0},
            {"alpha_min", c.alpha_min},
            {"beta", c.beta},
            {"metric", c.metric == SMR_METRIC_SAD ? "sad" : "smr"}};
}

ResultsPtr run_tracker(const smr_sequence* seq, smr_box init, const smr_config& config) {
    smr_results* raw = nullptr;
    check(smr_track_sequence(seq, init, &config, &raw), "track");
    return ResultsPtr(raw);
}

SequencePtr load_sequence(const std::string& dir) {
    if (!fs::is_directory(dir)) throw Failure{SMR_ERR_IO, "no such input: " + dir};
    smr_sequence* raw = nullptr;
    check(smr_sequence_load(dir.c_str(), &raw), "frames");
    return SequencePtr(raw);
}

// ---------------------------------------------------------------------------

struct TrackCmd {
    std::string frames_dir, out, init_file;
    std::vector<int> init;
    TrackerFlags flags;

    void attach(CLI::App* app) {
        app->add_option("--frames", frames_dir, "directory of numbered .pgm/.png frames")->required();
        auto* box = app->add_option("--init", init, "initial box X Y W H")->expected(4);
        auto* file = app->add_option("--init-file", init_file, "file holding \"x y w h\"");
        box->excludes(file);
        app->add_option("--out", out, "results CSV")->required();
        flags.attach(app);
    }

    int run() const {
        Stopwatch clock;
        const smr_config config = flags.resolve();
        smr_box box;
        if (!init.empty())
            box = to_box(init);
        else if (!init_file.empty())
            box = read_box_file(init_file);
        else
            throw Failure{SMR_ERR_INVALID_ARGUMENT, "one of --init or --init-file is required"};

        auto seq = load_sequence(frames_dir);
        auto results = run_tracker(seq.get(), box, config);
        check(smr_results_write_csv(results.get(), out.c_str()), "write");

        json inputs = {{"frames", frames_dir}, {"frame_count", smr_sequence_size(seq.get())}, {"init", box_json(box)}};
        if (!flags.config_path.empty()) inputs["config_file"] = flags.config_path;
        write_manifest(manifest_for(out), "track", config_json(config), inputs, {out}, clock);
        std::cout << "tracked " << smr_results_size(results.get()) << " frames -> " << out << "\n";
        return 0;
    }
};

struct EvalCmd {
    std::string results_path, truth_path, out;
    double threshold = 0.5;

    void attach(CLI::App* app) {
        app->add_option("--results", results_path, "results CSV from track")->required();
        app->add_option("--truth", truth_path, "ground-truth CSV")->required();
        app->add_option("--iou-threshold,--threshold", threshold, "IoU needed to count a frame (default 0.5)");
        app->add_option("--out", out, "per-frame IoU CSV")->required();
    }

    int run() const {
        Stopwatch clock;
        smr_results* r = nullptr;
        check(smr_results_read_csv(results_path.c_str(), &r), results_path);
        ResultsPtr results(r);
        smr_truth* t = nullptr;
        check(smr_truth_read_csv(truth_path.c_str(), &t), truth_path);
        TruthPtr truth(t);
        smr_report* rep = nullptr;
        check(smr_evaluate(results.get(), truth.get(), threshold, &rep), "eval");
        ReportPtr report(rep);
        check(smr_report_write_csv(report.get(), out.c_str()), "write");

        write_manifest(manifest_for(out), "eval", {{"iou_threshold", threshold}},
                       {{"results", results_path}, {"truth", truth_path}}, {out}, clock);
        std::cout << "correct: " << smr_report_correct(report.get()) << " / " << smr_report_evaluated(report.get())
                  << " (iou>=" << fixed6(threshold) << ")\n";
        return 0;
    }
};

struct SynthCmd {
    std::string spec_path, out_dir;

    void attach(CLI::App* app) {
        app->add_option("--spec", spec_path, "scene description")->required();
        app->add_option("--out-dir", out_dir, "output directory")->required();
    }

    int run() const {
        Stopwatch clock;
        smr_synth* s = nullptr;
        check(smr_synth_load(spec_path.c_str(), &s), "spec");
        SynthPtr synth(s);
        check(smr_synth_write(synth.get(), out_dir.c_str()), "synth");
        const auto length = smr_synth_length(synth.get());

        std::vector<std::string> outputs;
        char name[32];
        for (int64_t i = 1; i <= length; ++i) {
            std::snprintf(name, sizeof name, "%05lld.pgm", static_cast<long long>(i));
            outputs.push_back((fs::path(out_dir) / name).string());
        }
        outputs.push_back((fs::path(out_dir) / "truth.csv").string());
        outputs.push_back((fs::path(out_dir) / "init.txt").string());
        write_manifest(fs::path(out_dir) / "manifest.json", "synth", json::object(), {{"spec", spec_path}}, outputs,
                       clock);
        std::cout << "wrote " << length << " frames -> " << out_dir << "\n";
        return 0;
    }
};

struct DiagnoseCmd {
    std::string frame_path, template_frame_path, out_dir;
    std::vector<int> template_box, box_a, box_b;
    double alpha = 63.75;
    double beta = 1.0;
    int bin_width = 8;

    void attach(CLI::App* app) {
        app->add_option("--frame", frame_path, "frame holding the candidates")->required();
        app->add_option("--template-frame", template_frame_path, "frame the template is cut from")->required();
        app->add_option("--template-box", template_box, "template box X Y W H")->expected(4)->required();
        app->add_option("--box-a", box_a, "candidate A (e.g. SMR output) X Y W H")->expected(4)->required();
        app->add_option("--box-b", box_b, "candidate B (e.g. SAD output) X Y W H")->expected(4)->required();
        app->add_option("--alpha", alpha, "SMR threshold (default 63.75)");
        app->add_option("--beta", beta, "SMR exp scale (default 1.0)");
        app->add_option("--bin-width", bin_width, "histogram bin width (default 8)");
        app->add_option("--out-dir", out_dir, "output directory")->required();
    }

    int run() const {
        Stopwatch clock;
        smr_frame* raw = nullptr;
        check(smr_frame_load(frame_path.c_str(), &raw), frame_path);
        FramePtr frame(raw);
        check(smr_frame_load(template_frame_path.c_str(), &raw), template_frame_path);
        FramePtr template_frame(raw);
        check(smr_frame_crop(template_frame.get(), to_box(template_box), &raw), "template box");
        FramePtr tmpl(raw);

        fs::create_directories(out_dir);
        std::vector<std::string> outputs;
        std::string scores = "candidate,x,y,w,h,smr,sad\n";
        const std::pair<const char*, smr_box> candidates[] = {{"a", to_box(box_a)}, {"b", to_box(box_b)}};
        for (const auto& [name, box] : candidates) {
            check(smr_frame_crop(frame.get(), box, &raw), std::string("box ") + name);
            FramePtr patch(raw);
            double smr = 0.0;
            int64_t sad = 0;
            check(smr_score_smr(patch.get(), tmpl.get(), alpha, beta, &smr), std::string("box ") + name);
            check(smr_score_sad(patch.get(), tmpl.get(), &sad), std::string("box ") + name);
            check(smr_diff_map(patch.get(), tmpl.get(), &raw), std::string("box ") + name);
            FramePtr map(raw);

            const std::string map_path = (fs::path(out_dir) / (std::string("diff_") + name + ".pgm")).string();
            const std::string hist_path = (fs::path(out_dir) / (std::string("hist_") + name + ".csv")).string();
            check(smr_frame_write_pgm(map.get(), map_path.c_str()), "write");
            check(smr_histogram_write_csv(map.get(), bin_width, hist_path.c_str()), "write");
            outputs.push_back(map_path);
            outputs.push_back(hist_path);

            scores += std::string(name) + "," + std::to_string(box.x) + "," + std::to_string(box.y) + "," +
                      std::to_string(box.w) + "," + std::to_string(box.h) + "," + fixed6(smr) + "," +
                      std::to_string(sad) + "\n";
            std::cout << "box " << name << ": smr " << fixed6(smr) << "  sad " << sad << "\n";
        }
        const std::string scores_path = (fs::path(out_dir) / "scores.csv").string();
        {
            std::ofstream out(scores_path, std::ios::trunc);
            if (!out) throw Failure{SMR_ERR_IO, "cannot write " + scores_path};
            out << scores;
        }
        outputs.push_back(scores_path);

        write_manifest(fs::path(out_dir) / "manifest.json", "diagnose",
                       {{"alpha", alpha}, {"beta", beta}, {"bin_width", bin_width}},
                       {{"frame", frame_path},
                        {"template_frame", template_frame_path},
                        {"template_box", box_json(to_box(template_box))},
                        {"box_a", box_json(to_box(box_a))},
                        {"box_b", box_json(to_box(box_b))}},
                       outputs, clock);
        return 0;
    }
};

struct CompareCmd {
    std::vector<std::string> reports;    // triples: tracker, sequence, file
    std::vector<std::string> sequences;  // triples: name, frames dir, truth csv
    std::string out, work_dir;
    double threshold = 0.5;
    TrackerFlags flags;

    void attach(CLI::App* app) {
        app->add_option("--report", reports, "TRACKER SEQUENCE REPORT_CSV (repeatable)")
            ->expected(3)
            ->allow_extra_args(false)
            ->take_all();
        app->add_option("--sequence", sequences, "NAME FRAMES_DIR TRUTH_CSV: run SMR and SAD (repeatable)")
            ->expected(3)
            ->allow_extra_args(false)
            ->take_all();
        app->add_option("--iou-threshold,--threshold", threshold, "IoU needed to count a frame (default 0.5)");
        app->add_option("--work-dir", work_dir, "where --sequence runs keep their results and reports");
        app->add_option("--out", out, "comparison table CSV")->required();
        flags.attach(app);
    }

    int run() const {
        Stopwatch clock;
        if (reports.empty() && sequences.empty())
            throw Failure{SMR_ERR_INVALID_ARGUMENT, "compare needs at least one --report or --sequence"};
        smr_table* t = nullptr;
        check(smr_table_create(&t));
        TablePtr table(t);
        std::vector<std::string> outputs;
        json inputs = json::array();

        for (std::size_t i = 0; i + 2 < reports.size(); i += 3) {
            smr_report* rep = nullptr;
            check(smr_report_read_csv(reports[i + 2].c_str(), &rep), reports[i + 2]);
            ReportPtr report(rep);
            check(smr_table_add(table.get(), reports[i].c_str(), reports[i + 1].c_str(), report.get()));
            inputs.push_back({{"tracker", reports[i]}, {"sequence", reports[i + 1]}, {"report", reports[i + 2]}});
        }

        smr_config base{};
        if (!sequences.empty()) base = flags.resolve();
        for (std::size_t i = 0; i + 2 < sequences.size(); i += 3) {
            const std::string& name = sequences[i];
            auto seq = load_sequence(sequences[i + 1]);
            smr_truth* tr = nullptr;
            check(smr_truth_read_csv(sequences[i + 2].c_str(), &tr), sequences[i + 2]);
            TruthPtr truth(tr);
            smr_box init;
            int32_t present = 0;
            check(smr_truth_box(truth.get(), 1, &init, &present), sequences[i + 2]);
            if (!present) throw Failure{SMR_ERR_INVALID_ARGUMENT, sequences[i + 2] + ": frame 1 has no box to start from"};
            inputs.push_back({{"sequence", name}, {"frames", sequences[i + 1]}, {"truth", sequences[i + 2]}});

            for (smr_metric metric : {SMR_METRIC_SMR, SMR_METRIC_SAD}) {
                smr_config config = base;
                config.metric = metric;
                const std::string tracker = metric == SMR_METRIC_SAD ? "SAD" : "SMR";
                auto results = run_tracker(seq.get(), init, config);
                smr_report* rep = nullptr;
                check(smr_evaluate(results.get(), truth.get(), threshold, &rep), name);
                ReportPtr report(rep);
                check(smr_table_add(table.get(), tracker.c_str(), name.c_str(), report.get()));
                if (!work_dir.empty()) {
                    const auto stem = (fs::path(work_dir) / (name + "_" + tracker)).string();
                    fs::create_directories(work_dir);
                    check(smr_results_write_csv(results.get(), (stem + ".csv").c_str()), "write");
                    check(smr_report_write_csv(report.get(), (stem + ".eval.csv").c_str()), "write");
                    outputs.push_back(stem + ".csv");
                    outputs.push_back(stem + ".eval.csv");
                }
            }
        }

        check(smr_table_write_csv(table.get(), out.c_str()), "write");
        outputs.push_back(out);
        size_t needed = 0;
        check(smr_table_text(table.get(), nullptr, 0, &needed));
        std::string text(needed + 1, '\0');
        check(smr_table_text(table.get(), text.data(), text.size(), &needed));
        text.resize(needed);
        std::cout << text;

        json config = {{"iou_threshold", threshold}};
        if (!sequences.empty()) config["tracker"] = config_json(base);
        write_manifest(manifest_for(out), "compare", config, inputs, outputs, clock);
        return 0;
    }
};

void apply_thread_cap() {
    const char* env = std::getenv("SMR_THREADS");
    if (!env || !*env) {
        smr_set_max_threads(0);
        return;
    }
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (*end != '\0') throw Failure{SMR_ERR_CONFIG, std::string("SMR_THREADS must be a non-negative integer, got ") + env};
    smr_set_max_threads(static_cast<uint32_t>(n));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SMR visual tracker: similarity-matching-ratio template tracking and evaluation"};
    app.set_version_flag("--version", std::string(smr_version()));
    app.require_subcommand(1);

    TrackCmd track;
    EvalCmd eval;
    SynthCmd synth;
    DiagnoseCmd diagnose;
    CompareCmd compare;
    track.attach(app.add_subcommand("track", "track a target through a frame directory"));
    eval.attach(app.add_subcommand("eval", "count correctly tracked frames against ground truth"));
    synth.attach(app.add_subcommand("synth", "render a synthetic sequence with exact ground truth"));
    diagnose.attach(app.add_subcommand("diagnose", "difference maps, histograms and scores for two candidate boxes"));
    compare.attach(app.add_subcommand("compare", "table of correctly tracked frames per tracker and sequence"));

    CLI11_PARSE(app, argc, argv);

    try {
        apply_thread_cap();
        const auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "track") return track.run();
        if (name == "eval") return eval.run();
        if (name == "synth") return synth.run();
        if (name == "diagnose") return diagnose.run();
        if (name == "compare") return compare.run();
    } catch (const Failure& f) {
        std::cerr << "smr: " << smr_status_string(f.status) << ": " << f.message << "\n";
        return static_cast<int>(f.status);
    } catch (const std::exception& e) {
        std::cerr << "smr: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
