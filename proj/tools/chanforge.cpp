// SPDX-License-Identifier: Apache-2.0
//
// chanforge: generative modelling of non-stationary dynamic radio channels
// Copyright (C) 2026 The chanforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// chanforge command-line front end: simulate, preprocess, stats, train, generate, evaluate.

#include "CLI11.hpp"

#include "chanforge/dataset_io.hpp"
#include "chanforge/evalreport.hpp"
#include "chanforge/preprocess.hpp"
#include "chanforge/simkit.hpp"
#include "chanforge/stats.hpp"
#include "chanforge/train.hpp"

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

namespace fs = std::filesystem;
using namespace chanforge;

namespace
{
    int run_simulate(const fs::path &config, const fs::path &out, std::uint64_t seed)
    {
        const SimulationPlan plan = read_simulation_plan(config);
        const ChannelDataset ds = build_dataset(plan.scenarios, plan.n_per_config, seed);
        write_dataset(out, ds);
        std::printf("simulated %zu channels (T=%d, D=%d) into %s\n", ds.size(), ds.manifest.n_snapshots,
                    ds.manifest.n_delay_bins, out.string().c_str());
        return 0;
    }

    int run_preprocess(const fs::path &in, const fs::path &out, double threshold)
    {
        const ChannelDataset ds = preprocess_dataset(read_dataset(in), threshold);
        write_dataset(out, ds);
        std::printf("preprocessed %zu channels: P_min=%.6g dB, P_max=%.6g dB\n", ds.size(), ds.manifest.bounds->p_min,
                    ds.manifest.bounds->p_max);
        return 0;
    }

    int run_stats(const fs::path &in, const fs::path &out, const std::string &csv)
    {
        ChannelDataset ds = read_dataset(in);
        if (ds.manifest.normalized)
            ds = decode_dataset(ds);
        const StatsSummary s = stats_summary(ds);
        if (out.has_parent_path())
            fs::create_directories(out.parent_path());
        detail::write_text_file(out, summary_to_json(s).dump(2) + "\n");
        fs::path csv_path = csv.empty() ? fs::path(out).replace_extension(".csv") : fs::path(csv);
        detail::write_text_file(csv_path, summary_csv(s, in.filename().string()));
        std::cout << summary_csv(s, in.filename().string());
        return 0;
    }

    int run_train(const fs::path &data, const fs::path &config, const fs::path &out, std::optional<int> epochs,
                  std::optional<std::uint64_t> seed, bool quiet)
    {
        TrainConfig cfg = config.empty() ? TrainConfig{} : train_config_from_json(detail::read_json_file(config));
        if (epochs)
            cfg.epochs = *epochs;
        if (seed)
            cfg.seed = *seed;
        cfg.validate();
        const ChannelDataset ds = read_dataset(data);
        if (!ds.manifest.normalized)
            throw std::invalid_argument("Training data must be preprocessed; run 'chanforge preprocess' first.");
        TrainOutputs outputs;
        outputs.directory = out;
        if (!quiet)
        {
            outputs.on_epoch = [](int epoch, const StepRecord &r)
            { std::printf("epoch %4d  L_D %.4g  L_G %.4g  L_linear %.4g  L_TPCC %.4g\n", epoch, r.l_d, r.l_g, r.l_linear, r.l_tpcc); };
            outputs.on_probe = [](const ProbeRecord &p)
            { std::printf("  probe epoch %d: RMSDS FID %.6g\n", p.epoch, p.fid_rmsds); };
        }
        const TrainResult r = train(ds, cfg, outputs);
        std::printf("trained %lld steps in %.1f s; checkpoint %s\n", static_cast<long long>(r.checkpoint.step),
                    r.history.wall_clock_s, (out / "model.cfck").string().c_str());
        return 0;
    }

    int run_generate(const fs::path &ckpt, const std::string &label, std::size_t n, std::uint64_t seed, const fs::path &out)
    {
        const Checkpoint ck = read_checkpoint(ckpt);
        const ChannelDataset ds = label == "all" ? generate_all(ck, n, seed) : generate(ck, parse_category(label), n, seed);
        write_dataset(out, ds);
        std::printf("generated %zu channels into %s\n", ds.size(), out.string().c_str());
        return 0;
    }

    int run_evaluate(const fs::path &ref, const std::vector<std::string> &gens, const fs::path &out, bool figures)
    {
        auto load_db = [](const fs::path &p)
        {
            ChannelDataset ds = read_dataset(p);
            return ds.manifest.normalized ? decode_dataset(ds) : ds;
        };
        const ChannelDataset reference = load_db(ref);
        std::map<std::string, ChannelDataset> generated;
        for (const auto &g : gens)
        {
            const auto eq = g.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == g.size())
                throw std::invalid_argument("--gen expects method=dir, got '" + g + "'.");
            const std::string name = g.substr(0, eq);
            if (generated.count(name))
                throw std::invalid_argument("Method '" + name + "' given twice.");
            generated.emplace(name, load_db(g.substr(eq + 1)));
        }
        EvalReport report = evaluate(reference, generated);
        if (figures)
            for (auto &f : render_figures(report, reference, generated, out / "figs"))
                f = "figs/" + f;
        write_report(out, report);
        std::cout << table2_csv(report) << '\n' << fid_csv(report);
        return 0;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"chanforge: simulate, train and evaluate generative models of dynamic radio channels"};
    app.require_subcommand(1);

    auto *sim = app.add_subcommand("simulate", "Simulate a channel dataset from a scenario plan");
    fs::path sim_config, sim_out;
    std::uint64_t sim_seed = 0;
    sim->add_option("--config", sim_config, "Simulation plan (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", sim_out, "Output dataset directory")->required();
    sim->add_option("--seed", sim_seed, "Master seed");

    auto *pre = app.add_subcommand("preprocess", "Mask and normalise a dataset");
    fs::path pre_in, pre_out;
    double threshold = -150.0;
    pre->add_option("--in", pre_in, "Raw dataset directory")->required()->check(CLI::ExistingDirectory);
    pre->add_option("--out", pre_out, "Output dataset directory")->required();
    pre->add_option("--threshold", threshold, "Validity threshold (dB)");

    auto *st = app.add_subcommand("stats", "Per-category channel statistics");
    fs::path st_in, st_out;
    std::string st_csv;
    st->add_option("--in", st_in, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    st->add_option("--out", st_out, "Summary JSON path")->required();
    st->add_option("--csv", st_csv, "Summary CSV path (default: next to the JSON)");

    auto *tr = app.add_subcommand("train", "Train a generator on a preprocessed dataset");
    fs::path tr_data, tr_config, tr_out;
    std::optional<int> tr_epochs;
    std::optional<std::uint64_t> tr_seed;
    bool quiet = false;
    tr->add_option("--data", tr_data, "Preprocessed dataset directory")->required()->check(CLI::ExistingDirectory);
    tr->add_option("--config", tr_config, "Training config (JSON)")->check(CLI::ExistingFile);
    tr->add_option("--out", tr_out, "Run directory")->required();
    tr->add_option("--epochs", tr_epochs, "Override the configured epoch count");
    tr->add_option("--seed", tr_seed, "Override the configured seed");
    tr->add_flag("--quiet", quiet, "No per-epoch progress");

    auto *gen = app.add_subcommand("generate", "Sample channels from a checkpoint");
    fs::path gen_ckpt, gen_out;
    std::string gen_label = "all";
    std::size_t gen_n = 100;
    std::uint64_t gen_seed = 0;
    gen->add_option("--ckpt", gen_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
    gen->add_option("--label", gen_label, "weak, strong or all");
    gen->add_option("--n", gen_n, "Channels to generate (per label for 'all')");
    gen->add_option("--seed", gen_seed, "Sampling seed");
    gen->add_option("--out", gen_out, "Output dataset directory")->required();

    auto *ev = app.add_subcommand("evaluate", "Compare generated datasets with a reference");
    fs::path ev_ref, ev_out;
    std::vector<std::string> ev_gen;
    bool no_figs = false;
    ev->add_option("--ref", ev_ref, "Reference dataset directory")->required()->check(CLI::ExistingDirectory);
    ev->add_option("--gen", ev_gen, "method=dir, repeatable")->required();
    ev->add_option("--out", ev_out, "Report directory")->required();
    ev->add_flag("--no-figs", no_figs, "Skip PNG figures");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sim)
            return run_simulate(sim_config, sim_out, sim_seed);
        if (*pre)
            return run_preprocess(pre_in, pre_out, threshold);
        if (*st)
            return run_stats(st_in, st_out, st_csv);
        if (*tr)
            return run_train(tr_data, tr_config, tr_out, tr_epochs, tr_seed, quiet);
        if (*gen)
            return run_generate(gen_ckpt, gen_label, gen_n, gen_seed, gen_out);
        if (*ev)
            return run_evaluate(ev_ref, ev_gen, ev_out, !no_figs);
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
