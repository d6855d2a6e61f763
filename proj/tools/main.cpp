// Copyright 2026 The qattr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <functional>
#include <iostream>
#include <map>

#include "commands.hpp"
#include "qattr/error.hpp"

using namespace qattr;
using namespace qattr::cli;

namespace {

enum ExitCode { kOk = 0, kUnexpected = 1, kConfig = 2, kIo = 3, kNumerical = 4 };

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io:
            return kIo;
        case ErrorKind::Numerical:
            return kNumerical;
        default:
            return kConfig;
    }
}

std::string kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
            return "invalid_argument";
        case ErrorKind::Config:
            return "config";
        case ErrorKind::Io:
            return "io";
        case ErrorKind::Numerical:
            return "numerical";
    }
    return "unknown";
}

int report(int code, const std::string &kind, const std::string &message, Json extra = Json::object()) {
    Json err{{"code", code}, {"kind", kind}, {"message", message}};
    for (auto &[k, v] : extra.items()) err[k] = std::move(v);
    std::cerr << Json{{"error", err}}.dump() << "\n";
    return code;
}

/// A flag that writes its value at a JSON pointer inside the config.
struct Override {
    std::string flag;
    std::string pointer;
    std::string help;
    bool list = false;
    std::vector<std::string> values;
};

/// Values parse as JSON when they can ("12", "true", "[1,2]") and fall back
/// to plain strings ("Z0", "mnist").
Json parse_value(const std::string &s) {
    Json j = Json::parse(s, nullptr, false);
    return j.is_discarded() ? Json(s) : j;
}

struct Command {
    std::string name;
    std::string help;
    std::function<int(const Invocation &)> run;
    std::string seed_pointer;
    std::vector<Override> overrides;
};

std::vector<Command> commands() {
    const std::vector<Override> data = {
        {"--data", "/data", "samples.json written by generate-data"},
    };
    const std::vector<Override> selection = {
        {"--model", "/model", "trained model.json"},
        {"--split", "/samples/split", "train or test"},
        {"--indices", "/samples/indices", "comma-separated sample indices", true},
    };
    auto join = [](std::vector<Override> a, const std::vector<Override> &b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    return {
        {"generate-data",
         "Build a labelled binary task and write samples.json",
         run_generate_data,
         "/dataset/seed",
         {{"--dataset", "/dataset/name", "bars_and_stripes, nist8x8, mnist or fashion_mnist"},
          {"--image-side", "/dataset/image_side", "image width in pixels"},
          {"--classes", "/dataset/class_pair", "two comma-separated class names", true},
          {"--images", "/source/images", "IDX images file (.gz accepted)"},
          {"--labels", "/source/labels", "IDX labels file (.gz accepted)"}}},
        {"train",
         "Fit the variational parameters and write model.json",
         run_train,
         "/seed",
         join(data,
              {{"--qubits", "/model/n_qubits", "register width (default fits the features)"},
               {"--layers", "/model/n_layers", "ansatz layers"},
               {"--encoding", "/model/encoding", "amplitude_overflow, amplitude_normalized or angle"},
               {"--observable", "/model/observable", "Pauli string such as Z0 or X0Z2"},
               {"--optimizer", "/optimizer/kind", "spsa or gd_param_shift"},
               {"--max-iters", "/optimizer/max_iters", "optimizer iterations"},
               {"--resume", "/optimizer/resume", "model.json whose theta seeds the run"}})},
        {"evaluate", "Report accuracy and loss of a trained model", run_evaluate, "", join(data, {selection[0]})},
        {"attribute",
         "Integrated-gradient attributions and heatmaps",
         run_attribute,
         "/seed",
         join(join(data, selection),
              {{"--method", "/attribution/backend/method", "exact, hadamard_single, hadamard_multi"},
               {"--ancillas", "/attribution/backend/ancillas", "ancillas for hadamard_multi"},
               {"--shots", "/attribution/backend/shots", "exact or a shot count per circuit"},
               {"--steps", "/attribution/path_steps", "integration steps"}})},
        {"gradcheck",
         "Compare shot-based gradient estimators with the exact gradient",
         run_gradcheck,
         "/seed",
         join(join(data, selection),
              {{"--shots", "/shots", "comma-separated shot counts (or exact)", true},
               {"--ancillas", "/ancillas", "comma-separated ancilla counts", true}})},
        {"null-model",
         "Attribute random-parameter models for comparison with a trained one",
         run_null_model,
         "/seed",
         join(join(data, selection), {{"--nulls", "/nulls", "comma-separated null distributions", true}})},
    };
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qattr: attribution for quantum classifiers"};
    app.set_version_flag("--version", QATTR_VERSION);
    app.require_subcommand(1);

    auto table = commands();
    struct Parsed {
        std::string config;
        std::string out;
        std::optional<std::uint64_t> seed;
    };
    std::vector<Parsed> parsed(table.size());
    std::vector<CLI::App *> subs;
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto &cmd = table[i];
        auto *sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", parsed[i].config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", parsed[i].out, "output directory")->required();
        if (!cmd.seed_pointer.empty()) sub->add_option("--seed", parsed[i].seed, "root seed");
        for (auto &o : cmd.overrides) {
            auto *opt = sub->add_option(o.flag, o.values, o.help);
            if (o.list) {
                opt->delimiter(',');
            } else {
                opt->expected(1);
            }
        }
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        return report(kConfig, "usage", e.what());
    }

    std::size_t which = 0;
    while (!subs[which]->parsed()) ++which;
    const auto &cmd = table[which];
    const auto &p = parsed[which];

    try {
        Invocation inv;
        inv.command = cmd.name;
        inv.out = p.out;
        if (!p.config.empty()) {
            inv.config = read_json_file(p.config);
            if (!inv.config.is_object()) throw Error(ErrorKind::Config, p.config + ": expected a JSON object");
        }
        for (const auto &o : cmd.overrides) {
            if (o.values.empty()) continue;
            Json v;
            if (o.list) {
                v = Json::array();
                for (const auto &s : o.values) v.push_back(parse_value(s));
            } else {
                v = parse_value(o.values.front());
            }
            inv.config[Json::json_pointer(o.pointer)] = std::move(v);
        }
        if (p.seed) inv.config[Json::json_pointer(cmd.seed_pointer)] = *p.seed;
        return cmd.run(inv);
    } catch (const NearOverflowSingularity &e) {
        Json extra{{"overflow_amplitude", e.overflow_amplitude()}};
        if (e.alpha() >= 0.0) extra["alpha"] = e.alpha();
        return report(kNumerical, "near_overflow_singularity", e.what(), std::move(extra));
    } catch (const Error &e) {
        return report(exit_code_for(e.kind()), kind_name(e.kind()), e.what());
    } catch (const Json::exception &e) {
        return report(kConfig, "config", e.what());
    } catch (const std::filesystem::filesystem_error &e) {
        return report(kIo, "io", e.what());
    } catch (const std::exception &e) {
        return report(kUnexpected, "internal", e.what());
    }
}
