// Copyright 2026 The costshare Authors
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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "costshare/cli.hpp"

namespace {

template <class T>
void optional_option(CLI::App* app, const std::string& flag, std::optional<T>& target,
                     const std::string& help) {
  app->add_option_function<T>(flag, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace costshare::cli;
  CLI::App app{"Combinatorial cost-sharing mechanisms and audits"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a mechanism on an instance");
  run_cmd->add_option("--instance", run.instance, "Instance document")->required();
  run_cmd->add_option("--mechanism", run.mechanism, "Mechanism")
      ->check(CLI::IsMember({"potential", "sequential-gsp", "sequential-wgsp", "vcg"}));
  optional_option(run_cmd, "--tie-break", run.tie_break, "canonical | symmetric-prefix");
  run_cmd->add_flag("--opt", run.opt, "Compute the brute-force optimum");
  optional_option(run_cmd, "--out", run.out, "Report path (default: stdout)");

  CheckOptions check;
  auto* check_cmd = app.add_subcommand("check", "Check a structural property");
  check_cmd->add_option("--instance", check.instance, "Instance document")->required();
  check_cmd->add_option("--property", check.property, "Property")
      ->required()
      ->check(CLI::IsMember({"submodular-cost", "supermodular-valuations", "symmetric",
                             "subadditive-cost", "potential-bounds",
                             "potential-identity"}));

  DemoOptions demo;
  auto* demo_cmd = app.add_subcommand("demo", "Build and run a named construction");
  demo_cmd->add_option("--name", demo.name, "Construction name")->required();
  demo_cmd->add_option("--players", demo.players, "Number of players")->required();
  optional_option(demo_cmd, "--epsilon", demo.epsilon, "Construction epsilon");
  optional_option(demo_cmd, "--out", demo.out, "Report path (default: stdout)");

  AuditOptions audit;
  auto* audit_cmd = app.add_subcommand("audit", "Run an incentive or structural audit");
  optional_option(audit_cmd, "--instance", audit.instance, "Instance document");
  audit_cmd->add_option("--audit", audit.audit, "Audit")
      ->required()
      ->check(CLI::IsMember({"sp", "wgsp", "gsp", "bb-inequality", "minimality", "marginal"}));
  audit_cmd->add_option("--mechanism", audit.mechanism, "Mechanism under audit")
      ->check(CLI::IsMember({"potential", "sequential-gsp", "sequential-wgsp", "vcg",
                             "pay-your-bid"}));
  optional_option(audit_cmd, "--tie-break", audit.tie_break, "canonical | symmetric-prefix");
  optional_option(audit_cmd, "--grid", audit.grid,
                  "scales=a,b;values=lo:hi:step;table=on|off;max=N;samples=N;coalition=K");
  audit_cmd->add_option("--seed", audit.seed, "Seed for sampled misreports");
  optional_option(audit_cmd, "--h-levels", audit.h_levels, "h(0),h(1),... for marginal");
  audit_cmd->add_option("--objective", audit.objective, "minimality: potential | cost");
  audit_cmd->add_option("--scale", audit.scale, "minimality: multiply h by this factor");
  optional_option(audit_cmd, "--out", audit.out, "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }

  if (*run_cmd) return cmd_run(run, std::cout, std::cerr);
  if (*check_cmd) return cmd_check(check, std::cout, std::cerr);
  if (*demo_cmd) return cmd_demo(demo, std::cout, std::cerr);
  return cmd_audit(audit, std::cout, std::cerr);
}
