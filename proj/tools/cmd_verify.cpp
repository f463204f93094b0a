#include <fstream>

#include "cli_common.hpp"
#include "decmdp/errors.hpp"
#include "decmdp/verify/properties.hpp"

namespace decmdp::cli {

int cmd_verify(const Invocation& inv, const std::vector<std::string>& only, const std::string& fault) {
  verify::SuiteOptions opt;
  const auto groups = verify::suite_groups();
  for (const auto& g : only) {
    for (const auto& item : split_list(g)) {
      if (std::find(groups.begin(), groups.end(), item) == groups.end()) {
        throw ConfigError("unknown property group '" + item + "'");
      }
      opt.only.push_back(item);
    }
  }
  if (fault == "candidate-sign") {
    opt.fault = verify::Fault::candidate_sign;
  } else if (!fault.empty() && fault != "none") {
    throw ConfigError("unknown fault '" + fault + "'");
  }

  const io::KeyValue kv = resolve(inv);
  io::RunManifest manifest("verify", kv, 0, output_dir(inv));
  manifest.begin();
  write_resolved_config(manifest);
  const auto results = verify::run_suite(opt);
  std::ofstream report(manifest.output("verify.csv"), std::ios::binary);
  report << "property,group,passed,value,tolerance,margin\n";
  std::size_t failed = 0;
  for (const auto& r : results) {
    const double margin = r.tolerance - r.value;
    std::printf("%s  %-32s value %-11.4g tol %-9.3g margin %-11.4g %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.value, r.tolerance, margin, r.detail.c_str());
    report << r.name << ',' << r.group << ',' << (r.passed ? 1 : 0) << ',' << io::format_exact(r.value) << ','
           << io::format_exact(r.tolerance) << ',' << io::format_exact(margin) << '\n';
    failed += r.passed ? 0 : 1;
  }
  std::printf("%zu of %zu properties passed\n", results.size() - failed, results.size());
  manifest.finish(failed == 0 ? "ok" : "failed: " + std::to_string(failed) + " properties");
  return failed == 0 ? kOk : kFailure;
}

}  // namespace decmdp::cli
