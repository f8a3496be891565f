#pragma once

#include <filesystem>

namespace gotflow::scaffold {

struct BundlePaths {
    std::filesystem::path root;      // pass as GF_ROOT
    std::filesystem::path workflow;  // the DSL document
    std::filesystem::path mock_yes;  // mock script taking the YES branch
    std::filesystem::path mock_no;   // mock script taking the NO branch
};

/// Write the packaged Ads example bundle under `dir`: the workflow document,
/// its prompt templates, the shared parameter file, and two mock scripts.
/// Run it with GF_ROOT set to `dir`.
BundlePaths write_ads_bundle(const std::filesystem::path& dir);

const char* ads_workflow_json();
const char* ads_trend_json();
const char* ads_decision_template();

}  // namespace gotflow::scaffold
