#include "gotflow/scaffold.hpp"

#include <fstream>

#include "gotflow/errors.hpp"

namespace gotflow::scaffold {

namespace {

// The workflow document keeps two quirks the engine is expected to digest:
// nodes with two sibling "output" arrays (normalized by entry type), and one
// "$${GF_ROOT}" path (the '$' run collapses on expansion).
constexpr const char* kWorkflowJson = R"json({
  "output_dir_path": "${GF_ROOT}/data/workflows/Ads/output",
  "input_parameters": [
    {
      "suffix": "trend",
      "file_path": "${GF_ROOT}/data/workflows/Ads/input/parameters/trend.json"
    }
  ],
  "flow_items": [
    {
      "id": "data_reader",
      "description": "read data from the result of task_a",
      "type": "executor",
      "input_parameters": [
        {
          "name": "prompt_template_file_path",
          "type": "prompt_template",
          "file_path": "${GF_ROOT}/data/workflows/Ads/prompts/sum_data_reader.txt"
        }
      ],
      "output": [{
        "type": "variable",
        "name": "data_reader_output"
      }],
      "next_nodes": ["determine_data_feature"]
    },
    {
      "id": "determine_data_feature",
      "description": "",
      "type": "decision_maker",
      "input_parameters": [
        {
          "name": "prompt_template_file_path",
          "type": "prompt_template",
          "file_path": "${GF_ROOT}/data/workflows/Ads/prompts/sum_data_feature_determine.txt"
        }
      ],
      "output": [{
        "name": "data_reader_output",
        "type": "output_variable"
      }],
      "condition": {
        "is_composed": false,
        "data_source": {
          "type": "output_variable",
          "name": "is_quantitative_data"
        },
        "operator": "equal",
        "operand": "yes"
      },
      "forward_paths": [
        {
          "condition_result": true,
          "next_nodes": ["data_trend_miner"]
        },
        {
          "condition_result": false,
          "next_nodes": ["qualitative_analysis_1", "qualitative_analysis_2"]
        }
      ]
    },
    {
      "id": "data_trend_miner",
      "description": "",
      "type": "executor",
      "input_parameters": [
        {
          "name": "prompt_template_file_path",
          "type": "prompt_template",
          "file_path": "${GF_ROOT}/data/workflows/Ads/prompts/sum_trend_miner.txt"
        }
      ],
      "output": [{
        "name": "data_reader_output",
        "type": "output_variable"
      }],
      "output": [{
        "type": "variable",
        "name": "data_trend_miner_output"
      }],
      "next_nodes": ["quantitative_analysis"]
    },
    {
      "id": "quantitative_analysis",
      "description": "",
      "type": "executor",
      "input_parameters": [
        {
          "name": "prompt_template_file_path",
          "type": "prompt_template",
          "file_path": "${GF_ROOT}/data/workflows/Ads/prompts/sum_quantity_analysis.txt"
        }
      ],
      "output": [{
        "name": "data_trend_miner_output",
        "type": "output_variable"
      }],
      "output": [{
        "type": "file",
        "name": "quantitative_analysis_output.txt"
      }],
      "next_nodes": []
    },
    {
      "id": "qualitative_analysis_1",
      "description": "",
      "type": "executor",
      "input_parameters": [
        {
          "name": "prompt_template_file_path",
          "type": "prompt_template",
          "file_path": "${GF_ROOT}/data/workflows/Ads/prompts/sum_quality_analysis_1.txt"
        }
      ],
      "output": [{
        "name": "data_reader_output",
        "type": "output_variable"
      }],
      "output": [{
        "type": "file",
        "name": "qualitative_analysis_1_output.txt"
      }],
      "next_nodes": []
    },
    {
      "id": "qualitative_analysis_2",
      "description": "",
      "type": "executor",
      "input_parameters": [
        {
          "name": "prompt_template_file_path",
          "type": "prompt_template",
          "file_path": "$${GF_ROOT}/data/workflows/Ads/prompts/sum_quality_analysis_2.txt"
        },
        {
          "name": "data_reader_output",
          "type": "output_variable"
        }
      ],
      "output": [{
        "type": "file",
        "name": "qualitative_analysis_2_output.txt"
      }],
      "next_nodes": []
    }
  ]
}
)json";

constexpr const char* kTrendJson = R"json({
  "organization": "Large Advertising Company",
  "role": "Marketing Director, whose responsibility is to play a core role in the writing of marketing plans, propose strategies and insights based on customer needs, guide creative and delivery execution, and be responsible for the final quality of the plan",
  "customer": "Coffee Producer",
  "report": "Marketing Plan",
  "goal": "Packaged Coffee",
  "target": "Industry Trends",
  "action": "Extract insights and describe the thought process of insights",
  "rules": "Note: Only need to provide the thought process, no need to give a plan. The thought process should start with a serial number and not be summarized at the end",
  "suggest": "",
  "content": "New coffee brands and products are emerging in China, and the market is severely saturated. However, there has been no innovation in the coffee market in Europe and America for decades, which is a new opportunity for packaged coffee. With the decrease in production in some coffee-producing countries and the further increase in coffee demand in various countries, the global coffee market supply gap pushes coffee prices to new highs, which also becomes an opportunity for Chinese packaged coffee brands to go overseas. Emerging instant coffee brands in China, such as Coffee Brand-1, Coffee Brand-2, and Coffee Brand-3, have seized this opportunity and entered the US e-commerce platform, taking the lead in grabbing market share in the United States."
}
)json";

constexpr const char* kDataReaderTpl =
    R"tpl(I am a #{role} at a #{organization}, preparing a #{report} for my #{customer} client. Read the #{target} material between the two "****" below and summarize the facts relevant to #{goal}:
****
#{content}
****
)tpl";

constexpr const char* kDecisionTpl =
    R"tpl(I am a #{role} at a #{organization}, and I am now providing a #{report} for my #{customer} client. The information of #{target} for #{goal} is between the two "---" below, and the data part between the two "****", please judge whether it is possible to conduct a quantitative analysis of #{target} based on the original information and the data therein. If yes, please input "yes", otherwise, please output "no":
---
#{content}
---
****
#{data_reader_output}
****
)tpl";

constexpr const char* kTrendMinerTpl =
    R"tpl(I am a #{role} at a #{organization}. From the summary between the two "****" below, list the measurable #{target} signals for #{goal} as numbered items:
****
#{data_reader_output}
****
)tpl";

constexpr const char* kQuantityTpl =
    R"tpl(I am a #{role} at a #{organization}, writing a #{report} for my #{customer} client. Produce a quantitative analysis of #{target} for #{goal} from the mined signals between the two "****" below. #{rules}
****
#{data_trend_miner_output}
****
)tpl";

constexpr const char* kQuality1Tpl =
    R"tpl(I am a #{role} at a #{organization}, writing a #{report} for my #{customer} client. #{action} about #{target} for #{goal}, based on the summary between the two "****" below. #{rules}
****
#{data_reader_output}
****
)tpl";

constexpr const char* kQuality2Tpl =
    R"tpl(I am a #{role} at a #{organization}. Assess risks and open questions around #{target} for #{goal} from the summary between the two "****" below. #{rules}
****
#{data_reader_output}
****
)tpl";

constexpr const char* kMockYes = R"json({
  "determine_data_feature": "yes",
  "*": "1. The market data shows a steady upward trend."
}
)json";

constexpr const char* kMockNo = R"json({
  "determine_data_feature": "no",
  "*": "1. The market narrative points to qualitative opportunities."
}
)json";

void write_file(const std::filesystem::path& path, const char* content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << content;
}

}  // namespace

BundlePaths write_ads_bundle(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    const fs::path ads = dir / "data" / "workflows" / "Ads";
    std::error_code ec;
    fs::create_directories(ads / "prompts", ec);
    fs::create_directories(ads / "input" / "parameters", ec);
    fs::create_directories(ads / "output", ec);
    if (ec) {
        throw IoError("cannot create bundle directories under " + dir.string());
    }

    BundlePaths paths;
    paths.root = dir;
    paths.workflow = dir / "workflow.json";
    paths.mock_yes = dir / "mock_yes.json";
    paths.mock_no = dir / "mock_no.json";

    write_file(paths.workflow, kWorkflowJson);
    write_file(ads / "input" / "parameters" / "trend.json", kTrendJson);
    write_file(ads / "prompts" / "sum_data_reader.txt", kDataReaderTpl);
    write_file(ads / "prompts" / "sum_data_feature_determine.txt", kDecisionTpl);
    write_file(ads / "prompts" / "sum_trend_miner.txt", kTrendMinerTpl);
    write_file(ads / "prompts" / "sum_quantity_analysis.txt", kQuantityTpl);
    write_file(ads / "prompts" / "sum_quality_analysis_1.txt", kQuality1Tpl);
    write_file(ads / "prompts" / "sum_quality_analysis_2.txt", kQuality2Tpl);
    write_file(paths.mock_yes, kMockYes);
    write_file(paths.mock_no, kMockNo);
    return paths;
}

const char* ads_workflow_json() { return kWorkflowJson; }
const char* ads_trend_json() { return kTrendJson; }
const char* ads_decision_template() { return kDecisionTpl; }

}  // namespace gotflow::scaffold
