// Analyzes one workbook (.xlsx or interchange .json) and prints the text
// detail report to stdout.
//   sample_audit model.xlsx [config.json]
#include <hcaudit/cli.hpp>
#include <hcaudit/hcaudit.hpp>

#include <iostream>

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: sample_audit WORKBOOK [CONFIG]\n";
        return 2;
    }
    try {
        hcaudit::DetectionConfig config;
        if (argc > 2) config = hcaudit::load_config(argv[2]);
        auto workbook = hcaudit::cli::load_workbook(argv[1]);
        auto report = hcaudit::analyze_workbook(workbook, config);
        std::cout << hcaudit::render_detail(report, hcaudit::Format::Text).body;
    } catch (const hcaudit::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
