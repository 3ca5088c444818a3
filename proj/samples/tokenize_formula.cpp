// Prints the token stream and the numeric constants of one formula.
//   sample_tokenize "=IF(C7*Data!$C$30>200, Data!$C$30*C7, 200)"
#include <hcaudit/hcaudit.hpp>

#include <iostream>

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: sample_tokenize FORMULA [a1|r1c1]\n";
        return 2;
    }
    auto style = argc > 2 && hcaudit::detail::iequals(argv[2], "r1c1") ? hcaudit::RefStyle::R1C1
                                                                       : hcaudit::RefStyle::A1;
    try {
        auto tokens = hcaudit::tokenize(argv[1], style);
        for (const auto& t : tokens)
            std::cout << t.span.begin << '-' << t.span.end << '\t' << hcaudit::to_string(t.kind) << '\t'
                      << t.text << '\n';
        std::cout << "constants:";
        for (const auto& c : hcaudit::extract_constants(tokens)) std::cout << ' ' << hcaudit::format_number(c.value);
        std::cout << '\n';
    } catch (const hcaudit::LexError& e) {
        std::cerr << "lex error: " << e.what() << '\n';
        return 1;
    }
}
