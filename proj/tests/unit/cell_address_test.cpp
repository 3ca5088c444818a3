#include <hcaudit/cell_address.hpp>
#include <hcaudit/errors.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace hcaudit;

TEST(ColumnLetters, KnownValues) {
    EXPECT_EQ(column_letters(1), "A");
    EXPECT_EQ(column_letters(26), "Z");
    EXPECT_EQ(column_letters(27), "AA");
    EXPECT_EQ(column_letters(52), "AZ");
    EXPECT_EQ(column_letters(703), "AAA");
    EXPECT_EQ(column_letters(16384), "XFD");
}

TEST(ColumnLetters, InverseOfIndex) {
    for (std::uint32_t c = 1; c <= 20000; ++c) ASSERT_EQ(column_index(column_letters(c)), c) << c;
    EXPECT_EQ(column_index("xfd"), 16384u);
    EXPECT_FALSE(column_index(""));
    EXPECT_FALSE(column_index("A1"));
}

TEST(ParseAddress, A1Forms) {
    auto a = parse_address("$C$24");
    EXPECT_EQ(a.column, 3u);
    EXPECT_EQ(a.row, 24u);
    EXPECT_TRUE(a.col_absolute);
    EXPECT_TRUE(a.row_absolute);
    EXPECT_FALSE(a.sheet);

    auto b = parse_address("Data!H9");
    ASSERT_TRUE(b.sheet);
    EXPECT_EQ(*b.sheet, "Data");
    EXPECT_EQ(b.column, 8u);
    EXPECT_FALSE(b.col_absolute);

    auto c = parse_address("'Prod 2007'!$D6");
    EXPECT_EQ(*c.sheet, "Prod 2007");
    EXPECT_TRUE(c.col_absolute);
    EXPECT_FALSE(c.row_absolute);

    auto d = parse_address("'It''s'!A1");
    EXPECT_EQ(*d.sheet, "It's");
}

TEST(ParseAddress, R1C1Form) {
    auto a = parse_address("R9C9", RefStyle::R1C1);
    EXPECT_EQ(a.row, 9u);
    EXPECT_EQ(a.column, 9u);
    EXPECT_EQ(to_string(a), "R9C9");
}

TEST(ParseAddress, Rejects) {
    for (const char* bad : {"", "A0", "ZZZZ0", "1A", "A", "$", "A1B", "A-1", "'x!A1"})
        EXPECT_THROW(parse_address(bad), AddressError) << bad;
    EXPECT_THROW(parse_address("R0C1", RefStyle::R1C1), AddressError);
    EXPECT_THROW(parse_address("R[1]C1", RefStyle::R1C1), AddressError);
    EXPECT_FALSE(try_parse_address("B0"));
}

TEST(ParseAddress, NoUpperGridBound) {
    auto a = parse_address("AAAA2000000");
    EXPECT_EQ(a.row, 2000000u);
    EXPECT_EQ(a.column, *column_index("AAAA"));
}

TEST(ParseAddress, RoundTripProperty) {
    std::mt19937_64 rng(7);
    const char* sheets[] = {"Data", "Prod 2007", "It's", "2024", "A1", "cp"};
    for (int i = 0; i < 5000; ++i) {
        CellAddress a;
        a.style = rng() % 3 == 0 ? RefStyle::R1C1 : RefStyle::A1;
        a.row = 1 + static_cast<std::uint32_t>(rng() % 1048576);
        a.column = 1 + static_cast<std::uint32_t>(rng() % 16384);
        if (a.style == RefStyle::R1C1) a.row_absolute = a.col_absolute = true;
        else {
            a.row_absolute = rng() % 2;
            a.col_absolute = rng() % 2;
        }
        if (rng() % 2) a.sheet = sheets[rng() % 6];
        auto text = to_string(a);
        ASSERT_EQ(parse_address(text, a.style), a) << text;
    }
}

TEST(SheetPrefix, QuotesWhenNeeded) {
    EXPECT_EQ(sheet_prefix("Data"), "Data!");
    EXPECT_EQ(sheet_prefix("Prod 2007"), "'Prod 2007'!");
    EXPECT_EQ(sheet_prefix("It's"), "'It''s'!");
    EXPECT_EQ(sheet_prefix("2024"), "'2024'!");
    EXPECT_EQ(sheet_prefix("A1"), "'A1'!");
}

TEST(ParseRange, NormalizesCorners) {
    auto r = parse_range("D7:B2");
    EXPECT_EQ(to_string(r), "B2:D7");
    EXPECT_EQ(to_string(parse_range("$A$1")), "A1:A1");
    EXPECT_TRUE(r.contains({2, 2}));
    EXPECT_TRUE(r.contains({7, 4}));
    EXPECT_FALSE(r.contains({8, 4}));
    EXPECT_FALSE(r.contains({5, 1}));
    EXPECT_THROW(parse_range("Data!A1:B2"), AddressError);
}

TEST(GridPos, RowMajorOrder) {
    EXPECT_LT((GridPos{1, 5}), (GridPos{2, 1}));
    EXPECT_LT((GridPos{2, 1}), (GridPos{2, 2}));
    EXPECT_EQ(absolute_a1({7, 5}), "$E$7");
    EXPECT_EQ(plain_a1({7, 5}), "E7");
}
