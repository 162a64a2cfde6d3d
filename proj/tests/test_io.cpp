#include "doctest.h"

#include <sstream>

#include "egrowth/io.hpp"

using namespace egrowth;

TEST_CASE("csv quoting") {
    CHECK(CsvTable::quote("plain") == "plain");
    CHECK(CsvTable::quote("a,b") == "\"a,b\"");
    CHECK(CsvTable::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(CsvTable::quote("two\nlines") == "\"two\nlines\"");
    CsvTable t({"name", "value"});
    t.row(std::vector<std::string>{"x,y", "1"});
    t.row(std::vector<double>{0.1, -2.0});
    CHECK(t.str() == "name,value\n\"x,y\",1\n0.1,-2\n");
    CHECK_THROWS_AS(t.row({"only one"}), Error);
}

TEST_CASE("numbers round-trip") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23}) CHECK(std::stod(CsvTable::number(v)) == v);
    CHECK(CsvTable::number(std::nan("")) == "nan");
}

TEST_CASE("pgm layout and scaling") {
    const GridSpec s({0, 0}, 1.0, 8, 8);
    ScalarField f(s);
    f.at(7, 7) = 2.0;  // top right
    f.at(1, 7) = 1.0;
    const std::string pgm = to_pgm(f, 0.0, 2.0);
    std::istringstream in(pgm);
    std::string magic, comment;
    std::getline(in, magic);
    std::getline(in, comment);
    CHECK(magic == "P2");
    CHECK(comment == "# value = 0 + 2 * pixel / 65535");
    int w, h, maxval;
    in >> w >> h >> maxval;
    CHECK(w == 8);
    CHECK(h == 8);
    CHECK(maxval == 65535);
    std::vector<int> top(8);
    for (int& p : top) in >> p;
    // The first row printed is the largest y.
    CHECK(top == std::vector<int>{0, 32768, 0, 0, 0, 0, 0, 65535});

    std::vector<std::uint8_t> mask(s.size(), 0);
    mask[s.index(0, 0)] = 1;
    const std::string m = mask_to_pgm(s, mask);
    CHECK(m.size() - m.rfind("65535 0 0 0 0 0 0 0\n") == 20);
    CHECK_THROWS_AS(mask_to_pgm(s, std::vector<std::uint8_t>(3)), Error);
}

TEST_CASE("run log columns") {
    const GridSpec s = GridSpec::square(-2.0, 2.0, 64);
    const GrowthState st = GrowthState::start(make_disk({0, 0}, 1.0, s), OperatorDesc::laplace(), {0, 0}, 1.0);
    const std::string csv = run_log_table(st).str();
    CHECK(csv.rfind("step,t,area,rate,re_t1,im_t1,re_t2,im_t2,re_t3,im_t3,re_t4,im_t4,max_vn,solver_iters\n", 0) == 0);
    CHECK(boundary_table(0.0, st.D).rows() == st.D.boundary().size());
}
