#include "support.hpp"

#include "dirac/io.hpp"

#include <sys/wait.h>

#include <filesystem>
#include <fstream>

using namespace dirac;
using namespace dirac::testing;
using io::Kind;

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("dirac_lab_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    Outcome run(const std::string& args) const {
        const std::string out = path("stdout.txt");
        const std::string err = path("stderr.txt");
        const std::string cmd = std::string(DIRAC_LAB_PATH) + " " + args + " > " + out + " 2> " + err;
        const int status = std::system(cmd.c_str());
        Outcome r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = io::read_file(out);
        r.err = io::read_file(err);
        return r;
    }

    io::Document read(const std::string& name) const { return io::parse_document(io::read_file(path(name))); }

    void write(const std::string& name, const io::Document& d) const { io::write_file(path(name), io::serialize(d)); }

private:
    fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenShapeAndDeterminism) {
    ASSERT_EQ(run("gen --seed 7 --r 5 --m1 2 --m2 1 --max-norm 0.8 -o " + path("a.json")).code, 0);
    ASSERT_EQ(run("gen --seed 7 --r 5 --m1 2 --m2 1 --max-norm 0.8 -o " + path("b.json")).code, 0);
    const auto d = read("a.json");
    EXPECT_EQ(d.kind, Kind::schur);
    ASSERT_EQ(d.data.size(), 6U);
    for (const auto& m : d.data) {
        EXPECT_EQ(m.rows(), 2);
        EXPECT_EQ(m.cols(), 1);
        EXPECT_LE(spectral_norm(m), 0.8 + 1e-15);
    }
    EXPECT_EQ(io::read_file(path("a.json")), io::read_file(path("b.json")));
    // stdout carries the same document when no output path is given.
    EXPECT_EQ(run("gen --seed 7 --r 5 --m1 2 --m2 1").out, io::read_file(path("a.json")));
}

TEST_F(Cli, GenRejectsBadFlags) {
    const auto r = run("gen --max-norm 1.2");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("max_norm"), std::string::npos);
    EXPECT_EQ(run("gen --m1 0").code, 1);
    EXPECT_EQ(run("gen --bogus").code, 1);
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, ForwardOfTrivialSchurIsZero) {
    write("zero.json", io::schur_document(SchurSequence<double>{{2, 1}, std::vector<Mat>(4, Mat::Zero(2, 1))}));
    ASSERT_EQ(run("forward -i " + path("zero.json") + " -o " + path("t.json")).code, 0);
    const auto t = read("t.json");
    EXPECT_EQ(t.kind, Kind::taylor);
    ASSERT_EQ(t.data.size(), 4U);
    for (const auto& m : t.data) {
        EXPECT_EQ(m.rows(), 1);
        EXPECT_EQ(m.cols(), 2);
        EXPECT_LT(max_abs(m), 1e-15);
    }
}

TEST_F(Cli, ForwardDumpsTheSNode) {
    ASSERT_EQ(run("gen --seed 3 --r 4 --m1 1 --m2 2 -o " + path("s.json")).code, 0);
    ASSERT_EQ(run("forward -i " + path("s.json") + " -o " + path("t.json") + " --dump-snode " + path("n.json")).code, 0);
    const auto n = read("n.json");
    EXPECT_EQ(n.kind, Kind::snode);
    ASSERT_EQ(n.data.size(), 3U);
    EXPECT_EQ(n.data[0].rows(), 10);
    EXPECT_EQ(n.data[2].cols(), 3);
    EXPECT_LT(operator_identity_residual(n.data[0], n.data[1], n.data[2], n.sig), 1e-9);
}

TEST_F(Cli, ForwardOfPotentialMatchesSchur) {
    ASSERT_EQ(run("gen --seed 5 --r 3 --m1 2 --m2 2 -o " + path("s.json")).code, 0);
    ASSERT_EQ(run("szego -i " + path("s.json") + " -o " + path("p.json")).code, 0);
    ASSERT_EQ(run("forward -i " + path("s.json") + " -o " + path("t1.json")).code, 0);
    ASSERT_EQ(run("forward -i " + path("p.json") + " -o " + path("t2.json")).code, 0);
    const auto a = io::to_taylor(read("t1.json"));
    const auto b = io::to_taylor(read("t2.json"));
    EXPECT_LT(max_coefficient_deviation(a, b), 1e-12);
}

TEST_F(Cli, InvertZeroGivesIdentity) {
    write("t.json", io::Document{Kind::taylor, {1, 2}, std::vector<Mat>(3, Mat::Zero(2, 1)), io::Json::object()});
    const auto r = run("invert -i " + path("t.json") + " -o " + path("p.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("level 2: min eigenvalue of S_k"), std::string::npos);
    for (const auto& c : read("p.json").data) EXPECT_LT(max_diff(c, eye<double>(3)), 1e-15);
}

TEST_F(Cli, ForwardThenInvertRecoversSeven) {
    ASSERT_EQ(run("gen --seed 7 --r 5 --m1 2 --m2 1 -o " + path("s.json")).code, 0);
    ASSERT_EQ(run("forward -i " + path("s.json") + " -o " + path("t.json")).code, 0);
    ASSERT_EQ(run("invert -i " + path("t.json") + " -o " + path("p.json")).code, 0);
    const auto s = io::to_schur(read("s.json"));
    const auto expected = schur_to_dirac(s.cast<quad>()).potential;
    const auto got = io::to_potential<quad>(read("p.json"), 1e-9);
    EXPECT_LT(potential_deviation(got, expected), 1e-8);
}

TEST_F(Cli, InvertRejectsLargeFirstCoefficient) {
    Mat big(1, 1);
    big << 1.5;
    write("t.json", io::Document{Kind::taylor, {1, 1}, {big, Mat::Zero(1, 1)}, io::Json::object()});
    const auto r = run("invert -i " + path("t.json") + " -o " + path("p.json"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("level 0: S_k not positive definite"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("p.json")));
}

TEST_F(Cli, InvertRejectsWrongKind) {
    ASSERT_EQ(run("gen -o " + path("s.json")).code, 0);
    EXPECT_EQ(run("invert -i " + path("s.json")).code, 1);
    EXPECT_EQ(run("invert -i " + path("missing.json")).code, 1);
}

TEST_F(Cli, Roundtrip) {
    const auto zero = run("roundtrip --r 0 --m1 2 --m2 2");
    EXPECT_EQ(zero.code, 0);
    EXPECT_NE(zero.out.find("PASS"), std::string::npos);
    for (int seed : {1, 2, 3}) {
        EXPECT_EQ(run("roundtrip --seed " + std::to_string(seed) + " --r 10").code, 0) << seed;
    }
    const auto r = run("roundtrip --r 8 --max-norm 0.99 --json-report " + path("rep.json"));
    EXPECT_TRUE(r.code == 0 || r.code == 2);
    EXPECT_NE(r.out.find("max ||C_k||_2"), std::string::npos);
    const auto rep = read("rep.json");
    EXPECT_EQ(rep.kind, Kind::report);
    EXPECT_EQ(rep.extra["command"], "roundtrip");
    EXPECT_TRUE(rep.extra.contains("max_potential_norm"));
    EXPECT_EQ(rep.extra["pass"].get<bool>(), r.code == 0);
}

TEST_F(Cli, VerifyValidPotential) {
    ASSERT_EQ(run("gen --seed 2 --r 6 --m1 2 --m2 1 -o " + path("s.json")).code, 0);
    ASSERT_EQ(run("szego -i " + path("s.json") + " -o " + path("p.json")).code, 0);
    const auto r = run("verify -i " + path("p.json") + " --json-report " + path("rep.json"));
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
    const auto rep = read("rep.json");
    EXPECT_TRUE(rep.extra["pass"].get<bool>());
    EXPECT_GE(rep.extra["checks"].size(), 10U);
    EXPECT_EQ(run("verify -i " + path("p.json") + " --z 0.5,0.5 --z 2,1").code, 0);
    EXPECT_EQ(run("verify -i " + path("p.json") + " --z 1,-1").code, 1);
    EXPECT_EQ(run("verify -i " + path("p.json") + " --z 0,1").code, 1);
    EXPECT_EQ(run("verify -i " + path("p.json") + " --z nope").code, 1);
}

TEST_F(Cli, VerifyRejectsPerturbedPotential) {
    auto d = io::potential_document(random_potential(4, 2, {1, 1}));
    d.data[1](0, 1) += 1e-3;
    write("p.json", d);
    const auto r = run("verify -i " + path("p.json"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST_F(Cli, VerifyTrivialPotentialIsExact) {
    write("p.json", io::potential_document(trivial_potential(5, {2, 2})));
    const auto r = run("verify -i " + path("p.json") + " --json-report " + path("rep.json"));
    ASSERT_EQ(r.code, 0);
    for (const auto& c : read("rep.json").extra["checks"]) {
        if (c["threshold"].get<double>() <= 1e-9) EXPECT_LT(c["value"].get<double>(), 1e-12) << c["name"];
    }
}

TEST_F(Cli, SzegoConversions) {
    ASSERT_EQ(run("gen --seed 9 --r 5 --m1 2 --m2 1 -o " + path("s.json")).code, 0);
    ASSERT_EQ(run("szego -i " + path("s.json") + " -o " + path("p.json")).code, 0);
    ASSERT_EQ(run("szego -i " + path("p.json") + " -o " + path("s2.json")).code, 0);
    const auto a = read("s.json");
    const auto b = read("s2.json");
    ASSERT_EQ(b.kind, Kind::schur);
    ASSERT_EQ(a.data.size(), b.data.size());
    for (std::size_t k = 0; k < a.data.size(); ++k) {
        EXPECT_EQ(b.data[k].rows(), 2);
        EXPECT_EQ(b.data[k].cols(), 1);
        EXPECT_LT(max_diff(a.data[k], b.data[k]), 1e-9);
    }

    write("zero.json", io::schur_document(SchurSequence<double>{{1, 1}, std::vector<Mat>(3, Mat::Zero(1, 1))}));
    ASSERT_EQ(run("szego -i " + path("zero.json") + " -o " + path("id.json")).code, 0);
    for (const auto& c : read("id.json").data) EXPECT_EQ(max_diff(c, eye<double>(2)), 0.0);
}
