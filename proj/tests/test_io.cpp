#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdfp/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace pdfp;
using namespace pdfp::io;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content = "",
                      bool binary = false)
    {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("libsvm parsing")
{
    TempFile f("pdfp_t1.svm", "+1 1:0.5 3:2.0\n");
    const auto d = load_libsvm(f.path);
    CHECK(d.m() == 1);
    CHECK(d.q == 3);
    CHECK(d.labels[0] == 1.0);
    CHECK(d.features[0] == DenseVector{0.5, 0.0, 2.0});

    TempFile f2("pdfp_t2.svm", "0 1:1\n-1 2:3.5\n");
    const auto d2 = load_libsvm(f2.path);
    CHECK(d2.labels[0] == -1.0);  // {0,1} remap
    CHECK(d2.labels[1] == -1.0);
    CHECK(d2.q == 2);

    TempFile empty("pdfp_t3.svm", "");
    CHECK_THROWS_AS(load_libsvm(empty.path), std::runtime_error);

    TempFile bad("pdfp_t4.svm", "+1 1:0.5\n+1 2:abc\n");
    try {
        load_libsvm(bad.path);
        FAIL("expected throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    TempFile badlab("pdfp_t5.svm", "2 1:1\n");
    CHECK_THROWS_AS(load_libsvm(badlab.path), std::runtime_error);

    CHECK_THROWS_AS(load_libsvm("/nonexistent/file.svm"), std::runtime_error);
}

TEST_CASE("pgm ascii load")
{
    TempFile f("pdfp_t6.pgm", "P2\n# a comment\n2 1\n255\n0 255\n");
    const auto img = load_pgm(f.path);
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    CHECK(img.maxval == 255);
    CHECK(img.pixels == DenseVector{0.0, 255.0});
}

TEST_CASE("pgm p5 round trip is bit exact")
{
    PgmImage img;
    img.width = 3;
    img.height = 2;
    img.maxval = 255;
    img.pixels = {0, 17, 255, 128, 64, 3};
    const std::string path =
        (std::filesystem::temp_directory_path() / "pdfp_t7.pgm").string();
    save_pgm(path, img);
    const auto back = load_pgm(path);
    CHECK(back.pixels == img.pixels);
    CHECK(back.width == 3);
    CHECK(back.height == 2);

    // saving the loaded image reproduces the file byte-for-byte
    const std::string bytes1 = slurp(path);
    save_pgm(path, back);
    CHECK(slurp(path) == bytes1);
    std::remove(path.c_str());
}

TEST_CASE("pgm save rounds half to even and clamps")
{
    PgmImage img;
    img.width = 4;
    img.height = 1;
    img.maxval = 255;
    img.pixels = {0.5, 1.5, -3.0, 300.0};
    const std::string path =
        (std::filesystem::temp_directory_path() / "pdfp_t8.pgm").string();
    save_pgm(path, img);
    const auto back = load_pgm(path);
    CHECK(back.pixels == DenseVector{0.0, 2.0, 0.0, 255.0});
    std::remove(path.c_str());
}

TEST_CASE("pgm rejects out-of-contract input")
{
    TempFile big("pdfp_t9.pgm", "P2\n1 1\n65535\n0\n");
    CHECK_THROWS_AS(load_pgm(big.path), std::runtime_error);

    TempFile magic("pdfp_t10.pgm", "P6\n1 1\n255\n0\n");
    CHECK_THROWS_AS(load_pgm(magic.path), std::runtime_error);

    TempFile trunc("pdfp_t11.pgm", std::string("P5\n2 2\n255\n\x01\x02", 13), true);
    CHECK_THROWS_AS(load_pgm(trunc.path), std::runtime_error);
}

TEST_CASE("csv matrix ingestion")
{
    TempFile f("pdfp_t12.csv", "1,2.5\n-3,4e-1\n");
    const auto K = load_matrix_csv(f.path);
    CHECK(K.rows() == 2);
    CHECK(K.cols() == 2);
    CHECK(K.entry(0, 1) == 2.5);
    CHECK(K.entry(1, 1) == 0.4);

    TempFile ragged("pdfp_t13.csv", "1,2\n3\n");
    CHECK_THROWS_AS(load_matrix_csv(ragged.path), std::runtime_error);

    TempFile empty("pdfp_t14.csv", "");
    CHECK_THROWS_AS(load_matrix_csv(empty.path), std::runtime_error);
}

TEST_CASE("trace csv format")
{
    std::vector<ConvergenceRecord> trace;
    trace.push_back({1, 0.123456789012345, 1e-3, 0.5, 2.0});
    trace.push_back({100, 3.0, 1e-12, 0.0, 4.5});
    const std::string path =
        (std::filesystem::temp_directory_path() / "pdfp_t15.csv").string();
    write_trace_csv(path, trace);
    const std::string content = slurp(path);
    CHECK(content.rfind("iter,objective,km_residual_P,primal_change,elapsed_ms\n", 0) == 0);
    CHECK(content.find("\n1,0.123456789012,0.001,0.5,2\n") != std::string::npos);
    CHECK(content.find("\n100,3,1e-12,0,4.5\n") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("summary format")
{
    const std::string path =
        (std::filesystem::temp_directory_path() / "pdfp_t16.txt").string();
    write_summary(path, {{"task", "denoise"}, {"rho", format_g12(0.5)}});
    CHECK(slurp(path) == "task=denoise\nrho=0.5\n");
    std::remove(path.c_str());
}

TEST_CASE("format_g12 gives 12 significant digits")
{
    CHECK(format_g12(0.1234567890123456) == "0.123456789012");
    CHECK(format_g12(1.0) == "1");
    CHECK(format_g12(1e-12) == "1e-12");
}
