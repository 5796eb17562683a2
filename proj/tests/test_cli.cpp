// End-to-end tests of the command-line tool: exit codes, file schemas, and
// byte-identical rerun behavior.  The binary path comes from the build system
// via SYMGEO_CLI_BIN; models live under SYMGEO_MODELS_DIR.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "symgeo/io_util.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(SYMGEO_CLI_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string capture(const std::string& args) {
    const fs::path tmp = fs::temp_directory_path() / "symgeo_cli_capture.txt";
    const std::string cmd =
        std::string(SYMGEO_CLI_BIN) + " " + args + " > " + tmp.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    (void)rc;  // the parsed output carries the interesting part
    return symgeo::io::read_file(tmp.string());
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "symgeo_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

nlohmann::json report_of(const std::string& args) {
    return nlohmann::json::parse(capture(args));
}

}  // namespace

TEST_CASE("version flag") {
    const std::string out = capture("--version");
    CHECK(out.find("symgeo 1.0.0") != std::string::npos);
    CHECK(out.find("schema v1") != std::string::npos);
    CHECK(run("--version") == 0);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("definitely-not-a-command") == 2);
    CHECK(run("lie3 --algebra so3 --steps 100 --trials 2") == 2);  // --seed required
    CHECK(run("lie3 --algebra nope --steps 100 --trials 1 --seed 1") == 2);
    CHECK(run("dh check --model /nonexistent.json") == 2);
    CHECK(run("spectra spectrum --torus pentagonal") == 2);
    CHECK(run("pendulum periods --energy 1.0 --momentum 0.0") == 2);  // focus-focus value
}

TEST_CASE("lie3 run: exit code, report fields, outputs") {
    const fs::path dir = fresh_dir("lie3");
    const nlohmann::json rep =
        report_of("--out " + dir.string() + " lie3 --algebra so3 --steps 400 --trials 3 --seed 7");
    CHECK(rep.at("library_version") == "1.0.0");
    bool saw_cocycle = false;
    for (const auto& c : rep.at("checks")) {
        CHECK(c.at("pass").get<bool>());
        if (c.at("name") == "cocycle") {
            saw_cocycle = true;
            CHECK(c.at("residual").get<double>() <= 1e-7);
        }
    }
    CHECK(saw_cocycle);
    CHECK(fs::exists(dir / "residuals.csv"));
    CHECK(fs::exists(dir / "manifest.json"));

    std::ifstream csv(dir / "residuals.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "trial,cocycle,associativity,inverse,develop");

    // manifest digests match the files on disk
    const nlohmann::json manifest = nlohmann::json::parse(symgeo::io::read_file((dir / "manifest.json").string()));
    for (const auto& f : manifest.at("outputs")) {
        const std::string content = symgeo::io::read_file((dir / f.at("path").get<std::string>()).string());
        CHECK(symgeo::io::fnv1a_digest(content) == f.at("digest").get<std::string>());
    }
}

TEST_CASE("lie3 accepts a user algebra from a structure-constant file") {
    const fs::path dir = fresh_dir("lie3_file");
    const fs::path alg = dir / "so3.json";
    {
        std::ofstream out(alg);
        out << R"({"dim": 3, "label": "user-so3",
                   "c": [[1,2,3,1.0],[2,3,1,1.0],[1,3,2,-1.0]]})";
    }
    const nlohmann::json rep = report_of("--out " + dir.string() + " lie3 --algebra-file " +
                                         alg.string() + " --steps 300 --trials 2 --seed 4");
    for (const auto& c : rep.at("checks")) CHECK(c.at("pass").get<bool>());
    // no matrix realization comes with a file algebra, so no develop check
    for (const auto& c : rep.at("checks")) CHECK(c.at("name") != "develop_homomorphism");
}

TEST_CASE("lie3 with a too-coarse grid fails checks with exit code 1") {
    const fs::path dir = fresh_dir("lie3_coarse");
    CHECK(run("--out " + dir.string() + " lie3 --algebra sl2 --steps 4 --trials 2 --seed 3") == 1);
    CHECK(fs::exists(dir / "residuals.csv"));  // outputs written even on failure
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("pendulum monodromy run") {
    const fs::path dir = fresh_dir("mono");
    CHECK(run("--out " + dir.string() + " pendulum monodromy --radius 0.5 --loop-steps 128") == 0);

    const nlohmann::json j = nlohmann::json::parse(symgeo::io::read_file((dir / "monodromy.json").string()));
    const auto m = j.at("matrix");
    CHECK(m[0][0].get<long long>() == 1);
    CHECK(m[1][1].get<long long>() == 1);
    CHECK(m[1][0].get<long long>() == 0);
    CHECK(std::abs(m[0][1].get<long long>()) == 1);
    CHECK(j.at("residual").get<double>() < 0.25);

    std::ifstream csv(dir / "loop_trace.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "step,h,l,T,Theta_branch,defect");
}

TEST_CASE("pendulum periods run reports the flow cross-check") {
    const fs::path dir = fresh_dir("periods");
    const nlohmann::json rep = report_of("--out " + dir.string() +
                                         " pendulum periods --energy 0.3 --momentum 0.4 --flow-check");
    for (const auto& c : rep.at("checks")) CHECK(c.at("pass").get<bool>());
    const nlohmann::json j = nlohmann::json::parse(symgeo::io::read_file((dir / "periods.json").string()));
    CHECK(j.at("T").get<double>() == doctest::Approx(3.8508672357374922).epsilon(1e-12));
    CHECK(j.at("Theta").get<double>() == doctest::Approx(4.002370738148517).epsilon(1e-12));
}

TEST_CASE("pendulum cells run returns a unimodular matrix") {
    const fs::path dir = fresh_dir("cells");
    CHECK(run("--out " + dir.string() +
              " pendulum cells --hbar 0.1 --window 0.3,1.7,-0.75,0.75 --radius 0.4 --loop-steps 64") == 0);
    const nlohmann::json j =
        nlohmann::json::parse(symgeo::io::read_file((dir / "cell_transport.json").string()));
    const auto m = j.at("matrix");
    const long long det = m[0][0].get<long long>() * m[1][1].get<long long>() -
                          m[0][1].get<long long>() * m[1][0].get<long long>();
    CHECK(det == 1);
}

TEST_CASE("spectra smooth run") {
    const fs::path dir = fresh_dir("smooth");
    CHECK(run("--out " + dir.string() +
              " spectra smooth --torus square --lmax 120 --lambda 100 --sigma 1") == 0);
    const nlohmann::json j = nlohmann::json::parse(symgeo::io::read_file((dir / "smooth.json").string()));
    CHECK(j.at("value").get<double>() == doctest::Approx(628.3185).epsilon(0.02));
}

TEST_CASE("pendulum joint spectrum CSV schema") {
    const fs::path dir = fresh_dir("jspec");
    CHECK(run("--out " + dir.string() +
              " pendulum spectrum --hbar 0.1 --window 0.4,1.4,-0.4,0.4") == 0);
    std::ifstream csv(dir / "joint_spectrum.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "h,l,n,m");
    int rows = 0;
    std::string line;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows > 20);
}

TEST_CASE("dh check and density") {
    const fs::path dir = fresh_dir("dh");
    const std::string model = std::string(SYMGEO_MODELS_DIR) + "/s2.json";
    const nlohmann::json rep =
        report_of("--out " + dir.string() + " dh check --model " + model + " --t 0.1,0.5,1,2,5");
    for (const auto& c : rep.at("checks"))
        if (c.at("name") == "localization_vs_transform")
            CHECK(c.at("residual").get<double>() <= 1e-12);
    const nlohmann::json vr = nlohmann::json::parse(symgeo::io::read_file((dir / "verify_report.json").string()));
    CHECK(vr.at("per_t").size() == 5);

    const fs::path ddir = fresh_dir("dh_density");
    CHECK(run("--out " + ddir.string() + " dh density --model " +
              std::string(SYMGEO_MODELS_DIR) + "/cp2.json --grid 100") == 0);
    std::ifstream csv(ddir / "density.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x,rho");

    // a model file violating the support identities is a config error
    const fs::path bad = fresh_dir("dh_bad") / "bad.json";
    {
        std::ofstream out(bad);
        out << R"({"halfdim": 1, "label": "bad",
                   "points": [{"value": -1.0, "weights": [1]}, {"value": 1.0, "weights": [1]}]})";
    }
    CHECK(run("dh check --model " + bad.string()) == 2);
}

TEST_CASE("spectra runs") {
    const fs::path dir = fresh_dir("spectra");
    CHECK(run("--out " + dir.string() + " spectra spectrum --torus square --lmax 10") == 0);
    std::ifstream csv(dir / "spectrum.csv");
    std::string header, line;
    std::getline(csv, header);
    CHECK(header == "lambda,multiplicity");
    long long total = 0;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        total += std::stoll(line.substr(line.find(',') + 1));
    }
    CHECK(total == 317);

    const fs::path tdir = fresh_dir("trace");
    CHECK(run("--out " + tdir.string() +
              " spectra trace --torus square --lmax 60 --tmin 0.5 --tmax 8 --dt 0.005") == 0);
    std::ifstream tcsv(tdir / "trace.csv");
    std::getline(tcsv, header);
    CHECK(header == "t,re,im,abs");

    const fs::path pdir = fresh_dir("peaks");
    const nlohmann::json rep = report_of(
        "--out " + pdir.string() +
        " spectra peaks --torus square --lmax 200 --tmin 0.5 --tmax 18 --dt 0.005 --count 5");
    const nlohmann::json pk = nlohmann::json::parse(symgeo::io::read_file((pdir / "peaks.json").string()));
    CHECK(pk.at("peaks").size() == 5);
    for (const auto& p : pk.at("peaks")) CHECK(p.at("residual").get<double>() <= 0.02);

    const fs::path wdir = fresh_dir("weyl");
    CHECK(run("--out " + wdir.string() + " spectra weyl --torus rect --lmax 50 --lambda 50") == 0);
    const nlohmann::json wj = nlohmann::json::parse(symgeo::io::read_file((wdir / "weyl.json").string()));
    CHECK(wj.at("predicted").get<double>() == doctest::Approx(2 * 3.14159265358979).epsilon(1e-9));
}

TEST_CASE("reruns with identical configs are byte-identical") {
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"lie3 --algebra heisenberg3 --steps 300 --trials 2 --seed 11", "residuals.csv"},
        {"pendulum monodromy --radius 0.4 --loop-steps 64", "monodromy.json"},
        {"dh check --model " + std::string(SYMGEO_MODELS_DIR) +
             "/s2.json --t 0.5,1 --mc-samples 100000 --seed 5 --bins 20",
         "verify_report.json"},
        {"spectra trace --torus square --lmax 40 --tmin 1 --tmax 7 --dt 0.005", "trace.csv"},
    };
    int idx = 0;
    for (const auto& [args, file] : cases) {
        CAPTURE(args);
        const fs::path a = fresh_dir("det_a" + std::to_string(idx));
        const fs::path b = fresh_dir("det_b" + std::to_string(idx));
        // MC check at 1e5 samples is noisy by design; only byte-identity matters here
        run("--out " + a.string() + " " + args);
        run("--out " + b.string() + " " + args);
        CHECK(symgeo::io::read_file((a / file).string()) ==
              symgeo::io::read_file((b / file).string()));
        CHECK(symgeo::io::read_file((a / "manifest.json").string()) ==
              symgeo::io::read_file((b / "manifest.json").string()));
        ++idx;
    }
}

TEST_CASE("SYMGEO_OUT provides the default output directory") {
    const fs::path dir = fresh_dir("envdir");
    const std::string cmd = "SYMGEO_OUT=" + dir.string() + " " + std::string(SYMGEO_CLI_BIN) +
                            " spectra spectrum --torus square --lmax 5 > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir / "spectrum.csv"));
}
