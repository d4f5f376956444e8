#include <json.hpp>
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("apmkit_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string(APMKIT_PATH) + " " + args + " > " + (scratch() / "stdout").string() +
                            " 2> " + (scratch() / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

} // namespace

TEST_CASE("index reports") {
    REQUIRE(run("index --map degmax --radius 0.1") == 0);
    CHECK(nlohmann::json::parse(slurp(scratch() / "stdout")).at("value") == 1);
    REQUIRE(run("index --map saddle --radius 0.1 --isotopy") == 0);
    const auto j = nlohmann::json::parse(slurp(scratch() / "stdout"));
    CHECK(j.at("value") == -1);
    CHECK(j.at("isotopy").at("value") == -2);
}

TEST_CASE("configuration errors exit with 2") {
    CHECK(run("index --map no-such-map") == 2);
    const fs::path cfg = scratch() / "bad.json";
    write(cfg, R"({"radius": 0.1, "colour": "red"})");
    CHECK(run("index --config " + cfg.string()) == 2);
    CHECK(slurp(scratch() / "stderr").find("colour") != std::string::npos);
    write(cfg, "{not json");
    CHECK(run("index --config " + cfg.string()) == 2);
    CHECK(run("orbits --map degmax --p 2 --q 4") == 2);
}

TEST_CASE("flags override config keys") {
    const fs::path cfg = scratch() / "index.json";
    write(cfg, R"({"map": "saddle", "radius": 0.1})");
    REQUIRE(run("index --config " + cfg.string()) == 0);
    CHECK(nlohmann::json::parse(slurp(scratch() / "stdout")).at("value") == -1);
    REQUIRE(run("index --config " + cfg.string() + " --map degmax") == 0);
    CHECK(nlohmann::json::parse(slurp(scratch() / "stdout")).at("value") == 1);
}

TEST_CASE("violated hypotheses exit with 3") {
    CHECK(run("property-p --map saddle --q 5 --no-action") == 3);
}

TEST_CASE("orbit tables verify") {
    const fs::path table = scratch() / "orbits.csv";
    const fs::path summary = scratch() / "orbits.json";
    REQUIRE(run("orbits --map degmax --p 1 --q 12 --output " + table.string() + " --summary " +
                summary.string()) == 0);
    CHECK(slurp(table).rfind("orbit,q,p,idx,x,y,r\n", 0) == 0);
    CHECK(run("orbits --map degmax --verify " + table.string() + " --verify-summary " + summary.string()) == 0);

    // Shift x of the first point by 1e-3.
    std::istringstream in(slurp(table));
    std::string header, first, rest;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, rest, '\0');
    std::vector<std::string> cells;
    std::istringstream row(first);
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 7);
    cells[4] = std::to_string(std::stod(cells[4]) + 1e-3);
    std::string shifted = cells[0];
    for (std::size_t i = 1; i < cells.size(); ++i) shifted += "," + cells[i];
    write(table, header + "\n" + shifted + "\n" + rest);
    CHECK(run("orbits --map degmax --verify " + table.string() + " --verify-summary " + summary.string()) == 5);
}

TEST_CASE("map evaluation table") {
    REQUIRE(run("map-eval --map shear --point 0.3,0.5 --iterations 1") == 0);
    CHECK(slurp(scratch() / "stdout") == "n,x,y\n0,0.29999999999999999,0.5\n1,0.80000000000000004,0.5\n");
}
