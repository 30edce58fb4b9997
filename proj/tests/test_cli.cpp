#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("loclll_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path file(const std::string& name) const { return dir / name; }
  void write(const std::string& name, const std::string& text) const { std::ofstream(file(name)) << text; }
  std::string read(const std::string& name) const {
    std::ifstream in(file(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  int run(const std::string& args) const {
    std::string cmd = std::string(LOCLLL_CLI_PATH) + " " + args + " > " + file("stdout.txt").string() + " 2> " +
                      file("stderr.txt").string();
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }
};

}  // namespace

TEST_CASE("gen and verify round trip") {
  Sandbox sb;
  auto g = sb.file("c6.json").string();
  CHECK(sb.run("gen --kind cycle --n 6 --out " + g) == 0);
  auto j = nlohmann::json::parse(sb.read("c6.json"));
  CHECK(j.at("vertices").size() == 6);
  sb.write("good.json", R"({"0":1,"1":2,"2":1,"3":2,"4":1,"5":2})");
  sb.write("bad.json", R"({"0":1,"1":1,"2":1,"3":2,"4":1,"5":2})");
  CHECK(sb.run("verify --graph " + g + " --labeling " + sb.file("good.json").string() +
               " --problem proper_coloring --params '{\"k\":2}'") == 0);
  CHECK(sb.run("verify --graph " + g + " --labeling " + sb.file("bad.json").string() +
               " --problem proper_coloring --params '{\"k\":2}' --out " + sb.file("v.json").string()) == 1);
  CHECK(nlohmann::json::parse(sb.read("v.json")).at("valid") == false);
  CHECK(sb.run("verify --graph " + sb.file("missing.json").string() + " --labeling x --problem trivial") == 2);
}

TEST_CASE("pipeline reports are byte identical for identical inputs") {
  Sandbox sb;
  sb.write("det.json", R"({"pipeline":"det","seed":11,
    "graph":{"generate":{"kind":"directed_cycle","params":{"n":64}}},
    "algorithm":{"name":"cole_vishkin_3color","params":{"n":64}},"orders":3})");
  CHECK(sb.run("pipeline det --config " + sb.file("det.json").string() + " --out " + sb.file("a.json").string()) == 0);
  CHECK(sb.run("pipeline det --config " + sb.file("det.json").string() + " --out " + sb.file("b.json").string()) == 0);
  CHECK(sb.read("a.json") == sb.read("b.json"));
  auto rep = nlohmann::json::parse(sb.read("a.json"));
  CHECK(rep.at("ok") == true);
  CHECK(rep.at("seed") == 11);

  sb.write("rand.json", R"({"pipeline":"rand","seed":3,
    "graph":{"generate":{"kind":"cycle","params":{"n":16}}},
    "algorithm":{"name":"id_echo","params":{"layer":"random"}},
    "problem":{"name":"proper_coloring","params":{"k":2}},"m":2,"rounds":0})");
  CHECK(sb.run("pipeline rand --config " + sb.file("rand.json").string() + " --out " + sb.file("r1.json").string()) == 0);
  CHECK(sb.run("--seed 3 pipeline rand --config " + sb.file("rand.json").string() + " --out " + sb.file("r2.json").string()) == 0);
  CHECK(sb.read("r1.json") == sb.read("r2.json"));
  CHECK(nlohmann::json::parse(sb.read("r1.json")).at("ok") == true);

  CHECK(sb.run("report " + sb.file("a.json").string() + " " + sb.file("r1.json").string() + " --out " +
               sb.file("sum.json").string()) == 0);
  auto sum = nlohmann::json::parse(sb.read("sum.json"));
  CHECK(sum.dump().find("det") != std::string::npos);
}

TEST_CASE("malformed configs fail without output") {
  Sandbox sb;
  sb.write("broken.json", "{\"pipeline\": \"det\", ");
  CHECK(sb.run("pipeline det --config " + sb.file("broken.json").string() + " --out " + sb.file("o.json").string()) != 0);
  CHECK(!fs::exists(sb.file("o.json")));
  sb.write("unknown.json", R"({"pipeline":"nope"})");
  CHECK(sb.run("pipeline det --config " + sb.file("unknown.json").string() + " --out " + sb.file("o.json").string()) == 2);
  CHECK(!fs::exists(sb.file("o.json")));
  sb.write("dangling.json", R"({"pipeline":"det","graph":{"path":"nowhere.json"},"algorithm":{"name":"id_echo"}})");
  CHECK(sb.run("pipeline det --config " + sb.file("dangling.json").string() + " --out " + sb.file("o.json").string()) == 2);
  CHECK(!fs::exists(sb.file("o.json")));
  CHECK(sb.run("bogus-command") != 0);
}

TEST_CASE("csp subcommands") {
  Sandbox sb;
  sb.write("c.json", R"({"ground":[0,1,2,3],"m":4,"constraints":[
    {"domain":[0,1],"forbidden":[[1,1]]},{"domain":[2,3],"forbidden":[[2,2]]}]})");
  auto c = sb.file("c.json").string();
  CHECK(sb.run("csp check --csp " + c + " --which symmetric --out " + sb.file("chk.json").string()) == 0);
  auto chk = nlohmann::json::parse(sb.read("chk.json"));
  CHECK(chk.at("holds") == true);
  CHECK(sb.run("csp check --csp " + c + " --which measurable") == 1);
  CHECK(sb.run("csp solve --csp " + c + " --method mt --seed 4 --out " + sb.file("s1.json").string()) == 0);
  CHECK(sb.run("csp solve --csp " + c + " --method mt --seed 4 --out " + sb.file("s2.json").string()) == 0);
  CHECK(sb.read("s1.json") == sb.read("s2.json"));
  CHECK(sb.run("csp solve --csp " + c + " --method exhaustive") == 0);
  sb.write("unsat.json", R"({"ground":[0],"m":2,"constraints":[{"domain":[0],"forbidden":[[1],[2]]}]})");
  CHECK(sb.run("csp solve --csp " + sb.file("unsat.json").string() + " --method exhaustive --out " +
               sb.file("u.json").string()) == 1);
  CHECK(fs::exists(sb.file("u.json")));
  CHECK(sb.run("csp solve --csp " + c + " --method magic") == 2);
}

TEST_CASE("gadget subcommand") {
  Sandbox sb;
  sb.write("star.json", R"({"vertices":[0,1,2,3,4],"edges":[[0,1],[0,2],[0,3],[0,4]],"structure":[]})");
  CHECK(sb.run("gadget --graph " + sb.file("star.json").string() + " --k 2 --out " + sb.file("h.json").string()) == 0);
  CHECK(fs::exists(sb.file("h.json")));
  CHECK(sb.run("gadget --graph " + sb.file("star.json").string() + " --k 4") == 2);
}
