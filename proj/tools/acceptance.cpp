#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include <sys/wait.h>

#include <fwm/validation.hpp>

namespace {

std::string read_bytes(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Runs `fwm validate --report` twice and compares the reports byte for byte.
fwm::validation::CheckResult reproducibility(const std::string &fwm_binary)
{
    fwm::validation::CheckResult r{10, "validate output reproducible", false, ""};
    const auto dir = std::filesystem::temp_directory_path() / "fwm_acceptance";
    std::filesystem::create_directories(dir);
    std::string reports[2];
    int codes[2];
    for (int i = 0; i < 2; ++i) {
        const auto path = dir / ("report_" + std::to_string(i) + ".txt");
        std::filesystem::remove(path);
        const std::string cmd = "\"" + fwm_binary + "\" validate --report \"" + path.string() + "\"";
        const int status = std::system(cmd.c_str());
        codes[i] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        reports[i] = read_bytes(path);
    }
    r.pass = !reports[0].empty() && reports[0] == reports[1];
    r.detail = std::to_string(reports[0].size()) + " bytes, " +
               (reports[0] == reports[1] ? "identical" : "different") + ", exit statuses " +
               std::to_string(codes[0]) + "/" + std::to_string(codes[1]);
    return r;
}

} // namespace

int main(int argc, char **argv)
{
    if (argc != 2) {
        std::cerr << "usage: acceptance <path to fwm binary>\n";
        return 2;
    }
    bool all = true;
    auto print = [&](const fwm::validation::CheckResult &r, double seconds) {
        all = all && r.pass;
        std::cout << "criterion " << r.criterion << ": " << (r.pass ? "PASS" : "FAIL") << " "
                  << r.title << ": " << r.detail << " [" << fwm::validation::sci(seconds) << " s]"
                  << std::endl;
    };
    for (const auto &check : fwm::validation::oracle_checks()) {
        const auto start = std::chrono::steady_clock::now();
        fwm::validation::CheckResult r = check.run();
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (check.runtime_limit > 0.0 && seconds > check.runtime_limit) {
            r.pass = false;
            r.detail += "; exceeded " + fwm::validation::sci(check.runtime_limit) + " s budget";
        }
        print(r, seconds);
    }
    const auto start = std::chrono::steady_clock::now();
    const auto r = reproducibility(argv[1]);
    print(r, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return all ? 0 : 4;
}
