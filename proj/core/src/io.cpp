#include "fracbilin/io.hpp"

#include "fracbilin/errors.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace fracbilin {

std::string field_csv_string(const Field& f, const Grid& g, const TimeGrid& tg) {
    require_shape(f, tg, g, "csv field");
    std::string out = "t,x,value\n";
    out.reserve(out.size() + static_cast<std::size_t>(f.size()) * 60);
    char buf[96];
    for (int k = 0; k <= tg.n_steps; ++k)
        for (int i = 0; i < g.n; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", tg.t[k], g.x[i], f(k, i));
            out += buf;
        }
    return out;
}

void write_field_csv(const std::string& path, const Field& f, const Grid& g,
                     const TimeGrid& tg) {
    write_text_file(path, field_csv_string(f, g, tg));
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw Error("short write: " + path);
}

void prepare_out_dir(const std::string& path, bool overwrite) {
    namespace fs = std::filesystem;
    const fs::path p(path);
    std::error_code ec;
    if (fs::exists(p, ec)) {
        if (!fs::is_directory(p, ec))
            throw ValidationError("output path exists and is not a directory: " + path);
        if (!fs::is_empty(p, ec) && !overwrite)
            throw ValidationError("output directory not empty: " + path +
                                  " (pass --force to reuse it)");
        return;
    }
    if (!fs::create_directories(p, ec) || ec)
        throw Error("cannot create output directory: " + path);
}

void write_manifest(const std::string& dir, const std::string& config_hash,
                    const std::string& command, const std::vector<std::string>& outputs,
                    const std::string& started, const std::string& finished) {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["command"] = command;
    j["outputs"] = outputs;
    j["timestamps"] = {{"started", started}, {"finished", finished}};
    write_text_file(dir + "/manifest.json", j.dump(2) + "\n");
}

void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned cap = hw;
    if (const char* env = std::getenv("FRACBILIN_THREADS")) {
        char* end = nullptr;
        const long val = std::strtol(env, &end, 10);
        if (end != env && val >= 1) cap = static_cast<unsigned>(std::min<long>(val, 1024));
    }
    const unsigned nthreads = std::min(cap, static_cast<unsigned>(n));
    if (nthreads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex mu;
    std::exception_ptr first;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(mu);
                    if (!first) first = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

} // namespace fracbilin
