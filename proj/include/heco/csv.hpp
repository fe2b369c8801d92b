#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace heco {

// Deterministic CSV writer: doubles always printed with %.12g so that repeated
// runs produce byte-identical artifacts.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : path_(path), f_(std::fopen(path.c_str(), "w")) {
        if (!f_) throw std::runtime_error("CsvWriter: cannot open " + path);
        for (std::size_t i = 0; i < columns.size(); ++i)
            std::fprintf(f_, "%s%s", i ? "," : "", columns[i].c_str());
        std::fprintf(f_, "\n");
    }
    ~CsvWriter() {
        if (f_) std::fclose(f_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    CsvWriter& field(double v) {
        sep();
        std::fprintf(f_, "%.12g", v);
        return *this;
    }
    CsvWriter& field(int v) {
        sep();
        std::fprintf(f_, "%d", v);
        return *this;
    }
    CsvWriter& field(const std::string& v) {
        sep();
        std::fprintf(f_, "%s", v.c_str());
        return *this;
    }
    void endrow() {
        std::fprintf(f_, "\n");
        first_ = true;
    }
    const std::string& path() const { return path_; }

  private:
    void sep() {
        if (!first_) std::fprintf(f_, ",");
        first_ = false;
    }
    std::string path_;
    std::FILE* f_;
    bool first_ = true;
};

}  // namespace heco
