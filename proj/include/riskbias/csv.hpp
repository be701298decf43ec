#pragma once

#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "riskbias/errors.hpp"

namespace riskbias {

// Minimal CSV emitter: one optional comment line, a header, then rows of
// numbers formatted with %.12g (shortest round-trippable for our use) or
// verbatim strings. Kept deliberately dumb so outputs are byte-reproducible.
class CsvWriter {
  public:
    explicit CsvWriter(std::string comment = "") : comment_(std::move(comment)) {}

    void header(std::vector<std::string> names) { header_ = std::move(names); }

    CsvWriter& cell(const std::string& value) {
        row_.push_back(value);
        return *this;
    }

    CsvWriter& cell(double value) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", value);
        row_.emplace_back(buf);
        return *this;
    }

    CsvWriter& cell(long value) {
        row_.push_back(std::to_string(value));
        return *this;
    }

    CsvWriter& cell(std::size_t value) {
        row_.push_back(std::to_string(value));
        return *this;
    }

    void end_row() {
        if (!header_.empty() && row_.size() != header_.size())
            throw ConfigError("CsvWriter: row width does not match the header");
        rows_.push_back(std::move(row_));
        row_.clear();
    }

    std::string str() const {
        std::string out;
        if (!comment_.empty()) {
            out += "# ";
            out += comment_;
            out += '\n';
        }
        append_row(out, header_);
        for (const auto& row : rows_) append_row(out, row);
        return out;
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("CsvWriter: cannot open " + path);
        const std::string body = str();
        f.write(body.data(), static_cast<std::streamsize>(body.size()));
        if (!f) throw ConfigError("CsvWriter: write failed for " + path);
    }

  private:
    static void append_row(std::string& out, const std::vector<std::string>& row) {
        if (row.empty()) return;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }

    std::string comment_;
    std::vector<std::string> header_;
    std::vector<std::string> row_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace riskbias
