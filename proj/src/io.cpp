/*
 * Copyright 2026 The ewspipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ewspipe/io.hpp"

#include "ewspipe/error.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

namespace ews {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text)
{
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || text.empty()) {
        throw Error(ErrorKind::FormatError, "not a number: '" + std::string(text) + "'");
    }
    return v;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',')
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

/// Non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_lines(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.emplace_back(number, std::move(line));
    }
    return lines;
}

[[noreturn]] void format_error(const fs::path& path, std::size_t line, const std::string& what)
{
    throw Error(ErrorKind::FormatError, path.filename().string() + " line " + std::to_string(line) + ": " + what);
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

fs::path temp_sibling(const fs::path& target)
{
    std::random_device rd;
    const auto parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
    std::ostringstream name;
    name << "." << target.filename().string() << ".tmp-" << std::hex << rd() << rd();
    return parent / name.str();
}

void check_id(const std::string& id)
{
    if (id.empty() || id.find_first_of(",\n\r") != std::string::npos) {
        throw Error(ErrorKind::FormatError, "series id '" + id + "' is empty or contains a delimiter");
    }
}

} // namespace

void write_directory_atomically(const fs::path& target, const std::function<void(const fs::path&)>& fn)
{
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const auto tmp = temp_sibling(target);
    fs::create_directories(tmp);
    try {
        fn(tmp);
        if (fs::exists(target)) {
            const auto old = temp_sibling(target);
            fs::rename(target, old);
            fs::rename(tmp, target);
            fs::remove_all(old);
        } else {
            fs::rename(tmp, target);
        }
    } catch (...) {
        std::error_code ec;
        fs::remove_all(tmp, ec);
        throw;
    }
}

void write_file_atomically(const fs::path& target, const std::string& contents)
{
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const auto tmp = temp_sibling(target);
    try {
        write_text(tmp, contents);
        fs::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

LabelList labels_of(const std::vector<TimeSeries>& series)
{
    LabelList out;
    out.reserve(series.size());
    for (const auto& ts : series) out.emplace_back(ts.id, ts.label);
    return out;
}

json complete_manifest(const Dataset& data)
{
    json manifest = data.manifest;
    json entries = manifest.contains("series") ? manifest["series"] : json::array();
    const bool have_entries = entries.is_array() && entries.size() == data.series.size();
    if (!have_entries) entries = json::array();
    for (std::size_t i = 0; i < data.series.size(); ++i) {
        const auto& ts = data.series[i];
        if (!have_entries) entries.push_back(json::object());
        auto& e = entries[i];
        e["id"] = ts.id;
        e["label"] = std::string(to_string(ts.label));
        e["dt"] = ts.dt;
        e["meta"] = ts.meta;
        if (auto start = ts.eval_start_index()) e["eval_start_index"] = *start;
    }
    manifest["series"] = std::move(entries);
    manifest["length"] = data.series.empty() ? 0 : data.series.front().size();
    manifest["count"] = data.series.size();
    return manifest;
}

void write_dataset_files(const fs::path& dir, const Dataset& data)
{
    const std::size_t length = data.series.empty() ? 0 : data.series.front().size();
    std::string series_csv = "id,label";
    std::string mask_csv = "id";
    for (std::size_t k = 0; k < length; ++k) {
        series_csv += ",v" + std::to_string(k);
        mask_csv += ",m" + std::to_string(k);
    }
    series_csv += '\n';
    mask_csv += '\n';

    for (const auto& ts : data.series) {
        check_id(ts.id);
        if (ts.size() != length) {
            throw Error(ErrorKind::LengthMismatch, "series '" + ts.id + "' has length " + std::to_string(ts.size()) +
                                                       ", expected " + std::to_string(length));
        }
        ts.validate();
        series_csv += ts.id;
        series_csv += ',';
        series_csv += to_string(ts.label);
        mask_csv += ts.id;
        for (std::size_t k = 0; k < length; ++k) {
            series_csv += ',';
            series_csv += format_double(ts.values[k]);
            mask_csv += ts.mask[k] ? ",1" : ",0";
        }
        series_csv += '\n';
        mask_csv += '\n';
    }
    const json manifest = complete_manifest(data);

    std::string labels_csv = "id,label\n";
    for (const auto& ts : data.series) {
        labels_csv += ts.id + "," + std::string(to_string(ts.label)) + "\n";
    }
    write_text(dir / "series.csv", series_csv);
    write_text(dir / "mask.csv", mask_csv);
    write_text(dir / "labels.csv", labels_csv);
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_dataset(const fs::path& dir, const Dataset& data)
{
    write_directory_atomically(dir, [&](const fs::path& tmp) { write_dataset_files(tmp, data); });
}

Dataset read_dataset(const fs::path& dir)
{
    Dataset data;
    {
        std::ifstream in(dir / "manifest.json");
        if (!in) throw Error(ErrorKind::IoError, "cannot open " + (dir / "manifest.json").string());
        try {
            data.manifest = json::parse(in);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::FormatError, "manifest.json: " + std::string(e.what()));
        }
    }
    const auto series_path = dir / "series.csv";
    const auto mask_path = dir / "mask.csv";
    const auto series_lines = read_lines(series_path);
    const auto mask_lines = read_lines(mask_path);
    if (series_lines.empty()) format_error(series_path, 1, "missing header");
    if (mask_lines.size() != series_lines.size()) {
        throw Error(ErrorKind::FormatError, "mask.csv has " + std::to_string(mask_lines.size()) + " rows, series.csv " +
                                                std::to_string(series_lines.size()));
    }
    const auto header = split_fields(series_lines[0].second);
    if (header.size() < 2 || header[0] != "id" || header[1] != "label") {
        format_error(series_path, series_lines[0].first, "header must start with id,label");
    }
    const std::size_t length = header.size() - 2;
    for (std::size_t r = 1; r < series_lines.size(); ++r) {
        const auto& [line_no, line] = series_lines[r];
        const auto fields = split_fields(line);
        if (fields.size() != length + 2) {
            format_error(series_path, line_no,
                         "expected " + std::to_string(length + 2) + " fields, got " + std::to_string(fields.size()));
        }
        const auto& [mask_no, mask_line] = mask_lines[r];
        const auto mask_fields = split_fields(mask_line);
        if (mask_fields.size() != length + 1) {
            format_error(mask_path, mask_no,
                         "expected " + std::to_string(length + 1) + " fields, got " + std::to_string(mask_fields.size()));
        }
        if (mask_fields[0] != fields[0]) format_error(mask_path, mask_no, "id does not match series.csv");

        TimeSeries ts;
        ts.id = std::string(fields[0]);
        try {
            ts.label = parse_label(fields[1]);
        } catch (const Error&) {
            format_error(series_path, line_no, "unknown label '" + std::string(fields[1]) + "'");
        }
        ts.values.resize(length);
        ts.mask.resize(length);
        for (std::size_t k = 0; k < length; ++k) {
            try {
                ts.values[k] = parse_double(fields[k + 2]);
            } catch (const Error&) {
                format_error(series_path, line_no, "bad value in column " + std::to_string(k + 2));
            }
            const auto m = mask_fields[k + 1];
            if (m != "0" && m != "1") format_error(mask_path, mask_no, "mask entries must be 0 or 1");
            ts.mask[k] = m == "1";
        }
        data.series.push_back(std::move(ts));
    }

    const auto& entries = data.manifest.contains("series") ? data.manifest["series"] : json();
    if (entries.is_array() && entries.size() == data.series.size()) {
        for (std::size_t i = 0; i < data.series.size(); ++i) {
            const auto& e = entries[i];
            auto& ts = data.series[i];
            if (e.value("id", ts.id) != ts.id) {
                throw Error(ErrorKind::FormatError, "manifest entry " + std::to_string(i) + " does not match '" + ts.id + "'");
            }
            if (e.contains("dt")) ts.dt = e["dt"].get<double>();
            if (e.contains("meta")) ts.meta = e["meta"].get<std::map<std::string, std::string>>();
        }
    }
    return data;
}

void write_predictions(const fs::path& path, const std::vector<PredictionRecord>& preds)
{
    const bool windows = std::ranges::any_of(preds, [](const auto& p) { return p.eval_start_index.has_value(); });
    std::string text = windows ? "id,p_transcritical,eval_start_index\n" : "id,p_transcritical\n";
    for (const auto& p : preds) {
        check_id(p.id);
        text += p.id + "," + format_double(p.p_transcritical);
        if (windows) text += "," + (p.eval_start_index ? std::to_string(*p.eval_start_index) : std::string());
        text += "\n";
    }
    write_file_atomically(path, text);
}

std::vector<PredictionRecord> read_predictions(const fs::path& path)
{
    const auto lines = read_lines(path);
    if (lines.empty()) format_error(path, 1, "missing header");
    const auto header = split_fields(lines[0].second);
    if (header.size() < 2 || trim(header[0]) != "id" || trim(header[1]) != "p_transcritical") {
        format_error(path, lines[0].first, "header must start with id,p_transcritical");
    }
    std::ptrdiff_t window_col = -1;
    for (std::size_t c = 2; c < header.size(); ++c) {
        if (trim(header[c]) == "eval_start_index") window_col = static_cast<std::ptrdiff_t>(c);
    }
    std::vector<PredictionRecord> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [line_no, line] = lines[r];
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            format_error(path, line_no,
                         "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        PredictionRecord p;
        p.id = std::string(trim(fields[0]));
        try {
            p.p_transcritical = parse_double(trim(fields[1]));
        } catch (const Error&) {
            format_error(path, line_no, "bad probability '" + std::string(fields[1]) + "'");
        }
        if (!(p.p_transcritical >= 0.0 && p.p_transcritical <= 1.0)) {
            format_error(path, line_no, "probability outside [0, 1]");
        }
        if (window_col >= 0) {
            const auto field = trim(fields[static_cast<std::size_t>(window_col)]);
            if (!field.empty()) {
                std::size_t v = 0;
                const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
                if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
                    format_error(path, line_no, "bad eval_start_index");
                }
                p.eval_start_index = v;
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

void write_labels(const fs::path& path, const LabelList& labels)
{
    std::string text = "id,label\n";
    for (const auto& [id, label] : labels) {
        check_id(id);
        text += id + "," + std::string(to_string(label)) + "\n";
    }
    write_file_atomically(path, text);
}

LabelList read_labels(const fs::path& path)
{
    const auto lines = read_lines(path);
    if (lines.empty()) format_error(path, 1, "missing header");
    const auto header = split_fields(lines[0].second);
    if (header.size() != 2 || trim(header[0]) != "id" || trim(header[1]) != "label") {
        format_error(path, lines[0].first, "header must be id,label");
    }
    LabelList out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [line_no, line] = lines[r];
        const auto fields = split_fields(line);
        if (fields.size() != 2) format_error(path, line_no, "expected 2 fields");
        try {
            out.emplace_back(std::string(trim(fields[0])), parse_label(trim(fields[1])));
        } catch (const Error&) {
            format_error(path, line_no, "unknown label '" + std::string(fields[1]) + "'");
        }
    }
    return out;
}

std::string roc_csv(const RocResult& roc)
{
    std::string text = "threshold,fpr,tpr\n";
    for (std::size_t k = 0; k < roc.thresholds.size(); ++k) {
        const double t = roc.thresholds[k];
        text += (std::isinf(t) ? std::string("inf") : format_double(t)) + "," + format_double(roc.fpr[k]) + "," +
                format_double(roc.tpr[k]) + "\n";
    }
    return text;
}

json roc_summary(const RocResult& roc)
{
    return json{{"auc", roc.auc}, {"positives", roc.positives}, {"negatives", roc.negatives},
                {"points", roc.thresholds.size()}};
}

std::vector<TestbedEntry> testbed_entries(const json& manifest)
{
    std::vector<TestbedEntry> out;
    if (!manifest.contains("series") || !manifest["series"].is_array()) {
        throw Error(ErrorKind::FormatError, "manifest has no series list");
    }
    for (const auto& e : manifest["series"]) {
        if (!e.contains("eval_start_index")) {
            throw Error(ErrorKind::FormatError, "manifest entry '" + e.value("id", std::string("?")) +
                                                    "' has no eval_start_index");
        }
        out.push_back({e.at("id").get<std::string>(), parse_label(e.at("label").get<std::string>()),
                       e.at("eval_start_index").get<std::size_t>()});
    }
    return out;
}

namespace {

/// Day number of an ISO date or a plain integer.
long parse_day(std::string_view text, const fs::path& path, std::size_t line_no)
{
    int y = 0;
    unsigned m = 0, d = 0;
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        auto num = [&](std::size_t pos, std::size_t len, auto& out) {
            const auto res = std::from_chars(text.data() + pos, text.data() + pos + len, out);
            return res.ec == std::errc() && res.ptr == text.data() + pos + len;
        };
        if (num(0, 4, y) && num(5, 2, m) && num(8, 2, d)) {
            const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
            if (ymd.ok()) return std::chrono::sys_days(ymd).time_since_epoch().count();
        }
        format_error(path, line_no, "bad date '" + std::string(text) + "'");
    }
    long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
        format_error(path, line_no, "bad time value '" + std::string(text) + "'");
    }
    return v;
}

struct Segment {
    long first_day = 0;
    std::vector<double> values;
    std::size_t fills = 0;
};

} // namespace

std::vector<TimeSeries> import_empirical_csv(const fs::path& path, const EmpiricalColumns& columns)
{
    const auto lines = read_lines(path);
    if (lines.empty()) format_error(path, 1, "missing header");
    const auto header = split_fields(lines[0].second);
    auto find_col = [&](const std::string& name) -> std::ptrdiff_t {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (trim(header[c]) == name) return static_cast<std::ptrdiff_t>(c);
        }
        return -1;
    };
    const auto time_col = find_col(columns.time_column);
    const auto count_col = find_col(columns.count_column);
    const auto group_col = columns.group_column.empty() ? -1 : find_col(columns.group_column);
    if (time_col < 0 || count_col < 0 || (!columns.group_column.empty() && group_col < 0)) {
        format_error(path, lines[0].first, "missing required column");
    }

    std::vector<std::string> group_order;
    std::unordered_map<std::string, std::vector<Segment>> groups;
    std::unordered_map<std::string, long> last_day;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [line_no, line] = lines[r];
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            format_error(path, line_no,
                         "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        const long day = parse_day(trim(fields[static_cast<std::size_t>(time_col)]), path, line_no);
        double count = 0.0;
        try {
            count = parse_double(trim(fields[static_cast<std::size_t>(count_col)]));
        } catch (const Error&) {
            format_error(path, line_no, "bad count");
        }
        if (!std::isfinite(count)) format_error(path, line_no, "count is not finite");
        if (count < 0.0) {
            throw Error(ErrorKind::NegativeCounts, path.filename().string() + " line " + std::to_string(line_no));
        }
        const std::string group = group_col >= 0 ? std::string(trim(fields[static_cast<std::size_t>(group_col)])) : "";
        auto& segments = groups[group];
        if (segments.empty()) {
            group_order.push_back(group);
            segments.push_back({day, {count}, 0});
        } else {
            const long prev = last_day[group];
            if (day <= prev) {
                throw Error(ErrorKind::NonMonotonicDates,
                            path.filename().string() + " line " + std::to_string(line_no));
            }
            const long missing = day - prev - 1;
            auto& seg = segments.back();
            if (missing <= columns.max_fill) {
                const double fill = seg.values.back();
                for (long k = 0; k < missing; ++k) seg.values.push_back(fill);
                seg.fills += static_cast<std::size_t>(missing);
                seg.values.push_back(count);
            } else {
                segments.push_back({day, {count}, 0});
            }
        }
        last_day[group] = day;
    }

    std::vector<TimeSeries> out;
    const std::string stem = path.stem().string();
    for (const auto& group : group_order) {
        const auto& segments = groups[group];
        for (std::size_t s = 0; s < segments.size(); ++s) {
            std::string id = stem;
            if (!group.empty()) id += "_" + group;
            id += "_seg" + std::to_string(s);
            TimeSeries ts(std::move(id), BifurcationLabel::Unlabeled, segments[s].values);
            ts.meta["source"] = path.filename().string();
            ts.meta["fill_count"] = std::to_string(segments[s].fills);
            ts.meta["first_day"] = std::to_string(segments[s].first_day);
            if (!group.empty()) ts.meta["group"] = group;
            out.push_back(std::move(ts));
        }
    }
    return out;
}

} // namespace ews
