#include "hazealign/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hazealign/error.hpp"

namespace hazealign {

namespace fs = std::filesystem;

std::string_view split_name(Split split) noexcept {
    switch (split) {
        case Split::train: return "train";
        case Split::test: return "test";
        case Split::val: return "val";
        case Split::unassigned: return "unassigned";
    }
    return "unassigned";
}

std::optional<Split> parse_split(std::string_view text) noexcept {
    for (Split s : {Split::train, Split::test, Split::val, Split::unassigned}) {
        if (text == split_name(s)) return s;
    }
    return std::nullopt;
}

fs::path DatasetManifest::resolve(const fs::path& p) const {
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

std::size_t DatasetManifest::count(Split split) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [split](const PairRecord& r) { return r.split == split; }));
}

std::vector<PairRecord> DatasetManifest::with_split(Split split) const {
    std::vector<PairRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [split](const PairRecord& r) { return r.split == split; });
    return out;
}

void DatasetManifest::validate() const {
    if (records.empty()) throw FormatError("manifest '" + name + "' has no records");
    std::set<std::string> seen;
    for (const auto& r : records) {
        if (r.id.empty()) throw FormatError("manifest '" + name + "' has a record with an empty id");
        if (!seen.insert(r.id).second) throw FormatError("manifest '" + name + "' has duplicate id " + r.id);
    }
}

bool natural_less(std::string_view a, std::string_view b) noexcept {
    std::size_t i = 0;
    std::size_t j = 0;
    const auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    while (i < a.size() && j < b.size()) {
        if (is_digit(a[i]) && is_digit(b[j])) {
            std::size_t ei = i;
            std::size_t ej = j;
            while (ei < a.size() && is_digit(a[ei])) ++ei;
            while (ej < b.size() && is_digit(b[ej])) ++ej;
            std::string_view da = a.substr(i, ei - i);
            std::string_view db = b.substr(j, ej - j);
            const auto strip = [](std::string_view d) {
                const auto nz = d.find_first_not_of('0');
                return nz == std::string_view::npos ? std::string_view{} : d.substr(nz);
            };
            const auto na = strip(da);
            const auto nb = strip(db);
            if (na.size() != nb.size()) return na.size() < nb.size();
            if (na != nb) return na < nb;
            if (da.size() != db.size()) return da.size() < db.size();
            i = ei;
            j = ej;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return (a.size() - i) < (b.size() - j);
}

std::string pairing_stem(const fs::path& file) {
    std::string stem = file.stem().string();
    std::string lower = stem;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (std::string_view suffix : {"_hazy", "_haze", "_gt", "_clean"}) {
        if (lower.size() > suffix.size() && lower.ends_with(suffix)) {
            return stem.substr(0, stem.size() - suffix.size());
        }
    }
    return stem;
}

namespace {

std::map<std::string, fs::path> png_files_by_stem(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext != ".png") continue;
        const std::string stem = pairing_stem(entry.path());
        if (!out.emplace(stem, entry.path()).second) {
            throw FormatError("two files in " + dir.string() + " share the stem '" + stem + "'");
        }
    }
    if (out.empty()) throw FormatError("no PNG files in " + dir.string());
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

}  // namespace

DatasetManifest scan_directory(const fs::path& hazy_dir, const fs::path& gt_dir, std::string name) {
    const auto hazy = png_files_by_stem(hazy_dir);
    const auto gt = png_files_by_stem(gt_dir);

    std::vector<std::string> unmatched;
    for (const auto& [stem, _] : hazy) {
        if (!gt.contains(stem)) unmatched.push_back(stem + " (hazy only)");
    }
    for (const auto& [stem, _] : gt) {
        if (!hazy.contains(stem)) unmatched.push_back(stem + " (gt only)");
    }
    if (!unmatched.empty()) throw FormatError("unmatched stems: " + join(unmatched));

    DatasetManifest manifest;
    manifest.name = name.empty() ? gt_dir.parent_path().filename().string() : std::move(name);
    if (manifest.name.empty()) manifest.name = "dataset";
    for (const auto& [stem, hazy_path] : hazy) {
        manifest.records.push_back({stem, hazy_path, gt.at(stem), Split::unassigned});
    }
    std::stable_sort(manifest.records.begin(), manifest.records.end(),
                     [](const PairRecord& a, const PairRecord& b) { return natural_less(a.id, b.id); });
    return manifest;
}

namespace {

// Head split used when a fixed-size policy meets a dataset of another size:
// the policy's train fraction is kept, rounded to the nearest record.
std::size_t proportional(std::size_t n, std::size_t part, std::size_t whole) {
    return (n * part + whole / 2) / whole;
}

void assign_heads(DatasetManifest& m, std::size_t train, std::size_t val, std::size_t test) {
    std::size_t i = 0;
    for (auto& r : m.records) {
        if (i < train) {
            r.split = Split::train;
        } else if (i < train + val) {
            r.split = Split::val;
        } else if (i < train + val + test) {
            r.split = Split::test;
        } else {
            r.split = Split::unassigned;
        }
        ++i;
    }
}

std::map<std::string, Split> read_split_list(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read split list " + path.string());
    std::map<std::string, Split> out;
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::istringstream fields(line);
        std::string id;
        std::string split_text;
        std::string extra;
        if (!(fields >> id >> split_text) || (fields >> extra)) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 'id split'");
        }
        const auto split = parse_split(split_text);
        if (!split) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": unknown split '" +
                              split_text + "'");
        }
        if (!out.emplace(id, *split).second) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": duplicate id " + id);
        }
    }
    return out;
}

}  // namespace

SplitResult apply_split(const DatasetManifest& manifest, std::string_view policy, const SplitParams& params) {
    manifest.validate();
    SplitResult result{manifest, {}};
    DatasetManifest& m = result.manifest;
    std::stable_sort(m.records.begin(), m.records.end(),
                     [](const PairRecord& a, const PairRecord& b) { return natural_less(a.id, b.id); });
    const std::size_t n = m.records.size();
    const auto warn_count = [&](std::size_t expected) {
        result.warnings.push_back(std::string(policy) + " expects " + std::to_string(expected) +
                                  " records, got " + std::to_string(n));
    };

    if (policy == "nh23-comparison") {
        if (n == 40) {
            assign_heads(m, 35, 0, 5);
        } else {
            warn_count(40);
            const std::size_t train = proportional(n, 35, 40);
            assign_heads(m, train, 0, n - train);
        }
    } else if (policy == "nh23-ablation") {
        if (n != 40) warn_count(40);
        assign_heads(m, n, 0, 0);
    } else if (policy == "nh21") {
        if (n >= 25) {
            if (n > 25) {
                result.warnings.push_back("nh21 uses the first 25 records; " + std::to_string(n - 25) +
                                          " surplus records left unassigned");
            }
            assign_heads(m, 20, 0, 5);
        } else {
            warn_count(25);
            const std::size_t train = proportional(n, 20, 25);
            assign_heads(m, train, 0, n - train);
        }
    } else if (policy == "custom") {
        if (params.train + params.val + params.test > n) {
            throw InvalidArgument("custom split asks for " +
                                  std::to_string(params.train + params.val + params.test) +
                                  " records but the manifest has " + std::to_string(n));
        }
        assign_heads(m, params.train, params.val, params.test);
    } else if (policy == "official-split") {
        if (params.list_file.empty()) throw InvalidArgument("official-split needs a list file");
        const auto listed = read_split_list(params.list_file);
        std::set<std::string> ids;
        for (auto& r : m.records) {
            ids.insert(r.id);
            const auto it = listed.find(r.id);
            r.split = it == listed.end() ? Split::unassigned : it->second;
        }
        for (const auto& [id, _] : listed) {
            if (!ids.contains(id)) throw FormatError("split list names unknown id " + id);
        }
        if (listed.size() != n) {
            result.warnings.push_back(std::to_string(n - listed.size()) +
                                      " records not in the split list left unassigned");
        }
    } else {
        throw InvalidArgument("unknown split policy '" + std::string(policy) + "'");
    }
    m.policy = std::string(policy) + ";first-n=numeric-stem-order";
    return result;
}

namespace {

void require_field(std::string_view what, const std::string& value) {
    if (value.find_first_of("\t\n\r") != std::string::npos) {
        throw FormatError(std::string(what) + " contains a tab or newline: " + value);
    }
}

std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return out;
}

}  // namespace

std::string format_manifest(const DatasetManifest& manifest) {
    manifest.validate();
    require_field("manifest name", manifest.name);
    require_field("manifest policy", manifest.policy);
    std::string out;
    out += kManifestVersion;
    out += '\t' + manifest.name + '\t' + manifest.policy + '\n';
    for (const auto& r : manifest.records) {
        require_field("id", r.id);
        require_field("hazy path", r.hazy_path.string());
        require_field("gt path", r.gt_path.string());
        out += r.id + '\t' + r.hazy_path.string() + '\t' + r.gt_path.string() + '\t' +
               std::string(split_name(r.split)) + '\n';
    }
    return out;
}

DatasetManifest parse_manifest(std::string_view text, const fs::path& base_dir) {
    DatasetManifest m;
    m.base_dir = base_dir;
    int line_no = 0;
    bool have_header = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const auto where = "manifest line " + std::to_string(line_no) + ": ";
        const auto fields = split_tabs(line);
        if (!have_header) {
            if (fields.size() != 3 || fields[0] != kManifestVersion) {
                throw FormatError(where + "expected header '" + std::string(kManifestVersion) +
                                  "<TAB>name<TAB>policy'");
            }
            m.name = fields[1];
            m.policy = fields[2];
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        if (fields.size() != 4) {
            throw FormatError(where + "expected 4 tab-separated fields (id, hazy_path, gt_path, split), got " +
                              std::to_string(fields.size()));
        }
        const auto split = parse_split(fields[3]);
        if (!split) throw FormatError(where + "unknown split '" + fields[3] + "'");
        if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
            throw FormatError(where + "empty field");
        }
        m.records.push_back({fields[0], fields[1], fields[2], *split});
    }
    if (!have_header) throw FormatError("manifest is empty");
    m.validate();
    return m;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
    const std::string text = format_manifest(manifest);
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << text;
    if (!out.flush()) throw IoError("failed writing manifest " + path.string());
}

DatasetManifest read_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read manifest " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_manifest(buffer.str(), path.parent_path());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace hazealign
