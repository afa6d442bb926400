#include "pb/pabulib.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace pb {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
    return lines;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

}  // namespace

const std::string* PabulibFile::meta_value(const std::string& key) const {
    for (const auto& [k, v] : meta)
        if (k == key) return &v;
    return nullptr;
}

PabulibFile parse_pabulib(const std::string& raw) {
    std::string text = raw;
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);  // UTF-8 BOM

    const auto lines = split_lines(text);
    const int nlines = static_cast<int>(lines.size());
    int pos = 0;

    auto at_section = [&](const char* name) { return pos < nlines && lines[pos] == name; };

    if (!at_section("META")) throw ParseError(pos + 1, "missing section META");
    ++pos;

    PabulibFile file;

    // META: a "key;value" header line, then key;value rows
    if (pos >= nlines || split(lines[pos], ';')[0] != "key")
        throw ParseError(pos + 1, "META section must start with a 'key;value' header");
    ++pos;
    while (pos < nlines && lines[pos] != "PROJECTS") {
        const std::string& line = lines[pos];
        if (line.empty()) {
            ++pos;
            continue;
        }
        auto semi = line.find(';');
        if (semi == std::string::npos) throw ParseError(pos + 1, "META row without ';'");
        file.meta.emplace_back(line.substr(0, semi), line.substr(semi + 1));
        ++pos;
    }

    if (!at_section("PROJECTS")) throw ParseError(pos + 1, "missing section PROJECTS");
    ++pos;
    if (pos >= nlines) throw ParseError(pos + 1, "PROJECTS section missing header");
    file.project_columns = split(lines[pos], ';');
    const int col_pid = find_column(file.project_columns, "project_id");
    const int col_cost = find_column(file.project_columns, "cost");
    if (col_pid < 0) throw ParseError(pos + 1, "PROJECTS header missing column project_id");
    if (col_cost < 0) throw ParseError(pos + 1, "PROJECTS header missing column cost");
    ++pos;

    Instance& inst = file.instance;
    std::map<std::string, int> project_of_id;
    while (pos < nlines && lines[pos] != "VOTES") {
        const std::string& line = lines[pos];
        if (line.empty()) {
            ++pos;
            continue;
        }
        auto fields = split(line, ';');
        if (fields.size() != file.project_columns.size())
            throw ParseError(pos + 1, "project row has " + std::to_string(fields.size()) +
                                          " fields, header has " +
                                          std::to_string(file.project_columns.size()));
        Project p;
        p.id = fields[col_pid];
        const std::string& cost_text = fields[col_cost];
        if (cost_text.empty() || cost_text.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError(pos + 1, "non-integer cost '" + cost_text + "' for project " + p.id);
        p.cost = Int(cost_text, 10);
        if (p.cost < 1) throw ParseError(pos + 1, "project " + p.id + " has cost < 1");
        p.tiebreak_rank = inst.num_projects();
        if (!project_of_id.emplace(p.id, p.tiebreak_rank).second)
            throw ParseError(pos + 1, "duplicate project id '" + p.id + "'");
        inst.projects.push_back(std::move(p));
        std::vector<std::string> extras;
        for (size_t i = 0; i < fields.size(); ++i)
            if (static_cast<int>(i) != col_pid && static_cast<int>(i) != col_cost)
                extras.push_back(fields[i]);
        file.extra_project_fields.push_back(std::move(extras));
        ++pos;
    }
    if (inst.projects.empty()) throw ParseError(pos + 1, "PROJECTS section has no rows");

    if (!at_section("VOTES")) throw ParseError(pos + 1, "missing section VOTES");
    ++pos;
    if (pos >= nlines) throw ParseError(pos + 1, "VOTES section missing header");
    file.vote_columns = split(lines[pos], ';');
    const int col_vid = find_column(file.vote_columns, "voter_id");
    const int col_vote = find_column(file.vote_columns, "vote");
    if (col_vid < 0) throw ParseError(pos + 1, "VOTES header missing column voter_id");
    if (col_vote < 0) throw ParseError(pos + 1, "VOTES header missing column vote");
    ++pos;

    std::map<std::string, int> voter_of_id;
    for (; pos < nlines; ++pos) {
        const std::string& line = lines[pos];
        if (line.empty()) continue;
        auto fields = split(line, ';');
        if (fields.size() != file.vote_columns.size())
            throw ParseError(pos + 1, "vote row has " + std::to_string(fields.size()) +
                                          " fields, header has " +
                                          std::to_string(file.vote_columns.size()));
        const std::string& vid = fields[col_vid];
        if (!voter_of_id.emplace(vid, inst.num_voters()).second)
            throw ParseError(pos + 1, "duplicate voter id '" + vid + "'");
        inst.voters.push_back(vid);
        std::vector<int> vote;
        if (!fields[col_vote].empty()) {
            for (const std::string& pid : split(fields[col_vote], ',')) {
                auto it = project_of_id.find(pid);
                if (it == project_of_id.end())
                    throw ParseError(pos + 1,
                                     "vote references undeclared project id '" + pid + "'");
                vote.push_back(it->second);
            }
        }
        std::sort(vote.begin(), vote.end());
        vote.erase(std::unique(vote.begin(), vote.end()), vote.end());
        inst.approvals.push_back(std::move(vote));
        std::vector<std::string> extras;
        for (size_t i = 0; i < fields.size(); ++i)
            if (static_cast<int>(i) != col_vid && static_cast<int>(i) != col_vote)
                extras.push_back(fields[i]);
        file.extra_vote_fields.push_back(std::move(extras));
    }
    if (inst.voters.empty()) throw ParseError(nlines, "VOTES section has no rows");

    const std::string* budget_text = file.meta_value("budget");
    if (budget_text == nullptr) throw ParseError(1, "META missing key 'budget'");
    Rat budget_value;
    try {
        budget_value = parse_decimal(*budget_text);
    } catch (const std::invalid_argument&) {
        throw ParseError(1, "META budget is not numeric: '" + *budget_text + "'");
    }
    if (budget_value <= 0) throw ParseError(1, "META budget must be positive");
    inst.budget = budget_value.get_num() / budget_value.get_den();  // floor (value > 0)

    const std::string* vote_type = file.meta_value("vote_type");
    if (vote_type == nullptr) throw ParseError(1, "META missing key 'vote_type'");
    if (*vote_type != "approval")
        throw ParseError(1, "unsupported vote_type '" + *vote_type + "' (only approval)");

    inst.validate();
    return file;
}

std::string write_pabulib(const PabulibFile& file) {
    std::ostringstream out;
    out << "META\nkey;value\n";
    for (const auto& [k, v] : file.meta) out << k << ';' << v << '\n';

    const Instance& inst = file.instance;
    // projects in tiebreak_rank order (= parse order)
    std::vector<int> order(inst.num_projects());
    for (int i = 0; i < inst.num_projects(); ++i) order[inst.projects[i].tiebreak_rank] = i;

    out << "PROJECTS\n";
    for (size_t i = 0; i < file.project_columns.size(); ++i)
        out << (i ? ";" : "") << file.project_columns[i];
    out << '\n';
    for (int rank = 0; rank < inst.num_projects(); ++rank) {
        const int c = order[rank];
        size_t extra = 0;
        for (size_t i = 0; i < file.project_columns.size(); ++i) {
            if (i) out << ';';
            const std::string& col = file.project_columns[i];
            if (col == "project_id")
                out << inst.projects[c].id;
            else if (col == "cost")
                out << inst.projects[c].cost.get_str();
            else
                out << file.extra_project_fields[c][extra++];
        }
        out << '\n';
    }

    out << "VOTES\n";
    for (size_t i = 0; i < file.vote_columns.size(); ++i)
        out << (i ? ";" : "") << file.vote_columns[i];
    out << '\n';
    for (int v = 0; v < inst.num_voters(); ++v) {
        size_t extra = 0;
        for (size_t i = 0; i < file.vote_columns.size(); ++i) {
            if (i) out << ';';
            const std::string& col = file.vote_columns[i];
            if (col == "voter_id") {
                out << inst.voters[v];
            } else if (col == "vote") {
                // emit ids in the voter's stored (index-sorted) order
                for (size_t k = 0; k < inst.approvals[v].size(); ++k)
                    out << (k ? "," : "") << inst.projects[inst.approvals[v][k]].id;
            } else {
                out << file.extra_vote_fields[v][extra++];
            }
        }
        out << '\n';
    }
    return out.str();
}

PabulibFile load_pabulib_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_pabulib(buf.str());
}

PabulibFile wrap_instance(const Instance& instance, const std::string& description) {
    PabulibFile file;
    if (!description.empty()) file.meta.emplace_back("description", description);
    file.meta.emplace_back("budget", instance.budget.get_str());
    file.meta.emplace_back("vote_type", "approval");
    file.instance = instance;
    file.project_columns = {"project_id", "cost"};
    file.vote_columns = {"voter_id", "vote"};
    file.extra_project_fields.assign(instance.num_projects(), {});
    file.extra_vote_fields.assign(instance.num_voters(), {});
    return file;
}

}  // namespace pb
