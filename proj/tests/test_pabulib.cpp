#include <doctest.h>

#include <string>

#include "generators.hpp"
#include "pb/pabulib.hpp"

using namespace pb;

namespace {

const char* kMinimal =
    "META\n"
    "key;value\n"
    "budget;10\n"
    "vote_type;approval\n"
    "PROJECTS\n"
    "project_id;cost\n"
    "p1;7\n"
    "VOTES\n"
    "voter_id;vote\n"
    "1;p1\n";

std::string error_of(const std::string& text) {
    try {
        parse_pabulib(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("parses a minimal well-formed file") {
    PabulibFile file = parse_pabulib(kMinimal);
    CHECK(file.instance.num_projects() == 1);
    CHECK(file.instance.num_voters() == 1);
    CHECK(file.instance.budget == 10);
    CHECK(file.instance.projects[0].id == "p1");
    CHECK(file.instance.projects[0].cost == 7);
    CHECK(file.instance.approvals[0] == std::vector<int>{0});
}

TEST_CASE("canonical file round-trips byte for byte") {
    PabulibFile file = parse_pabulib(kMinimal);
    CHECK(write_pabulib(file) == kMinimal);
}

TEST_CASE("CRLF input is accepted, output is LF") {
    std::string crlf = kMinimal;
    std::string with_crlf;
    for (char ch : crlf) {
        if (ch == '\n') with_crlf += "\r\n";
        else with_crlf += ch;
    }
    PabulibFile file = parse_pabulib(with_crlf);
    CHECK(write_pabulib(file) == kMinimal);
}

TEST_CASE("parse errors carry line numbers and names") {
    // missing VOTES section
    std::string no_votes =
        "META\nkey;value\nbudget;10\nvote_type;approval\n"
        "PROJECTS\nproject_id;cost\np1;7\n";
    CHECK(error_of(no_votes).find("missing section VOTES") != std::string::npos);

    // vote referencing an undeclared project
    std::string bad_ref =
        "META\nkey;value\nbudget;10\nvote_type;approval\n"
        "PROJECTS\nproject_id;cost\np2;3\n"
        "VOTES\nvoter_id;vote\n1;p2,p5\n";
    const std::string msg = error_of(bad_ref);
    CHECK(msg.find("p5") != std::string::npos);
    CHECK(msg.find("line 10") != std::string::npos);

    std::string bad_cost =
        "META\nkey;value\nbudget;10\nvote_type;approval\n"
        "PROJECTS\nproject_id;cost\np1;7.5\n"
        "VOTES\nvoter_id;vote\n1;p1\n";
    CHECK(error_of(bad_cost).find("non-integer cost") != std::string::npos);

    std::string dup_project =
        "META\nkey;value\nbudget;10\nvote_type;approval\n"
        "PROJECTS\nproject_id;cost\np1;7\np1;3\n"
        "VOTES\nvoter_id;vote\n1;p1\n";
    CHECK(error_of(dup_project).find("duplicate project id") != std::string::npos);

    std::string dup_voter =
        "META\nkey;value\nbudget;10\nvote_type;approval\n"
        "PROJECTS\nproject_id;cost\np1;7\n"
        "VOTES\nvoter_id;vote\n1;p1\n1;\n";
    CHECK(error_of(dup_voter).find("duplicate voter id") != std::string::npos);

    std::string ordinal =
        "META\nkey;value\nbudget;10\nvote_type;ordinal\n"
        "PROJECTS\nproject_id;cost\np1;7\n"
        "VOTES\nvoter_id;vote\n1;p1\n";
    CHECK(error_of(ordinal).find("vote_type") != std::string::npos);

    CHECK(error_of("PROJECTS\n").find("missing section META") != std::string::npos);
}

TEST_CASE("fractional budget is floored, empty votes are kept") {
    std::string text =
        "META\nkey;value\nbudget;10.75\nvote_type;approval\n"
        "PROJECTS\nproject_id;cost\np1;7\n"
        "VOTES\nvoter_id;vote\n1;p1\n2;\n";
    PabulibFile file = parse_pabulib(text);
    CHECK(file.instance.budget == 10);
    CHECK(file.instance.num_voters() == 2);  // empty vote kept, it affects B/n
    CHECK(file.instance.approvals[1].empty());

    // empty approval set round-trips as an empty vote field
    const std::string written = write_pabulib(file);
    CHECK(written.find("2;\n") != std::string::npos);
}

TEST_CASE("extra columns and meta keys are preserved verbatim") {
    std::string text =
        "META\nkey;value\nbudget;10\nvote_type;approval\ncountry;Poland\n"
        "PROJECTS\nproject_id;name;cost\np1;Park;7\np2;Library;2\np3;Bench;1\n"
        "VOTES\nvoter_id;age;vote\n1;34;p1,p3\n2;;p2\n";
    PabulibFile file = parse_pabulib(text);
    CHECK(file.instance.num_projects() == 3);
    CHECK(file.extra_project_fields[0] == std::vector<std::string>{"Park"});
    CHECK(file.extra_vote_fields[1] == std::vector<std::string>{""});
    CHECK(write_pabulib(file) == text);

    // three projects -> three data rows in rank order
    PabulibFile again = parse_pabulib(write_pabulib(file));
    for (int c = 0; c < 3; ++c) {
        CHECK(again.instance.projects[c].id == file.instance.projects[c].id);
        CHECK(again.instance.projects[c].tiebreak_rank == c);
    }
}

TEST_CASE("duplicate ids within one vote collapse to a set") {
    std::string text =
        "META\nkey;value\nbudget;10\nvote_type;approval\n"
        "PROJECTS\nproject_id;cost\np1;7\n"
        "VOTES\nvoter_id;vote\n1;p1,p1\n";
    PabulibFile file = parse_pabulib(text);
    CHECK(file.instance.approvals[0] == std::vector<int>{0});
}

TEST_CASE("parse of write is the identity on random instances") {
    SplitMix64 rng(11);
    GenParams params;
    params.max_projects = 8;
    params.max_voters = 6;
    for (int it = 0; it < 100; ++it) {
        const Instance inst = random_instance(rng, params);
        const PabulibFile file = wrap_instance(inst, "synthetic");
        const PabulibFile back = parse_pabulib(write_pabulib(file));
        CHECK(back.instance.budget == inst.budget);
        CHECK(back.instance.voters == inst.voters);
        CHECK(back.instance.approvals == inst.approvals);
        REQUIRE(back.instance.num_projects() == inst.num_projects());
        for (int c = 0; c < inst.num_projects(); ++c) {
            CHECK(back.instance.projects[c].id == inst.projects[c].id);
            CHECK(back.instance.projects[c].cost == inst.projects[c].cost);
            CHECK(back.instance.projects[c].tiebreak_rank == inst.projects[c].tiebreak_rank);
        }
        CHECK(back.meta == file.meta);
        // and the serialization itself is stable
        CHECK(write_pabulib(back) == write_pabulib(file));
    }
}
