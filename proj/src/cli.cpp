#include <tpiet/cli.hpp>

#include <tpiet/error.hpp>
#include <tpiet/parser.hpp>
#include <tpiet/validator.hpp>
#include <tpiet/text.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace tpiet {

std::string diagnostic(const std::exception& e, std::string_view source) {
    const auto* syntax = dynamic_cast<const SyntaxError*>(&e);
    if (syntax == nullptr || syntax->line() == 0 || source.empty()) {
        return std::string("error: ") + e.what() + "\n";
    }
    std::string out = std::string("error: ") + e.what() + "\n";
    std::size_t start = 0;
    for (std::size_t l = 1; l < syntax->line(); ++l) {
        const auto nl = source.find('\n', start);
        if (nl == std::string_view::npos) return out;
        start = nl + 1;
    }
    const auto end = source.find('\n', start);
    const std::string_view line =
        source.substr(start, end == std::string_view::npos ? source.size() - start : end - start);
    out += "  " + std::string(line) + "\n";
    out += "  " + std::string(syntax->column() > 0 ? syntax->column() - 1 : 0, ' ') + "^\n";
    return out;
}

namespace {

std::string interval_text(const Interval& i) { return i.to_string(); }

std::string layers_text(const State& s) {
    std::ostringstream out;
    for (const auto& name : s.layers.layer_names()) {
        const Layer& l = s.layers.layer(name);
        out << l.name() << " (" << to_lower(name_of(l.kind())) << ")";
        for (const auto& a : l.schema()) {
            out << " " << a.name << ":" << (a.type == AttributeType::Number ? "number" : "string");
        }
        out << "\n";
        for (const auto& id : l.object_ids()) {
            out << "  " << id;
            for (const Stage* st : l.history(id)) out << " " << interval_text(st->interval);
            out << "\n";
        }
    }
    return out.str();
}

std::string dims_text(const State& s) {
    std::ostringstream out;
    for (const auto& d : s.warehouse.dimensions()) {
        out << d.name() << ": ";
        for (std::size_t i = 0; i < d.levels().size(); ++i) out << (i ? " < " : "") << d.levels()[i];
        out << "\n";
        for (std::size_t lv = d.levels().size(); lv-- > 0;) {
            for (const auto& m : d.members()) {
                if (m.level != lv) continue;
                out << "  " << m.name << " (" << d.levels()[lv] << ")";
                if (m.parent) out << " -> " << *m.parent;
                out << " " << interval_text(m.validity) << "\n";
            }
        }
    }
    return out.str();
}

std::string mapping_text(const State& s) {
    std::ostringstream out;
    for (const auto& m : s.warehouse.mappings()) {
        out << m.dimension << "." << m.level << " <-> " << m.layer << "\n";
        for (const auto& r : m.rows) {
            out << "  " << r.member << " -> " << r.object_id << " " << interval_text(r.interval)
                << "\n";
        }
    }
    return out.str();
}

constexpr const char* kReplHelp =
    "queries end with ';' or a blank line\n"
    "\\layers              layers, objects and stage intervals\n"
    "\\dims                dimension members with parents and validity\n"
    "\\mapping             alpha mapping rows\n"
    "\\explain <query>     evaluation plan\n"
    "\\now [tick|date]     show or set the current tick (the value of Now)\n"
    "\\op <operation>      apply an update, e.g. \\op merge land p3 p4 @7300 p3-4:POLYGON(...) "
    "--rollup r2\n"
    "\\save                write the workspace files\n"
    "\\format <name>       table, csv or geojson\n"
    "\\quit                leave\n";

}  // namespace

Repl::Repl(Engine& engine, std::ostream& out, std::ostream& err)
    : engine_(engine), out_(out), err_(err) {}

void Repl::run_query(const std::string& text) {
    try {
        out_ << render(engine_.query(text), format);
        status = kExitOk;
    } catch (const Error& e) {
        err_ << diagnostic(e, text);
        status = kExitQueryError;
    }
}

bool Repl::feed(const std::string& raw) {
    std::string line = raw;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (pending_.empty() && !line.empty() && line.front() == '\\') return meta(line);
    if (line.empty()) {
        flush();
        return true;
    }
    if (!pending_.empty()) pending_ += "\n";
    pending_ += line;
    if (line.back() == ';') flush();
    return true;
}

void Repl::flush() {
    if (pending_.find_first_not_of(" \t\n") == std::string::npos) {
        pending_.clear();
        return;
    }
    std::string text = std::move(pending_);
    pending_.clear();
    run_query(text);
}

bool Repl::meta(const std::string& line) {
    const auto space = line.find(' ');
    const std::string cmd = line.substr(0, space);
    std::string arg = space == std::string::npos ? "" : line.substr(space + 1);
    arg.erase(0, arg.find_first_not_of(' '));
    status = kExitOk;
    try {
        const auto s = engine_.state();
        if (cmd == "\\quit" || cmd == "\\q") return false;
        if (cmd == "\\help" || cmd == "\\?") {
            out_ << kReplHelp;
        } else if (cmd == "\\layers") {
            out_ << layers_text(*s);
        } else if (cmd == "\\dims") {
            out_ << dims_text(*s);
        } else if (cmd == "\\mapping") {
            out_ << mapping_text(*s);
        } else if (cmd == "\\explain") {
            out_ << engine_.explain(arg);
        } else if (cmd == "\\now") {
            if (arg.empty()) {
                out_ << "Now = tick " << s->time.current << "\n";
            } else {
                const Instant t = s->time.parse_instant(arg);
                if (!t.is_finite()) throw SyntaxError("\\now needs a tick or a date");
                engine_.set_now(t.tick());
                out_ << "Now = tick " << t.tick() << "\n";
            }
        } else if (cmd == "\\op") {
            out_ << engine_.apply(parse_op(split_op_words(arg), s->time));
        } else if (cmd == "\\save") {
            engine_.save();
            out_ << "saved\n";
        } else if (cmd == "\\format") {
            auto f = output_format_from_name(arg);
            if (!f) throw SyntaxError("unknown format '" + arg + "' (table, csv, geojson)");
            format = *f;
        } else {
            throw SyntaxError("unknown command " + cmd + " (try \\help)");
        }
    } catch (const Error& e) {
        err_ << diagnostic(e, cmd == "\\explain" ? std::string_view(arg) : std::string_view());
        status = kExitQueryError;
    }
    return true;
}

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"Spatio-temporal SOLAP query engine"};
    app.require_subcommand(1);

    std::string config;
    std::string query_text;
    std::string format_name = "table";
    std::vector<std::string> op_words;
    bool dry_run = false;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("config", config, "workspace config file")->envname("TPIET_WORKSPACE");
    };

    auto* load = app.add_subcommand("load", "load a workspace and print its summary");
    add_config(load);

    auto* query = app.add_subcommand("query", "run one query");
    add_config(query);
    query->add_option("-e,--execute", query_text, "query text")->required();
    query->add_option("--format", format_name, "table, csv or geojson")
        ->check(CLI::IsMember({"table", "csv", "geojson"}));

    auto* repl = app.add_subcommand("repl", "interactive session");
    add_config(repl);
    repl->add_option("--format", format_name, "table, csv or geojson")
        ->check(CLI::IsMember({"table", "csv", "geojson"}));

    auto* op = app.add_subcommand("op", "apply an update operation and save the workspace");
    add_config(op);
    op->add_flag("--dry-run", dry_run, "apply in memory only");
    // Everything after the config is the operation, e.g.
    // split land p1 @10 p2:WKT p3:WKT --rollup r1
    op->prefix_command();

    auto* validate = app.add_subcommand("validate", "check a workspace, or a query against it");
    add_config(validate);
    validate->add_option("-e,--execute", query_text, "query to parse and validate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitWorkspaceError;
    }
    if (app.got_subcommand(op)) {
        for (auto& w : op->remaining()) {
            if (w == "--dry-run") {
                dry_run = true;
            } else {
                op_words.push_back(std::move(w));
            }
        }
    }

    if (config.empty()) {
        err << "error: no workspace config given (argument or TPIET_WORKSPACE)\n";
        return kExitWorkspaceError;
    }

    std::optional<Engine> engine;
    try {
        engine.emplace(Engine::open(config));
    } catch (const Error& e) {
        err << diagnostic(e);
        return kExitWorkspaceError;
    }
    const OutputFormat format = *output_format_from_name(format_name);

    if (app.got_subcommand(load)) {
        out << engine->summary();
        return kExitOk;
    }
    if (app.got_subcommand(validate)) {
        if (query_text.empty()) {
            out << "workspace ok\n" << engine->summary();
            return kExitOk;
        }
        try {
            const auto s = engine->state();
            ql::validate(ql::parse(query_text), s->catalog());
            out << "query ok\n";
            return kExitOk;
        } catch (const Error& e) {
            err << diagnostic(e, query_text);
            return kExitQueryError;
        }
    }
    if (app.got_subcommand(query)) {
        try {
            out << render(engine->query(query_text), format);
            return kExitOk;
        } catch (const Error& e) {
            err << diagnostic(e, query_text);
            return kExitQueryError;
        }
    }
    if (app.got_subcommand(op)) {
        try {
            // Rejoin so a WKT split across shell words becomes one word again.
            std::string line;
            for (const auto& w : op_words) line += (line.empty() ? "" : " ") + w;
            const auto words = split_op_words(line);
            out << engine->apply(parse_op(words, engine->state()->time));
            if (!dry_run) engine->save();
            return kExitOk;
        } catch (const WorkspaceError& e) {
            err << diagnostic(e);
            return kExitWorkspaceError;
        } catch (const Error& e) {
            err << diagnostic(e);
            return kExitQueryError;
        }
    }

    Repl session(*engine, out, err);
    session.format = format;
    std::string line;
    while (std::getline(in, line)) {
        if (!session.feed(line)) return session.status;
    }
    session.flush();
    return session.status;
}

}  // namespace tpiet
