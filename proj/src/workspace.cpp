#include <tpiet/workspace.hpp>

#include <tpiet/csv.hpp>
#include <tpiet/error.hpp>
#include <tpiet/parser.hpp>
#include <tpiet/text.hpp>
#include <tpiet/validator.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace tpiet {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        if (comma == std::string_view::npos) comma = s.size();
        std::string item = trim(s.substr(start, comma - start));
        if (!item.empty()) out.push_back(item);
        start = comma + 1;
    }
    return out;
}

struct Section {
    std::string type;
    std::string name;
    std::size_t line = 0;
    std::map<std::string, std::pair<std::string, std::size_t>> keys;
};

class SectionReader {
public:
    explicit SectionReader(const Section& s) : s_(s) {}

    std::optional<std::string> optional(const std::string& key) {
        auto it = s_.keys.find(key);
        if (it == s_.keys.end()) return std::nullopt;
        used_.insert(key);
        return it->second.first;
    }

    std::string required(const std::string& key) {
        auto v = optional(key);
        if (!v) fail("missing key '" + key + "'");
        return *v;
    }

    [[noreturn]] void fail(const std::string& message) const {
        std::string head = "[" + s_.type + (s_.name.empty() ? "" : " " + s_.name) + "]";
        throw WorkspaceError("config line " + std::to_string(s_.line) + ": " + head + " " +
                             message);
    }

    void finish() const {
        for (const auto& [key, value] : s_.keys) {
            if (!used_.contains(key)) {
                throw WorkspaceError("config line " + std::to_string(value.second) +
                                     ": unknown key '" + key + "' in [" + s_.type + "]");
            }
        }
    }

private:
    const Section& s_;
    std::set<std::string> used_;
};

std::vector<Section> read_sections(std::string_view text) {
    std::vector<Section> sections;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw WorkspaceError("config line " + std::to_string(line_no) +
                                     ": unterminated section header");
            }
            std::string inner = trim(std::string_view(line).substr(1, line.size() - 2));
            Section s;
            s.line = line_no;
            const auto space = inner.find(' ');
            s.type = to_lower(inner.substr(0, space));
            if (space != std::string::npos) s.name = trim(inner.substr(space + 1));
            sections.push_back(std::move(s));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw WorkspaceError("config line " + std::to_string(line_no) +
                                 ": expected 'key = value'");
        }
        if (sections.empty()) {
            throw WorkspaceError("config line " + std::to_string(line_no) +
                                 ": key outside of any section");
        }
        std::string key = to_lower(trim(line.substr(0, eq)));
        auto [it, fresh] =
            sections.back().keys.emplace(key, std::pair(trim(line.substr(eq + 1)), line_no));
        if (!fresh) {
            throw WorkspaceError("config line " + std::to_string(line_no) + ": duplicate key '" +
                                 key + "'");
        }
    }
    return sections;
}

GeometryKind kind_from_name(SectionReader& r, const std::string& name) {
    if (iequals(name, "point")) return GeometryKind::Point;
    if (iequals(name, "linestring") || iequals(name, "line")) return GeometryKind::LineString;
    if (iequals(name, "polygon")) return GeometryKind::Polygon;
    r.fail("unknown geometry kind '" + name + "'");
}

void apply_time_section(SectionReader& r, WorkspaceConfig& cfg) {
    if (auto g = r.optional("granularity")) {
        if (iequals(*g, "day")) {
            cfg.time.granularity = Granularity::Day;
        } else if (iequals(*g, "year")) {
            cfg.time.granularity = Granularity::Year;
        } else {
            r.fail("granularity must be day or year");
        }
    }
    if (auto o = r.optional("date_order")) {
        if (iequals(*o, "mdy")) {
            cfg.time.date_order = DateOrder::MonthDayYear;
        } else if (iequals(*o, "dmy")) {
            cfg.time.date_order = DateOrder::DayMonthYear;
        } else {
            r.fail("date_order must be mdy or dmy");
        }
    }
    if (auto e = r.optional("epoch")) {
        unsigned a = 0, b = 0;
        int y = 0;
        char s1 = 0, s2 = 0;
        std::istringstream in(*e);
        if (auto year = parse_year(*e)) {
            cfg.time.epoch_year = *year;
            cfg.time.epoch_month = 1;
            cfg.time.epoch_day = 1;
        } else if ((in >> a >> s1 >> b >> s2 >> y) && s1 == '/' && s2 == '/' && in.eof()) {
            const bool mdy = cfg.time.date_order == DateOrder::MonthDayYear;
            cfg.time.epoch_year = y;
            cfg.time.epoch_month = mdy ? a : b;
            cfg.time.epoch_day = mdy ? b : a;
        } else {
            r.fail("epoch must be a date or a four-digit year");
        }
    }
    if (auto c = r.optional("current")) {
        if (iequals(*c, "today")) {
            cfg.current_is_today = true;
            cfg.time.set_current_to_today();
        } else {
            try {
                const Instant t = cfg.time.parse_instant(*c);
                if (!t.is_finite()) r.fail("current must be a tick, a date or 'today'");
                cfg.time.current = t.tick();
            } catch (const Error& e) {
                r.fail(std::string("bad current instant: ") + e.what());
            }
        }
    }
}

std::string kind_name(GeometryKind kind) { return to_lower(name_of(kind)); }

}  // namespace

fs::path WorkspaceConfig::resolve(const fs::path& p) const {
    return p.is_absolute() ? p : base_dir / p;
}

WorkspaceConfig WorkspaceConfig::parse(std::string_view text, const fs::path& base_dir) {
    WorkspaceConfig cfg;
    cfg.base_dir = base_dir;
    for (const auto& section : read_sections(text)) {
        SectionReader r(section);
        if (section.type == "time") {
            apply_time_section(r, cfg);
        } else if (section.type == "warehouse") {
            if (auto m = r.optional("dimension_mode")) {
                if (iequals(*m, "temporal")) {
                    cfg.mode = DimensionMode::Temporal;
                } else if (iequals(*m, "static")) {
                    cfg.mode = DimensionMode::Static;
                } else {
                    r.fail("dimension_mode must be static or temporal");
                }
            }
            if (auto t = r.optional("time_dimension")) cfg.time_dimension = *t;
        } else if (section.type == "layer") {
            if (section.name.empty()) r.fail("layer sections need a name");
            cfg.layers.push_back(
                {section.name, kind_from_name(r, r.required("kind")), r.required("file")});
        } else if (section.type == "dimension") {
            if (section.name.empty()) r.fail("dimension sections need a name");
            cfg.dimensions.push_back({section.name, r.required("file")});
        } else if (section.type == "cube") {
            if (section.name.empty()) r.fail("cube sections need a name");
            CubeEntry c{section.name, r.required("file"), split_list(r.required("dimensions")),
                        split_list(r.required("measures"))};
            cfg.cubes.push_back(std::move(c));
        } else if (section.type == "mapping") {
            cfg.mappings.push_back({section.name, r.required("dimension"), r.required("level"),
                                    r.required("layer"), r.required("file")});
        } else {
            r.fail("unknown section type");
        }
        r.finish();
    }
    return cfg;
}

WorkspaceConfig WorkspaceConfig::read(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw WorkspaceError("cannot open workspace config " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), file.parent_path());
}

// ---- ops -------------------------------------------------------------------

std::vector<std::string> split_op_words(std::string_view line) {
    std::vector<std::string> words;
    std::string cur;
    int depth = 0;
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == quote) {
                quote = 0;
            } else {
                cur.push_back(c);
            }
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
            continue;
        }
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (std::isspace(static_cast<unsigned char>(c)) && depth <= 0) {
            const auto next = line.find_first_not_of(" \t", i);
            if (!cur.empty() && next != std::string_view::npos && line[next] == '(') {
                cur.push_back(' ');
                i = next - 1;
                continue;
            }
            if (!cur.empty()) words.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        cur.push_back(c);
    }
    if (quote) throw SyntaxError("unterminated quote in operation");
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

namespace {

bool looks_like_wkt(std::string_view w) {
    for (std::string_view k : {"POINT", "LINESTRING", "POLYGON"}) {
        if (w.size() >= k.size() && iequals(w.substr(0, k.size()), k)) {
            const std::string_view rest = w.substr(k.size());
            const auto p = rest.find_first_not_of(' ');
            return p != std::string_view::npos && rest[p] == '(';
        }
    }
    return false;
}

std::optional<ChangeKind> op_kind(std::string_view word) {
    for (ChangeKind k : {ChangeKind::Create, ChangeKind::Split, ChangeKind::Merge,
                         ChangeKind::Update, ChangeKind::Delete, ChangeKind::Reincarnate}) {
        if (iequals(name_of(k), word)) return k;
    }
    return std::nullopt;
}

}  // namespace

OpSpec parse_op(const std::vector<std::string>& words, const TimeConfig& time) {
    if (words.size() < 2) throw SyntaxError("operation needs a kind and a layer");
    OpSpec op;
    auto kind = op_kind(words[0]);
    if (!kind) {
        throw SyntaxError("unknown operation '" + words[0] +
                          "' (create, split, merge, update, delete, reincarnate)");
    }
    op.kind = *kind;
    op.layer = words[1];
    bool have_time = false;
    for (std::size_t i = 2; i < words.size(); ++i) {
        const std::string& w = words[i];
        if (w == "--rollup" || w.starts_with("--rollup=")) {
            if (w == "--rollup") {
                if (i + 1 >= words.size()) throw SyntaxError("--rollup needs a member name");
                op.rollup = words[++i];
            } else {
                op.rollup = w.substr(9);
            }
        } else if (w.starts_with("@")) {
            op.at = time.parse_instant(w.substr(1));
            if (!op.at.is_finite()) throw SyntaxError("operation instant must be finite");
            have_time = true;
        } else if (looks_like_wkt(w)) {
            if (op.geometry) throw SyntaxError("more than one geometry given");
            op.geometry = parse_wkt(w);
        } else if (auto colon = w.find(':');
                   colon != std::string::npos && looks_like_wkt(w.substr(colon + 1))) {
            op.stages.push_back({w.substr(0, colon), parse_wkt(w.substr(colon + 1)), {}});
        } else if (auto eq = w.find('='); eq != std::string::npos && eq > 0) {
            op.attributes[w.substr(0, eq)] = w.substr(eq + 1);
        } else {
            op.ids.push_back(w);
        }
    }
    if (!have_time) throw SyntaxError("operation needs an instant, e.g. @10");

    auto need = [](bool ok, const std::string& usage) {
        if (!ok) throw SyntaxError("usage: " + usage);
    };
    switch (op.kind) {
        case ChangeKind::Create:
            need(op.ids.empty() && op.stages.size() == 1 && !op.geometry,
                 "create <layer> <id>:<WKT> @t [attr=value ...]");
            op.stages[0].attributes = op.attributes;
            break;
        case ChangeKind::Split:
            need(op.ids.size() == 1 && op.stages.size() >= 2 && !op.geometry,
                 "split <layer> <parent> @t <id>:<WKT> <id>:<WKT> ... [--rollup member]");
            break;
        case ChangeKind::Merge:
            need(op.ids.size() >= 2 && op.stages.size() == 1 && !op.geometry,
                 "merge <layer> <id> <id> ... @t <new id>:<WKT> [--rollup member]");
            op.stages[0].attributes = op.attributes;
            break;
        case ChangeKind::Update:
        case ChangeKind::Reincarnate:
            need(op.ids.size() == 1 && op.stages.empty() && op.geometry.has_value(),
                 std::string(name_of(op.kind)) + " <layer> <id> @t <WKT> [attr=value ...]");
            break;
        case ChangeKind::Delete:
            need(op.ids.size() == 1 && op.stages.empty() && !op.geometry && op.attributes.empty(),
                 "delete <layer> <id> @t");
            break;
    }
    return op;
}

// ---- engine ----------------------------------------------------------------

Engine::Engine(WorkspaceConfig config, std::shared_ptr<const State> state)
    : config_(std::move(config)), state_(std::move(state)) {}

Engine::Engine(Engine&& other) noexcept
    : config_(std::move(other.config_)), state_(std::move(other.state_)) {}

Engine Engine::open(const fs::path& config_file) {
    return from_config(WorkspaceConfig::read(config_file));
}

Engine Engine::from_config(WorkspaceConfig config) {
    auto state = std::make_shared<State>();
    state->time = config.time;
    state->warehouse.mode = config.mode;
    state->warehouse.time_dimension = config.time_dimension;
    auto guarded = [&](const fs::path& file, auto&& load) {
        const fs::path p = config.resolve(file);
        if (!fs::exists(p)) throw WorkspaceError("missing file " + p.string());
        try {
            load(p);
        } catch (const WorkspaceError&) {
            throw;
        } catch (const Error& e) {
            std::string msg = e.what();
            // LoadError messages already start with the file name.
            if (msg.rfind(p.string(), 0) != 0) msg = p.string() + ": " + msg;
            throw WorkspaceError(msg);
        }
    };
    for (const auto& l : config.layers) {
        guarded(l.file, [&](const fs::path& p) {
            state->layers.add_layer(load_layer_csv(l.name, l.kind, p, state->time));
        });
    }
    for (const auto& d : config.dimensions) {
        guarded(d.file, [&](const fs::path& p) {
            state->warehouse.add_dimension(load_dimension_csv(d.name, p, state->time));
        });
    }
    for (const auto& c : config.cubes) {
        guarded(c.file, [&](const fs::path& p) {
            state->warehouse.add_cube(load_cube_csv(c.name, c.dimensions, c.measures, p));
        });
    }
    for (const auto& m : config.mappings) {
        guarded(m.file, [&](const fs::path& p) {
            if (state->layers.find(m.layer) == nullptr) {
                throw WorkspaceError(p.string() + ": mapping refers to unknown layer '" +
                                     m.layer + "'");
            }
            state->warehouse.add_mapping(
                load_mapping_csv(m.dimension, m.level, m.layer, p, state->time));
        });
    }
    Engine engine(std::move(config), std::move(state));
    const auto problems = engine.check();
    if (!problems.empty()) {
        std::string msg = "workspace is inconsistent:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw WorkspaceError(msg);
    }
    return engine;
}

std::shared_ptr<const State> Engine::state() const {
    std::lock_guard lock(read_mutex_);
    return state_;
}

void Engine::publish(std::shared_ptr<const State> next) {
    std::lock_guard lock(read_mutex_);
    state_ = std::move(next);
}

QueryResult Engine::query(std::string_view text) const {
    const auto s = state();
    const ql::Query q = ql::parse(text);
    ql::validate(q, s->catalog());
    Executor exec(s->catalog());
    return exec.run(q);
}

std::string Engine::explain(std::string_view text) const {
    const auto s = state();
    const ql::Query q = ql::parse(text);
    ql::validate(q, s->catalog());
    return Executor(s->catalog()).explain(q);
}

std::string Engine::apply(const OpSpec& op) {
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<State>(*state());
    LayerStore& ls = next->layers;
    ChangeEvent ev;
    switch (op.kind) {
        case ChangeKind::Create: ev = ls.create_object(op.layer, op.stages.at(0), op.at); break;
        case ChangeKind::Split: ev = ls.split(op.layer, op.ids.at(0), op.at, op.stages); break;
        case ChangeKind::Merge: ev = ls.merge(op.layer, op.ids, op.at, op.stages.at(0)); break;
        case ChangeKind::Update: {
            std::optional<AttributeMap> attrs;
            if (!op.attributes.empty()) attrs = op.attributes;
            ev = ls.update_object(op.layer, op.ids.at(0), op.at, *op.geometry, attrs);
            break;
        }
        case ChangeKind::Delete: ev = ls.delete_object(op.layer, op.ids.at(0), op.at); break;
        case ChangeKind::Reincarnate: {
            std::optional<AttributeMap> attrs;
            if (!op.attributes.empty()) attrs = op.attributes;
            ev = ls.reincarnate(op.layer, op.ids.at(0), op.at, *op.geometry, attrs);
            break;
        }
    }
    next->warehouse.propagate(ev, op.rollup);
    publish(std::move(next));

    auto list = [](const std::vector<std::string>& ids) {
        std::string s;
        for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
        return s.empty() ? std::string("-") : s;
    };
    std::string out = std::string(name_of(ev.kind)) + " on " + ev.layer + " at " +
                      ev.at.to_string() + ": closed " + list(ev.removed) + "; opened " +
                      list(ev.added) + "\n";
    for (const auto& w : ev.warnings) out += "warning: " + w + "\n";
    return out;
}

void Engine::set_now(Instant::Tick tick) {
    if (tick < 0) throw InvariantError("the current tick must be non-negative");
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<State>(*state());
    next->time.current = tick;
    publish(std::move(next));
}

void Engine::save() const {
    const auto s = state();
    for (const auto& l : config_.layers) {
        save_layer_csv(s->layers.layer(l.name), config_.resolve(l.file));
    }
    for (const auto& d : config_.dimensions) {
        save_dimension_csv(s->warehouse.dimension(d.name), config_.resolve(d.file));
    }
    for (const auto& m : config_.mappings) {
        const AlphaMapping* mapping = s->warehouse.find_mapping(m.dimension, m.layer);
        if (mapping != nullptr) save_mapping_csv(*mapping, config_.resolve(m.file));
    }
}

std::string Engine::summary() const {
    const auto s = state();
    std::ostringstream out;
    out << "time: epoch " << s->time.epoch_text() << ", granularity "
        << (s->time.granularity == Granularity::Day ? "day" : "year") << ", Now = tick "
        << s->time.current << "\n";
    for (const auto& name : s->layers.layer_names()) {
        const Layer& l = s->layers.layer(name);
        out << "layer " << l.name() << " (" << kind_name(l.kind()) << "): " << l.stages().size()
            << " stages, " << l.object_ids().size() << " objects, lifespan ";
        const auto life = l.lifespan();
        if (life.empty()) out << "empty";
        for (std::size_t i = 0; i < life.size(); ++i) out << (i ? " " : "") << life[i].to_string();
        out << "\n";
    }
    for (const auto& d : s->warehouse.dimensions()) {
        out << "dimension " << d.name() << ": levels ";
        for (std::size_t i = 0; i < d.levels().size(); ++i) out << (i ? " < " : "") << d.levels()[i];
        out << "; " << d.members().size() << " member versions\n";
    }
    for (const auto& c : s->warehouse.cubes()) {
        out << "cube " << c.name << ": " << c.facts.size() << " facts over ";
        for (std::size_t i = 0; i < c.dimensions.size(); ++i) out << (i ? ", " : "") << c.dimensions[i];
        out << "; measures ";
        for (std::size_t i = 0; i < c.measures.size(); ++i) out << (i ? ", " : "") << c.measures[i];
        out << "\n";
    }
    for (const auto& m : s->warehouse.mappings()) {
        out << "mapping " << m.dimension << "." << m.level << " <-> " << m.layer << ": "
            << m.rows.size() << " rows\n";
    }
    return out.str();
}

std::vector<std::string> Engine::check() const {
    const auto s = state();
    std::vector<std::string> problems;
    for (const auto& d : s->warehouse.dimensions()) {
        for (auto& p : d.check()) problems.push_back("dimension " + d.name() + ": " + p);
    }
    for (auto& p : s->warehouse.check_alpha(s->layers)) problems.push_back(std::move(p));
    return problems;
}

}  // namespace tpiet
