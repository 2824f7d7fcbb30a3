#include <tpiet/parser.hpp>

#include <tpiet/error.hpp>
#include <tpiet/text.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <set>

namespace tpiet::ql {

namespace {

constexpr std::array kKeywords = {
    "SELECT", "GIS", "CUBE", "SNAPSHOT", "CURRENT", "FROM", "OVERLAP", "WHERE", "AND",
    "OR",     "NOT", "IN",   "SLICE",    "ON",      "ROWS", "COLUMNS", "TRUE",  "FALSE",
};

bool is_keyword(std::string_view word) {
    for (const char* k : kKeywords) {
        if (iequals(k, word)) return true;
    }
    return false;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_blank();
            Token tok{TokenKind::End, "", line_, column_};
            if (pos_ >= text_.size()) {
                out.push_back(tok);
                return out;
            }
            char c = text_[pos_];
            if (ident_start(c)) {
                std::size_t start = pos_;
                while (pos_ < text_.size() && ident_char(text_[pos_])) advance();
                tok.kind = TokenKind::Identifier;
                tok.text = std::string(text_.substr(start, pos_ - start));
            } else if (digit(c)) {
                lex_number(tok);
            } else if (c == '"' || c == '\'') {
                lex_string(tok, c);
            } else if (c == '[') {
                lex_bracket(tok);
            } else {
                lex_punct(tok, c);
            }
            out.push_back(std::move(tok));
        }
    }

private:
    [[noreturn]] void fail(const std::string& message, std::size_t line, std::size_t column) {
        throw SyntaxError(message, line, column);
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    std::size_t digits_from(std::size_t p) const {
        std::size_t n = 0;
        while (p + n < text_.size() && digit(text_[p + n])) ++n;
        return n;
    }

    void lex_number(Token& tok) {
        std::size_t start = pos_;
        std::size_t n = digits_from(pos_);
        // a/b/yyyy
        if (pos_ + n < text_.size() && text_[pos_ + n] == '/') {
            std::size_t n2 = digits_from(pos_ + n + 1);
            std::size_t after2 = pos_ + n + 1 + n2;
            if (n2 == 0 || after2 >= text_.size() || text_[after2] != '/' ||
                digits_from(after2 + 1) == 0) {
                fail("malformed date literal", tok.line, tok.column);
            }
            std::size_t end = after2 + 1 + digits_from(after2 + 1);
            while (pos_ < end) advance();
            tok.kind = TokenKind::Date;
            tok.text = std::string(text_.substr(start, end - start));
            return;
        }
        for (std::size_t i = 0; i < n; ++i) advance();
        if (pos_ + 1 < text_.size() && text_[pos_] == '.' && digit(text_[pos_ + 1])) {
            advance();
            while (pos_ < text_.size() && digit(text_[pos_])) advance();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (digits_from(p) > 0) {
                while (pos_ < p) advance();
                while (pos_ < text_.size() && digit(text_[pos_])) advance();
            }
        }
        if (pos_ < text_.size() && ident_start(text_[pos_])) {
            fail("malformed number", tok.line, tok.column);
        }
        tok.kind = TokenKind::Number;
        tok.text = std::string(text_.substr(start, pos_ - start));
    }

    void lex_string(Token& tok, char quote) {
        advance();
        std::string value;
        while (true) {
            if (pos_ >= text_.size()) fail("unterminated string literal", tok.line, tok.column);
            char c = text_[pos_];
            if (c == quote) {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size()) fail("unterminated string literal", tok.line, tok.column);
                c = text_[pos_];
            }
            value.push_back(c);
            advance();
        }
        tok.kind = TokenKind::String;
        tok.text = std::move(value);
    }

    // `[text]` is a bracketed name unless it holds a comma, in which case it
    // opens an interval literal and its contents are lexed normally.
    void lex_bracket(Token& tok) {
        std::size_t close = text_.find(']', pos_ + 1);
        if (close == std::string_view::npos) fail("unterminated '['", tok.line, tok.column);
        std::string_view inner = text_.substr(pos_ + 1, close - pos_ - 1);
        if (inner.find(',') != std::string_view::npos) {
            advance();
            tok.kind = TokenKind::LBracket;
            tok.text = "[";
            return;
        }
        if (inner.find('\n') != std::string_view::npos) {
            fail("bracketed name spans lines", tok.line, tok.column);
        }
        if (inner.empty()) fail("empty bracketed name", tok.line, tok.column);
        while (pos_ <= close) advance();
        tok.kind = TokenKind::BracketName;
        tok.text = std::string(inner);
    }

    void lex_punct(Token& tok, char c) {
        auto next = [&] { return pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0'; };
        auto single = [&](TokenKind kind) {
            tok.kind = kind;
            tok.text = std::string(1, c);
            advance();
        };
        switch (c) {
            case '(': return single(TokenKind::LParen);
            case ')': return single(TokenKind::RParen);
            case ']': return single(TokenKind::RBracket);
            case ',': return single(TokenKind::Comma);
            case '.': return single(TokenKind::Dot);
            case ';': return single(TokenKind::Semicolon);
            case '-': return single(TokenKind::Minus);
            case '=': return single(TokenKind::Op);
            case '<':
            case '>':
            case '!': {
                char n = next();
                std::string op(1, c);
                if (n == '=' || (c == '<' && n == '>')) op.push_back(n);
                if (op == "!") fail("illegal character '!'", tok.line, tok.column);
                tok.kind = TokenKind::Op;
                tok.text = op;
                for (std::size_t i = 0; i < op.size(); ++i) advance();
                return;
            }
            default: {
                std::string shown = std::isprint(static_cast<unsigned char>(c))
                                        ? std::string(1, c)
                                        : "\\x" + std::to_string(static_cast<unsigned char>(c));
                fail("illegal character '" + shown + "'", tok.line, tok.column);
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

std::string describe(const Token& tok) {
    switch (tok.kind) {
        case TokenKind::End: return "end of input";
        case TokenKind::String: return "string \"" + tok.text + "\"";
        case TokenKind::BracketName: return "[" + tok.text + "]";
        default: return "'" + tok.text + "'";
    }
}

CmpOp cmp_of(const std::string& text) {
    if (text == "=") return CmpOp::Eq;
    if (text == "<>" || text == "!=") return CmpOp::Ne;
    if (text == "<") return CmpOp::Lt;
    if (text == "<=") return CmpOp::Le;
    if (text == ">") return CmpOp::Gt;
    return CmpOp::Ge;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Query run() {
        Query q = parse_query(false);
        accept(TokenKind::Semicolon);
        if (peek().kind != TokenKind::End) fail_expected("end of query");
        return q;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(idx_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    const Token& take() {
        const Token& t = toks_[idx_];
        if (idx_ + 1 < toks_.size()) ++idx_;
        return t;
    }
    static SourcePos pos_of(const Token& t) { return {t.line, t.column}; }

    [[noreturn]] void fail_at(const Token& t, const std::string& message) {
        throw SyntaxError(message, t.line, t.column);
    }
    [[noreturn]] void fail_expected(const std::string& what) {
        fail_at(peek(), "expected " + what + ", found " + describe(peek()));
    }

    bool at_keyword(std::string_view kw, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == TokenKind::Identifier && iequals(t.text, kw);
    }
    bool accept_keyword(std::string_view kw) {
        if (!at_keyword(kw)) return false;
        take();
        return true;
    }
    const Token& expect_keyword(std::string_view kw) {
        if (!at_keyword(kw)) fail_expected(std::string(kw));
        return take();
    }
    bool accept(TokenKind kind) {
        if (peek().kind != kind) return false;
        take();
        return true;
    }
    const Token& expect(TokenKind kind, const std::string& what) {
        if (peek().kind != kind) fail_expected(what);
        return take();
    }
    std::string expect_name(const std::string& what) {
        const Token& t = peek();
        if (t.kind != TokenKind::Identifier || is_keyword(t.text)) fail_expected(what);
        return take().text;
    }

    Query parse_query(bool nested) {
        const Token& select = expect_keyword("SELECT");
        if (accept_keyword("GIS")) return parse_gis(nested, select);
        if (accept_keyword("CUBE")) return parse_cube(nested, select);
        fail_expected("GIS or CUBE");
    }

    // ---- GIS ---------------------------------------------------------------

    GisQuery parse_gis(bool nested, const Token& start) {
        GisQuery q;
        q.pos = pos_of(start);
        while (at_keyword("SNAPSHOT") || at_keyword("CURRENT")) {
            const Token& t = take();
            Modifier m = iequals(t.text, "SNAPSHOT") ? Modifier::Snapshot : Modifier::Current;
            if (q.modifier != Modifier::None) {
                fail_at(t, "SNAPSHOT and CURRENT are mutually exclusive");
            }
            q.modifier = m;
        }
        do {
            q.projection.push_back(parse_attr_ref());
        } while (accept(TokenKind::Comma));

        expect_keyword("FROM");
        q.overlap = accept_keyword("OVERLAP");
        std::set<std::string> aliases;
        do {
            Source s;
            const Token& layer = peek();
            s.pos = pos_of(layer);
            s.layer = expect_name("layer name");
            const Token& alias_tok = peek();
            s.alias = expect_name("alias for layer " + s.layer);
            if (!aliases.insert(s.alias).second) {
                fail_at(alias_tok, "duplicate alias '" + s.alias + "'");
            }
            q.sources.push_back(std::move(s));
        } while (accept(TokenKind::Comma));

        if (accept_keyword("WHERE")) q.where = parse_or(nested);
        check_aliases(q, aliases);
        return q;
    }

    AttrRef parse_attr_ref() {
        AttrRef r;
        r.pos = pos_of(peek());
        r.alias = expect_name("alias");
        if (peek().kind == TokenKind::Dot) {
            take();
            r.attribute = expect_name("attribute name");
        }
        return r;
    }

    Condition parse_or(bool nested) {
        Condition first = parse_and(nested);
        if (!at_keyword("OR")) return first;
        OrNode node;
        node.terms.push_back(std::move(first));
        while (accept_keyword("OR")) node.terms.push_back(parse_and(nested));
        return Condition{std::move(node)};
    }

    Condition parse_and(bool nested) {
        Condition first = parse_unary(nested);
        if (!at_keyword("AND")) return first;
        AndNode node;
        node.terms.push_back(std::move(first));
        while (accept_keyword("AND")) node.terms.push_back(parse_unary(nested));
        return Condition{std::move(node)};
    }

    Condition parse_unary(bool nested) {
        if (accept_keyword("NOT")) return Condition{NotNode{Box<Condition>(parse_unary(nested))}};
        if (accept(TokenKind::LParen)) {
            Condition inner = parse_or(nested);
            expect(TokenKind::RParen, "')'");
            return inner;
        }
        return parse_atom(nested);
    }

    Condition parse_atom(bool nested) {
        const Token& t = peek();
        SourcePos pos = pos_of(t);
        if (at_keyword("TRUE") || at_keyword("FALSE")) {
            bool v = iequals(take().text, "TRUE");
            return Condition{BoolAtom{v}};
        }
        if (t.kind == TokenKind::Identifier && peek(1).kind == TokenKind::LParen) {
            if (auto sp = spatial_predicate_from_name(t.text)) {
                take();
                take();
                SpatialAtom a;
                a.predicate = *sp;
                a.pos = pos;
                a.left = parse_expr();
                expect(TokenKind::Comma, "','");
                a.right = parse_expr();
                expect(TokenKind::RParen, "')'");
                return Condition{std::move(a)};
            }
            if (auto tp = temporal_predicate_from_name(t.text)) {
                take();
                take();
                TemporalAtom a;
                a.predicate = *tp;
                a.pos = pos;
                a.alias = expect_name("alias");
                expect(TokenKind::Comma, "','");
                a.arg = parse_temporal_arg();
                expect(TokenKind::RParen, "')'");
                return Condition{std::move(a)};
            }
        }

        Expr lhs = parse_expr();
        if (at_keyword("IN")) {
            const Token& in_tok = take();
            auto* ref = std::get_if<AttrRef>(&lhs.node);
            if (!ref) fail_at(in_tok, "IN requires an alias or alias.id on its left");
            InAtom a;
            a.subject = *ref;
            a.pos = pos;
            expect(TokenKind::LParen, "'('");
            if (at_keyword("SELECT")) {
                const Token& select = peek();
                if (nested) fail_at(select, "IN subqueries nest at most one level");
                take();
                if (!accept_keyword("CUBE")) fail_expected("CUBE subquery");
                CubeQuery sub = parse_cube(true, select);
                expect(TokenKind::RParen, "')'");
                // A SLICE written after the closing parenthesis belongs to the subquery.
                if (!sub.slice && at_keyword("SLICE")) {
                    take();
                    sub.slice = parse_member_path();
                }
                a.source = Box<CubeQuery>(std::move(sub));
            } else {
                std::vector<std::string> ids;
                if (peek().kind != TokenKind::RParen) {
                    do {
                        ids.push_back(expect(TokenKind::String, "string id or SELECT").text);
                    } while (accept(TokenKind::Comma));
                }
                expect(TokenKind::RParen, "')'");
                a.source = std::move(ids);
            }
            return Condition{std::move(a)};
        }
        if (peek().kind != TokenKind::Op) fail_expected("comparison operator or IN");
        CompareAtom c;
        c.pos = pos;
        c.lhs = std::move(lhs);
        c.op = cmp_of(take().text);
        c.rhs = parse_expr();
        return Condition{std::move(c)};
    }

    Expr parse_expr() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Number:
                return Expr{NumberLit{parse_number(take())}};
            case TokenKind::Minus: {
                take();
                const Token& n = expect(TokenKind::Number, "number after '-'");
                return Expr{NumberLit{-parse_number(n)}};
            }
            case TokenKind::String:
                return Expr{StringLit{take().text}};
            case TokenKind::Identifier:
                if (peek(1).kind == TokenKind::LParen) {
                    auto fn = function_from_name(t.text);
                    if (!fn) fail_at(t, "unknown function '" + t.text + "'");
                    FuncCall call;
                    call.function = *fn;
                    call.pos = pos_of(t);
                    take();
                    take();
                    if (peek().kind != TokenKind::RParen) {
                        do {
                            call.args.push_back(parse_expr());
                        } while (accept(TokenKind::Comma));
                    }
                    expect(TokenKind::RParen, "')'");
                    return Expr{std::move(call)};
                }
                return Expr{parse_attr_ref()};
            default:
                fail_expected("expression");
        }
    }

    double parse_number(const Token& t) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
            fail_at(t, "number out of range");
        }
        return v;
    }

    TemporalArg parse_temporal_arg() {
        if (peek().kind == TokenKind::LBracket) {
            IntervalLiteral iv;
            iv.pos = pos_of(take());
            iv.from = parse_time_literal();
            expect(TokenKind::Comma, "','");
            iv.to = parse_time_literal();
            expect(TokenKind::RBracket, "']'");
            return iv;
        }
        return parse_time_literal();
    }

    TimeLiteral parse_time_literal() {
        const Token& t = peek();
        TimeLiteral lit;
        lit.pos = pos_of(t);
        if (t.kind == TokenKind::Number) {
            if (t.text.find_first_not_of("0123456789") != std::string::npos) {
                fail_at(t, "time literal must be an integer tick");
            }
            lit.kind = t.text.size() == 4 ? TimeLiteral::Kind::Year : TimeLiteral::Kind::Tick;
        } else if (t.kind == TokenKind::Date) {
            lit.kind = TimeLiteral::Kind::Date;
        } else if (t.kind == TokenKind::Identifier && iequals(t.text, "Now")) {
            lit.kind = TimeLiteral::Kind::Now;
        } else {
            fail_expected("time literal (tick, date or Now)");
        }
        lit.text = lit.kind == TimeLiteral::Kind::Now ? "Now" : t.text;
        take();
        return lit;
    }

    // Every alias mentioned in the projection or condition must be declared.
    void check_aliases(const GisQuery& q, const std::set<std::string>& aliases) {
        auto check = [&](const std::string& alias, const SourcePos& pos) {
            if (!aliases.contains(alias)) {
                throw SyntaxError("undeclared alias '" + alias + "'", pos.line, pos.column);
            }
        };
        for (const auto& r : q.projection) check(r.alias, r.pos);
        if (q.where) check_condition(*q.where, check);
    }

    template <class F>
    static void check_expr(const Expr& e, const F& check) {
        if (auto* r = std::get_if<AttrRef>(&e.node)) check(r->alias, r->pos);
        if (auto* c = std::get_if<FuncCall>(&e.node)) {
            for (const auto& a : c->args) check_expr(a, check);
        }
    }

    template <class F>
    static void check_condition(const Condition& c, const F& check) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, SpatialAtom>) {
                    check_expr(n.left, check);
                    check_expr(n.right, check);
                } else if constexpr (std::is_same_v<T, TemporalAtom>) {
                    check(n.alias, n.pos);
                } else if constexpr (std::is_same_v<T, CompareAtom>) {
                    check_expr(n.lhs, check);
                    check_expr(n.rhs, check);
                } else if constexpr (std::is_same_v<T, InAtom>) {
                    check(n.subject.alias, n.subject.pos);
                } else if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>) {
                    for (const auto& t : n.terms) check_condition(t, check);
                } else if constexpr (std::is_same_v<T, NotNode>) {
                    check_condition(*n.inner, check);
                }
            },
            c.node);
    }

    // ---- CUBE --------------------------------------------------------------

    CubeQuery parse_cube(bool nested, const Token& start) {
        CubeQuery q;
        q.pos = pos_of(start);
        if (at_keyword("filter") && peek(1).kind == TokenKind::LParen) {
            take();
            take();
            FilterSelect f;
            f.level = parse_member_path();
            if (!f.level.members) fail_expected("'.Members' after the filtered level");
            expect(TokenKind::Comma, "','");
            f.measure = parse_member_path();
            f.op = cmp_of(expect(TokenKind::Op, "comparison operator").text);
            bool negative = accept(TokenKind::Minus);
            double v = parse_number(expect(TokenKind::Number, "number"));
            f.threshold = negative ? -v : v;
            expect(TokenKind::RParen, "')'");
            q.select = std::move(f);
        } else {
            TabularSelect t;
            do {
                t.items.push_back(parse_member_path());
            } while (accept(TokenKind::Comma));
            if (accept_keyword("ON")) {
                if (accept_keyword("ROWS")) {
                    t.axis = Axis::Rows;
                } else if (accept_keyword("COLUMNS")) {
                    t.axis = Axis::Columns;
                } else {
                    fail_expected("ROWS or COLUMNS");
                }
            }
            q.select = std::move(t);
        }
        expect_keyword("FROM");
        q.cube = expect(TokenKind::BracketName, "[cube name]").text;
        if (accept_keyword("WHERE")) {
            do {
                SlicerAtom s;
                s.path = parse_member_path();
                if (at_keyword("IN")) {
                    take();
                    expect(TokenKind::LParen, "'('");
                    const Token& select = peek();
                    if (nested) fail_at(select, "IN subqueries nest at most one level");
                    expect_keyword("SELECT");
                    if (!accept_keyword("GIS")) fail_expected("GIS subquery");
                    s.in = Box<GisQuery>(parse_gis(true, select));
                    expect(TokenKind::RParen, "')'");
                }
                q.where.push_back(std::move(s));
            } while (accept_keyword("AND"));
        }
        if (accept_keyword("SLICE")) q.slice = parse_member_path();
        return q;
    }

    MemberPath parse_member_path() {
        MemberPath p;
        p.pos = pos_of(peek());
        auto segment = [&] {
            const Token& t = peek();
            if (t.kind == TokenKind::BracketName ||
                (t.kind == TokenKind::Identifier && !is_keyword(t.text))) {
                p.parts.push_back(take().text);
            } else {
                fail_expected("member path segment");
            }
        };
        segment();
        while (peek().kind == TokenKind::Dot) {
            take();
            if (peek().kind == TokenKind::Identifier && iequals(peek().text, "Members")) {
                take();
                p.members = true;
                break;
            }
            segment();
        }
        return p;
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

Query parse(std::string_view text) { return Parser(tokenize(text)).run(); }

}  // namespace tpiet::ql
