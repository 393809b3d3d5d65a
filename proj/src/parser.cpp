#include "apf/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "apf/errors.hpp"

namespace apf {

namespace {

// Cursor over a single line; columns are 1-based for error messages.
class LineCursor {
public:
    LineCursor(std::string_view line, int line_number)
        : line_(line), line_number_(line_number) {}

    void skip_ws() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= line_.size();
    }

    int column() const { return static_cast<int>(pos_) + 1; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(line_number_, column(), msg);
    }

    void expect_char(char c, const std::string& what) {
        skip_ws();
        if (pos_ >= line_.size() || line_[pos_] != c) fail("expected '" + what + "'");
        ++pos_;
    }

    std::string word() {
        skip_ws();
        if (pos_ >= line_.size() || !is_word_start(line_[pos_])) fail("expected a word");
        std::size_t start = pos_;
        while (pos_ < line_.size() && is_word_char(line_[pos_])) ++pos_;
        return std::string(line_.substr(start, pos_ - start));
    }

    void keyword(const std::string& kw) {
        skip_ws();
        const int col = column();
        std::string w = word();
        if (w != kw) throw SyntaxError(line_number_, col, "expected '" + kw + "', got '" + w + "'");
    }

    Comparator comparator() {
        skip_ws();
        if (pos_ + 1 < line_.size() && line_[pos_ + 1] == '=') {
            const char c = line_[pos_];
            if (c == '>' || c == '<') {
                pos_ += 2;
                return c == '>' ? Comparator::GE : Comparator::LE;
            }
        }
        fail("expected '>=' or '<='");
    }

    double real(const std::string& what) {
        skip_ws();
        std::size_t start = pos_;
        std::size_t p = pos_;
        if (p < line_.size() && (line_[p] == '+' || line_[p] == '-')) ++p;
        std::size_t digits = 0;
        while (p < line_.size() && std::isdigit(static_cast<unsigned char>(line_[p]))) {
            ++p;
            ++digits;
        }
        if (p < line_.size() && line_[p] == '.') {
            ++p;
            while (p < line_.size() && std::isdigit(static_cast<unsigned char>(line_[p]))) {
                ++p;
                ++digits;
            }
        }
        if (digits == 0) fail("expected a number for " + what);
        if (p < line_.size() && (line_[p] == 'e' || line_[p] == 'E')) {
            std::size_t q = p + 1;
            if (q < line_.size() && (line_[q] == '+' || line_[q] == '-')) ++q;
            std::size_t exp_digits = 0;
            while (q < line_.size() && std::isdigit(static_cast<unsigned char>(line_[q]))) {
                ++q;
                ++exp_digits;
            }
            if (exp_digits > 0) p = q;
        }
        const std::string text(line_.substr(start, p - start));
        pos_ = p;
        return std::strtod(text.c_str(), nullptr);
    }

private:
    static bool is_word_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
    }
    static bool is_word_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
    }

    std::string_view line_;
    int line_number_;
    std::size_t pos_ = 0;
};

struct ParsedAgg {
    AggOp op;
    MetricId metric;
    Band band;
};

ParsedAgg parse_agg(LineCursor& cur, int line_number) {
    cur.skip_ws();
    const int op_col = cur.column();
    const std::string op_word = cur.word();
    AggOp op;
    if (op_word == "min") {
        op = AggOp::MIN;
    } else if (op_word == "max") {
        op = AggOp::MAX;
    } else if (op_word == "mean") {
        op = AggOp::MEAN;
    } else {
        throw SyntaxError(line_number, op_col,
                          "expected 'min', 'max' or 'mean', got '" + op_word + "'");
    }
    cur.expect_char('(', "(");
    cur.skip_ws();
    const int metric_col = cur.column();
    const std::string metric_name = cur.word();
    if (!is_metric_identifier(metric_name)) {
        throw SyntaxError(line_number, metric_col,
                          "'" + metric_name + "' is not a valid metric identifier");
    }
    cur.keyword("in");
    cur.expect_char('[', "[");
    const double lo = cur.real("band lower edge");
    cur.expect_char(',', ",");
    const double hi = cur.real("band upper edge");
    cur.expect_char(']', "]");
    cur.expect_char(')', ")");
    return ParsedAgg{op, MetricId{metric_name}, Band{lo, hi}};
}

Direction direction_from_word(const std::string& w, int line_number, int col) {
    if (w == "maximize") return Direction::MAXIMIZE;
    if (w == "minimize") return Direction::MINIMIZE;
    throw SyntaxError(line_number, col, "expected 'maximize' or 'minimize', got '" + w + "'");
}

}  // namespace

FormulationItem parse_item(std::string_view line, const std::string& name, int line_number) {
    LineCursor cur(line, line_number);
    cur.skip_ws();
    const int head_col = cur.column();
    const std::string head = cur.word();
    FormulationItem item;
    if (head == "objective") {
        cur.skip_ws();
        const int dir_col = cur.column();
        const Direction dir = direction_from_word(cur.word(), line_number, dir_col);
        const ParsedAgg agg = parse_agg(cur, line_number);
        item = make_objective(name, dir, agg.op, agg.metric, agg.band);
    } else if (head == "constraint") {
        const ParsedAgg agg = parse_agg(cur, line_number);
        const Comparator cmp = cur.comparator();
        const double threshold = cur.real("threshold");
        item = make_constraint(name, agg.op, agg.metric, agg.band, cmp, threshold);
    } else {
        throw SyntaxError(line_number, head_col,
                          "expected 'objective' or 'constraint', got '" + head + "'");
    }
    if (!cur.at_end()) cur.fail("unexpected trailing input");
    return item;
}

Formulation parse_formulation(std::string_view text, std::string id) {
    Formulation f;
    f.id = std::move(id);

    // First pass splits lines; second pass assigns positional names, which
    // requires knowing each line's kind before constructing items.
    struct Line {
        std::string_view body;
        int number;
    };
    std::vector<Line> lines;
    std::size_t start = 0;
    int number = 1;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view body = text.substr(start, end - start);
        bool blank = true;
        for (char c : body) {
            if (c != ' ' && c != '\t' && c != '\r') {
                blank = false;
                break;
            }
        }
        if (!blank) {
            if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
            lines.push_back(Line{body, number});
        }
        if (end == text.size()) break;
        start = end + 1;
        ++number;
    }

    std::vector<ItemKind> kinds;
    kinds.reserve(lines.size());
    for (const Line& ln : lines) {
        LineCursor cur(ln.body, ln.number);
        cur.skip_ws();
        const int col = cur.column();
        const std::string head = cur.word();
        if (head == "objective") {
            kinds.push_back(ItemKind::OBJECTIVE);
        } else if (head == "constraint") {
            kinds.push_back(ItemKind::CONSTRAINT);
        } else {
            throw SyntaxError(ln.number, col,
                              "expected 'objective' or 'constraint', got '" + head + "'");
        }
    }
    const auto names = canonical_item_names(kinds);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        f.items.push_back(parse_item(lines[i].body, names[i], lines[i].number));
    }
    f.validate();
    return f;
}

}  // namespace apf
