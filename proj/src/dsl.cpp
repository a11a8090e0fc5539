#include "switchkit/dsl.hpp"

#include <cctype>
#include <map>
#include <stdexcept>

namespace switchkit {

namespace {

class Parser {
public:
    Parser(std::string_view text, int nodes) : text_(text), nodes_(nodes) {}

    SwitchingDistribution parse_all() {
        SwitchingDistribution d = parse_dist();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters");
        return d;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("distribution spec: " + what + " at position " + std::to_string(pos_) +
                                    " in '" + std::string(text_) + "'");
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string identifier() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (start == pos_) fail("expected identifier");
        return std::string(text_.substr(start, pos_ - start));
    }

    double number() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ')' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        const std::string token(text_.substr(start, pos_ - start));
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(token, &used);
        } catch (const std::exception&) {
            fail("expected number");
        }
        if (used != token.size()) fail("malformed number '" + token + "'");
        return value;
    }

    // key=value pairs, where a value is either a number or (for `divisor`) a nested spec.
    void arguments(std::map<std::string, double>& numbers, std::optional<SwitchingDistribution>& divisor) {
        expect('(');
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ')') {
            ++pos_;
            return;
        }
        for (;;) {
            const std::string key = identifier();
            expect('=');
            if (key == "divisor") {
                divisor = parse_dist();
            } else {
                if (numbers.count(key)) fail("duplicate argument '" + key + "'");
                numbers[key] = number();
            }
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == ',') {
                ++pos_;
                continue;
            }
            expect(')');
            return;
        }
    }

    static double take(std::map<std::string, double>& args, const std::string& key, const std::string& family) {
        auto it = args.find(key);
        if (it == args.end()) throw std::invalid_argument(family + ": missing argument '" + key + "'");
        const double v = it->second;
        args.erase(it);
        return v;
    }

    SwitchingDistribution parse_dist() {
        const std::string name = identifier();
        if (name == "table") {
            expect('(');
            skip_ws();
            const std::size_t start = pos_;
            int depth = 0;
            while (pos_ < text_.size() && !(text_[pos_] == ')' && depth == 0)) {
                if (text_[pos_] == '(') ++depth;
                if (text_[pos_] == ')') --depth;
                ++pos_;
            }
            if (pos_ >= text_.size()) fail("unterminated table(...)");
            std::string path(text_.substr(start, pos_ - start));
            while (!path.empty() && std::isspace(static_cast<unsigned char>(path.back()))) path.pop_back();
            ++pos_;
            if (path.empty()) fail("table(...) needs a path");
            return make_tabulated(read_csv_file(path));
        }
        std::map<std::string, double> args;
        std::optional<SwitchingDistribution> divisor;
        arguments(args, divisor);
        SwitchingDistribution out = [&] {
            if (name == "exp") {
                if (divisor) fail("exp takes no divisor");
                return make_exponential(take(args, "rate", name));
            }
            if (name == "gamma") {
                if (divisor) fail("gamma takes no divisor");
                const double shape = take(args, "shape", name);
                return make_gamma(shape, take(args, "scale", name));
            }
            if (name == "compound") {
                if (!divisor) throw std::invalid_argument("compound: missing argument 'divisor'");
                return make_geometric_compound(*divisor, take(args, "r", name), nodes_).distribution();
            }
            fail("unknown distribution '" + name + "'");
        }();
        if (!args.empty()) throw std::invalid_argument(name + ": unknown argument '" + args.begin()->first + "'");
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int nodes_;
};

}  // namespace

SwitchingDistribution parse_distribution(std::string_view spec, int talbot_nodes) {
    return Parser(spec, talbot_nodes).parse_all();
}

}  // namespace switchkit
