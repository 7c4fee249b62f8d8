#ifndef QMEM_CLI_CONFIG_HPP
#define QMEM_CLI_CONFIG_HPP

#include <charconv>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <qmem/numcore/error.hpp>

namespace qmem::cli {

/**
 * Scenario files use a small TOML subset: [section] headers, key = value
 * lines, # comments. Values are numbers, booleans, "strings" and single-line
 * arrays of numbers or strings. Keys are read through ConfigSection, which
 * records what was consumed; finish() rejects anything left unread.
 */
using ConfigValue = std::variant<double, bool, std::string, std::vector<double>,
                                 std::vector<std::string>>;

struct ConfigEntry {
    ConfigValue value;
    int line = 0;
};

class ConfigSection {
public:
    explicit ConfigSection(std::string name = {}) : m_name(std::move(name)) {}

    const std::string &name() const { return m_name; }

    void insert(const std::string &key, ConfigEntry e)
    {
        if (!m_entries.emplace(key, std::move(e)).second) {
            fail(key, "duplicate key");
        }
    }

    bool has(const std::string &key) const { return m_entries.count(key) > 0; }

    double number(const std::string &key, double def) const
    {
        return has(key) ? number(key) : def;
    }

    double number(const std::string &key) const
    {
        const auto &v = get(key);
        if (const auto *d = std::get_if<double>(&v.value)) {
            return *d;
        }
        fail(key, "expected a number");
    }

    std::size_t count(const std::string &key, std::size_t def) const
    {
        if (!has(key)) {
            return def;
        }
        double v = number(key);
        if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            fail(key, "expected a non-negative integer");
        }
        return static_cast<std::size_t>(v);
    }

    bool flag(const std::string &key, bool def) const
    {
        if (!has(key)) {
            return def;
        }
        const auto &v = get(key);
        if (const auto *b = std::get_if<bool>(&v.value)) {
            return *b;
        }
        fail(key, "expected true or false");
    }

    std::string text(const std::string &key, const std::string &def) const
    {
        return has(key) ? text(key) : def;
    }

    std::string text(const std::string &key) const
    {
        const auto &v = get(key);
        if (const auto *s = std::get_if<std::string>(&v.value)) {
            return *s;
        }
        fail(key, "expected a string");
    }

    std::vector<double> numbers(const std::string &key,
                                const std::vector<double> &def) const
    {
        if (!has(key)) {
            return def;
        }
        const auto &v = get(key);
        if (const auto *a = std::get_if<std::vector<double>>(&v.value)) {
            return *a;
        }
        fail(key, "expected an array of numbers");
    }

    std::vector<std::string> texts(const std::string &key,
                                   const std::vector<std::string> &def) const
    {
        if (!has(key)) {
            return def;
        }
        const auto &v = get(key);
        if (const auto *a = std::get_if<std::vector<std::string>>(&v.value)) {
            return *a;
        }
        fail(key, "expected an array of strings");
    }

    /* throws on the first key that was never read */
    void finish() const
    {
        for (const auto &[k, e] : m_entries) {
            if (!m_used.count(k)) {
                fail(k, "unknown key");
            }
        }
    }

private:
    const ConfigEntry &get(const std::string &key) const
    {
        auto it = m_entries.find(key);
        if (it == m_entries.end()) {
            fail(key, "missing required key");
        }
        m_used.insert(key);
        return it->second;
    }

    [[noreturn]] void fail(const std::string &key, const std::string &what) const
    {
        std::string where = m_name.empty() ? key : m_name + "." + key;
        auto it = m_entries.find(key);
        if (it != m_entries.end()) {
            where += " (line " + std::to_string(it->second.line) + ")";
        }
        throw Error(ErrorKind::Validation, "config: " + where + ": " + what);
    }

    std::string m_name;
    std::map<std::string, ConfigEntry> m_entries;
    mutable std::set<std::string> m_used;
};

class ConfigFile {
public:
    static ConfigFile parse(const std::string &text)
    {
        ConfigFile f;
        std::string current;
        f.m_sections.emplace("", ConfigSection(""));
        std::size_t pos = 0;
        int lineno = 0;
        while (pos <= text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string::npos) {
                nl = text.size();
            }
            std::string line = text.substr(pos, nl - pos);
            pos = nl + 1;
            ++lineno;
            line = trim(strip_comment(line));
            if (line.empty()) {
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']') {
                    bad(lineno, "malformed section header");
                }
                current = trim(line.substr(1, line.size() - 2));
                if (!valid_name(current)) {
                    bad(lineno, "invalid section name");
                }
                if (!f.m_sections.emplace(current, ConfigSection(current)).second) {
                    bad(lineno, "duplicate section [" + current + "]");
                }
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) {
                bad(lineno, "expected key = value");
            }
            std::string key = trim(line.substr(0, eq));
            if (!valid_name(key)) {
                bad(lineno, "invalid key '" + key + "'");
            }
            auto value = parse_value(trim(line.substr(eq + 1)), lineno);
            f.m_sections.at(current).insert(key, {std::move(value), lineno});
        }
        return f;
    }

    bool has_section(const std::string &name) const
    {
        return m_sections.count(name) > 0;
    }

    const ConfigSection &section(const std::string &name) const
    {
        auto it = m_sections.find(name);
        if (it == m_sections.end()) {
            throw Error(ErrorKind::Validation,
                        "config: missing section [" + name + "]");
        }
        m_used.insert(name);
        return it->second;
    }

    /* top-level keys */
    const ConfigSection &root() const { return section(""); }

    void finish() const
    {
        for (const auto &[name, sec] : m_sections) {
            if (!m_used.count(name) && !name.empty()) {
                throw Error(ErrorKind::Validation,
                            "config: unknown section [" + name + "]");
            }
            sec.finish();
        }
    }

private:
    static std::string strip_comment(const std::string &s)
    {
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) {
                quoted = !quoted;
            } else if (s[i] == '#' && !quoted) {
                return s.substr(0, i);
            }
        }
        return s;
    }

    static std::string trim(const std::string &s)
    {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            return {};
        }
        auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static bool valid_name(const std::string &s)
    {
        if (s.empty()) {
            return false;
        }
        for (char c : s) {
            if (!(std::islower(static_cast<unsigned char>(c)) ||
                  std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
                return false;
            }
        }
        return !std::isdigit(static_cast<unsigned char>(s[0]));
    }

    [[noreturn]] static void bad(int line, const std::string &what)
    {
        throw Error(ErrorKind::Validation,
                    "config line " + std::to_string(line) + ": " + what);
    }

    static bool parse_number(const std::string &s, double &out)
    {
        if (s.empty()) {
            return false;
        }
        const char *b = s.data();
        const char *e = b + s.size();
        if (*b == '+') {
            ++b;
        }
        auto r = std::from_chars(b, e, out);
        return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
    }

    static std::string parse_string(const std::string &s, int line)
    {
        if (s.size() < 2 || s.front() != '"' || s.back() != '"') {
            bad(line, "malformed string");
        }
        std::string out;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] == '\\' && i + 2 < s.size()) {
                ++i;
            } else if (s[i] == '"') {
                bad(line, "unescaped quote in string");
            }
            out.push_back(s[i]);
        }
        return out;
    }

    static std::vector<std::string> split_items(const std::string &s, int line)
    {
        std::vector<std::string> items;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            char c = s[i];
            if (c == '"' && (i == 0 || s[i - 1] != '\\')) {
                quoted = !quoted;
            }
            if (c == ',' && !quoted) {
                items.push_back(trim(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (quoted) {
            bad(line, "unterminated string in array");
        }
        if (!trim(cur).empty()) {
            items.push_back(trim(cur));
        }
        for (const auto &it : items) {
            if (it.empty()) {
                bad(line, "empty array element");
            }
        }
        return items;
    }

    static ConfigValue parse_value(const std::string &s, int line)
    {
        if (s.empty()) {
            bad(line, "missing value");
        }
        if (s == "true" || s == "false") {
            return s == "true";
        }
        if (s.front() == '"') {
            return parse_string(s, line);
        }
        if (s.front() == '[') {
            if (s.back() != ']') {
                bad(line, "arrays must close on the same line");
            }
            auto items = split_items(s.substr(1, s.size() - 2), line);
            if (!items.empty() && items.front().front() == '"') {
                std::vector<std::string> out;
                for (const auto &it : items) {
                    out.push_back(parse_string(it, line));
                }
                return out;
            }
            std::vector<double> out;
            for (const auto &it : items) {
                double v;
                if (!parse_number(it, v)) {
                    bad(line, "bad number '" + it + "' in array");
                }
                out.push_back(v);
            }
            return out;
        }
        double v;
        if (!parse_number(s, v)) {
            bad(line, "cannot parse value '" + s + "'");
        }
        return v;
    }

    std::map<std::string, ConfigSection> m_sections;
    mutable std::set<std::string> m_used;
};

} // namespace qmem::cli

#endif
