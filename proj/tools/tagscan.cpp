// Minimal tag extractor speaking the universal-ctags JSON lines protocol.
// Covers the languages exercised by this toolkit (C, C++, Java, JavaScript,
// Python, R); anything else yields no tags. Intended as a drop-in for the
// MSR_CTAGS_BIN hook where a full ctags build is unavailable.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Tag {
    std::string name;
    std::string kind;
    int line = 0;
    int end = 0;
};

std::string language_of(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos)
        return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == "c" || ext == "h")
        return "C";
    if (ext == "cc" || ext == "cpp" || ext == "cxx" || ext == "hpp" || ext == "hh" ||
        ext == "ccp")
        return "C++";
    if (ext == "java")
        return "Java";
    if (ext == "js" || ext == "mjs")
        return "JavaScript";
    if (ext == "py")
        return "Python";
    if (ext == "r")
        return "R";
    return "";
}

std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

// end line of a brace-delimited body whose opening line is `start` (0-based)
int brace_end(const std::vector<std::string>& lines, size_t start) {
    int depth = 0;
    bool seen_open = false;
    for (size_t i = start; i < lines.size(); ++i) {
        for (char c : lines[i]) {
            if (c == '{') {
                ++depth;
                seen_open = true;
            } else if (c == '}') {
                --depth;
                if (seen_open && depth == 0)
                    return static_cast<int>(i) + 1;
            }
        }
        if (!seen_open && lines[i].find(';') != std::string::npos)
            return static_cast<int>(start) + 1; // declaration, not definition
    }
    return static_cast<int>(lines.size());
}

bool is_keyword(const std::string& w) {
    static const char* kw[] = {"if", "while", "for", "switch", "return", "else",
                               "do", "sizeof", "catch", "new"};
    for (const char* k : kw)
        if (w == k)
            return true;
    return false;
}

std::vector<Tag> scan_c_like(const std::vector<std::string>& lines, bool cxx, bool java) {
    std::vector<Tag> tags;
    static const std::regex func_re(
        R"(^[A-Za-z_][A-Za-z0-9_:<>,\s\*&\[\]]*?\b([A-Za-z_~][A-Za-z0-9_]*)\s*\([^;]*$|^[A-Za-z_][A-Za-z0-9_:<>,\s\*&\[\]]*?\b([A-Za-z_~][A-Za-z0-9_]*)\s*\(.*\)\s*\{?\s*$)");
    static const std::regex class_re(R"(^\s*(?:typedef\s+)?(class|struct)\s+([A-Za-z_][A-Za-z0-9_]*))");
    static const std::regex define_re(R"(^\s*#\s*define\s+([A-Za-z_][A-Za-z0-9_]*))");
    static const std::regex method_re(
        R"(^\s+(?:public|private|protected|static|final|abstract|synchronized|\s)*[A-Za-z_][A-Za-z0-9_<>,\.\[\]\s]*\s([A-Za-z_][A-Za-z0-9_]*)\s*\([^;]*\)\s*(?:throws [^{]*)?\{)");

    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        std::smatch m;
        if (std::regex_search(line, m, define_re)) {
            if (!java)
                tags.push_back({m[1].str(), "macro", static_cast<int>(i) + 1,
                                static_cast<int>(i) + 1});
            continue;
        }
        if (std::regex_search(line, m, class_re) && (cxx || java)) {
            tags.push_back({m[2].str(), m[1].str() == "struct" ? "struct" : "class",
                            static_cast<int>(i) + 1, brace_end(lines, i)});
            continue;
        }
        if (java) {
            if (std::regex_search(line, m, method_re) && !is_keyword(m[1].str()))
                tags.push_back({m[1].str(), "method", static_cast<int>(i) + 1,
                                brace_end(lines, i)});
            continue;
        }
        // C/C++ function definitions start at column 0
        if (line.empty() || std::isspace(static_cast<unsigned char>(line[0])))
            continue;
        if (line[0] == '#' || line[0] == '}' || line[0] == '{')
            continue;
        static const std::regex cfunc_re(
            R"(^(?:[A-Za-z_][A-Za-z0-9_]*[\s\*&]+)+([A-Za-z_~][A-Za-z0-9_:]*)\s*\()");
        if (std::regex_search(line, m, cfunc_re) && !is_keyword(m[1].str())) {
            // a definition opens a brace before any semicolon
            size_t j = i;
            bool has_brace = false;
            while (j < lines.size()) {
                auto brace = lines[j].find('{');
                auto semi = lines[j].find(';');
                if (brace != std::string::npos && (semi == std::string::npos || brace < semi)) {
                    has_brace = true;
                    break;
                }
                if (semi != std::string::npos)
                    break;
                ++j;
            }
            if (has_brace) {
                std::string name = m[1].str();
                auto colons = name.rfind("::");
                if (colons != std::string::npos)
                    name = name.substr(colons + 2);
                tags.push_back({name, "function", static_cast<int>(i) + 1, brace_end(lines, i)});
            }
        }
    }
    return tags;
}

std::vector<Tag> scan_python(const std::vector<std::string>& lines) {
    std::vector<Tag> tags;
    static const std::regex def_re(R"(^(\s*)(def|class)\s+([A-Za-z_][A-Za-z0-9_]*))");
    struct Open {
        size_t tag_idx;
        size_t indent;
    };
    std::vector<Open> stack;
    for (size_t i = 0; i < lines.size(); ++i) {
        std::smatch m;
        if (!std::regex_search(lines[i], m, def_re)) {
            if (!lines[i].empty() &&
                lines[i].find_first_not_of(" \t") != std::string::npos) {
                size_t indent = lines[i].find_first_not_of(" \t");
                while (!stack.empty() && indent <= stack.back().indent) {
                    // close at the last non-blank line before this one
                    size_t e = i;
                    while (e > 0 && lines[e - 1].find_first_not_of(" \t") == std::string::npos)
                        --e;
                    tags[stack.back().tag_idx].end = static_cast<int>(e);
                    stack.pop_back();
                }
            }
            continue;
        }
        size_t indent = m[1].str().size();
        while (!stack.empty() && indent <= stack.back().indent) {
            size_t e = i;
            while (e > 0 && lines[e - 1].find_first_not_of(" \t") == std::string::npos)
                --e;
            tags[stack.back().tag_idx].end = static_cast<int>(e);
            stack.pop_back();
        }
        std::string kind = m[2].str() == "def" ? (stack.empty() ? "function" : "member") : "class";
        tags.push_back({m[3].str(), kind, static_cast<int>(i) + 1,
                        static_cast<int>(lines.size())});
        stack.push_back({tags.size() - 1, indent});
    }
    size_t e = lines.size();
    while (e > 0 && lines[e - 1].find_first_not_of(" \t") == std::string::npos)
        --e;
    for (const auto& o : stack)
        tags[o.tag_idx].end = static_cast<int>(e);
    return tags;
}

std::vector<Tag> scan_js(const std::vector<std::string>& lines) {
    std::vector<Tag> tags;
    static const std::regex fn_re(
        R"(^\s*(?:export\s+)?(?:async\s+)?function\s+([A-Za-z_$][A-Za-z0-9_$]*)\s*\()");
    static const std::regex class_re(R"(^\s*(?:export\s+)?class\s+([A-Za-z_$][A-Za-z0-9_$]*))");
    for (size_t i = 0; i < lines.size(); ++i) {
        std::smatch m;
        if (std::regex_search(lines[i], m, fn_re))
            tags.push_back({m[1].str(), "function", static_cast<int>(i) + 1, brace_end(lines, i)});
        else if (std::regex_search(lines[i], m, class_re))
            tags.push_back({m[1].str(), "class", static_cast<int>(i) + 1, brace_end(lines, i)});
    }
    return tags;
}

std::vector<Tag> scan_r(const std::vector<std::string>& lines) {
    std::vector<Tag> tags;
    static const std::regex fn_re(
        R"(^\s*([A-Za-z.][A-Za-z0-9._]*)\s*(?:<-|=)\s*function\s*\()");
    for (size_t i = 0; i < lines.size(); ++i) {
        std::smatch m;
        if (!std::regex_search(lines[i], m, fn_re))
            continue;
        // body is brace-delimited or a single expression
        int end = brace_end(lines, i);
        tags.push_back({m[1].str(), "function", static_cast<int>(i) + 1, end});
    }
    return tags;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> files;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "-o" || arg == "-f") {
            if (i + 1 < argc)
                ++i; // output target; we always write stdout
            continue;
        }
        if (!arg.empty() && arg[0] == '-')
            continue; // ctags-style options are accepted and ignored
        files.push_back(arg);
    }

    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            std::cerr << "tagscan: cannot open " << path << "\n";
            return 1;
        }
        std::string lang = language_of(path);
        if (lang.empty())
            continue;
        auto lines = read_lines(in);
        std::vector<Tag> tags;
        if (lang == "C")
            tags = scan_c_like(lines, false, false);
        else if (lang == "C++")
            tags = scan_c_like(lines, true, false);
        else if (lang == "Java")
            tags = scan_c_like(lines, true, true);
        else if (lang == "Python")
            tags = scan_python(lines);
        else if (lang == "JavaScript")
            tags = scan_js(lines);
        else if (lang == "R")
            tags = scan_r(lines);
        for (const auto& t : tags) {
            std::cout << "{\"_type\": \"tag\", \"name\": \"" << json_escape(t.name)
                      << "\", \"path\": \"" << json_escape(path) << "\", \"language\": \""
                      << lang << "\", \"line\": " << t.line << ", \"end\": " << t.end
                      << ", \"kind\": \"" << t.kind << "\"}\n";
        }
    }
    return 0;
}
