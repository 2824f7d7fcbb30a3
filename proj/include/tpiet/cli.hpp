#pragma once

#include <tpiet/workspace.hpp>

#include <iosfwd>
#include <string>

namespace tpiet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitQueryError = 1;
inline constexpr int kExitWorkspaceError = 2;

/// Error text for `e`; syntax errors also show the offending line of `source`
/// with a caret under the reported column.
std::string diagnostic(const std::exception& e, std::string_view source = {});

/// Interactive loop over one engine. Queries may span lines and run when a
/// line ends with `;` or a blank line follows; lines starting with `\` are
/// meta-commands.
class Repl {
public:
    Repl(Engine& engine, std::ostream& out, std::ostream& err);

    /// Returns false once the session should end.
    bool feed(const std::string& line);
    /// Runs any pending query text.
    void flush();

    OutputFormat format = OutputFormat::Table;
    /// Exit status of the last command.
    int status = kExitOk;

private:
    void run_query(const std::string& text);
    bool meta(const std::string& line);

    Engine& engine_;
    std::ostream& out_;
    std::ostream& err_;
    std::string pending_;
};

/// Entry point of the `tpiet` command. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace tpiet
