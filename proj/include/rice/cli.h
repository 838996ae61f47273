#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rice/worldbank.h"

namespace rice::cli {

enum ExitCode { kOk = 0, kRuntimeError = 1, kValidationError = 2 };

/// Runs the rice_sim command line. args excludes the program name.
/// `transport` overrides the HTTP transport used by fetch-data.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Transport& transport = {});

int main(int argc, char** argv);

/// HTTPS transport backed by cpp-httplib.
Transport http_transport(const std::string& base_url = kWorldBankBaseUrl);

}  // namespace rice::cli
