/*
   Copyright 2026 The ehgsc Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace ehgsc {

/// Malformed or out-of-range configuration. Carries the offending line when
/// the error comes from a config file (0 otherwise).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::invalid_argument(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// psi_R <= 1: the relay buffer has no limiting distribution.
class InstabilityError : public std::domain_error {
public:
    InstabilityError(const std::string& what, double psi)
        : std::domain_error(what), psi_(psi) {}
    double psi() const noexcept { return psi_; }

private:
    double psi_;
};

/// Numerically too close to the Lambert-W branch point to separate Q1 from 0.
class DegeneracyError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ehgsc
