// SPDX-License-Identifier: Apache-2.0
//
// csiregion - joint uplink/downlink rate regions under imperfect CSI
// Copyright (C) 2026 csiregion contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace csiregion {

/// An iterative numeric kernel failed (no convergence, singular system).
class NumericFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The channel estimate carries no usable information; callers treat the
/// affected link as having zero rate.
class UnusableLink : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Threshold read once from the CSIREGION_LOG environment variable
/// (error|warn|info|debug, default warn).
Level threshold();

void write(Level level, const std::string& msg);

inline void error(const std::string& msg) { write(Level::Error, msg); }
inline void warn(const std::string& msg) { write(Level::Warn, msg); }
inline void info(const std::string& msg) { write(Level::Info, msg); }
inline void debug(const std::string& msg) { write(Level::Debug, msg); }

} // namespace log
} // namespace csiregion
