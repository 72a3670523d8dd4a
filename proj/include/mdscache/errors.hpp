/**************************************************************************
 * errors.hpp
 *
 * Copyright 2026 The mdscache Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 **************************************************************************/

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mdscache {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter tuple or request vector failed validation.
class InvalidParams : public Error {
public:
    using Error::Error;
};

class CodecError : public Error {
public:
    using Error::Error;
};

/// Fewer distinct coded symbols than the message length were supplied.
class InsufficientSymbols : public CodecError {
public:
    InsufficientSymbols(std::uint64_t have, std::uint64_t need)
        : CodecError("insufficient symbols: have " + std::to_string(have) +
                     " distinct, need " + std::to_string(need)),
          have_(have), need_(need) {}

    std::uint64_t have() const { return have_; }
    std::uint64_t need() const { return need_; }

private:
    std::uint64_t have_;
    std::uint64_t need_;
};

class ScheduleInfeasible : public Error {
public:
    using Error::Error;
};

} // namespace mdscache
