// SPDX-License-Identifier: Apache-2.0
//
// qdiff: differential modulation for massive-MIMO uplinks with low-resolution ADCs
// Copyright (C) 2026 The qdiff authors
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

#ifndef QDIFF_ERROR_HPP
#define QDIFF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qdiff
{
    enum class ErrorKind
    {
        Domain,      // argument outside the mathematical domain of an operation
        Index,       // index out of range
        Shape,       // inconsistent matrix / vector dimensions
        Config,      // inconsistent or invalid configuration
        Calibration, // a calibration could not produce a usable result
        Detection,   // a detector could not produce a decision
        Io           // file system failure
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
        ErrorKind kind() const noexcept { return kind_; }

    private:
        ErrorKind kind_;
    };

#define QDIFF_DEFINE_ERROR(Name, Kind)                                          \
    class Name : public Error                                                   \
    {                                                                           \
    public:                                                                     \
        explicit Name(const std::string &what) : Error(ErrorKind::Kind, what) {} \
    };

    QDIFF_DEFINE_ERROR(DomainError, Domain)
    QDIFF_DEFINE_ERROR(IndexError, Index)
    QDIFF_DEFINE_ERROR(ShapeError, Shape)
    QDIFF_DEFINE_ERROR(ConfigError, Config)
    QDIFF_DEFINE_ERROR(CalibrationError, Calibration)
    QDIFF_DEFINE_ERROR(DetectionError, Detection)
    QDIFF_DEFINE_ERROR(IoError, Io)

#undef QDIFF_DEFINE_ERROR
}

#endif
