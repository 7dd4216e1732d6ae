// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_ERRORS_HPP
#define DERAMG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace deramg
{

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error
{
public:
    using Error::Error;
};

/// A local saddle-point or projection system could not be factorized.
/// Carries the agglomerate (or other entity) context when known.
class SingularLocalSystem : public Error
{
public:
    SingularLocalSystem(const std::string& what, int entity_id = -1)
        : Error(entity_id >= 0 ? what + " (entity " + std::to_string(entity_id) + ")" : what),
          entity(entity_id)
    {}
    int entity;
};

class NotPositiveDefinite : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(const std::string& what, int line_number)
        : Error("line " + std::to_string(line_number) + ": " + what), line(line_number)
    {}
    int line;
};

class TopologyError : public Error
{
public:
    using Error::Error;
};

class RepairFailed : public Error
{
public:
    using Error::Error;
};

class ZeroMeasureEntity : public Error
{
public:
    using Error::Error;
};

class UnknownAttribute : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

class ExactnessViolation : public Error
{
public:
    using Error::Error;
};

class IndefinitePreconditioner : public Error
{
public:
    using Error::Error;
};

class ZeroDiagonal : public Error
{
public:
    using Error::Error;
};

#define DERAMG_REQUIRE(cond, exc, msg)                                         \
    do {                                                                       \
        if (!(cond)) throw exc(msg);                                           \
    } while (0)

} // namespace deramg

#endif
