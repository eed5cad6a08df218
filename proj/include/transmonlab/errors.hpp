#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tlab {

// Base for every error raised by the library. `stage` names the pipeline step
// (e.g. "geometry", "mesh", "solve") so front ends can label failures.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& what)
        : std::runtime_error(stage.empty() ? what : stage + ": " + what), stage_(std::move(stage)), message_(what) {}

    const std::string& stage() const noexcept { return stage_; }
    // The message without the stage prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string stage_;
    std::string message_;
};

// Inputs outside the mathematical domain of an operation.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what, std::string stage = "parameters")
        : Error(std::move(stage), what) {}
};

// Iterative method failed to converge; carries the residual / iteration trail.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::vector<double> history, std::string stage = "numerics")
        : Error(std::move(stage), what), history_(std::move(history)) {}

    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& what) : Error("geometry", what) {}
};

class MeshError : public Error {
public:
    explicit MeshError(const std::string& what) : Error("mesh", what) {}
};

// Problem setup is inconsistent (missing materials, no Dirichlet data, ...).
class SetupError : public Error {
public:
    explicit SetupError(const std::string& what) : Error("setup", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// Rethrows the exception in flight as the same library error type with
// `prefix` prepended to the message. Call only from inside a catch block.
[[noreturn]] inline void rethrow_with_context(const std::string& prefix) {
    try {
        throw;
    } catch (const NumericalError& e) {
        throw NumericalError(prefix + e.message(), e.history(), e.stage());
    } catch (const GeometryError& e) {
        throw GeometryError(prefix + e.message());
    } catch (const MeshError& e) {
        throw MeshError(prefix + e.message());
    } catch (const SetupError& e) {
        throw SetupError(prefix + e.message());
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.message());
    } catch (const ParameterError& e) {
        throw ParameterError(prefix + e.message(), e.stage());
    } catch (const Error& e) {
        throw Error(e.stage(), prefix + e.message());
    }
}

}  // namespace tlab
