#ifndef QMEM_NUMCORE_ERROR_HPP
#define QMEM_NUMCORE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace qmem {

enum class ErrorKind {
    Validation,
    GridTooShort,
    AliasRisk,
    StepTooCoarse,
    ConvergenceNotMet,
    PerturbativeViolation,
    FlipDuringSignal,
    OrderingViolation,
    TruncationOverflow,
    DegenerateGainLoss,
    RamanConditionViolated,
    RegimeWarning
};

inline const char *to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::Validation: return "Validation";
    case ErrorKind::GridTooShort: return "GridTooShort";
    case ErrorKind::AliasRisk: return "AliasRisk";
    case ErrorKind::StepTooCoarse: return "StepTooCoarse";
    case ErrorKind::ConvergenceNotMet: return "ConvergenceNotMet";
    case ErrorKind::PerturbativeViolation: return "PerturbativeViolation";
    case ErrorKind::FlipDuringSignal: return "FlipDuringSignal";
    case ErrorKind::OrderingViolation: return "OrderingViolation";
    case ErrorKind::TruncationOverflow: return "TruncationOverflow";
    case ErrorKind::DegenerateGainLoss: return "DegenerateGainLoss";
    case ErrorKind::RamanConditionViolated: return "RamanConditionViolated";
    case ErrorKind::RegimeWarning: return "RegimeWarning";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &msg)
        : std::runtime_error(std::string(to_string(kind)) + ": " + msg),
          m_kind(kind)
    {}

    ErrorKind kind() const { return m_kind; }

private:
    ErrorKind m_kind;
};

/* non-fatal regime notes collected by runners */
struct Warning {
    ErrorKind kind;
    std::string message;
};

using Warnings = std::vector<Warning>;

inline void require(bool cond, const std::string &msg)
{
    if (!cond) {
        throw Error(ErrorKind::Validation, msg);
    }
}

} // namespace qmem

#endif
