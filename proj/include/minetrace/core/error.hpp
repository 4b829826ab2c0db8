#pragma once

#include <stdexcept>
#include <string>

namespace minetrace {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MINETRACE_DEFINE_ERROR(Name)            \
    class Name : public Error {                 \
    public:                                     \
        explicit Name(const std::string& what)  \
            : Error(#Name ": " + what)          \
        {                                       \
        }                                       \
    }

MINETRACE_DEFINE_ERROR(MalformedBlob);
MINETRACE_DEFINE_ERROR(EmptyLeaves);
MINETRACE_DEFINE_ERROR(UnsupportedPowFunction);
MINETRACE_DEFINE_ERROR(SnapshotError);

}  // namespace minetrace
