#pragma once

#include <stdexcept>
#include <string>

namespace i3kit {

/// Base class of all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- record ingestion ---

class EmptyFile : public Error {
public:
    explicit EmptyFile(const std::string& path) : Error("empty input file: " + path) {}
};

class MissingHeaderTag : public Error {
public:
    explicit MissingHeaderTag(const std::string& tag)
        : Error("required header tag missing: " + tag), tag_(tag) {}
    const std::string& tag() const { return tag_; }

private:
    std::string tag_;
};

class MalformedRow : public Error {
public:
    MalformedRow(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class UnknownRecordId : public Error {
public:
    explicit UnknownRecordId(const std::string& id) : Error("unknown record id: " + id) {}
};

class ZeroNRefs : public Error {
public:
    explicit ZeroNRefs(const std::string& cited_id)
        : Error("citation link for '" + cited_id + "' has citing_nrefs = 0") {}
};

// --- scoring ---

class RecordNotInStratum : public Error {
public:
    explicit RecordNotInStratum(const std::string& id)
        : Error("record '" + id + "' is not a member of the given stratum") {}
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(double quantile)
        : Error("quantile out of range: " + std::to_string(quantile)) {}
};

// --- indicators ---

class EmptyReference : public Error {
public:
    EmptyReference() : Error("reference set is empty") {}
};

class ZeroVariance : public Error {
public:
    ZeroVariance() : Error("reference quantiles have zero variance") {}
};

// --- aggregation ---

class UnparseableAddress : public Error {
public:
    explicit UnparseableAddress(const std::string& raw)
        : Error("unparseable address: \"" + raw + "\"") {}
};

// --- reporting ---

class GazetteerMissing : public Error {
public:
    explicit GazetteerMissing(const std::string& path)
        : Error("gazetteer not available: " + path) {}
};

class IoFailure : public Error {
public:
    explicit IoFailure(const std::string& what) : Error("i/o failure: " + what) {}
};

} // namespace i3kit
