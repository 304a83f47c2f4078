#pragma once

#include "pdf/filters.hpp"
#include "pdf/objects.hpp"

#include <map>
#include <memory>
#include <set>
#include <unordered_map>

namespace aitrace::pdf {

/// Thrown when the trailer carries an /Encrypt dictionary.
class EncryptedPdf : public PdfError {
public:
    using PdfError::PdfError;
};

struct Page {
    const Dict* dict = nullptr;
    const Dict* resources = nullptr;  // nearest /Resources up the page tree
};

/// Random-access view of a PDF file: cross-reference sections (tables and
/// streams, following /Prev), object streams, and the page tree. Rebuilds
/// the cross-reference by scanning when the stored one is unusable.
class Document {
public:
    explicit Document(std::span<const std::byte> bytes);

    const Dict& trailer() const { return trailer_; }

    /// Resolves references, returning a stable pointer into the object
    /// cache. Dangling references resolve to Null.
    const Object& resolve(const Object& obj);
    const Object& get(std::uint32_t num);

    const Dict* resolve_dict(const Object* obj);

    /// Decodes a stream's filter chain. Throws UnsupportedFilter.
    DecodeResult decode(const Stream& stream);

    std::vector<Page> pages();

    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    struct XrefEntry {
        enum class Kind { Free, InFile, InObjectStream } kind = Kind::Free;
        std::uint64_t offset = 0;  // InFile: byte offset; InObjectStream: container number
        std::uint32_t index = 0;   // InObjectStream: position in the container
    };

    void load_xref();
    bool read_xref_chain(std::size_t offset);
    std::size_t read_xref_table(std::size_t offset, Dict& trailer);
    void read_xref_stream(const Stream& stream);
    void rebuild_xref();
    std::optional<std::size_t> find_startxref() const;

    Object parse_indirect_at(std::size_t offset, std::optional<std::uint32_t> expected);
    Object load_from_object_stream(std::uint32_t container, std::uint32_t index, std::uint32_t num);
    std::span<const std::byte> stream_data(const Dict& dict, Parser& p, std::size_t start);

    void collect_pages(const Object& node, const Dict* inherited, std::vector<Page>& out,
                       std::set<std::uint32_t>& visited, int depth);

    std::span<const std::byte> bytes_;
    std::map<std::uint32_t, XrefEntry> xref_;
    Dict trailer_;
    std::unordered_map<std::uint32_t, std::unique_ptr<Object>> cache_;
    std::set<std::uint32_t> loading_;
    std::unordered_map<std::uint32_t, std::shared_ptr<std::string>> object_streams_;
    std::vector<std::string> warnings_;
    Object null_;
};

/// Flattens a name-or-array /Filter entry.
std::vector<std::string> filter_names(Document& doc, const Dict& stream_dict);

}  // namespace aitrace::pdf
