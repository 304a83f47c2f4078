#pragma once

#include "pdf/document.hpp"
#include "pdf/font.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace aitrace::pdf {

/// Collects shown text as lines. BT, ET, T*, ' and " end the current line;
/// empty lines are dropped.
class LineCollector {
public:
    void append(std::string_view utf8) { current_.append(utf8); }
    void newline();
    std::vector<std::string> take();

private:
    std::vector<std::string> lines_;
    std::string current_;
};

/// Interprets page content streams, decoding the strings passed to the
/// text-showing operators. Form XObjects are followed.
class ContentInterpreter {
public:
    ContentInterpreter(Document& doc, LineCollector& out) : doc_(doc), out_(out) {}

    void run(std::string_view content, const Dict* resources, int depth = 0);

    /// Decodes and concatenates a page's /Contents entry. Streams that
    /// cannot be decoded are skipped and reported.
    std::string page_content(const Dict& page);

    void finish();

    const std::vector<std::string>& warnings() const { return warnings_; }
    bool all_text_recovered() const { return all_recovered_; }
    bool painted_images() const { return painted_images_; }

private:
    const Font* font_for(const Dict* resources, std::string_view name);
    void show(const Object& operand);
    void invoke_xobject(const Dict* resources, std::string_view name, int depth);
    void warn(std::string message);
    std::size_t skip_inline_image(std::string_view content, std::size_t pos);

    Document& doc_;
    LineCollector& out_;
    std::map<const Dict*, Font> fonts_;
    std::vector<std::pair<const Font*, std::size_t>> unmapped_;  // first-use order
    std::map<const Font*, std::string> font_names_;
    std::set<const Stream*> active_forms_;
    const Font* font_ = nullptr;
    std::vector<const Font*> font_stack_;
    std::vector<std::string> warnings_;
    bool all_recovered_ = true;
    bool painted_images_ = false;
    bool warned_missing_font_ = false;
};

}  // namespace aitrace::pdf
