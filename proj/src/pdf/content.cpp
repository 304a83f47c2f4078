#include "pdf/content.hpp"

#include <algorithm>

namespace aitrace::pdf {

namespace {

constexpr int kMaxFormDepth = 12;

std::span<const std::byte> as_span(std::string_view s) {
    return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

}  // namespace

void LineCollector::newline() {
    if (!current_.empty()) {
        lines_.push_back(std::move(current_));
        current_.clear();
    }
}

std::vector<std::string> LineCollector::take() {
    newline();
    return std::move(lines_);
}

void ContentInterpreter::warn(std::string message) {
    for (const auto& w : warnings_) {
        if (w == message) return;
    }
    warnings_.push_back(std::move(message));
}

const Font* ContentInterpreter::font_for(const Dict* resources, std::string_view name) {
    if (!resources) return nullptr;
    const Dict* fonts = doc_.resolve_dict(resources->get("Font"));
    if (!fonts) return nullptr;
    const Object* entry = fonts->get(name);
    if (!entry) return nullptr;
    const Dict* font_dict = doc_.resolve_dict(entry);
    if (!font_dict) return nullptr;
    auto it = fonts_.find(font_dict);
    if (it == fonts_.end()) {
        it = fonts_.emplace(font_dict, Font::load(doc_, *font_dict)).first;
        std::string label = "/" + std::string(name);
        if (const Object* base = font_dict->get("BaseFont")) {
            const std::string_view bn = doc_.resolve(*base).name();
            if (!bn.empty()) label += " (" + std::string(bn) + ")";
        }
        font_names_[&it->second] = label;
    }
    return &it->second;
}

void ContentInterpreter::show(const Object& operand) {
    const auto* s = operand.as<String>();
    if (!s || s->bytes.empty()) return;
    if (!font_) {
        if (!warned_missing_font_) warn("text shown without a selected font was skipped");
        warned_missing_font_ = true;
        all_recovered_ = false;
        return;
    }
    if (!font_->usable()) {
        warn("font " + font_names_[font_] + ": " + font_->problem() + "; its text was skipped");
        all_recovered_ = false;
        return;
    }
    std::string text;
    const std::size_t missing = font_->decode(s->bytes, text);
    if (missing > 0) {
        auto it = std::find_if(unmapped_.begin(), unmapped_.end(), [&](const auto& e) { return e.first == font_; });
        if (it == unmapped_.end()) {
            unmapped_.emplace_back(font_, missing);
        } else {
            it->second += missing;
        }
        all_recovered_ = false;
    }
    out_.append(text);
}

void ContentInterpreter::invoke_xobject(const Dict* resources, std::string_view name, int depth) {
    if (!resources) return;
    const Dict* xobjects = doc_.resolve_dict(resources->get("XObject"));
    if (!xobjects) return;
    const Object* entry = xobjects->get(name);
    if (!entry) return;
    const auto* stream = doc_.resolve(*entry).as<Stream>();
    if (!stream) return;
    const std::string_view subtype = stream->dict.get("Subtype") ? stream->dict.get("Subtype")->name() : "";
    if (subtype == "Image") {
        painted_images_ = true;
        return;
    }
    if (subtype != "Form") return;
    if (depth >= kMaxFormDepth || active_forms_.count(stream)) {
        warn("form XObject nesting too deep or cyclic; inner content skipped");
        all_recovered_ = false;
        return;
    }
    std::string data;
    try {
        data = doc_.decode(*stream).data;
    } catch (const PdfError& e) {
        warn(std::string("form XObject skipped: ") + e.what());
        all_recovered_ = false;
        return;
    }
    const Dict* form_resources = doc_.resolve_dict(stream->dict.get("Resources"));
    active_forms_.insert(stream);
    const Font* saved = font_;
    run(data, form_resources ? form_resources : resources, depth + 1);
    font_ = saved;
    active_forms_.erase(stream);
}

std::size_t ContentInterpreter::skip_inline_image(std::string_view content, std::size_t pos) {
    // Data starts after a single whitespace byte following ID.
    if (pos < content.size() && is_pdf_space(static_cast<unsigned char>(content[pos]))) ++pos;
    std::size_t i = pos;
    while ((i = content.find("EI", i)) != std::string_view::npos) {
        const bool before = i == 0 || is_pdf_space(static_cast<unsigned char>(content[i - 1]));
        const bool after = i + 2 >= content.size() || is_pdf_space(static_cast<unsigned char>(content[i + 2]));
        if (before && after) return i + 2;
        i += 2;
    }
    return content.size();
}

void ContentInterpreter::run(std::string_view content, const Dict* resources, int depth) {
    Parser p(as_span(content));
    std::vector<Object> operands;
    while (true) {
        Object tok;
        try {
            if (p.at_end()) break;
            tok = p.parse_object(false);
        } catch (const PdfError& e) {
            warn(std::string("content stream damaged: ") + e.what());
            all_recovered_ = false;
            break;
        }
        const auto* kw = tok.as<Keyword>();
        if (!kw) {
            if (operands.size() < 64) operands.push_back(std::move(tok));
            continue;
        }
        const std::string& op = kw->value;
        if (op == "Tj") {
            if (!operands.empty()) show(operands.back());
        } else if (op == "TJ") {
            if (!operands.empty()) {
                if (const auto* arr = operands.back().as<Array>()) {
                    for (const auto& item : *arr) show(item);
                }
            }
        } else if (op == "'") {
            out_.newline();
            if (!operands.empty()) show(operands.back());
        } else if (op == "\"") {
            out_.newline();
            if (!operands.empty()) show(operands.back());
        } else if (op == "BT" || op == "ET" || op == "T*") {
            out_.newline();
        } else if (op == "Tf") {
            if (operands.size() >= 2) {
                const std::string_view name = operands[operands.size() - 2].name();
                font_ = font_for(resources, name);
                if (!font_) {
                    warn("font /" + std::string(name) + " not found in page resources");
                }
            }
        } else if (op == "q") {
            if (font_stack_.size() < 256) font_stack_.push_back(font_);
        } else if (op == "Q") {
            if (!font_stack_.empty()) {
                font_ = font_stack_.back();
                font_stack_.pop_back();
            }
        } else if (op == "Do") {
            if (!operands.empty()) invoke_xobject(resources, operands.back().name(), depth);
        } else if (op == "BI") {
            painted_images_ = true;
            // Skip the image dictionary up to ID, then the binary data.
            const auto id = content.find("ID", p.pos());
            if (id == std::string_view::npos) break;
            p.seek(skip_inline_image(content, id + 2));
        }
        operands.clear();
    }
}

std::string ContentInterpreter::page_content(const Dict& page) {
    std::string content;
    const Object* contents = page.get("Contents");
    if (!contents) return content;
    const Object& resolved = doc_.resolve(*contents);
    std::vector<const Stream*> streams;
    if (const auto* s = resolved.as<Stream>()) {
        streams.push_back(s);
    } else if (const auto* arr = resolved.as<Array>()) {
        for (const auto& item : *arr) {
            if (const auto* s = doc_.resolve(item).as<Stream>()) streams.push_back(s);
        }
    }
    for (const Stream* s : streams) {
        try {
            DecodeResult decoded = doc_.decode(*s);
            for (auto& w : decoded.warnings) warn("content stream: " + w);
            if (!decoded.warnings.empty()) all_recovered_ = false;
            content += decoded.data;
            content.push_back('\n');
        } catch (const PdfError& e) {
            warn(std::string("content stream skipped: ") + e.what());
            all_recovered_ = false;
        }
    }
    return content;
}

void ContentInterpreter::finish() {
    for (const auto& [font, count] : unmapped_) {
        warn("font " + font_names_[font] + ": " + std::to_string(count) +
             " character code(s) without a Unicode mapping skipped");
    }
    unmapped_.clear();
}

}  // namespace aitrace::pdf
