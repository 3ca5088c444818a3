#pragma once

// Thin SAX layer over expat. Element and attribute names are reported by
// local name only, so prefixed ("x:row") and default-namespace documents look
// the same to handlers.

#include <hcaudit/errors.hpp>

#include <expat.h>

#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hcaudit {

class XmlAttributes {
public:
    explicit XmlAttributes(const XML_Char** raw) : raw_(raw) {}

    /// Value of the attribute with local name `name`, if present.
    std::optional<std::string_view> get(std::string_view name) const {
        for (const XML_Char** a = raw_; a && *a; a += 2)
            if (local_name(a[0]) == name) return std::string_view(a[1]);
        return std::nullopt;
    }

    std::string_view get_or(std::string_view name, std::string_view fallback) const {
        auto v = get(name);
        return v ? *v : fallback;
    }

    static std::string_view local_name(const XML_Char* qualified) {
        std::string_view s(qualified);
        auto sep = s.rfind('\x1f');
        return sep == std::string_view::npos ? s : s.substr(sep + 1);
    }

private:
    const XML_Char** raw_;
};

/// Derive and override the three hooks; call parse() once per document.
class XmlHandler {
public:
    virtual ~XmlHandler() = default;
    virtual void on_start(std::string_view name, const XmlAttributes& attrs) = 0;
    virtual void on_end(std::string_view name) = 0;
    virtual void on_text(std::string_view) {}
};

namespace detail {

// Exceptions must not unwind through expat's C frames.
struct XmlParseContext {
    XmlHandler* handler;
    XML_Parser parser;
    std::exception_ptr error;

    template <class F>
    void guard(F&& f) {
        if (error) return;
        try {
            f();
        } catch (...) {
            error = std::current_exception();
            XML_StopParser(parser, XML_FALSE);
        }
    }
};

}  // namespace detail

/// Parses `document`, dispatching to `handler`. Exceptions thrown by the
/// handler stop the parse and propagate to the caller.
inline void parse_xml(std::string_view document, XmlHandler& handler, const std::string& part_name) {
    struct ParserDeleter {
        void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
    };
    std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreateNS(nullptr, '\x1f'));
    if (!parser) throw FormatError("cannot create XML parser");

    detail::XmlParseContext ctx{&handler, parser.get(), nullptr};

    XML_SetUserData(parser.get(), &ctx);
    XML_SetElementHandler(
        parser.get(),
        [](void* data, const XML_Char* name, const XML_Char** attrs) {
            auto* c = static_cast<detail::XmlParseContext*>(data);
            c->guard([&] { c->handler->on_start(XmlAttributes::local_name(name), XmlAttributes(attrs)); });
        },
        [](void* data, const XML_Char* name) {
            auto* c = static_cast<detail::XmlParseContext*>(data);
            c->guard([&] { c->handler->on_end(XmlAttributes::local_name(name)); });
        });
    XML_SetCharacterDataHandler(parser.get(), [](void* data, const XML_Char* s, int len) {
        auto* c = static_cast<detail::XmlParseContext*>(data);
        c->guard([&] { c->handler->on_text(std::string_view(s, static_cast<std::size_t>(len))); });
    });
    auto status = XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), 1);
    if (ctx.error) std::rethrow_exception(ctx.error);
    if (status == XML_STATUS_ERROR) {
        throw FormatError("malformed XML in '" + part_name + "' line " +
                          std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                          XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
}

}  // namespace hcaudit
