/*
 * Copyright 2026 The ewspipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ewspipe/svg.hpp"

#include "ewspipe/io.hpp"

#include <sstream>

namespace ews {

namespace {

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string roc_svg(const RocResult& roc, const std::string& title)
{
    constexpr double size = 400.0;
    constexpr double pad = 40.0;
    auto px = [&](double fpr) { return pad + fpr * size; };
    auto py = [&](double tpr) { return pad + (1.0 - tpr) * size; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * pad << "\" height=\"" << size + 2 * pad
      << "\">\n";
    s << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(1)
      << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < roc.fpr.size(); ++i) {
        if (i) s << ' ';
        s << px(roc.fpr[i]) << ',' << py(roc.tpr[i]);
    }
    s << "\"/>\n";
    s << "<text x=\"" << pad << "\" y=\"" << pad - 12 << "\" font-family=\"sans-serif\" font-size=\"14\">"
      << escape(title) << " (AUC " << format_double(roc.auc) << ")</text>\n";
    s << "<text x=\"" << pad + size / 2 << "\" y=\"" << size + 2 * pad - 8
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">false positive rate</text>\n";
    s << "<text x=\"12\" y=\"" << pad + size / 2 << "\" font-family=\"sans-serif\" font-size=\"12\" "
      << "text-anchor=\"middle\" transform=\"rotate(-90 12 " << pad + size / 2 << ")\">true positive rate</text>\n";
    s << "</svg>\n";
    return s.str();
}

} // namespace ews
