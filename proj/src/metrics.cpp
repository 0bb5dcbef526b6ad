#include "semfast/metrics.hpp"

#include "format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace semfast {

void check_selection(std::span<const FrameIndex> indices, FrameIndex frame_count)
{
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] < 0 || indices[k] >= frame_count)
            throw Error("selected frame " + std::to_string(indices[k]) + " out of range");
        if (k > 0 && indices[k] <= indices[k - 1])
            throw Error("selected frames must be strictly increasing");
    }
}

double semantic_amount(std::span<const FrameIndex> indices, std::span<const double> scores)
{
    check_selection(indices, static_cast<FrameIndex>(scores.size()));
    double total = 0.0;
    for (auto i : indices)
        total += scores[static_cast<std::size_t>(i)];
    return total;
}

std::vector<Point2> transition_foes(std::span<const FrameIndex> indices,
                                    std::span<const FrameRecord> frames, const VideoMeta& meta)
{
    check_selection(indices, static_cast<FrameIndex>(frames.size()));
    const Point2 center = meta.center();
    std::vector<Point2> out;
    for (std::size_t k = 0; k + 1 < indices.size(); ++k) {
        Point2 sum;
        for (FrameIndex t = indices[k]; t < indices[k + 1]; ++t) {
            const Point2 p = frames[static_cast<std::size_t>(t)].foe.value_or(center);
            sum.x += p.x;
            sum.y += p.y;
        }
        const auto count = static_cast<double>(indices[k + 1] - indices[k]);
        out.push_back({sum.x / count, sum.y / count});
    }
    return out;
}

double jitter_from_foes(std::span<const Point2> foes)
{
    if (foes.size() < 2)
        throw Error("jitter needs at least two output transitions");
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < foes.size(); ++k)
        total += distance(foes[k], foes[k + 1]);
    return total / static_cast<double>(foes.size() - 1);
}

double jitter_amount(std::span<const FrameIndex> indices, std::span<const FrameRecord> frames,
                     const VideoMeta& meta)
{
    if (indices.size() < 3)
        throw Error("jitter needs at least three selected frames");
    return jitter_from_foes(transition_foes(indices, frames, meta));
}

double jitter_improvement(double jitter, const VideoMeta& meta)
{
    if (!(jitter >= 0.0))
        throw Error("jitter must be non-negative");
    return std::clamp(100.0 * (1.0 - jitter / meta.diagonal()), 0.0, 100.0);
}

SpeedupDeviation speedup_deviation(std::span<const FrameIndex> indices, FrameIndex frame_count,
                                   int desired, int tau_max)
{
    if (indices.empty())
        throw Error("speed-up deviation needs a non-empty selection");
    SpeedupDeviation out;
    const double achieved = static_cast<double>(frame_count) / static_cast<double>(indices.size());
    out.deviation = std::abs(achieved - desired);
    const double worst = std::abs(static_cast<double>(tau_max) - desired);
    if (worst == 0.0)
        out.pct_of_worst = out.deviation == 0.0 ? 100.0 : 0.0;
    else
        out.pct_of_worst = std::clamp(100.0 * (1.0 - out.deviation / worst), 0.0, 100.0);
    return out;
}

SelectionReport evaluate_selection(std::span<const FrameIndex> indices,
                                   std::span<const double> scores, const FeatureSet& features,
                                   int desired, int tau_max,
                                   std::optional<std::span<const Point2>> pairwise_foes)
{
    const auto n = static_cast<FrameIndex>(features.frames.size());
    if (static_cast<FrameIndex>(scores.size()) != n)
        throw Error("score vector does not match the feature set");
    check_selection(indices, n);

    SelectionReport r;
    r.indices.assign(indices.begin(), indices.end());
    r.semantic_amount = semantic_amount(indices, scores);
    if (pairwise_foes) {
        if (pairwise_foes->size() + 1 != indices.size())
            throw Error("pairwise FOE count does not match the selection");
        if (pairwise_foes->size() >= 2)
            r.jitter_amount = jitter_from_foes(*pairwise_foes);
    } else if (indices.size() >= 3) {
        r.jitter_amount = jitter_amount(indices, features.frames, features.meta);
    }
    if (r.jitter_amount)
        r.jitter_improvement_pct = jitter_improvement(*r.jitter_amount, features.meta);
    const auto dev = speedup_deviation(indices, n, desired, tau_max);
    r.achieved_speedup = static_cast<double>(n) / static_cast<double>(indices.size());
    r.speedup_deviation = dev.deviation;
    r.deviation_pct_of_worst = dev.pct_of_worst;
    return r;
}

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    return cells;
}

template <class T>
T parse_cell(const std::string& text, std::size_t line)
{
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first < last && *first == ' ')
        ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\r'))
        --last;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last)
        throw ParseError(line, "invalid value '" + text + "'");
    return value;
}

bool blank(const std::string& s)
{
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

} // namespace

std::vector<Point2> read_pairwise_foes(std::istream& in, std::span<const FrameIndex> indices)
{
    std::vector<Point2> foes;
    std::string text;
    std::size_t line = 0;
    bool header = true;
    while (std::getline(in, text)) {
        ++line;
        if (blank(text))
            continue;
        if (header) {
            header = false;
            continue;
        }
        const auto cells = split_csv(text);
        if (cells.size() != 4)
            throw ParseError(line, "expected 4 columns: from,to,foe_x,foe_y");
        const auto from = parse_cell<FrameIndex>(cells[0], line);
        const auto to = parse_cell<FrameIndex>(cells[1], line);
        const std::size_t k = foes.size();
        if (k + 1 >= indices.size() || indices[k] != from || indices[k + 1] != to)
            throw ParseError(line, "row does not match selected pair " + std::to_string(k));
        const Point2 p{parse_cell<double>(cells[2], line), parse_cell<double>(cells[3], line)};
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ParseError(line, "FOE must be finite");
        foes.push_back(p);
    }
    if (foes.size() + 1 != indices.size())
        throw Error("pairwise FOE file has " + std::to_string(foes.size()) + " rows, expected " +
                    std::to_string(indices.empty() ? 0 : indices.size() - 1));
    return foes;
}

void write_transition_foes(std::span<const FrameIndex> indices, std::span<const Point2> foes,
                           std::ostream& out)
{
    if (foes.size() + 1 != indices.size())
        throw Error("FOE count does not match the selection");
    out << "from,to,foe_x,foe_y\n";
    for (std::size_t k = 0; k < foes.size(); ++k)
        out << indices[k] << ',' << indices[k + 1] << ',' << detail::fmt(foes[k].x) << ','
            << detail::fmt(foes[k].y) << '\n';
}

std::vector<FrameIndex> read_indices(std::istream& in)
{
    std::vector<FrameIndex> out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (blank(text))
            continue;
        out.push_back(parse_cell<FrameIndex>(text, line));
    }
    return out;
}

void write_indices(std::span<const FrameIndex> indices, std::ostream& out)
{
    for (auto i : indices)
        out << i << '\n';
}

std::string report_csv_header()
{
    return "label,frame_count,selected,semantic_amount,jitter_amount,jitter_improvement_pct,"
           "achieved_speedup,speedup_deviation,deviation_pct_of_worst";
}

std::string report_csv_row(const std::string& label, FrameIndex frame_count,
                           const SelectionReport& r)
{
    std::ostringstream row;
    row << label << ',' << frame_count << ',' << r.indices.size() << ','
        << detail::fmt(r.semantic_amount) << ','
        << (r.jitter_amount ? detail::fmt(*r.jitter_amount) : "") << ','
        << (r.jitter_improvement_pct ? detail::fmt(*r.jitter_improvement_pct) : "") << ','
        << detail::fmt(r.achieved_speedup) << ',' << detail::fmt(r.speedup_deviation) << ','
        << detail::fmt(r.deviation_pct_of_worst);
    return row.str();
}

} // namespace semfast
