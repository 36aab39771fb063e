#include "hmsort/metrics.hpp"

#include "hmsort/association.hpp"
#include "hmsort/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace hmsort::metrics {

namespace {

using FrameMap = std::map<int, std::vector<TrackEntry>>;

FrameMap index_frames(const std::vector<FrameOutput>& frames, const char* what) {
    FrameMap map;
    for (const FrameOutput& f : frames) {
        auto& entries = map[f.frame];
        entries.insert(entries.end(), f.entries.begin(), f.entries.end());
    }
    for (auto& [frame, entries] : map) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const TrackEntry& a, const TrackEntry& b) { return a.id < b.id; });
        for (std::size_t i = 1; i < entries.size(); ++i) {
            if (entries[i].id == entries[i - 1].id) {
                throw ContractError(fmt::format("{} frame {} lists id {} more than once", what,
                                                frame, entries[i].id));
            }
        }
    }
    return map;
}

}  // namespace

double mota(std::size_t fp, std::size_t fn, std::size_t idsw, std::size_t gt_total) noexcept {
    const double denom = static_cast<double>(std::max<std::size_t>(gt_total, 1));
    return 1.0 - static_cast<double>(fp + fn + idsw) / denom;
}

double idf1(std::size_t idtp, std::size_t gt_total, std::size_t pred_total) noexcept {
    if (gt_total + pred_total == 0) return 1.0;
    return 2.0 * static_cast<double>(idtp) / static_cast<double>(gt_total + pred_total);
}

FrameMatch clear_match(std::span<const TrackEntry> gt, std::span<const TrackEntry> pred,
                       const std::map<int, int>& previous, double iou_threshold) {
    FrameMatch result;
    std::vector<char> gt_used(gt.size(), 0);
    std::vector<char> pred_used(pred.size(), 0);

    for (std::size_t g = 0; g < gt.size(); ++g) {
        const auto it = previous.find(gt[g].id);
        if (it == previous.end()) continue;
        for (std::size_t p = 0; p < pred.size(); ++p) {
            if (pred_used[p] || pred[p].id != it->second) continue;
            if (iou(gt[g].box, pred[p].box) >= iou_threshold) {
                gt_used[g] = pred_used[p] = 1;
                result.matches.push_back({gt[g].id, pred[p].id});
            }
            break;
        }
    }

    std::vector<std::size_t> gt_rest, pred_rest;
    for (std::size_t g = 0; g < gt.size(); ++g) {
        if (!gt_used[g]) gt_rest.push_back(g);
    }
    for (std::size_t p = 0; p < pred.size(); ++p) {
        if (!pred_used[p]) pred_rest.push_back(p);
    }
    CostMatrix costs(gt_rest.size(), pred_rest.size());
    for (std::size_t r = 0; r < gt_rest.size(); ++r) {
        for (std::size_t c = 0; c < pred_rest.size(); ++c) {
            const double overlap = iou(gt[gt_rest[r]].box, pred[pred_rest[c]].box);
            if (overlap >= iou_threshold) costs.set(r, c, 1.0 - overlap);
        }
    }
    const Assignment a = linear_assignment(costs);
    for (const Match& m : a.matches) {
        gt_used[gt_rest[m.row]] = pred_used[pred_rest[m.col]] = 1;
        result.matches.push_back({gt[gt_rest[m.row]].id, pred[pred_rest[m.col]].id});
    }
    for (std::size_t g = 0; g < gt.size(); ++g) {
        if (!gt_used[g]) result.unmatched_gt.push_back(gt[g].id);
    }
    for (std::size_t p = 0; p < pred.size(); ++p) {
        if (!pred_used[p]) result.unmatched_pred.push_back(pred[p].id);
    }
    std::sort(result.matches.begin(), result.matches.end(),
              [](const Correspondence& a, const Correspondence& b) { return a.gt_id < b.gt_id; });
    return result;
}

SequenceMetrics evaluate_sequence(const std::vector<FrameOutput>& gt,
                                  const std::vector<FrameOutput>& pred, std::string name,
                                  double iou_threshold) {
    const FrameMap gt_frames = index_frames(gt, "ground truth");
    const FrameMap pred_frames = index_frames(pred, "prediction");

    std::set<int> frames;
    for (const auto& [f, _] : gt_frames) frames.insert(f);
    for (const auto& [f, _] : pred_frames) frames.insert(f);

    SequenceMetrics m;
    m.name = std::move(name);

    struct GtState {
        std::optional<int> last_pred;
        bool ever_matched = false;
        bool interrupted = false;
    };
    std::map<int, GtState> gt_state;
    std::map<int, int> previous;

    // Identity overlap counts for IDF1, keyed by (gt id, pred id).
    std::map<std::pair<int, int>, std::size_t> overlap;
    std::set<int> gt_ids, pred_ids;

    static const std::vector<TrackEntry> kNone;
    for (int frame : frames) {
        const auto git = gt_frames.find(frame);
        const auto pit = pred_frames.find(frame);
        const auto& g = git == gt_frames.end() ? kNone : git->second;
        const auto& p = pit == pred_frames.end() ? kNone : pit->second;
        m.gt_total += g.size();
        m.pred_total += p.size();
        for (const auto& e : g) gt_ids.insert(e.id);
        for (const auto& e : p) pred_ids.insert(e.id);

        const FrameMatch fm = clear_match(g, p, previous, iou_threshold);
        m.matches += fm.matches.size();
        m.fn += fm.unmatched_gt.size();
        m.fp += fm.unmatched_pred.size();

        previous.clear();
        for (const Correspondence& c : fm.matches) {
            GtState& s = gt_state[c.gt_id];
            if (s.last_pred && *s.last_pred != c.pred_id) ++m.idsw;
            if (s.interrupted) ++m.frag;
            s.last_pred = c.pred_id;
            s.ever_matched = true;
            s.interrupted = false;
            previous[c.gt_id] = c.pred_id;
        }
        for (int id : fm.unmatched_gt) {
            GtState& s = gt_state[id];
            if (s.ever_matched) s.interrupted = true;
        }

        for (const TrackEntry& ge : g) {
            for (const TrackEntry& pe : p) {
                if (iou(ge.box, pe.box) >= iou_threshold) ++overlap[{ge.id, pe.id}];
            }
        }
    }

    m.gt_ids = gt_ids.size();
    m.pred_ids = pred_ids.size();

    // Max-weight identity mapping: minimizing (K - overlap) over a full
    // assignment maximizes total overlap since cardinality is fixed.
    const std::vector<int> gv(gt_ids.begin(), gt_ids.end());
    const std::vector<int> pv(pred_ids.begin(), pred_ids.end());
    if (!gv.empty() && !pv.empty() && !overlap.empty()) {
        std::size_t k = 0;
        for (const auto& [_, n] : overlap) k = std::max(k, n);
        std::vector<double> costs(gv.size() * pv.size(), static_cast<double>(k));
        std::map<int, std::size_t> pcol;
        for (std::size_t c = 0; c < pv.size(); ++c) pcol[pv[c]] = c;
        std::map<int, std::size_t> grow;
        for (std::size_t r = 0; r < gv.size(); ++r) grow[gv[r]] = r;
        for (const auto& [key, n] : overlap) {
            costs[grow[key.first] * pv.size() + pcol[key.second]] =
                static_cast<double>(k) - static_cast<double>(n);
        }
        const auto assignment = solve_dense_assignment(costs, gv.size(), pv.size());
        for (std::size_t r = 0; r < gv.size(); ++r) {
            if (assignment[r] < 0) continue;
            const auto it = overlap.find({gv[r], pv[static_cast<std::size_t>(assignment[r])]});
            if (it != overlap.end()) m.idtp += it->second;
        }
    }
    m.idfn = m.gt_total - m.idtp;
    m.idfp = m.pred_total - m.idtp;
    m.mota = mota(m.fp, m.fn, m.idsw, m.gt_total);
    m.idf1 = idf1(m.idtp, m.gt_total, m.pred_total);
    return m;
}

MetricsReport aggregate(std::vector<SequenceMetrics> sequences) {
    MetricsReport r;
    for (const SequenceMetrics& s : sequences) {
        r.idsw += s.idsw;
        r.frag += s.frag;
        r.fp += s.fp;
        r.fn += s.fn;
        r.gt_total += s.gt_total;
        r.pred_total += s.pred_total;
        r.idtp += s.idtp;
    }
    r.mota = mota(r.fp, r.fn, r.idsw, r.gt_total);
    r.idf1 = idf1(r.idtp, r.gt_total, r.pred_total);
    r.sequences = std::move(sequences);
    return r;
}

MetricsReport evaluate(const std::vector<FrameOutput>& gt, const std::vector<FrameOutput>& pred,
                       std::string name, double iou_threshold) {
    std::vector<SequenceMetrics> seqs;
    seqs.push_back(evaluate_sequence(gt, pred, std::move(name), iou_threshold));
    return aggregate(std::move(seqs));
}

std::string format_report_text(const MetricsReport& report) {
    fmt::memory_buffer buf;
    auto out = std::back_inserter(buf);
    fmt::format_to(out, "{:<24} {:>8} {:>8} {:>6} {:>6} {:>8} {:>8} {:>8}\n", "sequence", "MOTA",
                   "IDF1", "IDSW", "Frag", "FP", "FN", "GT");
    for (const SequenceMetrics& s : report.sequences) {
        fmt::format_to(out, "{:<24} {:>8.4f} {:>8.4f} {:>6} {:>6} {:>8} {:>8} {:>8}\n", s.name,
                       s.mota, s.idf1, s.idsw, s.frag, s.fp, s.fn, s.gt_total);
    }
    fmt::format_to(out, "{:<24} {:>8.4f} {:>8.4f} {:>6} {:>6} {:>8} {:>8} {:>8}\n", "OVERALL",
                   report.mota, report.idf1, report.idsw, report.frag, report.fp, report.fn,
                   report.gt_total);
    return fmt::to_string(buf);
}

std::string format_report_kv(const MetricsReport& report) {
    fmt::memory_buffer buf;
    auto out = std::back_inserter(buf);
    fmt::format_to(out,
                   "mota={:.6f}\nidf1={:.6f}\nidsw={}\nfrag={}\nfp={}\nfn={}\ngt_total={}\n"
                   "pred_total={}\nidtp={}\n",
                   report.mota, report.idf1, report.idsw, report.frag, report.fp, report.fn,
                   report.gt_total, report.pred_total, report.idtp);
    for (const SequenceMetrics& s : report.sequences) {
        fmt::format_to(out,
                       "{0}.mota={1:.6f}\n{0}.idf1={2:.6f}\n{0}.idsw={3}\n{0}.frag={4}\n"
                       "{0}.fp={5}\n{0}.fn={6}\n{0}.gt_total={7}\n",
                       s.name, s.mota, s.idf1, s.idsw, s.frag, s.fp, s.fn, s.gt_total);
    }
    return fmt::to_string(buf);
}

}  // namespace hmsort::metrics
