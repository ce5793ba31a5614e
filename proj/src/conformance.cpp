#include <cmath>
#include <cstddef>

#include "amn/ops.hpp"
#include "amn/simulator.hpp"

namespace amn {

namespace {

/// Channel index from a detail string of the form "c:<n> ..."; -1 if absent.
int channel_token(const std::string& detail) {
    if (detail.rfind("c:", 0) != 0) return -1;
    std::size_t i = 2;
    long n = 0;
    bool any = false;
    while (i < detail.size() && detail[i] >= '0' && detail[i] <= '9') {
        n = n * 10 + (detail[i] - '0');
        any = true;
        ++i;
    }
    return any ? static_cast<int>(n) : -1;
}

bool starts_with(const std::string& s, const char* prefix) {
    return s.rfind(prefix, 0) == 0;
}

std::string strip_instance(const std::string& id) {
    auto pos = id.rfind('#');
    return pos == std::string::npos ? id : id.substr(0, pos);
}

bool carries_notification(const Model& m, NotificationMode mode) {
    for (const Connection& c : m.connections)
        for (const EventObjectSpec& o : c.carries)
            if (o.spec.kind == Specialization::Kind::Notification &&
                o.spec.notification && *o.spec.notification == mode)
                return true;
    return false;
}

} // namespace

bool ConformanceReport::ok() const {
    for (const ChannelConformity& c : channels)
        if (c.flagged) return false;
    return always_discipline_ok && on_request_discipline_ok;
}

SimResult<ConformanceReport> check_trace(const Trace& t, const Model& m,
                                         double conformity_tol) {
    const int n_channels = static_cast<int>(m.connections.size());

    // The trace must talk about this model: every channel token must index a
    // connection, every delivery target must be an agent the model defines.
    for (const TraceEvent& e : t.events) {
        if (e.kind != TraceKind::Delivered && e.kind != TraceKind::InstructionFollowed)
            continue;
        int ch = channel_token(e.detail);
        if (ch >= n_channels) {
            return SimError{SimError::Kind::TraceModelMismatch,
                            "the trace references channel " + std::to_string(ch) +
                                " but the model has " + std::to_string(n_channels) +
                                " connections"};
        }
        if (e.kind == TraceKind::Delivered) {
            std::string path = strip_instance(e.subject);
            if (!ok(resolve(m, path))) {
                return SimError{SimError::Kind::TraceModelMismatch,
                                "the trace delivers to \"" + path +
                                    "\" which the model does not define"};
            }
        }
    }

    ConformanceReport report;

    // Measured conformity per channel that declares one: the fraction of
    // delivered instruction objects a rule actually fired on.
    for (int ch = 0; ch < n_channels; ++ch) {
        const Connection& conn = m.connections[ch];
        if (!conn.params.conformity) continue;

        ConformanceReport::ChannelConformity row;
        row.channel = ch;
        row.channel_text = conn.from.path + "." + conn.from.name + " -> " +
                           conn.to.path + "." + conn.to.name;
        row.declared = *conn.params.conformity;

        for (const TraceEvent& e : t.events) {
            if (channel_token(e.detail) != ch) continue;
            if (e.kind == TraceKind::Delivered && starts_with(e.object, "instruction"))
                ++row.delivered;
            else if (e.kind == TraceKind::InstructionFollowed)
                ++row.followed;
        }

        if (row.delivered == 0) {
            row.measured = 1.0;
            row.flagged = false;
            report.notes.push_back(row.channel_text + " carried no instructions");
        } else {
            row.measured = static_cast<double>(row.followed) /
                           static_cast<double>(row.delivered);
            row.flagged = std::fabs(row.measured - row.declared) > conformity_tol;
        }
        report.channels.push_back(std::move(row));
    }

    // Always-mode notification: at least one notification emitted per
    // committed decision. Checked only when the model declares the mode.
    if (carries_notification(m, NotificationMode::Always)) {
        int notifications = 0;
        int commits = 0;
        for (const TraceEvent& e : t.events) {
            if (e.kind == TraceKind::Emitted && starts_with(e.object, "notification(always)"))
                ++notifications;
            else if (e.kind == TraceKind::WindowCommitted)
                ++commits;
        }
        report.always_discipline_ok = notifications >= commits;
        if (!report.always_discipline_ok) {
            report.notes.push_back(
                std::to_string(commits) + " committed decisions but only " +
                std::to_string(notifications) + " always-mode notifications");
        }
    }

    // On-request notification: at any point in the trace the notifications
    // sent so far must not exceed the requests received so far.
    if (carries_notification(m, NotificationMode::OnRequest)) {
        int requests = 0;
        int sent = 0;
        for (const TraceEvent& e : t.events) {
            if (e.kind == TraceKind::Delivered && starts_with(e.object, "instruction(request)"))
                ++requests;
            else if (e.kind == TraceKind::Emitted &&
                     starts_with(e.object, "notification(on_request)")) {
                ++sent;
                if (sent > requests) {
                    report.on_request_discipline_ok = false;
                    report.notes.push_back(
                        "an on-request notification at tick " + std::to_string(e.tick) +
                        " precedes any matching request");
                    break;
                }
            }
        }
    }

    return report;
}

} // namespace amn
