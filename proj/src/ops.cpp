#include "amn/ops.hpp"

#include <set>

namespace amn {

bool compatible(const Modality& a, const Modality& b) {
    if (a.base != b.base) return false;
    if (a.base == ModalityBase::Generic) return a.tag == b.tag;
    return true;
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    if (path.empty()) return parts;
    std::size_t start = 0;
    while (true) {
        std::size_t dot = path.find('.', start);
        if (dot == std::string::npos) {
            parts.push_back(path.substr(start));
            break;
        }
        parts.push_back(path.substr(start, dot - start));
        start = dot + 1;
    }
    return parts;
}

bool path_within(const std::string& path, const std::string& prefix) {
    if (path == prefix) return true;
    return path.size() > prefix.size() && path.compare(0, prefix.size(), prefix) == 0 &&
           path[prefix.size()] == '.';
}

namespace {

// Follows a global reference one step; depth-limits reference chains so a
// cyclic model cannot hang lookups.
const AgentDef* deref(const Model& m, const AgentDef* def, int depth = 0) {
    if (!def || def->kind != AgentKind::GlobalRef) return def;
    if (depth > 64) return nullptr;
    auto it = m.globals.find(def->name);
    if (it == m.globals.end()) return nullptr;
    return deref(m, &it->second, depth + 1);
}

// Resolves a path to the defs along it. Returns nullptr on failure and
// reports ambiguity through `ambiguous`.
const AgentDef* resolve_ptr(const Model& m, const std::string& path, bool* ambiguous) {
    if (ambiguous) *ambiguous = false;
    auto parts = split_path(path);
    if (parts.empty()) return nullptr;

    const AgentDef* cur = nullptr;
    int matches = 0;
    for (const auto& r : m.roots)
        if (r.name == parts[0]) {
            cur = &r;
            ++matches;
        }
    if (matches == 0) {
        auto it = m.globals.find(parts[0]);
        if (it != m.globals.end()) {
            cur = &it->second;
            matches = 1;
        }
    }
    if (matches > 1) {
        if (ambiguous) *ambiguous = true;
        return nullptr;
    }
    if (!cur) return nullptr;

    for (std::size_t i = 1; i < parts.size(); ++i) {
        cur = deref(m, cur);
        if (!cur) return nullptr;
        const AgentDef* next = nullptr;
        int child_matches = 0;
        for (const auto& c : cur->children)
            if (c.name == parts[i]) {
                next = &c;
                ++child_matches;
            }
        if (child_matches > 1) {
            if (ambiguous) *ambiguous = true;
            return nullptr;
        }
        if (!next) return nullptr;
        cur = next;
    }
    return cur;
}

AgentDef* resolve_mutable(Model& m, const std::string& path) {
    auto parts = split_path(path);
    if (parts.empty()) return nullptr;
    AgentDef* cur = nullptr;
    for (auto& r : m.roots)
        if (r.name == parts[0]) cur = &r;
    if (!cur) {
        auto it = m.globals.find(parts[0]);
        if (it != m.globals.end()) cur = &it->second;
    }
    for (std::size_t i = 1; cur && i < parts.size(); ++i) {
        if (cur->kind == AgentKind::GlobalRef) {
            auto it = m.globals.find(cur->name);
            cur = it == m.globals.end() ? nullptr : &it->second;
            if (!cur) return nullptr;
        }
        AgentDef* next = nullptr;
        for (auto& c : cur->children)
            if (c.name == parts[i]) next = &c;
        cur = next;
    }
    return cur;
}

// True when expanding `def` under the set of global names currently being
// expanded would revisit one of them.
bool ref_cycle(const Model& m, const AgentDef& def, std::set<std::string>& active) {
    if (def.kind == AgentKind::GlobalRef) {
        if (active.count(def.name)) return true;
        auto it = m.globals.find(def.name);
        if (it == m.globals.end()) return false;
        active.insert(def.name);
        bool cyc = ref_cycle(m, it->second, active);
        active.erase(def.name);
        return cyc;
    }
    for (const auto& c : def.children)
        if (ref_cycle(m, c, active)) return true;
    return false;
}

bool model_has_ref_cycle(const Model& m) {
    std::set<std::string> active;
    for (const auto& r : m.roots)
        if (ref_cycle(m, r, active)) return true;
    for (const auto& [name, def] : m.globals) {
        active.insert(name);
        for (const auto& c : def.children)
            if (ref_cycle(m, c, active)) return true;
        active.erase(name);
    }
    return false;
}

void walk_def(const std::string& prefix, const AgentDef& def,
              const std::function<void(const std::string&, const AgentDef&)>& fn) {
    std::string path = prefix.empty() ? def.name : prefix + "." + def.name;
    fn(path, def);
    for (const auto& c : def.children) walk_def(path, c, fn);
}

} // namespace

OpResult<AgentDef> resolve(const Model& m, const std::string& path) {
    bool ambiguous = false;
    const AgentDef* def = resolve_ptr(m, path, &ambiguous);
    if (ambiguous)
        return StructureError{StructureError::Kind::AmbiguousGlobal,
                              "name \"" + path + "\" matches more than one definition"};
    if (!def)
        return StructureError{StructureError::Kind::NotFound,
                              "no agent at path \"" + path + "\""};
    const AgentDef* resolved = deref(m, def);
    if (!resolved)
        return StructureError{StructureError::Kind::NotFound,
                              "global reference \"" + def->name + "\" does not resolve"};
    return *resolved;
}

OpResult<Model> compose(const Model& m, const std::string& parent_path, AgentDef child) {
    Model out = m;
    if (parent_path.empty()) {
        for (const auto& r : out.roots)
            if (r.name == child.name)
                return StructureError{StructureError::Kind::DuplicateName,
                                      "root agent \"" + child.name + "\" already exists"};
        out.roots.push_back(std::move(child));
    } else {
        AgentDef* parent = resolve_mutable(out, parent_path);
        if (!parent)
            return StructureError{StructureError::Kind::NotFound,
                                  "no agent at path \"" + parent_path + "\""};
        if (parent->kind == AgentKind::Calling)
            return StructureError{StructureError::Kind::ParentIsCalling,
                                  "calling agent \"" + parent_path + "\" cannot contain children"};
        for (const auto& c : parent->children)
            if (c.name == child.name)
                return StructureError{StructureError::Kind::DuplicateName,
                                      "\"" + parent_path + "\" already has a child named \"" +
                                          child.name + "\""};
        parent->children.push_back(std::move(child));
    }
    if (model_has_ref_cycle(out))
        return StructureError{StructureError::Kind::CycleWouldForm,
                              "insertion would close a containment cycle"};
    return out;
}

OpResult<Model> remove(const Model& m, const std::string& path) {
    auto parts = split_path(path);
    if (parts.empty())
        return StructureError{StructureError::Kind::NotFound, "empty path"};
    Model out = m;

    bool removed = false;
    if (parts.size() == 1) {
        for (auto it = out.roots.begin(); it != out.roots.end(); ++it)
            if (it->name == parts[0]) {
                out.roots.erase(it);
                removed = true;
                break;
            }
    } else {
        std::string parent_path = path.substr(0, path.rfind('.'));
        AgentDef* parent = resolve_mutable(out, parent_path);
        if (parent) {
            for (auto it = parent->children.begin(); it != parent->children.end(); ++it)
                if (it->name == parts.back()) {
                    parent->children.erase(it);
                    removed = true;
                    break;
                }
        }
    }
    if (!removed)
        return StructureError{StructureError::Kind::NotFound,
                              "no agent at path \"" + path + "\""};

    std::vector<Connection> kept;
    for (auto& c : out.connections)
        if (!path_within(c.from.path, path) && !path_within(c.to.path, path))
            kept.push_back(std::move(c));
    out.connections = std::move(kept);
    return out;
}

OpResult<Model> connect(const Model& m, Endpoint from, Endpoint to, ConnectionStyle style,
                        ChannelParams params, std::vector<EventObjectSpec> carries) {
    auto from_def = resolve(m, from.path);
    if (!ok(from_def))
        return StructureError{StructureError::Kind::UnresolvedEndpoint,
                              "source agent \"" + from.path + "\" not found"};
    auto to_def = resolve(m, to.path);
    if (!ok(to_def))
        return StructureError{StructureError::Kind::UnresolvedEndpoint,
                              "target agent \"" + to.path + "\" not found"};

    const AgentDef& fd = value(from_def);
    const AgentDef& td = value(to_def);
    const Interface* out_iface = fd.find_interface(InterfaceDir::Actuator, from.name);
    if (!out_iface) {
        if (fd.find_interface(InterfaceDir::Sensor, from.name))
            return StructureError{StructureError::Kind::WrongDirection,
                                  "\"" + from.to_text() + "\" is a sensor; connections start at actuators"};
        return StructureError{StructureError::Kind::UnresolvedEndpoint,
                              "no actuator \"" + from.name + "\" on \"" + from.path + "\""};
    }
    const Interface* in_iface = td.find_interface(InterfaceDir::Sensor, to.name);
    if (!in_iface) {
        if (td.find_interface(InterfaceDir::Actuator, to.name))
            return StructureError{StructureError::Kind::WrongDirection,
                                  "\"" + to.to_text() + "\" is an actuator; connections end at sensors"};
        return StructureError{StructureError::Kind::UnresolvedEndpoint,
                              "no sensor \"" + to.name + "\" on \"" + to.path + "\""};
    }
    if (!compatible(out_iface->modality, in_iface->modality))
        return StructureError{StructureError::Kind::IncompatibleModality,
                              "modality " + out_iface->modality.to_text() + " does not match " +
                                  in_iface->modality.to_text()};
    for (auto p : {params.attention, params.reliability, params.conformity, params.security})
        if (p && (*p < 0.0 || *p > 1.0))
            return StructureError{StructureError::Kind::ParamOutOfRange,
                                  "channel parameters must lie in [0%, 100%]"};

    Connection c;
    c.from = std::move(from);
    c.to = std::move(to);
    c.style = style;
    c.params = params;
    c.carries = std::move(carries);
    // Carried objects inherit the actuator's media when unset.
    for (auto& obj : c.carries)
        if (!obj.media) obj.media = out_iface->modality;

    Model result = m;
    result.connections.push_back(std::move(c));
    return result;
}

OpResult<Model> add_global(const Model& m, AgentDef def) {
    Model out = m;
    if (out.globals.count(def.name))
        return StructureError{StructureError::Kind::DuplicateName,
                              "global \"" + def.name + "\" already exists"};
    std::string name = def.name;
    out.globals.emplace(std::move(name), std::move(def));
    if (model_has_ref_cycle(out))
        return StructureError{StructureError::Kind::CycleWouldForm,
                              "global definition closes a containment cycle"};
    return out;
}

Model merge(const Model& a, const Model& b) {
    Model out = a;
    out.roots.insert(out.roots.end(), b.roots.begin(), b.roots.end());
    for (const auto& [name, def] : b.globals) out.globals.emplace(name, def);
    out.connections.insert(out.connections.end(), b.connections.begin(), b.connections.end());
    for (const auto& [id, span] : b.source_spans) out.source_spans.emplace(id, span);
    return out;
}

void walk_agents(const Model& m,
                 const std::function<void(const std::string&, const AgentDef&)>& fn) {
    for (const auto& r : m.roots) walk_def("", r, fn);
}

std::optional<std::string> find_agent_path(const Model& m, const std::string& name) {
    std::optional<std::string> found;
    walk_agents(m, [&](const std::string& path, const AgentDef& def) {
        if (!found && def.name == name) found = path;
    });
    return found;
}

} // namespace amn
