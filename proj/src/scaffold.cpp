#include <algorithm>

#include "amn/autonomy.hpp"

namespace amn {

// Builds a small "System" with a tagged human, a machine, and a calling
// work-sink agent, wired so the extracted profile sits exactly at the
// requested level.
Model scaffold_level(int level, const std::string& human_name_in,
                     const std::string& machine_name_in) {
    const int lv = std::clamp(level, 1, 20);
    std::string hn = human_name_in.empty() ? "Operator" : human_name_in;
    std::string mn = machine_name_in.empty() ? "Worker" : machine_name_in;
    if (mn == hn) mn += "2"; // keep sibling names distinct

    const Modality bus = Modality::generic("bus");
    auto sensor = [&](std::string n) { return Interface{InterfaceDir::Sensor, std::move(n), bus}; };
    auto actuator = [&](std::string n) {
        return Interface{InterfaceDir::Actuator, std::move(n), bus};
    };
    auto obj = [](Specialization s, Quant q) {
        EventObjectSpec o;
        o.spec = std::move(s);
        o.quant = q;
        return o;
    };
    auto trig = [](Specialization s) {
        EventPattern p;
        p.spec = std::move(s);
        return p;
    };
    auto mk_rule = [](std::string name, EventPattern t, Actions a) {
        Rule r;
        r.name = std::move(name);
        r.trigger = std::move(t);
        r.actions = std::move(a);
        return r;
    };

    const EventObjectSpec task1 = obj(Specialization::task(), Quant::Single);
    const EventObjectSpec metric1 = obj(Specialization::metric(), Quant::Single);
    const EventObjectSpec veto1 = obj(Specialization::reaction_of(ReactionKind::Veto), Quant::Single);
    const EventObjectSpec accept1 =
        obj(Specialization::reaction_of(ReactionKind::Acceptance), Quant::Single);
    const EventObjectSpec boot1 = obj(
        Specialization::instruction_of(InstructionKind{InstructionKind::Base::Instantiate, {}}),
        Quant::Single);

    AgentDef human;
    human.name = hn;
    human.nature.functional_type = "human";
    human.sensors.push_back(sensor("eyes"));
    human.actuators.push_back(actuator("hand"));

    AgentDef machine;
    machine.name = mn;
    machine.sensors.push_back(sensor("in_bus"));
    machine.actuators.push_back(actuator("out"));
    machine.actuators.push_back(actuator("report"));

    AgentDef env;
    env.name = "Env";
    env.kind = AgentKind::Calling;
    env.sensors.push_back(sensor("intake"));

    const std::string hp = "System." + hn;
    const std::string mp = "System." + mn;
    const std::string ep = "System.Env";

    std::vector<Connection> links;
    auto link = [&](const std::string& fp, std::string fn, const std::string& tp, std::string tn,
                    std::vector<EventObjectSpec> carries) {
        Connection c;
        c.from = {fp, std::move(fn)};
        c.to = {tp, std::move(tn)};
        c.carries = std::move(carries);
        links.push_back(std::move(c));
    };

    // Shared building blocks.
    auto decide_rule = mk_rule("run", trig(Specialization::task()),
                               {Action::select(SelectStrategy::First),
                                Action::emit("out", task1), Action::commit()});
    auto relay_rule =
        mk_rule("run", trig(Specialization::task()), {Action::emit("out", task1)});
    auto human_hands_work = [&](std::vector<EventObjectSpec> extra = {}) {
        std::vector<EventObjectSpec> carries{task1};
        for (auto& e : extra) carries.push_back(std::move(e));
        link(hp, "hand", mp, "in_bus", std::move(carries));
    };
    auto machine_executes = [&] { link(mp, "out", ep, "intake", {task1}); };
    auto machine_reports_metric = [&](const char* act) {
        machine.actuators.push_back(actuator(act));
        link(mp, act, hp, "eyes", {metric1});
    };

    switch (lv) {
        case 1: // machine works alone, unobserved
            machine.behavior.rules = {decide_rule};
            env.actuators.push_back(actuator("dispatch"));
            link(ep, "dispatch", mp, "in_bus", {task1});
            machine_executes();
            break;
        case 2: // alone, human sees one of two reading points
            machine.behavior.rules = {decide_rule};
            human_hands_work();
            machine_executes();
            machine_reports_metric("stat_a");
            machine.actuators.push_back(actuator("stat_b"));
            link(mp, "stat_b", ep, "intake", {metric1});
            break;
        case 3: // alone, human sees every reading point
            machine.behavior.rules = {decide_rule};
            human_hands_work();
            machine_executes();
            machine_reports_metric("stat_a");
            break;
        case 4: { // alone, but a random share of cases is handed off
            Rule r = decide_rule;
            r.delegation = RandomDelegation{0.25, "helper"};
            machine.behavior.rules = {r};
            machine.actuators.push_back(actuator("helper"));
            human_hands_work();
            machine_executes();
            link(mp, "helper", ep, "intake", {task1});
            break;
        }
        case 5: // human may call any decision off
            machine.behavior.rules = {decide_rule};
            human_hands_work({veto1});
            machine_executes();
            break;
        case 6: // human may call a decision off within a window
            machine.behavior.rules = {mk_rule(
                "run", trig(Specialization::task()),
                {Action::select(SelectStrategy::First),
                 Action::window(14, {Action::emit("out", task1), Action::commit()})})};
            human_hands_work({veto1});
            machine_executes();
            break;
        case 7: // machine waits for sign-off
            machine.behavior.rules = {
                mk_rule("propose", trig(Specialization::task()),
                        {Action::select(SelectStrategy::First)}),
                mk_rule("finalize", trig(Specialization::reaction_of(ReactionKind::Acceptance)),
                        {Action::emit("out", task1), Action::commit()})};
            human_hands_work({accept1});
            machine_executes();
            break;
        case 8: // machine puts a single option to the human
            link(mp, "report", hp, "eyes", {obj(Specialization::candidates(), Quant::Single)});
            break;
        case 9: // machine offers a shortlist
            link(mp, "report", hp, "eyes", {obj(Specialization::candidates(), Quant::Selection)});
            break;
        case 10: // machine lays out every option
            link(mp, "report", hp, "eyes", {obj(Specialization::candidates(), Quant::All)});
            break;
        case 11: // options built jointly, human decides
            link(hp, "hand", mp, "in_bus", {obj(Specialization::candidates(), Quant::All)});
            link(mp, "report", hp, "eyes", {obj(Specialization::candidates(), Quant::Selection)});
            break;
        case 12: // human supplies options, machine picks and acts
            machine.behavior.rules = {mk_rule("run", trig(Specialization::candidates()),
                                              {Action::select(SelectStrategy::First),
                                               Action::emit("out", task1), Action::commit()})};
            link(hp, "hand", mp, "in_bus", {obj(Specialization::candidates(), Quant::All)});
            machine_executes();
            break;
        case 13: // machine reports at its own discretion
            machine.behavior.rules = {relay_rule};
            link(mp, "report", hp, "eyes",
                 {obj(Specialization::notification_of(NotificationMode::OwnDiscretion),
                      Quant::Single)});
            machine_executes();
            break;
        case 14: // machine reports when asked
            machine.behavior.rules = {relay_rule};
            link(mp, "report", hp, "eyes",
                 {obj(Specialization::notification_of(NotificationMode::OnRequest), Quant::Single)});
            machine_executes();
            break;
        case 15: // machine reports every decision
            machine.behavior.rules = {relay_rule};
            link(mp, "report", hp, "eyes",
                 {obj(Specialization::notification_of(NotificationMode::Always), Quant::Single)});
            machine_executes();
            break;
        case 16: // work handed over part-way: both sides execute
            human.actuators.push_back(actuator("tools"));
            human_hands_work();
            machine_executes();
            link(hp, "tools", ep, "intake", {task1});
            break;
        case 17: // human hands the work over, machine runs unwatched
            machine.behavior.rules = {relay_rule};
            human_hands_work();
            machine_executes();
            break;
        case 18: // human hands the work over and watches everything
            machine.behavior.rules = {relay_rule};
            human_hands_work();
            machine_executes();
            machine_reports_metric("stat_a");
            break;
        case 19: // shared authority: machine picks, human's go-ahead commits
            machine.behavior.rules = {
                mk_rule("pick", trig(Specialization::task()),
                        {Action::select(SelectStrategy::First)}),
                mk_rule("go", trig(Specialization::instruction_of(
                                  InstructionKind{InstructionKind::Base::Instantiate, {}})),
                        {Action::emit("out", task1), Action::commit()})};
            human_hands_work({boot1});
            machine_executes();
            break;
        case 20: // human works alone
            human.behavior.rules = {
                mk_rule("run", trig(Specialization::task()), {Action::emit("hand", task1)})};
            link(hp, "hand", ep, "intake", {task1});
            break;
    }

    AgentDef system;
    system.name = "System";
    system.children = {std::move(human), std::move(machine), std::move(env)};

    Model m;
    m.roots.push_back(std::move(system));
    m.connections = std::move(links);
    return m;
}

} // namespace amn
