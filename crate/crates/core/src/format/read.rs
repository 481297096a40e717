//! Decoding of parsed JSON into documents, with pointer-path diagnostics.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::json::{self, Diagnostic, KeyedPairs, Pos, Spanned, Value};
use super::{Document, GameBody, GameDocument, TraceDocument, FORMAT_VERSION};
use crate::epr::{
    chsh_of_counts, joint_labels, EnsembleReport, SignMap, UtilitySpec, PAIR_LABELS,
};
use crate::model::{
    AgentId, GameTree, InformationSet, Node, NodeId, NormalFormGame, PayoffVector,
};
use crate::solvers::{
    Elimination, EliminationRound, EliminationTrace, GuaranteeReport, TraceOutcome,
};
use crate::spacetime::{DecisionEvent, EventCoord, Menu, SpacetimeSpec};

pub fn document(text: &str) -> Result<Document, Diagnostic> {
    let root = json::parse(text)?;
    let mut fields = Fields::new(&root, String::new())?;
    let version_v = fields.require("version")?;
    let version = expect_i64(version_v, &fields.child("version"))?;
    if version != FORMAT_VERSION {
        return Err(Diagnostic::with_path(
            version_v.pos,
            fields.child("version"),
            format!("unsupported version {version}; this build reads version {FORMAT_VERSION}"),
        ));
    }
    let kind_v = fields.require("kind")?;
    let kind = expect_str(kind_v, &fields.child("kind"))?;
    match kind {
        "extensive" => Ok(Document::Game(GameDocument {
            body: GameBody::Extensive(extensive(fields)?),
        })),
        "normal" => Ok(Document::Game(GameDocument {
            body: GameBody::Normal(normal(fields)?),
        })),
        "spacetime" => Ok(Document::Game(GameDocument {
            body: GameBody::Spacetime(spacetime(fields)?),
        })),
        "trace" => Ok(Document::Trace(trace(fields)?)),
        "epr-report" => Ok(Document::Report(report(fields)?)),
        "epr-utilities" => Ok(Document::Utilities(utilities(fields)?)),
        other => Err(Diagnostic::with_path(
            kind_v.pos,
            fields.child("kind"),
            format!("unknown kind {other:?}"),
        )),
    }
}

// ---------------------------------------------------------------------------
// field access

struct Fields<'a> {
    pos: Pos,
    path: String,
    pairs: &'a KeyedPairs,
    used: Vec<bool>,
}

impl<'a> Fields<'a> {
    fn new(v: &'a Spanned<Value>, path: String) -> Result<Self, Diagnostic> {
        match &v.value {
            Value::Object(pairs) => Ok(Fields {
                pos: v.pos,
                path,
                used: vec![false; pairs.len()],
                pairs,
            }),
            other => Err(Diagnostic::with_path(
                v.pos,
                path,
                format!("expected an object, found {}", other.type_name()),
            )),
        }
    }

    fn child(&self, key: &str) -> String {
        format!("{}/{key}", self.path)
    }

    fn get(&mut self, key: &str) -> Option<&'a Spanned<Value>> {
        for (ix, (k, v)) in self.pairs.iter().enumerate() {
            if k.value == key {
                self.used[ix] = true;
                return Some(v);
            }
        }
        None
    }

    fn require(&mut self, key: &str) -> Result<&'a Spanned<Value>, Diagnostic> {
        self.get(key).ok_or_else(|| {
            Diagnostic::with_path(self.pos, self.path.clone(), format!("missing key {key:?}"))
        })
    }

    /// Strict mode: any key not consumed by the schema is an error.
    fn deny_unknown(self) -> Result<(), Diagnostic> {
        for (ix, (k, _)) in self.pairs.iter().enumerate() {
            if !self.used[ix] {
                return Err(Diagnostic::with_path(
                    k.pos,
                    format!("{}/{}", self.path, k.value),
                    format!("unknown key {:?}", k.value),
                ));
            }
        }
        Ok(())
    }
}

fn expect_str<'a>(v: &'a Spanned<Value>, path: &str) -> Result<&'a str, Diagnostic> {
    match &v.value {
        Value::String(s) => Ok(s),
        other => Err(Diagnostic::with_path(
            v.pos,
            path,
            format!("expected a string, found {}", other.type_name()),
        )),
    }
}

fn expect_i64(v: &Spanned<Value>, path: &str) -> Result<i64, Diagnostic> {
    match &v.value {
        Value::Number(n) => n.as_i64().ok_or_else(|| {
            Diagnostic::with_path(v.pos, path, "expected an integer in the 64-bit signed range")
        }),
        other => Err(Diagnostic::with_path(
            v.pos,
            path,
            format!("expected an integer, found {}", other.type_name()),
        )),
    }
}

fn expect_u64(v: &Spanned<Value>, path: &str) -> Result<u64, Diagnostic> {
    match &v.value {
        Value::Number(n) if !n.0.contains(['.', 'e', 'E', '-']) => {
            n.0.parse().map_err(|_| {
                Diagnostic::with_path(v.pos, path, "expected an unsigned 64-bit integer")
            })
        }
        other => Err(Diagnostic::with_path(
            v.pos,
            path,
            format!("expected an unsigned integer, found {}", other.type_name()),
        )),
    }
}

fn expect_bool(v: &Spanned<Value>, path: &str) -> Result<bool, Diagnostic> {
    match &v.value {
        Value::Bool(b) => Ok(*b),
        other => Err(Diagnostic::with_path(
            v.pos,
            path,
            format!("expected a boolean, found {}", other.type_name()),
        )),
    }
}

fn expect_array<'a>(v: &'a Spanned<Value>, path: &str) -> Result<&'a [Spanned<Value>], Diagnostic> {
    match &v.value {
        Value::Array(items) => Ok(items),
        other => Err(Diagnostic::with_path(
            v.pos,
            path,
            format!("expected an array, found {}", other.type_name()),
        )),
    }
}

fn expect_pairs<'a>(v: &'a Spanned<Value>, path: &str) -> Result<&'a KeyedPairs, Diagnostic> {
    match &v.value {
        Value::Object(pairs) => Ok(pairs),
        other => Err(Diagnostic::with_path(
            v.pos,
            path,
            format!("expected an object, found {}", other.type_name()),
        )),
    }
}

/// Exact rational: a JSON number, or a `"p/q"` string.
fn expect_rational(v: &Spanned<Value>, path: &str) -> Result<BigRational, Diagnostic> {
    match &v.value {
        Value::Number(n) => n.as_rational().ok_or_else(|| {
            Diagnostic::with_path(v.pos, path, "number out of the supported exact range")
        }),
        Value::String(s) => parse_fraction(s).ok_or_else(|| {
            Diagnostic::with_path(v.pos, path, format!("expected \"p/q\", found {s:?}"))
        }),
        other => Err(Diagnostic::with_path(
            v.pos,
            path,
            format!("expected a number or \"p/q\" string, found {}", other.type_name()),
        )),
    }
}

fn parse_fraction(s: &str) -> Option<BigRational> {
    let (p, q) = s.split_once('/')?;
    let numerator: BigInt = p.parse().ok()?;
    let denominator: BigInt = q.parse().ok()?;
    if denominator == BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(numerator, denominator))
}

/// Agent names, action and strategy labels, and event ids: non-empty, no
/// control characters, and none of `/ = , @ !` (those appear in generated
/// ids and table keys).
fn check_name(s: &str, pos: Pos, path: &str, what: &str) -> Result<(), Diagnostic> {
    if s.is_empty() {
        return Err(Diagnostic::with_path(pos, path, format!("{what} must not be empty")));
    }
    if let Some(bad) = s.chars().find(|c| (*c as u32) < 0x20 || "/=,@!".contains(*c)) {
        return Err(Diagnostic::with_path(
            pos,
            path,
            format!("{what} {s:?} contains forbidden character {bad:?}"),
        ));
    }
    Ok(())
}

/// Node and infoset ids: non-empty, no control characters.
fn check_id(s: &str, pos: Pos, path: &str, what: &str) -> Result<(), Diagnostic> {
    if s.is_empty() {
        return Err(Diagnostic::with_path(pos, path, format!("{what} must not be empty")));
    }
    if s.chars().any(|c| (c as u32) < 0x20) {
        return Err(Diagnostic::with_path(
            pos,
            path,
            format!("{what} must not contain control characters"),
        ));
    }
    Ok(())
}

fn agents_list(fields: &mut Fields) -> Result<Vec<AgentId>, Diagnostic> {
    let v = fields.require("agents")?;
    let path = fields.child("agents");
    let items = expect_array(v, &path)?;
    if items.is_empty() {
        return Err(Diagnostic::with_path(v.pos, path, "at least one agent is required"));
    }
    let mut agents = Vec::with_capacity(items.len());
    let mut seen = BTreeSet::new();
    for (ix, item) in items.iter().enumerate() {
        let item_path = format!("{path}/{ix}");
        let name = expect_str(item, &item_path)?;
        check_name(name, item.pos, &item_path, "agent name")?;
        if !seen.insert(name) {
            return Err(Diagnostic::with_path(
                item.pos,
                item_path,
                format!("duplicate agent {name:?}"),
            ));
        }
        agents.push(AgentId::new(name));
    }
    Ok(agents)
}

/// Payoff object: every agent exactly once, integer ranks.
fn payoff_vector(
    v: &Spanned<Value>,
    path: &str,
    agents: &[AgentId],
) -> Result<PayoffVector, Diagnostic> {
    let pairs = expect_pairs(v, path)?;
    let mut ranks: Vec<Option<i64>> = vec![None; agents.len()];
    for (key, value) in pairs {
        let entry_path = format!("{path}/{}", key.value);
        let agent = agents
            .iter()
            .position(|a| a.name() == key.value)
            .ok_or_else(|| {
                Diagnostic::with_path(
                    key.pos,
                    entry_path.clone(),
                    format!("unknown agent {:?}", key.value),
                )
            })?;
        ranks[agent] = Some(expect_i64(value, &entry_path)?);
    }
    for (ix, rank) in ranks.iter().enumerate() {
        if rank.is_none() {
            return Err(Diagnostic::with_path(
                v.pos,
                path,
                format!("missing payoff for agent {:?}", agents[ix].name()),
            ));
        }
    }
    Ok(PayoffVector::new(ranks.into_iter().flatten().collect()))
}

// ---------------------------------------------------------------------------
// extensive games

fn extensive(mut fields: Fields) -> Result<GameTree, Diagnostic> {
    let agents = agents_list(&mut fields)?;

    let root_v = fields.require("root")?;
    let root_path = fields.child("root");
    let root_id = expect_str(root_v, &root_path)?.to_owned();

    let nodes_v = fields.require("nodes")?;
    let nodes_path = fields.child("nodes");
    let node_items = expect_array(nodes_v, &nodes_path)?;

    enum Raw<'a> {
        Decision { owner: usize, actions: Vec<(String, &'a Spanned<Value>)> },
        Leaf(PayoffVector),
    }

    let mut node_ids: Vec<String> = Vec::with_capacity(node_items.len());
    let mut raw: Vec<Raw> = Vec::with_capacity(node_items.len());
    let mut index_of: BTreeMap<String, usize> = BTreeMap::new();
    for (ix, item) in node_items.iter().enumerate() {
        let item_path = format!("{nodes_path}/{ix}");
        let mut node = Fields::new(item, item_path.clone())?;
        let id_v = node.require("id")?;
        let id = expect_str(id_v, &node.child("id"))?.to_owned();
        check_id(&id, id_v.pos, &node.child("id"), "node id")?;
        if index_of.insert(id.clone(), ix).is_some() {
            return Err(Diagnostic::with_path(
                id_v.pos,
                node.child("id"),
                format!("duplicate node id {id:?}"),
            ));
        }
        let entry = match (node.get("payoffs"), node.get("agent")) {
            (Some(payoffs), None) => Raw::Leaf(payoff_vector(payoffs, &node.child("payoffs"), &agents)?),
            (None, Some(agent_v)) => {
                let agent_path = node.child("agent");
                let name = expect_str(agent_v, &agent_path)?;
                let owner = agents.iter().position(|a| a.name() == name).ok_or_else(|| {
                    Diagnostic::with_path(agent_v.pos, agent_path, format!("unknown agent {name:?}"))
                })?;
                let actions_v = node.require("actions")?;
                let actions_path = node.child("actions");
                let mut actions = Vec::new();
                for (label, child) in expect_pairs(actions_v, &actions_path)? {
                    let action_path = format!("{actions_path}/{}", label.value);
                    check_name(&label.value, label.pos, &action_path, "action label")?;
                    actions.push((label.value.clone(), child));
                }
                Raw::Decision { owner, actions }
            }
            _ => {
                return Err(Diagnostic::with_path(
                    item.pos,
                    item_path,
                    "a node is either a decision (\"agent\" and \"actions\") or a leaf (\"payoffs\")",
                ))
            }
        };
        node_ids.push(id);
        raw.push(entry);
        node.deny_unknown()?;
    }

    let mut nodes: Vec<Node> = Vec::with_capacity(raw.len());
    for (ix, entry) in raw.into_iter().enumerate() {
        match entry {
            Raw::Leaf(payoffs) => nodes.push(Node::Leaf { payoffs }),
            Raw::Decision { owner, actions } => {
                let mut labels = Vec::with_capacity(actions.len());
                let mut children = Vec::with_capacity(actions.len());
                for (label, child_v) in actions {
                    let child_path = format!("{nodes_path}/{ix}/actions/{label}");
                    let child_id = expect_str(child_v, &child_path)?;
                    let child = *index_of.get(child_id).ok_or_else(|| {
                        Diagnostic::with_path(
                            child_v.pos,
                            child_path,
                            format!("unknown node {child_id:?}"),
                        )
                    })?;
                    labels.push(label);
                    children.push(NodeId(child));
                }
                nodes.push(Node::Decision { owner, actions: labels, children });
            }
        }
    }

    let root = *index_of.get(&root_id).ok_or_else(|| {
        Diagnostic::with_path(root_v.pos, root_path, format!("unknown node {root_id:?}"))
    })?;

    let infosets_v = fields.require("infosets")?;
    let infosets_path = fields.child("infosets");
    let mut infosets = Vec::new();
    let mut infoset_ids = BTreeSet::new();
    for (ix, item) in expect_array(infosets_v, &infosets_path)?.iter().enumerate() {
        let item_path = format!("{infosets_path}/{ix}");
        let mut set = Fields::new(item, item_path)?;
        let id_v = set.require("id")?;
        let id = expect_str(id_v, &set.child("id"))?.to_owned();
        check_id(&id, id_v.pos, &set.child("id"), "information set id")?;
        if !infoset_ids.insert(id.clone()) {
            return Err(Diagnostic::with_path(
                id_v.pos,
                set.child("id"),
                format!("duplicate information set id {id:?}"),
            ));
        }
        let agent_v = set.require("agent")?;
        let name = expect_str(agent_v, &set.child("agent"))?;
        let owner = agents.iter().position(|a| a.name() == name).ok_or_else(|| {
            Diagnostic::with_path(agent_v.pos, set.child("agent"), format!("unknown agent {name:?}"))
        })?;
        let members_v = set.require("members")?;
        let members_path = set.child("members");
        let mut members = Vec::new();
        for (mix, member) in expect_array(members_v, &members_path)?.iter().enumerate() {
            let member_path = format!("{members_path}/{mix}");
            let member_id = expect_str(member, &member_path)?;
            let node = *index_of.get(member_id).ok_or_else(|| {
                Diagnostic::with_path(member.pos, member_path, format!("unknown node {member_id:?}"))
            })?;
            members.push(NodeId(node));
        }
        // the menu is what the first decision member offers; mismatching
        // members are a validation finding, not a parse failure
        let menu = members
            .iter()
            .find_map(|m| match &nodes[m.0] {
                Node::Decision { actions, .. } => Some(actions.clone()),
                Node::Leaf { .. } => None,
            })
            .unwrap_or_default();
        infosets.push(InformationSet { id, owner, members, menu });
        set.deny_unknown()?;
    }

    let pos = fields.pos;
    fields.deny_unknown()?;
    GameTree::new(agents, node_ids, nodes, NodeId(root), infosets)
        .map_err(|e| Diagnostic::with_path(pos, "", e.to_string()))
}

// ---------------------------------------------------------------------------
// normal-form games

fn normal(mut fields: Fields) -> Result<NormalFormGame, Diagnostic> {
    let agents = agents_list(&mut fields)?;

    let strategies_v = fields.require("strategies")?;
    let strategies_path = fields.child("strategies");
    let mut strategies: Vec<Option<Vec<String>>> = vec![None; agents.len()];
    for (key, value) in expect_pairs(strategies_v, &strategies_path)? {
        let entry_path = format!("{strategies_path}/{}", key.value);
        let agent = agents
            .iter()
            .position(|a| a.name() == key.value)
            .ok_or_else(|| {
                Diagnostic::with_path(key.pos, entry_path.clone(), format!("unknown agent {:?}", key.value))
            })?;
        let items = expect_array(value, &entry_path)?;
        if items.is_empty() {
            return Err(Diagnostic::with_path(value.pos, entry_path, "at least one strategy is required"));
        }
        let mut labels = Vec::with_capacity(items.len());
        for (ix, item) in items.iter().enumerate() {
            let label_path = format!("{entry_path}/{ix}");
            let label = expect_str(item, &label_path)?;
            check_name(label, item.pos, &label_path, "strategy label")?;
            if labels.iter().any(|l| l == label) {
                return Err(Diagnostic::with_path(
                    item.pos,
                    label_path,
                    format!("duplicate strategy {label:?}"),
                ));
            }
            labels.push(label.to_owned());
        }
        strategies[agent] = Some(labels);
    }
    for (ix, lists) in strategies.iter().enumerate() {
        if lists.is_none() {
            return Err(Diagnostic::with_path(
                strategies_v.pos,
                strategies_path,
                format!("missing strategies for agent {:?}", agents[ix].name()),
            ));
        }
    }
    let strategies: Vec<Vec<String>> = strategies.into_iter().flatten().collect();

    let table_v = fields.require("table")?;
    let table_path = fields.child("table");
    let mut table = BTreeMap::new();
    for (key, value) in expect_pairs(table_v, &table_path)? {
        let entry_path = format!("{table_path}/{}", key.value);
        let parts: Vec<&str> = key.value.split('/').collect();
        if parts.len() != agents.len() {
            return Err(Diagnostic::with_path(
                key.pos,
                entry_path,
                format!("profile keys need {} labels joined by '/'", agents.len()),
            ));
        }
        let mut profile = Vec::with_capacity(parts.len());
        for (agent, part) in parts.iter().enumerate() {
            let strategy = strategies[agent].iter().position(|s| s == part).ok_or_else(|| {
                Diagnostic::with_path(
                    key.pos,
                    entry_path.clone(),
                    format!("unknown strategy {part:?} for agent {:?}", agents[agent].name()),
                )
            })?;
            profile.push(strategy);
        }
        table.insert(profile, payoff_vector(value, &entry_path, &agents)?);
    }

    let game = NormalFormGame { agents, strategies, table };
    if game.table.len() != game.profile_count() {
        let missing = game
            .profiles()
            .into_iter()
            .find(|p| !game.table.contains_key(p))
            .expect("a profile is missing when the table is short");
        let key: Vec<&str> = missing
            .iter()
            .enumerate()
            .map(|(agent, &s)| game.strategies[agent][s].as_str())
            .collect();
        return Err(Diagnostic::with_path(
            table_v.pos,
            table_path,
            format!("table is missing profile {:?}", key.join("/")),
        ));
    }
    fields.deny_unknown()?;
    Ok(game)
}

// ---------------------------------------------------------------------------
// spacetime specs

fn spacetime(mut fields: Fields) -> Result<SpacetimeSpec, Diagnostic> {
    let agents = agents_list(&mut fields)?;

    let events_v = fields.require("events")?;
    let events_path = fields.child("events");
    let event_items = expect_array(events_v, &events_path)?;

    // first pass: ids and coordinates, so conditions can reference any event
    let mut ids: BTreeSet<String> = BTreeSet::new();
    for (ix, item) in event_items.iter().enumerate() {
        let item_path = format!("{events_path}/{ix}");
        let mut event = Fields::new(item, item_path)?;
        let id_v = event.require("id")?;
        let id = expect_str(id_v, &event.child("id"))?;
        check_name(id, id_v.pos, &event.child("id"), "event id")?;
        if !ids.insert(id.to_owned()) {
            return Err(Diagnostic::with_path(
                id_v.pos,
                event.child("id"),
                format!("duplicate event id {id:?}"),
            ));
        }
    }

    let mut events = Vec::with_capacity(event_items.len());
    for (ix, item) in event_items.iter().enumerate() {
        let item_path = format!("{events_path}/{ix}");
        let mut event = Fields::new(item, item_path)?;
        let id = expect_str(event.require("id")?, &event.child("id"))?.to_owned();

        let agent_v = event.require("agent")?;
        let name = expect_str(agent_v, &event.child("agent"))?;
        let agent = agents.iter().position(|a| a.name() == name).ok_or_else(|| {
            Diagnostic::with_path(agent_v.pos, event.child("agent"), format!("unknown agent {name:?}"))
        })?;

        let coord_v = event.require("coord")?;
        let coord_path = event.child("coord");
        let coord_items = expect_array(coord_v, &coord_path)?;
        if coord_items.len() != 4 {
            return Err(Diagnostic::with_path(
                coord_v.pos,
                coord_path,
                "coordinates are [t, x, y, z]",
            ));
        }
        let mut parts = Vec::with_capacity(4);
        for (cix, part) in coord_items.iter().enumerate() {
            parts.push(expect_rational(part, &format!("{coord_path}/{cix}"))?);
        }
        let coord = EventCoord::new(
            parts[0].clone(),
            parts[1].clone(),
            parts[2].clone(),
            parts[3].clone(),
        );

        let menus_v = event.require("menus")?;
        let menus_path = event.child("menus");
        let mut menus = Vec::new();
        for (mix, menu_item) in expect_array(menus_v, &menus_path)?.iter().enumerate() {
            let menu_path = format!("{menus_path}/{mix}");
            let mut menu = Fields::new(menu_item, menu_path.clone())?;
            let mut condition: Vec<(String, String)> = Vec::new();
            if let Some(when_v) = menu.get("when") {
                let when_path = menu.child("when");
                for (ref_key, action_v) in expect_pairs(when_v, &when_path)? {
                    let ref_path = format!("{when_path}/{}", ref_key.value);
                    if !ids.contains(&ref_key.value) {
                        return Err(Diagnostic::with_path(
                            ref_key.pos,
                            ref_path,
                            format!("unknown event {:?}", ref_key.value),
                        ));
                    }
                    let action = expect_str(action_v, &ref_path)?;
                    check_name(action, action_v.pos, &ref_path, "action label")?;
                    condition.push((ref_key.value.clone(), action.to_owned()));
                }
                condition.sort();
            }
            let actions_v = menu.require("actions")?;
            let actions_path = menu.child("actions");
            let mut actions = Vec::new();
            for (aix, action_v) in expect_array(actions_v, &actions_path)?.iter().enumerate() {
                let action_path = format!("{actions_path}/{aix}");
                let action = expect_str(action_v, &action_path)?;
                check_name(action, action_v.pos, &action_path, "action label")?;
                actions.push(action.to_owned());
            }
            menu.deny_unknown()?;
            menus.push(Menu { condition, actions });
        }
        event.deny_unknown()?;
        events.push(DecisionEvent { id, agent, coord, menus });
    }

    let payoffs_v = fields.require("payoffs")?;
    let payoffs_path = fields.child("payoffs");
    let mut payoffs = BTreeMap::new();
    for (ix, item) in expect_array(payoffs_v, &payoffs_path)?.iter().enumerate() {
        let item_path = format!("{payoffs_path}/{ix}");
        let mut entry = Fields::new(item, item_path.clone())?;
        let when_v = entry.require("when")?;
        let when_path = entry.child("when");
        let mut assignment: Vec<(String, String)> = Vec::new();
        for (ref_key, action_v) in expect_pairs(when_v, &when_path)? {
            let ref_path = format!("{when_path}/{}", ref_key.value);
            if !ids.contains(&ref_key.value) {
                return Err(Diagnostic::with_path(
                    ref_key.pos,
                    ref_path,
                    format!("unknown event {:?}", ref_key.value),
                ));
            }
            let action = expect_str(action_v, &ref_path)?;
            assignment.push((ref_key.value.clone(), action.to_owned()));
        }
        assignment.sort();
        let vector = payoff_vector(entry.require("payoffs")?, &entry.child("payoffs"), &agents)?;
        if payoffs.insert(assignment, vector).is_some() {
            return Err(Diagnostic::with_path(item.pos, item_path, "duplicate payoff entry"));
        }
        entry.deny_unknown()?;
    }

    fields.deny_unknown()?;
    Ok(SpacetimeSpec { agents, events, payoffs })
}

// ---------------------------------------------------------------------------
// traces

fn trace(mut fields: Fields) -> Result<TraceDocument, Diagnostic> {
    let concept_v = fields.require("concept")?;
    let concept = expect_str(concept_v, &fields.child("concept"))?.to_owned();

    let rounds_v = fields.require("rounds")?;
    let rounds_path = fields.child("rounds");
    let mut rounds = Vec::new();
    for (ix, item) in expect_array(rounds_v, &rounds_path)?.iter().enumerate() {
        let item_path = format!("{rounds_path}/{ix}");
        let mut round = Fields::new(item, item_path.clone())?;
        let index_v = round.require("index")?;
        let index = expect_i64(index_v, &round.child("index"))?;
        if index != (ix + 1) as i64 {
            return Err(Diagnostic::with_path(
                index_v.pos,
                round.child("index"),
                format!("round indices must increase from 1; expected {}", ix + 1),
            ));
        }

        let certain_v = round.require("certain")?;
        let certain_path = round.child("certain");
        let mut certain = Vec::new();
        for (cix, c) in expect_array(certain_v, &certain_path)?.iter().enumerate() {
            certain.push(expect_str(c, &format!("{certain_path}/{cix}"))?.to_owned());
        }

        let guarantees_v = round.require("guarantees")?;
        let guarantees_path = round.child("guarantees");
        let mut guarantees = Vec::new();
        for (gix, g) in expect_array(guarantees_v, &guarantees_path)?.iter().enumerate() {
            let g_path = format!("{guarantees_path}/{gix}");
            let mut guarantee = Fields::new(g, g_path.clone())?;
            let infoset = expect_str(guarantee.require("infoset")?, &guarantee.child("infoset"))?.to_owned();
            let agent = expect_str(guarantee.require("agent")?, &guarantee.child("agent"))?.to_owned();
            let minima_v = guarantee.require("minima")?;
            let minima_path = guarantee.child("minima");
            let mut per_action = Vec::new();
            for (action, min_v) in expect_pairs(minima_v, &minima_path)? {
                let min = expect_i64(min_v, &format!("{minima_path}/{}", action.value))?;
                per_action.push((action.value.clone(), min));
            }
            let maximin = expect_i64(guarantee.require("maximin")?, &guarantee.child("maximin"))?;
            let best_v = guarantee.require("best")?;
            let best_path = guarantee.child("best");
            let mut best = Vec::new();
            for (bix, b) in expect_array(best_v, &best_path)?.iter().enumerate() {
                best.push(expect_str(b, &format!("{best_path}/{bix}"))?.to_owned());
            }
            guarantee.deny_unknown()?;
            guarantees.push(GuaranteeReport { infoset, agent, per_action, maximin, best });
        }

        let eliminated_v = round.require("eliminated")?;
        let eliminated_path = round.child("eliminated");
        let mut eliminated = Vec::new();
        for (eix, e) in expect_array(eliminated_v, &eliminated_path)?.iter().enumerate() {
            let e_path = format!("{eliminated_path}/{eix}");
            let mut elimination = Fields::new(e, e_path.clone())?;
            eliminated.push(Elimination {
                outcome: expect_str(elimination.require("outcome")?, &elimination.child("outcome"))?.to_owned(),
                payoffs: payoff_array(&mut elimination)?,
                infoset: expect_str(elimination.require("infoset")?, &elimination.child("infoset"))?.to_owned(),
                agent: expect_str(elimination.require("agent")?, &elimination.child("agent"))?.to_owned(),
                payoff: expect_i64(elimination.require("payoff")?, &elimination.child("payoff"))?,
                maximin: expect_i64(elimination.require("maximin")?, &elimination.child("maximin"))?,
            });
            elimination.deny_unknown()?;
        }
        if eliminated.is_empty() && ix + 1 < expect_array(rounds_v, &rounds_path)?.len() {
            return Err(Diagnostic::with_path(
                item.pos,
                item_path,
                "only a final fixpoint round may eliminate nothing",
            ));
        }
        round.deny_unknown()?;
        rounds.push(EliminationRound { index: index as usize, certain, guarantees, eliminated });
    }

    let surviving_v = fields.require("surviving")?;
    let surviving_path = fields.child("surviving");
    let mut surviving = Vec::new();
    for (six, s) in expect_array(surviving_v, &surviving_path)?.iter().enumerate() {
        let s_path = format!("{surviving_path}/{six}");
        let mut survivor = Fields::new(s, s_path)?;
        surviving.push(TraceOutcome {
            id: expect_str(survivor.require("outcome")?, &survivor.child("outcome"))?.to_owned(),
            payoffs: payoff_array(&mut survivor)?,
        });
        survivor.deny_unknown()?;
    }

    let pinned_v = fields.require("pinned")?;
    let pinned_path = fields.child("pinned");
    let mut pinned = Vec::new();
    for (infoset, action_v) in expect_pairs(pinned_v, &pinned_path)? {
        let action = expect_str(action_v, &format!("{pinned_path}/{}", infoset.value))?;
        pinned.push((infoset.value.clone(), action.to_owned()));
    }

    let undefined_v = fields.require("undefined")?;
    let undefined_path = fields.child("undefined");
    let mut undefined = Vec::new();
    for (uix, u) in expect_array(undefined_v, &undefined_path)?.iter().enumerate() {
        undefined.push(expect_str(u, &format!("{undefined_path}/{uix}"))?.to_owned());
    }

    fields.deny_unknown()?;
    Ok(TraceDocument {
        concept,
        trace: EliminationTrace { rounds, surviving, pinned, undefined },
    })
}

fn payoff_array(fields: &mut Fields) -> Result<PayoffVector, Diagnostic> {
    let v = fields.require("payoffs")?;
    let path = fields.child("payoffs");
    let mut ranks = Vec::new();
    for (ix, item) in expect_array(v, &path)?.iter().enumerate() {
        ranks.push(expect_i64(item, &format!("{path}/{ix}"))?);
    }
    Ok(PayoffVector::new(ranks))
}

// ---------------------------------------------------------------------------
// ensemble reports

fn report(mut fields: Fields) -> Result<EnsembleReport, Diagnostic> {
    let samples = expect_u64(fields.require("samples")?, &fields.child("samples"))?;
    let seed = expect_u64(fields.require("seed")?, &fields.child("seed"))?;
    let model = expect_str(fields.require("model")?, &fields.child("model"))?.to_owned();
    let shared_universe =
        expect_bool(fields.require("shared_universe")?, &fields.child("shared_universe"))?;
    let pte_found = expect_u64(fields.require("pte_found")?, &fields.child("pte_found"))?;
    let no_pte_v = fields.require("no_pte")?;
    let no_pte = expect_u64(no_pte_v, &fields.child("no_pte"))?;
    if pte_found.checked_add(no_pte) != Some(samples) {
        return Err(Diagnostic::with_path(
            no_pte_v.pos,
            fields.child("no_pte"),
            "pte_found and no_pte must sum to samples",
        ));
    }

    let counts_v = fields.require("outcome_counts")?;
    let counts_path = fields.child("outcome_counts");
    let counts = pair_table(counts_v, &counts_path, expect_u64)?;
    let realized: u64 = counts.iter().flatten().sum();
    if realized != pte_found {
        return Err(Diagnostic::with_path(
            counts_v.pos,
            counts_path,
            "outcome counts must sum to pte_found",
        ));
    }

    let axis_v = fields.require("axis_counts")?;
    let axis_path = fields.child("axis_counts");
    for (pair, (key, value)) in expect_pairs(axis_v, &axis_path)?.iter().enumerate() {
        let entry_path = format!("{axis_path}/{}", key.value);
        if pair >= 4 || key.value != PAIR_LABELS[pair] {
            return Err(Diagnostic::with_path(
                key.pos,
                entry_path,
                format!("expected the four pair keys {PAIR_LABELS:?} in order"),
            ));
        }
        let stated = expect_u64(value, &entry_path)?;
        let derived: u64 = counts[pair].iter().sum();
        if stated != derived {
            return Err(Diagnostic::with_path(
                value.pos,
                entry_path,
                format!("axis count {stated} does not match outcome counts ({derived})"),
            ));
        }
    }

    let dist_v = fields.require("distributions")?;
    let dist_path = fields.child("distributions");
    let distributions = pair_table_nullable(dist_v, &dist_path, expect_rational)?;

    let chsh_v = fields.require("chsh")?;
    let chsh_path = fields.child("chsh");
    let mut chsh_fields = Fields::new(chsh_v, chsh_path.clone())?;
    let sign_v = chsh_fields.require("sign_map")?;
    let sign_str = expect_str(sign_v, &chsh_fields.child("sign_map"))?;
    let sign_map = SignMap::parse(sign_str).ok_or_else(|| {
        Diagnostic::with_path(
            sign_v.pos,
            chsh_fields.child("sign_map"),
            "sign map is four '+' or '-' characters",
        )
    })?;
    let correlators_v = chsh_fields.require("correlators")?;
    let correlators_path = chsh_fields.child("correlators");
    let correlators = pair_list_nullable(correlators_v, &correlators_path, expect_rational)?;
    let s_v = chsh_fields.require("s")?;
    let s = match &s_v.value {
        Value::Null => None,
        _ => Some(expect_rational(s_v, &chsh_fields.child("s"))?),
    };
    chsh_fields.deny_unknown()?;

    let report = EnsembleReport {
        samples,
        seed,
        model,
        shared_universe,
        no_pte,
        counts,
        chsh: chsh_of_counts(&counts, sign_map),
    };
    // stored statistics must match what the counts derive
    for pair in 0..4 {
        let derived = report.conditional(pair);
        let stated = &distributions[pair];
        let matches = match (&derived, stated) {
            (None, None) => true,
            (Some(d), Some(s)) => d.iter().zip(s).all(|(a, b)| a == b),
            _ => false,
        };
        if !matches {
            return Err(Diagnostic::with_path(
                dist_v.pos,
                dist_path,
                format!("distribution for {:?} does not match outcome counts", PAIR_LABELS[pair]),
            ));
        }
        if report.chsh.correlators[pair] != correlators[pair] {
            return Err(Diagnostic::with_path(
                correlators_v.pos,
                correlators_path,
                format!("correlator for {:?} does not match outcome counts", PAIR_LABELS[pair]),
            ));
        }
    }
    if report.chsh.s != s {
        return Err(Diagnostic::with_path(
            s_v.pos,
            chsh_fields_path(&fields),
            "s does not match the correlators",
        ));
    }

    fields.deny_unknown()?;
    Ok(report)
}

fn chsh_fields_path(fields: &Fields) -> String {
    format!("{}/chsh/s", fields.path)
}

/// The four pair keys in canonical order, each mapping to the four joint
/// outcome keys in canonical order.
fn pair_table<T: Copy + Default>(
    v: &Spanned<Value>,
    path: &str,
    decode: impl Fn(&Spanned<Value>, &str) -> Result<T, Diagnostic>,
) -> Result<[[T; 4]; 4], Diagnostic> {
    let pairs = expect_pairs(v, path)?;
    if pairs.len() != 4 {
        return Err(Diagnostic::with_path(v.pos, path, format!("expected the four pair keys {PAIR_LABELS:?}")));
    }
    let mut out = [[T::default(); 4]; 4];
    for (pair, (key, value)) in pairs.iter().enumerate() {
        let entry_path = format!("{path}/{}", key.value);
        if key.value != PAIR_LABELS[pair] {
            return Err(Diagnostic::with_path(
                key.pos,
                entry_path,
                format!("expected the four pair keys {PAIR_LABELS:?} in order"),
            ));
        }
        let labels = joint_labels(pair);
        let joints = expect_pairs(value, &entry_path)?;
        if joints.len() != 4 {
            return Err(Diagnostic::with_path(value.pos, entry_path, format!("expected the joint keys {labels:?}")));
        }
        for (joint, (jkey, jvalue)) in joints.iter().enumerate() {
            let joint_path = format!("{entry_path}/{}", jkey.value);
            if jkey.value != labels[joint] {
                return Err(Diagnostic::with_path(
                    jkey.pos,
                    joint_path,
                    format!("expected the joint keys {labels:?} in order"),
                ));
            }
            out[pair][joint] = decode(jvalue, &joint_path)?;
        }
    }
    Ok(out)
}

/// Like [`pair_table`] but a pair's whole table may be `null`.
fn pair_table_nullable<T: Clone>(
    v: &Spanned<Value>,
    path: &str,
    decode: impl Fn(&Spanned<Value>, &str) -> Result<T, Diagnostic>,
) -> Result<[Option<[T; 4]>; 4], Diagnostic> {
    let pairs = expect_pairs(v, path)?;
    if pairs.len() != 4 {
        return Err(Diagnostic::with_path(v.pos, path, format!("expected the four pair keys {PAIR_LABELS:?}")));
    }
    let mut out: [Option<[T; 4]>; 4] = [None, None, None, None];
    for (pair, (key, value)) in pairs.iter().enumerate() {
        let entry_path = format!("{path}/{}", key.value);
        if key.value != PAIR_LABELS[pair] {
            return Err(Diagnostic::with_path(
                key.pos,
                entry_path,
                format!("expected the four pair keys {PAIR_LABELS:?} in order"),
            ));
        }
        if matches!(value.value, Value::Null) {
            continue;
        }
        let labels = joint_labels(pair);
        let joints = expect_pairs(value, &entry_path)?;
        if joints.len() != 4 {
            return Err(Diagnostic::with_path(value.pos, entry_path, format!("expected the joint keys {labels:?}")));
        }
        let mut row: Vec<T> = Vec::with_capacity(4);
        for (joint, (jkey, jvalue)) in joints.iter().enumerate() {
            let joint_path = format!("{entry_path}/{}", jkey.value);
            if jkey.value != labels[joint] {
                return Err(Diagnostic::with_path(
                    jkey.pos,
                    joint_path,
                    format!("expected the joint keys {labels:?} in order"),
                ));
            }
            row.push(decode(jvalue, &joint_path)?);
        }
        out[pair] = Some(std::array::from_fn(|i| row[i].clone()));
    }
    Ok(out)
}

/// Pair-keyed object of scalar-or-null values in canonical order.
fn pair_list_nullable<T>(
    v: &Spanned<Value>,
    path: &str,
    decode: impl Fn(&Spanned<Value>, &str) -> Result<T, Diagnostic>,
) -> Result<[Option<T>; 4], Diagnostic> {
    let pairs = expect_pairs(v, path)?;
    if pairs.len() != 4 {
        return Err(Diagnostic::with_path(v.pos, path, format!("expected the four pair keys {PAIR_LABELS:?}")));
    }
    let mut out: [Option<T>; 4] = [None, None, None, None];
    for (pair, (key, value)) in pairs.iter().enumerate() {
        let entry_path = format!("{path}/{}", key.value);
        if key.value != PAIR_LABELS[pair] {
            return Err(Diagnostic::with_path(
                key.pos,
                entry_path,
                format!("expected the four pair keys {PAIR_LABELS:?} in order"),
            ));
        }
        if !matches!(value.value, Value::Null) {
            out[pair] = Some(decode(value, &entry_path)?);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// fixed utilities

fn utilities(mut fields: Fields) -> Result<UtilitySpec, Diagnostic> {
    let mut spec = UtilitySpec::default();
    for (role, slot) in [("a", 0), ("b", 1), ("u", 2), ("v", 3)] {
        if let Some(v) = fields.get(role) {
            let path = fields.child(role);
            let items = expect_array(v, &path)?;
            if items.len() != 16 {
                return Err(Diagnostic::with_path(v.pos, path, "a ranking lists 16 ranks"));
            }
            let mut ranks = Vec::with_capacity(16);
            for (ix, item) in items.iter().enumerate() {
                ranks.push(expect_i64(item, &format!("{path}/{ix}"))?);
            }
            match slot {
                0 => spec.a = Some(ranks),
                1 => spec.b = Some(ranks),
                2 => spec.u = Some(ranks),
                _ => spec.v = Some(ranks),
            }
        }
    }
    if let Some(v) = fields.get("shared_universe") {
        spec.shared_universe = expect_bool(v, &fields.child("shared_universe"))?;
    }
    fields.deny_unknown()?;
    Ok(spec)
}
