//! Minkowski causal structure and the compilation of spacetime decision
//! setups into game trees with information sets.
//!
//! Coordinates are exact rationals in natural units (c = 1), so interval-sign
//! classification needs no tolerance. Events are linearized by coordinate
//! time with ties broken by event id; the information-set grouping makes the
//! solve results independent of that tie-break (two nodes of the same event
//! share a set exactly when their histories agree on the event's strict past
//! light cone).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::model::{AgentId, GameTree, InformationSet, ModelError, Node, NodeId, PayoffVector};

/// A point in Minkowski spacetime, natural units.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventCoord {
    pub t: BigRational,
    pub x: BigRational,
    pub y: BigRational,
    pub z: BigRational,
}

impl EventCoord {
    pub fn new(t: BigRational, x: BigRational, y: BigRational, z: BigRational) -> Self {
        EventCoord { t, x, y, z }
    }

    pub fn from_ints(t: i64, x: i64, y: i64, z: i64) -> Self {
        let r = |v: i64| BigRational::from(BigInt::from(v));
        EventCoord::new(r(t), r(x), r(y), r(z))
    }
}

impl fmt::Display for EventCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.t, self.x, self.y, self.z)
    }
}

/// Sign classification of the Minkowski interval between two events.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CausalRelation {
    /// Positive interval: one event can influence the other.
    Timelike,
    /// Negative interval: no signal can connect them.
    Spacelike,
    /// Zero interval between distinct points: connected only at light speed.
    Lightlike,
    /// The same point.
    Identical,
}

impl fmt::Display for CausalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CausalRelation::Timelike => "timelike",
            CausalRelation::Spacelike => "spacelike",
            CausalRelation::Lightlike => "lightlike",
            CausalRelation::Identical => "identical",
        })
    }
}

/// The squared interval Δt² − Δx² − Δy² − Δz².
pub fn interval(a: &EventCoord, b: &EventCoord) -> BigRational {
    let dt = &a.t - &b.t;
    let dx = &a.x - &b.x;
    let dy = &a.y - &b.y;
    let dz = &a.z - &b.z;
    &dt * &dt - &dx * &dx - &dy * &dy - &dz * &dz
}

/// Classifies the interval sign; symmetric and translation-invariant.
pub fn causal_relation(a: &EventCoord, b: &EventCoord) -> CausalRelation {
    let s = interval(a, b);
    if s.is_positive() {
        CausalRelation::Timelike
    } else if s.is_negative() {
        CausalRelation::Spacelike
    } else if a == b {
        CausalRelation::Identical
    } else {
        CausalRelation::Lightlike
    }
}

/// True when `earlier` lies in the strict past light cone of `later`: a
/// timelike or lightlike relation with strictly smaller coordinate time.
pub fn in_strict_past(earlier: &EventCoord, later: &EventCoord) -> bool {
    matches!(
        causal_relation(earlier, later),
        CausalRelation::Timelike | CausalRelation::Lightlike
    ) && earlier.t < later.t
}

/// A conditional action menu: the event offers `actions` when every listed
/// past decision went the required way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Menu {
    /// Conjunction of (event id, required action); empty means always.
    pub condition: Vec<(String, String)>,
    pub actions: Vec<String>,
}

/// A decision point located in spacetime.
///
/// Menus must be mutually exclusive; when none matches, the event does not
/// occur on that branch and contributes no move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionEvent {
    pub id: String,
    /// Index into the spec's agent list.
    pub agent: usize,
    pub coord: EventCoord,
    pub menus: Vec<Menu>,
}

/// A complete action assignment over the events that occur on one branch,
/// sorted by event id.
pub type Assignment = Vec<(String, String)>;

/// An event's view of its strict causal past: (event id, action or absent).
type ConeView = Vec<(String, Option<String>)>;

/// Agents, located decision events, and payoffs for every realizable world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacetimeSpec {
    pub agents: Vec<AgentId>,
    pub events: Vec<DecisionEvent>,
    /// Keyed by assignment (sorted by event id); must cover exactly the
    /// realizable assignments.
    pub payoffs: BTreeMap<Assignment, PayoffVector>,
}

impl SpacetimeSpec {
    pub fn event(&self, id: &str) -> Option<&DecisionEvent> {
        self.events.iter().find(|e| e.id == id)
    }

    /// Event indices sorted by (coordinate time, id) — the linearization the
    /// compiler branches in.
    pub fn time_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.events.len()).collect();
        order.sort_by(|&a, &b| {
            self.events[a]
                .coord
                .t
                .cmp(&self.events[b].coord.t)
                .then_with(|| self.events[a].id.cmp(&self.events[b].id))
        });
        order
    }
}

/// A broken spacetime-spec rule; see [`validate_spec`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecViolation {
    DuplicateEventId { event: String },
    UnknownAgent { event: String },
    EmptyActions { event: String },
    DuplicateAction { event: String, action: String },
    /// A menu condition names an event that does not exist.
    UnknownReference { event: String, reference: String },
    /// A menu condition names an event outside the strict past light cone.
    NonPastReference { event: String, reference: String, relation: CausalRelation },
    /// Several menus of one event match the same realizable history.
    OverlappingConditions { event: String, witness: Assignment },
    /// A realizable assignment has no payoff entry.
    MissingPayoff { assignment: Assignment },
    /// A payoff entry keyed by an assignment that can never occur.
    UnrealizablePayoff { assignment: Assignment },
    /// A payoff vector whose length differs from the agent count.
    PayoffLength { assignment: Assignment, got: usize, want: usize },
}

fn fmt_assignment(a: &Assignment, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if a.is_empty() {
        return f.write_str("(empty)");
    }
    for (i, (event, action)) in a.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{event}={action}")?;
    }
    Ok(())
}

struct DisplayAssignment<'a>(&'a Assignment);

impl fmt::Display for DisplayAssignment<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_assignment(self.0, f)
    }
}

impl fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SpecViolation::*;
        match self {
            DuplicateEventId { event } => write!(f, "duplicate event id {event:?}"),
            UnknownAgent { event } => write!(f, "event {event:?} names an unknown agent"),
            EmptyActions { event } => write!(f, "event {event:?} has a menu with no actions"),
            DuplicateAction { event, action } => {
                write!(f, "event {event:?} repeats action {action:?} within a menu")
            }
            UnknownReference { event, reference } => {
                write!(f, "event {event:?} conditions on unknown event {reference:?}")
            }
            NonPastReference { event, reference, relation } => write!(
                f,
                "event {event:?} conditions on {reference:?}, which is {relation} rather than in its strict past light cone"
            ),
            OverlappingConditions { event, witness } => write!(
                f,
                "menus of event {event:?} overlap on history {}",
                DisplayAssignment(witness)
            ),
            MissingPayoff { assignment } => write!(
                f,
                "no payoff entry for realizable world {}",
                DisplayAssignment(assignment)
            ),
            UnrealizablePayoff { assignment } => write!(
                f,
                "payoff entry {} does not match any realizable world",
                DisplayAssignment(assignment)
            ),
            PayoffLength { assignment, got, want } => write!(
                f,
                "payoff entry {} has {got} entries for {want} agents",
                DisplayAssignment(assignment)
            ),
        }
    }
}

impl SpecViolation {
    /// Pointer-style location of the offending element.
    pub fn path(&self) -> String {
        use SpecViolation::*;
        match self {
            DuplicateEventId { event }
            | UnknownAgent { event }
            | EmptyActions { event }
            | DuplicateAction { event, .. }
            | UnknownReference { event, .. }
            | NonPastReference { event, .. }
            | OverlappingConditions { event, .. } => format!("/events/{event}"),
            MissingPayoff { .. } | UnrealizablePayoff { .. } | PayoffLength { .. } => {
                "/payoffs".into()
            }
        }
    }
}

/// All violated spec rules; empty means the spec is valid and compilable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecReport {
    pub violations: Vec<SpecViolation>,
}

impl SpecReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks causality of menu conditions, mutual exclusivity over realizable
/// histories, and payoff-table totality.
pub fn validate_spec(spec: &SpacetimeSpec) -> SpecReport {
    let mut v = Vec::new();

    let mut ids = BTreeMap::new();
    for event in &spec.events {
        if ids.insert(event.id.as_str(), ()).is_some() {
            v.push(SpecViolation::DuplicateEventId {
                event: event.id.clone(),
            });
        }
        if event.agent >= spec.agents.len() {
            v.push(SpecViolation::UnknownAgent {
                event: event.id.clone(),
            });
        }
        for menu in &event.menus {
            if menu.actions.is_empty() {
                v.push(SpecViolation::EmptyActions {
                    event: event.id.clone(),
                });
            }
            let mut seen = std::collections::BTreeSet::new();
            for action in &menu.actions {
                if !seen.insert(action.as_str()) {
                    v.push(SpecViolation::DuplicateAction {
                        event: event.id.clone(),
                        action: action.clone(),
                    });
                }
            }
            for (reference, _) in &menu.condition {
                match spec.event(reference) {
                    None => v.push(SpecViolation::UnknownReference {
                        event: event.id.clone(),
                        reference: reference.clone(),
                    }),
                    Some(other) => {
                        if !in_strict_past(&other.coord, &event.coord) {
                            v.push(SpecViolation::NonPastReference {
                                event: event.id.clone(),
                                reference: reference.clone(),
                                relation: causal_relation(&other.coord, &event.coord),
                            });
                        }
                    }
                }
            }
        }
    }

    // Walk realizable worlds; overlapping menus are caught with a witness.
    let mut overlapping: BTreeMap<String, Assignment> = BTreeMap::new();
    let worlds = enumerate_worlds(spec, &mut |event, history| {
        overlapping
            .entry(event.to_owned())
            .or_insert_with(|| history.to_vec());
    });
    for (event, witness) in overlapping {
        v.push(SpecViolation::OverlappingConditions { event, witness });
    }

    for world in &worlds {
        match spec.payoffs.get(world) {
            None => v.push(SpecViolation::MissingPayoff {
                assignment: world.clone(),
            }),
            Some(p) if p.len() != spec.agents.len() => v.push(SpecViolation::PayoffLength {
                assignment: world.clone(),
                got: p.len(),
                want: spec.agents.len(),
            }),
            Some(_) => {}
        }
    }
    for key in spec.payoffs.keys() {
        if !worlds.contains(key) {
            v.push(SpecViolation::UnrealizablePayoff {
                assignment: key.clone(),
            });
        }
    }

    SpecReport { violations: v }
}

/// Every complete realizable assignment, in branch order. `on_overlap` is
/// called when several menus of one event match the same history.
fn enumerate_worlds(
    spec: &SpacetimeSpec,
    on_overlap: &mut dyn FnMut(&str, &Assignment),
) -> Vec<Assignment> {
    let order = spec.time_order();
    let mut worlds = Vec::new();
    let mut history: BTreeMap<String, String> = BTreeMap::new();
    walk_worlds(spec, &order, 0, &mut history, &mut worlds, on_overlap);
    worlds
}

fn walk_worlds(
    spec: &SpacetimeSpec,
    order: &[usize],
    depth: usize,
    history: &mut BTreeMap<String, String>,
    worlds: &mut Vec<Assignment>,
    on_overlap: &mut dyn FnMut(&str, &Assignment),
) {
    if depth == order.len() {
        worlds.push(history.iter().map(|(k, v)| (k.clone(), v.clone())).collect());
        return;
    }
    let event = &spec.events[order[depth]];
    let matching: Vec<&Menu> = event
        .menus
        .iter()
        .filter(|menu| {
            menu.condition
                .iter()
                .all(|(id, action)| history.get(id) == Some(action))
        })
        .collect();
    if matching.len() > 1 {
        let witness: Assignment = history.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        on_overlap(&event.id, &witness);
    }
    match matching.first() {
        None => walk_worlds(spec, order, depth + 1, history, worlds, on_overlap),
        Some(menu) => {
            for action in &menu.actions {
                history.insert(event.id.clone(), action.clone());
                walk_worlds(spec, order, depth + 1, history, worlds, on_overlap);
            }
            history.remove(&event.id);
        }
    }
}

/// Public view of [`enumerate_worlds`] without overlap reporting.
pub fn realizable_assignments(spec: &SpacetimeSpec) -> Vec<Assignment> {
    enumerate_worlds(spec, &mut |_, _| {})
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("event {event:?} conditions on unknown event {reference:?}")]
    UnresolvedReference { event: String, reference: String },
    #[error("menus of event {0:?} overlap; conditions must be mutually exclusive")]
    AmbiguousCondition(String),
    #[error("no payoff entry for realizable world {}", DisplayAssignment(.0))]
    MissingPayoff(Assignment),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Compiles the spec into a game tree. Events branch in (time, id) order;
/// events whose menus all fail to match are skipped on that branch; two nodes
/// of one event share an information set exactly when their histories agree
/// on every event in the deciding event's strict past light cone.
pub fn compile(spec: &SpacetimeSpec) -> Result<GameTree, CompileError> {
    // resolve condition references up front
    for event in &spec.events {
        for menu in &event.menus {
            for (reference, _) in &menu.condition {
                if spec.event(reference).is_none() {
                    return Err(CompileError::UnresolvedReference {
                        event: event.id.clone(),
                        reference: reference.clone(),
                    });
                }
            }
        }
    }

    let order = spec.time_order();
    // per event, the ids of events in its strict past light cone
    let past_cones: Vec<Vec<&str>> = spec
        .events
        .iter()
        .map(|event| {
            spec.events
                .iter()
                .filter(|other| other.id != event.id && in_strict_past(&other.coord, &event.coord))
                .map(|other| other.id.as_str())
                .collect()
        })
        .collect();

    let mut builder = Builder {
        spec,
        order: &order,
        past_cones: &past_cones,
        node_ids: Vec::new(),
        nodes: Vec::new(),
        infosets: Vec::new(),
        infoset_depths: Vec::new(),
        infoset_keys: BTreeMap::new(),
    };
    let mut history = BTreeMap::new();
    let root = builder.walk(0, &mut history, String::new())?;
    let Builder { node_ids, nodes, infosets, infoset_depths, .. } = builder;
    // present information sets in event order, not discovery order
    let mut ordered: Vec<(usize, usize, InformationSet)> = infoset_depths
        .into_iter()
        .zip(infosets)
        .enumerate()
        .map(|(created, (depth, set))| (depth, created, set))
        .collect();
    ordered.sort_by_key(|&(depth, created, _)| (depth, created));
    let infosets = ordered.into_iter().map(|(_, _, set)| set).collect();
    Ok(GameTree::new(spec.agents.clone(), node_ids, nodes, root, infosets)?)
}

struct Builder<'a> {
    spec: &'a SpacetimeSpec,
    order: &'a [usize],
    past_cones: &'a [Vec<&'a str>],
    node_ids: Vec<String>,
    nodes: Vec<Node>,
    infosets: Vec<InformationSet>,
    /// Position of each infoset's event in the time order, for presentation.
    infoset_depths: Vec<usize>,
    /// (event index, history restricted to the event's past cone) → infoset
    infoset_keys: BTreeMap<(usize, ConeView), usize>,
}

impl Builder<'_> {
    fn walk(
        &mut self,
        depth: usize,
        history: &mut BTreeMap<String, String>,
        path: String,
    ) -> Result<NodeId, CompileError> {
        if depth == self.order.len() {
            let assignment: Assignment =
                history.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            let payoffs = self
                .spec
                .payoffs
                .get(&assignment)
                .ok_or(CompileError::MissingPayoff(assignment))?
                .clone();
            return Ok(self.push(path, Node::Leaf { payoffs }));
        }
        let event_ix = self.order[depth];
        let event = &self.spec.events[event_ix];
        let matching: Vec<usize> = event
            .menus
            .iter()
            .enumerate()
            .filter(|(_, menu)| {
                menu.condition
                    .iter()
                    .all(|(id, action)| history.get(id) == Some(action))
            })
            .map(|(ix, _)| ix)
            .collect();
        let menu_ix = match matching.as_slice() {
            [] => return self.walk(depth + 1, history, path),
            [one] => *one,
            _ => return Err(CompileError::AmbiguousCondition(event.id.clone())),
        };
        let menu = &event.menus[menu_ix];

        let mut children = Vec::with_capacity(menu.actions.len());
        for action in &menu.actions {
            history.insert(event.id.clone(), action.clone());
            let child_path = format!("{path}/{}={action}", event.id);
            children.push(self.walk(depth + 1, history, child_path)?);
        }
        history.remove(&event.id);

        let node = self.push(
            path,
            Node::Decision {
                owner: event.agent,
                actions: menu.actions.clone(),
                children,
            },
        );

        // group by what the deciding event can possibly know
        let cone_view: ConeView = self.past_cones[event_ix]
            .iter()
            .map(|&id| (id.to_owned(), history.get(id).cloned()))
            .collect();
        let infoset = *self
            .infoset_keys
            .entry((event_ix, cone_view.clone()))
            .or_insert_with(|| {
                let id = infoset_id(&event.id, &cone_view);
                self.infosets.push(InformationSet {
                    id,
                    owner: event.agent,
                    members: Vec::new(),
                    menu: menu.actions.clone(),
                });
                self.infoset_depths.push(depth);
                self.infosets.len() - 1
            });
        self.infosets[infoset].members.push(node);
        Ok(node)
    }

    fn push(&mut self, path: String, node: Node) -> NodeId {
        self.node_ids.push(if path.is_empty() { "/".into() } else { path });
        self.nodes.push(node);
        NodeId(self.nodes.len() - 1)
    }
}

/// `U` when the past cone is empty, else `U@A=a` / `U@!F` style: the visible
/// history that distinguishes this information set.
fn infoset_id(event: &str, cone_view: &[(String, Option<String>)]) -> String {
    if cone_view.is_empty() {
        return event.to_owned();
    }
    let parts: Vec<String> = cone_view
        .iter()
        .map(|(id, action)| match action {
            Some(action) => format!("{id}={action}"),
            None => format!("!{id}"),
        })
        .collect();
    format!("{event}@{}", parts.join(","))
}
