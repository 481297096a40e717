//! Shared test machinery: corpus access, seeded generators, and independent
//! oracles the solver results are checked against. The oracles work on flat
//! outcome tables, never on the tree machinery they verify.

#![allow(dead_code)]

pub mod games;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spacetime_games_core::model::{
    outcomes, AgentId, GameTree, InformationSet, Node, NodeId, NormalFormGame, Outcome,
    PayoffVector,
};
use spacetime_games_core::spacetime::{DecisionEvent, EventCoord, Menu, SpacetimeSpec};

pub fn repo_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

pub fn read_corpus(rel: &str) -> String {
    let path = repo_path(rel);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pick(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    let bound = bound as u64;
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let r = rng.next_u64();
        if r < zone {
            return (r % bound) as usize;
        }
    }
}

/// Shuffled ranks 1..=n: a general-position utility column.
pub fn shuffled_ranks(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    let mut ranks: Vec<i64> = (1..=n as i64).collect();
    for i in (1..n).rev() {
        let j = pick(rng, i + 1);
        ranks.swap(i, j);
    }
    ranks
}

// ---------------------------------------------------------------------------
// generators

/// Random perfect-information tree: depth <= `max_depth`, 2..=3 actions per
/// node, 2..=3 agents, distinct ranks per agent. Every decision node is its
/// own singleton information set.
pub fn random_perfect_tree(rng: &mut ChaCha8Rng, max_depth: usize) -> GameTree {
    let agent_count = 2 + pick(rng, 2);
    let agents: Vec<AgentId> = (0..agent_count)
        .map(|i| AgentId::new(format!("P{i}")))
        .collect();

    struct Shape {
        nodes: Vec<(Option<(usize, usize)>, Vec<usize>)>, // (owner+arity, children)
    }
    fn grow(
        shape: &mut Shape,
        rng: &mut ChaCha8Rng,
        agents: usize,
        depth: usize,
        max_depth: usize,
        leaf_budget: &mut usize,
    ) -> usize {
        let must_leaf = depth == max_depth || *leaf_budget == 0;
        let want_leaf = must_leaf || (depth > 0 && pick(rng, 3) == 0);
        if want_leaf {
            *leaf_budget = leaf_budget.saturating_sub(1);
            shape.nodes.push((None, vec![]));
            return shape.nodes.len() - 1;
        }
        let arity = 2 + pick(rng, 2);
        let owner = pick(rng, agents);
        let mut children = Vec::with_capacity(arity);
        for _ in 0..arity {
            children.push(grow(shape, rng, agents, depth + 1, max_depth, leaf_budget));
        }
        shape.nodes.push((Some((owner, arity)), children));
        shape.nodes.len() - 1
    }

    let mut shape = Shape { nodes: Vec::new() };
    let mut budget = 48usize;
    let root = grow(&mut shape, rng, agent_count, 0, max_depth, &mut budget);

    let leaf_count = shape.nodes.iter().filter(|(d, _)| d.is_none()).count();
    let rankings: Vec<Vec<i64>> = (0..agent_count)
        .map(|_| shuffled_ranks(rng, leaf_count))
        .collect();

    let mut nodes = Vec::with_capacity(shape.nodes.len());
    let mut node_ids = Vec::with_capacity(shape.nodes.len());
    let mut infosets = Vec::new();
    let mut leaf_ix = 0usize;
    for (ix, (decision, children)) in shape.nodes.iter().enumerate() {
        node_ids.push(format!("n{ix}"));
        match decision {
            None => {
                let payoffs: Vec<i64> = rankings.iter().map(|r| r[leaf_ix]).collect();
                leaf_ix += 1;
                nodes.push(Node::Leaf {
                    payoffs: PayoffVector::new(payoffs),
                });
            }
            Some((owner, arity)) => {
                let actions: Vec<String> = (0..*arity).map(|a| format!("a{a}")).collect();
                infosets.push(InformationSet {
                    id: format!("n{ix}"),
                    owner: *owner,
                    members: vec![NodeId(ix)],
                    menu: actions.clone(),
                });
                nodes.push(Node::Decision {
                    owner: *owner,
                    actions,
                    children: children.iter().map(|&c| NodeId(c)).collect(),
                });
            }
        }
    }
    GameTree::new(agents, node_ids, nodes, NodeId(root), infosets).unwrap()
}

/// Random general-position normal-form game: 2..=4 agents, 2..=`max_strategies`
/// strategies each, capped at 256 cells.
pub fn random_normal_game(rng: &mut ChaCha8Rng, max_strategies: usize) -> NormalFormGame {
    let agent_count = 2 + pick(rng, 3);
    let agents: Vec<AgentId> = (0..agent_count)
        .map(|i| AgentId::new(format!("P{i}")))
        .collect();
    let strategies: Vec<Vec<String>> = (0..agent_count)
        .map(|_| {
            let k = 2 + pick(rng, max_strategies - 1);
            (0..k).map(|s| format!("s{s}")).collect()
        })
        .collect();
    let game = NormalFormGame {
        agents,
        strategies,
        table: BTreeMap::new(),
    };
    let cells = game.profile_count();
    let rankings: Vec<Vec<i64>> = (0..agent_count)
        .map(|_| shuffled_ranks(rng, cells))
        .collect();
    let mut table = BTreeMap::new();
    for (cell, profile) in game.profiles().into_iter().enumerate() {
        let ranks: Vec<i64> = rankings.iter().map(|r| r[cell]).collect();
        table.insert(profile, PayoffVector::new(ranks));
    }
    NormalFormGame { table, ..game }
}

/// Random located decision setup with deliberate coordinate-time ties among
/// spacelike-separated events. Conditions reference strictly earlier events
/// only; payoffs are general position per agent.
pub fn random_spacetime_spec(rng: &mut ChaCha8Rng) -> SpacetimeSpec {
    let agent_count = 2 + pick(rng, 2);
    let agents: Vec<AgentId> = (0..agent_count)
        .map(|i| AgentId::new(format!("P{i}")))
        .collect();
    let event_count = 2 + pick(rng, 3);

    // distinct positions; repeated times create spacelike ties on purpose
    let mut coords = Vec::new();
    let mut taken = BTreeSet::new();
    while coords.len() < event_count {
        let t = pick(rng, 3) as i64;
        let x = [-4i64, -2, 0, 2, 4][pick(rng, 5)];
        if taken.insert((t, x)) {
            coords.push(EventCoord::from_ints(t, x, 0, 0));
        }
    }

    let mut events: Vec<DecisionEvent> = Vec::new();
    for (ix, coord) in coords.iter().enumerate() {
        let id = format!("e{ix}");
        let past: Vec<&DecisionEvent> = events
            .iter()
            .filter(|e| spacetime_games_core::spacetime::in_strict_past(&e.coord, coord))
            .collect();
        let actions = |n: usize| -> Vec<String> { (0..n).map(|a| format!("x{a}")).collect() };
        let menus = match past.last() {
            Some(previous) if pick(rng, 2) == 0 => {
                // one menu per action of a past event: occurs either way but
                // with different options
                previous
                    .menus
                    .iter()
                    .flat_map(|m| m.actions.iter())
                    .map(|action| Menu {
                        condition: vec![(previous.id.clone(), action.clone())],
                        actions: actions(2),
                    })
                    .collect()
            }
            Some(previous) if pick(rng, 2) == 0 => {
                // contextual: only occurs after the first action
                vec![Menu {
                    condition: vec![(
                        previous.id.clone(),
                        previous.menus[0].actions[0].clone(),
                    )],
                    actions: actions(2),
                }]
            }
            _ => vec![Menu {
                condition: vec![],
                actions: actions(2),
            }],
        };
        events.push(DecisionEvent {
            id,
            agent: pick(rng, agent_count),
            coord: coord.clone(),
            menus,
        });
    }

    let mut spec = SpacetimeSpec {
        agents,
        events,
        payoffs: BTreeMap::new(),
    };
    let worlds = spacetime_games_core::spacetime::realizable_assignments(&spec);
    let rankings: Vec<Vec<i64>> = (0..agent_count)
        .map(|_| shuffled_ranks(rng, worlds.len()))
        .collect();
    for (cell, world) in worlds.into_iter().enumerate() {
        let ranks: Vec<i64> = rankings.iter().map(|r| r[cell]).collect();
        spec.payoffs.insert(world, PayoffVector::new(ranks));
    }
    spec
}

/// Renames events so that the (time, id) tie-break visits equal-time groups
/// in reverse, leaving everything else intact.
pub fn reverse_time_ties(spec: &SpacetimeSpec) -> SpacetimeSpec {
    let order = spec.time_order();
    // group consecutive order entries with equal t, reverse each group
    let mut renamed: BTreeMap<String, String> = BTreeMap::new();
    let mut position = 0usize;
    let mut ix = 0;
    while ix < order.len() {
        let mut group = vec![order[ix]];
        while ix + 1 < order.len()
            && spec.events[order[ix + 1]].coord.t == spec.events[group[0]].coord.t
        {
            ix += 1;
            group.push(order[ix]);
        }
        ix += 1;
        for &event in group.iter().rev() {
            renamed.insert(spec.events[event].id.clone(), format!("g{position:02}"));
            position += 1;
        }
    }

    let rename = |id: &str| renamed[id].clone();
    let events = spec
        .events
        .iter()
        .map(|event| DecisionEvent {
            id: rename(&event.id),
            agent: event.agent,
            coord: event.coord.clone(),
            menus: event
                .menus
                .iter()
                .map(|menu| {
                    let mut condition: Vec<(String, String)> = menu
                        .condition
                        .iter()
                        .map(|(e, a)| (rename(e), a.clone()))
                        .collect();
                    condition.sort();
                    Menu {
                        condition,
                        actions: menu.actions.clone(),
                    }
                })
                .collect(),
        })
        .collect();
    let payoffs = spec
        .payoffs
        .iter()
        .map(|(assignment, vector)| {
            let mut key: Vec<(String, String)> = assignment
                .iter()
                .map(|(e, a)| (rename(e), a.clone()))
                .collect();
            key.sort();
            (key, vector.clone())
        })
        .collect();
    SpacetimeSpec {
        agents: spec.agents.clone(),
        events,
        payoffs,
    }
}

// ---------------------------------------------------------------------------
// oracles

/// Sorted payoff-vector listing; the implementation-independent fingerprint
/// of an outcome set (payoffs are distinct per agent in general position).
pub fn payoff_fingerprint<'a>(payoffs: impl Iterator<Item = &'a PayoffVector>) -> Vec<String> {
    let mut all: Vec<String> = payoffs.map(|p| p.to_string()).collect();
    all.sort();
    all
}

/// Iterated elimination on a flat normal-form table: every agent decides for
/// certain every round; removals below any agent's maximin apply together.
/// Returns each round's eliminated cells and the surviving cells.
pub fn table_elimination(game: &NormalFormGame) -> (Vec<BTreeSet<usize>>, BTreeSet<usize>) {
    let profiles = game.profiles();
    let cells: Vec<&PayoffVector> = profiles.iter().map(|p| &game.table[p]).collect();
    let mut surviving: BTreeSet<usize> = (0..cells.len()).collect();
    let mut rounds = Vec::new();
    loop {
        let mut removed = BTreeSet::new();
        for agent in 0..game.agents.len() {
            let mut best_guarantee: Option<i64> = None;
            for strategy in 0..game.strategies[agent].len() {
                let min = surviving
                    .iter()
                    .filter(|&&cell| profiles[cell][agent] == strategy)
                    .map(|&cell| cells[cell].get(agent))
                    .min();
                if let Some(min) = min {
                    best_guarantee = Some(best_guarantee.map_or(min, |g| g.max(min)));
                }
            }
            let guarantee = best_guarantee.expect("a non-empty set supports some strategy");
            for &cell in &surviving {
                if cells[cell].get(agent) < guarantee {
                    removed.insert(cell);
                }
            }
        }
        if removed.is_empty() {
            break;
        }
        surviving = surviving.difference(&removed).copied().collect();
        rounds.push(removed);
        if surviving.is_empty() {
            break;
        }
    }
    (rounds, surviving)
}

/// Self-contained elimination for the two-decider Newcomb table; both
/// deciders are certain throughout.
pub fn two_decider_elimination(cells: &[(i64, i64); 4]) -> Vec<usize> {
    // cell layout: (first decider's action, second's action) row-major
    let mut surviving: BTreeSet<usize> = (0..4).collect();
    loop {
        let mut removed = BTreeSet::new();
        for decider in 0..2 {
            let payoff = |cell: usize| if decider == 0 { cells[cell].0 } else { cells[cell].1 };
            let action_of = |cell: usize| if decider == 0 { cell / 2 } else { cell % 2 };
            let mut guarantee: Option<i64> = None;
            for action in 0..2 {
                let min = surviving
                    .iter()
                    .filter(|&&c| action_of(c) == action)
                    .map(|&c| payoff(c))
                    .min();
                if let Some(min) = min {
                    guarantee = Some(guarantee.map_or(min, |g| g.max(min)));
                }
            }
            let guarantee = guarantee.unwrap();
            for &cell in &surviving {
                if payoff(cell) < guarantee {
                    removed.insert(cell);
                }
            }
        }
        if removed.is_empty() {
            return surviving.into_iter().collect();
        }
        surviving = surviving.difference(&removed).copied().collect();
        if surviving.is_empty() {
            return vec![];
        }
    }
}

/// Every profile's realized outcome index, for profile-table oracles.
fn realized_table(tree: &GameTree, all: &[Outcome]) -> Vec<(Vec<usize>, usize)> {
    let mut leaf_outcome = vec![usize::MAX; tree.node_count()];
    for (ix, outcome) in all.iter().enumerate() {
        leaf_outcome[outcome.leaf.0] = ix;
    }
    let bounds: Vec<usize> = tree.infosets().iter().map(|i| i.menu.len()).collect();
    let mut profile = vec![0usize; bounds.len()];
    let mut out = Vec::new();
    loop {
        let mut at = tree.root();
        let outcome = loop {
            match tree.node(at) {
                Node::Leaf { .. } => break leaf_outcome[at.0],
                Node::Decision { children, .. } => {
                    let infoset = tree.node_infoset(at).unwrap();
                    at = children[profile[infoset]];
                }
            }
        };
        out.push((profile.clone(), outcome));
        // odometer
        let mut digit = bounds.len();
        loop {
            if digit == 0 {
                return out;
            }
            digit -= 1;
            profile[digit] += 1;
            if profile[digit] < bounds[digit] {
                break;
            }
            profile[digit] = 0;
        }
    }
}

/// Pure-strategy Nash profiles by bucket scanning over the full profile
/// table: a profile survives when, for every agent, its realized payoff tops
/// the bucket of profiles that differ only in that agent's entries.
pub fn nash_bruteforce(tree: &GameTree) -> Vec<Vec<usize>> {
    let all = outcomes(tree);
    let table = realized_table(tree, &all);
    let owners: Vec<usize> = tree.infosets().iter().map(|i| i.owner).collect();

    let mut nash = Vec::new();
    for (profile, outcome) in &table {
        let mut is_nash = true;
        for agent in 0..tree.agents().len() {
            let payoff = all[*outcome].payoffs.get(agent);
            let bucket_max = table
                .iter()
                .filter(|(other, _)| {
                    other
                        .iter()
                        .zip(profile)
                        .zip(&owners)
                        .all(|((o, p), &owner)| owner == agent || o == p)
                })
                .map(|(_, other_outcome)| all[*other_outcome].payoffs.get(agent))
                .max()
                .unwrap();
            if bucket_max > payoff {
                is_nash = false;
                break;
            }
        }
        if is_nash {
            nash.push(profile.clone());
        }
    }
    nash
}

/// The unique subgame-perfect profile by exhaustive search: a profile passes
/// when no single node's owner can improve the continuation from that node.
pub fn spe_bruteforce(tree: &GameTree) -> (Vec<usize>, String) {
    let all = outcomes(tree);
    let mut leaf_outcome = vec![usize::MAX; tree.node_count()];
    for (ix, outcome) in all.iter().enumerate() {
        leaf_outcome[outcome.leaf.0] = ix;
    }

    fn induced(
        tree: &GameTree,
        leaf_outcome: &[usize],
        profile: &[usize],
        from: NodeId,
        switch: Option<(usize, usize)>,
    ) -> usize {
        let mut at = from;
        loop {
            match tree.node(at) {
                Node::Leaf { .. } => return leaf_outcome[at.0],
                Node::Decision { children, .. } => {
                    let infoset = tree.node_infoset(at).unwrap();
                    let action = match switch {
                        Some((target, action)) if target == infoset => action,
                        _ => profile[infoset],
                    };
                    at = children[action];
                }
            }
        }
    }

    let bounds: Vec<usize> = tree.infosets().iter().map(|i| i.menu.len()).collect();
    let mut profile = vec![0usize; bounds.len()];
    let mut winners = Vec::new();
    'profiles: loop {
        let mut subgame_perfect = true;
        'nodes: for node in tree.node_indices() {
            let Node::Decision { owner, actions, .. } = tree.node(node) else {
                continue;
            };
            let infoset = tree.node_infoset(node).unwrap();
            let current = induced(tree, &leaf_outcome, &profile, node, None);
            for action in 0..actions.len() {
                let deviated = induced(tree, &leaf_outcome, &profile, node, Some((infoset, action)));
                if all[deviated].payoffs.get(*owner) > all[current].payoffs.get(*owner) {
                    subgame_perfect = false;
                    break 'nodes;
                }
            }
        }
        if subgame_perfect {
            let realized = induced(tree, &leaf_outcome, &profile, tree.root(), None);
            winners.push((profile.clone(), all[realized].id.clone()));
        }
        let mut digit = bounds.len();
        loop {
            if digit == 0 {
                break 'profiles;
            }
            digit -= 1;
            profile[digit] += 1;
            if profile[digit] < bounds[digit] {
                break;
            }
            profile[digit] = 0;
        }
    }
    assert_eq!(
        winners.len(),
        1,
        "general position admits exactly one subgame-perfect profile"
    );
    winners.into_iter().next().unwrap()
}

/// Strict Pareto check: no other outcome gives every agent a higher rank.
pub fn pareto_undominated(all: &[Outcome], candidate: &Outcome) -> bool {
    !all.iter().any(|other| {
        other.id != candidate.id
            && (0..candidate.payoffs.len())
                .all(|agent| other.payoffs.get(agent) > candidate.payoffs.get(agent))
    })
}

// ---------------------------------------------------------------------------
// EPR oracle: the six-infoset elimination, hand-rolled on the flat outcome
// list with closed-form crossing rules; no trees involved.

pub fn epr_oracle(utilities: &spacetime_games_core::epr::EprUtilities) -> Option<usize> {
    use spacetime_games_core::epr::EprOutcome;

    // deciders: (crossing predicate, action-of-outcome, owner payoffs)
    type Decider<'a> = (Box<dyn Fn(EprOutcome) -> bool>, Box<dyn Fn(EprOutcome) -> usize>, &'a [i64]);
    let deciders: Vec<Decider> = vec![
        (Box::new(|_| true), Box::new(|o: EprOutcome| o.a_axis as usize), &utilities.a),
        (Box::new(|_| true), Box::new(|o: EprOutcome| o.b_axis as usize), &utilities.b),
        (
            Box::new(|o: EprOutcome| o.a_axis == 0),
            Box::new(|o: EprOutcome| o.u_slot as usize),
            &utilities.u,
        ),
        (
            Box::new(|o: EprOutcome| o.a_axis == 1),
            Box::new(|o: EprOutcome| o.u_slot as usize),
            &utilities.u,
        ),
        (
            Box::new(|o: EprOutcome| o.b_axis == 0),
            Box::new(|o: EprOutcome| o.v_slot as usize),
            &utilities.v,
        ),
        (
            Box::new(|o: EprOutcome| o.b_axis == 1),
            Box::new(|o: EprOutcome| o.v_slot as usize),
            &utilities.v,
        ),
    ];

    let mut surviving: BTreeSet<usize> = (0..16).collect();
    loop {
        let mut removed = BTreeSet::new();
        for (crosses, action_of, payoffs) in &deciders {
            let certain = surviving.iter().all(|&ix| crosses(EprOutcome::from_index(ix)));
            if !certain {
                continue;
            }
            let mut guarantee: Option<i64> = None;
            for action in 0..2 {
                let min = surviving
                    .iter()
                    .filter(|&&ix| action_of(EprOutcome::from_index(ix)) == action)
                    .map(|&ix| payoffs[ix])
                    .min();
                if let Some(min) = min {
                    guarantee = Some(guarantee.map_or(min, |g| g.max(min)));
                }
            }
            let guarantee = guarantee.expect("certain deciders have support");
            for &ix in &surviving {
                if payoffs[ix] < guarantee {
                    removed.insert(ix);
                }
            }
        }
        if removed.is_empty() {
            break;
        }
        surviving = surviving.difference(&removed).copied().collect();
        if surviving.is_empty() {
            break;
        }
    }
    match surviving.len() {
        1 => surviving.into_iter().next(),
        _ => None,
    }
}
