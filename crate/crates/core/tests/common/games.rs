//! The shipped example games, built programmatically. `corpus_regen` writes
//! these to `games/` and `fixtures/`; tests parse the files and compare.

use std::collections::BTreeMap;

use spacetime_games_core::epr::{EprUtilities, UtilitySpec};
use spacetime_games_core::model::{
    AgentId, GameTree, InformationSet, Node, NodeId, NormalFormGame, PayoffVector,
};
use spacetime_games_core::spacetime::{DecisionEvent, EventCoord, Menu, SpacetimeSpec};

pub fn promise_game() -> GameTree {
    GameTree::new(
        vec![AgentId::new("Peter"), AgentId::new("Mary")],
        vec![
            "root".into(),
            "kept".into(),
            "given".into(),
            "betrayed".into(),
            "paid".into(),
        ],
        vec![
            Node::Decision {
                owner: 0,
                actions: vec!["keep".into(), "give".into()],
                children: vec![NodeId(1), NodeId(2)],
            },
            Node::Leaf { payoffs: PayoffVector::new(vec![0, 0]) },
            Node::Decision {
                owner: 1,
                actions: vec!["betray".into(), "pay".into()],
                children: vec![NodeId(3), NodeId(4)],
            },
            Node::Leaf { payoffs: PayoffVector::new(vec![-1, 2]) },
            Node::Leaf { payoffs: PayoffVector::new(vec![1, 1]) },
        ],
        NodeId(0),
        vec![
            InformationSet {
                id: "peter".into(),
                owner: 0,
                members: vec![NodeId(0)],
                menu: vec!["keep".into(), "give".into()],
            },
            InformationSet {
                id: "mary".into(),
                owner: 1,
                members: vec![NodeId(2)],
                menu: vec!["betray".into(), "pay".into()],
            },
        ],
    )
    .unwrap()
}

pub fn prisoners_dilemma() -> NormalFormGame {
    let strategies = vec!["cooperate".to_owned(), "defect".to_owned()];
    let mut table = BTreeMap::new();
    table.insert(vec![0, 0], PayoffVector::new(vec![2, 2]));
    table.insert(vec![0, 1], PayoffVector::new(vec![0, 3]));
    table.insert(vec![1, 0], PayoffVector::new(vec![3, 0]));
    table.insert(vec![1, 1], PayoffVector::new(vec![1, 1]));
    NormalFormGame {
        agents: vec![AgentId::new("Peter"), AgentId::new("Mary")],
        strategies: vec![strategies.clone(), strategies],
        table,
    }
}

pub fn matching_pennies() -> NormalFormGame {
    let strategies = vec!["heads".to_owned(), "tails".to_owned()];
    let mut table = BTreeMap::new();
    table.insert(vec![0, 0], PayoffVector::new(vec![1, 0]));
    table.insert(vec![0, 1], PayoffVector::new(vec![0, 1]));
    table.insert(vec![1, 0], PayoffVector::new(vec![0, 1]));
    table.insert(vec![1, 1], PayoffVector::new(vec![1, 0]));
    NormalFormGame {
        agents: vec![AgentId::new("Rowena"), AgentId::new("Colin")],
        strategies: vec![strategies.clone(), strategies],
        table,
    }
}

/// Payoffs (Predictor, Agent): prediction accuracy ranks against money ranks.
pub fn newcomb_game() -> GameTree {
    GameTree::new(
        vec![AgentId::new("Predictor"), AgentId::new("Agent")],
        vec![
            "root".into(),
            "predicted-one".into(),
            "predicted-two".into(),
            "one-box-full".into(),
            "two-boxes-full".into(),
            "one-box-empty".into(),
            "two-boxes-empty".into(),
        ],
        vec![
            Node::Decision {
                owner: 0,
                actions: vec!["predict-one-box".into(), "predict-two-boxes".into()],
                children: vec![NodeId(1), NodeId(2)],
            },
            Node::Decision {
                owner: 1,
                actions: vec!["take-one-box".into(), "take-two-boxes".into()],
                children: vec![NodeId(3), NodeId(4)],
            },
            Node::Decision {
                owner: 1,
                actions: vec!["take-one-box".into(), "take-two-boxes".into()],
                children: vec![NodeId(5), NodeId(6)],
            },
            Node::Leaf { payoffs: PayoffVector::new(vec![3, 3]) },
            Node::Leaf { payoffs: PayoffVector::new(vec![0, 4]) },
            Node::Leaf { payoffs: PayoffVector::new(vec![1, 1]) },
            Node::Leaf { payoffs: PayoffVector::new(vec![2, 2]) },
        ],
        NodeId(0),
        vec![
            InformationSet {
                id: "predictor".into(),
                owner: 0,
                members: vec![NodeId(0)],
                menu: vec!["predict-one-box".into(), "predict-two-boxes".into()],
            },
            InformationSet {
                id: "agent".into(),
                owner: 1,
                members: vec![NodeId(1), NodeId(2)],
                menu: vec!["take-one-box".into(), "take-two-boxes".into()],
            },
        ],
    )
    .unwrap()
}

/// Newcomb's four outcomes as a flat (Predictor, Agent) table, row-major by
/// (prediction, take): the oracle input.
pub const NEWCOMB_TABLE: [(i64, i64); 4] = [(3, 3), (0, 4), (1, 1), (2, 2)];

/// Shipped template rankings: shared universe, in general position, chosen so
/// the elimination runs five rounds and settles on the A=a, B=c branch.
pub fn template_utilities() -> EprUtilities {
    EprUtilities {
        a: vec![4, 9, 15, 13, 14, 12, 10, 2, 5, 6, 1, 3, 11, 8, 16, 7],
        b: vec![10, 1, 7, 16, 11, 9, 4, 14, 2, 12, 8, 15, 5, 6, 3, 13],
        u: vec![10, 7, 15, 8, 13, 1, 14, 16, 3, 4, 9, 2, 6, 5, 12, 11],
        v: vec![10, 7, 15, 8, 13, 1, 14, 16, 3, 4, 9, 2, 6, 5, 12, 11],
        shared_universe: true,
    }
}

/// Fixed physicists, random shared universe: the shipped ensemble model.
pub fn fixed_physicists_spec() -> UtilitySpec {
    let template = template_utilities();
    UtilitySpec {
        a: Some(template.a),
        b: Some(template.b),
        u: None,
        v: None,
        shared_universe: true,
    }
}

/// Two timelike-separated events; the second sees the first, so the compiled
/// tree has perfect information.
pub fn chain_spec() -> SpacetimeSpec {
    let events = vec![
        DecisionEvent {
            id: "first".into(),
            agent: 0,
            coord: EventCoord::from_ints(0, 0, 0, 0),
            menus: vec![Menu {
                condition: vec![],
                actions: vec!["up".into(), "down".into()],
            }],
        },
        DecisionEvent {
            id: "second".into(),
            agent: 1,
            coord: EventCoord::from_ints(1, 0, 0, 0),
            menus: vec![
                Menu {
                    condition: vec![("first".into(), "up".into())],
                    actions: vec!["left".into(), "right".into()],
                },
                Menu {
                    condition: vec![("first".into(), "down".into())],
                    actions: vec!["stay".into(), "move".into()],
                },
            ],
        },
    ];
    let mut payoffs = BTreeMap::new();
    let table = [
        ("up", "left", 2, 3),
        ("up", "right", 4, 1),
        ("down", "stay", 1, 4),
        ("down", "move", 3, 2),
    ];
    for (first, second, p, q) in table {
        payoffs.insert(
            vec![
                ("first".to_owned(), first.to_owned()),
                ("second".to_owned(), second.to_owned()),
            ],
            PayoffVector::new(vec![p, q]),
        );
    }
    SpacetimeSpec {
        agents: vec![AgentId::new("Early"), AgentId::new("Late")],
        events,
        payoffs,
    }
}
