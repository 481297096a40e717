//! Hand-built instances of the shipped example games, for unit tests.

use std::collections::BTreeMap;

use crate::model::{
    AgentId, GameTree, InformationSet, Node, NodeId, NormalFormGame, PayoffVector,
};

/// Baker Peter may hand Mary a loaf; Mary may then pay. Payoffs (Peter, Mary):
/// keep (0,0); give then betray (-1,2); give then pay (1,1).
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
            Node::Leaf {
                payoffs: PayoffVector::new(vec![0, 0]),
            },
            Node::Decision {
                owner: 1,
                actions: vec!["betray".into(), "pay".into()],
                children: vec![NodeId(3), NodeId(4)],
            },
            Node::Leaf {
                payoffs: PayoffVector::new(vec![-1, 2]),
            },
            Node::Leaf {
                payoffs: PayoffVector::new(vec![1, 1]),
            },
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

/// The classic dilemma with ordinal payoffs 0..3 per player.
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

/// Matching pennies with win/lose ranks 1/0; no pure Nash equilibrium.
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

/// Pure coordination: both prefer matching, (b,b) best; two pure equilibria.
pub fn coordination_game() -> NormalFormGame {
    let strategies = vec!["a".to_owned(), "b".to_owned()];
    let mut table = BTreeMap::new();
    table.insert(vec![0, 0], PayoffVector::new(vec![2, 2]));
    table.insert(vec![0, 1], PayoffVector::new(vec![0, 0]));
    table.insert(vec![1, 0], PayoffVector::new(vec![1, 1]));
    table.insert(vec![1, 1], PayoffVector::new(vec![3, 3]));
    NormalFormGame {
        agents: vec![AgentId::new("Rowena"), AgentId::new("Colin")],
        strategies: vec![strategies.clone(), strategies],
        table,
    }
}

/// A predictor prepares a box before an agent chooses one box or both,
/// without seeing the prediction. Payoffs (Predictor, Agent): the predictor
/// ranks correct-one-box 3 > correct-two-box 2 > wrong-one-box 1 >
/// wrong-two-box 0; the agent ranks outcomes by money.
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
            // $1,000,000
            Node::Leaf {
                payoffs: PayoffVector::new(vec![3, 3]),
            },
            // $1,001,000, prediction wrong
            Node::Leaf {
                payoffs: PayoffVector::new(vec![0, 4]),
            },
            // $0, prediction wrong
            Node::Leaf {
                payoffs: PayoffVector::new(vec![1, 1]),
            },
            // $1,000
            Node::Leaf {
                payoffs: PayoffVector::new(vec![2, 2]),
            },
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

/// Symmetric 3x3 game whose best diagonal cell is (z,z); superrational play
/// lands there.
pub fn symmetric_3x3() -> NormalFormGame {
    let strategies = vec!["x".to_owned(), "y".to_owned(), "z".to_owned()];
    let row = [[5, 1, 7], [9, 3, 2], [4, 8, 6]];
    let mut table = BTreeMap::new();
    for i in 0..3 {
        for j in 0..3 {
            table.insert(vec![i, j], PayoffVector::new(vec![row[i][j], row[j][i]]));
        }
    }
    NormalFormGame {
        agents: vec![AgentId::new("Rowena"), AgentId::new("Colin")],
        strategies: vec![strategies.clone(), strategies],
        table,
    }
}

/// n-agent game with two strategies each and payoff ranks that are distinct
/// per agent (general position by construction).
pub fn binary_game(agents: usize) -> NormalFormGame {
    let names: Vec<AgentId> = (0..agents)
        .map(|i| AgentId::new(format!("P{i}")))
        .collect();
    let strategies: Vec<Vec<String>> = (0..agents)
        .map(|_| vec!["0".to_owned(), "1".to_owned()])
        .collect();
    let mut table = BTreeMap::new();
    let cells = 1usize << agents;
    for cell in 0..cells {
        let profile: Vec<usize> = (0..agents).map(|a| (cell >> (agents - 1 - a)) & 1).collect();
        // distinct ranks per agent: rotate the cell counter by the agent index
        let ranks: Vec<i64> = (0..agents)
            .map(|a| (((cell + a * 7) % cells) + 1) as i64)
            .collect();
        table.insert(profile, PayoffVector::new(ranks));
    }
    NormalFormGame {
        agents: names,
        strategies,
        table,
    }
}
