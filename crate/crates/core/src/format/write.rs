//! Canonical encoding: fixed key order, declaration order for agents,
//! actions, nodes and events, sorted payoff tables for spacetime specs.

use num_rational::BigRational;

use super::json::Out;
use super::{Document, GameBody, TraceDocument, FORMAT_VERSION};
use crate::epr::{joint_labels, EnsembleReport, UtilitySpec, PAIR_LABELS};
use crate::model::{GameTree, Node, NormalFormGame, PayoffVector};
use crate::solvers::EliminationTrace;
use crate::spacetime::SpacetimeSpec;

pub fn document(doc: &Document) -> String {
    let mut pairs = vec![
        ("version".to_owned(), Out::Int(FORMAT_VERSION)),
        ("kind".to_owned(), Out::str(doc.kind())),
    ];
    match doc {
        Document::Game(game) => match &game.body {
            GameBody::Extensive(tree) => extensive(tree, &mut pairs),
            GameBody::Normal(nf) => normal(nf, &mut pairs),
            GameBody::Spacetime(spec) => spacetime(spec, &mut pairs),
        },
        Document::Trace(trace) => trace_doc(trace, &mut pairs),
        Document::Report(report) => report_doc(report, &mut pairs),
        Document::Utilities(spec) => utilities(spec, &mut pairs),
    }
    Out::Obj(pairs).render()
}

fn uint(v: u64) -> Out {
    // emitted digits never exceed u64; reuse the integer path when possible
    match i64::try_from(v) {
        Ok(i) => Out::Int(i),
        Err(_) => Out::str(v.to_string()),
    }
}

fn agent_names(agents: &[crate::model::AgentId]) -> Out {
    Out::Arr(agents.iter().map(|a| Out::str(a.name())).collect())
}

fn payoff_object(payoffs: &PayoffVector, agents: &[crate::model::AgentId]) -> Out {
    Out::Obj(
        agents
            .iter()
            .enumerate()
            .map(|(ix, agent)| (agent.name().to_owned(), Out::Int(payoffs.get(ix))))
            .collect(),
    )
}

fn extensive(tree: &GameTree, pairs: &mut Vec<(String, Out)>) {
    pairs.push(("agents".into(), agent_names(tree.agents())));
    pairs.push(("root".into(), Out::str(tree.node_id(tree.root()))));
    let nodes: Vec<Out> = tree
        .node_indices()
        .map(|ix| {
            let mut node = vec![("id".to_owned(), Out::str(tree.node_id(ix)))];
            match tree.node(ix) {
                Node::Leaf { payoffs } => {
                    node.push(("payoffs".into(), payoff_object(payoffs, tree.agents())));
                }
                Node::Decision { owner, actions, children } => {
                    node.push(("agent".into(), Out::str(tree.agents()[*owner].name())));
                    node.push((
                        "actions".into(),
                        Out::Obj(
                            actions
                                .iter()
                                .zip(children)
                                .map(|(label, child)| {
                                    (label.clone(), Out::str(tree.node_id(*child)))
                                })
                                .collect(),
                        ),
                    ));
                }
            }
            Out::Obj(node)
        })
        .collect();
    pairs.push(("nodes".into(), Out::Arr(nodes)));
    let infosets: Vec<Out> = tree
        .infosets()
        .iter()
        .map(|set| {
            Out::Obj(vec![
                ("id".into(), Out::str(&set.id)),
                ("agent".into(), Out::str(tree.agents()[set.owner].name())),
                (
                    "members".into(),
                    Out::Arr(set.members.iter().map(|m| Out::str(tree.node_id(*m))).collect()),
                ),
            ])
        })
        .collect();
    pairs.push(("infosets".into(), Out::Arr(infosets)));
}

fn normal(nf: &NormalFormGame, pairs: &mut Vec<(String, Out)>) {
    pairs.push(("agents".into(), agent_names(&nf.agents)));
    pairs.push((
        "strategies".into(),
        Out::Obj(
            nf.agents
                .iter()
                .zip(&nf.strategies)
                .map(|(agent, list)| {
                    (
                        agent.name().to_owned(),
                        Out::Arr(list.iter().map(Out::str).collect()),
                    )
                })
                .collect(),
        ),
    ));
    let table: Vec<(String, Out)> = nf
        .profiles()
        .into_iter()
        .map(|profile| {
            let key: Vec<&str> = profile
                .iter()
                .enumerate()
                .map(|(agent, &s)| nf.strategies[agent][s].as_str())
                .collect();
            (key.join("/"), payoff_object(&nf.table[&profile], &nf.agents))
        })
        .collect();
    pairs.push(("table".into(), Out::Obj(table)));
}

fn spacetime(spec: &SpacetimeSpec, pairs: &mut Vec<(String, Out)>) {
    pairs.push(("agents".into(), agent_names(&spec.agents)));
    let events: Vec<Out> = spec
        .events
        .iter()
        .map(|event| {
            let coord = Out::Arr(
                [&event.coord.t, &event.coord.x, &event.coord.y, &event.coord.z]
                    .iter()
                    .map(|r| Out::rational(r))
                    .collect(),
            );
            let menus: Vec<Out> = event
                .menus
                .iter()
                .map(|menu| {
                    let mut entry = Vec::new();
                    if !menu.condition.is_empty() {
                        entry.push((
                            "when".to_owned(),
                            Out::Obj(
                                menu.condition
                                    .iter()
                                    .map(|(e, a)| (e.clone(), Out::str(a)))
                                    .collect(),
                            ),
                        ));
                    }
                    entry.push((
                        "actions".to_owned(),
                        Out::Arr(menu.actions.iter().map(Out::str).collect()),
                    ));
                    Out::Obj(entry)
                })
                .collect();
            Out::Obj(vec![
                ("id".into(), Out::str(&event.id)),
                ("agent".into(), Out::str(spec.agents[event.agent].name())),
                ("coord".into(), coord),
                ("menus".into(), Out::Arr(menus)),
            ])
        })
        .collect();
    pairs.push(("events".into(), Out::Arr(events)));
    let payoffs: Vec<Out> = spec
        .payoffs
        .iter()
        .map(|(assignment, vector)| {
            Out::Obj(vec![
                (
                    "when".into(),
                    Out::Obj(
                        assignment
                            .iter()
                            .map(|(e, a)| (e.clone(), Out::str(a)))
                            .collect(),
                    ),
                ),
                ("payoffs".into(), payoff_object(vector, &spec.agents)),
            ])
        })
        .collect();
    pairs.push(("payoffs".into(), Out::Arr(payoffs)));
}

fn payoff_array(payoffs: &PayoffVector) -> Out {
    Out::Arr(payoffs.iter().map(Out::Int).collect())
}

fn trace_doc(doc: &TraceDocument, pairs: &mut Vec<(String, Out)>) {
    pairs.push(("concept".into(), Out::str(&doc.concept)));
    pairs.push(("rounds".into(), rounds(&doc.trace)));
    pairs.push((
        "surviving".into(),
        Out::Arr(
            doc.trace
                .surviving
                .iter()
                .map(|o| {
                    Out::Obj(vec![
                        ("outcome".into(), Out::str(&o.id)),
                        ("payoffs".into(), payoff_array(&o.payoffs)),
                    ])
                })
                .collect(),
        ),
    ));
    pairs.push((
        "pinned".into(),
        Out::Obj(
            doc.trace
                .pinned
                .iter()
                .map(|(infoset, action)| (infoset.clone(), Out::str(action)))
                .collect(),
        ),
    ));
    pairs.push((
        "undefined".into(),
        Out::Arr(doc.trace.undefined.iter().map(Out::str).collect()),
    ));
}

fn rounds(trace: &EliminationTrace) -> Out {
    Out::Arr(
        trace
            .rounds
            .iter()
            .map(|round| {
                Out::Obj(vec![
                    ("index".into(), Out::Int(round.index as i64)),
                    (
                        "certain".into(),
                        Out::Arr(round.certain.iter().map(Out::str).collect()),
                    ),
                    (
                        "guarantees".into(),
                        Out::Arr(
                            round
                                .guarantees
                                .iter()
                                .map(|g| {
                                    Out::Obj(vec![
                                        ("infoset".into(), Out::str(&g.infoset)),
                                        ("agent".into(), Out::str(&g.agent)),
                                        (
                                            "minima".into(),
                                            Out::Obj(
                                                g.per_action
                                                    .iter()
                                                    .map(|(a, min)| (a.clone(), Out::Int(*min)))
                                                    .collect(),
                                            ),
                                        ),
                                        ("maximin".into(), Out::Int(g.maximin)),
                                        (
                                            "best".into(),
                                            Out::Arr(g.best.iter().map(Out::str).collect()),
                                        ),
                                    ])
                                })
                                .collect(),
                        ),
                    ),
                    (
                        "eliminated".into(),
                        Out::Arr(
                            round
                                .eliminated
                                .iter()
                                .map(|e| {
                                    Out::Obj(vec![
                                        ("outcome".into(), Out::str(&e.outcome)),
                                        ("payoffs".into(), payoff_array(&e.payoffs)),
                                        ("infoset".into(), Out::str(&e.infoset)),
                                        ("agent".into(), Out::str(&e.agent)),
                                        ("payoff".into(), Out::Int(e.payoff)),
                                        ("maximin".into(), Out::Int(e.maximin)),
                                    ])
                                })
                                .collect(),
                        ),
                    ),
                ])
            })
            .collect(),
    )
}

fn report_doc(report: &EnsembleReport, pairs: &mut Vec<(String, Out)>) {
    pairs.push(("samples".into(), uint(report.samples)));
    pairs.push(("seed".into(), uint(report.seed)));
    pairs.push(("model".into(), Out::str(&report.model)));
    pairs.push(("shared_universe".into(), Out::Bool(report.shared_universe)));
    pairs.push(("pte_found".into(), uint(report.pte_found())));
    pairs.push(("no_pte".into(), uint(report.no_pte)));
    pairs.push((
        "axis_counts".into(),
        Out::Obj(
            PAIR_LABELS
                .iter()
                .zip(report.axis_counts())
                .map(|(label, count)| ((*label).to_owned(), uint(count)))
                .collect(),
        ),
    ));
    pairs.push((
        "outcome_counts".into(),
        Out::Obj(
            (0..4)
                .map(|pair| {
                    (
                        PAIR_LABELS[pair].to_owned(),
                        Out::Obj(
                            joint_labels(pair)
                                .iter()
                                .zip(report.counts[pair])
                                .map(|(label, count)| (label.clone(), uint(count)))
                                .collect(),
                        ),
                    )
                })
                .collect(),
        ),
    ));
    pairs.push((
        "distributions".into(),
        Out::Obj(
            (0..4)
                .map(|pair| {
                    let value = match report.conditional(pair) {
                        None => Out::Null,
                        Some(dist) => Out::Obj(
                            joint_labels(pair)
                                .iter()
                                .zip(&dist)
                                .map(|(label, p)| (label.clone(), Out::rational(p)))
                                .collect(),
                        ),
                    };
                    (PAIR_LABELS[pair].to_owned(), value)
                })
                .collect(),
        ),
    ));
    pairs.push((
        "chsh".into(),
        Out::Obj(vec![
            ("sign_map".into(), Out::str(report.chsh.sign_map.to_string())),
            (
                "correlators".into(),
                Out::Obj(
                    (0..4)
                        .map(|pair| {
                            (
                                PAIR_LABELS[pair].to_owned(),
                                optional_rational(&report.chsh.correlators[pair]),
                            )
                        })
                        .collect(),
                ),
            ),
            ("s".into(), optional_rational(&report.chsh.s)),
        ]),
    ));
}

fn optional_rational(value: &Option<BigRational>) -> Out {
    match value {
        Some(r) => Out::rational(r),
        None => Out::Null,
    }
}


fn utilities(spec: &UtilitySpec, pairs: &mut Vec<(String, Out)>) {
    for (role, ranking) in [("a", &spec.a), ("b", &spec.b), ("u", &spec.u), ("v", &spec.v)] {
        if let Some(ranks) = ranking {
            pairs.push((
                role.to_owned(),
                Out::Arr(ranks.iter().map(|&r| Out::Int(r)).collect()),
            ));
        }
    }
    pairs.push(("shared_universe".into(), Out::Bool(spec.shared_universe)));
}
