//! Plain-text rendering of elimination traces: the same text `solve --trace`
//! prints and `explain` reproduces from a trace file.

use std::fmt::Write;

use spacetime_games_core::format::TraceDocument;

pub fn trace_text(doc: &TraceDocument) -> String {
    let trace = &doc.trace;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} elimination: {} round{}, {} surviving outcome{}",
        doc.concept,
        trace.rounds.len(),
        plural(trace.rounds.len()),
        trace.surviving.len(),
        plural(trace.surviving.len()),
    );
    for round in &trace.rounds {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "round {}: certain deciders: {}",
            round.index,
            round.certain.join(", ")
        );
        for g in &round.guarantees {
            let minima: Vec<String> = g
                .per_action
                .iter()
                .map(|(action, min)| format!("{action} >= {min}"))
                .collect();
            let _ = writeln!(
                out,
                "  {} ({}): {} -> guarantee {} via {}",
                g.infoset,
                g.agent,
                minima.join(", "),
                g.maximin,
                g.best.join(", ")
            );
        }
        for e in &round.eliminated {
            let _ = writeln!(
                out,
                "  eliminated {} {}: {} gets {} < {} at {}",
                e.outcome, e.payoffs, e.agent, e.payoff, e.maximin, e.infoset
            );
        }
    }
    let _ = writeln!(out);
    if trace.surviving.is_empty() {
        let _ = writeln!(out, "surviving: (none)");
    } else {
        let survivors: Vec<String> = trace
            .surviving
            .iter()
            .map(|o| format!("{} {}", o.id, o.payoffs))
            .collect();
        let _ = writeln!(out, "surviving: {}", survivors.join(", "));
    }
    let pinned: Vec<String> = trace
        .pinned
        .iter()
        .map(|(infoset, action)| format!("{infoset}={action}"))
        .collect();
    let _ = writeln!(
        out,
        "pinned: {}",
        if pinned.is_empty() { "(none)".to_owned() } else { pinned.join(", ") }
    );
    let _ = writeln!(
        out,
        "undefined: {}",
        if trace.undefined.is_empty() {
            "(none)".to_owned()
        } else {
            trace.undefined.join(", ")
        }
    );
    out
}

fn plural(n: usize) -> &'static str {
    if n == 1 { "" } else { "s" }
}
