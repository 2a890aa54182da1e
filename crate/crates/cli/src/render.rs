//! Human and line-oriented output.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use empathica::engine::profile_token;
use empathica::runtime::{ClientOutcome, SessionOutcome};
use empathica::{DecisionReport, JointProfile, Scenario};

/// Left-aligned columns separated by two spaces.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

pub fn report(r: &DecisionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", r.scenario);
    let _ = writeln!(out, "conflict of interests: {}", yes_no(r.conflict));
    let _ = writeln!(out);
    let mut rows = vec![[
        "agent",
        "algorithm",
        "choice",
        "utility",
        "pragmatic conflict",
    ]
    .map(String::from)
    .to_vec()];
    for a in &r.agents {
        rows.push(vec![
            a.agent.to_string(),
            a.algorithm.to_string(),
            a.choice.to_string(),
            a.utility.to_string(),
            yes_no(a.pragmatic_conflict),
        ]);
    }
    out.push_str(&table(&rows));
    let _ = writeln!(out);
    let _ = writeln!(out, "joint profile: {}", r.joint);
    if let Some(eq) = &r.equilibria {
        let _ = writeln!(out, "equilibria of the primed game: {}", eq.len());
        for p in eq {
            let _ = writeln!(out, "  {p}");
        }
    }
    out
}

pub fn comparison(scenario: &Scenario, reports: &[DecisionReport], lines: bool) -> String {
    let ids: Vec<String> = scenario
        .agent_ids()
        .iter()
        .map(ToString::to_string)
        .collect();
    if lines {
        let mut out = format!("agents {}\n", ids.join(" "));
        for r in reports {
            let utilities: Vec<String> = r.utilities().iter().map(ToString::to_string).collect();
            let _ = writeln!(
                out,
                "row {} {} {}",
                r.agents[0].algorithm,
                profile_token(&r.joint),
                utilities.join(" ")
            );
        }
        return out;
    }
    let mut header = vec!["algorithm".to_string(), "joint profile".to_string()];
    header.extend(ids);
    let mut rows = vec![header];
    for r in reports {
        let mut row = vec![r.agents[0].algorithm.to_string(), r.joint.to_string()];
        row.extend(r.utilities().iter().map(ToString::to_string));
        rows.push(row);
    }
    format!("scenario: {}\n\n{}", scenario.name(), table(&rows))
}

pub fn equilibria(eq: &BTreeSet<JointProfile>, primed: bool, lines: bool) -> String {
    let mut out = String::new();
    if lines {
        let _ = writeln!(out, "equilibria {}", eq.len());
        for p in eq {
            let _ = writeln!(out, "equilibrium {}", profile_token(p));
        }
        return out;
    }
    let game = if primed { "primed" } else { "raw" };
    let _ = writeln!(
        out,
        "{} pure-strategy equilibria ({game} utilities)",
        eq.len()
    );
    for p in eq {
        let _ = writeln!(out, "  {p}");
    }
    out
}

pub fn session(o: &SessionOutcome, lines: bool) -> String {
    let mut out = String::new();
    if lines {
        let _ = writeln!(out, "session {}", o.session);
        let _ = writeln!(out, "joint {}", profile_token(&o.joint));
        for (id, u) in &o.utilities {
            let _ = writeln!(out, "utility {id} {u}");
        }
        return out;
    }
    let _ = writeln!(out, "session {} completed", o.session);
    let _ = writeln!(out, "joint profile: {}", o.joint);
    for (id, u) in &o.utilities {
        let _ = writeln!(out, "  {id}: {u}");
    }
    out
}

pub fn client(o: &ClientOutcome, lines: bool) -> String {
    if lines {
        return format!(
            "agent {}\nchoice {}\njoint {}\nutility {}\n",
            o.agent,
            o.choice,
            profile_token(&o.joint),
            o.utility
        );
    }
    format!(
        "agent {} committed {}\njoint profile: {}\nrealized utility: {}\n",
        o.agent, o.choice, o.joint, o.utility
    )
}
