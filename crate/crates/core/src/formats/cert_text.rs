//! Line-oriented certificate text. One step per line:
//!
//! ```text
//! kscert 1
//! SPLIT T0
//! ASSUME 8 R
//! PROP 2 G T0 8=R
//! PROBE 0 G
//! PROP 9 G S3 0=G 5=G
//! CONFLICT T1
//! CONCLUDE 0 R
//! CONFLICT T0
//! ```
//!
//! `ASSUME` opens a branch; inside a probe only `PROP` lines may appear and
//! the probe closes with its `CONFLICT` followed by `CONCLUDE`. A `CONFLICT`
//! at branch level ends the branch. Points are indices; constraint ids are
//! `T`/`P`/`S` plus an index; premises are `point=color` tokens.

use crate::csp::{
    Branch, Certificate, Color, ConstraintId, Literal, Probe, PropStep, Step,
};

use super::{parse_err, FormatError};

fn cid_str(id: ConstraintId) -> String {
    id.to_string()
}

fn write_prop(out: &mut String, p: &PropStep) {
    out.push_str(&format!(
        "PROP {} {} {}",
        p.literal.point,
        p.literal.color.letter(),
        cid_str(p.constraint)
    ));
    for premise in &p.premises {
        out.push_str(&format!(" {}={}", premise.point, premise.color.letter()));
    }
    out.push('\n');
}

pub fn write_certificate(cert: &Certificate) -> String {
    let mut out = String::from("kscert 1\n");
    out.push_str(&format!("SPLIT {}\n", cid_str(cert.split)));
    for branch in &cert.branches {
        out.push_str(&format!(
            "ASSUME {} {}\n",
            branch.assumption.point,
            branch.assumption.color.letter()
        ));
        for step in &branch.steps {
            match step {
                Step::Propagate(p) => write_prop(&mut out, p),
                Step::Probe(probe) => {
                    out.push_str(&format!(
                        "PROBE {} {}\n",
                        probe.assumption.point,
                        probe.assumption.color.letter()
                    ));
                    for p in &probe.steps {
                        write_prop(&mut out, p);
                    }
                    out.push_str(&format!("CONFLICT {}\n", cid_str(probe.conflict)));
                    out.push_str(&format!(
                        "CONCLUDE {} {}\n",
                        probe.conclusion.point,
                        probe.conclusion.color.letter()
                    ));
                }
            }
        }
        out.push_str(&format!("CONFLICT {}\n", cid_str(branch.conflict)));
    }
    out
}

fn parse_color(tok: &str, line: usize) -> Result<Color, FormatError> {
    match tok {
        "R" => Ok(Color::Red),
        "G" => Ok(Color::Green),
        _ => Err(parse_err(line, format!("expected color R or G, got `{tok}`"))),
    }
}

fn parse_point(tok: &str, line: usize) -> Result<usize, FormatError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad point index `{tok}`")))
}

fn parse_cid(tok: &str, line: usize) -> Result<ConstraintId, FormatError> {
    let mut chars = tok.chars();
    let kind = chars.next();
    let index: usize = chars
        .as_str()
        .parse()
        .map_err(|_| parse_err(line, format!("bad constraint id `{tok}`")))?;
    match kind {
        Some('T') => Ok(ConstraintId::Triple(index)),
        Some('P') => Ok(ConstraintId::Pair(index)),
        Some('S') => Ok(ConstraintId::Span(index)),
        _ => Err(parse_err(line, format!("bad constraint id `{tok}`"))),
    }
}

fn parse_literal_pair(tokens: &[&str], line: usize) -> Result<Literal, FormatError> {
    if tokens.len() != 2 {
        return Err(parse_err(line, "expected `<point> <color>`"));
    }
    Ok(Literal {
        point: parse_point(tokens[0], line)?,
        color: parse_color(tokens[1], line)?,
    })
}

fn parse_prop(tokens: &[&str], line: usize) -> Result<PropStep, FormatError> {
    if tokens.len() < 3 {
        return Err(parse_err(line, "expected `PROP <point> <color> <cid> <premise>*`"));
    }
    let literal = Literal {
        point: parse_point(tokens[0], line)?,
        color: parse_color(tokens[1], line)?,
    };
    let constraint = parse_cid(tokens[2], line)?;
    let mut premises = Vec::new();
    for tok in &tokens[3..] {
        let Some((pt, col)) = tok.split_once('=') else {
            return Err(parse_err(line, format!("bad premise `{tok}`")));
        };
        premises.push(Literal {
            point: parse_point(pt, line)?,
            color: parse_color(col, line)?,
        });
    }
    Ok(PropStep {
        literal,
        constraint,
        premises,
    })
}

enum Mode {
    /// Between branches, nothing open.
    Top,
    /// Inside a branch body.
    Branch,
    /// Inside a probe, before its conflict.
    Probe,
    /// Probe conflict seen, waiting for CONCLUDE.
    ProbeConcluding,
}

pub fn parse_certificate(text: &str) -> Result<Certificate, FormatError> {
    let mut split: Option<ConstraintId> = None;
    let mut branches: Vec<Branch> = Vec::new();
    let mut saw_header = false;

    let mut mode = Mode::Top;
    let mut cur_assumption: Option<Literal> = None;
    let mut cur_steps: Vec<Step> = Vec::new();
    let mut probe_assumption: Option<Literal> = None;
    let mut probe_steps: Vec<PropStep> = Vec::new();
    let mut probe_conflict: Option<ConstraintId> = None;
    let mut last_line = 0usize;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        last_line = line;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if !saw_header {
            if tokens != ["kscert", "1"] {
                return Err(parse_err(line, "expected header `kscert 1`"));
            }
            saw_header = true;
            continue;
        }
        if split.is_none() {
            if tokens.len() != 2 || tokens[0] != "SPLIT" {
                return Err(parse_err(line, "expected `SPLIT <triple-id>`"));
            }
            split = Some(parse_cid(tokens[1], line)?);
            continue;
        }
        let verb = tokens[0];
        let args = &tokens[1..];
        match mode {
            Mode::Top => match verb {
                "ASSUME" => {
                    cur_assumption = Some(parse_literal_pair(args, line)?);
                    cur_steps = Vec::new();
                    mode = Mode::Branch;
                }
                _ => return Err(parse_err(line, format!("expected ASSUME, got `{verb}`"))),
            },
            Mode::Branch => match verb {
                "PROP" => cur_steps.push(Step::Propagate(parse_prop(args, line)?)),
                "PROBE" => {
                    probe_assumption = Some(parse_literal_pair(args, line)?);
                    probe_steps = Vec::new();
                    mode = Mode::Probe;
                }
                "CONFLICT" => {
                    if args.len() != 1 {
                        return Err(parse_err(line, "expected `CONFLICT <cid>`"));
                    }
                    branches.push(Branch {
                        assumption: cur_assumption.take().expect("branch open"),
                        steps: std::mem::take(&mut cur_steps),
                        conflict: parse_cid(args[0], line)?,
                    });
                    mode = Mode::Top;
                }
                "ASSUME" => {
                    return Err(parse_err(
                        line,
                        "branch must end in CONFLICT before the next ASSUME",
                    ))
                }
                _ => return Err(parse_err(line, format!("unexpected `{verb}` in branch"))),
            },
            Mode::Probe => match verb {
                "PROP" => probe_steps.push(parse_prop(args, line)?),
                "CONFLICT" => {
                    if args.len() != 1 {
                        return Err(parse_err(line, "expected `CONFLICT <cid>`"));
                    }
                    probe_conflict = Some(parse_cid(args[0], line)?);
                    mode = Mode::ProbeConcluding;
                }
                _ => {
                    return Err(parse_err(
                        line,
                        format!("unexpected `{verb}` inside a probe"),
                    ))
                }
            },
            Mode::ProbeConcluding => match verb {
                "CONCLUDE" => {
                    let conclusion = parse_literal_pair(args, line)?;
                    cur_steps.push(Step::Probe(Probe {
                        assumption: probe_assumption.take().expect("probe open"),
                        steps: std::mem::take(&mut probe_steps),
                        conflict: probe_conflict.take().expect("probe conflict seen"),
                        conclusion,
                    }));
                    mode = Mode::Branch;
                }
                _ => {
                    return Err(parse_err(
                        line,
                        format!("expected CONCLUDE after probe conflict, got `{verb}`"),
                    ))
                }
            },
        }
    }

    if !saw_header {
        return Err(parse_err(1, "empty document: expected header `kscert 1`"));
    }
    let Some(split) = split else {
        return Err(parse_err(last_line, "missing SPLIT"));
    };
    match mode {
        Mode::Top => {}
        Mode::Branch => {
            return Err(parse_err(last_line, "truncated: branch must end in CONFLICT"))
        }
        Mode::Probe | Mode::ProbeConcluding => {
            return Err(parse_err(last_line, "truncated: unclosed probe"))
        }
    }
    Ok(Certificate { split, branches })
}
