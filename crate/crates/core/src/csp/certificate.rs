//! Machine-checkable refutation trees shaped like the geometric argument:
//! one case split over a corner triple, then per circuit point a
//! failed-literal probe ("suppose it is green") closed by propagation.

use std::fmt;

use thiserror::Error;

use super::{
    constraint_violated, eval_constraint, propagate_traced, Color, Coloring, ConstraintId,
    ConstraintSystem, Literal, PropStep, RuleOutcome,
};

/// A refutation: the root case split names a triple, and each branch
/// assumes one member red and derives a conflict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub split: ConstraintId,
    pub branches: Vec<Branch>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub assumption: Literal,
    pub steps: Vec<Step>,
    pub conflict: ConstraintId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Propagate(PropStep),
    Probe(Probe),
}

/// Assume a literal, propagate to a conflict, conclude its negation.
/// Probes nest only propagation steps; deeper search is the solver's job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub assumption: Literal,
    pub steps: Vec<PropStep>,
    pub conflict: ConstraintId,
    pub conclusion: Literal,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProveError {
    #[error("triple {0:?} is not a constraint of the system")]
    MissingTriple([usize; 3]),
    #[error("circuit index {index} out of range for {count} points")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("corner {corner} does not appear in the circuit order")]
    CornerNotInCircuit { corner: usize },
    #[error("not derivable in paper shape: {reason}")]
    NotDerivable { reason: String },
}

/// Where a certificate replay failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertCheckError {
    pub location: String,
    pub reason: String,
}

impl fmt::Display for CertCheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.reason)
    }
}

/// Derive the paper-shaped refutation: split on `corner_triple`, assume each
/// corner red in turn, then walk `circuit_order` cyclically from that corner
/// probing every unset point green until propagation closes the branch.
pub fn prove_paper_style(
    sys: &ConstraintSystem,
    corner_triple: [usize; 3],
    circuit_order: &[usize],
) -> Result<Certificate, ProveError> {
    let mut sorted = corner_triple;
    sorted.sort_unstable();
    let split_index = sys
        .triples()
        .iter()
        .position(|t| *t == sorted)
        .ok_or(ProveError::MissingTriple(corner_triple))?;
    let split = ConstraintId::Triple(split_index);

    for &i in circuit_order {
        if i >= sys.point_count() {
            return Err(ProveError::IndexOutOfRange {
                index: i,
                count: sys.point_count(),
            });
        }
    }
    for &corner in &corner_triple {
        if !circuit_order.contains(&corner) {
            return Err(ProveError::CornerNotInCircuit { corner });
        }
    }

    let mut branches = Vec::with_capacity(3);
    for &corner in &corner_triple {
        branches.push(derive_branch(sys, corner, circuit_order)?);
    }
    Ok(Certificate { split, branches })
}

fn derive_branch(
    sys: &ConstraintSystem,
    corner: usize,
    circuit_order: &[usize],
) -> Result<Branch, ProveError> {
    let assumption = Literal {
        point: corner,
        color: Color::Red,
    };
    let mut steps: Vec<Step> = Vec::new();
    let mut state = Coloring::empty(sys.point_count());
    state.set(corner, Color::Red);

    let mut trace = Vec::new();
    match propagate_traced(sys, &state, &mut trace) {
        Ok(next) => {
            steps.extend(trace.drain(..).map(Step::Propagate));
            state = next;
        }
        Err(conflict) => {
            steps.extend(trace.drain(..).map(Step::Propagate));
            return Ok(Branch {
                assumption,
                steps,
                conflict: conflict.constraint,
            });
        }
    }

    let start = circuit_order
        .iter()
        .position(|&p| p == corner)
        .expect("corner checked against circuit");
    for offset in 1..circuit_order.len() {
        let q = circuit_order[(start + offset) % circuit_order.len()];
        match state.get(q) {
            Some(Color::Red) => continue,
            Some(Color::Green) => {
                return Err(ProveError::NotDerivable {
                    reason: format!(
                        "circuit point {} is already green; the red chain cannot continue",
                        sys.display_id(q)
                    ),
                });
            }
            None => {}
        }

        // Suppose q is green; propagation must close.
        let mut probe_state = state.clone();
        probe_state.set(q, Color::Green);
        let mut probe_trace = Vec::new();
        let conflict = match propagate_traced(sys, &probe_state, &mut probe_trace) {
            Ok(_) => {
                return Err(ProveError::NotDerivable {
                    reason: format!(
                        "assuming {} green does not propagate to a conflict",
                        sys.display_id(q)
                    ),
                });
            }
            Err(c) => c.constraint,
        };
        let conclusion = Literal {
            point: q,
            color: Color::Red,
        };
        steps.push(Step::Probe(Probe {
            assumption: Literal {
                point: q,
                color: Color::Green,
            },
            steps: probe_trace,
            conflict,
            conclusion,
        }));

        state.set(q, Color::Red);
        let mut trace = Vec::new();
        match propagate_traced(sys, &state, &mut trace) {
            Ok(next) => {
                steps.extend(trace.drain(..).map(Step::Propagate));
                state = next;
            }
            Err(conflict) => {
                steps.extend(trace.drain(..).map(Step::Propagate));
                return Ok(Branch {
                    assumption,
                    steps,
                    conflict: conflict.constraint,
                });
            }
        }
    }
    Err(ProveError::NotDerivable {
        reason: format!(
            "the full circuit from {} was forced red without reaching a conflict",
            sys.display_id(corner)
        ),
    })
}

fn check_literal_in_range(sys: &ConstraintSystem, lit: Literal, loc: &str) -> Result<(), CertCheckError> {
    if lit.point >= sys.point_count() {
        return Err(CertCheckError {
            location: loc.to_string(),
            reason: format!("point {} out of range", lit.point),
        });
    }
    Ok(())
}

/// A propagation step is licensed when its premises alone force its literal
/// through the named constraint. This reuses the single-constraint rule
/// evaluation and nothing else from the propagation engine.
fn licensed(sys: &ConstraintSystem, step: &PropStep) -> bool {
    if !sys.constraint_exists(step.constraint) {
        return false;
    }
    let look = |i: usize| -> Option<Color> {
        step.premises
            .iter()
            .find(|l| l.point == i)
            .map(|l| l.color)
    };
    match eval_constraint(sys, step.constraint, &look) {
        RuleOutcome::Forces(forced) => forced.iter().any(|(lit, _)| *lit == step.literal),
        _ => false,
    }
}

fn replay_prop(
    sys: &ConstraintSystem,
    state: &mut Coloring,
    step: &PropStep,
    loc: &str,
) -> Result<(), CertCheckError> {
    check_literal_in_range(sys, step.literal, loc)?;
    for p in &step.premises {
        check_literal_in_range(sys, *p, loc)?;
        if state.get(p.point) != Some(p.color) {
            return Err(CertCheckError {
                location: loc.to_string(),
                reason: format!("premise {p} is not established"),
            });
        }
    }
    if state.get(step.literal.point).is_some() {
        return Err(CertCheckError {
            location: loc.to_string(),
            reason: format!("literal {} is already assigned", step.literal),
        });
    }
    if !licensed(sys, step) {
        return Err(CertCheckError {
            location: loc.to_string(),
            reason: format!(
                "premises do not force {} through {}",
                step.literal, step.constraint
            ),
        });
    }
    state.set(step.literal.point, step.literal.color);
    Ok(())
}

fn check_conflict(
    sys: &ConstraintSystem,
    state: &Coloring,
    id: ConstraintId,
    loc: &str,
) -> Result<(), CertCheckError> {
    if !sys.constraint_exists(id) {
        return Err(CertCheckError {
            location: loc.to_string(),
            reason: format!("conflict constraint {id} does not exist"),
        });
    }
    if !constraint_violated(sys, id, state) {
        return Err(CertCheckError {
            location: loc.to_string(),
            reason: format!("constraint {id} is not violated here"),
        });
    }
    Ok(())
}

/// Replay a certificate against the rule semantics. Accepts only if the root
/// split is an existing triple, its three branches assume exactly the
/// triple's members red, every inference is licensed, and every branch (and
/// probe) closes with a genuinely violated constraint.
pub fn check_certificate(sys: &ConstraintSystem, cert: &Certificate) -> Result<(), CertCheckError> {
    let ConstraintId::Triple(ti) = cert.split else {
        return Err(CertCheckError {
            location: "root".to_string(),
            reason: format!("split {} is not a triple", cert.split),
        });
    };
    if ti >= sys.triples().len() {
        return Err(CertCheckError {
            location: "root".to_string(),
            reason: format!("split triple T{ti} does not exist"),
        });
    }
    let members = sys.triples()[ti];
    if cert.branches.len() != 3 {
        return Err(CertCheckError {
            location: "root".to_string(),
            reason: format!("expected 3 branches, found {}", cert.branches.len()),
        });
    }
    let mut assumed: Vec<usize> = cert.branches.iter().map(|b| b.assumption.point).collect();
    assumed.sort_unstable();
    if assumed != members.to_vec() {
        return Err(CertCheckError {
            location: "root".to_string(),
            reason: "branch assumptions do not cover the split triple".to_string(),
        });
    }
    if cert
        .branches
        .iter()
        .any(|b| b.assumption.color != Color::Red)
    {
        return Err(CertCheckError {
            location: "root".to_string(),
            reason: "every branch must assume its corner red".to_string(),
        });
    }

    for (bi, branch) in cert.branches.iter().enumerate() {
        let mut state = Coloring::empty(sys.point_count());
        state.set(branch.assumption.point, branch.assumption.color);
        for (si, step) in branch.steps.iter().enumerate() {
            let loc = format!("branch {bi} step {si}");
            match step {
                Step::Propagate(p) => replay_prop(sys, &mut state, p, &loc)?,
                Step::Probe(probe) => {
                    check_literal_in_range(sys, probe.assumption, &loc)?;
                    if state.get(probe.assumption.point).is_some() {
                        return Err(CertCheckError {
                            location: loc,
                            reason: format!(
                                "probe assumption {} is already assigned",
                                probe.assumption
                            ),
                        });
                    }
                    let mut nested = state.clone();
                    nested.set(probe.assumption.point, probe.assumption.color);
                    for (ni, p) in probe.steps.iter().enumerate() {
                        let nloc = format!("{loc} nested {ni}");
                        replay_prop(sys, &mut nested, p, &nloc)?;
                    }
                    check_conflict(sys, &nested, probe.conflict, &loc)?;
                    if probe.conclusion.point != probe.assumption.point
                        || probe.conclusion.color != probe.assumption.color.opposite()
                    {
                        return Err(CertCheckError {
                            location: loc,
                            reason: format!(
                                "conclusion {} is not the negation of {}",
                                probe.conclusion, probe.assumption
                            ),
                        });
                    }
                    state.set(probe.conclusion.point, probe.conclusion.color);
                }
            }
        }
        check_conflict(sys, &state, branch.conflict, &format!("branch {bi} end"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::geom::{canonicalize, UnitVec};
    use crate::geom::ProjPoint;

    fn pt(x: f64, y: f64, z: f64) -> ProjPoint {
        canonicalize(UnitVec::normalized(x, y, z).unwrap(), &Tolerances::default())
    }

    /// Two triples tied together by spans; colorable (color the shared
    /// basis triple's z red) and small enough to follow by hand.
    fn tiny_colorable() -> ConstraintSystem {
        // Points: 0,1,2 orthogonal basis; 3 = (1,1,0)/sqrt2; 4 = (1,-1,0)/sqrt2.
        // Triples: {0,1,2}, {2,3,4}. Spans tie 3 and 4 into the basis plane.
        ConstraintSystem::unlabeled(
            vec![
                pt(1.0, 0.0, 0.0),
                pt(0.0, 1.0, 0.0),
                pt(0.0, 0.0, 1.0),
                pt(1.0, 1.0, 0.0),
                pt(1.0, -1.0, 0.0),
            ],
            vec![[0, 1, 2], [2, 3, 4]],
            vec![],
            vec![
                super::super::SpanConstraint { spanned: 3, witnesses: [0, 1] },
                super::super::SpanConstraint { spanned: 4, witnesses: [0, 1] },
                super::super::SpanConstraint { spanned: 0, witnesses: [3, 4] },
                super::super::SpanConstraint { spanned: 1, witnesses: [3, 4] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn missing_triple_is_not_derivable() {
        let sys = tiny_colorable();
        assert!(matches!(
            prove_paper_style(&sys, [0, 1, 3], &[0, 1, 3]),
            Err(ProveError::MissingTriple(_))
        ));
    }

    #[test]
    fn empty_certificate_rejected() {
        let sys = tiny_colorable();
        let cert = Certificate {
            split: ConstraintId::Triple(7),
            branches: vec![],
        };
        assert!(check_certificate(&sys, &cert).is_err());
    }

    #[test]
    fn tampered_premise_rejected() {
        let sys = tiny_colorable();
        // 0 red forces 1, 2 green by the first triple; dropping the premise
        // must invalidate the step.
        let good = PropStep {
            literal: Literal { point: 1, color: Color::Green },
            constraint: ConstraintId::Triple(0),
            premises: vec![Literal { point: 0, color: Color::Red }],
        };
        assert!(licensed(&sys, &good));
        let bad = PropStep {
            premises: vec![],
            ..good.clone()
        };
        assert!(!licensed(&sys, &bad));
    }
}
