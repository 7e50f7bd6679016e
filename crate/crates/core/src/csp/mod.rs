//! Coloring constraints over rank-1 directions and the decision machinery:
//! rule propagation to a fixed point, complete backtracking search, and an
//! exhaustive enumeration oracle.
//!
//! A red/green coloring is valid when every orthogonal triple has exactly
//! one red member, every orthogonal pair has at most one red member, and
//! every spanned point whose two witnesses are green is green itself.

mod certificate;
mod cnf;

pub use certificate::{
    check_certificate, prove_paper_style, Branch, CertCheckError, Certificate, Probe,
    ProveError, Step,
};
pub use cnf::{to_cnf, CnfDoc};

use std::fmt;

use thiserror::Error;

use crate::geom::ProjPoint;

/// Enumeration guard for [`count_colorings`].
pub const ENUMERATION_LIMIT: usize = 24;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CspError {
    #[error("point index {index} out of range for {count} points")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("constraint repeats point index {index}")]
    RepeatedIndex { index: usize },
    #[error("{labels} labels for {points} points")]
    LabelMismatch { labels: usize, points: usize },
    #[error("duplicate label `{label}`")]
    DuplicateLabel { label: String },
    #[error("system has {points} points, enumeration is limited to {limit}")]
    TooLarge { points: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Green,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Red => Color::Green,
            Color::Green => Color::Red,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Green => 'G',
        }
    }
}

/// A point/color pair, the unit of inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub point: usize,
    pub color: Color,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.point, self.color.letter())
    }
}

/// Stable handle of one constraint record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintId {
    Triple(usize),
    Pair(usize),
    Span(usize),
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintId::Triple(i) => write!(f, "T{i}"),
            ConstraintId::Pair(i) => write!(f, "P{i}"),
            ConstraintId::Span(i) => write!(f, "S{i}"),
        }
    }
}

/// `spanned` lies in the real span of the two `witnesses`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpanConstraint {
    pub spanned: usize,
    pub witnesses: [usize; 2],
}

/// Deduplicated points plus the TRIPLE/PAIR/SPAN records over them.
/// Constraint lists are kept sorted and free of duplicates, so two systems
/// with the same content compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    points: Vec<ProjPoint>,
    labels: Vec<Option<String>>,
    triples: Vec<[usize; 3]>,
    pairs: Vec<[usize; 2]>,
    spans: Vec<SpanConstraint>,
}

impl ConstraintSystem {
    pub fn new(
        points: Vec<ProjPoint>,
        mut labels: Vec<Option<String>>,
        mut triples: Vec<[usize; 3]>,
        mut pairs: Vec<[usize; 2]>,
        mut spans: Vec<SpanConstraint>,
    ) -> Result<ConstraintSystem, CspError> {
        let n = points.len();
        if labels.len() != n {
            return Err(CspError::LabelMismatch {
                labels: labels.len(),
                points: n,
            });
        }
        // A label equal to its own placeholder id carries no information;
        // dropping it makes write/parse round trips exact.
        for (i, label) in labels.iter_mut().enumerate() {
            if label.as_deref() == Some(format!("p{i}").as_str()) {
                *label = None;
            }
        }
        {
            let mut seen: Vec<&str> = labels.iter().flatten().map(|s| s.as_str()).collect();
            seen.sort_unstable();
            for w in seen.windows(2) {
                if w[0] == w[1] {
                    return Err(CspError::DuplicateLabel {
                        label: w[0].to_string(),
                    });
                }
            }
        }
        let check = |index: usize| -> Result<(), CspError> {
            if index >= n {
                return Err(CspError::IndexOutOfRange { index, count: n });
            }
            Ok(())
        };
        for t in triples.iter_mut() {
            t.sort_unstable();
            for &i in t.iter() {
                check(i)?;
            }
            if t[0] == t[1] || t[1] == t[2] {
                return Err(CspError::RepeatedIndex { index: t[1] });
            }
        }
        for p in pairs.iter_mut() {
            p.sort_unstable();
            for &i in p.iter() {
                check(i)?;
            }
            if p[0] == p[1] {
                return Err(CspError::RepeatedIndex { index: p[0] });
            }
        }
        for s in spans.iter_mut() {
            s.witnesses.sort_unstable();
            check(s.spanned)?;
            for &w in &s.witnesses {
                check(w)?;
            }
            if s.witnesses[0] == s.witnesses[1] {
                return Err(CspError::RepeatedIndex {
                    index: s.witnesses[0],
                });
            }
            if s.spanned == s.witnesses[0] || s.spanned == s.witnesses[1] {
                return Err(CspError::RepeatedIndex { index: s.spanned });
            }
        }
        triples.sort_unstable();
        triples.dedup();
        pairs.sort_unstable();
        pairs.dedup();
        spans.sort_unstable();
        spans.dedup();
        Ok(ConstraintSystem {
            points,
            labels,
            triples,
            pairs,
            spans,
        })
    }

    pub fn unlabeled(
        points: Vec<ProjPoint>,
        triples: Vec<[usize; 3]>,
        pairs: Vec<[usize; 2]>,
        spans: Vec<SpanConstraint>,
    ) -> Result<ConstraintSystem, CspError> {
        let labels = vec![None; points.len()];
        ConstraintSystem::new(points, labels, triples, pairs, spans)
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    pub fn pairs(&self) -> &[[usize; 2]] {
        &self.pairs
    }

    pub fn spans(&self) -> &[SpanConstraint] {
        &self.spans
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.triples.len() + self.pairs.len() + self.spans.len()
    }

    /// Label when present, otherwise `p<index>`.
    pub fn display_id(&self, index: usize) -> String {
        match &self.labels[index] {
            Some(l) => l.clone(),
            None => format!("p{index}"),
        }
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l.as_deref() == Some(label))
    }

    pub fn constraint_exists(&self, id: ConstraintId) -> bool {
        match id {
            ConstraintId::Triple(i) => i < self.triples.len(),
            ConstraintId::Pair(i) => i < self.pairs.len(),
            ConstraintId::Span(i) => i < self.spans.len(),
        }
    }

    /// The validity predicate over total colorings.
    pub fn is_valid(&self, coloring: &Coloring) -> bool {
        if coloring.len() != self.points.len() || !coloring.is_total() {
            return false;
        }
        let red = |i: usize| coloring.get(i) == Some(Color::Red);
        for t in &self.triples {
            let reds = t.iter().filter(|&&i| red(i)).count();
            if reds != 1 {
                return false;
            }
        }
        for p in &self.pairs {
            if red(p[0]) && red(p[1]) {
                return false;
            }
        }
        for s in &self.spans {
            if !red(s.witnesses[0]) && !red(s.witnesses[1]) && red(s.spanned) {
                return false;
            }
        }
        true
    }
}

/// A partial or total assignment of colors to points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    cells: Vec<Option<Color>>,
}

impl Coloring {
    pub fn empty(n: usize) -> Coloring {
        Coloring {
            cells: vec![None; n],
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<Color> {
        self.cells[i]
    }

    pub fn set(&mut self, i: usize, c: Color) {
        self.cells[i] = Some(c);
    }

    pub fn is_total(&self) -> bool {
        self.cells.iter().all(|c| c.is_some())
    }

    pub fn first_unset(&self) -> Option<usize> {
        self.cells.iter().position(|c| c.is_none())
    }

    /// `R`/`G` per point, `?` for unset.
    pub fn compact(&self) -> String {
        self.cells
            .iter()
            .map(|c| match c {
                Some(c) => c.letter(),
                None => '?',
            })
            .collect()
    }
}

/// The violated constraint that stopped propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict {
    pub constraint: ConstraintId,
}

/// One recorded inference: `literal` follows from `premises` through
/// `constraint` by a single rule application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropStep {
    pub literal: Literal,
    pub constraint: ConstraintId,
    pub premises: Vec<Literal>,
}

/// What one constraint says under a partial assignment.
pub(crate) enum RuleOutcome {
    Violated,
    Forces(Vec<(Literal, Vec<Literal>)>),
    Quiet,
}

pub(crate) fn eval_triple(members: &[usize; 3], look: &dyn Fn(usize) -> Option<Color>) -> RuleOutcome {
    let mut reds: Vec<usize> = Vec::new();
    let mut greens: Vec<usize> = Vec::new();
    let mut unset: Vec<usize> = Vec::new();
    for &i in members {
        match look(i) {
            Some(Color::Red) => reds.push(i),
            Some(Color::Green) => greens.push(i),
            None => unset.push(i),
        }
    }
    if reds.len() >= 2 || greens.len() == 3 {
        return RuleOutcome::Violated;
    }
    if reds.len() == 1 && !unset.is_empty() {
        let premises = vec![Literal {
            point: reds[0],
            color: Color::Red,
        }];
        return RuleOutcome::Forces(
            unset
                .into_iter()
                .map(|i| {
                    (
                        Literal {
                            point: i,
                            color: Color::Green,
                        },
                        premises.clone(),
                    )
                })
                .collect(),
        );
    }
    if greens.len() == 2 && unset.len() == 1 {
        let premises: Vec<Literal> = greens
            .iter()
            .map(|&i| Literal {
                point: i,
                color: Color::Green,
            })
            .collect();
        return RuleOutcome::Forces(vec![(
            Literal {
                point: unset[0],
                color: Color::Red,
            },
            premises,
        )]);
    }
    RuleOutcome::Quiet
}

pub(crate) fn eval_pair(members: &[usize; 2], look: &dyn Fn(usize) -> Option<Color>) -> RuleOutcome {
    let a = look(members[0]);
    let b = look(members[1]);
    match (a, b) {
        (Some(Color::Red), Some(Color::Red)) => RuleOutcome::Violated,
        (Some(Color::Red), None) => RuleOutcome::Forces(vec![(
            Literal {
                point: members[1],
                color: Color::Green,
            },
            vec![Literal {
                point: members[0],
                color: Color::Red,
            }],
        )]),
        (None, Some(Color::Red)) => RuleOutcome::Forces(vec![(
            Literal {
                point: members[0],
                color: Color::Green,
            },
            vec![Literal {
                point: members[1],
                color: Color::Red,
            }],
        )]),
        _ => RuleOutcome::Quiet,
    }
}

pub(crate) fn eval_span(span: &SpanConstraint, look: &dyn Fn(usize) -> Option<Color>) -> RuleOutcome {
    let [a, b] = span.witnesses;
    let c = span.spanned;
    let la = look(a);
    let lb = look(b);
    let lc = look(c);
    let green = |x: Option<Color>| x == Some(Color::Green);
    let red = |x: Option<Color>| x == Some(Color::Red);
    if green(la) && green(lb) {
        if red(lc) {
            return RuleOutcome::Violated;
        }
        if lc.is_none() {
            return RuleOutcome::Forces(vec![(
                Literal {
                    point: c,
                    color: Color::Green,
                },
                vec![
                    Literal {
                        point: a,
                        color: Color::Green,
                    },
                    Literal {
                        point: b,
                        color: Color::Green,
                    },
                ],
            )]);
        }
        return RuleOutcome::Quiet;
    }
    if red(lc) {
        // Not both witnesses can stay green.
        if green(la) && lb.is_none() {
            return RuleOutcome::Forces(vec![(
                Literal {
                    point: b,
                    color: Color::Red,
                },
                vec![
                    Literal {
                        point: c,
                        color: Color::Red,
                    },
                    Literal {
                        point: a,
                        color: Color::Green,
                    },
                ],
            )]);
        }
        if green(lb) && la.is_none() {
            return RuleOutcome::Forces(vec![(
                Literal {
                    point: a,
                    color: Color::Red,
                },
                vec![
                    Literal {
                        point: c,
                        color: Color::Red,
                    },
                    Literal {
                        point: b,
                        color: Color::Green,
                    },
                ],
            )]);
        }
    }
    RuleOutcome::Quiet
}

pub(crate) fn eval_constraint(
    sys: &ConstraintSystem,
    id: ConstraintId,
    look: &dyn Fn(usize) -> Option<Color>,
) -> RuleOutcome {
    match id {
        ConstraintId::Triple(i) => eval_triple(&sys.triples[i], look),
        ConstraintId::Pair(i) => eval_pair(&sys.pairs[i], look),
        ConstraintId::Span(i) => eval_span(&sys.spans[i], look),
    }
}

/// Is the constraint violated outright under the assignment?
pub(crate) fn constraint_violated(
    sys: &ConstraintSystem,
    id: ConstraintId,
    coloring: &Coloring,
) -> bool {
    matches!(
        eval_constraint(sys, id, &|i| coloring.get(i)),
        RuleOutcome::Violated
    )
}

fn propagate_impl(
    sys: &ConstraintSystem,
    start: &Coloring,
    mut trace: Option<&mut Vec<PropStep>>,
) -> Result<Coloring, Conflict> {
    let mut state = start.clone();
    let ids: Vec<ConstraintId> = (0..sys.triples.len())
        .map(ConstraintId::Triple)
        .chain((0..sys.pairs.len()).map(ConstraintId::Pair))
        .chain((0..sys.spans.len()).map(ConstraintId::Span))
        .collect();
    loop {
        let mut changed = false;
        for &id in &ids {
            match eval_constraint(sys, id, &|i| state.get(i)) {
                RuleOutcome::Violated => return Err(Conflict { constraint: id }),
                RuleOutcome::Forces(forced) => {
                    for (lit, premises) in forced {
                        state.set(lit.point, lit.color);
                        if let Some(t) = trace.as_deref_mut() {
                            t.push(PropStep {
                                literal: lit,
                                constraint: id,
                                premises,
                            });
                        }
                        changed = true;
                    }
                }
                RuleOutcome::Quiet => {}
            }
        }
        if !changed {
            return Ok(state);
        }
    }
}

/// Least fixed point of the coloring rules over `partial`. Constraints are
/// processed in index order until stable; monotone (never unassigns) and
/// idempotent at its fixed point.
pub fn propagate(sys: &ConstraintSystem, partial: &Coloring) -> Result<Coloring, Conflict> {
    propagate_impl(sys, partial, None)
}

/// [`propagate`] with a recorded inference trace.
pub fn propagate_traced(
    sys: &ConstraintSystem,
    partial: &Coloring,
    trace: &mut Vec<PropStep>,
) -> Result<Coloring, Conflict> {
    propagate_impl(sys, partial, Some(trace))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Valid(Coloring),
    Uncolorable,
}

/// Complete backtracking search with propagation at every node. Branching is
/// fixed: lowest-index unset point, red branch first.
pub fn solve(sys: &ConstraintSystem) -> SolveResult {
    solve_from(sys, &Coloring::empty(sys.point_count()))
}

/// [`solve`] over extensions of a partial assignment.
pub fn solve_from(sys: &ConstraintSystem, partial: &Coloring) -> SolveResult {
    match dfs(sys, partial) {
        Some(c) => SolveResult::Valid(c),
        None => SolveResult::Uncolorable,
    }
}

fn dfs(sys: &ConstraintSystem, partial: &Coloring) -> Option<Coloring> {
    let state = match propagate(sys, partial) {
        Ok(s) => s,
        Err(_) => return None,
    };
    let Some(branch_point) = state.first_unset() else {
        return Some(state);
    };
    for color in [Color::Red, Color::Green] {
        let mut next = state.clone();
        next.set(branch_point, color);
        if let Some(found) = dfs(sys, &next) {
            return Some(found);
        }
    }
    None
}

struct BitConstraints {
    triples: Vec<u32>,
    pairs: Vec<u32>,
    spans: Vec<(u32, u32)>,
}

fn compile_bits(sys: &ConstraintSystem) -> BitConstraints {
    BitConstraints {
        triples: sys
            .triples
            .iter()
            .map(|t| t.iter().fold(0u32, |m, &i| m | (1 << i)))
            .collect(),
        pairs: sys
            .pairs
            .iter()
            .map(|p| (1 << p[0]) | (1 << p[1]))
            .collect(),
        spans: sys
            .spans
            .iter()
            .map(|s| ((1 << s.witnesses[0]) | (1 << s.witnesses[1]), 1 << s.spanned))
            .collect(),
    }
}

fn mask_valid(bits: &BitConstraints, reds: u32) -> bool {
    for &t in &bits.triples {
        if (reds & t).count_ones() != 1 {
            return false;
        }
    }
    for &p in &bits.pairs {
        if (reds & p) == p {
            return false;
        }
    }
    for &(wit, spanned) in &bits.spans {
        if (reds & wit) == 0 && (reds & spanned) != 0 {
            return false;
        }
    }
    true
}

/// Exact count of valid total colorings by exhaustive enumeration,
/// independent of the search in [`solve`].
pub fn count_colorings(sys: &ConstraintSystem) -> Result<u64, CspError> {
    let n = sys.point_count();
    if n > ENUMERATION_LIMIT {
        return Err(CspError::TooLarge {
            points: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let bits = compile_bits(sys);
    let mut count = 0u64;
    for reds in 0u64..(1u64 << n) {
        if mask_valid(&bits, reds as u32) {
            count += 1;
        }
    }
    Ok(count)
}

/// First valid total coloring in red-mask enumeration order, if any.
pub fn first_valid_coloring(sys: &ConstraintSystem) -> Result<Option<Coloring>, CspError> {
    let n = sys.point_count();
    if n > ENUMERATION_LIMIT {
        return Err(CspError::TooLarge {
            points: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let bits = compile_bits(sys);
    for reds in 0u64..(1u64 << n) {
        if mask_valid(&bits, reds as u32) {
            let mut c = Coloring::empty(n);
            for i in 0..n {
                c.set(
                    i,
                    if (reds >> i) & 1 == 1 {
                        Color::Red
                    } else {
                        Color::Green
                    },
                );
            }
            return Ok(Some(c));
        }
    }
    Ok(None)
}
