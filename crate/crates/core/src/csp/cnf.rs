//! Propositional encoding: variable `i+1` is true exactly when point `i` is
//! red. A triple becomes one at-least-one clause plus three at-most-one
//! clauses; a pair becomes a single at-most-one clause; a span becomes the
//! contrapositive of "green witnesses keep their span green".

use super::ConstraintSystem;

/// A CNF document; satisfying assignments correspond exactly to valid
/// colorings of the source system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfDoc {
    pub var_count: usize,
    pub clauses: Vec<Vec<i32>>,
    /// Variable index (1-based) to point id.
    pub labels: Vec<(usize, String)>,
}

pub fn to_cnf(sys: &ConstraintSystem) -> CnfDoc {
    let mut clauses = Vec::new();
    for t in sys.triples() {
        let [a, b, c] = [t[0] as i32 + 1, t[1] as i32 + 1, t[2] as i32 + 1];
        clauses.push(vec![a, b, c]);
        clauses.push(vec![-a, -b]);
        clauses.push(vec![-a, -c]);
        clauses.push(vec![-b, -c]);
    }
    for p in sys.pairs() {
        clauses.push(vec![-(p[0] as i32 + 1), -(p[1] as i32 + 1)]);
    }
    for s in sys.spans() {
        clauses.push(vec![
            s.witnesses[0] as i32 + 1,
            s.witnesses[1] as i32 + 1,
            -(s.spanned as i32 + 1),
        ]);
    }
    let labels = (0..sys.point_count())
        .map(|i| (i + 1, sys.display_id(i)))
        .collect();
    CnfDoc {
        var_count: sys.point_count(),
        clauses,
        labels,
    }
}

impl CnfDoc {
    /// Evaluate the formula under a red-mask assignment (bit `i` set means
    /// variable `i+1` true). Test support for the bijection checks.
    pub fn satisfied_by_mask(&self, reds: u64) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let var = lit.unsigned_abs() as usize - 1;
                let bit = (reds >> var) & 1 == 1;
                if lit > 0 {
                    bit
                } else {
                    !bit
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{ConstraintSystem, SpanConstraint};
    use super::*;
    use crate::config::Tolerances;
    use crate::geom::{canonicalize, ProjPoint, UnitVec};

    fn pt(x: f64, y: f64, z: f64) -> ProjPoint {
        canonicalize(UnitVec::normalized(x, y, z).unwrap(), &Tolerances::default())
    }

    #[test]
    fn triple_encoding() {
        let sys = ConstraintSystem::unlabeled(
            vec![pt(1.0, 0.0, 0.0), pt(0.0, 1.0, 0.0), pt(0.0, 0.0, 1.0)],
            vec![[0, 1, 2]],
            vec![],
            vec![],
        )
        .unwrap();
        let cnf = to_cnf(&sys);
        assert_eq!(cnf.var_count, 3);
        assert_eq!(
            cnf.clauses,
            vec![
                vec![1, 2, 3],
                vec![-1, -2],
                vec![-1, -3],
                vec![-2, -3],
            ]
        );
    }

    #[test]
    fn span_encoding() {
        let sys = ConstraintSystem::unlabeled(
            vec![pt(1.0, 0.0, 0.0), pt(0.0, 1.0, 0.0), pt(1.0, 1.0, 0.0)],
            vec![],
            vec![],
            vec![SpanConstraint {
                spanned: 2,
                witnesses: [0, 1],
            }],
        )
        .unwrap();
        let cnf = to_cnf(&sys);
        assert_eq!(cnf.clauses, vec![vec![1, 2, -3]]);
    }
}
