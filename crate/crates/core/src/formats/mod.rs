//! Serialization: system documents, constraint auto-derivation, DIMACS CNF,
//! certificate text, and SVG figures.
//!
//! The system document is a line-oriented text format:
//!
//! ```text
//! ksdoc 1
//! # comment
//! tol merge 1e-7
//! derive triples spans
//! point N 0e0 0e0 1e0
//! point X 1e0 0e0 0e0
//! point Y 0e0 1e0 0e0
//! triple N X Y
//! pair X Y
//! span N X Y
//! ```
//!
//! One directive per line, whitespace separated; `#` starts a comment.
//! Points must be declared before constraints that use them. `span C A B`
//! states that `C` lies in the span of `A` and `B`. Optional `derive` flags
//! request constraint auto-derivation from the point list at load time, and
//! `tol` lines override tolerances by name. Vectors are normalized and
//! sign-canonicalized on load; numbers are written with 17 significant
//! digits so a write/parse round trip is exact.

mod cert_text;
mod dimacs;
mod svg;

pub use cert_text::{parse_certificate, write_certificate};
pub use dimacs::write_dimacs;
pub use svg::{from_canvas, render_svg, SvgFigure, SvgLayers};

use std::collections::HashMap;

use thiserror::Error;

use crate::config::Tolerances;
use crate::csp::{ConstraintSystem, SpanConstraint};
use crate::geom::{canonicalize, ProjPoint, UnitVec};

/// Derivation guard: the span scan is cubic in the point count.
pub const DERIVE_POINT_LIMIT: usize = 500;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: zero vector for `{id}`")]
    ZeroVector { line: usize, id: String },
    #[error("{points} points exceed the derivation limit of {limit}")]
    TooManyPoints { points: usize, limit: usize },
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// Which constraint kinds [`derive_constraints`] scans for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeriveOptions {
    pub triples: bool,
    pub pairs: bool,
    pub spans: bool,
}

impl Default for DeriveOptions {
    fn default() -> Self {
        DeriveOptions {
            triples: true,
            pairs: true,
            spans: true,
        }
    }
}

type DerivedRecords = (Vec<[usize; 3]>, Vec<[usize; 2]>, Vec<SpanConstraint>);

fn derive_records(
    points: &[ProjPoint],
    opts: DeriveOptions,
    tol: &Tolerances,
) -> Result<DerivedRecords, FormatError> {
    let n = points.len();
    if n > DERIVE_POINT_LIMIT {
        return Err(FormatError::TooManyPoints {
            points: n,
            limit: DERIVE_POINT_LIMIT,
        });
    }
    let orth = |a: usize, b: usize| points[a].rep().dot(&points[b].rep()).abs() < tol.orth;

    let mut triples = Vec::new();
    if opts.triples || opts.pairs {
        for a in 0..n {
            for b in (a + 1)..n {
                if !orth(a, b) {
                    continue;
                }
                for c in (b + 1)..n {
                    if orth(a, c) && orth(b, c) {
                        triples.push([a, b, c]);
                    }
                }
            }
        }
    }

    let mut pairs = Vec::new();
    if opts.pairs {
        let in_triple = |a: usize, b: usize| {
            triples
                .iter()
                .any(|t| t.contains(&a) && t.contains(&b))
        };
        for a in 0..n {
            for b in (a + 1)..n {
                if orth(a, b) && !in_triple(a, b) {
                    pairs.push([a, b]);
                }
            }
        }
    }
    if !opts.triples {
        triples.clear();
    }

    let mut spans = Vec::new();
    if opts.spans {
        for a in 0..n {
            for b in (a + 1)..n {
                let cr = points[a].rep().cross(&points[b].rep());
                let cn = (cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]).sqrt();
                if cn <= tol.orth {
                    continue;
                }
                for (c, point) in points.iter().enumerate() {
                    if c == a || c == b {
                        continue;
                    }
                    let r = point.rep();
                    let det = cr[0] * r.x() + cr[1] * r.y() + cr[2] * r.z();
                    if det.abs() < tol.orth {
                        spans.push(SpanConstraint {
                            spanned: c,
                            witnesses: [a, b],
                        });
                    }
                }
            }
        }
    }
    Ok((triples, pairs, spans))
}

/// Scan a point list for the constraints its geometry licenses: all mutually
/// orthogonal triples, orthogonal pairs not inside any emitted triple, and
/// all span relations, one record per unordered witness pair.
pub fn derive_constraints(
    points: Vec<ProjPoint>,
    opts: DeriveOptions,
    tol: &Tolerances,
) -> Result<ConstraintSystem, FormatError> {
    let labels = vec![None; points.len()];
    derive_constraints_labeled(points, labels, opts, tol)
}

/// [`derive_constraints`] preserving point labels.
pub fn derive_constraints_labeled(
    points: Vec<ProjPoint>,
    labels: Vec<Option<String>>,
    opts: DeriveOptions,
    tol: &Tolerances,
) -> Result<ConstraintSystem, FormatError> {
    let (triples, pairs, spans) = derive_records(&points, opts, tol)?;
    Ok(ConstraintSystem::new(points, labels, triples, pairs, spans)
        .expect("derived records are structurally sound"))
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-')
}

/// Parse a system document. Vectors are normalized and canonicalized; any
/// `derive` flags run against the loaded points with the document's
/// tolerance overrides applied on top of `tol`.
pub fn parse_system(text: &str, tol: &Tolerances) -> Result<ConstraintSystem, FormatError> {
    let mut efftol = *tol;
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut points: Vec<ProjPoint> = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut triples: Vec<[usize; 3]> = Vec::new();
    let mut pairs: Vec<[usize; 2]> = Vec::new();
    let mut spans: Vec<SpanConstraint> = Vec::new();
    let mut raw_points: Vec<(usize, String, f64, f64, f64)> = Vec::new();
    let mut derive_opts: Option<DeriveOptions> = None;
    let mut saw_header = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if !saw_header {
            if tokens != ["ksdoc", "1"] {
                return Err(parse_err(line, "expected header `ksdoc 1`"));
            }
            saw_header = true;
            continue;
        }
        let lookup = |tok: &str, line: usize| -> Result<usize, FormatError> {
            ids.get(tok)
                .copied()
                .ok_or_else(|| parse_err(line, format!("unknown point id `{tok}`")))
        };
        match tokens[0] {
            "point" => {
                if tokens.len() != 5 {
                    return Err(parse_err(line, "expected `point <id> <x> <y> <z>`"));
                }
                let id = tokens[1];
                if !valid_id(id) {
                    return Err(parse_err(line, format!("invalid id `{id}`")));
                }
                if ids.contains_key(id) {
                    return Err(FormatError::DuplicateId {
                        line,
                        id: id.to_string(),
                    });
                }
                let mut comps = [0.0f64; 3];
                for (k, tok) in tokens[2..5].iter().enumerate() {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| parse_err(line, format!("bad number `{tok}`")))?;
                    if !v.is_finite() {
                        return Err(parse_err(line, format!("non-finite component `{tok}`")));
                    }
                    comps[k] = v;
                }
                ids.insert(id.to_string(), raw_points.len());
                raw_points.push((line, id.to_string(), comps[0], comps[1], comps[2]));
            }
            "triple" => {
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected `triple <a> <b> <c>`"));
                }
                triples.push([
                    lookup(tokens[1], line)?,
                    lookup(tokens[2], line)?,
                    lookup(tokens[3], line)?,
                ]);
            }
            "pair" => {
                if tokens.len() != 3 {
                    return Err(parse_err(line, "expected `pair <a> <b>`"));
                }
                pairs.push([lookup(tokens[1], line)?, lookup(tokens[2], line)?]);
            }
            "span" => {
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected `span <spanned> <a> <b>`"));
                }
                spans.push(SpanConstraint {
                    spanned: lookup(tokens[1], line)?,
                    witnesses: [lookup(tokens[2], line)?, lookup(tokens[3], line)?],
                });
            }
            "derive" => {
                if tokens.len() < 2 {
                    return Err(parse_err(line, "expected `derive <triples|pairs|spans>+"));
                }
                let mut opts = derive_opts.unwrap_or(DeriveOptions {
                    triples: false,
                    pairs: false,
                    spans: false,
                });
                for flag in &tokens[1..] {
                    match *flag {
                        "triples" => opts.triples = true,
                        "pairs" => opts.pairs = true,
                        "spans" => opts.spans = true,
                        other => {
                            return Err(parse_err(line, format!("unknown derive flag `{other}`")))
                        }
                    }
                }
                derive_opts = Some(opts);
            }
            "tol" => {
                if tokens.len() != 3 {
                    return Err(parse_err(line, "expected `tol <name> <value>`"));
                }
                let value: f64 = tokens[2]
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad number `{}`", tokens[2])))?;
                efftol
                    .set(tokens[1], value)
                    .map_err(|e| parse_err(line, e))?;
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }
    if !saw_header {
        return Err(parse_err(1, "empty document: expected header `ksdoc 1`"));
    }

    for (line, id, x, y, z) in raw_points {
        let v = UnitVec::normalized(x, y, z)
            .map_err(|_| FormatError::ZeroVector { line, id: id.clone() })?;
        points.push(canonicalize(v, &efftol));
        labels.push(Some(id));
    }

    if let Some(opts) = derive_opts {
        let (dt, dp, ds) = derive_records(&points, opts, &efftol)?;
        triples.extend(dt);
        pairs.extend(dp);
        spans.extend(ds);
    }

    ConstraintSystem::new(points, labels, triples, pairs, spans)
        .map_err(|e| parse_err(0, format!("inconsistent constraints: {e}")))
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serialize a system. Deterministic, and exact under [`parse_system`].
pub fn write_system(sys: &ConstraintSystem) -> String {
    let mut out = String::from("ksdoc 1\n");
    for (i, p) in sys.points().iter().enumerate() {
        let r = p.rep();
        out.push_str(&format!(
            "point {} {} {} {}\n",
            sys.display_id(i),
            fmt_f64(r.x()),
            fmt_f64(r.y()),
            fmt_f64(r.z())
        ));
    }
    for t in sys.triples() {
        out.push_str(&format!(
            "triple {} {} {}\n",
            sys.display_id(t[0]),
            sys.display_id(t[1]),
            sys.display_id(t[2])
        ));
    }
    for p in sys.pairs() {
        out.push_str(&format!(
            "pair {} {}\n",
            sys.display_id(p[0]),
            sys.display_id(p[1])
        ));
    }
    for s in sys.spans() {
        out.push_str(&format!(
            "span {} {} {}\n",
            sys.display_id(s.spanned),
            sys.display_id(s.witnesses[0]),
            sys.display_id(s.witnesses[1])
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::proj_angle;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    const BASIS_DOC: &str = "\
ksdoc 1
# the standard basis
point x 1 0 0
point y 0 1 0
point z 0 0 1
triple x y z
";

    #[test]
    fn parse_basis_document() {
        let sys = parse_system(BASIS_DOC, &tol()).unwrap();
        assert_eq!(sys.point_count(), 3);
        assert_eq!(sys.triples().len(), 1);
        assert_eq!(sys.display_id(0), "x");
    }

    #[test]
    fn duplicate_id_rejected() {
        let doc = "ksdoc 1\npoint a 1 0 0\npoint a 0 1 0\n";
        assert!(matches!(
            parse_system(doc, &tol()),
            Err(FormatError::DuplicateId { line: 3, .. })
        ));
    }

    #[test]
    fn zero_vector_rejected() {
        let doc = "ksdoc 1\npoint a 0 0 0\n";
        assert!(matches!(
            parse_system(doc, &tol()),
            Err(FormatError::ZeroVector { .. })
        ));
    }

    #[test]
    fn unknown_id_and_directive_rejected() {
        let doc = "ksdoc 1\npoint a 1 0 0\ntriple a a b\n";
        assert!(matches!(parse_system(doc, &tol()), Err(FormatError::Parse { line: 3, .. })));
        let doc = "ksdoc 1\nfrobnicate\n";
        assert!(matches!(parse_system(doc, &tol()), Err(FormatError::Parse { line: 2, .. })));
        let doc = "not a ksdoc\n";
        assert!(matches!(parse_system(doc, &tol()), Err(FormatError::Parse { line: 1, .. })));
    }

    #[test]
    fn round_trip_is_exact() {
        let t = tol();
        let sys = parse_system(BASIS_DOC, &t).unwrap();
        let text = write_system(&sys);
        let again = parse_system(&text, &t).unwrap();
        assert_eq!(sys, again);
        assert_eq!(write_system(&again), text);

        // Unnormalized input stabilizes after the first parse.
        let doc = "ksdoc 1\npoint a 1 1 0\npoint b 3 -0.5 0.125\n";
        let s1 = parse_system(doc, &t).unwrap();
        let w1 = write_system(&s1);
        let s2 = parse_system(&w1, &t).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(write_system(&s2), w1);
    }

    #[test]
    fn derive_standard_basis() {
        let t = tol();
        let doc = "ksdoc 1\nderive triples pairs spans\npoint x 1 0 0\npoint y 0 1 0\npoint z 0 0 1\n";
        let sys = parse_system(doc, &t).unwrap();
        assert_eq!(sys.triples().len(), 1);
        assert_eq!(sys.pairs().len(), 0);
        assert_eq!(sys.spans().len(), 0);
    }

    #[test]
    fn derive_with_span_and_pair() {
        let t = tol();
        let doc = "ksdoc 1\nderive triples pairs spans\npoint x 1 0 0\npoint y 0 1 0\npoint z 0 0 1\npoint d 1 1 0\n";
        let sys = parse_system(doc, &t).unwrap();
        // d = (x+y)/sqrt2: triple {x,y,z}, span(d; x, y), pair {d, z}.
        assert_eq!(sys.triples().len(), 1);
        let d = sys.index_of_label("d").unwrap();
        let z = sys.index_of_label("z").unwrap();
        assert_eq!(sys.pairs(), &[[d.min(z), d.max(z)]]);
        let x = sys.index_of_label("x").unwrap();
        let y = sys.index_of_label("y").unwrap();
        assert!(sys
            .spans()
            .iter()
            .any(|s| s.spanned == d && s.witnesses == [x.min(y), x.max(y)]));
    }

    #[test]
    fn derive_guard() {
        let t = tol();
        let pts: Vec<ProjPoint> = (0..501)
            .map(|i| {
                let a = 0.001 + (i as f64) * 0.17;
                canonicalize(
                    UnitVec::normalized(a.cos(), a.sin(), 0.5).unwrap(),
                    &t,
                )
            })
            .collect();
        assert!(matches!(
            derive_constraints(pts, DeriveOptions::default(), &t),
            Err(FormatError::TooManyPoints { .. })
        ));
    }

    #[test]
    fn tolerance_override_applies() {
        // Two nearly orthogonal points: rejected at 1e-9, found at 1e-3.
        let doc = "ksdoc 1\nderive pairs\npoint a 1 0 0\npoint b 0.0001 1 0\n";
        let t = tol();
        let sys = parse_system(doc, &t).unwrap();
        assert_eq!(sys.pairs().len(), 0);
        let doc = "ksdoc 1\ntol orth 1e-3\nderive pairs\npoint a 1 0 0\npoint b 0.0001 1 0\n";
        let sys = parse_system(doc, &t).unwrap();
        assert_eq!(sys.pairs().len(), 1);
    }

    #[test]
    fn rederiving_the_construction_finds_every_constructor_record() {
        let t = tol();
        let built = crate::construct::build_system(30, &t).unwrap();
        let derived = derive_constraints_labeled(
            built.points().to_vec(),
            built.labels().to_vec(),
            DeriveOptions {
                triples: true,
                pairs: false,
                spans: true,
            },
            &t,
        )
        .unwrap();
        // The scan may find extra incidental relations, never fewer.
        for tr in built.triples() {
            assert!(derived.triples().contains(tr), "missing triple {tr:?}");
        }
        for sp in built.spans() {
            assert!(derived.spans().contains(sp), "missing span {sp:?}");
        }
        assert!(crate::construct::validate_geometry(&derived, &t).is_empty());
    }

    #[test]
    fn derived_points_stay_put() {
        let t = tol();
        let doc = "ksdoc 1\npoint south 0 0 -1\n";
        let sys = parse_system(doc, &t).unwrap();
        // Canonicalized to the northern representative.
        let p = sys.points()[0];
        assert!(proj_angle(&p, &canonicalize(UnitVec::normalized(0.0, 0.0, 1.0).unwrap(), &t)) < 1e-12);
    }
}
