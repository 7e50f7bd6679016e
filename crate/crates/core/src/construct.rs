//! Assembly of the explicit finite configuration: a closed circuit of
//! 30-degree hops whose three corners form an orthogonal triple, and one
//! descent gadget per directed circuit edge proving that redness propagates
//! from each point to the next. A red corner then forces all three corners
//! red, contradicting the triple rule.

use thiserror::Error;

use crate::config::Tolerances;
use crate::csp::{ConstraintId, ConstraintSystem, SpanConstraint};
use crate::descent::{self, DescentError, DescentPath};
use crate::geom::{
    canonicalize, e_point, latlon_to_vec, perp_point, proj_angle, Frame, GeomError, LatLon,
    ProjPoint, UnitVec,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConstructError {
    #[error("step angle {step_deg} does not divide 90")]
    BadStep { step_deg: u32 },
    #[error("pole and target are {angle_deg} degrees apart; a gadget needs an angle strictly between 0 and 45")]
    BadAngle { angle_deg: f64 },
    #[error(transparent)]
    Descent(#[from] DescentError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// The closed tour: down the longitude-0 meridian, along the equator, back
/// up the longitude-90 meridian, `90/step_deg` hops per leg. Corner indices
/// point at the pole and the two equator ends, which are mutually
/// orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    step_deg: u32,
    points: Vec<ProjPoint>,
    labels: Vec<String>,
    corners: [usize; 3],
}

impl Circuit {
    pub fn step_deg(&self) -> u32 {
        self.step_deg
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn corners(&self) -> [usize; 3] {
        self.corners
    }

    pub fn corner_points(&self) -> [ProjPoint; 3] {
        [
            self.points[self.corners[0]],
            self.points[self.corners[1]],
            self.points[self.corners[2]],
        ]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Positional label: the pole is `N`, the rest of the tour counts through
/// the alphabet (skipping `N` so ids stay unique on long circuits).
pub fn circuit_label(index: usize) -> String {
    if index == 0 {
        return "N".to_string();
    }
    const LETTERS: &[u8] = b"ABCDEFGHIJKLMOPQRSTUVWXYZ";
    let k = index - 1;
    if k < LETTERS.len() {
        (LETTERS[k] as char).to_string()
    } else {
        format!("c{index}")
    }
}

/// Build the circuit in the standard frame.
pub fn build_circuit(step_deg: u32, tol: &Tolerances) -> Result<Circuit, ConstructError> {
    if step_deg == 0 || 90 % step_deg != 0 {
        return Err(ConstructError::BadStep { step_deg });
    }
    let m = (90 / step_deg) as usize;
    let f = Frame::standard();
    let mut points = Vec::with_capacity(3 * m);
    let mut labels = Vec::with_capacity(3 * m);
    for i in 0..3 * m {
        let step = step_deg as f64;
        let ll = if i < m {
            LatLon::new(90.0 - i as f64 * step, 0.0)
        } else if i < 2 * m {
            LatLon::new(0.0, (i - m) as f64 * step)
        } else {
            LatLon::new((i - 2 * m) as f64 * step, 90.0)
        }
        .expect("circuit latitudes stay in range");
        points.push(canonicalize(latlon_to_vec(&f, ll), tol));
        labels.push(circuit_label(i));
    }
    Ok(Circuit {
        step_deg,
        points,
        labels,
        corners: [0, m, 2 * m],
    })
}

/// One descent gadget: pole `u` (red anchor), target `s`, the frame they
/// span, the descent chain from `s` down to its perpendicular point, and the
/// constraint fragment the gadget contributes. Given `u` red, the fragment
/// forces `s` red: were `s` green, every chain point would be green by the
/// span rule, including the perpendicular point that completes `s`'s triple,
/// and that triple would have no red member.
#[derive(Debug, Clone, PartialEq)]
pub struct Gadget {
    pole: ProjPoint,
    target: ProjPoint,
    frame: Frame,
    chain: DescentPath,
    system: ConstraintSystem,
    pole_index: usize,
    target_index: usize,
}

impl Gadget {
    pub fn pole(&self) -> ProjPoint {
        self.pole
    }

    pub fn target(&self) -> ProjPoint {
        self.target
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn chain(&self) -> &DescentPath {
        &self.chain
    }

    pub fn system(&self) -> &ConstraintSystem {
        &self.system
    }

    /// Index of the pole in [`Gadget::system`].
    pub fn pole_index(&self) -> usize {
        self.pole_index
    }

    /// Index of the target in [`Gadget::system`].
    pub fn target_index(&self) -> usize {
        self.target_index
    }
}

/// Build the gadget for a directed edge. The pole/target angle must lie
/// strictly between 0 and 45 degrees or the perpendicular point is not
/// strictly more southerly than the target and the descent lemma has nothing
/// to offer; the circuit uses 30 degrees.
pub fn build_gadget(u: ProjPoint, s: ProjPoint, tol: &Tolerances) -> Result<Gadget, ConstructError> {
    let theta = proj_angle(&u, &s);
    if !(theta > tol.lat && theta < 45.0 - tol.lat) {
        return Err(ConstructError::BadAngle { angle_deg: theta });
    }
    let pole = u.rep();
    let s_vec = if s.rep().dot(&pole) >= 0.0 {
        s.rep()
    } else {
        s.rep().flipped()
    };
    let frame = Frame::from_pole_and_meridian(pole, s_vec, tol)?;
    let s_e = e_point(&frame, &s_vec, tol)?;
    let s_perp = perp_point(&frame, &s_vec, tol)?;
    let from = LatLon::new(90.0 - theta, 0.0).expect("gadget latitude in range");
    let to = LatLon::new(theta, 180.0).expect("gadget latitude in range");
    let chain = descent::plan(&frame, from, to, tol)?;

    let mut builder = SystemBuilder::new();
    let iu = builder.add_point(canonicalize(pole, tol), None);
    let ie1 = builder.add_point(canonicalize(frame.e1(), tol), None);
    let ie2 = builder.add_point(canonicalize(frame.e2(), tol), None);
    let is = builder.add_point(canonicalize(s_vec, tol), None);
    let ise = builder.add_point(canonicalize(s_e, tol), None);
    let isp = builder.add_point(canonicalize(s_perp, tol), None);
    builder.add_triple([iu, ie1, ie2]);
    builder.add_triple([is, ise, isp]);

    let mut chain_indices = vec![is];
    for p in chain.points.iter().skip(1).take(chain.points.len().saturating_sub(2)) {
        chain_indices.push(builder.add_point(canonicalize(*p, tol), None));
    }
    chain_indices.push(isp);

    let e1p = canonicalize(frame.e1(), tol);
    let e2p = canonicalize(frame.e2(), tol);
    for (i, _) in chain.steps.iter().enumerate() {
        let helper_vec = e_point(&frame, &chain.points[i], tol)?;
        let helper = canonicalize(helper_vec, tol);
        let ih = builder.add_point(helper, None);
        // Equator helpers other than the frame axes are spanned by them.
        if proj_angle(&helper, &e1p) >= tol.merge && proj_angle(&helper, &e2p) >= tol.merge {
            builder.add_span(ih, [ie1, ie2]);
        }
        builder.add_span(chain_indices[i + 1], [chain_indices[i], ih]);
    }

    let (system, remap) = builder.finish(tol);
    Ok(Gadget {
        pole: canonicalize(pole, tol),
        target: canonicalize(s_vec, tol),
        frame,
        chain,
        pole_index: remap[iu],
        target_index: remap[is],
        system,
    })
}

/// The full configuration: the corner triple plus the union of one gadget
/// per directed circuit edge, projectively deduplicated.
pub fn build_system(step_deg: u32, tol: &Tolerances) -> Result<ConstraintSystem, ConstructError> {
    let circuit = build_circuit(step_deg, tol)?;
    let mut builder = SystemBuilder::new();
    let mut circuit_indices = Vec::with_capacity(circuit.len());
    for (p, label) in circuit.points().iter().zip(circuit.labels()) {
        circuit_indices.push(builder.add_point(*p, Some(label.clone())));
    }
    let [c0, c1, c2] = circuit.corners();
    builder.add_triple([
        circuit_indices[c0],
        circuit_indices[c1],
        circuit_indices[c2],
    ]);

    for k in 0..circuit.len() {
        let u = circuit.points()[k];
        let s = circuit.points()[(k + 1) % circuit.len()];
        let gadget = build_gadget(u, s, tol)?;
        builder.absorb(gadget.system(), tol);
    }

    let (system, _) = builder.finish(tol);
    Ok(system)
}

/// A constraint whose geometric witness fails.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryViolation {
    pub constraint: ConstraintId,
    pub message: String,
}

fn det3(a: &UnitVec, b: &UnitVec, c: &UnitVec) -> f64 {
    let cb = b.cross(c);
    a.x() * cb[0] + a.y() * cb[1] + a.z() * cb[2]
}

/// Check that every constraint is licensed by the geometry: triples and
/// pairs mutually orthogonal, spans genuinely coplanar with non-parallel
/// witnesses.
pub fn validate_geometry(sys: &ConstraintSystem, tol: &Tolerances) -> Vec<GeometryViolation> {
    let mut out = Vec::new();
    let p = sys.points();
    for (i, t) in sys.triples().iter().enumerate() {
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            let d = p[a].rep().dot(&p[b].rep()).abs();
            if d >= tol.orth {
                out.push(GeometryViolation {
                    constraint: ConstraintId::Triple(i),
                    message: format!(
                        "{} and {} have |dot| = {d:e}",
                        sys.display_id(a),
                        sys.display_id(b)
                    ),
                });
            }
        }
    }
    for (i, pr) in sys.pairs().iter().enumerate() {
        let d = p[pr[0]].rep().dot(&p[pr[1]].rep()).abs();
        if d >= tol.orth {
            out.push(GeometryViolation {
                constraint: ConstraintId::Pair(i),
                message: format!(
                    "{} and {} have |dot| = {d:e}",
                    sys.display_id(pr[0]),
                    sys.display_id(pr[1])
                ),
            });
        }
    }
    for (i, s) in sys.spans().iter().enumerate() {
        let [a, b] = s.witnesses;
        let c = s.spanned;
        let cr = p[a].rep().cross(&p[b].rep());
        let cn = (cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]).sqrt();
        if cn <= tol.orth {
            out.push(GeometryViolation {
                constraint: ConstraintId::Span(i),
                message: format!(
                    "witnesses {} and {} are parallel",
                    sys.display_id(a),
                    sys.display_id(b)
                ),
            });
            continue;
        }
        let d = det3(&p[a].rep(), &p[b].rep(), &p[c].rep()).abs();
        if d >= tol.orth {
            out.push(GeometryViolation {
                constraint: ConstraintId::Span(i),
                message: format!(
                    "{} is not in the span of {} and {} (|det| = {d:e})",
                    sys.display_id(c),
                    sys.display_id(a),
                    sys.display_id(b)
                ),
            });
        }
    }
    out
}

/// Accumulates points and constraints, then deduplicates projectively and
/// emits a canonical [`ConstraintSystem`]. The result depends only on the
/// set of entries, not on insertion order: points are clustered by angle,
/// each cluster is represented by its lexicographically smallest member, and
/// clusters are sorted (labeled ones first, by label, then the rest by
/// coordinates).
#[derive(Debug, Default)]
pub struct SystemBuilder {
    points: Vec<(ProjPoint, Option<String>)>,
    triples: Vec<[usize; 3]>,
    pairs: Vec<[usize; 2]>,
    spans: Vec<SpanConstraint>,
}

impl SystemBuilder {
    pub fn new() -> SystemBuilder {
        SystemBuilder::default()
    }

    /// Returns a provisional index, remapped by [`SystemBuilder::finish`].
    pub fn add_point(&mut self, p: ProjPoint, label: Option<String>) -> usize {
        self.points.push((p, label));
        self.points.len() - 1
    }

    pub fn add_triple(&mut self, t: [usize; 3]) {
        self.triples.push(t);
    }

    pub fn add_pair(&mut self, p: [usize; 2]) {
        self.pairs.push(p);
    }

    pub fn add_span(&mut self, spanned: usize, witnesses: [usize; 2]) {
        self.spans.push(SpanConstraint { spanned, witnesses });
    }

    /// Merge another system's points and constraints into this builder.
    pub fn absorb(&mut self, sys: &ConstraintSystem, _tol: &Tolerances) {
        let offset: Vec<usize> = sys
            .points()
            .iter()
            .zip(sys.labels())
            .map(|(p, l)| self.add_point(*p, l.clone()))
            .collect();
        for t in sys.triples() {
            self.add_triple([offset[t[0]], offset[t[1]], offset[t[2]]]);
        }
        for p in sys.pairs() {
            self.add_pair([offset[p[0]], offset[p[1]]]);
        }
        for s in sys.spans() {
            self.add_span(offset[s.spanned], [offset[s.witnesses[0]], offset[s.witnesses[1]]]);
        }
    }

    /// Deduplicate and emit, returning the system and the map from
    /// provisional indices to final ones.
    pub fn finish(self, tol: &Tolerances) -> (ConstraintSystem, Vec<usize>) {
        let n = self.points.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], i: usize) -> usize {
            let mut root = i;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = i;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if proj_angle(&self.points[i].0, &self.points[j].0) < tol.merge {
                    let ri = find(&mut parent, i);
                    let rj = find(&mut parent, j);
                    if ri != rj {
                        parent[rj] = ri;
                    }
                }
            }
        }

        let lex_key = |p: &ProjPoint| (p.rep().x(), p.rep().y(), p.rep().z());
        let mut clusters: Vec<(usize, ProjPoint, Option<String>)> = Vec::new();
        let mut cluster_of_root: Vec<Option<usize>> = vec![None; n];
        for i in 0..n {
            let root = find(&mut parent, i);
            let (p, label) = &self.points[i];
            match cluster_of_root[root] {
                None => {
                    cluster_of_root[root] = Some(clusters.len());
                    clusters.push((root, *p, label.clone()));
                }
                Some(ci) => {
                    let entry = &mut clusters[ci];
                    if lex_key(p) < lex_key(&entry.1) {
                        entry.1 = *p;
                    }
                    if let Some(l) = label {
                        match &entry.2 {
                            Some(existing) if existing <= l => {}
                            _ => entry.2 = Some(l.clone()),
                        }
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..clusters.len()).collect();
        order.sort_by(|&a, &b| {
            let (_, pa, la) = &clusters[a];
            let (_, pb, lb) = &clusters[b];
            match (la, lb) {
                (Some(x), Some(y)) => x.cmp(y),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => lex_key(pa)
                    .partial_cmp(&lex_key(pb))
                    .expect("finite coordinates"),
            }
        });
        let mut final_of_cluster = vec![0usize; clusters.len()];
        let mut points = Vec::with_capacity(clusters.len());
        let mut labels = Vec::with_capacity(clusters.len());
        for (rank, &ci) in order.iter().enumerate() {
            final_of_cluster[ci] = rank;
            points.push(clusters[ci].1);
            labels.push(clusters[ci].2.clone());
        }
        let mut remap = vec![0usize; n];
        for (i, slot) in remap.iter_mut().enumerate() {
            let root = find(&mut parent, i);
            *slot = final_of_cluster[cluster_of_root[root].expect("every root seen")];
        }

        // Constraints that collapse onto a repeated point after merging are
        // tautological and dropped.
        let mut triples = Vec::new();
        for t in &self.triples {
            let mut m = [remap[t[0]], remap[t[1]], remap[t[2]]];
            m.sort_unstable();
            if m[0] != m[1] && m[1] != m[2] {
                triples.push(m);
            }
        }
        let mut pairs = Vec::new();
        for p in &self.pairs {
            let mut m = [remap[p[0]], remap[p[1]]];
            m.sort_unstable();
            if m[0] != m[1] {
                pairs.push(m);
            }
        }
        let mut spans = Vec::new();
        for s in &self.spans {
            let spanned = remap[s.spanned];
            let mut w = [remap[s.witnesses[0]], remap[s.witnesses[1]]];
            w.sort_unstable();
            if w[0] != w[1] && spanned != w[0] && spanned != w[1] {
                spans.push(SpanConstraint {
                    spanned,
                    witnesses: w,
                });
            }
        }

        let system = ConstraintSystem::new(points, labels, triples, pairs, spans)
            .expect("builder output is structurally sound");
        (system, remap)
    }
}
