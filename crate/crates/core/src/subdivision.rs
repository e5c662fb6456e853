//! Schlegel-diagram subdivisions and towers of iterated chromatic subdivisions.
//!
//! `Ch C` is built as the composition of relative Schlegel steps on the
//! simplexes of `C`, in decreasing dimension. A [`Tower`] records every such
//! step for `K` iterations together with the parent map of each step, so that
//! composite parent maps and carriers can be queried between any two stages.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::complex::{Complex, Simplex};
use crate::error::ComplexError;
use crate::label::Label;

/// Round `(k, d)`: iteration `k`, subdividing `d`-simplexes.
///
/// Ordered by iteration, then by decreasing dimension.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct StageId {
    pub k: usize,
    pub d: usize,
}

impl StageId {
    pub fn new(k: usize, d: usize) -> StageId {
        StageId { k, d }
    }
}

impl Ord for StageId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k.cmp(&other.k).then(other.d.cmp(&self.d))
    }
}

impl PartialOrd for StageId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for StageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.d)
    }
}

impl Serialize for StageId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.k, self.d).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StageId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (k, d) = <(usize, usize)>::deserialize(deserializer)?;
        Ok(StageId { k, d })
    }
}

/// A point in a tower: the input complex, or the complex after some stage.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Position {
    Input,
    After(StageId),
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Input => f.write_str("input"),
            Position::After(s) => write!(f, "after{s}"),
        }
    }
}

fn max_color(sigma: &Simplex) -> usize {
    sigma.vertices().iter().map(|v| v.color().0).max().unwrap_or(0)
}

fn schlegel_facets(sigma: &Simplex, d: usize) -> Vec<Simplex> {
    if sigma.dim() != d as isize {
        return vec![sigma.clone()];
    }
    let verts = sigma.vertices();
    let size = verts.len();
    let mut out = Vec::with_capacity((1 << size) - 1);
    // ascending bitmask over positions of σ
    for mask in 1u32..(1 << size) {
        let mut facet = Vec::with_capacity(size);
        for (pos, v) in verts.iter().enumerate() {
            if mask & (1 << pos) == 0 {
                facet.push(v.clone());
            } else {
                facet.push(Label::pair_sorted(v.color(), verts));
            }
        }
        facet.sort();
        out.push(Simplex::from_sorted_unchecked(facet));
    }
    out
}

/// `Sch^d σ`: the Schlegel-diagram subdivision of a `d`-simplex, or `cls σ`
/// when `dim σ ≠ d`.
pub fn schlegel_simplex(sigma: &Simplex, d: usize) -> Complex {
    Complex::new(max_color(sigma), schlegel_facets(sigma, d)).expect("Schlegel facets are chromatic")
}

/// One relative Schlegel step, `before → after`, with its parent map.
#[derive(Clone, Debug)]
pub struct Stage {
    pub id: StageId,
    pub before: Complex,
    pub after: Complex,
    /// Vertices of `after` to vertices of `before`.
    pub parent_step: BTreeMap<Label, Label>,
    /// The `d`-simplexes of `C ∩ D` that this step subdivided.
    pub subdivided: Vec<Simplex>,
}

impl Stage {
    pub fn parent(&self, v: &Label) -> Result<&Label, ComplexError> {
        self.parent_step
            .get(v)
            .ok_or_else(|| ComplexError::VertexNotFound(v.clone()))
    }
}

/// `Sch_C^d D`: subdivides every `d`-simplex of `C ∩ D` by its Schlegel
/// diagram and joins the pieces into the incident simplexes of `D`.
///
/// `D` must subdivide `C` above dimension `d` only (`C ∩ D = skel^d C`).
pub fn schlegel_step(base: &Complex, current: &Complex, dim: usize, iteration: usize) -> Result<Stage, ComplexError> {
    let base_vertices = base.vertices();
    let mut subdivided = BTreeSet::new();
    let mut facets = Vec::new();
    for f in current.facets() {
        let sigma = Simplex::from_sorted_unchecked(
            f.vertices()
                .iter()
                .filter(|v| base_vertices.contains(*v))
                .cloned()
                .collect(),
        );
        if sigma.len() > dim + 1 || !base.contains(&sigma) {
            return Err(ComplexError::PreconditionViolated(format!(
                "{sigma} lies in C ∩ D but is not in the {dim}-skeleton of C"
            )));
        }
        if sigma.len() == dim + 1 {
            let tau = f.difference(&sigma);
            for piece in schlegel_facets(&sigma, dim) {
                facets.push(tau.join(&piece)?);
            }
            subdivided.insert(sigma);
        } else {
            facets.push(f.clone());
        }
    }
    for bf in base.facets() {
        for face in bf.faces_of_size(dim + 1) {
            if !current.contains(&face) {
                return Err(ComplexError::PreconditionViolated(format!(
                    "{dim}-simplex {face} of C is already subdivided in D"
                )));
            }
        }
    }
    let after = Complex::new(current.n().max(base.n()), facets)?;
    let mut parent_step = BTreeMap::new();
    for v in after.vertices() {
        let parent = if current.has_vertex(&v) {
            v.clone()
        } else {
            v.own_member()
                .cloned()
                .ok_or_else(|| ComplexError::MalformedLabel(format!("new vertex {v} is not a pair")))?
        };
        parent_step.insert(v, parent);
    }
    Ok(Stage {
        id: StageId::new(iteration, dim),
        before: current.clone(),
        after,
        parent_step,
        subdivided: subdivided.into_iter().collect(),
    })
}

/// `Ch C = Sch_C^{0,d} C` for a pure `d`-complex.
pub fn chromatic_subdivision(c: &Complex) -> Result<Complex, ComplexError> {
    Ok(Tower::build(c, 1)?.final_complex().clone())
}

/// The `K·(d+1)` Schlegel stages from an input complex to `Ch^K` of it.
#[derive(Clone, Debug)]
pub struct Tower {
    input: Complex,
    dim: usize,
    iterations: usize,
    stages: Vec<Stage>,
}

impl Tower {
    pub fn build(input: &Complex, iterations: usize) -> Result<Tower, ComplexError> {
        if !input.is_pure() || input.is_empty() {
            return Err(ComplexError::NotPure);
        }
        if iterations == 0 {
            return Err(ComplexError::PreconditionViolated(
                "a tower needs at least one iteration".into(),
            ));
        }
        let dim = usize::try_from(input.dim()).map_err(|_| ComplexError::NotPure)?;
        let mut stages = Vec::with_capacity(iterations * (dim + 1));
        let mut base = input.clone();
        for k in 1..=iterations {
            let mut current = base.clone();
            for d in (0..=dim).rev() {
                let stage = schlegel_step(&base, &current, d, k)?;
                current = stage.after.clone();
                stages.push(stage);
            }
            base = current;
        }
        Ok(Tower {
            input: input.clone(),
            dim,
            iterations,
            stages,
        })
    }

    /// Dimension of the input, i.e. the `n` of an `n+1`-process system.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn input(&self) -> &Complex {
        &self.input
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn final_complex(&self) -> &Complex {
        &self.stages.last().expect("towers are nonempty").after
    }

    pub fn final_position(&self) -> Position {
        Position::After(StageId::new(self.iterations, 0))
    }

    pub fn stage_ids(&self) -> impl Iterator<Item = StageId> + '_ {
        self.stages.iter().map(|s| s.id)
    }

    pub fn stage_index(&self, id: StageId) -> Result<usize, ComplexError> {
        if id.k == 0 || id.k > self.iterations || id.d > self.dim {
            return Err(ComplexError::UnknownPosition(id.to_string()));
        }
        Ok((id.k - 1) * (self.dim + 1) + (self.dim - id.d))
    }

    pub fn stage(&self, id: StageId) -> Result<&Stage, ComplexError> {
        Ok(&self.stages[self.stage_index(id)?])
    }

    /// Index into the sequence input, after(1,dim), …, after(K,0).
    pub fn position_index(&self, pos: Position) -> Result<usize, ComplexError> {
        match pos {
            Position::Input => Ok(0),
            Position::After(id) => Ok(self.stage_index(id)? + 1),
        }
    }

    pub fn position_at(&self, index: usize) -> Position {
        if index == 0 {
            Position::Input
        } else {
            Position::After(self.stages[index - 1].id)
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        (0..=self.stages.len()).map(|i| self.position_at(i))
    }

    /// The position a process occupies when it enters round `id`.
    pub fn before(&self, id: StageId) -> Result<Position, ComplexError> {
        let idx = self.position_index(Position::After(id))?;
        Ok(self.position_at(idx - 1))
    }

    /// `Ch^{k-1}` of the input: where iteration `k` starts.
    pub fn iteration_start(&self, k: usize) -> Result<Position, ComplexError> {
        if k == 0 || k > self.iterations + 1 {
            return Err(ComplexError::UnknownPosition(format!("iteration {k}")));
        }
        Ok(if k == 1 {
            Position::Input
        } else {
            Position::After(StageId::new(k - 1, 0))
        })
    }

    pub fn complex_at(&self, pos: Position) -> Result<&Complex, ComplexError> {
        let idx = self.position_index(pos)?;
        Ok(if idx == 0 {
            &self.input
        } else {
            &self.stages[idx - 1].after
        })
    }

    /// Composition of the step parent maps from `from` down to `to`.
    pub fn composite_parent(&self, from: Position, to: Position, v: &Label) -> Result<Label, ComplexError> {
        let hi = self.position_index(from)?;
        let lo = self.position_index(to)?;
        if lo > hi {
            return Err(ComplexError::PreconditionViolated(format!(
                "parent map from {from} to later position {to}"
            )));
        }
        if !self.complex_at(from)?.has_vertex(v) {
            return Err(ComplexError::VertexNotFound(v.clone()));
        }
        let mut cur = v.clone();
        for stage in self.stages[lo..hi].iter().rev() {
            cur = stage.parent(&cur)?.clone();
        }
        Ok(cur)
    }

    /// Carrier of `{v}` in the complex at `pos`, for `v` a vertex of that
    /// complex or of any later one.
    pub fn carrier_at(&self, pos: Position, v: &Label) -> Result<Simplex, ComplexError> {
        let cx = self.complex_at(pos)?;
        let mut acc = Simplex::empty();
        self.unfold_carrier(cx, v, &mut acc)?;
        if !cx.contains(&acc) {
            return Err(ComplexError::PreconditionViolated(format!(
                "carrier {acc} of {v} is not a simplex at {pos}"
            )));
        }
        Ok(acc)
    }

    fn unfold_carrier(&self, cx: &Complex, v: &Label, acc: &mut Simplex) -> Result<(), ComplexError> {
        if cx.has_vertex(v) {
            *acc = acc.union(&Simplex::from_sorted_unchecked(vec![v.clone()]))?;
            return Ok(());
        }
        match v.view() {
            None => Err(ComplexError::VertexNotFound(v.clone())),
            Some(view) => view.iter().try_for_each(|m| self.unfold_carrier(cx, m, acc)),
        }
    }

    /// SHA-256 over the canonical JSON of the input and final complexes.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("dim={};iterations={};", self.dim, self.iterations));
        h.update(self.input.to_json());
        h.update(self.final_complex().to_json());
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(i: usize) -> Label {
        Label::base(i)
    }

    fn p(i: usize, view: &[usize]) -> Label {
        Label::pair(i, view.iter().map(|&j| b(j))).unwrap()
    }

    fn s(vs: Vec<Label>) -> Simplex {
        Simplex::new(vs).unwrap()
    }

    #[test]
    fn stage_order() {
        let mut ids = vec![
            StageId::new(2, 1),
            StageId::new(1, 0),
            StageId::new(1, 2),
            StageId::new(2, 2),
        ];
        ids.sort();
        assert_eq!(
            ids,
            vec![
                StageId::new(1, 2),
                StageId::new(1, 0),
                StageId::new(2, 2),
                StageId::new(2, 1)
            ]
        );
    }

    #[test]
    fn schlegel_of_an_edge() {
        let edge = Simplex::from_colors([0, 1]).unwrap();
        let sch = schlegel_simplex(&edge, 1);
        let expect = vec![
            s(vec![b(0), p(1, &[0, 1])]),
            s(vec![b(1), p(0, &[0, 1])]),
            s(vec![p(0, &[0, 1]), p(1, &[0, 1])]),
        ];
        let mut got = sch.facets().to_vec();
        got.sort();
        let mut expect_sorted = expect;
        expect_sorted.sort();
        assert_eq!(got, expect_sorted);
    }

    #[test]
    fn schlegel_trivial_and_point_cases() {
        let edge = Simplex::from_colors([0, 1]).unwrap();
        assert_eq!(schlegel_simplex(&edge, 2).facets(), std::slice::from_ref(&edge));
        let point = Simplex::from_colors([1]).unwrap();
        assert_eq!(schlegel_simplex(&point, 0).facets(), &[s(vec![p(1, &[1])])]);
        let tri = Simplex::from_colors([0, 1, 2]).unwrap();
        assert_eq!(schlegel_simplex(&tri, 2).facets().len(), 7);
    }

    #[test]
    fn first_step_on_a_triangle() {
        let c = Complex::standard(2);
        let st = schlegel_step(&c, &c, 2, 1).unwrap();
        assert_eq!(st.after.facets().len(), 7);
        assert_eq!(st.parent(&p(2, &[0, 1, 2])).unwrap(), &b(2));
        assert_eq!(st.parent(&b(0)).unwrap(), &b(0));
        // the (1)-step refines {0,1}∗{(2,{0,1,2})} into three triangles
        let next = schlegel_step(&c, &st.after, 1, 1).unwrap();
        let target = s(vec![p(0, &[0, 1]), p(1, &[0, 1]), p(2, &[0, 1, 2])]);
        assert!(next.after.facets().contains(&target));
        for piece in [
            s(vec![b(0), p(1, &[0, 1]), p(2, &[0, 1, 2])]),
            s(vec![p(0, &[0, 1]), b(1), p(2, &[0, 1, 2])]),
        ] {
            assert!(next.after.facets().contains(&piece));
        }
        assert!(!next.after.contains(&s(vec![b(0), b(1)])));
    }

    #[test]
    fn step_with_nothing_to_subdivide_is_identity() {
        let c = Complex::standard(1);
        let st = schlegel_step(&c, &c, 1, 1).unwrap();
        // a 0-simplex stage on a complex that still has 1-simplexes of C
        let bad = schlegel_step(&c, &c, 0, 1);
        assert!(matches!(bad, Err(ComplexError::PreconditionViolated(_))));
        // no 1-simplexes of C survive in st.after, so a second 1-step fails
        assert!(schlegel_step(&c, &st.after, 1, 1).is_err());
        // a complex with no facets of the step dimension inside C ∩ D
        let lone = Complex::cls(0, Simplex::from_colors([0]).unwrap()).unwrap();
        let sub = schlegel_step(&lone, &lone, 0, 1).unwrap();
        let again = schlegel_step(&sub.after, &sub.after, 1, 1).unwrap();
        assert_eq!(again.after, sub.after);
    }

    #[test]
    fn chromatic_subdivision_sizes() {
        for (n, facets) in [(0, 1), (1, 3), (2, 13)] {
            let ch = chromatic_subdivision(&Complex::standard(n)).unwrap();
            assert_eq!(ch.facets().len(), facets);
            assert!(ch.is_pure());
        }
        let point = chromatic_subdivision(&Complex::standard(0)).unwrap();
        assert_eq!(point.facets(), &[s(vec![p(0, &[0])])]);
        let ragged = Complex::new(
            2,
            [
                Simplex::from_colors([0, 1]).unwrap(),
                Simplex::from_colors([2]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(chromatic_subdivision(&ragged), Err(ComplexError::NotPure));
    }

    #[test]
    fn tower_shape() {
        let t = Tower::build(&Complex::standard(2), 2).unwrap();
        assert_eq!(t.stages().len(), 6);
        assert_eq!(t.final_complex().facets().len(), 169);
        let t1 = Tower::build(&Complex::standard(1), 1).unwrap();
        assert_eq!(t1.stages().len(), 2);
        assert_eq!(t1.final_complex().facets().len(), 3);
        for w in t.stages().windows(2) {
            assert_eq!(w[0].after, w[1].before);
        }
        assert_eq!(&t.stages()[0].before, t.input());
    }

    #[test]
    fn composite_parents_and_carriers() {
        let t = Tower::build(&Complex::standard(2), 2).unwrap();
        let ch1 = t.iteration_start(2).unwrap();
        let w = Label::pair(2, [p(0, &[0, 1, 2]), p(2, &[1, 2])]).unwrap();
        assert_eq!(t.composite_parent(t.final_position(), ch1, &w).unwrap(), p(2, &[1, 2]));
        assert_eq!(t.composite_parent(ch1, ch1, &p(2, &[1, 2])).unwrap(), p(2, &[1, 2]));
        let corner = Label::pair(0, [p(0, &[0])]).unwrap();
        assert_eq!(
            t.composite_parent(t.final_position(), Position::Input, &corner)
                .unwrap(),
            b(0)
        );
        assert!(t.composite_parent(Position::Input, ch1, &b(0)).is_err());
        assert!(matches!(
            t.composite_parent(ch1, Position::Input, &b(0)),
            Err(ComplexError::VertexNotFound(_))
        ));

        assert_eq!(t.carrier_at(ch1, &p(2, &[1, 2])).unwrap(), s(vec![p(2, &[1, 2])]));
        assert_eq!(
            t.carrier_at(Position::Input, &p(2, &[1, 2])).unwrap(),
            Simplex::from_colors([1, 2]).unwrap()
        );
        let wide = Label::pair(1, [p(1, &[0, 1, 2]), p(2, &[0, 1, 2])]).unwrap();
        let carr = t.carrier_at(ch1, &wide).unwrap();
        assert!(s(vec![p(1, &[0, 1, 2]), p(2, &[0, 1, 2])]).is_face_of(&carr));
    }

    #[test]
    fn hash_is_stable_and_distinguishes_towers() {
        let a = Tower::build(&Complex::standard(1), 1).unwrap();
        let b = Tower::build(&Complex::standard(1), 1).unwrap();
        let c = Tower::build(&Complex::standard(1), 2).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
