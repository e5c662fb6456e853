//! Tasks `(I, O, Φ)` with a decision map `δ: V(Ch^K I) → V(O)`.
//!
//! Output vertices carry the color of the process deciding them. Three
//! instances are provided: 3-process renaming with names `0..=4` over
//! `Ch² I`, the parent-map task (`O = I`, `δ` = composite parent), and
//! chromatic agreement (`O = Ch^K I`, `δ` = identity).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Simplex};
use crate::error::{SimError, TaskError};
use crate::label::{Color, Label};
use crate::subdivision::{Position, Tower};

/// A value decided by a process: a name, or a vertex label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutputValue {
    Name(u32),
    Vertex(Label),
}

impl fmt::Display for OutputValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputValue::Name(m) => write!(f, "{m}"),
            OutputValue::Vertex(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutputVertex {
    pub color: Color,
    pub value: OutputValue,
}

/// A set of output vertices, sorted by color.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutputSimplex(Vec<OutputVertex>);

impl OutputSimplex {
    pub fn new<I: IntoIterator<Item = OutputVertex>>(vertices: I) -> OutputSimplex {
        let mut v: Vec<OutputVertex> = vertices.into_iter().collect();
        v.sort();
        v.dedup();
        OutputSimplex(v)
    }

    pub fn vertices(&self) -> &[OutputVertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_chromatic(&self) -> bool {
        self.0.windows(2).all(|w| w[0].color != w[1].color)
    }

    pub fn is_face_of(&self, other: &OutputSimplex) -> bool {
        self.0.iter().all(|v| other.0.binary_search(v).is_ok())
    }

    /// Reads a simplex of vertex-valued outputs back as a simplex of labels.
    pub fn as_label_simplex(&self) -> Option<Simplex> {
        let labels = self
            .0
            .iter()
            .map(|v| match &v.value {
                OutputValue::Vertex(l) => Some(l.clone()),
                OutputValue::Name(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Simplex::new(labels).ok()
    }

    pub fn from_label_simplex(s: &Simplex) -> OutputSimplex {
        OutputSimplex::new(s.vertices().iter().map(|l| OutputVertex {
            color: l.color(),
            value: OutputValue::Vertex(l.clone()),
        }))
    }

    fn faces(&self) -> impl Iterator<Item = OutputSimplex> + '_ {
        let n = self.0.len();
        (0u32..(1 << n)).map(move |mask| {
            OutputSimplex(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.0[i].clone())
                    .collect(),
            )
        })
    }
}

impl fmt::Display for OutputSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", v.color, v.value)?;
        }
        f.write_str("}")
    }
}

/// The output complex, stored by facets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputComplex {
    facets: Vec<OutputSimplex>,
    #[serde(skip)]
    index: HashMap<OutputVertex, Vec<usize>>,
}

impl OutputComplex {
    pub fn new<I: IntoIterator<Item = OutputSimplex>>(simplices: I) -> OutputComplex {
        let mut all: Vec<OutputSimplex> = simplices.into_iter().collect();
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        all.dedup();
        let mut cx = OutputComplex {
            facets: Vec::new(),
            index: HashMap::new(),
        };
        for s in all {
            if !cx.contains(&s) {
                cx.facets.push(s);
                cx.reindex();
            }
        }
        cx.facets.sort();
        cx.reindex();
        cx
    }

    fn reindex(&mut self) {
        self.index.clear();
        for (i, f) in self.facets.iter().enumerate() {
            for v in f.vertices() {
                self.index.entry(v.clone()).or_default().push(i);
            }
        }
    }

    pub fn facets(&self) -> &[OutputSimplex] {
        &self.facets
    }

    pub fn contains(&self, s: &OutputSimplex) -> bool {
        match s.vertices().first() {
            None => !self.facets.is_empty(),
            Some(v) => self
                .index
                .get(v)
                .into_iter()
                .flatten()
                .any(|&i| s.is_face_of(&self.facets[i])),
        }
    }

    pub fn simplices(&self) -> BTreeSet<OutputSimplex> {
        self.facets.iter().flat_map(|f| f.faces()).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.index.len()
    }

    fn with_index(mut self) -> OutputComplex {
        self.reindex();
        self
    }
}

/// An explicit vertex → output table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecisionMap(BTreeMap<Label, OutputValue>);

impl DecisionMap {
    pub fn new(entries: BTreeMap<Label, OutputValue>) -> DecisionMap {
        DecisionMap(entries)
    }

    pub fn get(&self, w: &Label) -> Result<&OutputValue, SimError> {
        self.0.get(w).ok_or_else(|| SimError::DecisionMapUndefined(w.clone()))
    }

    pub fn entries(&self) -> &BTreeMap<Label, OutputValue> {
        &self.0
    }

    pub fn insert(&mut self, w: Label, value: OutputValue) -> Option<OutputValue> {
        self.0.insert(w, value)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for DecisionMap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for DecisionMap {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = Vec::<(Label, OutputValue)>::deserialize(deserializer)?;
        Ok(DecisionMap(pairs.into_iter().collect()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Renaming,
    ParentMap,
    ChromaticAgreement,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Renaming => "renaming",
            TaskKind::ParentMap => "parent-map",
            TaskKind::ChromaticAgreement => "chromatic-agreement",
        }
    }

    /// `Φ(σ)` as a predicate on output simplexes, `σ` a simplex of `I`.
    pub fn allows(self, sigma: &Simplex, out: &OutputSimplex) -> bool {
        let colors = sigma.colors();
        if !out.vertices().iter().all(|v| colors.contains(&v.color)) {
            return false;
        }
        match self {
            TaskKind::Renaming => {
                let mut names = BTreeSet::new();
                for v in out.vertices() {
                    match v.value {
                        OutputValue::Name(m) if m < RENAMING_NAMES && names.insert(m) => {}
                        _ => return false,
                    }
                }
                sigma.len() > 1 || names.iter().all(|&m| m == 0)
            }
            TaskKind::ParentMap => out.vertices().iter().all(
                |v| matches!(&v.value, OutputValue::Vertex(l) if sigma.contains_vertex(l) && l.color() == v.color),
            ),
            TaskKind::ChromaticAgreement => out.vertices().iter().all(|v| match &v.value {
                OutputValue::Vertex(l) => l.color() == v.color && crate::complex::carrier_in_base(l).is_face_of(sigma),
                OutputValue::Name(_) => false,
            }),
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TaskKind {
    type Err = TaskError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "renaming" => Ok(TaskKind::Renaming),
            "parent-map" | "parent" => Ok(TaskKind::ParentMap),
            "chromatic-agreement" | "agreement" => Ok(TaskKind::ChromaticAgreement),
            other => Err(TaskError::Invalid(format!("unknown task {other:?}"))),
        }
    }
}

const RENAMING_NAMES: u32 = 5;

/// A task triple together with the protocol's decision map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub task: TaskKind,
    pub n: usize,
    pub iterations: usize,
    pub tower_hash: String,
    pub input: Complex,
    pub output: OutputComplex,
    pub delta: DecisionMap,
}

impl Task {
    /// Three processes renaming into `{0,…,4}` over `Ch² I`, `I = cls{0,1,2}`.
    pub fn renaming(tower: &Tower) -> Result<Task, TaskError> {
        if tower.input() != &Complex::standard(2) || tower.iterations() != 2 {
            return Err(TaskError::Invalid(
                "the renaming instance is defined on Ch² of cls{0,1,2}".into(),
            ));
        }
        let mut delta = DecisionMap::default();
        for w in tower.final_complex().vertices() {
            let name = renaming_delta(tower, &w)?;
            delta.insert(w, OutputValue::Name(name));
        }
        let colors: Vec<Color> = (0..=2).map(Color).collect();
        let mut facets = Vec::new();
        for a in 0..RENAMING_NAMES {
            for b in 0..RENAMING_NAMES {
                for c in 0..RENAMING_NAMES {
                    if a != b && b != c && a != c {
                        facets.push(OutputSimplex::new(colors.iter().zip([a, b, c]).map(|(&color, m)| {
                            OutputVertex {
                                color,
                                value: OutputValue::Name(m),
                            }
                        })));
                    }
                }
            }
        }
        Ok(Task {
            task: TaskKind::Renaming,
            n: 2,
            iterations: 2,
            tower_hash: tower.hash(),
            input: tower.input().clone(),
            output: OutputComplex::new(facets),
            delta,
        })
    }

    /// `O = I`, `δ` = composite parent map down to the input.
    pub fn parent_map(tower: &Tower) -> Result<Task, TaskError> {
        let mut delta = DecisionMap::default();
        for w in tower.final_complex().vertices() {
            let p = tower.composite_parent(tower.final_position(), Position::Input, &w)?;
            delta.insert(w, OutputValue::Vertex(p));
        }
        Ok(Task {
            task: TaskKind::ParentMap,
            n: tower.dim(),
            iterations: tower.iterations(),
            tower_hash: tower.hash(),
            input: tower.input().clone(),
            output: OutputComplex::new(tower.input().facets().iter().map(OutputSimplex::from_label_simplex)),
            delta,
        })
    }

    /// `O = Ch^K I`, `δ` = identity.
    pub fn chromatic_agreement(tower: &Tower) -> Result<Task, TaskError> {
        let fin = tower.final_complex();
        let delta = DecisionMap(
            fin.vertices()
                .into_iter()
                .map(|w| (w.clone(), OutputValue::Vertex(w)))
                .collect(),
        );
        Ok(Task {
            task: TaskKind::ChromaticAgreement,
            n: tower.dim(),
            iterations: tower.iterations(),
            tower_hash: tower.hash(),
            input: tower.input().clone(),
            output: OutputComplex::new(fin.facets().iter().map(OutputSimplex::from_label_simplex)),
            delta,
        })
    }

    pub fn build(kind: TaskKind, tower: &Tower) -> Result<Task, TaskError> {
        match kind {
            TaskKind::Renaming => Task::renaming(tower),
            TaskKind::ParentMap => Task::parent_map(tower),
            TaskKind::ChromaticAgreement => Task::chromatic_agreement(tower),
        }
    }

    /// `Φ(σ)` as an explicit subcomplex of `O`.
    pub fn carrier_image(&self, sigma: &Simplex) -> OutputComplex {
        OutputComplex::new(
            self.output
                .simplices()
                .into_iter()
                .filter(|s| self.task.allows(sigma, s)),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tasks serialize")
    }

    pub fn from_json(s: &str) -> Result<Task, serde_json::Error> {
        let mut t: Task = serde_json::from_str(s)?;
        t.output = t.output.with_index();
        Ok(t)
    }
}

/// `Φ` of the renaming task, as an explicit subcomplex of the 60-facet
/// output complex.
pub fn renaming_carrier_map(task: &Task, sigma: &Simplex) -> OutputComplex {
    task.carrier_image(sigma)
}

fn full_view_vertex(i: usize) -> Label {
    Label::pair(i, (0..=2).map(Label::base)).expect("valid")
}

/// Case analysis for one vertex, given its parent in `Ch I` and its carrier there.
fn renaming_case(color: Color, parent: &Label, carrier: &Simplex) -> Option<u32> {
    let both = carrier.contains_vertex(&full_view_vertex(1)) && carrier.contains_vertex(&full_view_vertex(2));
    let parent_view: Vec<usize> = parent
        .view()?
        .iter()
        .map(|m| if m.is_base() { Some(m.color().0) } else { None })
        .collect::<Option<Vec<_>>>()?;
    let i = parent.color().0;
    if parent == &full_view_vertex(0) {
        return Some(4);
    }
    if !both && (parent == &full_view_vertex(1) || parent == &full_view_vertex(2)) {
        return Some(3);
    }
    let edge_with =
        |pred: fn(usize, usize) -> bool| parent_view.len() == 2 && parent_view.iter().any(|&j| j != i && pred(i, j));
    if (color.0 == 1 && both) || edge_with(|i, j| i < j) {
        return Some(2);
    }
    if (color.0 == 2 && both) || edge_with(|i, j| i > j) {
        return Some(1);
    }
    if parent_view == [i] {
        return Some(0);
    }
    None
}

/// `δ(w)` of the renaming instance for `w ∈ V(Ch² I)`.
///
/// Cases are tried in the order 4, 3, 2, 1, 0. A vertex matching none takes
/// the value the cases give its parent in `Ch I`.
pub fn renaming_delta(tower: &Tower, w: &Label) -> Result<u32, TaskError> {
    let ch1 = tower.iteration_start(2)?;
    let parent = tower.composite_parent(tower.final_position(), ch1, w)?;
    let carrier = tower.carrier_at(ch1, w)?;
    if let Some(name) = renaming_case(w.color(), &parent, &carrier) {
        return Ok(name);
    }
    let own = Simplex::new([parent.clone()])?;
    renaming_case(parent.color(), &parent, &own).ok_or_else(|| TaskError::Undefined(w.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionViolation {
    pub simplex: Simplex,
    pub image: Option<OutputSimplex>,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub simplices_checked: usize,
    pub violations: Vec<DecisionViolation>,
}

impl DecisionReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `δ(σ) ∈ Φ(Carr(σ, I))` and `δ(σ) ∈ O` for every nonempty simplex
/// `σ` of `Ch^K I`.
pub fn verify_decision_map(task: &Task, tower: &Tower) -> Result<DecisionReport, TaskError> {
    let mut report = DecisionReport::default();
    for sigma in tower.final_complex().simplices() {
        if sigma.is_empty() {
            continue;
        }
        report.simplices_checked += 1;
        let mut image = Vec::with_capacity(sigma.len());
        let mut missing = None;
        for w in sigma.vertices() {
            match task.delta.get(w) {
                Ok(v) => image.push(OutputVertex {
                    color: w.color(),
                    value: v.clone(),
                }),
                Err(_) => missing = Some(w.clone()),
            }
        }
        if let Some(w) = missing {
            report.violations.push(DecisionViolation {
                simplex: sigma.clone(),
                image: None,
                reason: format!("δ undefined at {w}"),
            });
            continue;
        }
        let image = OutputSimplex::new(image);
        let reason = if image.len() != sigma.len() || !image.is_chromatic() {
            Some("image is not a chromatic simplex of the same dimension".to_string())
        } else if !task.output.contains(&image) {
            Some("image is not a simplex of O".to_string())
        } else {
            let mut carrier = Simplex::empty();
            for w in sigma.vertices() {
                carrier = carrier.union(&tower.carrier_at(Position::Input, w)?)?;
            }
            (!task.task.allows(&carrier, &image)).then(|| format!("image not in Φ({carrier})"))
        };
        if let Some(reason) = reason {
            report.violations.push(DecisionViolation {
                simplex: sigma,
                image: Some(image),
                reason,
            });
        }
    }
    Ok(report)
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

    fn tower() -> Tower {
        Tower::build(&Complex::standard(2), 2).unwrap()
    }

    #[test]
    fn renaming_delta_examples() {
        let t = tower();
        let chain_end = Label::pair(2, [p(0, &[0, 1, 2]), p(2, &[1, 2])]).unwrap();
        assert_eq!(renaming_delta(&t, &chain_end).unwrap(), 1);
        let under_white = Label::pair(0, [p(0, &[0, 1, 2])]).unwrap();
        assert_eq!(renaming_delta(&t, &under_white).unwrap(), 4);
        let solo = Label::pair(1, [p(1, &[1])]).unwrap();
        assert_eq!(renaming_delta(&t, &solo).unwrap(), 0);
        let wide1 = Label::pair(1, [p(1, &[0, 1, 2]), p(2, &[0, 1, 2])]).unwrap();
        assert_eq!(renaming_delta(&t, &wide1).unwrap(), 2);
        let wide2 = Label::pair(2, [p(1, &[0, 1, 2]), p(2, &[0, 1, 2])]).unwrap();
        assert_eq!(renaming_delta(&t, &wide2).unwrap(), 1);
        let lone1 = Label::pair(1, [p(1, &[0, 1, 2])]).unwrap();
        assert_eq!(renaming_delta(&t, &lone1).unwrap(), 3);
        let low_edge = Label::pair(0, [p(0, &[0, 2])]).unwrap();
        assert_eq!(renaming_delta(&t, &low_edge).unwrap(), 2);
        assert!(renaming_delta(&t, &b(0)).is_err());
    }

    #[test]
    fn renaming_delta_is_total_and_task_is_well_formed() {
        let t = tower();
        let task = Task::renaming(&t).unwrap();
        assert_eq!(task.delta.len(), t.final_complex().vertices().len());
        assert_eq!(task.output.facets().len(), 60);
        assert_eq!(task.output.vertex_count(), 15);
        let report = verify_decision_map(&task, &t).unwrap();
        assert!(report.is_ok(), "{:?}", report.violations.first());
        assert!(report.simplices_checked > 169);
    }

    #[test]
    fn corrupted_delta_is_caught() {
        let t = tower();
        let mut task = Task::renaming(&t).unwrap();
        let central = t
            .final_complex()
            .facets()
            .iter()
            .find(|f| {
                f.vertices().iter().all(|w| {
                    w.view().unwrap().len() == 3 && w.view().unwrap().iter().all(|m| m.view().unwrap().len() == 3)
                })
            })
            .unwrap()
            .clone();
        let (a, c) = (&central.vertices()[0], &central.vertices()[1]);
        let va = task.delta.get(a).unwrap().clone();
        let vc = task.delta.get(c).unwrap().clone();
        task.delta.insert(a.clone(), vc);
        task.delta.insert(c.clone(), va);
        let report = verify_decision_map(&task, &t).unwrap();
        assert!(!report.is_ok());
    }

    #[test]
    fn carrier_map_of_renaming() {
        let t = tower();
        let task = Task::renaming(&t).unwrap();
        let solo = task.carrier_image(&Simplex::from_colors([0]).unwrap());
        let zero = OutputSimplex::new([OutputVertex {
            color: Color(0),
            value: OutputValue::Name(0),
        }]);
        assert_eq!(solo.facets(), &[zero]);
        assert!(solo.contains(&OutputSimplex::default()));
        let full = renaming_carrier_map(&task, &Simplex::from_colors(0..=2).unwrap());
        assert_eq!(full.facets().len(), 60);
        let pair = task.carrier_image(&Simplex::from_colors([0, 1]).unwrap());
        for s in solo.simplices() {
            assert!(pair.contains(&s));
        }
    }

    #[test]
    fn trivial_tasks_verify() {
        for n in 0..=2 {
            let t = Tower::build(&Complex::standard(n), 1).unwrap();
            for kind in [TaskKind::ParentMap, TaskKind::ChromaticAgreement] {
                let task = Task::build(kind, &t).unwrap();
                let r = verify_decision_map(&task, &t).unwrap();
                assert!(r.is_ok(), "{kind} n={n}: {:?}", r.violations.first());
            }
        }
    }

    #[test]
    fn task_json_round_trip() {
        let t = tower();
        let task = Task::renaming(&t).unwrap();
        let text = task.to_json();
        let back = Task::from_json(&text).unwrap();
        assert_eq!(back, task);
        assert_eq!(back.to_json(), text);
        assert!(back.output.contains(&back.output.facets()[3]));
    }
}
