//! Chromatic simplicial complexes stored by their facets.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ComplexError;
use crate::label::{check_distinct_colors, Color, Label};

/// A finite chromatic set of vertices, kept sorted in canonical label order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Simplex(Vec<Label>);

impl Simplex {
    pub fn empty() -> Simplex {
        Simplex(Vec::new())
    }

    pub fn new<I: IntoIterator<Item = Label>>(vertices: I) -> Result<Simplex, ComplexError> {
        let mut v: Vec<Label> = vertices.into_iter().collect();
        v.sort();
        v.dedup();
        check_distinct_colors(&v)?;
        Ok(Simplex(v))
    }

    /// `{Base(c) | c in colors}`.
    pub fn from_colors<I: IntoIterator<Item = usize>>(colors: I) -> Result<Simplex, ComplexError> {
        Simplex::new(colors.into_iter().map(Label::base))
    }

    pub(crate) fn from_sorted_unchecked(v: Vec<Label>) -> Simplex {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Simplex(v)
    }

    pub fn vertices(&self) -> &[Label] {
        &self.0
    }

    pub fn into_vertices(self) -> Vec<Label> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|σ| - 1`; the empty simplex has dimension -1.
    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn colors(&self) -> BTreeSet<Color> {
        self.0.iter().map(Label::color).collect()
    }

    pub fn contains_vertex(&self, v: &Label) -> bool {
        self.0.binary_search(v).is_ok()
    }

    pub fn vertex_of_color(&self, c: Color) -> Option<&Label> {
        self.0.iter().find(|l| l.color() == c)
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// The join `σ ∗ τ`; the two simplexes must be color-disjoint.
    pub fn join(&self, other: &Simplex) -> Result<Simplex, ComplexError> {
        let mine = self.colors();
        if let Some(clash) = other.0.iter().find(|l| mine.contains(&l.color())) {
            let first = self.vertex_of_color(clash.color()).expect("color present");
            return Err(ComplexError::ColorClash {
                color: clash.color(),
                first: first.to_string(),
                second: clash.to_string(),
            });
        }
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        Ok(Simplex(v))
    }

    /// Set union, which must stay chromatic.
    pub fn union(&self, other: &Simplex) -> Result<Simplex, ComplexError> {
        Simplex::new(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn intersection(&self, other: &Simplex) -> Simplex {
        Simplex(self.0.iter().filter(|v| other.contains_vertex(v)).cloned().collect())
    }

    pub fn difference(&self, other: &Simplex) -> Simplex {
        Simplex(self.0.iter().filter(|v| !other.contains_vertex(v)).cloned().collect())
    }

    /// All faces, including the empty simplex and the simplex itself.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.0.len();
        assert!(n < 32, "simplex too large to enumerate faces");
        (0u32..(1 << n)).map(move |mask| {
            Simplex(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.0[i].clone())
                    .collect(),
            )
        })
    }

    /// Faces with exactly `size` vertices.
    pub fn faces_of_size(&self, size: usize) -> impl Iterator<Item = Simplex> + '_ {
        self.faces().filter(move |f| f.len() == size)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Simplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Simplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vec::<Label>::deserialize(deserializer)?;
        Simplex::new(v).map_err(D::Error::custom)
    }
}

/// Carrier of a vertex in the base complex its label was built over.
pub fn carrier_in_base(v: &Label) -> Simplex {
    let mut acc = BTreeSet::new();
    collect_base(v, &mut acc);
    Simplex(acc.into_iter().collect())
}

fn collect_base(v: &Label, acc: &mut BTreeSet<Label>) {
    match v {
        Label::Base(_) => {
            acc.insert(v.clone());
        }
        Label::Pair(_, view) => view.iter().for_each(|m| collect_base(m, acc)),
    }
}

/// A chromatic simplicial complex over colors `0..=n`, stored as its facets.
///
/// Membership is by subset-of-facet; a per-vertex facet index keeps the scan
/// short.
#[derive(Clone)]
pub struct Complex {
    n: usize,
    facets: Vec<Simplex>,
    index: HashMap<Label, Vec<usize>>,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.facets == other.facets
    }
}

impl Eq for Complex {}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Complex")
            .field("n", &self.n)
            .field("facets", &self.facets)
            .finish()
    }
}

impl Complex {
    /// Builds the complex generated by `simplices`, keeping only the maximal ones.
    pub fn new<I>(n: usize, simplices: I) -> Result<Complex, ComplexError>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut all: Vec<Simplex> = simplices.into_iter().collect();
        for s in &all {
            if let Some(v) = s.vertices().iter().find(|v| v.color().0 > n) {
                return Err(ComplexError::ColorOutOfRange { color: v.color(), n });
            }
        }
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        all.dedup();
        let mut cx = Complex {
            n,
            facets: Vec::new(),
            index: HashMap::new(),
        };
        let mut kept = Vec::new();
        for s in all {
            if !cx.contains(&s) {
                cx.push_facet(s.clone());
                kept.push(s);
            }
        }
        kept.sort();
        Ok(Complex::from_facets_unchecked(n, kept))
    }

    fn push_facet(&mut self, s: Simplex) {
        let id = self.facets.len();
        for v in s.vertices() {
            self.index.entry(v.clone()).or_default().push(id);
        }
        self.facets.push(s);
    }

    /// `facets` must be sorted, distinct and pairwise non-nested.
    pub(crate) fn from_facets_unchecked(n: usize, facets: Vec<Simplex>) -> Complex {
        let mut cx = Complex {
            n,
            facets: Vec::with_capacity(facets.len()),
            index: HashMap::new(),
        };
        for f in facets {
            cx.push_facet(f);
        }
        cx
    }

    /// The closure `cls σ`.
    pub fn cls(n: usize, sigma: Simplex) -> Result<Complex, ComplexError> {
        Complex::new(n, [sigma])
    }

    /// The standard input simplex `{0, …, n}` with base labels.
    pub fn standard(n: usize) -> Complex {
        let sigma = Simplex::from_colors(0..=n).expect("distinct colors");
        Complex::from_facets_unchecked(n, vec![sigma])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// Facets containing `v`.
    pub fn facets_with(&self, v: &Label) -> impl Iterator<Item = &Simplex> + '_ {
        self.index.get(v).into_iter().flatten().map(move |&i| &self.facets[i])
    }

    pub fn has_vertex(&self, v: &Label) -> bool {
        self.index.contains_key(v)
    }

    pub fn vertices(&self) -> BTreeSet<Label> {
        self.index.keys().cloned().collect()
    }

    pub fn dim(&self) -> isize {
        self.facets.iter().map(Simplex::dim).max().unwrap_or(-1)
    }

    pub fn is_pure(&self) -> bool {
        self.facets.windows(2).all(|w| w[0].len() == w[1].len())
    }

    pub fn contains(&self, sigma: &Simplex) -> bool {
        match sigma.vertices().first() {
            None => !self.facets.is_empty(),
            Some(v) => self.facets_with(v).any(|f| sigma.is_face_of(f)),
        }
    }

    /// Every simplex of the complex, the empty one included.
    pub fn simplices(&self) -> BTreeSet<Simplex> {
        self.facets.iter().flat_map(|f| f.faces()).collect()
    }

    /// `St(v, C)`: the subcomplex generated by the facets containing `v`.
    pub fn star(&self, v: &Label) -> Result<Complex, ComplexError> {
        let ids = self
            .index
            .get(v)
            .ok_or_else(|| ComplexError::VertexNotFound(v.clone()))?;
        let mut facets: Vec<Simplex> = ids.iter().map(|&i| self.facets[i].clone()).collect();
        facets.sort();
        Ok(Complex::from_facets_unchecked(self.n, facets))
    }

    /// `skel^k C`, for `k >= -1`.
    pub fn skeleton(&self, k: isize) -> Complex {
        assert!(k >= -1, "skeleton dimension must be at least -1");
        let size = (k + 1) as usize;
        let mut out = Vec::new();
        for f in &self.facets {
            if f.len() <= size {
                out.push(f.clone());
            } else {
                out.extend(f.faces_of_size(size));
            }
        }
        Complex::new(self.n, out).expect("faces of chromatic facets are chromatic")
    }

    /// `C ∗ D` for complexes on disjoint color sets.
    pub fn join(&self, other: &Complex) -> Result<Complex, ComplexError> {
        let mine: BTreeSet<Color> = self.index.keys().map(Label::color).collect();
        if let Some(v) = other.index.keys().find(|v| mine.contains(&v.color())) {
            let first = self
                .index
                .keys()
                .find(|w| w.color() == v.color())
                .expect("color present");
            return Err(ComplexError::ColorClash {
                color: v.color(),
                first: first.to_string(),
                second: v.to_string(),
            });
        }
        let mut facets = Vec::with_capacity(self.facets.len() * other.facets.len());
        for a in &self.facets {
            for b in &other.facets {
                facets.push(a.join(b)?);
            }
        }
        Complex::new(self.n.max(other.n), facets)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("complexes always serialize")
    }

    pub fn from_json(s: &str) -> Result<Complex, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    n: usize,
    facets: Vec<Simplex>,
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ComplexJson {
            n: self.n,
            facets: self.facets.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ComplexJson::deserialize(deserializer)?;
        Complex::new(raw.n, raw.facets).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(i: usize) -> Label {
        Label::base(i)
    }

    fn s(colors: &[usize]) -> Simplex {
        Simplex::from_colors(colors.iter().copied()).unwrap()
    }

    #[test]
    fn closure_membership() {
        let c = Complex::standard(2);
        assert!(c.contains(&s(&[0, 2])));
        assert!(c.contains(&Simplex::empty()));
        assert!(c.contains(&s(&[0, 1, 2])));
        let foreign = Simplex::new([Label::pair(0, [b(0)]).unwrap()]).unwrap();
        assert!(!c.contains(&foreign));
    }

    #[test]
    fn empty_simplex_is_not_in_the_void_complex() {
        let void = Complex::new(1, Vec::<Simplex>::new()).unwrap();
        assert!(!void.contains(&Simplex::empty()));
        let minus_one = Complex::standard(1).skeleton(-1);
        assert!(minus_one.contains(&Simplex::empty()));
        assert_eq!(minus_one.dim(), -1);
    }

    #[test]
    fn simplex_join() {
        let center = Label::pair(2, [b(0), b(1), b(2)]).unwrap();
        let joined = s(&[0, 1]).join(&Simplex::new([center.clone()]).unwrap()).unwrap();
        assert_eq!(joined.vertices(), &[b(0), b(1), center]);
        assert_eq!(s(&[0, 1]).join(&Simplex::empty()).unwrap(), s(&[0, 1]));
        assert!(matches!(
            s(&[0, 1]).join(&s(&[1])),
            Err(ComplexError::ColorClash { .. })
        ));
    }

    #[test]
    fn complex_join() {
        let a = Complex::cls(1, s(&[0])).unwrap();
        let c = Complex::cls(1, s(&[1])).unwrap();
        let j = a.join(&c).unwrap();
        assert_eq!(j.facets(), &[s(&[0, 1])]);
        assert!(a.join(&a).is_err());
    }

    #[test]
    fn skeleton_of_triangle() {
        let c = Complex::standard(2);
        let sk = c.skeleton(1);
        assert_eq!(sk.facets(), &[s(&[0, 1]), s(&[0, 2]), s(&[1, 2])]);
        assert_eq!(c.skeleton(2), c);
        assert_eq!(sk.skeleton(0), c.skeleton(0));
        assert_eq!(c.skeleton(0).facets().len(), 3);
    }

    #[test]
    fn star_of_vertex() {
        let c = Complex::standard(2);
        assert_eq!(c.star(&b(2)).unwrap(), c);
        assert!(matches!(
            c.star(&Label::pair(0, [b(0)]).unwrap()),
            Err(ComplexError::VertexNotFound(_))
        ));
    }

    #[test]
    fn carriers_in_base() {
        let v = Label::pair(2, [b(1), b(2)]).unwrap();
        assert_eq!(carrier_in_base(&v), s(&[1, 2]));
        assert_eq!(carrier_in_base(&b(0)), s(&[0]));
        let w = Label::pair(2, [Label::pair(0, [b(0), b(1), b(2)]).unwrap(), v]).unwrap();
        assert_eq!(carrier_in_base(&w), s(&[0, 1, 2]));
    }

    #[test]
    fn new_drops_non_maximal_simplices() {
        let c = Complex::new(2, [s(&[0]), s(&[0, 1]), s(&[1, 2]), s(&[2])]).unwrap();
        assert_eq!(c.facets(), &[s(&[0, 1]), s(&[1, 2])]);
        assert!(!c.is_pure() || c.facets().len() == 2);
        assert!(matches!(
            Complex::new(1, [s(&[0, 2])]),
            Err(ComplexError::ColorOutOfRange { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let c = Complex::standard(2).skeleton(1);
        let text = c.to_json();
        assert_eq!(
            text,
            r#"{"n":2,"facets":[[{"base":0},{"base":1}],[{"base":0},{"base":2}],[{"base":1},{"base":2}]]}"#
        );
        assert_eq!(Complex::from_json(&text).unwrap().to_json(), text);
    }
}
