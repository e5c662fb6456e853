//! Direct characterizations of the standard chromatic subdivision.
//!
//! Nothing here goes through Schlegel diagrams: facets are read off ordered
//! set partitions, and simplex membership is decided by the containment and
//! immediacy conditions on views. These are the cross-checks for the
//! `subdivision` module.

use crate::complex::{Complex, Simplex};
use crate::error::ComplexError;
use crate::label::Label;

/// All ordered set partitions of `items` (Fubini-many of them).
pub fn ordered_partitions<T: Clone>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let n = items.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let (block, rest): (Vec<_>, Vec<_>) = (0..n).partition(|i| mask & (1 << i) != 0);
        let block: Vec<T> = block.into_iter().map(|i| items[i].clone()).collect();
        let rest: Vec<T> = rest.into_iter().map(|i| items[i].clone()).collect();
        for mut tail in ordered_partitions(&rest) {
            tail.insert(0, block.clone());
            out.push(tail);
        }
    }
    out
}

/// The facet of `Ch σ` indexed by an ordered partition of `σ`'s vertices:
/// each vertex in block `j` gets the view made of blocks `0..=j`.
pub fn facet_of_partition(blocks: &[Vec<Label>]) -> Result<Simplex, ComplexError> {
    let mut seen: Vec<Label> = Vec::new();
    let mut out = Vec::new();
    for block in blocks {
        seen.extend(block.iter().cloned());
        for v in block {
            out.push(Label::pair(v.color(), seen.iter().cloned())?);
        }
    }
    Simplex::new(out)
}

/// `Ch C` built facet by facet from ordered partitions.
pub fn chromatic_by_partitions(c: &Complex) -> Result<Complex, ComplexError> {
    let mut facets = Vec::new();
    for f in c.facets() {
        for p in ordered_partitions(f.vertices()) {
            facets.push(facet_of_partition(&p)?);
        }
    }
    Complex::new(c.n(), facets)
}

/// Decides whether `s` is a simplex of `Ch σ` without building `Ch σ`.
///
/// Members `(i_j, τ_j)` must have views that are faces of `σ`, pairwise
/// distinct colors, views linearly ordered by inclusion, and satisfy
/// immediacy: `i_j ∈ color(τ_k)` implies `τ_j ⊆ τ_k`.
pub fn ch_oracle_is_simplex(sigma: &Simplex, s: &[Label]) -> Result<bool, ComplexError> {
    let mut members = Vec::with_capacity(s.len());
    for l in s {
        let view = l
            .view()
            .ok_or_else(|| ComplexError::MalformedLabel(format!("{l} is not a pair over a face of {sigma}")))?;
        let view = Simplex::new(view.iter().cloned())?;
        if !view.is_face_of(sigma) {
            return Err(ComplexError::MalformedLabel(format!(
                "view of {l} is not a face of {sigma}"
            )));
        }
        members.push((l.color(), view));
    }
    for (a, (ci, ti)) in members.iter().enumerate() {
        for (cj, tj) in &members[a + 1..] {
            if ci == cj {
                return Ok(false);
            }
            if !(ti.is_face_of(tj) || tj.is_face_of(ti)) {
                return Ok(false);
            }
        }
    }
    for (ci, ti) in &members {
        for (_, tk) in &members {
            if tk.vertex_of_color(*ci).is_some() && !ti.is_face_of(tk) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Fubini numbers `a(m)`, the count of ordered partitions of an `m`-set.
pub fn fubini(m: usize) -> u64 {
    // a(m) = sum_{k=1..m} C(m,k) a(m-k)
    let mut a = vec![1u64; m + 1];
    for i in 1..=m {
        let mut binom = 1u64;
        let mut acc = 0u64;
        for k in 1..=i {
            binom = binom * (i - k + 1) as u64 / k as u64;
            acc += binom * a[i - k];
        }
        a[i] = acc;
    }
    a[m]
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

    #[test]
    fn fubini_numbers() {
        assert_eq!((0..6).map(fubini).collect::<Vec<_>>(), vec![1, 1, 3, 13, 75, 541]);
        for m in 0..5 {
            let items: Vec<usize> = (0..m).collect();
            assert_eq!(ordered_partitions(&items).len() as u64, fubini(m));
        }
    }

    #[test]
    fn partition_facet() {
        let f = facet_of_partition(&[vec![b(1), b(2)], vec![b(0)]]).unwrap();
        assert_eq!(f.vertices(), &[p(0, &[0, 1, 2]), p(1, &[1, 2]), p(2, &[1, 2])]);
    }

    #[test]
    fn oracle_examples() {
        let sigma = Simplex::from_colors(0..=2).unwrap();
        let facet = [p(1, &[1, 2]), p(2, &[1, 2]), p(0, &[0, 1, 2])];
        assert!(ch_oracle_is_simplex(&sigma, &facet).unwrap());
        assert!(ch_oracle_is_simplex(&sigma, &[p(1, &[1])]).unwrap());
        // linearly ordered but not immediate
        assert!(!ch_oracle_is_simplex(&sigma, &[p(2, &[1, 2]), p(1, &[0, 1, 2])]).unwrap());
        // incomparable views
        assert!(!ch_oracle_is_simplex(&sigma, &[p(0, &[0, 1]), p(2, &[1, 2])]).unwrap());
        assert!(matches!(
            ch_oracle_is_simplex(&sigma, &[b(0)]),
            Err(ComplexError::MalformedLabel(_))
        ));
        let outside = Simplex::from_colors(0..=1).unwrap();
        assert!(ch_oracle_is_simplex(&outside, &[p(2, &[1, 2])]).is_err());
    }

    #[test]
    fn partition_complex_counts() {
        for (n, expect) in [(0, 1), (1, 3), (2, 13)] {
            let ch = chromatic_by_partitions(&Complex::standard(n)).unwrap();
            assert_eq!(ch.facets().len(), expect);
        }
    }
}
