//! Vertex identities.
//!
//! A vertex of every complex in this crate is named by its history: either a
//! base input vertex of some color, or a pair `(i, view)` created when a
//! simplex `view` is subdivided and process `i` obtains a new vertex inside
//! it. Structural equality of labels is vertex identity.

use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ComplexError;

/// A process id, used as the vertex color.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Color(pub usize);

impl Color {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for Color {
    fn from(c: usize) -> Self {
        Color(c)
    }
}

/// Recursive chromatic vertex label.
///
/// The derived ordering is the canonical one: every `Base` sorts before every
/// `Pair`, then by color, then lexicographically on the (sorted) view.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Base(Color),
    Pair(Color, Arc<[Label]>),
}

impl Label {
    pub fn base(color: impl Into<Color>) -> Label {
        Label::Base(color.into())
    }

    /// Builds `(color, view)`, checking that the view is a nonempty chromatic
    /// set containing a vertex of `color`.
    pub fn pair<I>(color: impl Into<Color>, view: I) -> Result<Label, ComplexError>
    where
        I: IntoIterator<Item = Label>,
    {
        let color = color.into();
        let mut members: Vec<Label> = view.into_iter().collect();
        members.sort();
        members.dedup();
        if members.is_empty() {
            return Err(ComplexError::MalformedLabel(format!(
                "pair for color {color} has an empty view"
            )));
        }
        check_distinct_colors(&members)?;
        if !members.iter().any(|m| m.color() == color) {
            return Err(ComplexError::MalformedLabel(format!(
                "color {color} does not occur in its own view"
            )));
        }
        Ok(Label::Pair(color, members.into()))
    }

    /// `(color, members)` for members already sorted, deduplicated and chromatic.
    pub(crate) fn pair_sorted(color: Color, members: &[Label]) -> Label {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Label::Pair(color, members.into())
    }

    pub fn color(&self) -> Color {
        match self {
            Label::Base(c) | Label::Pair(c, _) => *c,
        }
    }

    /// The view of a pair label; `None` for base labels.
    pub fn view(&self) -> Option<&[Label]> {
        match self {
            Label::Base(_) => None,
            Label::Pair(_, view) => Some(view),
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Label::Base(_))
    }

    /// Number of nested pair constructors; base labels have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Label::Base(_) => 0,
            Label::Pair(_, view) => 1 + view.iter().map(Label::depth).max().unwrap_or(0),
        }
    }

    /// The member of this label's view carrying the label's own color.
    pub fn own_member(&self) -> Option<&Label> {
        let c = self.color();
        self.view()?.iter().find(|m| m.color() == c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("labels always serialize")
    }
}

pub(crate) fn check_distinct_colors(labels: &[Label]) -> Result<(), ComplexError> {
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i + 1..] {
            if a.color() == b.color() {
                return Err(ComplexError::ColorClash {
                    color: a.color(),
                    first: a.to_string(),
                    second: b.to_string(),
                });
            }
        }
    }
    Ok(())
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Base(c) => write!(f, "{c}"),
            Label::Pair(c, view) => {
                write!(f, "({c},{{")?;
                for (i, m) in view.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("})")
            }
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum RawLabel {
    Base(usize),
    Pair(usize, Vec<RawLabel>),
}

impl RawLabel {
    fn from_label(label: &Label) -> RawLabel {
        match label {
            Label::Base(c) => RawLabel::Base(c.0),
            Label::Pair(c, view) => RawLabel::Pair(c.0, view.iter().map(RawLabel::from_label).collect()),
        }
    }

    fn into_label(self) -> Result<Label, ComplexError> {
        match self {
            RawLabel::Base(c) => Ok(Label::base(c)),
            RawLabel::Pair(c, view) => {
                let members = view
                    .into_iter()
                    .map(RawLabel::into_label)
                    .collect::<Result<Vec<_>, _>>()?;
                Label::pair(c, members)
            }
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawLabel::from_label(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        RawLabel::deserialize(deserializer)?
            .into_label()
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(i: usize) -> Label {
        Label::base(i)
    }

    #[test]
    fn canonical_order_puts_base_first() {
        let p = Label::pair(0, [b(0)]).unwrap();
        assert!(b(2) < p);
        let p1 = Label::pair(1, [b(0), b(1)]).unwrap();
        assert!(p < p1);
        let p0_wide = Label::pair(0, [b(0), b(1)]).unwrap();
        // same color: compared on the sorted view
        assert!(p < p0_wide);
    }

    #[test]
    fn pair_rejects_bad_views() {
        assert!(Label::pair(0, Vec::<Label>::new()).is_err());
        assert!(Label::pair(2, [b(0), b(1)]).is_err());
        let clash = Label::pair(0, [b(0), Label::pair(0, [b(0)]).unwrap()]);
        assert!(matches!(clash, Err(ComplexError::ColorClash { .. })));
    }

    #[test]
    fn display_notation() {
        let inner = Label::pair(0, [b(0), b(1), b(2)]).unwrap();
        let l = Label::pair(2, [inner, Label::pair(2, [b(1), b(2)]).unwrap()]).unwrap();
        assert_eq!(l.to_string(), "(2,{(0,{0,1,2}),(2,{1,2})})");
        assert_eq!(l.depth(), 2);
        assert_eq!(l.own_member().unwrap().to_string(), "(2,{1,2})");
    }

    #[test]
    fn json_shape() {
        let l = Label::pair(1, [b(0), b(1)]).unwrap();
        assert_eq!(l.to_json(), r#"{"pair":[1,[{"base":0},{"base":1}]]}"#);
        let back: Label = serde_json::from_str(&l.to_json()).unwrap();
        assert_eq!(back, l);
        assert!(serde_json::from_str::<Label>(r#"{"pair":[3,[{"base":0}]]}"#).is_err());
    }
}
