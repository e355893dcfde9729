use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome label of a measurement or instrument.
///
/// Products and refinements produce [`Label::Pair`]s. In JSON a label is a
/// number, a string, or a two-element array.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Real(f64),
    Text(String),
    Pair(Box<Label>, Box<Label>),
}

impl Label {
    pub fn pair(a: Label, b: Label) -> Self {
        Label::Pair(Box::new(a), Box::new(b))
    }

    /// The numeric value of a scalar label, if it has one.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Label::Int(i) => Some(*i as f64),
            Label::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn first(&self) -> Option<&Label> {
        match self {
            Label::Pair(a, _) => Some(a),
            _ => None,
        }
    }
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Label::Int(a), Label::Int(b)) => a == b,
            (Label::Real(a), Label::Real(b)) => a.to_bits() == b.to_bits() || a == b,
            (Label::Text(a), Label::Text(b)) => a == b,
            (Label::Pair(a1, b1), Label::Pair(a2, b2)) => a1 == a2 && b1 == b2,
            _ => false,
        }
    }
}

impl Eq for Label {}

impl From<i64> for Label {
    fn from(i: i64) -> Self {
        Label::Int(i)
    }
}

impl From<f64> for Label {
    fn from(x: f64) -> Self {
        Label::Real(x)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Text(s.to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Real(x) => write!(f, "{x}"),
            Label::Text(s) => write!(f, "{s}"),
            Label::Pair(a, b) => write!(f, "({a} {b})"),
        }
    }
}

pub(crate) fn check_distinct(labels: &[Label]) -> crate::Result<()> {
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].contains(a) {
            return Err(crate::Error::DuplicateLabel(a.to_string()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shapes() {
        let l = Label::pair(Label::Int(1), Label::Text("b".into()));
        assert_eq!(serde_json::to_string(&l).unwrap(), r#"[1,"b"]"#);
        let back: Label = serde_json::from_str(r#"[1,"b"]"#).unwrap();
        assert_eq!(back, l);
        let r: Label = serde_json::from_str("-0.5").unwrap();
        assert_eq!(r, Label::Real(-0.5));
        let i: Label = serde_json::from_str("3").unwrap();
        assert_eq!(i, Label::Int(3));
    }

    #[test]
    fn duplicates_rejected() {
        let labels = vec![Label::Int(1), Label::Int(2), Label::Int(1)];
        assert!(check_distinct(&labels).is_err());
        assert!(check_distinct(&labels[..2]).is_ok());
    }
}
