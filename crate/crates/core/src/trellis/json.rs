//! JSON form `{length, levels: [[tags]], edges: [[{from, to, label}]]}`.
//! `edges[j - 1]` holds the edges entering level `j`; `from` and `to` are
//! vertex indices within their levels.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::paths::Combination;
use super::{Edge, Symbol, Trellis};
use crate::error::{Error, Result};
use crate::scalar::{format_float, format_rational, parse_float, value_to_rational};
use crate::semiring::Tropical;

pub trait LabelJson: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl LabelJson for Symbol {
    fn to_json(&self) -> Value {
        Value::from(*self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        v.as_u64()
            .and_then(|s| u32::try_from(s).ok())
            .ok_or_else(|| Error::parse(format!("expected an alphabet symbol, found {v}")))
    }
}

impl LabelJson for BigRational {
    fn to_json(&self) -> Value {
        Value::from(format_rational(self))
    }
    fn from_json(v: &Value) -> Result<Self> {
        value_to_rational(v)
    }
}

impl LabelJson for f64 {
    fn to_json(&self) -> Value {
        Value::from(format_float(*self))
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::parse(format!("bad number {n}"))),
            Value::String(s) => parse_float(s),
            other => Err(Error::parse(format!("expected a number, found {other}"))),
        }
    }
}

impl LabelJson for Tropical {
    fn to_json(&self) -> Value {
        Value::from(self.to_string())
    }
    fn from_json(v: &Value) -> Result<Self> {
        f64::from_json(v).map(Tropical)
    }
}

/// Combinations are written as `{"symbol": "coefficient"}` objects.
impl LabelJson for Combination {
    fn to_json(&self) -> Value {
        Value::Object(
            self.terms()
                .map(|(s, c)| (s.to_string(), Value::from(format_rational(c))))
                .collect(),
        )
    }
    fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::parse(format!("expected a symbol combination, found {v}")))?;
        let mut c = Combination::default();
        for (s, k) in obj {
            let s: Symbol = s.parse().map_err(|_| Error::parse(format!("bad symbol {s:?}")))?;
            c = c.plus(&Combination::term(s, value_to_rational(k)?));
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: usize,
    pub to: usize,
    pub label: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrellisJson {
    pub length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<usize>,
    pub levels: Vec<Vec<Option<String>>>,
    pub edges: Vec<Vec<EdgeJson>>,
}

impl<L: LabelJson> Trellis<L> {
    pub fn to_json(&self) -> TrellisJson {
        TrellisJson {
            length: self.length(),
            alphabet: self.alphabet(),
            levels: (0..=self.length()).map(|j| self.level_tags(j).to_vec()).collect(),
            edges: (1..=self.length())
                .map(|j| {
                    self.edges_at(j)
                        .map(|(from, to, label)| EdgeJson {
                            from,
                            to,
                            label: label.to_json(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &TrellisJson) -> Result<Self> {
        if doc.levels.len() != doc.length + 1 || doc.edges.len() != doc.length {
            return Err(Error::InvalidTrellis(format!(
                "length {} needs {} levels and {} edge lists",
                doc.length,
                doc.length + 1,
                doc.length
            )));
        }
        let mut incoming: Vec<Vec<Vec<Edge<L>>>> = doc.levels[1..]
            .iter()
            .map(|level| (0..level.len()).map(|_| Vec::new()).collect())
            .collect();
        for (j, edges) in doc.edges.iter().enumerate() {
            for e in edges {
                let dest = incoming[j].get_mut(e.to).ok_or(Error::NoSuchVertex {
                    level: j + 1,
                    index: e.to,
                })?;
                dest.push(Edge {
                    from: e.from,
                    label: L::from_json(&e.label)?,
                });
            }
        }
        Trellis::from_parts(doc.levels.clone(), incoming, doc.alphabet)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("trellis JSON serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: TrellisJson = serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        Trellis::from_json(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trellis::TrellisBuilder;

    #[test]
    fn round_trip() {
        let mut b = TrellisBuilder::new().alphabet(2);
        b.add_level();
        b.add_vertex(0, Some("root".into()));
        b.add_level();
        b.add_vertex(1, None);
        b.add_vertex(1, Some("x".into()));
        b.add_edge(1, 0, 0, 1u32).unwrap();
        b.add_edge(1, 0, 1, 2u32).unwrap();
        let t = b.build().unwrap();
        let text = t.to_json_string();
        assert_eq!(Trellis::<Symbol>::from_json_str(&text).unwrap(), t);

        let q = t.map_labels(|_, s| BigRational::new((*s as i64).into(), 3.into()));
        let back = Trellis::<BigRational>::from_json_str(&q.to_json_string()).unwrap();
        assert_eq!(back, q);
        assert!(q.to_json_string().contains("\"2/3\""));
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let bad = r#"{"length": 1, "levels": [[null]], "edges": [[]]}"#;
        assert!(Trellis::<Symbol>::from_json_str(bad).is_err());
        let missing = r#"{"length": 1, "levels": [[null], [null]], "edges": [[{"from": 0, "to": 4, "label": 1}]]}"#;
        assert!(Trellis::<Symbol>::from_json_str(missing).is_err());
    }
}
