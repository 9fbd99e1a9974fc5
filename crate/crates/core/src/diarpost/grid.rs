use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::post::{apply_post, PostParams};
use super::DiarpostError;
use crate::metrics::{der_components, Annotation, DerComponents};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDimension {
    pub name: String,
    pub values: Vec<f64>,
}

/// Named dimensions, enumerated as a cartesian product with the last
/// dimension varying fastest. `min_duration_off`, `round_granularity` and
/// `min_segment` (with or without an `_s` suffix, or the short forms `m` and
/// `g`) drive [`PostParams`]; any other name is carried through untouched.
///
/// In JSON a grid is an object `{"min_duration_off": [0.0, 0.5], ...}` (key
/// order is the dimension order) or a list of `{"name", "values"}` objects.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamGrid {
    pub dimensions: Vec<GridDimension>,
}

#[derive(Clone, Copy)]
enum Knob {
    MinDurationOff,
    RoundGranularity,
    MinSegment,
}

fn knob(name: &str) -> Option<Knob> {
    match name {
        "m" | "min_duration_off" | "min_duration_off_s" => Some(Knob::MinDurationOff),
        "g" | "round_granularity" | "round_granularity_s" => Some(Knob::RoundGranularity),
        "min_segment" | "min_segment_s" => Some(Knob::MinSegment),
        _ => None,
    }
}

impl ParamGrid {
    pub fn new(dimensions: Vec<(impl Into<String>, Vec<f64>)>) -> Self {
        ParamGrid {
            dimensions: dimensions
                .into_iter()
                .map(|(name, values)| GridDimension { name: name.into(), values })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        if self.dimensions.is_empty() {
            return 0;
        }
        self.dimensions.iter().map(|d| d.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> Vec<String> {
        self.dimensions.iter().map(|d| d.name.clone()).collect()
    }

    pub fn validate(&self) -> Result<(), DiarpostError> {
        if self.dimensions.is_empty() {
            return Err(DiarpostError::InvalidGrid("no dimensions".into()));
        }
        let mut seen: BTreeMap<u8, &str> = BTreeMap::new();
        for (i, d) in self.dimensions.iter().enumerate() {
            if d.values.is_empty() {
                return Err(DiarpostError::InvalidGrid(format!("dimension {:?} has no values", d.name)));
            }
            if d.values.iter().any(|v| !v.is_finite()) {
                return Err(DiarpostError::InvalidGrid(format!("dimension {:?} has a non-finite value", d.name)));
            }
            if self.dimensions[..i].iter().any(|o| o.name == d.name) {
                return Err(DiarpostError::InvalidGrid(format!("dimension {:?} repeated", d.name)));
            }
            if let Some(k) = knob(&d.name) {
                if let Some(prev) = seen.insert(k as u8, &d.name) {
                    return Err(DiarpostError::InvalidGrid(format!("{:?} and {:?} name the same parameter", prev, d.name)));
                }
                if d.values.iter().any(|v| *v < 0.0) {
                    return Err(DiarpostError::InvalidGrid(format!("dimension {:?} has a negative value", d.name)));
                }
            }
        }
        Ok(())
    }

    /// Value vector of grid point `index` (row-major, last dimension fastest).
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut values = vec![0.0; self.dimensions.len()];
        for (slot, d) in values.iter_mut().zip(&self.dimensions).rev() {
            *slot = d.values[index % d.values.len()];
            index /= d.values.len();
        }
        values
    }

    /// Post-processing parameters for a value vector; unnamed knobs stay 0.
    pub fn params(&self, values: &[f64]) -> PostParams {
        let mut p = PostParams::default();
        for (d, &v) in self.dimensions.iter().zip(values) {
            match knob(&d.name) {
                Some(Knob::MinDurationOff) => p.min_duration_off_s = v,
                Some(Knob::RoundGranularity) => p.round_granularity_s = v,
                Some(Knob::MinSegment) => p.min_segment_s = v,
                None => {}
            }
        }
        p
    }
}

impl Serialize for ParamGrid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.dimensions.len()))?;
        for d in &self.dimensions {
            map.serialize_entry(&d.name, &d.values)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ParamGrid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct GridVisitor;

        impl<'de> Visitor<'de> for GridVisitor {
            type Value = ParamGrid;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object of name -> values, or a list of {name, values}")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<ParamGrid, A::Error> {
                let mut dimensions = Vec::new();
                while let Some((name, values)) = map.next_entry::<String, Vec<f64>>()? {
                    if dimensions.iter().any(|d: &GridDimension| d.name == name) {
                        return Err(de::Error::custom(format!("duplicate dimension {name:?}")));
                    }
                    dimensions.push(GridDimension { name, values });
                }
                Ok(ParamGrid { dimensions })
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<ParamGrid, A::Error> {
                let mut dimensions = Vec::new();
                while let Some(d) = seq.next_element::<GridDimension>()? {
                    dimensions.push(d);
                }
                Ok(ParamGrid { dimensions })
            }
        }

        deserializer.deserialize_any(GridVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub index: usize,
    pub values: Vec<f64>,
    pub params: PostParams,
    pub mean_der: f64,
    pub components: DerComponents,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub dimensions: Vec<String>,
    pub best_index: usize,
    pub best_values: Vec<f64>,
    pub best_params: PostParams,
    pub best_der: f64,
    pub table: Vec<GridRow>,
}

impl GridResult {
    pub fn best_row(&self) -> &GridRow {
        &self.table[self.best_index]
    }

    /// Plain-text table, one line per grid point, best point marked with `*`.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = vec!["idx".into()];
        header.extend(self.dimensions.iter().cloned());
        header.push("der".into());
        out.push_str(&format!("  {}\n", header.join("\t")));
        for row in &self.table {
            let mark = if row.index == self.best_index { '*' } else { ' ' };
            let mut cells = vec![row.index.to_string()];
            cells.extend(row.values.iter().map(|v| format!("{v}")));
            cells.push(format!("{:.6}", row.mean_der));
            out.push_str(&format!("{mark} {}\n", cells.join("\t")));
        }
        out
    }
}

fn pair_by_uri<'a>(
    hyps: &'a [Annotation],
    refs: &'a [Annotation],
) -> Result<Vec<(&'a Annotation, &'a Annotation)>, DiarpostError> {
    let mut by_uri: BTreeMap<&str, &Annotation> = BTreeMap::new();
    for h in hyps {
        if by_uri.insert(&h.uri, h).is_some() {
            return Err(DiarpostError::UnpairedRecording(h.uri.clone()));
        }
    }
    let mut pairs = Vec::with_capacity(refs.len());
    for r in refs {
        let h = by_uri.remove(r.uri.as_str()).ok_or_else(|| DiarpostError::UnpairedRecording(r.uri.clone()))?;
        pairs.push((h, r));
    }
    if let Some(uri) = by_uri.keys().next() {
        return Err(DiarpostError::UnpairedRecording(uri.to_string()));
    }
    Ok(pairs)
}

/// Pooled DER components of post-processed hypotheses against references.
pub(crate) fn pooled_components(
    pairs: &[(&Annotation, &Annotation)],
    params: &PostParams,
    collar_s: f64,
) -> DerComponents {
    pairs
        .iter()
        .map(|(h, r)| der_components(r, &apply_post(h, params), collar_s).0)
        .sum()
}

/// Evaluates every grid point and returns the one with the lowest pooled DER.
/// Ties go to the lexicographically smallest value vector.
pub fn grid_search(
    grid: &ParamGrid,
    hyps: &[Annotation],
    refs: &[Annotation],
    collar_s: f64,
) -> Result<GridResult, DiarpostError> {
    grid.validate()?;
    let pairs = pair_by_uri(hyps, refs)?;
    let table: Vec<GridRow> = (0..grid.len())
        .into_par_iter()
        .map(|index| {
            let values = grid.point(index);
            let params = grid.params(&values);
            let components = pooled_components(&pairs, &params, collar_s);
            (index, values, params, components)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .map(|(index, values, params, components)| {
            let mean_der = components.der().ok_or(DiarpostError::EmptyReference)?;
            Ok(GridRow { index, values, params, mean_der, components })
        })
        .collect::<Result<_, DiarpostError>>()?;

    let best = table
        .iter()
        .min_by(|a, b| {
            a.components.cmp_der(&b.components).then_with(|| {
                a.values
                    .iter()
                    .zip(&b.values)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
        })
        .expect("validated grid has at least one point");

    Ok(GridResult {
        dimensions: grid.names(),
        best_index: best.index,
        best_values: best.values.clone(),
        best_params: best.params,
        best_der: best.mean_der,
        table,
    })
}
