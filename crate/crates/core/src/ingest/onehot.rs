use std::collections::BTreeMap;

use crate::bits::Bits;
use crate::error::{HnetError, Result};

use super::{FeatureKind, FeatureTable};

/// A boolean indicator column: one category of one feature, or the AND of
/// categories drawn from several distinct features.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoryColumn {
    pub parent_features: Vec<String>,
    pub labels: Vec<String>,
    pub bits: Bits,
    /// Rows where every parent feature is observed.
    pub present: Bits,
    pub positives: usize,
}

impl CategoryColumn {
    pub fn new(feature: &str, label: &str, bits: Bits, present: Bits) -> Self {
        let positives = bits.count_ones();
        Self {
            parent_features: vec![feature.to_string()],
            labels: vec![label.to_string()],
            bits,
            present,
            positives,
        }
    }

    pub fn order(&self) -> usize {
        self.parent_features.len()
    }

    /// `feature=label`, members joined with `&`.
    pub fn id(&self) -> String {
        self.parent_features
            .iter()
            .zip(&self.labels)
            .map(|(f, l)| format!("{f}={l}"))
            .collect::<Vec<_>>()
            .join("&")
    }

    pub fn feature_key(&self) -> String {
        self.parent_features.join("&")
    }

    pub fn label_key(&self) -> String {
        self.labels.join("&")
    }

    pub fn shares_feature(&self, other: &CategoryColumn) -> bool {
        self.parent_features
            .iter()
            .any(|f| other.parent_features.contains(f))
    }

    pub fn n_rows(&self) -> usize {
        self.bits.len()
    }

    /// Element-wise AND with `other`.
    pub fn combine(&self, other: &CategoryColumn) -> CategoryColumn {
        let bits = self.bits.and(&other.bits);
        let positives = bits.count_ones();
        CategoryColumn {
            parent_features: self
                .parent_features
                .iter()
                .chain(&other.parent_features)
                .cloned()
                .collect(),
            labels: self.labels.iter().chain(&other.labels).cloned().collect(),
            present: self.present.and(&other.present),
            bits,
            positives,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneHotMatrix {
    pub columns: Vec<CategoryColumn>,
    pub n_rows: usize,
}

impl OneHotMatrix {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn filter_support(&self, y_min: usize) -> OneHotMatrix {
        OneHotMatrix {
            columns: self
                .columns
                .iter()
                .filter(|c| c.positives >= y_min)
                .cloned()
                .collect(),
            n_rows: self.n_rows,
        }
    }
}

/// Every (discrete feature, category) indicator, without support filtering.
/// Feature order follows the table; labels within a feature are sorted.
pub fn one_hot_encode_all(table: &FeatureTable) -> OneHotMatrix {
    let n = table.n_rows;
    let mut columns = Vec::new();
    for col in &table.columns {
        if col.kind != FeatureKind::Discrete {
            continue;
        }
        let Some(values) = col.text() else { continue };
        let mut by_label: BTreeMap<&str, Bits> = BTreeMap::new();
        let mut present = Bits::zeros(n);
        for (row, v) in values.iter().enumerate() {
            if let Some(v) = v {
                present.set(row, true);
                by_label
                    .entry(v.as_str())
                    .or_insert_with(|| Bits::zeros(n))
                    .set(row, true);
            }
        }
        for (label, bits) in by_label {
            columns.push(CategoryColumn::new(&col.name, label, bits, present.clone()));
        }
    }
    OneHotMatrix { columns, n_rows: n }
}

/// One-hot encodes the discrete features, keeping categories with at least
/// `y_min` positive rows.
pub fn one_hot_encode(table: &FeatureTable, y_min: usize) -> Result<OneHotMatrix> {
    if y_min == 0 {
        return Err(HnetError::InvalidConfig("y_min must be at least 1".into()));
    }
    let m = one_hot_encode_all(table).filter_support(y_min);
    if m.is_empty() {
        return Err(HnetError::NoUsableColumns { y_min });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{assign_types, parse_csv, IngestConfig};

    fn table(csv: &str) -> FeatureTable {
        let cfg = IngestConfig::default();
        assign_types(parse_csv(csv.as_bytes(), &cfg).unwrap(), &cfg).unwrap()
    }

    #[test]
    fn labels_sorted_and_missing_rows_empty() {
        let t = table("c\nb\na\n\nb\n");
        let m = one_hot_encode(&t, 1).unwrap();
        let ids: Vec<_> = m.columns.iter().map(|c| c.id()).collect();
        assert_eq!(ids, ["c=a", "c=b"]);
        assert_eq!(m.columns[1].bits.to_bools(), [true, false, false, true]);
        assert_eq!(m.columns[0].present.to_bools(), [true, true, false, true]);
    }

    #[test]
    fn single_category_feature_is_all_true() {
        let rows = "x\n".repeat(12);
        let m = one_hot_encode(&table(&format!("f\n{rows}")), 10).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.columns[0].positives, 12);
    }

    #[test]
    fn y_min_above_rows_is_an_error() {
        let err = one_hot_encode(&table("f\na\nb\na\n"), 10).unwrap_err();
        assert!(matches!(err, HnetError::NoUsableColumns { y_min: 10 }));
    }

    #[test]
    fn numeric_columns_not_encoded() {
        let m = one_hot_encode_all(&table("x,f\n1.5,a\n2.5,b\n"));
        assert!(m.columns.iter().all(|c| c.parent_features == ["f"]));
    }

    #[test]
    fn combine_ands_bits_and_presence() {
        let a = CategoryColumn::new(
            "A",
            "1",
            Bits::from_bools(&[true, true, true, false, false]),
            Bits::ones(5),
        );
        let b = CategoryColumn::new(
            "B",
            "x",
            Bits::from_bools(&[false, true, true, true, false]),
            Bits::from_bools(&[true, true, true, true, false]),
        );
        let c = a.combine(&b);
        assert_eq!(c.bits.to_bools(), [false, true, true, false, false]);
        assert_eq!(c.positives, 2);
        assert_eq!(c.present.count_ones(), 4);
        assert_eq!(c.id(), "A=1&B=x");
        assert!(c.shares_feature(&a));
    }
}
