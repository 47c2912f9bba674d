//! Functional-group catalog.
//!
//! A catalog is exactly 45 building blocks indexed `0..=44`. Entry 44 is the
//! NULL group: it has no bonds, no size, no charge and no Van der Waals
//! parameters, and decoding treats it as "stop this branch".
//!
//! Catalog files are plain UTF-8 text, one group per line:
//!
//! ```text
//! index;label;valency;length;charge;vdw_a;vdw_b
//! ```
//!
//! Lines starting with `#` and blank lines are ignored.

use std::fmt;

use thiserror::Error;

/// Number of entries in every catalog, including the NULL group.
pub const CATALOG_SIZE: usize = 45;

/// Index of the NULL group.
pub const NULL_GROUP: usize = 44;

/// The catalog shipped with the crate.
pub const DEFAULT_CATALOG: &str = include_str!("../data/default.cat");

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("catalog must have exactly {CATALOG_SIZE} entries, found {0}")]
    MissingEntry(usize),
    #[error("line {line}: duplicate group index {index}")]
    DuplicateIndex { line: usize, index: usize },
    #[error("NULL group (index {NULL_GROUP}) must have zero valency, length, charge and vdw parameters")]
    NullGroupViolation,
    #[error("group {index}: {field} must not be negative")]
    NegativeParameter { index: usize, field: &'static str },
    #[error("group {index}: non-NULL groups need valency >= 1 and length > 0")]
    DegenerateGroup { index: usize },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalGroup {
    pub index: usize,
    pub label: String,
    /// Number of bond slots.
    pub valency: u32,
    /// Spatial size in Å.
    pub length: f64,
    /// Charge in elementary-charge units.
    pub charge: f64,
    /// Repulsive coefficient, kcal·Å¹²/mol.
    pub vdw_a: f64,
    /// Attractive coefficient, kcal·Å⁶/mol.
    pub vdw_b: f64,
}

impl FunctionalGroup {
    pub fn is_null(&self) -> bool {
        self.index == NULL_GROUP
    }
}

/// Combined Lennard-Jones coefficients for one pair of groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairParams {
    pub a: f64,
    pub b: f64,
}

impl PairParams {
    /// Geometric-mean combination of two per-group parameter sets.
    pub fn combine(a1: f64, b1: f64, a2: f64, b2: f64) -> Self {
        PairParams {
            a: (a1 * a2).sqrt(),
            b: (b1 * b2).sqrt(),
        }
    }
}

/// Pair parameters for two groups of the same catalog.
pub fn pair_params(g1: &FunctionalGroup, g2: &FunctionalGroup) -> PairParams {
    PairParams::combine(g1.vdw_a, g1.vdw_b, g2.vdw_a, g2.vdw_b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupCatalog {
    groups: Vec<FunctionalGroup>,
}

impl GroupCatalog {
    /// Validates a list of groups in any order and stores them by index.
    pub fn new(groups: Vec<FunctionalGroup>) -> Result<Self, CatalogError> {
        Self::from_lines(groups.into_iter().enumerate().map(|(i, g)| (i + 1, g)))
    }

    fn from_lines(
        entries: impl IntoIterator<Item = (usize, FunctionalGroup)>,
    ) -> Result<Self, CatalogError> {
        let mut slots: Vec<Option<FunctionalGroup>> = vec![None; CATALOG_SIZE];
        let mut count = 0;
        for (line, group) in entries {
            count += 1;
            if group.index >= CATALOG_SIZE {
                return Err(CatalogError::MissingEntry(group.index + 1));
            }
            let index = group.index;
            if slots[index].is_some() {
                return Err(CatalogError::DuplicateIndex { line, index });
            }
            validate_group(&group)?;
            slots[index] = Some(group);
        }
        if count != CATALOG_SIZE {
            return Err(CatalogError::MissingEntry(count));
        }
        // count == 45 with no duplicates and no index >= 45 means every slot is filled.
        let groups = slots.into_iter().map(|g| g.expect("dense indices")).collect();
        Ok(GroupCatalog { groups })
    }

    pub fn default_catalog() -> Self {
        load_catalog(DEFAULT_CATALOG).expect("shipped catalog is valid")
    }

    pub fn group(&self, index: usize) -> &FunctionalGroup {
        &self.groups[index]
    }

    pub fn groups(&self) -> &[FunctionalGroup] {
        &self.groups
    }

    pub fn null_group(&self) -> &FunctionalGroup {
        &self.groups[NULL_GROUP]
    }

    /// Medians of `vdw_a` and `vdw_b` over the non-NULL groups.
    pub fn median_vdw(&self) -> (f64, f64) {
        let mut a: Vec<f64> = self.groups[..NULL_GROUP].iter().map(|g| g.vdw_a).collect();
        let mut b: Vec<f64> = self.groups[..NULL_GROUP].iter().map(|g| g.vdw_b).collect();
        (median(&mut a), median(&mut b))
    }
}

impl fmt::Display for GroupCatalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# index;label;valency;length;charge;vdw_a;vdw_b")?;
        for g in &self.groups {
            writeln!(
                f,
                "{};{};{};{};{};{};{}",
                g.index, g.label, g.valency, g.length, g.charge, g.vdw_a, g.vdw_b
            )?;
        }
        Ok(())
    }
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn validate_group(g: &FunctionalGroup) -> Result<(), CatalogError> {
    let fields = [
        ("length", g.length),
        ("vdw_a", g.vdw_a),
        ("vdw_b", g.vdw_b),
    ];
    for (field, value) in fields {
        if value < 0.0 || value.is_nan() {
            return Err(CatalogError::NegativeParameter {
                index: g.index,
                field,
            });
        }
    }
    if !g.charge.is_finite() {
        return Err(CatalogError::NegativeParameter {
            index: g.index,
            field: "charge",
        });
    }
    if g.is_null() {
        let zero = g.valency == 0
            && g.length == 0.0
            && g.charge == 0.0
            && g.vdw_a == 0.0
            && g.vdw_b == 0.0;
        if !zero {
            return Err(CatalogError::NullGroupViolation);
        }
    } else if g.valency < 1 || g.length <= 0.0 {
        return Err(CatalogError::DegenerateGroup { index: g.index });
    }
    Ok(())
}

/// Parses and validates a catalog file.
pub fn load_catalog(text: &str) -> Result<GroupCatalog, CatalogError> {
    let mut entries = Vec::with_capacity(CATALOG_SIZE);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        entries.push((line, parse_line(line, trimmed)?));
    }
    GroupCatalog::from_lines(entries)
}

fn parse_line(line: usize, text: &str) -> Result<FunctionalGroup, CatalogError> {
    let fields: Vec<&str> = text.split(';').map(str::trim).collect();
    if fields.len() != 7 {
        return Err(CatalogError::Malformed {
            line,
            reason: format!("expected 7 ';'-separated fields, found {}", fields.len()),
        });
    }
    let malformed = |what: &str, value: &str| CatalogError::Malformed {
        line,
        reason: format!("invalid {what} '{value}'"),
    };
    let index = fields[0]
        .parse::<usize>()
        .map_err(|_| malformed("index", fields[0]))?;
    let valency = fields[2]
        .parse::<i64>()
        .map_err(|_| malformed("valency", fields[2]))?;
    if valency < 0 {
        return Err(CatalogError::NegativeParameter {
            index,
            field: "valency",
        });
    }
    let real = |k: usize, what: &str| {
        fields[k]
            .parse::<f64>()
            .map_err(|_| malformed(what, fields[k]))
    };
    Ok(FunctionalGroup {
        index,
        label: fields[1].to_string(),
        valency: valency as u32,
        length: real(3, "length")?,
        charge: real(4, "charge")?,
        vdw_a: real(5, "vdw_a")?,
        vdw_b: real(6, "vdw_b")?,
    })
}
