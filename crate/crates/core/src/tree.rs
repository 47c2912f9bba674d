//! Variable-length ligand trees.
//!
//! A genome is 15 reals in `[0, 45)`. Each gene selects a catalog group by
//! `floor(value)`. Decoding is breadth-first over a queue of open bond slots:
//! gene 0 is the root, every later gene fills the oldest open slot. A NULL
//! gene closes its slot, so short ligands come from NULL genes rather than a
//! separate length parameter. Slots still open when the genes run out are
//! implicit hydrogens.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::catalog::{GroupCatalog, CATALOG_SIZE, NULL_GROUP};
use crate::geometry::Point;
use crate::site::ActiveSite;

/// Genes per genome, and the node bound of every decoded tree.
pub const GENOME_LEN: usize = 15;

/// Exclusive upper bound of every gene.
pub const GENE_UPPER: f64 = CATALOG_SIZE as f64;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("ligand has no nodes")]
    EmptyLigand,
    #[error("pose {pose} out of range (site has {available} poses)")]
    PoseOutOfRange { pose: usize, available: usize },
    #[error("genome needs exactly {GENOME_LEN} genes, found {0}")]
    WrongLength(usize),
    #[error("gene {index} = {value} lies outside [0, {GENE_UPPER})")]
    GeneOutOfBox { index: usize, value: f64 },
}

/// A validated point of the search box `[0, 45)^15`.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome([f64; GENOME_LEN]);

impl Genome {
    pub fn new(values: &[f64]) -> Result<Self, TreeError> {
        if values.len() != GENOME_LEN {
            return Err(TreeError::WrongLength(values.len()));
        }
        let mut genes = [0.0; GENOME_LEN];
        for (i, (&v, slot)) in values.iter().zip(genes.iter_mut()).enumerate() {
            if !(0.0..GENE_UPPER).contains(&v) {
                return Err(TreeError::GeneOutOfBox { index: i, value: v });
            }
            *slot = v;
        }
        Ok(Genome(genes))
    }

    /// Genome whose genes are the given group indices.
    pub fn from_groups(groups: &[usize]) -> Result<Self, TreeError> {
        let values: Vec<f64> = groups.iter().map(|&g| g as f64).collect();
        Genome::new(&values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Parses the one-line `;`-separated genome file format.
    pub fn parse(text: &str) -> Result<Self, GenomeParseError> {
        let line = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .unwrap_or("");
        let values = line
            .split(';')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| GenomeParseError::NotANumber(s.trim().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Genome::new(&values)?)
    }
}

impl std::fmt::Display for Genome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(f64::to_string).collect();
        f.write_str(&parts.join(";"))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenomeParseError {
    #[error("'{0}' is not a number")]
    NotANumber(String),
    #[error(transparent)]
    Invalid(#[from] TreeError),
}

/// Catalog index selected by a gene value.
pub fn gene_group(value: f64) -> usize {
    (value.floor() as i64).clamp(0, NULL_GROUP as i64) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub group: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Decoded ligand topology. Nodes are stored in breadth-first order, so
/// node 0 is the root and every parent precedes its children.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LigandTree {
    pub nodes: Vec<Node>,
}

impl LigandTree {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    /// Bonds a node uses, counting the bond to its parent.
    pub fn bonds_used(&self, node: usize) -> usize {
        let n = &self.nodes[node];
        n.children.len() + usize::from(n.parent.is_some())
    }

    /// Checks the structural invariants against a catalog.
    pub fn check(&self, catalog: &GroupCatalog) -> Result<(), String> {
        if self.nodes.len() > GENOME_LEN {
            return Err(format!("{} nodes exceeds {GENOME_LEN}", self.nodes.len()));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.group >= NULL_GROUP {
                return Err(format!("node {i} holds group {}", node.group));
            }
            if (i == 0) != node.parent.is_none() {
                return Err(format!("node {i} has a wrong parent link"));
            }
            if let Some(p) = node.parent {
                if p >= i || !self.nodes[p].children.contains(&i) {
                    return Err(format!("node {i} parent {p} is inconsistent"));
                }
            }
            let valency = catalog.group(node.group).valency as usize;
            if self.bonds_used(i) > valency {
                return Err(format!("node {i} exceeds valency {valency}"));
            }
        }
        Ok(())
    }
}

/// Decodes genes into a tree. Total over any slice of reals.
pub fn decode(genes: &[f64], catalog: &GroupCatalog) -> LigandTree {
    let mut tree = LigandTree::default();
    let Some((&first, rest)) = genes.split_first() else {
        return tree;
    };
    let root = gene_group(first);
    if root == NULL_GROUP {
        return tree;
    }
    // Each queue entry is one open bond slot on the given parent node.
    let mut slots: VecDeque<usize> = VecDeque::new();
    tree.nodes.push(Node {
        group: root,
        parent: None,
        children: Vec::new(),
    });
    slots.extend(std::iter::repeat_n(0, catalog.group(root).valency as usize));

    for &gene in rest {
        let Some(parent) = slots.pop_front() else {
            break;
        };
        let group = gene_group(gene);
        if group == NULL_GROUP {
            continue;
        }
        let id = tree.nodes.len();
        tree.nodes.push(Node {
            group,
            parent: Some(parent),
            children: Vec::new(),
        });
        tree.nodes[parent].children.push(id);
        let open = (catalog.group(group).valency as usize).saturating_sub(1);
        slots.extend(std::iter::repeat_n(id, open));
    }
    tree
}

/// A tree laid out in the plane of an active site.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedLigand {
    pub tree: LigandTree,
    pub positions: Vec<Point>,
    pub pose: usize,
    pub extent: f64,
}

impl PlacedLigand {
    pub fn new(tree: LigandTree, positions: Vec<Point>, pose: usize) -> Self {
        assert_eq!(tree.len(), positions.len(), "one position per node");
        let extent = max_pairwise_distance(&positions);
        PlacedLigand {
            tree,
            positions,
            pose,
            extent,
        }
    }
}

fn max_pairwise_distance(points: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(a.distance(*b));
        }
    }
    best
}

/// Direction (cos, sin) of child `j` of `k` relative to the incoming bond.
/// Children fan out evenly over the half-plane from -90° to +90°.
fn fan_angle(j: usize, k: usize) -> (f64, f64) {
    if k == 1 {
        return (1.0, 0.0);
    }
    let deg = -90.0 + 180.0 * j as f64 / (k - 1) as f64;
    // exact values for the axis-aligned and 30° multiples that small valencies produce
    match deg {
        d if d == 0.0 => (1.0, 0.0),
        d if d == 90.0 => (0.0, 1.0),
        d if d == -90.0 => (0.0, -1.0),
        d if d == 30.0 => (0.75f64.sqrt(), 0.5),
        d if d == -30.0 => (0.75f64.sqrt(), -0.5),
        d => {
            let (s, c) = d.to_radians().sin_cos();
            (c, s)
        }
    }
}

/// Lays out a tree at one pose of a site.
pub fn embed(
    tree: &LigandTree,
    site: &ActiveSite,
    pose: usize,
    catalog: &GroupCatalog,
) -> Result<PlacedLigand, TreeError> {
    if tree.is_empty() {
        return Err(TreeError::EmptyLigand);
    }
    let p = site.poses.get(pose).ok_or(TreeError::PoseOutOfRange {
        pose,
        available: site.poses.len(),
    })?;
    let n = tree.len();
    let mut positions = vec![p.anchor; n];
    let mut headings = vec![site.pose_direction(p); n];
    for i in 0..n {
        let node = &tree.nodes[i];
        let length = catalog.group(node.group).length;
        let k = node.children.len();
        for (j, &child) in node.children.iter().enumerate() {
            let (cos, sin) = fan_angle(j, k);
            let heading = headings[i].rotate(cos, sin);
            let bond = 0.5 * (length + catalog.group(tree.nodes[child].group).length);
            headings[child] = heading;
            positions[child] = positions[i] + heading * bond;
        }
    }
    Ok(PlacedLigand::new(tree.clone(), positions, pose))
}

/// Indented outline of a tree, one `label(used/total)` line per node.
pub fn to_structure_text(tree: &LigandTree, catalog: &GroupCatalog) -> String {
    if tree.is_empty() {
        return "(empty ligand)\n".to_string();
    }
    let mut out = String::new();
    let mut stack = vec![(0usize, 0usize)];
    while let Some((id, depth)) = stack.pop() {
        let group = catalog.group(tree.nodes[id].group);
        let marker = if depth == 0 { "*" } else { "-" };
        let _ = writeln!(
            out,
            "{}{} {}({}/{})",
            "  ".repeat(depth),
            marker,
            group.label,
            tree.bonds_used(id),
            group.valency
        );
        for &c in tree.nodes[id].children.iter().rev() {
            stack.push((c, depth + 1));
        }
    }
    out
}
