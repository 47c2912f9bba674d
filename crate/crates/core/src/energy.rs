//! Protein–ligand interaction energy.
//!
//! Every residue is paired with its nearest ligand node. Pairs inside the
//! proximity window contribute a 12-6 Van der Waals term and, when both sides
//! are charged, a Coulomb term. Pairs outside the window and ligands longer
//! than the pocket contribute soft penalties instead. Units are Å, kcal/mol
//! and elementary charges throughout.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::catalog::{GroupCatalog, PairParams};
use crate::site::{site_length, ActiveSite};
use crate::tree::{embed, LigandTree, PlacedLigand, TreeError};

/// Energy assigned to a ligand with no nodes.
pub const EMPTY_LIGAND_ENERGY: f64 = 1.0e6;
/// Distances and extents this close to a window edge, the pocket length or
/// another node's distance count as exactly on it, so rounding in the layout
/// cannot flip a pair between window and clash or between tied nodes.
pub const EDGE_TOLERANCE: f64 = 1.0e-9;

/// 1/(4πε₀) in N·m²/C², as used for the electrostatic term.
pub const COULOMB_SI: f64 = 9.0e9;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Avogadro constant, 1/mol.
pub const AVOGADRO: f64 = 6.022_140_76e23;
/// Joules per thermochemical kilocalorie.
pub const JOULES_PER_KCAL: f64 = 4184.0;
/// Metres per ångström.
pub const METRES_PER_ANGSTROM: f64 = 1.0e-10;

/// Coulomb constant in kcal·Å/(mol·e²), converted from [`COULOMB_SI`].
pub fn coulomb_constant() -> f64 {
    COULOMB_SI * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * AVOGADRO
        / (JOULES_PER_KCAL * METRES_PER_ANGSTROM)
}

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error("distance must be positive, got {0}")]
    NonpositiveDistance(f64),
    #[error("ligand has no nodes")]
    EmptyLigand,
    #[error("invalid energy configuration: {0}")]
    InvalidConfig(String),
}

impl From<TreeError> for EnergyError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::EmptyLigand => EnergyError::EmptyLigand,
            other => EnergyError::InvalidConfig(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyConfig {
    /// kcal·Å/(mol·e²)
    pub coulomb_constant: f64,
    /// Relative permittivity of the surrounding medium.
    pub dielectric: f64,
    /// Proximity window, Å.
    pub r_min: f64,
    pub r_max: f64,
    /// kcal/mol per residue closer than `r_min`.
    pub clash_penalty: f64,
    /// kcal/mol per residue farther than `r_max`.
    pub far_penalty: f64,
    /// kcal/mol per Å of ligand length beyond the pocket.
    pub oversize_penalty: f64,
    /// Van der Waals parameters shared by every residue.
    pub residue_vdw_a: f64,
    pub residue_vdw_b: f64,
}

impl EnergyConfig {
    /// Defaults with residue parameters set to the catalog medians.
    pub fn for_catalog(catalog: &GroupCatalog) -> Self {
        let (a, b) = catalog.median_vdw();
        EnergyConfig {
            residue_vdw_a: a,
            residue_vdw_b: b,
            ..EnergyConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        let bad = |m: &str| Err(EnergyError::InvalidConfig(m.to_string()));
        if !(self.dielectric >= 1.0) {
            return bad("dielectric must be >= 1");
        }
        if !(self.r_min > 0.0 && self.r_min < self.r_max) {
            return bad("window needs 0 < r_min < r_max");
        }
        let nonneg = [
            self.clash_penalty,
            self.far_penalty,
            self.oversize_penalty,
            self.residue_vdw_a,
            self.residue_vdw_b,
            self.coulomb_constant,
        ];
        if nonneg.iter().any(|v| !(*v >= 0.0)) {
            return bad("penalties, residue parameters and coulomb constant must be >= 0");
        }
        Ok(())
    }
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            coulomb_constant: coulomb_constant(),
            dielectric: 80.0,
            r_min: 0.7,
            r_max: 2.7,
            clash_penalty: 50.0,
            far_penalty: 5.0,
            oversize_penalty: 100.0,
            residue_vdw_a: 0.0,
            residue_vdw_b: 0.0,
        }
    }
}

/// 12-6 Van der Waals energy `A/r¹² − B/r⁶`.
pub fn lj_energy(params: PairParams, r: f64) -> Result<f64, EnergyError> {
    if !(r > 0.0) {
        return Err(EnergyError::NonpositiveDistance(r));
    }
    let inv6 = (r * r * r).powi(-2);
    Ok(params.a * inv6 * inv6 - params.b * inv6)
}

/// Screened Coulomb energy between two point charges.
pub fn coulomb_energy(q_a: f64, q_b: f64, r: f64, config: &EnergyConfig) -> Result<f64, EnergyError> {
    if !(r > 0.0) {
        return Err(EnergyError::NonpositiveDistance(r));
    }
    Ok(config.coulomb_constant * q_a * q_b / (config.dielectric * r))
}

/// Nearest node for every residue, in residue order: `(residue, node, distance)`.
/// Ties, up to [`EDGE_TOLERANCE`], go to the lowest node index.
pub fn pair_residues(
    placed: &PlacedLigand,
    site: &ActiveSite,
) -> Result<Vec<(usize, usize, f64)>, EnergyError> {
    if placed.positions.is_empty() {
        return Err(EnergyError::EmptyLigand);
    }
    Ok(site
        .residues
        .iter()
        .enumerate()
        .map(|(ri, residue)| {
            let distances: Vec<f64> = placed.positions.iter().map(|p| p.distance(residue.position)).collect();
            let nearest = distances.iter().copied().fold(f64::INFINITY, f64::min);
            // lowest index among the nodes tied (up to rounding) for nearest
            let node = distances
                .iter()
                .position(|&d| d <= nearest + EDGE_TOLERANCE)
                .expect("ligand has nodes");
            (ri, node, distances[node])
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStatus {
    Window,
    Clash,
    Far,
}

impl fmt::Display for PairStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairStatus::Window => "window",
            PairStatus::Clash => "clash",
            PairStatus::Far => "far",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    pub residue_id: String,
    pub node: usize,
    pub distance: f64,
    pub e_vdw: f64,
    pub e_elec: f64,
    pub status: PairStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub pairings: Vec<Pairing>,
    pub e_vdw_total: f64,
    pub e_elec_total: f64,
    pub clash_count: usize,
    pub far_count: usize,
    /// `extent − site_length + 1` when the ligand does not fit, else 0.
    pub oversize_excess: f64,
    pub penalty_total: f64,
    pub e_total: f64,
    /// `1 / e_total`, defined only for positive energies.
    pub fitness: Option<f64>,
    pub pose: usize,
    pub node_count: usize,
    pub ligand_extent: f64,
    pub site_length: f64,
    pub fits_site: bool,
    pub empty_ligand: bool,
}

impl EnergyReport {
    fn empty(site: &ActiveSite) -> Self {
        let length = site_length(site);
        EnergyReport {
            pairings: Vec::new(),
            e_vdw_total: 0.0,
            e_elec_total: 0.0,
            clash_count: 0,
            far_count: 0,
            oversize_excess: 0.0,
            penalty_total: EMPTY_LIGAND_ENERGY,
            e_total: EMPTY_LIGAND_ENERGY,
            fitness: fitness(EMPTY_LIGAND_ENERGY),
            pose: 0,
            node_count: 0,
            ligand_extent: 0.0,
            site_length: length,
            fits_site: 0.0 < length,
            empty_ligand: true,
        }
    }

    /// Recomputes the total from the per-pair terms and penalty counts.
    pub fn resum(&self, config: &EnergyConfig) -> f64 {
        if self.empty_ligand {
            return EMPTY_LIGAND_ENERGY;
        }
        let pairs: f64 = self.pairings.iter().map(|p| p.e_vdw + p.e_elec).sum();
        pairs
            + self.clash_count as f64 * config.clash_penalty
            + self.far_count as f64 * config.far_penalty
            + self.oversize_excess * config.oversize_penalty
    }
}

/// Report-only fitness: reciprocal of a positive total energy.
pub fn fitness(e_total: f64) -> Option<f64> {
    (e_total > 0.0).then(|| 1.0 / e_total)
}

/// Energy of one placed ligand.
pub fn total_energy(
    placed: &PlacedLigand,
    site: &ActiveSite,
    catalog: &GroupCatalog,
    config: &EnergyConfig,
) -> Result<EnergyReport, EnergyError> {
    let pairs = pair_residues(placed, site)?;
    let mut pairings = Vec::with_capacity(pairs.len());
    let (mut e_vdw_total, mut e_elec_total) = (0.0, 0.0);
    let (mut clash_count, mut far_count) = (0, 0);

    for (ri, node, distance) in pairs {
        let residue = &site.residues[ri];
        let group = catalog.group(placed.tree.nodes[node].group);
        let status = if distance < config.r_min - EDGE_TOLERANCE {
            PairStatus::Clash
        } else if distance > config.r_max + EDGE_TOLERANCE {
            PairStatus::Far
        } else {
            PairStatus::Window
        };
        let (mut e_vdw, mut e_elec) = (0.0, 0.0);
        match status {
            PairStatus::Window => {
                let params = PairParams::combine(
                    group.vdw_a,
                    group.vdw_b,
                    config.residue_vdw_a,
                    config.residue_vdw_b,
                );
                e_vdw = lj_energy(params, distance)?;
                if group.charge != 0.0 && residue.charge != 0.0 {
                    e_elec = coulomb_energy(group.charge, residue.charge, distance, config)?;
                }
            }
            PairStatus::Clash => clash_count += 1,
            PairStatus::Far => far_count += 1,
        }
        e_vdw_total += e_vdw;
        e_elec_total += e_elec;
        pairings.push(Pairing {
            residue_id: residue.id.clone(),
            node,
            distance,
            e_vdw,
            e_elec,
            status,
        });
    }

    let length = site_length(site);
    let fits_site = placed.extent < length - EDGE_TOLERANCE;
    let oversize_excess = if !fits_site {
        placed.extent - length + 1.0
    } else {
        0.0
    };
    let penalty_total = clash_count as f64 * config.clash_penalty
        + far_count as f64 * config.far_penalty
        + oversize_excess * config.oversize_penalty;
    let e_total = e_vdw_total + e_elec_total + penalty_total;

    Ok(EnergyReport {
        pairings,
        e_vdw_total,
        e_elec_total,
        clash_count,
        far_count,
        oversize_excess,
        penalty_total,
        e_total,
        fitness: fitness(e_total),
        pose: placed.pose,
        node_count: placed.tree.len(),
        ligand_extent: placed.extent,
        site_length: length,
        fits_site,
        empty_ligand: false,
    })
}

/// Evaluates a tree at every pose and keeps the lowest total (first pose on ties).
pub fn best_over_poses(
    tree: &LigandTree,
    site: &ActiveSite,
    catalog: &GroupCatalog,
    config: &EnergyConfig,
) -> EnergyReport {
    best_over_poses_with_placement(tree, site, catalog, config).0
}

/// As [`best_over_poses`], also returning the winning placement.
pub fn best_over_poses_with_placement(
    tree: &LigandTree,
    site: &ActiveSite,
    catalog: &GroupCatalog,
    config: &EnergyConfig,
) -> (EnergyReport, Option<PlacedLigand>) {
    if tree.is_empty() {
        return (EnergyReport::empty(site), None);
    }
    let mut best: Option<(EnergyReport, PlacedLigand)> = None;
    for pose in 0..site.poses.len() {
        let placed = embed(tree, site, pose, catalog).expect("non-empty tree, valid pose");
        let report = total_energy(&placed, site, catalog, config).expect("non-empty ligand");
        if best.as_ref().is_none_or(|(b, _)| report.e_total < b.e_total) {
            best = Some((report, placed));
        }
    }
    let (report, placed) = best.expect("site has at least one pose");
    (report, Some(placed))
}

impl fmt::Display for EnergyReport {
    /// `key=value` lines in key order; pairings as `pairing[i]=...` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "clash_count={}", self.clash_count);
        let _ = writeln!(out, "e_elec_total={}", self.e_elec_total);
        let _ = writeln!(out, "e_total={}", self.e_total);
        let _ = writeln!(out, "e_vdw_total={}", self.e_vdw_total);
        let _ = writeln!(out, "empty_ligand={}", self.empty_ligand);
        let _ = writeln!(out, "far_count={}", self.far_count);
        let _ = writeln!(out, "fits_site={}", self.fits_site);
        match self.fitness {
            Some(v) => {
                let _ = writeln!(out, "fitness={v}");
            }
            None => {
                let _ = writeln!(out, "fitness=undefined");
            }
        }
        let _ = writeln!(out, "fitness_defined={}", self.fitness.is_some());
        let _ = writeln!(out, "ligand_extent={}", self.ligand_extent);
        let _ = writeln!(out, "node_count={}", self.node_count);
        let _ = writeln!(out, "oversize_excess={}", self.oversize_excess);
        for (i, p) in self.pairings.iter().enumerate() {
            let _ = writeln!(
                out,
                "pairing[{i}]=residue={};node={};distance={};e_vdw={};e_elec={};status={}",
                p.residue_id, p.node, p.distance, p.e_vdw, p.e_elec, p.status
            );
        }
        let _ = writeln!(out, "penalty_total={}", self.penalty_total);
        let _ = writeln!(out, "pose={}", self.pose);
        let _ = writeln!(out, "site_length={}", self.site_length);
        f.write_str(&out)
    }
}
