//! Active-site descriptions.
//!
//! A site is a pocket axis (entrance to end), one or more ligand poses and a
//! set of residues that the ligand interacts with. File format:
//!
//! ```text
//! site;<name>
//! axis;x1;y1;x2;y2
//! pose;ax;ay;dir          (dir is +1 or -1, growth direction along the axis)
//! residue;<id>;x;y;charge;polarity
//! ```
//!
//! `polarity` is one of `polar+`, `polar-` or `nonpolar` and must agree with
//! the sign of `charge`. Coordinates are in Å.

use std::fmt;

use thiserror::Error;

use crate::geometry::Point;

/// Pose anchors must lie inside the residue bounding box grown by this much.
pub const POSE_MARGIN: f64 = 3.0;

#[derive(Debug, Error, PartialEq)]
pub enum SiteError {
    #[error("line {line}: expected 'site;<name>' header")]
    BadHeader { line: usize },
    #[error("line {line}: expected 'axis;x1;y1;x2;y2'")]
    BadAxisLine { line: usize },
    #[error("line {line}: bad pose line: {reason}")]
    BadPoseLine { line: usize, reason: String },
    #[error("line {line}: bad residue line: {reason}")]
    BadResidueLine { line: usize, reason: String },
    #[error("line {line}: residue '{id}' polarity does not match its charge")]
    PolarityChargeMismatch { line: usize, id: String },
    #[error("line {line}: unknown record '{record}'")]
    UnknownRecord { line: usize, record: String },
    #[error("axis endpoints coincide")]
    DegenerateAxis,
    #[error("site has no residues")]
    NoResidues,
    #[error("site has no poses")]
    NoPoses,
    #[error("pose {pose} anchor lies outside the pocket region")]
    PoseOutsidePocket { pose: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    PolarPositive,
    PolarNegative,
    Nonpolar,
}

impl Polarity {
    pub fn of_charge(charge: f64) -> Polarity {
        if charge > 0.0 {
            Polarity::PolarPositive
        } else if charge < 0.0 {
            Polarity::PolarNegative
        } else {
            Polarity::Nonpolar
        }
    }

    fn parse(token: &str) -> Option<Polarity> {
        match token {
            "polar+" => Some(Polarity::PolarPositive),
            "polar-" | "polar\u{2212}" => Some(Polarity::PolarNegative),
            "nonpolar" => Some(Polarity::Nonpolar),
            _ => None,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::PolarPositive => "polar+",
            Polarity::PolarNegative => "polar-",
            Polarity::Nonpolar => "nonpolar",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residue {
    pub id: String,
    pub position: Point,
    pub charge: f64,
    pub polarity: Polarity,
}

/// Where the ligand root sits and which way along the axis it grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub anchor: Point,
    /// `+1` grows from entrance towards the end of the axis, `-1` the other way.
    pub direction: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSite {
    pub name: String,
    pub axis: (Point, Point),
    pub poses: Vec<Pose>,
    pub residues: Vec<Residue>,
}

impl ActiveSite {
    /// Builds a site and checks every invariant that `parse_site` checks.
    pub fn new(
        name: impl Into<String>,
        axis: (Point, Point),
        poses: Vec<Pose>,
        residues: Vec<Residue>,
    ) -> Result<Self, SiteError> {
        let site = ActiveSite {
            name: name.into(),
            axis,
            poses,
            residues,
        };
        site.validate()?;
        Ok(site)
    }

    fn validate(&self) -> Result<(), SiteError> {
        if self.axis.0 == self.axis.1 {
            return Err(SiteError::DegenerateAxis);
        }
        if self.residues.is_empty() {
            return Err(SiteError::NoResidues);
        }
        if self.poses.is_empty() {
            return Err(SiteError::NoPoses);
        }
        let (lo, hi) = self.residue_bounds();
        for (i, pose) in self.poses.iter().enumerate() {
            let a = pose.anchor;
            let inside = a.x >= lo.x - POSE_MARGIN
                && a.x <= hi.x + POSE_MARGIN
                && a.y >= lo.y - POSE_MARGIN
                && a.y <= hi.y + POSE_MARGIN;
            if !inside {
                return Err(SiteError::PoseOutsidePocket { pose: i });
            }
        }
        Ok(())
    }

    /// Bounding box (min corner, max corner) of the residue positions.
    pub fn residue_bounds(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for r in &self.residues {
            lo.x = lo.x.min(r.position.x);
            lo.y = lo.y.min(r.position.y);
            hi.x = hi.x.max(r.position.x);
            hi.y = hi.y.max(r.position.y);
        }
        (lo, hi)
    }

    /// Unit vector from the axis entrance to its end.
    pub fn axis_direction(&self) -> Point {
        (self.axis.1 - self.axis.0).unit()
    }

    /// Unit growth direction for a pose.
    pub fn pose_direction(&self, pose: &Pose) -> Point {
        self.axis_direction() * f64::from(pose.direction)
    }

    /// Keeps only the first `n` poses (at least one).
    pub fn with_pose_limit(mut self, n: usize) -> Self {
        self.poses.truncate(n.max(1));
        self
    }
}

/// Pocket length: distance between the axis endpoints.
pub fn site_length(site: &ActiveSite) -> f64 {
    site.axis.0.distance(site.axis.1)
}

impl fmt::Display for ActiveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "site;{}", self.name)?;
        let (a, b) = self.axis;
        writeln!(f, "axis;{};{};{};{}", a.x, a.y, b.x, b.y)?;
        for p in &self.poses {
            let dir = if p.direction > 0 { "+1" } else { "-1" };
            writeln!(f, "pose;{};{};{}", p.anchor.x, p.anchor.y, dir)?;
        }
        for r in &self.residues {
            writeln!(
                f,
                "residue;{};{};{};{};{}",
                r.id, r.position.x, r.position.y, r.charge, r.polarity
            )?;
        }
        Ok(())
    }
}

fn reals(fields: &[&str]) -> Option<Vec<f64>> {
    fields.iter().map(|s| s.trim().parse::<f64>().ok()).collect()
}

/// Parses and validates a site file.
pub fn parse_site(text: &str) -> Result<ActiveSite, SiteError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines.next().ok_or(SiteError::BadHeader { line: 1 })?;
    let name = match header.split_once(';') {
        Some(("site", name)) if !name.trim().is_empty() => name.trim().to_string(),
        _ => return Err(SiteError::BadHeader { line }),
    };

    let (line, axis_text) = lines.next().ok_or(SiteError::BadAxisLine { line: line + 1 })?;
    let fields: Vec<&str> = axis_text.split(';').collect();
    if fields.len() != 5 || fields[0] != "axis" {
        return Err(SiteError::BadAxisLine { line });
    }
    let v = reals(&fields[1..]).ok_or(SiteError::BadAxisLine { line })?;
    let axis = (Point::new(v[0], v[1]), Point::new(v[2], v[3]));

    let mut poses = Vec::new();
    let mut residues = Vec::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split(';').map(str::trim).collect();
        match fields[0] {
            "pose" => poses.push(parse_pose(line, &fields)?),
            "residue" => residues.push(parse_residue(line, &fields)?),
            other => {
                return Err(SiteError::UnknownRecord {
                    line,
                    record: other.to_string(),
                })
            }
        }
    }
    ActiveSite::new(name, axis, poses, residues)
}

fn parse_pose(line: usize, fields: &[&str]) -> Result<Pose, SiteError> {
    let bad = |reason: &str| SiteError::BadPoseLine {
        line,
        reason: reason.to_string(),
    };
    if fields.len() != 4 {
        return Err(bad("expected 'pose;ax;ay;dir'"));
    }
    let v = reals(&fields[1..3]).ok_or_else(|| bad("anchor coordinates must be numbers"))?;
    let direction = match fields[3] {
        "+1" | "1" => 1,
        "-1" | "\u{2212}1" => -1,
        _ => return Err(bad("direction must be +1 or -1")),
    };
    Ok(Pose {
        anchor: Point::new(v[0], v[1]),
        direction,
    })
}

fn parse_residue(line: usize, fields: &[&str]) -> Result<Residue, SiteError> {
    let bad = |reason: &str| SiteError::BadResidueLine {
        line,
        reason: reason.to_string(),
    };
    if fields.len() != 6 {
        return Err(bad("expected 'residue;id;x;y;charge;polarity'"));
    }
    let id = fields[1].to_string();
    if id.is_empty() {
        return Err(bad("empty residue id"));
    }
    let v = reals(&fields[2..5]).ok_or_else(|| bad("coordinates and charge must be numbers"))?;
    let polarity = Polarity::parse(fields[5]).ok_or_else(|| bad("unknown polarity"))?;
    if Polarity::of_charge(v[2]) != polarity {
        return Err(SiteError::PolarityChargeMismatch { line, id });
    }
    Ok(Residue {
        id,
        position: Point::new(v[0], v[1]),
        charge: v[2],
        polarity,
    })
}
