//! SVG picture of a ligand placed in its active site.

use std::fmt::Write as _;

use crate::catalog::GroupCatalog;
use crate::geometry::Point;
use crate::site::{ActiveSite, Polarity};
use crate::tree::PlacedLigand;

const PX_PER_ANGSTROM: f64 = 40.0;
const MARGIN: f64 = 2.0;
const RESIDUE_RADIUS: f64 = 0.35;

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Canvas {
    min: Point,
    max_y: f64,
}

impl Canvas {
    fn px(&self, p: Point) -> (f64, f64) {
        (
            (p.x - self.min.x) * PX_PER_ANGSTROM,
            (self.max_y - p.y) * PX_PER_ANGSTROM,
        )
    }
}

/// Renders residues, the pocket axis and (optionally) a placed ligand.
/// Each ligand node is one `circle` with class `node`, each bond one `line`
/// with class `bond`.
pub fn render_svg(site: &ActiveSite, catalog: &GroupCatalog, ligand: Option<&PlacedLigand>) -> String {
    let mut lo = Point::new(site.axis.0.x.min(site.axis.1.x), site.axis.0.y.min(site.axis.1.y));
    let mut hi = Point::new(site.axis.0.x.max(site.axis.1.x), site.axis.0.y.max(site.axis.1.y));
    let mut grow = |p: Point, r: f64| {
        lo = Point::new(lo.x.min(p.x - r), lo.y.min(p.y - r));
        hi = Point::new(hi.x.max(p.x + r), hi.y.max(p.y + r));
    };
    for r in &site.residues {
        grow(r.position, RESIDUE_RADIUS);
    }
    if let Some(l) = ligand {
        for (node, &p) in l.tree.nodes.iter().zip(&l.positions) {
            grow(p, catalog.group(node.group).length / 2.0);
        }
    }
    let min = Point::new(lo.x - MARGIN, lo.y - MARGIN);
    let canvas = Canvas {
        min,
        max_y: hi.y + MARGIN,
    };
    let width = (hi.x + MARGIN - min.x) * PX_PER_ANGSTROM;
    let height = (hi.y + MARGIN - min.y) * PX_PER_ANGSTROM;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    let _ = writeln!(svg, "  <title>{}</title>", escape(&site.name));
    let _ = writeln!(svg, r##"  <rect width="100%" height="100%" fill="#ffffff"/>"##);

    let (x1, y1) = canvas.px(site.axis.0);
    let (x2, y2) = canvas.px(site.axis.1);
    let _ = writeln!(
        svg,
        r##"  <line class="axis" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#888888" stroke-width="2" stroke-dasharray="8 6"/>"##
    );

    for r in &site.residues {
        let (x, y) = canvas.px(r.position);
        let fill = match r.polarity {
            Polarity::PolarPositive => "#4a78c9",
            Polarity::PolarNegative => "#d0463c",
            Polarity::Nonpolar => "#b8b8b8",
        };
        let _ = writeln!(
            svg,
            r##"  <circle class="residue" cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{fill}" stroke="#333333"/>"##,
            RESIDUE_RADIUS * PX_PER_ANGSTROM
        );
        let _ = writeln!(
            svg,
            r#"  <text class="residue-label" x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            y - RESIDUE_RADIUS * PX_PER_ANGSTROM - 4.0,
            escape(&r.id)
        );
    }

    if let Some(l) = ligand {
        for (i, node) in l.tree.nodes.iter().enumerate() {
            if let Some(parent) = node.parent {
                let (x1, y1) = canvas.px(l.positions[parent]);
                let (x2, y2) = canvas.px(l.positions[i]);
                let _ = writeln!(
                    svg,
                    r##"  <line class="bond" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#222222" stroke-width="3"/>"##
                );
            }
        }
        for (node, &p) in l.tree.nodes.iter().zip(&l.positions) {
            let group = catalog.group(node.group);
            let (x, y) = canvas.px(p);
            let fill = if group.charge > 0.0 {
                "#9db8ea"
            } else if group.charge < 0.0 {
                "#eea39c"
            } else {
                "#e8e0b0"
            };
            let _ = writeln!(
                svg,
                r##"  <circle class="node" cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{fill}" fill-opacity="0.85" stroke="#222222"/>"##,
                group.length / 2.0 * PX_PER_ANGSTROM
            );
            let _ = writeln!(
                svg,
                r#"  <text class="node-label" x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
                y + 4.0,
                escape(&group.label)
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
