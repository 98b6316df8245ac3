//! Turning a per-subregion radius into an explicit fleet of positions.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::csv::fmt_f64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn horizontal_distance(&self, other: &Point3) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle with lower-left corner `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub const fn new(x: f64, y: f64, width: f64, height: f64) -> Self {
        Rect { x, y, width, height }
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + 0.5 * self.width, self.y + 0.5 * self.height)
    }

    pub fn contains(&self, px: f64, py: f64) -> bool {
        px >= self.x && px <= self.x + self.width && py >= self.y && py <= self.y + self.height
    }

    /// True when the interiors intersect; shared edges do not count.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x < other.x + other.width
            && other.x < self.x + self.width
            && self.y < other.y + other.height
            && other.y < self.y + self.height
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.x + other.width <= self.x + self.width
            && other.y + other.height <= self.y + self.height
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.y.is_finite()) {
            return Err(Error::invalid("rectangle", "origin must be finite"));
        }
        if !(self.width > 0.0 && self.height > 0.0 && self.width.is_finite() && self.height.is_finite()) {
            return Err(Error::invalid(
                "rectangle",
                format!("width {} and height {} must be positive", self.width, self.height),
            ));
        }
        Ok(())
    }
}

/// Number of disks of `radius` needed for `area`: `ceil(S / (pi R^2))`, at least one.
pub fn num_uavs(area: f64, radius: f64) -> usize {
    if !(radius > 0.0) || radius.is_infinite() {
        return 1;
    }
    let n = (area / (PI * radius * radius)).ceil();
    if n.is_finite() {
        (n as usize).max(1)
    } else {
        1
    }
}

/// How points are distributed over rows: `rows` rows, `count % rows` of
/// them (spread evenly) getting one extra point.
fn row_split(count: usize, rows: usize) -> Vec<usize> {
    let base = count / rows;
    let extra = count % rows;
    let mut split = vec![base; rows];
    for i in 0..extra {
        let idx = ((2 * i + 1) * rows) / (2 * extra);
        split[idx.min(rows - 1)] += 1;
    }
    split
}

/// Worst distance from a point of its cell to the cell center, when
/// `count` points fill `rows` rows of equal-area cells.
fn grid_cover_radius(width: f64, height: f64, count: usize, rows: usize) -> f64 {
    let base = count / rows;
    let cell = |c: usize| 0.5 * (width / c as f64).hypot(height * c as f64 / count as f64);
    let mut worst = if !count.is_multiple_of(rows) { cell(base + 1) } else { 0.0 };
    if base > 0 {
        worst = worst.max(cell(base));
    }
    worst
}

fn best_rows(width: f64, height: f64, count: usize) -> (usize, f64) {
    (1..=count)
        .map(|m| (m, grid_cover_radius(width, height, count, m)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((1, f64::INFINITY))
}

/// Deterministic positions for `count` UAVs over `rect`, all at `altitude`.
///
/// Points sit at the centers of equal-area cells arranged in rows, with
/// neighbouring rows staggered whenever their counts differ. The row count
/// and the row direction (along the width or the height) are chosen to
/// minimize the worst distance from a rectangle point to its cell center.
/// `radius` is accepted for interface symmetry; the grid adapts to the
/// rectangle rather than to a fixed lattice pitch.
pub fn layout_positions(rect: &Rect, count: usize, _radius: f64, altitude: f64) -> Vec<Point3> {
    if count == 0 {
        return Vec::new();
    }
    let (rows_h, cover_h) = best_rows(rect.width, rect.height, count);
    let (rows_v, cover_v) = best_rows(rect.height, rect.width, count);
    let transpose = cover_v < cover_h;
    let (along, across, rows) = if transpose {
        (rect.height, rect.width, rows_v)
    } else {
        (rect.width, rect.height, rows_h)
    };
    let mut out = Vec::with_capacity(count);
    let mut offset = 0.0;
    for in_row in row_split(count, rows) {
        let depth = across * in_row as f64 / count as f64;
        let v = offset + 0.5 * depth;
        offset += depth;
        let cell = along / in_row as f64;
        for col in 0..in_row {
            let u = (col as f64 + 0.5) * cell;
            let (dx, dy) = if transpose { (v, u) } else { (u, v) };
            out.push(Point3::new(rect.x + dx, rect.y + dy, altitude));
        }
    }
    out
}

/// Number of UAVs that move between two deployments.
pub fn reposition_count(n_before: usize, n_after: usize) -> usize {
    n_before.max(n_after)
}

/// Extends the shorter position list with copies of the depot so both lists
/// have the same length.
pub fn pad_with_rsc(before: &[Point3], after: &[Point3], rsc: Point3) -> (Vec<Point3>, Vec<Point3>) {
    let n = reposition_count(before.len(), after.len());
    let pad = |v: &[Point3]| {
        let mut v = v.to_vec();
        v.resize(n, rsc);
        v
    };
    (pad(before), pad(after))
}

/// Placement of one subregion's fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct SubregionDeployment {
    pub label: String,
    pub radius: f64,
    pub altitude: f64,
    pub positions: Vec<Point3>,
}

impl SubregionDeployment {
    pub fn new(label: impl Into<String>, rect: &Rect, radius: f64, altitude: f64) -> Self {
        let count = num_uavs(rect.area(), radius);
        SubregionDeployment {
            label: label.into(),
            radius,
            altitude,
            positions: layout_positions(rect, count, radius, altitude),
        }
    }

    pub fn count(&self) -> usize {
        self.positions.len()
    }
}

/// Full fleet placement across subregions, with the depot location.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub subregions: Vec<SubregionDeployment>,
    pub rsc: Point3,
}

impl Deployment {
    pub fn total_count(&self) -> usize {
        self.subregions.iter().map(SubregionDeployment::count).sum()
    }

    /// All positions in subregion order.
    pub fn positions(&self) -> Vec<Point3> {
        self.subregions.iter().flat_map(|s| s.positions.iter().copied()).collect()
    }

    pub const CSV_HEADER: &'static str = "subregion,x,y,z,radius";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for sub in &self.subregions {
            for p in &sub.positions {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    sub.label,
                    fmt_f64(p.x),
                    fmt_f64(p.y),
                    fmt_f64(p.z),
                    fmt_f64(sub.radius)
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn counts() {
        let r = 50.0;
        assert_eq!(num_uavs(PI * r * r, r), 1);
        assert_eq!(num_uavs(1e6, 327.3), 3);
        assert_eq!(num_uavs(1e6, 1e12), 1);
        assert_eq!(num_uavs(1e6, f64::INFINITY), 1);
    }

    #[test]
    fn single_point_at_center() {
        let rect = Rect::new(10.0, 20.0, 300.0, 100.0);
        assert_eq!(layout_positions(&rect, 1, 5.0, 7.0), vec![Point3::new(160.0, 70.0, 7.0)]);
    }

    #[test]
    fn four_points_in_square_are_point_symmetric() {
        let rect = Rect::new(0.0, 0.0, 100.0, 100.0);
        let pts = layout_positions(&rect, 4, 40.0, 3.0);
        assert_eq!(pts.len(), 4);
        for p in &pts {
            let mirrored = (100.0 - p.x, 100.0 - p.y);
            assert!(pts.iter().any(|q| (q.x - mirrored.0).abs() < 1e-12 && (q.y - mirrored.1).abs() < 1e-12));
        }
        let mut xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![25.0, 25.0, 75.0, 75.0]);
    }

    #[test]
    fn deterministic_layout() {
        let rect = Rect::new(0.0, 0.0, 1000.0, 500.0);
        let a = layout_positions(&rect, 17, 100.0, 90.0);
        let b = layout_positions(&rect, 17, 100.0, 90.0);
        assert_eq!(
            a.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect::<Vec<_>>(),
            b.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect::<Vec<_>>()
        );
    }

    fn worst_gap(rect: &Rect, pts: &[Point3]) -> f64 {
        let steps = 120;
        let mut worst: f64 = 0.0;
        for i in 0..=steps {
            for j in 0..=steps {
                let x = rect.x + rect.width * i as f64 / steps as f64;
                let y = rect.y + rect.height * j as f64 / steps as f64;
                let d = pts.iter().map(|p| (p.x - x).hypot(p.y - y)).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        worst
    }

    #[test]
    fn single_disk_needs_more_than_its_radius() {
        // A square of area pi R^2 has half-diagonal sqrt(pi/2) R: no single
        // point can cover it within R, which bounds what any layout achieves.
        let r = 10.0;
        let side = PI.sqrt() * r;
        let rect = Rect::new(0.0, 0.0, side, side);
        let pts = layout_positions(&rect, num_uavs(rect.area(), r), r, 0.0);
        let gap = worst_gap(&rect, &pts);
        assert!((gap / r - (PI / 2.0).sqrt()).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn positions_inside_and_counted(w in 10.0..2000.0f64, h in 10.0..2000.0f64, n in 1usize..60, z in 0.0..500.0f64) {
            let rect = Rect::new(-5.0, 7.0, w, h);
            let pts = layout_positions(&rect, n, 1.0, z);
            prop_assert_eq!(pts.len(), n);
            for p in &pts {
                prop_assert!(rect.contains(p.x, p.y));
                prop_assert_eq!(p.z, z);
            }
        }

        #[test]
        fn large_fleets_cover_rectangle(w in 200.0..2000.0f64, h in 200.0..2000.0f64, r in 20.0..60.0f64) {
            let rect = Rect::new(0.0, 0.0, w, h);
            let n = num_uavs(rect.area(), r);
            prop_assume!((30..=600).contains(&n));
            let pts = layout_positions(&rect, n, r, 0.0);
            prop_assert!(worst_gap(&rect, &pts) <= 1.3 * r);
        }

        #[test]
        fn count_non_increasing_in_radius(area in 1.0..1e8f64, r in 0.1..1e4f64, k in 1.0..10.0f64) {
            prop_assert!(num_uavs(area, r * k) <= num_uavs(area, r));
        }

        #[test]
        fn padding_equalizes(a in 0usize..12, b in 0usize..12) {
            let p = |n| vec![Point3::new(1.0, 2.0, 3.0); n];
            let rsc = Point3::new(0.0, 0.0, 0.0);
            let (x, y) = pad_with_rsc(&p(a), &p(b), rsc);
            prop_assert_eq!(x.len(), reposition_count(a, b));
            prop_assert_eq!(y.len(), x.len());
            let padded = if a < b { &x[a..] } else { &y[b..] };
            prop_assert!(padded.iter().all(|q| *q == rsc));
        }
    }

    #[test]
    fn reposition_examples() {
        assert_eq!(reposition_count(3, 5), 5);
        assert_eq!(reposition_count(5, 3), 5);
        assert_eq!(reposition_count(4, 4), 4);
    }

    #[test]
    fn csv_rows_match_count() {
        let rect = Rect::new(0.0, 0.0, 500.0, 1000.0);
        let dep = Deployment {
            subregions: vec![SubregionDeployment::new("E", &rect, 200.0, 180.0)],
            rsc: Point3::new(500.0, 500.0, 0.0),
        };
        let csv = dep.to_csv();
        assert_eq!(csv.lines().count(), 1 + dep.total_count());
        assert!(csv.starts_with("subregion,x,y,z,radius\n"));
    }
}
