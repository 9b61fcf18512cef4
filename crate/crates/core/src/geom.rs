//! Small planar geometry helpers shared by the rasterizers.

pub(crate) type P2 = [f64; 2];

fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull (Andrew monotone chain), counter-clockwise without
/// repetition. Collinear inputs collapse to a segment, coincident
/// points to a single point.
pub(crate) fn convex_hull(points: &[P2]) -> Vec<P2> {
    let mut pts: Vec<P2> = points.to_vec();
    pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<P2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        // all collinear: keep the extreme segment
        return vec![pts[0], pts[pts.len() - 1]];
    }
    lower
}

/// Point in a CCW convex polygon, boundary inclusive. Hulls with fewer
/// than 3 vertices have empty interior.
pub(crate) fn point_in_convex(hull: &[P2], p: P2) -> bool {
    if hull.len() < 3 {
        return false;
    }
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        if cross(a, b, p) < 0.0 {
            return false;
        }
    }
    true
}

pub(crate) fn bbox(points: &[P2]) -> (P2, P2) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Axis-aligned raster over a rectangle; cells are addressed by
/// `(ix, iy)` with centers at half-integer offsets.
#[derive(Debug, Clone)]
pub struct RasterGrid {
    pub x0: f64,
    pub y0: f64,
    pub nx: usize,
    pub ny: usize,
    pub cell_w: f64,
    pub cell_h: f64,
}

impl RasterGrid {
    pub fn new(lo: P2, hi: P2, nx: usize, ny: usize) -> RasterGrid {
        RasterGrid {
            x0: lo[0],
            y0: lo[1],
            nx,
            ny,
            cell_w: (hi[0] - lo[0]) / nx as f64,
            cell_h: (hi[1] - lo[1]) / ny as f64,
        }
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_w * self.cell_h
    }

    pub fn cell_diagonal(&self) -> f64 {
        (self.cell_w * self.cell_w + self.cell_h * self.cell_h).sqrt()
    }

    pub fn center(&self, ix: usize, iy: usize) -> P2 {
        [
            self.x0 + (ix as f64 + 0.5) * self.cell_w,
            self.y0 + (iy as f64 + 0.5) * self.cell_h,
        ]
    }

    pub fn cell_of(&self, p: P2) -> (usize, usize) {
        let ix = (((p[0] - self.x0) / self.cell_w).floor() as isize).clamp(0, self.nx as isize - 1);
        let iy = (((p[1] - self.y0) / self.cell_h).floor() as isize).clamp(0, self.ny as isize - 1);
        (ix as usize, iy as usize)
    }

    /// Index range of cells whose centers may fall inside the box.
    pub fn cell_range(&self, lo: P2, hi: P2) -> (usize, usize, usize, usize) {
        let ix0 = (((lo[0] - self.x0) / self.cell_w - 0.5).floor().max(0.0)) as usize;
        let iy0 = (((lo[1] - self.y0) / self.cell_h - 0.5).floor().max(0.0)) as usize;
        let ix1 = ((((hi[0] - self.x0) / self.cell_w) + 0.5).ceil() as usize).min(self.nx);
        let iy1 = ((((hi[1] - self.y0) / self.cell_h) + 0.5).ceil() as usize).min(self.ny);
        (ix0, ix1, iy0, iy1)
    }
}

/// Mark every hull onto the grid: count stores how many hulls contain
/// each cell center. A hull that catches no center (smaller than a cell,
/// or degenerate down to a segment or point) instead stamps the cells
/// its boundary passes through, so thin images stay visible.
pub(crate) fn stamp_hull(grid: &RasterGrid, hull: &[P2], count: &mut [u32], thin: &mut [bool]) {
    if hull.is_empty() {
        return;
    }
    let (lo, hi) = bbox(hull);
    let (ix0, ix1, iy0, iy1) = grid.cell_range(lo, hi);
    let mut caught = false;
    if hull.len() >= 3 {
        for iy in iy0..iy1 {
            for ix in ix0..ix1 {
                if point_in_convex(hull, grid.center(ix, iy)) {
                    count[iy * grid.nx + ix] += 1;
                    caught = true;
                }
            }
        }
    }
    if !caught {
        let step = 0.5 * grid.cell_w.min(grid.cell_h);
        let mut mark = |p: P2| {
            let (ix, iy) = grid.cell_of(p);
            thin[iy * grid.nx + ix] = true;
        };
        if hull.len() == 1 {
            mark(hull[0]);
            return;
        }
        for i in 0..hull.len() {
            let a = hull[i];
            let b = hull[(i + 1) % hull.len()];
            if hull.len() == 2 && i == 1 {
                break;
            }
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            let n = (len / step).ceil() as usize + 1;
            for k in 0..=n {
                let t = k as f64 / n as f64;
                mark([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square() {
        let h = convex_hull(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(h.len(), 4);
        assert!(point_in_convex(&h, [0.5, 0.5]));
        assert!(point_in_convex(&h, [0.0, 0.5]), "boundary inclusive");
        assert!(!point_in_convex(&h, [1.2, 0.5]));
    }

    #[test]
    fn hull_degenerates() {
        let seg = convex_hull(&[[0.0, 0.0], [1.0, 1.0], [0.5, 0.5], [0.25, 0.25]]);
        assert_eq!(seg.len(), 2);
        let pt = convex_hull(&[[0.3, 0.3]; 4]);
        assert_eq!(pt.len(), 1);
        assert!(!point_in_convex(&seg, [0.5, 0.5]), "no interior");
    }

    #[test]
    fn stamping_a_thin_segment_marks_a_chain() {
        let grid = RasterGrid::new([0.0, 0.0], [1.0, 1.0], 16, 16);
        let mut count = vec![0u32; 256];
        let mut thin = vec![false; 256];
        stamp_hull(&grid, &[[0.1, 0.1], [0.9, 0.9]], &mut count, &mut thin);
        assert!(count.iter().all(|&c| c == 0));
        let marked = thin.iter().filter(|&&b| b).count();
        assert!(marked >= 12, "diagonal chain, got {marked}");
        // all marked cells sit on the diagonal band
        for iy in 0..16 {
            for ix in 0..16 {
                if thin[iy * 16 + ix] {
                    assert!((ix as isize - iy as isize).abs() <= 1);
                }
            }
        }
    }
}
