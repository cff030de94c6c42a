//! Uniform grids in volatility `x` and log-price `z = ln P`, the solution
//! fields living on them, finite-difference stencils and bilinear lookup.
//!
//! Convention for one-sided differences: convection enters as
//! `∂u/∂t = … + v ∂u/∂x`, so information arrives from the `+x` side when
//! `v > 0` and the upwind difference is the forward one.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Formats with 17 significant digits, the lossless width for `f64`.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_max: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter {
                name: "n_x",
                reason: format!("need at least 3 nodes, got {n}"),
            });
        }
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::InvalidParameter {
                name: "x_max",
                reason: format!("must be finite and > 0, got {x_max}"),
            });
        }
        Ok(Self { x_max, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn spacing(&self) -> f64 {
        self.x_max / (self.n - 1) as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_max
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

impl Default for Grid1D {
    fn default() -> Self {
        Self { x_max: 1.0, n: 101 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    x: Grid1D,
    z_min: f64,
    z_max: f64,
    n_z: usize,
}

impl Grid2D {
    pub fn new(x: Grid1D, z_min: f64, z_max: f64, n_z: usize) -> Result<Self> {
        if n_z < 3 {
            return Err(Error::InvalidParameter {
                name: "n_z",
                reason: format!("need at least 3 nodes, got {n_z}"),
            });
        }
        if !(z_min.is_finite() && z_max.is_finite() && z_min < z_max) {
            return Err(Error::InvalidParameter {
                name: "z_half_width",
                reason: format!("log-price window [{z_min}, {z_max}] is empty"),
            });
        }
        Ok(Self {
            x,
            z_min,
            z_max,
            n_z,
        })
    }

    /// Log-price window `ln(p_center) ± half_width`.
    pub fn centered(x: Grid1D, p_center: f64, half_width: f64, n_z: usize) -> Result<Self> {
        if !(p_center > 0.0 && p_center.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "p_obs",
                reason: format!("centre price must be > 0, got {p_center}"),
            });
        }
        if !(half_width > 0.0) {
            return Err(Error::InvalidParameter {
                name: "z_half_width",
                reason: format!("must be > 0, got {half_width}"),
            });
        }
        let c = p_center.ln();
        Self::new(x, c - half_width, c + half_width, n_z)
    }

    pub fn x(&self) -> &Grid1D {
        &self.x
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn nz(&self) -> usize {
        self.n_z
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn hx(&self) -> f64 {
        self.x.spacing()
    }

    pub fn hz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_z - 1) as f64
    }

    #[inline]
    pub fn z(&self, j: usize) -> f64 {
        if j + 1 == self.n_z {
            self.z_max
        } else {
            self.z_min + j as f64 * self.hz()
        }
    }

    pub fn z_nodes(&self) -> Vec<f64> {
        (0..self.n_z).map(|j| self.z(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.nx() * self.n_z
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_z + j
    }

    pub fn contains(&self, x: f64, z: f64) -> bool {
        (0.0..=self.x.x_max()).contains(&x) && (self.z_min..=self.z_max).contains(&z)
    }

    /// Projects a point onto the hull; the flag reports whether it moved.
    pub fn clamp(&self, x: f64, z: f64) -> (f64, f64, bool) {
        let cx = x.clamp(0.0, self.x.x_max());
        let cz = z.clamp(self.z_min, self.z_max);
        (cx, cz, cx != x || cz != z)
    }

    /// Bilinear weights for a point inside the hull.
    pub fn locate(&self, x: f64, z: f64) -> Result<Cell> {
        if !self.contains(x, z) {
            return Err(Error::OutsideHull { x, z });
        }
        let (i, wx) = cell_of(x / self.hx(), self.nx());
        let (j, wz) = cell_of((z - self.z_min) / self.hz(), self.n_z);
        Ok(Cell { i, j, wx, wz })
    }
}

fn cell_of(s: f64, n: usize) -> (usize, f64) {
    let i = (s.floor() as usize).min(n - 2);
    (i, (s - i as f64).clamp(0.0, 1.0))
}

/// Lower-left node of a grid cell and the fractional position inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
    pub wx: f64,
    pub wz: f64,
}

impl Cell {
    /// Weights of the corners `(i,j)`, `(i,j+1)`, `(i+1,j)`, `(i+1,j+1)`.
    pub fn weights(&self) -> [f64; 4] {
        let (wx, wz) = (self.wx, self.wz);
        [
            (1.0 - wx) * (1.0 - wz),
            (1.0 - wx) * wz,
            wx * (1.0 - wz),
            wx * wz,
        ]
    }
}

/// Finite-difference flavour for first derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Difference {
    Central,
    Forward,
    Backward,
}

impl Difference {
    /// Monotone one-sided choice for a `+v ∂u/∂x` transport term.
    pub fn upwind(velocity: f64) -> Self {
        if velocity > 0.0 {
            Difference::Forward
        } else {
            Difference::Backward
        }
    }
}

fn stencil_fits(i: usize, n: usize, d: Difference) -> bool {
    match d {
        Difference::Central => i > 0 && i + 1 < n,
        Difference::Forward => i + 1 < n,
        Difference::Backward => i > 0 && i < n,
    }
}

#[inline]
fn first_diff(lo: f64, mid: f64, hi: f64, h: f64, d: Difference) -> f64 {
    match d {
        Difference::Central => (hi - lo) / (2.0 * h),
        Difference::Forward => (hi - mid) / h,
        Difference::Backward => (mid - lo) / h,
    }
}

/// First derivative on a line of samples: central inside, second-order
/// one-sided at the two ends.
pub(crate) fn gradient_line(v: impl Fn(usize) -> f64, n: usize, h: f64, k: usize) -> f64 {
    if k == 0 {
        (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h)
    } else if k + 1 == n {
        (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / (2.0 * h)
    } else {
        (v(k + 1) - v(k - 1)) / (2.0 * h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    pub grid: Grid1D,
    /// Forward time `t = T - τ`.
    pub t: f64,
    pub values: Vec<f64>,
}

impl Field1D {
    pub fn from_fn(grid: Grid1D, t: f64, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self { grid, t, values }
    }

    pub fn zeros(grid: Grid1D, t: f64) -> Self {
        Self {
            grid,
            t,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Field1D) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field1D {
        Field1D {
            grid: self.grid,
            t: self.t,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check(&self, i: usize, interior: bool) -> Result<()> {
        let n = self.grid.len();
        let bad = if interior { i == 0 || i + 1 >= n } else { i >= n };
        if bad {
            return Err(Error::NodeOutOfRange {
                i,
                j: 0,
                nx: n,
                nz: 1,
            });
        }
        Ok(())
    }

    pub fn d_dx(&self, i: usize, d: Difference) -> Result<f64> {
        let n = self.grid.len();
        if !stencil_fits(i, n, d) {
            return Err(Error::NodeOutOfRange {
                i,
                j: 0,
                nx: n,
                nz: 1,
            });
        }
        let v = &self.values;
        let lo = if i > 0 { v[i - 1] } else { f64::NAN };
        let hi = if i + 1 < n { v[i + 1] } else { f64::NAN };
        Ok(first_diff(lo, v[i], hi, self.grid.spacing(), d))
    }

    pub fn d2_dx2(&self, i: usize) -> Result<f64> {
        self.check(i, true)?;
        let h = self.grid.spacing();
        let v = &self.values;
        Ok((v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h))
    }

    /// Linear interpolation in `x`.
    pub fn interpolate(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.grid.x_max()).contains(&x) {
            return Err(Error::OutsideHull { x, z: f64::NAN });
        }
        let (i, w) = cell_of(x / self.grid.spacing(), self.grid.len());
        Ok((1.0 - w) * self.values[i] + w * self.values[i + 1])
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# grid1d x_max={} n_x={}\n# t={}\n",
            fmt17(self.grid.x_max()),
            self.grid.len(),
            fmt17(self.t)
        );
        for v in &self.values {
            s.push_str(&fmt17(*v));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (header, t, rows) = split_field_csv(text)?;
        let kv = parse_header(header, "grid1d")?;
        let grid = Grid1D::new(kv.get("x_max")?, kv.get_usize("n_x")?)?;
        let values: Vec<f64> = rows
            .iter()
            .map(|r| parse_row(r))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .map(|r| match r.as_slice() {
                [v] => Ok(*v),
                _ => Err(Error::Format("1D field rows hold one value".into())),
            })
            .collect::<Result<_>>()?;
        if values.len() != grid.len() {
            return Err(Error::Format(format!(
                "expected {} rows, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, t, values })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid: Grid2D,
    pub t: f64,
    /// Row-major: `values[i * n_z + j]` at `(x_i, z_j)`.
    pub values: Vec<f64>,
}

impl Field2D {
    pub fn from_fn(grid: Grid2D, t: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx() {
            let x = grid.x().node(i);
            for j in 0..grid.nz() {
                values.push(f(x, grid.z(j)));
            }
        }
        Self { grid, t, values }
    }

    pub fn zeros(grid: Grid2D, t: f64) -> Self {
        Self {
            grid,
            t,
            values: vec![0.0; grid.len()],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check(&self, i: usize, j: usize, interior_x: bool, interior_z: bool) -> Result<()> {
        let (nx, nz) = (self.grid.nx(), self.grid.nz());
        let bad_x = if interior_x { i == 0 || i + 1 >= nx } else { i >= nx };
        let bad_z = if interior_z { j == 0 || j + 1 >= nz } else { j >= nz };
        if bad_x || bad_z {
            return Err(Error::NodeOutOfRange { i, j, nx, nz });
        }
        Ok(())
    }

    pub fn d_dx(&self, i: usize, j: usize, d: Difference) -> Result<f64> {
        let (nx, nz) = (self.grid.nx(), self.grid.nz());
        if !stencil_fits(i, nx, d) || j >= nz {
            return Err(Error::NodeOutOfRange { i, j, nx, nz });
        }
        let lo = if i > 0 { self.at(i - 1, j) } else { f64::NAN };
        let hi = if i + 1 < nx { self.at(i + 1, j) } else { f64::NAN };
        Ok(first_diff(lo, self.at(i, j), hi, self.grid.hx(), d))
    }

    pub fn d_dz(&self, i: usize, j: usize, d: Difference) -> Result<f64> {
        let (nx, nz) = (self.grid.nx(), self.grid.nz());
        if !stencil_fits(j, nz, d) || i >= nx {
            return Err(Error::NodeOutOfRange { i, j, nx, nz });
        }
        let lo = if j > 0 { self.at(i, j - 1) } else { f64::NAN };
        let hi = if j + 1 < nz { self.at(i, j + 1) } else { f64::NAN };
        Ok(first_diff(lo, self.at(i, j), hi, self.grid.hz(), d))
    }

    pub fn d2_dx2(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i, j, true, false)?;
        let h = self.grid.hx();
        Ok((self.at(i + 1, j) - 2.0 * self.at(i, j) + self.at(i - 1, j)) / (h * h))
    }

    pub fn d2_dz2(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i, j, false, true)?;
        let h = self.grid.hz();
        Ok((self.at(i, j + 1) - 2.0 * self.at(i, j) + self.at(i, j - 1)) / (h * h))
    }

    /// Four-corner mixed difference.
    pub fn d2_dxdz(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i, j, true, true)?;
        Ok(cross_diff(self, i, j))
    }

    /// Derivative in `x` at any node: central inside, second-order one-sided on the edges.
    pub fn gradient_x(&self, i: usize, j: usize) -> f64 {
        gradient_line(|k| self.at(k, j), self.grid.nx(), self.grid.hx(), i)
    }

    /// Derivative in `z` at any node: central inside, second-order one-sided on the edges.
    pub fn gradient_z(&self, i: usize, j: usize) -> f64 {
        gradient_line(|k| self.at(i, k), self.grid.nz(), self.grid.hz(), j)
    }

    pub fn interpolate(&self, x: f64, z: f64) -> Result<f64> {
        let cell = self.grid.locate(x, z)?;
        Ok(self.interpolate_cell(&cell))
    }

    #[inline]
    pub fn interpolate_cell(&self, cell: &Cell) -> f64 {
        let w = cell.weights();
        let (i, j) = (cell.i, cell.j);
        w[0] * self.at(i, j) + w[1] * self.at(i, j + 1) + w[2] * self.at(i + 1, j) + w[3] * self.at(i + 1, j + 1)
    }

    /// Values along the `x` column at node `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.grid.nx()).map(|i| self.at(i, j)).collect()
    }

    pub fn to_csv(&self) -> String {
        let g = &self.grid;
        let mut s = format!(
            "# grid2d x_max={} n_x={} z_min={} z_max={} n_z={}\n# t={}\n",
            fmt17(g.x().x_max()),
            g.nx(),
            fmt17(g.z_min()),
            fmt17(g.z_max()),
            g.nz(),
            fmt17(self.t)
        );
        for i in 0..g.nx() {
            for j in 0..g.nz() {
                if j > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{}", fmt17(self.at(i, j)));
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (header, t, rows) = split_field_csv(text)?;
        let kv = parse_header(header, "grid2d")?;
        let x = Grid1D::new(kv.get("x_max")?, kv.get_usize("n_x")?)?;
        let grid = Grid2D::new(x, kv.get("z_min")?, kv.get("z_max")?, kv.get_usize("n_z")?)?;
        if rows.len() != grid.nx() {
            return Err(Error::Format(format!(
                "expected {} rows, got {}",
                grid.nx(),
                rows.len()
            )));
        }
        let mut values = Vec::with_capacity(grid.len());
        for r in rows {
            let row = parse_row(r)?;
            if row.len() != grid.nz() {
                return Err(Error::Format(format!(
                    "expected {} columns, got {}",
                    grid.nz(),
                    row.len()
                )));
            }
            values.extend(row);
        }
        Ok(Self { grid, t, values })
    }
}

#[inline]
pub(crate) fn cross_diff(f: &Field2D, i: usize, j: usize) -> f64 {
    (f.at(i + 1, j + 1) - f.at(i + 1, j - 1) - f.at(i - 1, j + 1) + f.at(i - 1, j - 1))
        / (4.0 * f.grid.hx() * f.grid.hz())
}

/// Skips leading provenance comments (e.g. `# config_hash=…`) and returns the
/// grid descriptor, the time stamp and the data rows.
fn split_field_csv(text: &str) -> Result<(&str, f64, Vec<&str>)> {
    let mut lines = text.lines().skip_while(|l| {
        l.starts_with('#') && !l.starts_with("# grid1d") && !l.starts_with("# grid2d")
    });
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("missing grid descriptor".into()))?;
    let t_line = lines
        .next()
        .ok_or_else(|| Error::Format("missing time stamp".into()))?;
    let t = t_line
        .strip_prefix("# t=")
        .ok_or_else(|| Error::Format(format!("bad time stamp line `{t_line}`")))?
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Format(format!("bad time stamp: {e}")))?;
    Ok((header, t, lines.filter(|l| !l.trim().is_empty()).collect()))
}

struct Header<'a>(Vec<(&'a str, &'a str)>);

impl Header<'_> {
    fn raw(&self, key: &str) -> Result<&str> {
        self.0
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Format(format!("grid descriptor lacks `{key}`")))
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.raw(key)?
            .parse()
            .map_err(|e| Error::Format(format!("`{key}`: {e}")))
    }

    fn get_usize(&self, key: &str) -> Result<usize> {
        self.raw(key)?
            .parse()
            .map_err(|e| Error::Format(format!("`{key}`: {e}")))
    }
}

fn parse_header<'a>(line: &'a str, kind: &str) -> Result<Header<'a>> {
    let rest = line
        .strip_prefix("# ")
        .and_then(|l| l.strip_prefix(kind))
        .ok_or_else(|| Error::Format(format!("expected a `# {kind}` descriptor, got `{line}`")))?;
    let pairs = rest
        .split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .ok_or_else(|| Error::Format(format!("bad descriptor entry `{kv}`")))
        })
        .collect::<Result<_>>()?;
    Ok(Header(pairs))
}

fn parse_row(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad number `{c}`: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid2() -> Grid2D {
        Grid2D::new(Grid1D::new(1.0, 11).unwrap(), -1.0, 1.0, 9).unwrap()
    }

    #[test]
    fn grid_nodes() {
        let g = Grid1D::new(1.0, 101).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(100), 1.0);
        assert!((g.spacing() - 0.01).abs() < 1e-16);
        assert!(Grid1D::new(1.0, 2).is_err());
    }

    #[test]
    fn stencils_are_exact_on_low_order_polynomials() {
        let g = grid2();
        let lin = Field2D::from_fn(g, 0.0, |x, _| 2.0 * x);
        let quad = Field2D::from_fn(g, 0.0, |x, z| x * x + z * z);
        let prod = Field2D::from_fn(g, 0.0, |x, z| x * z);
        for i in 1..g.nx() - 1 {
            for j in 1..g.nz() - 1 {
                for d in [Difference::Central, Difference::Forward, Difference::Backward] {
                    assert!((lin.d_dx(i, j, d).unwrap() - 2.0).abs() < 1e-12);
                }
                assert!((quad.d2_dx2(i, j).unwrap() - 2.0).abs() < 1e-10);
                assert!((quad.d2_dz2(i, j).unwrap() - 2.0).abs() < 1e-10);
                assert!((prod.d2_dxdz(i, j).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        let f1 = Field1D::from_fn(*g.x(), 0.0, |x| x * x);
        assert!((f1.d2_dx2(5).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn stencils_reject_boundary_nodes() {
        let g = grid2();
        let f = Field2D::zeros(g, 0.0);
        assert!(f.d2_dx2(0, 3).is_err());
        assert!(f.d2_dxdz(3, g.nz() - 1).is_err());
        assert!(f.d_dx(g.nx() - 1, 2, Difference::Forward).is_err());
        assert!(f.d_dx(0, 2, Difference::Backward).is_err());
        assert!(f.d_dx(0, 2, Difference::Forward).is_ok());
        assert!(f.d_dz(20, 0, Difference::Forward).is_err());
        let f1 = Field1D::zeros(*g.x(), 0.0);
        assert!(f1.d_dx(0, Difference::Central).is_err());
    }

    #[test]
    fn upwind_picks_the_incoming_side() {
        let g = Grid1D::new(1.0, 11).unwrap();
        // Kink at node 5: slope 1 on the left, slope 3 on the right.
        let f = Field1D::from_fn(g, 0.0, |x| if x <= 0.5 { x } else { 0.5 + 3.0 * (x - 0.5) });
        assert!((f.d_dx(5, Difference::upwind(1.0)).unwrap() - 3.0).abs() < 1e-12);
        assert!((f.d_dx(5, Difference::upwind(-1.0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_examples() {
        let g = grid2();
        let f = Field2D::from_fn(g, 0.0, |x, z| 1.0 + 2.0 * x - z + 3.0 * x * z);
        assert_eq!(f.interpolate(0.3, g.z(4)).unwrap(), f.at(3, 4));
        for (x, z) in [(0.05, 0.1), (0.99, -0.97), (1.0, 1.0), (0.0, -1.0)] {
            let exact = 1.0 + 2.0 * x - z + 3.0 * x * z;
            assert!((f.interpolate(x, z).unwrap() - exact).abs() < 1e-12);
        }
        let mut step = Field2D::zeros(g, 0.0);
        step.values[g.index(2, 4)] = 0.0;
        step.values[g.index(3, 4)] = 0.0;
        step.values[g.index(2, 5)] = 1.0;
        step.values[g.index(3, 5)] = 1.0;
        let zm = 0.5 * (g.z(4) + g.z(5));
        assert!((step.interpolate(0.25, zm).unwrap() - 0.5).abs() < 1e-12);
        assert!(f.interpolate(1.01, 0.0).is_err());
        assert!(f.interpolate(0.5, 1.5).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let g = Grid2D::centered(Grid1D::new(1.0, 5).unwrap(), 1.3, 4.0, 4).unwrap();
        let f = Field2D::from_fn(g, 0.123456789, |x, z| (x * 7.1).sin() * (z * 3.3).exp() / 3.0);
        let text = format!("# config_hash=abc\n{}", f.to_csv());
        let back = Field2D::from_csv(&text).unwrap();
        assert_eq!(back, f);
        let f1 = Field1D::from_fn(*g.x(), 0.5, |x| -x / 3.0);
        assert_eq!(Field1D::from_csv(&f1.to_csv()).unwrap(), f1);
        assert!(Field2D::from_csv("# grid2d n_x=3\n# t=0\n").is_err());
    }

    proptest! {
        #[test]
        fn stencils_annihilate_constants(c in -1e6f64..1e6, i in 1usize..10, j in 1usize..8) {
            let g = grid2();
            let f = Field2D::from_fn(g, 0.0, |_, _| c);
            prop_assert_eq!(f.d_dx(i, j, Difference::Central).unwrap(), 0.0);
            prop_assert_eq!(f.d_dz(i, j, Difference::Forward).unwrap(), 0.0);
            prop_assert_eq!(f.d2_dx2(i, j).unwrap(), 0.0);
            prop_assert_eq!(f.d2_dz2(i, j).unwrap(), 0.0);
            prop_assert_eq!(f.d2_dxdz(i, j).unwrap(), 0.0);
        }

        #[test]
        fn weights_are_a_partition_of_unity(x in 0.0f64..=1.0, z in -1.0f64..=1.0) {
            let cell = grid2().locate(x, z).unwrap();
            let w = cell.weights();
            prop_assert!(w.iter().all(|&v| v >= 0.0));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }

        #[test]
        fn csv_is_lossless(vals in proptest::collection::vec(-1e300f64..1e300, 9)) {
            let g = Grid2D::new(Grid1D::new(2.0, 3).unwrap(), -0.5, 0.75, 3).unwrap();
            let f = Field2D { grid: g, t: 0.3, values: vals };
            prop_assert_eq!(Field2D::from_csv(&f.to_csv()).unwrap(), f);
        }
    }
}
