//! Interpolation tables for the aerodynamic coefficient components.
//!
//! Lookups outside the tabulated range are an error, never an
//! extrapolation: high-incidence studies must not silently leave the
//! region the data covers.

use serde::{Deserialize, Serialize};

use crate::error::{SimError, SimResult};

fn check_grid(name: &str, grid: &[f64]) -> SimResult<()> {
    if grid.len() < 2 {
        return Err(SimError::Table(format!(
            "{name}: grid needs at least two breakpoints, got {}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(SimError::Table(format!(
            "{name}: breakpoints must be strictly increasing"
        )));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(SimError::Table(format!("{name}: non-finite breakpoint")));
    }
    Ok(())
}

/// Locate `x` in `grid`, returning the lower bracket index and the
/// normalized position within the cell.
fn bracket(
    quantity: &'static str,
    grid: &[f64],
    x: f64,
) -> SimResult<(usize, f64)> {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    if !(x >= lo && x <= hi) {
        return Err(SimError::OutOfEnvelope {
            quantity,
            value: x,
            min: lo,
            max: hi,
        });
    }
    // partition_point returns the first index with breakpoint > x.
    let i = grid.partition_point(|&b| b <= x).min(grid.len() - 1) - 1;
    let frac = (x - grid[i]) / (grid[i + 1] - grid[i]);
    Ok((i, frac))
}

/// One-dimensional table with linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl Table1 {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> SimResult<Self> {
        check_grid("table1", &breakpoints)?;
        if values.len() != breakpoints.len() {
            return Err(SimError::Table(format!(
                "table1: {} values for {} breakpoints",
                values.len(),
                breakpoints.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Table("table1: non-finite value".into()));
        }
        Ok(Self { breakpoints, values })
    }

    /// Sample a function onto a grid.
    pub fn from_fn(breakpoints: Vec<f64>, f: impl Fn(f64) -> f64) -> SimResult<Self> {
        let values = breakpoints.iter().map(|&x| f(x)).collect();
        Self::new(breakpoints, values)
    }

    pub fn lookup(&self, quantity: &'static str, x: f64) -> SimResult<f64> {
        let (i, s) = bracket(quantity, &self.breakpoints, x)?;
        Ok(self.values[i] + s * (self.values[i + 1] - self.values[i]))
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Two-dimensional table with bilinear interpolation. Rows follow the
/// first (row) grid, columns the second (column) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2 {
    row_points: Vec<f64>,
    col_points: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl Table2 {
    pub fn new(
        row_points: Vec<f64>,
        col_points: Vec<f64>,
        values: Vec<Vec<f64>>,
    ) -> SimResult<Self> {
        check_grid("table2 rows", &row_points)?;
        check_grid("table2 cols", &col_points)?;
        if values.len() != row_points.len() {
            return Err(SimError::Table(format!(
                "table2: {} rows for {} row breakpoints",
                values.len(),
                row_points.len()
            )));
        }
        for row in &values {
            if row.len() != col_points.len() {
                return Err(SimError::Table(format!(
                    "table2: row of length {} for {} column breakpoints",
                    row.len(),
                    col_points.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(SimError::Table("table2: non-finite value".into()));
            }
        }
        Ok(Self { row_points, col_points, values })
    }

    pub fn from_fn(
        row_points: Vec<f64>,
        col_points: Vec<f64>,
        f: impl Fn(f64, f64) -> f64,
    ) -> SimResult<Self> {
        let values = row_points
            .iter()
            .map(|&r| col_points.iter().map(|&c| f(r, c)).collect())
            .collect();
        Self::new(row_points, col_points, values)
    }

    pub fn lookup(
        &self,
        row_quantity: &'static str,
        col_quantity: &'static str,
        r: f64,
        c: f64,
    ) -> SimResult<f64> {
        let (i, s) = bracket(row_quantity, &self.row_points, r)?;
        let (j, t) = bracket(col_quantity, &self.col_points, c)?;
        let v00 = self.values[i][j];
        let v01 = self.values[i][j + 1];
        let v10 = self.values[i + 1][j];
        let v11 = self.values[i + 1][j + 1];
        Ok(v00 * (1.0 - s) * (1.0 - t)
            + v10 * s * (1.0 - t)
            + v01 * (1.0 - s) * t
            + v11 * s * t)
    }

    pub fn row_points(&self) -> &[f64] {
        &self.row_points
    }

    pub fn col_points(&self) -> &[f64] {
        &self.col_points
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Largest absolute value in the table.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_interp_hits_breakpoints_and_midpoints() {
        let t = Table1::new(vec![0.0, 1.0, 3.0], vec![10.0, 20.0, 40.0]).unwrap();
        assert_eq!(t.lookup("x", 0.0).unwrap(), 10.0);
        assert_eq!(t.lookup("x", 3.0).unwrap(), 40.0);
        assert_eq!(t.lookup("x", 0.5).unwrap(), 15.0);
        assert_eq!(t.lookup("x", 2.0).unwrap(), 30.0);
        assert!(t.lookup("x", 3.1).is_err());
        assert!(t.lookup("x", -0.1).is_err());
    }

    #[test]
    fn bilinear_center_is_mean_of_corners() {
        let t = Table2::new(
            vec![0.0, 2.0],
            vec![0.0, 4.0],
            vec![vec![1.0, 3.0], vec![5.0, 7.0]],
        )
        .unwrap();
        assert_eq!(t.lookup("r", "c", 1.0, 2.0).unwrap(), 4.0);
        assert_eq!(t.lookup("r", "c", 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(t.lookup("r", "c", 2.0, 4.0).unwrap(), 7.0);
        // edge midpoint
        assert_eq!(t.lookup("r", "c", 0.0, 2.0).unwrap(), 2.0);
    }

    #[test]
    fn malformed_tables_are_rejected() {
        assert!(Table1::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Table1::new(vec![0.0], vec![1.0]).is_err());
        assert!(Table1::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Table2::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![vec![1.0, 2.0]]).is_err());
        assert!(
            Table2::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![vec![1.0], vec![2.0]]).is_err()
        );
    }
}
