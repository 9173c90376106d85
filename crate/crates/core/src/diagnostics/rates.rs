use serde::{Deserialize, Serialize};

use crate::fem::ErrorNorms;

/// `log(e_coarse/e_fine)/log 2`; undefined unless both errors are positive
/// and finite.
pub fn rate(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0 && coarse.is_finite() && fine.is_finite())
        .then(|| (coarse / fine).ln() / std::f64::consts::LN_2)
}

/// One level of a convergence ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    /// Mesh size `h` for spatial ladders, `Δt` for temporal ones.
    pub size: f64,
    pub dof: usize,
    pub errors: ErrorNorms,
    /// Rates against the previous row, in the order `e₀, e₁, e₁ᵣ, e₂`.
    pub rates: [Option<f64>; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderKind {
    Spatial,
    Temporal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub kind: LadderKind,
    pub rows: Vec<RateRow>,
}

impl RateTable {
    /// Builds the table from `(size, dof, errors)` ordered coarse to fine.
    pub fn from_levels(kind: LadderKind, levels: Vec<(f64, usize, ErrorNorms)>) -> Self {
        let mut rows: Vec<RateRow> = Vec::with_capacity(levels.len());
        for (size, dof, errors) in levels {
            let rates = match rows.last() {
                None => [None; 4],
                Some(prev) => {
                    let (a, b) = (prev.errors.as_array(), errors.as_array());
                    [0, 1, 2, 3].map(|k| rate(a[k], b[k]))
                }
            };
            rows.push(RateRow {
                size,
                dof,
                errors,
                rates,
            });
        }
        Self { kind, rows }
    }

    /// Rates of the last interval.
    pub fn last_rates(&self) -> [Option<f64>; 4] {
        self.rows.last().map_or([None; 4], |r| r.rates)
    }

    /// Writes the table as CSV: `size,dof,e0,r0,e1,r1,e1r,r1r,e2,r2`, with
    /// empty fields for undefined rates.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let size = match self.kind {
            LadderKind::Spatial => "h",
            LadderKind::Temporal => "dt",
        };
        w.write_record([
            size, "dof", "e0", "r_e0", "e1", "r_e1", "e1r", "r_e1r", "e2", "r_e2",
        ])?;
        for row in &self.rows {
            let mut rec = vec![fmt_f64(row.size), row.dof.to_string()];
            for (e, r) in row.errors.as_array().iter().zip(row.rates) {
                rec.push(fmt_f64(*e));
                rec.push(r.map(fmt_f64).unwrap_or_default());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Fixed-width text rendering for terminals.
    pub fn summary(&self) -> String {
        let size = match self.kind {
            LadderKind::Spatial => "h",
            LadderKind::Temporal => "dt",
        };
        let mut s = format!(
            "{size:>10} {:>7} | {:>10} {:>5} | {:>10} {:>5} | {:>10} {:>5} | {:>10} {:>5}\n",
            "dof", "e0", "r", "e1", "r", "e1r", "r", "e2", "r"
        );
        for row in &self.rows {
            s.push_str(&format!("{:>10.3e} {:>7}", row.size, row.dof));
            for (e, r) in row.errors.as_array().iter().zip(row.rates) {
                let r = r.map_or_else(|| "-".to_string(), |r| format!("{r:.2}"));
                s.push_str(&format!(" | {e:>10.3e} {r:>5}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Shortest representation that parses back to the same `f64`.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norms(e: f64) -> ErrorNorms {
        ErrorNorms {
            e0: e,
            e1: 2.0 * e,
            e1r: e * e,
            e2: 0.0,
        }
    }

    #[test]
    fn rates_between_levels() {
        let t = RateTable::from_levels(
            LadderKind::Spatial,
            vec![
                (0.5, 9, norms(0.4)),
                (0.25, 25, norms(0.1)),
                (0.125, 81, norms(0.025)),
            ],
        );
        assert_eq!(t.rows[0].rates, [None; 4]);
        let r = t.last_rates();
        assert!((r[0].unwrap() - 2.0).abs() < 1e-12);
        assert!((r[1].unwrap() - 2.0).abs() < 1e-12);
        assert!((r[2].unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(r[3], None);
    }

    #[test]
    fn csv_leaves_undefined_rates_empty() {
        let t = RateTable::from_levels(
            LadderKind::Temporal,
            vec![(1e-3, 4, norms(1.0)), (5e-4, 4, norms(0.5))],
        );
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "dt,dof,e0,r_e0,e1,r_e1,e1r,r_e1r,e2,r_e2");
        assert_eq!(lines[1], "0.001,4,1.0,,2.0,,1.0,,0.0,");
        assert!(lines[2].starts_with("0.0005,4,0.5,1.0,"));
    }
}
