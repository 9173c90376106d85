//! Energies, mass, max-norm, error norms and convergence tables.

mod energy;
mod ladder;
mod rates;

use std::io;

pub use energy::{record, EnergyEvaluator, StepRecord};
pub use ladder::{convergence_ladder, Ladder};
pub use rates::{rate, LadderKind, RateRow, RateTable};

pub const RECORD_COLUMNS: [&str; 6] = ["t", "E1", "E2", "E_total", "mass", "max_norm"];

/// Streams [`StepRecord`]s as CSV rows.
pub struct RecordWriter<W: io::Write> {
    inner: csv::Writer<W>,
}

impl<W: io::Write> RecordWriter<W> {
    pub fn new(out: W) -> csv::Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(RECORD_COLUMNS)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, r: &StepRecord) -> csv::Result<()> {
        self.inner.write_record(
            [r.t, r.e1, r.e2, r.total_energy(), r.mass, r.max_norm].map(rates::fmt_f64),
        )
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Largest per-step increase of the total energy, `max(Eⁿ⁺¹ − Eⁿ)`; negative
/// when the energy strictly decreases.
pub fn max_energy_increase(history: &[StepRecord]) -> f64 {
    history
        .windows(2)
        .map(|w| w[1].total_energy() - w[0].total_energy())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max |massⁿ − mass⁰| / |mass⁰|`.
pub fn relative_mass_drift(history: &[StepRecord]) -> f64 {
    let m0 = history.first().map_or(0.0, |r| r.mass);
    history
        .iter()
        .map(|r| (r.mass - m0).abs())
        .fold(0.0, f64::max)
        / m0.abs()
}
