//! Seeded synthetic markets: correlated Gaussian log-returns with an optional
//! common crash and an optional high-volatility aftermath.

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::fmt::sig17;
use crate::ingest::{
    align, AlignPolicy, Manifest, ManifestEntry, PriceSeries, PriceTable, ReturnMatrix,
};

/// Every series falls by `sigmas` daily standard deviations for `len` days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shock {
    pub start: usize,
    pub len: usize,
    pub sigmas: f64,
}

/// Volatility multiplied by `multiplier` for `len` days right after the shock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aftershock {
    pub len: usize,
    pub multiplier: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketScenario {
    pub n_series: usize,
    /// Number of daily returns.
    pub len: usize,
    pub daily_sigma: f64,
    /// Pairwise correlation induced by a shared market factor.
    pub correlation: f64,
    pub shock: Option<Shock>,
    pub aftershock: Option<Aftershock>,
    pub seed: u64,
    pub first_day: NaiveDate,
}

impl Default for MarketScenario {
    fn default() -> Self {
        Self {
            n_series: 4,
            len: 1000,
            daily_sigma: 0.01,
            correlation: 0.5,
            shock: None,
            aftershock: None,
            seed: 0,
            first_day: NaiveDate::from_ymd_opt(2000, 1, 3).unwrap(),
        }
    }
}

impl MarketScenario {
    /// Four series, 1000 days at 1% volatility, with a 10-day -5σ crash starting on day 700.
    pub fn crash(seed: u64) -> Self {
        Self {
            shock: Some(Shock {
                start: 700,
                len: 10,
                sigmas: 5.0,
            }),
            seed,
            ..Self::default()
        }
    }

    /// `crash` followed by 60 days of 2.5x volatility.
    pub fn crash_with_aftershock(seed: u64) -> Self {
        Self {
            aftershock: Some(Aftershock {
                len: 60,
                multiplier: 2.5,
            }),
            ..Self::crash(seed)
        }
    }

    /// Trading dates (weekdays) for `count` consecutive days.
    pub fn trading_days(&self, count: usize) -> Vec<NaiveDate> {
        let mut days = Vec::with_capacity(count);
        let mut d = self.first_day;
        while days.len() < count {
            if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
                days.push(d);
            }
            d = d + Days::new(1);
        }
        days
    }

    fn volatility(&self, day: usize) -> f64 {
        match (self.shock, self.aftershock) {
            (Some(s), Some(a)) if day >= s.start + s.len && day < s.start + s.len + a.len => {
                self.daily_sigma * a.multiplier
            }
            _ => self.daily_sigma,
        }
    }

    fn drift(&self, day: usize) -> f64 {
        match self.shock {
            Some(s) if day >= s.start && day < s.start + s.len => -s.sigmas * self.daily_sigma,
            _ => 0.0,
        }
    }

    /// Log-returns dated by the second of each pair of trading days.
    pub fn returns(&self) -> ReturnMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let common_weight = self.correlation.sqrt();
        let own_weight = (1.0 - self.correlation).sqrt();
        let mut rows = vec![Vec::with_capacity(self.len); self.n_series];
        for day in 0..self.len {
            let market: f64 = StandardNormal.sample(&mut rng);
            let vol = self.volatility(day);
            let drift = self.drift(day);
            for row in rows.iter_mut() {
                let own: f64 = StandardNormal.sample(&mut rng);
                row.push(drift + vol * (common_weight * market + own_weight * own));
            }
        }
        let dates = self.trading_days(self.len + 1).split_off(1);
        let names = (0..self.n_series)
            .map(|i| format!("IDX{}", i + 1))
            .collect();
        ReturnMatrix::from_rows(dates, names, rows)
    }

    /// Closing prices starting at 100 whose log-returns are [`Self::returns`].
    pub fn prices(&self) -> PriceTable {
        let returns = self.returns();
        let dates = self.trading_days(self.len + 1);
        let series: Vec<PriceSeries> = returns
            .rows()
            .iter()
            .zip(returns.names())
            .map(|(row, name)| {
                let mut level = 100.0f64.ln();
                let mut closes = vec![100.0];
                for r in row {
                    level += r;
                    closes.push(level.exp());
                }
                PriceSeries {
                    name: name.clone(),
                    dates: dates.clone(),
                    closes,
                }
            })
            .collect();
        align(&series, AlignPolicy::Intersection).expect("synthetic calendars are identical")
    }

    /// Writes one `Date,Close` CSV per series plus `manifest.json` into `dir`.
    /// Returns the manifest path.
    pub fn write_basket(&self, dir: impl AsRef<Path>) -> io::Result<PathBuf> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let table = self.prices();
        let mut entries = Vec::new();
        for (i, name) in table.names().iter().enumerate() {
            let file = format!("{name}.csv");
            let mut out = BufWriter::new(fs::File::create(dir.join(&file))?);
            writeln!(out, "Date,Close")?;
            for (d, c) in table.dates().iter().zip(table.closes(i)) {
                writeln!(out, "{},{}", d.format("%Y-%m-%d"), sig17(*c))?;
            }
            out.flush()?;
            entries.push(ManifestEntry {
                name: name.clone(),
                path: PathBuf::from(file),
                date_column: "Date".into(),
                close_column: "Close".into(),
                date_format: None,
            });
        }
        let manifest = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&Manifest { series: entries })?;
        fs::write(&manifest, text + "\n")?;
        Ok(manifest)
    }

    /// Index range of returns in the shock, if any.
    pub fn shock_days(&self) -> Option<std::ops::Range<usize>> {
        self.shock.map(|s| s.start..s.start + s.len)
    }

    /// Index range of returns in the post-shock volatility regime, if any.
    pub fn aftershock_days(&self) -> Option<std::ops::Range<usize>> {
        match (self.shock, self.aftershock) {
            (Some(s), Some(a)) => Some(s.start + s.len..s.start + s.len + a.len),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::log_returns;

    #[test]
    fn reproducible_and_shaped() {
        let s = MarketScenario::crash(7);
        let a = s.returns();
        assert_eq!(a, s.returns());
        assert_eq!((a.n_series(), a.len()), (4, 1000));
        assert_ne!(a, MarketScenario::crash(8).returns());
        assert!(a
            .dates()
            .iter()
            .all(|d| d.weekday().num_days_from_monday() < 5));
    }

    #[test]
    fn shock_days_fall_hard() {
        let a = MarketScenario::crash(1).returns();
        for day in 700..710 {
            let mean: f64 = (0..4).map(|i| a.row(i)[day]).sum::<f64>() / 4.0;
            assert!(mean < -0.02, "day {day}: {mean}");
        }
    }

    #[test]
    fn basket_files_load_back() {
        let dir = tempfile::tempdir().unwrap();
        let s = MarketScenario {
            len: 30,
            ..MarketScenario::crash(4)
        };
        let manifest = s.write_basket(dir.path()).unwrap();
        let m = Manifest::load(&manifest).unwrap();
        assert_eq!(m.series.len(), 4);
        let entry = &m.series[2];
        let series = crate::ingest::load_csv(
            m.resolve_path(dir.path(), entry),
            &entry.name,
            &entry.schema(),
        )
        .unwrap();
        assert_eq!(series.closes, s.prices().closes(2));
    }

    #[test]
    fn prices_reproduce_returns() {
        let s = MarketScenario {
            len: 50,
            ..MarketScenario::crash(3)
        };
        let s = MarketScenario { shock: None, ..s };
        let back = log_returns(&s.prices()).unwrap();
        let direct = s.returns();
        for i in 0..4 {
            for (x, y) in back.row(i).iter().zip(direct.row(i)) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
