//! Time-varying user density from sparse inverse-DFT traffic patterns.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::RadioConfig;
use crate::error::{Error, Result};
use crate::layout::Rect;

/// Samples in four weeks at ten-minute resolution.
pub const DEFAULT_SAMPLES: usize = 4032;
/// Ten minutes.
pub const DEFAULT_SAMPLE_PERIOD: f64 = 600.0;
/// Lower bound applied to perturbed density draws, users/m^2.
pub const PERTURBED_FLOOR: f64 = 1e-9;

/// Name of the built-in five-class preset table.
pub const PRESET_TABLE: &str = "xu2016";

/// Sparse traffic spectrum; mirror coefficients `X[N-k] = conj(X[k])` are
/// implied and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPattern {
    /// Reconstruction scale factor.
    pub scale: f64,
    pub n_samples: usize,
    /// Seconds between samples.
    pub sample_period: f64,
    /// Stored `(k, X[k])` pairs with `k <= N/2`.
    pub coefficients: Vec<(usize, Complex64)>,
}

impl DensityPattern {
    pub fn new(
        scale: f64,
        n_samples: usize,
        sample_period: f64,
        coefficients: Vec<(usize, Complex64)>,
    ) -> Result<Self> {
        let p = DensityPattern {
            scale,
            n_samples,
            sample_period,
            coefficients,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds a pattern from `(k, magnitude, phase)` triples.
    pub fn from_polar(
        scale: f64,
        n_samples: usize,
        sample_period: f64,
        terms: &[(usize, f64, f64)],
    ) -> Result<Self> {
        let coefficients = terms
            .iter()
            .map(|&(k, mag, phase)| (k, Complex64::from_polar(mag, phase)))
            .collect();
        Self::new(scale, n_samples, sample_period, coefficients)
    }

    /// Single DC coefficient: `x[n] = scale * value / N` everywhere.
    pub fn constant(scale: f64, value: f64) -> Self {
        DensityPattern {
            scale,
            n_samples: DEFAULT_SAMPLES,
            sample_period: DEFAULT_SAMPLE_PERIOD,
            coefficients: vec![(0, Complex64::new(value, 0.0))],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::invalid("density pattern", "N must be positive"));
        }
        if !(self.sample_period > 0.0 && self.sample_period.is_finite()) {
            return Err(Error::invalid("density pattern", "sample period must be positive"));
        }
        if !self.scale.is_finite() {
            return Err(Error::invalid("density pattern", "scale must be finite"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(k, x) in &self.coefficients {
            if 2 * k > self.n_samples {
                return Err(Error::invalid(
                    "density pattern",
                    format!("index {k} above N/2; store the conjugate index {} instead", self.n_samples - k),
                ));
            }
            if !seen.insert(k) {
                return Err(Error::invalid("density pattern", format!("index {k} given twice")));
            }
            if !(x.re.is_finite() && x.im.is_finite()) {
                return Err(Error::invalid("density pattern", format!("coefficient {k} not finite")));
            }
        }
        Ok(())
    }

    /// Full complex IDFT value at sample `n` (wrapped modulo N), before the
    /// real part is taken and before clamping.
    pub fn reconstruct_complex(&self, n: i64) -> Complex64 {
        let big_n = self.n_samples as i64;
        let n = n.rem_euclid(big_n);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(k, x) in &self.coefficients {
            // (k n) mod N keeps the phase argument small.
            let kn = (k as i64 * n).rem_euclid(big_n) as f64;
            let phase = 2.0 * PI * kn / big_n as f64;
            acc += x * Complex64::from_polar(1.0, phase);
            let mirror = (big_n - k as i64).rem_euclid(big_n) as usize;
            if mirror != k {
                let mkn = (mirror as i64 * n).rem_euclid(big_n) as f64;
                acc += x.conj() * Complex64::from_polar(1.0, 2.0 * PI * mkn / big_n as f64);
            }
        }
        acc * (self.scale / big_n as f64)
    }

    /// Raw reconstructed traffic, real part only, possibly negative.
    pub fn reconstruct_raw(&self, n: i64) -> f64 {
        self.reconstruct_complex(n).re
    }

    /// Reconstructed traffic at sample `n`, clamped at zero.
    pub fn reconstruct_traffic(&self, n: i64) -> f64 {
        self.reconstruct_raw(n).max(0.0)
    }

    /// One full period of clamped traffic values.
    pub fn period(&self) -> Vec<f64> {
        (0..self.n_samples as i64).map(|n| self.reconstruct_traffic(n)).collect()
    }

    /// Sample index holding time `t` (floor quantization).
    pub fn sample_index(&self, t: f64) -> i64 {
        (t / self.sample_period).floor() as i64
    }

    /// Parses the override file format: header lines `gamma_r`, `N`,
    /// `mu_seconds` followed by `k magnitude phase_radians` lines. `#` starts
    /// a comment; headers may use `=` or whitespace.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut scale = None;
        let mut n_samples = DEFAULT_SAMPLES;
        let mut period = DEFAULT_SAMPLE_PERIOD;
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == '=')
                .filter(|s| !s.is_empty())
                .collect();
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| err(line_no, format!("'{s}' is not a number")))
            };
            match fields[0] {
                "gamma_r" if fields.len() == 2 => scale = Some(num(fields[1])?),
                "N" if fields.len() == 2 => {
                    n_samples = fields[1]
                        .parse()
                        .map_err(|_| err(line_no, format!("N must be an integer, got '{}'", fields[1])))?
                }
                "mu_seconds" if fields.len() == 2 => period = num(fields[1])?,
                _ if fields.len() == 3 => {
                    let k: usize = fields[0]
                        .parse()
                        .map_err(|_| err(line_no, format!("index '{}' is not an integer", fields[0])))?;
                    terms.push((k, num(fields[1])?, num(fields[2])?));
                }
                _ => return Err(err(line_no, format!("unrecognized line '{line}'"))),
            }
        }
        let scale = scale.ok_or_else(|| err(0, "missing gamma_r header".into()))?;
        Self::from_polar(scale, n_samples, period, &terms).map_err(|e| err(0, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Serializes in the override file format.
    pub fn to_file_format(&self) -> String {
        let mut out = format!(
            "gamma_r {:?}\nN {}\nmu_seconds {:?}\n",
            self.scale, self.n_samples, self.sample_period
        );
        for &(k, x) in &self.coefficients {
            out.push_str(&format!("{} {:?} {:?}\n", k, x.norm(), x.arg()));
        }
        out
    }
}

/// Class labels of the built-in traffic table.
pub const PRESET_LABELS: [&str; 5] = ["E", "R", "T", "O", "C"];

/// Built-in traffic pattern by class label (`E`, `R`, `T`, `O`, `C`),
/// optionally prefixed with the table name as in `xu2016:E`.
pub fn preset_pattern(name: &str) -> Result<DensityPattern> {
    let label = match name.split_once(':') {
        Some((table, label)) if table.eq_ignore_ascii_case(PRESET_TABLE) => label,
        Some(_) => {
            return Err(Error::invalid("pattern preset", format!("unknown table in '{name}'")));
        }
        None => name,
    };
    // (gamma_r, X[0], X[4], X[28], X[56]) with complex terms as (mag, phase).
    #[allow(clippy::type_complexity)]
    let row: (f64, f64, (f64, f64), (f64, f64), (f64, f64)) = match label.trim() {
        "E" => (8.35e11, 3.24e-4, (0.06, -0.3), (0.5, 2.36), (0.08, 0.69)),
        "R" => (17.4e11, 2.73e-4, (0.04, -1.02), (0.27, 1.72), (0.17, 1.35)),
        "T" => (4.32e11, 3.73e-4, (0.1, 1.04), (0.38, 2.53), (0.28, 2.46)),
        "O" => (5.23e11, 4.63e-4, (0.21, 1.21), (0.56, 2.52), (0.2, 0.29)),
        "C" => (17.4e11, 2.85e-4, (0.04, 0.35), (0.3, 2.19), (0.15, 1.11)),
        other => {
            return Err(Error::invalid("pattern preset", format!("unknown class '{other}'")));
        }
    };
    let (gamma, dc, x4, x28, x56) = row;
    DensityPattern::from_polar(
        gamma,
        DEFAULT_SAMPLES,
        DEFAULT_SAMPLE_PERIOD,
        &[(0, dc, 0.0), (4, x4.0, x4.1), (28, x28.0, x28.1), (56, x56.0, x56.1)],
    )
}

/// How reconstructed traffic maps to the density used for placement.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMapping {
    /// When set, traffic is normalized by its period maximum and scaled so
    /// the peak equals this density (users/m^2).
    pub peak_density: Option<f64>,
    /// When set together with `peak_density`, the raw (unclamped) traffic is
    /// mapped affinely so its period minimum lands here and its maximum on
    /// the peak.
    pub trough_density: Option<f64>,
    /// Densities below this value are raised to it (users/m^2).
    pub floor: f64,
}

impl Default for DensityMapping {
    fn default() -> Self {
        DensityMapping {
            peak_density: None,
            trough_density: None,
            floor: 1e-6,
        }
    }
}

/// A rectangular subregion with its own traffic pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Subregion {
    pub label: String,
    pub rect: Rect,
    pub pattern: DensityPattern,
    pub mapping: DensityMapping,
    /// Name the pattern was loaded from, kept for serialization.
    pub pattern_source: PatternSource,
}

/// Where a subregion's pattern came from.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternSource {
    Preset(String),
    File(std::path::PathBuf),
    /// `(k, magnitude, phase)` terms as written in the scenario file.
    Inline(Vec<(usize, f64, f64)>),
}

impl Subregion {
    pub fn area(&self) -> f64 {
        self.rect.area()
    }

    pub fn validate(&self) -> Result<()> {
        self.rect.validate()?;
        self.pattern.validate()?;
        if !(self.mapping.floor >= 0.0 && self.mapping.floor.is_finite()) {
            return Err(Error::invalid("subregion", format!("'{}': floor must be >= 0", self.label)));
        }
        if let Some(p) = self.mapping.peak_density {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::invalid(
                    "subregion",
                    format!("'{}': peak density must be positive", self.label),
                ));
            }
        }
        if let Some(t) = self.mapping.trough_density {
            match self.mapping.peak_density {
                Some(p) if t > 0.0 && t <= p => {}
                _ => {
                    return Err(Error::invalid(
                        "subregion",
                        format!("'{}': trough density needs a peak density and 0 < trough <= peak", self.label),
                    ))
                }
            }
        }
        Ok(())
    }

    /// Density at `t` after normalization and flooring; this is the value
    /// placement decisions are made for.
    pub fn planning_density(&self, t: f64, radio: &RadioConfig) -> f64 {
        self.planning_series(t, self.pattern.sample_period, 1, radio)[0]
    }

    /// Planning densities for `slots` consecutive slots starting at `start`.
    pub fn planning_series(&self, start: f64, slot: f64, slots: usize, radio: &RadioConfig) -> Vec<f64> {
        let n = self.pattern.n_samples as i64;
        let map: Box<dyn Fn(i64) -> f64> = match (self.mapping.peak_density, self.mapping.trough_density) {
            (Some(peak), Some(trough)) => {
                let raw: Vec<f64> = (0..n).map(|i| self.pattern.reconstruct_raw(i)).collect();
                let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let span = hi - lo;
                Box::new(move |i| {
                    if span > 0.0 {
                        trough + (peak - trough) * (raw[i as usize] - lo) / span
                    } else {
                        peak
                    }
                })
            }
            (Some(peak), None) => {
                let period = self.pattern.period();
                let max = period.iter().copied().fold(0.0, f64::max);
                Box::new(move |i| if max > 0.0 { peak * period[i as usize] / max } else { 0.0 })
            }
            _ => {
                let period = self.pattern.period();
                let unit = radio.rate_bps * radio.bs_coverage_area;
                Box::new(move |i| period[i as usize] / unit)
            }
        };
        (0..slots)
            .map(|i| {
                let t = start + i as f64 * slot;
                map(self.pattern.sample_index(t).rem_euclid(n)).max(self.mapping.floor)
            })
            .collect()
    }
}

/// User density at time `t`: traffic at sample `floor(t / mu)` divided by
/// the rate times the reference coverage area.
pub fn user_density(sub: &Subregion, t: f64, radio: &RadioConfig) -> f64 {
    let n = sub.pattern.sample_index(t);
    sub.pattern.reconstruct_traffic(n) / (radio.rate_bps * radio.bs_coverage_area)
}

/// One draw of a biased, noisy density prediction, deterministic in `seed`.
pub fn perturbed_density(lambda: f64, bias: f64, stddev: f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perturb_with(lambda, bias, stddev, &mut rng)
}

/// Same as [`perturbed_density`] but drawing from a caller-owned stream.
pub fn perturb_with<R: rand::Rng + ?Sized>(lambda: f64, bias: f64, stddev: f64, rng: &mut R) -> f64 {
    if stddev == 0.0 {
        return (lambda + bias).max(PERTURBED_FLOOR);
    }
    let z: f64 = StandardNormal.sample(rng);
    (lambda + bias + stddev * z).max(PERTURBED_FLOOR)
}
